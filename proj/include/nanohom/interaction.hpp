#pragma once

// Dense point-interaction systems of the form
//   V_n - c sum_{p != n} Upsilon_k(z_n, z_p) C V_p = b_n,
// shared by the discrete Foldy-Lax model (C = P0, points = particles) and the
// voxelized Lippmann-Schwinger equation (C = T^mu, points = voxel centers).

#include <cmath>
#include <cstddef>
#include <vector>

#include "nanohom/core.hpp"
#include "nanohom/kernels.hpp"

namespace nanohom {

inline constexpr std::size_t default_dense_limit = 12000;

struct InteractionOperator {
    std::vector<Vec3> points;
    Mat3 coupling = Mat3::Zero();
    double prefactor = 0.0;  // c = s xi d^3
    double k = 0.0;

    std::size_t size() const { return points.size(); }

    /// y = L x, evaluated without storing L.
    Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const {
        const std::size_t m = points.size();
        Eigen::VectorXcd y(3 * m);
        const CMat3 c = coupling.cast<Complex>();
        parallel_for(m, [&](std::size_t n) {
            CVec3 acc = CVec3::Zero();
            for (std::size_t p = 0; p < m; ++p) {
                if (p == n) continue;
                acc += upsilon_k(points[n], points[p], k) * (c * x.segment<3>(3 * p));
            }
            y.segment<3>(3 * n) = x.segment<3>(3 * n) - prefactor * acc;
        });
        return y;
    }
};

struct DenseSystem {
    InteractionOperator op;
    Eigen::MatrixXcd matrix;
    Eigen::VectorXcd rhs;
};

inline void check_dense_limit(std::size_t unknowns, std::size_t dense_limit) {
    if (unknowns > dense_limit)
        throw Error(ErrorCode::SizeGuard, std::to_string(unknowns) + " unknowns exceed the dense limit " +
                                              std::to_string(dense_limit));
}

/// Identity diagonal blocks, off-diagonal block (n, p) = -c Upsilon_k(z_n, z_p) C.
inline DenseSystem assemble_dense(InteractionOperator op, Eigen::VectorXcd rhs,
                                  std::size_t dense_limit = default_dense_limit) {
    const std::size_t m = op.size();
    check_dense_limit(3 * m, dense_limit);
    DenseSystem sys;
    sys.matrix = Eigen::MatrixXcd::Identity(3 * m, 3 * m);
    const CMat3 c = op.coupling.cast<Complex>();
    // Upsilon_k(z_n, z_p) = Upsilon_k(z_p, z_n): each pair is evaluated once,
    // by the row owning the smaller index.
    parallel_for(m, [&](std::size_t n) {
        for (std::size_t p = n + 1; p < m; ++p) {
            const CMat3 g = -op.prefactor * upsilon_k(op.points[n], op.points[p], op.k);
            sys.matrix.block<3, 3>(3 * n, 3 * p) = g * c;
            sys.matrix.block<3, 3>(3 * p, 3 * n) = g * c;
        }
    });
    sys.op = std::move(op);
    sys.rhs = std::move(rhs);
    return sys;
}

struct DenseSolution {
    Eigen::VectorXcd x;
    double residual = 0.0;  // ||L x - b|| / ||b||
};

/// LU with partial pivoting, factorized in place. The residual is recomputed
/// from the operator, not from the (overwritten) matrix.
inline DenseSolution solve_dense(DenseSystem& sys) {
    DenseSolution out;
    const double bnorm = sys.rhs.norm();
    if (bnorm == 0.0) {
        out.x = Eigen::VectorXcd::Zero(sys.rhs.size());
        return out;
    }
    Eigen::PartialPivLU<Eigen::Ref<Eigen::MatrixXcd>> lu(sys.matrix);
    const auto diag = lu.matrixLU().diagonal().cwiseAbs();
    if (!diag.allFinite() || diag.minCoeff() <= 1e-14 * diag.maxCoeff())
        throw Error(ErrorCode::SingularSystem, "pivot breakdown in dense LU");
    out.x = lu.solve(sys.rhs);
    out.residual = (sys.op.apply(out.x) - sys.rhs).norm() / bnorm;
    if (!out.x.allFinite() || !(out.residual <= 1e-6))
        throw Error(ErrorCode::SingularSystem, "residual " + std::to_string(out.residual));
    return out;
}

inline std::vector<CVec3> unpack(const Eigen::VectorXcd& x) {
    std::vector<CVec3> out(static_cast<std::size_t>(x.size() / 3));
    for (std::size_t n = 0; n < out.size(); ++n) out[n] = x.segment<3>(3 * n);
    return out;
}

inline Eigen::VectorXcd pack(const std::vector<CVec3>& v) {
    Eigen::VectorXcd out(3 * v.size());
    for (std::size_t n = 0; n < v.size(); ++n) out.segment<3>(3 * n) = v[n];
    return out;
}

}  // namespace nanohom
