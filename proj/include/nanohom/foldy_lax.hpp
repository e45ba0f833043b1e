#pragma once

// Discrete Foldy-Lax model: one point dipole per particle, coupled through
// the dyadic Green's function, in the substituted unknowns U_n.

#include <cmath>
#include <vector>

#include "nanohom/core.hpp"
#include "nanohom/farfield.hpp"
#include "nanohom/geometry.hpp"
#include "nanohom/interaction.hpp"
#include "nanohom/params.hpp"
#include "nanohom/tensors.hpp"

namespace nanohom {

/// E^Inc(x) = p e^{ik theta.x}
inline CVec3 incident_E(const Vec3& theta, const Vec3& pol, double k, const Vec3& x) {
    return std::exp(I_unit * (k * theta.dot(x))) * pol.cast<Complex>();
}

/// H^Inc(x) = (theta x p) e^{ik theta.x}
inline CVec3 incident_H(const Vec3& theta, const Vec3& pol, double k, const Vec3& x) {
    return std::exp(I_unit * (k * theta.dot(x))) * theta.cross(pol).cast<Complex>();
}

struct PlaneWave {
    Vec3 theta = Vec3::UnitZ();
    Vec3 pol = Vec3::UnitX();
    double k = 1.0;
};

struct DipoleSolution {
    std::vector<CVec3> U;
    double residual = 0.0;
    std::size_t M = 0;
};

/// U_n - s xi d^3 sum_{p != n} Upsilon_k(z_n, z_p) P0 U_p = i k H^Inc(z_n).
inline DenseSystem assemble(const ParticleLattice& lattice, const PolarizationTensor& p0, double xi, double d,
                            const PlaneWave& wave, double s, std::size_t dense_limit = default_dense_limit) {
    const std::size_t m = lattice.particle_count();
    if (m == 0) throw Error(ErrorCode::InvalidConfig, "lattice has no particles");
    check_dense_limit(3 * m, dense_limit);
    InteractionOperator op{lattice.positions, p0.matrix, s * xi * d * d * d, wave.k};
    Eigen::VectorXcd rhs(3 * m);
    for (std::size_t n = 0; n < m; ++n)
        rhs.segment<3>(3 * n) = I_unit * wave.k * incident_H(wave.theta, wave.pol, wave.k, lattice.positions[n]);
    return assemble_dense(std::move(op), std::move(rhs), dense_limit);
}

struct InvertibilityDiagnostic {
    double margin = 1.0;  // 1 - xi ||P0||_2
    bool satisfied() const { return margin > 0.0; }
};

/// The invertibility condition of the Foldy-Lax system,
///   k^2 |eta| a^5 / (d^3 |1 - k^2 eta a^2 lambda|) |P0| < 1,
/// with eta = eta0 a^-2, d^3 = c_r^3 a^{3-h} and |1 - k^2 eta a^2 lambda| = c0 a^h,
/// collapses to k^2 eta0 a^3 / (c_r^3 a^{3-h} c0 a^h) |P0| = xi |P0| < 1.
inline InvertibilityDiagnostic check_invertibility(const PolarizationTensor& p0, double xi) {
    return {1.0 - xi * spectral_norm(p0.matrix)};
}

inline DipoleSolution solve(DenseSystem& sys) {
    const DenseSolution sol = solve_dense(sys);
    return {unpack(sol.x), sol.residual, sys.op.size()};
}

inline FarField far_field_discrete(const DipoleSolution& solution, const ParticleLattice& lattice, double xi,
                                   double d, double k, double s, const PolarizationTensor& p0,
                                   const std::vector<Direction>& directions) {
    std::vector<CVec3> moments(solution.U.size());
    const CMat3 c = p0.matrix.cast<Complex>();
    for (std::size_t n = 0; n < moments.size(); ++n) moments[n] = c * solution.U[n];
    return radiate(lattice.positions, moments, xi * d * d * d, k, s, directions);
}

/// Q_n = s (a^{5-h} / c0) P0 U_n, the unknowns of the original dipole system.
inline std::vector<CVec3> recover_Q(const DipoleSolution& solution, const PolarizationTensor& p0,
                                    const PhysicalParams& phys, double s) {
    const double scale = s * std::pow(phys.a, 5.0 - phys.h) / phys.c0;
    std::vector<CVec3> q(solution.U.size());
    const CMat3 c = p0.matrix.cast<Complex>();
    for (std::size_t n = 0; n < q.size(); ++n) q[n] = scale * (c * solution.U[n]);
    return q;
}

}  // namespace nanohom
