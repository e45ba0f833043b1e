#pragma once

// Local block tensors of one periodicity cell, the local distribution tensor
// A, the effective permeability, the Lippmann-Schwinger coupling tensor, the
// dimer closed forms and the positivity / regularity condition checks.

#include <cmath>
#include <limits>
#include <vector>

#include "nanohom/core.hpp"
#include "nanohom/kernels.hpp"
#include "nanohom/tensors.hpp"

namespace nanohom {

/// (K+1) x (K+1) array of 3x3 blocks, stored densely.
class BlockTensor {
public:
    BlockTensor() = default;
    explicit BlockTensor(int blocks) : n_(blocks), m_(Eigen::MatrixXd::Zero(3 * blocks, 3 * blocks)) {}

    int blocks() const { return n_; }
    int K() const { return n_ - 1; }
    auto block(int i, int j) { return m_.block<3, 3>(3 * i, 3 * j); }
    auto block(int i, int j) const { return m_.block<3, 3>(3 * i, 3 * j); }
    const Eigen::MatrixXd& dense() const { return m_; }
    Eigen::MatrixXd& dense() { return m_; }

    static BlockTensor identity(int blocks) {
        BlockTensor t(blocks);
        t.m_.setIdentity();
        return t;
    }

private:
    int n_ = 0;
    Eigen::MatrixXd m_;
};

/// Zero diagonal; block (i, j) = Upsilon_0(z_i, z_j) P0.
inline BlockTensor build_D0(const std::vector<Vec3>& motif, const PolarizationTensor& p0) {
    const int n = static_cast<int>(motif.size());
    BlockTensor d0(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) d0.block(i, j) = upsilon_0(motif[i], motif[j]) * p0.matrix;
    return d0;
}

/// T0 = I - s xi d^3 D0.
inline BlockTensor build_T0(const BlockTensor& d0, double xi, double d, double s) {
    BlockTensor t0 = BlockTensor::identity(d0.blocks());
    t0.dense() -= s * xi * d * d * d * d0.dense();
    return t0;
}

/// T1 = T0 - s xi J, every block of J equal to W-bar P0.
inline BlockTensor build_T1(const BlockTensor& t0, const MagnetizationAverage& wbar, const PolarizationTensor& p0,
                            double xi, double s) {
    BlockTensor t1 = t0;
    const Mat3 shift = s * xi * wbar.matrix * p0.matrix;
    for (int i = 0; i < t1.blocks(); ++i)
        for (int j = 0; j < t1.blocks(); ++j) t1.block(i, j) -= shift;
    return t1;
}

struct LocalTensor {
    Mat3 A = Mat3::Zero();
    std::vector<Mat3> A_tilde;
    double condition = 1.0;  // estimated 1-norm condition number of T1
};

/// A = (I,...,I) T1^{-1} (I;...;I) by one factorization of T1; the row
/// components A~_l of (I,...,I) T1^{-1} come from the transposed solve.
inline LocalTensor local_tensor_A(const BlockTensor& t1) {
    const int n = t1.blocks();
    const Eigen::MatrixXd& m = t1.dense();
    Eigen::MatrixXd stack(3 * n, 3);
    for (int i = 0; i < n; ++i) stack.block<3, 3>(3 * i, 0).setIdentity();

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
    // T1 is I plus dimensionless corrections, so an absolute pivot floor applies
    const double floor = 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff());
    if (lu.matrixLU().diagonal().cwiseAbs().minCoeff() < floor)
        throw Error(ErrorCode::SingularT1, "T1 has a vanishing pivot");
    const Eigen::MatrixXd x = lu.solve(stack);
    const Eigen::MatrixXd y = lu.transpose().solve(stack);
    const double rx = (m * x - stack).norm() / stack.norm();
    const double ry = (m.transpose() * y - stack).norm() / stack.norm();
    if (!x.allFinite() || !y.allFinite() || !(rx <= 1e-9) || !(ry <= 1e-9))
        throw Error(ErrorCode::SingularT1, "T1 solve residual " + std::to_string(std::max(rx, ry)));

    LocalTensor out;
    out.A = stack.transpose() * x;
    out.A_tilde.reserve(n);
    for (int l = 0; l < n; ++l) out.A_tilde.push_back(y.block<3, 3>(3 * l, 0).transpose());
    const double rc = lu.rcond();
    out.condition = rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
    return out;
}

/// mu_r = I + s xi P0 A; the effective permittivity is always I.
inline Mat3 effective_mu(const PolarizationTensor& p0, const Mat3& A, double xi, double s) {
    return Mat3::Identity() + s * xi * p0.matrix * A;
}

/// T^mu = P0 A (I + s xi W-bar P0 A)^{-1}.
inline Mat3 tensor_T_mu(const PolarizationTensor& p0, const Mat3& A, const MagnetizationAverage& wbar, double xi,
                        double s) {
    const Mat3 shift = Mat3::Identity() + s * xi * wbar.matrix * p0.matrix * A;
    Eigen::FullPivLU<Mat3> lu(shift);
    lu.setThreshold(1e-13);
    if (!lu.isInvertible()) throw Error(ErrorCode::SingularShift, "I + s xi W P0 A is singular");
    // X shift = P0 A  <=>  shift^T X^T = (P0 A)^T
    const Mat3 pa = p0.matrix * A;
    const Mat3 xt = shift.transpose().fullPivLu().solve(pa.transpose());
    return xt.transpose();
}

struct EffectiveMedium {
    Mat3 mu_r = Mat3::Identity();
    Mat3 eps_r = Mat3::Identity();
    Mat3 A = Mat3::Zero();
    std::vector<Mat3> A_tilde;
    Mat3 T_mu = Mat3::Zero();
    double t1_condition = 1.0;
};

/// The generic pipeline D0 -> T0 -> T1 -> A -> (mu_r, T^mu).
inline EffectiveMedium build_effective_medium(const std::vector<Vec3>& motif, double d, const PolarizationTensor& p0,
                                              const MagnetizationAverage& wbar, double xi, double s) {
    const BlockTensor t1 = build_T1(build_T0(build_D0(motif, p0), xi, d, s), wbar, p0, xi, s);
    const LocalTensor local = local_tensor_A(t1);
    EffectiveMedium med;
    med.A = local.A;
    med.A_tilde = local.A_tilde;
    med.t1_condition = local.condition;
    med.mu_r = effective_mu(p0, local.A, xi, s);
    med.T_mu = tensor_T_mu(p0, local.A, wbar, xi, s);
    return med;
}

// Dimer closed forms for the unit-ball P0 = (12/pi^3) I and a cubic cell,
// obtained by block inversion of the 6x6 T1 with Upsilon_0 dz(x)dz structure.
// With B = pi(pi^3 - 8 s xi) + 3 s xi and B' = pi(pi^3 - 8 s xi) - 6 s xi:
//   A    = (2 pi^4 / B) (I + 9 s xi / (d^2 B') dz(x)dz)
//   mu_r = alpha I - beta dz(x)dz
//   T^mu = alpha* I - beta* dz(x)dz

namespace detail {

struct DimerTerms {
    double s;
    double xi;
    double d;
    Vec3 dz;
    double B;
    double Bp;
};

inline double guarded(double denom, const char* what) {
    if (std::abs(denom) < 1e-12) throw Error(ErrorCode::DegenerateDenominator, what);
    return denom;
}

inline DimerTerms dimer_terms(double xi, double d, const Vec3& z01, const Vec3& z02, double s) {
    const Vec3 dz = z01 - z02;
    if (std::abs(dz.norm() - d) > 1e-9 * std::max(1.0, d))
        throw Error(ErrorCode::SeparationMismatch, "dimer separation differs from d");
    const double pi3 = pi * pi * pi;
    const double core = pi * (pi3 - 8.0 * s * xi);
    return {s, xi, d, dz, guarded(core + 3.0 * s * xi, "pi(pi^3 - 8 s xi) + 3 s xi"),
            guarded(core - 6.0 * s * xi, "pi(pi^3 - 8 s xi) - 6 s xi")};
}

}  // namespace detail

inline Mat3 dimer_A_closed_form(double xi, double d, const Vec3& z01, const Vec3& z02, double s) {
    const auto t = detail::dimer_terms(xi, d, z01, z02, s);
    const double pi4 = pi * pi * pi * pi;
    return (2.0 * pi4 / t.B) *
           (Mat3::Identity() + (9.0 * s * xi / (d * d * t.Bp)) * (t.dz * t.dz.transpose()));
}

inline Mat3 dimer_mu_closed_form(double xi, double d, const Vec3& z01, const Vec3& z02, double s) {
    const auto t = detail::dimer_terms(xi, d, z01, z02, s);
    const double pi4 = pi * pi * pi * pi;
    const double alpha = (pi4 + 16.0 * s * xi * pi + 3.0 * s * xi) / t.B;
    const double beta = -216.0 * xi * xi * pi / (d * d * t.B * t.Bp);
    return alpha * Mat3::Identity() - beta * (t.dz * t.dz.transpose());
}

inline Mat3 dimer_Tmu_closed_form(double xi, double d, const Vec3& z01, const Vec3& z02, double s) {
    const auto t = detail::dimer_terms(xi, d, z01, z02, s);
    const double pi4 = pi * pi * pi * pi;
    const double plus = detail::guarded(pi4 + 3.0 * s * xi, "pi^4 + 3 s xi");
    const double minus = detail::guarded(pi4 - 6.0 * s * xi, "pi^4 - 6 s xi");
    const double alpha_star = 24.0 * pi / plus;
    const double beta_star = -216.0 * s * xi * pi / (d * d * plus * minus);
    return alpha_star * Mat3::Identity() - beta_star * (t.dz * t.dz.transpose());
}

struct ConditionReport {
    double lhs = 0.0;               // ||P0||_2 ||A||_2
    double positivity_rhs = 0.0;    // 1 / (3 xi)
    double regularity_rhs = 0.0;    // pi / (3 xi sqrt6 (pi + k |Omega|))
    bool positivity = true;
    bool regularity = true;

    double positivity_margin() const { return positivity_rhs - lhs; }
    double regularity_margin() const { return regularity_rhs - lhs; }
};

/// Spectral-norm checks of the sign condition on mu_r and of the Holder
/// regularity condition on the effective magnetic field.
inline ConditionReport check_conditions(const PolarizationTensor& p0, const Mat3& A, double xi, double k,
                                        double vol_omega) {
    ConditionReport r;
    r.lhs = spectral_norm(p0.matrix) * spectral_norm(A);
    const double inf = std::numeric_limits<double>::infinity();
    r.positivity_rhs = xi > 0.0 ? 1.0 / (3.0 * xi) : inf;
    r.regularity_rhs = xi > 0.0 ? pi / (3.0 * xi * std::sqrt(6.0) * (pi + k * vol_omega)) : inf;
    r.positivity = r.lhs <= r.positivity_rhs;
    r.regularity = r.lhs < r.regularity_rhs;
    return r;
}

}  // namespace nanohom
