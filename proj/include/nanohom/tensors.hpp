#pragma once

// Shape constants: the polarization tensor P0 of a single particle and the
// cell average of the magnetization operator applied to a constant field.

#include <array>
#include <cmath>
#include <vector>

#include "nanohom/core.hpp"

namespace nanohom {

struct PolarizationTensor {
    Mat3 matrix = Mat3::Zero();
};

/// W-bar = (1/|cell|) int_cell grad M_cell(I3)(x) dx for a box cell.
struct MagnetizationAverage {
    Mat3 matrix = Mat3::Identity() / 3.0;
    Vec3 cell = Vec3::Ones();
    double trace_drift = 0.0;  // |trace - 1| before renormalization
};

/// Unit ball.
inline PolarizationTensor p0_sphere() { return {(12.0 / (pi * pi * pi)) * Mat3::Identity()}; }

inline PolarizationTensor p0_custom(const Mat3& m) {
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw Error(ErrorCode::NotSymmetric, "polarization tensor is not symmetric");
    const Mat3 sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Mat3> eig(sym);
    if (eig.eigenvalues().minCoeff() < -1e-12)
        throw Error(ErrorCode::NotPSD, "polarization tensor has a negative eigenvalue");
    return {sym};
}

inline MagnetizationAverage magnetization_average_cube() { return {Mat3::Identity() / 3.0, Vec3::Ones(), 0.0}; }

namespace detail {

/// ln(t + R) with R = sqrt(rho2 + t^2), stable for t < 0.
inline double log_primitive(double t, double rho2, double R) {
    return t >= 0.0 ? std::log(t + R) : std::log(rho2 / (R - t));
}

/// grad M_box(I3)(x) = -grad grad N(1)(x) at an interior point x of the box
/// [-L/2, L/2]^3, from the corner sums of the prism potential primitives.
inline Mat3 box_magnetization_at(const Vec3& x, const Vec3& half) {
    Mat3 w = Mat3::Zero();
    for (int corner = 0; corner < 8; ++corner) {
        Vec3 u;
        double eps = 1.0;
        for (int i = 0; i < 3; ++i) {
            const double sgn = (corner >> i) & 1 ? 1.0 : -1.0;
            u(i) = sgn * half(i) - x(i);
            eps *= sgn;
        }
        const double R = u.norm();
        for (int i = 0; i < 3; ++i) {
            const int j = (i + 1) % 3;
            const int l = (i + 2) % 3;
            w(i, i) += eps * std::atan(u(j) * u(l) / (u(i) * R));
            // off-diagonal (i, j) uses the primitive along the remaining axis l
            const double lg = log_primitive(u(l), u(i) * u(i) + u(j) * u(j), R);
            w(i, j) -= eps * lg;
            w(j, i) -= eps * lg;
        }
    }
    return w / (4.0 * pi);
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
inline void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
}

}  // namespace detail

/// Cell average of the magnetization operator for a box cell with sides L,
/// by tensor Gauss-Legendre quadrature with n nodes per axis. The pointwise
/// tensor has trace exactly 1 inside the box; the quadrature drift from 1 is
/// reported and then removed by renormalization.
inline MagnetizationAverage magnetization_average_box(const Vec3& sides, int n) {
    if (!(sides.minCoeff() > 0.0)) throw Error(ErrorCode::InvalidConfig, "box sides must be positive");
    if (n < 8) throw Error(ErrorCode::InvalidConfig, "quadrature resolution must be at least 8");
    std::vector<double> x, w;
    detail::gauss_legendre(n, x, w);
    const Vec3 half = 0.5 * sides;
    // one slab per first-axis node; slabs summed in index order afterwards
    std::vector<Mat3> slabs(static_cast<std::size_t>(n), Mat3::Zero());
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t a) {
        Mat3 acc = Mat3::Zero();
        for (int b = 0; b < n; ++b) {
            Mat3 row = Mat3::Zero();
            for (int c = 0; c < n; ++c) {
                const Vec3 p(x[a] * half(0), x[b] * half(1), x[c] * half(2));
                row += w[c] * detail::box_magnetization_at(p, half);
            }
            acc += w[b] * row;
        }
        slabs[a] = w[a] * acc;
    });
    Mat3 total = Mat3::Zero();
    for (const auto& s : slabs) total += s;
    total /= 8.0;  // weights sum to 2 per axis
    const Mat3 sym = 0.5 * (total + total.transpose());
    const double tr = sym.trace();
    MagnetizationAverage out;
    out.cell = sides;
    out.trace_drift = std::abs(tr - 1.0);
    if (out.trace_drift > 1e-3)
        throw Error(ErrorCode::QuadratureFailure, "trace drift " + std::to_string(out.trace_drift));
    out.matrix = sym / tr;
    return out;
}

}  // namespace nanohom
