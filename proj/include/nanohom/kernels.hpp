#pragma once

// Free-space Helmholtz kernels: the scalar fundamental solution and the
// dyadic Green's function. These are the only position-dependent kernels in
// every system assembled by the library.

#include <cmath>

#include "nanohom/core.hpp"

namespace nanohom {

namespace detail {

struct Separation {
    double r;
    Vec3 unit;
};

inline Separation separation(const Vec3& x, const Vec3& z) {
    const Vec3 diff = x - z;
    const double r = diff.norm();
    if (r < 1e-14) throw Error(ErrorCode::CoincidentPoints, "kernel evaluated at coincident points");
    return {r, diff / r};
}

}  // namespace detail

/// e^{ik|x-z|} / (4 pi |x-z|)
inline Complex phi_k(const Vec3& x, const Vec3& z, double k) {
    const auto [r, unit] = detail::separation(x, z);
    return std::exp(I_unit * (k * r)) / (4.0 * pi * r);
}

/// Hessian of the Laplace kernel, -(I - 3 r^ r^) / (4 pi r^3).
inline Mat3 upsilon_0(const Vec3& x, const Vec3& z) {
    const auto [r, unit] = detail::separation(x, z);
    return -(Mat3::Identity() - 3.0 * unit * unit.transpose()) / (4.0 * pi * r * r * r);
}

/// Dyadic Green's function grad grad Phi_k + k^2 Phi_k I, in closed form:
///   Phi_k [ ((ikR - 1)/R^2)(I - 3 r^r^) + k^2 (I - r^r^) ].
/// Depends on x - z only through r^ r^, so it is symmetric in both senses.
inline CMat3 upsilon_k(const Vec3& x, const Vec3& z, double k) {
    const auto [r, unit] = detail::separation(x, z);
    const Mat3 outer = unit * unit.transpose();
    const Complex phase = std::exp(I_unit * (k * r)) / (4.0 * pi * r);
    const Complex near = phase * (Complex(-1.0, k * r) / (r * r));
    const Complex far = phase * (k * k);
    const Mat3 id = Mat3::Identity();
    CMat3 out;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            out(i, j) = near * (id(i, j) - 3.0 * outer(i, j)) + far * (id(i, j) - outer(i, j));
    return out;
}

}  // namespace nanohom
