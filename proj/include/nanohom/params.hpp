#pragma once

// Physical and scaling parameters, and the coupled scales derived from them.

#include <cmath>
#include <optional>
#include <string>
#include <variant>

#include "nanohom/core.hpp"

namespace nanohom {

/// The global sign of the dielectric resonance. Composite tokens map as
/// "+-" -> s, "-+" -> -s, "- +-" -> -s.
enum class Sign { Plus, Minus };

constexpr double sign_value(Sign s) { return s == Sign::Plus ? 1.0 : -1.0; }

/// Axis-aligned box: corner plus side lengths.
struct Box {
    Vec3 corner = Vec3::Constant(-0.5);
    Vec3 sides = Vec3::Ones();

    double volume() const { return sides.prod(); }
    Vec3 center() const { return corner + 0.5 * sides; }
    bool contains_strictly(const Vec3& x) const {
        for (int i = 0; i < 3; ++i)
            if (!(x(i) > corner(i) && x(i) < corner(i) + sides(i))) return false;
        return true;
    }
};

/// Asymptotic parameterization: particle radius a, exponent h, dilution c_r,
/// contrast scale eta0 and resonance-detuning c0.
struct PhysicalParams {
    double a = 0.0;
    double h = 0.0;
    double c_r = 1.0;
    double eta0 = 1.0;
    double c0 = 1.0;
};

/// Minimal parameterization exercised by all downstream formulas.
struct DirectParams {
    double xi = 0.0;
    double d = 0.0;
};

struct ScatterConfig {
    double k = 1.0;
    Sign sign = Sign::Plus;
    std::variant<PhysicalParams, DirectParams> mode = DirectParams{};
    Vec3 theta = Vec3::UnitZ();
    Vec3 pol = Vec3::UnitX();
    Box domain{};
};

struct DerivedScales {
    std::optional<double> eta;  // only in Physical mode
    double d = 0.0;
    double xi = 0.0;
    long aleph = 0;
    Eigen::Vector3i cells_per_axis = Eigen::Vector3i::Zero();
    double s = 1.0;
};

/// Number of cells of side d along a length, or NonIntegerTiling.
inline int tiling_count(double length, double d) {
    if (!(d > 0.0) || !(length > 0.0))
        throw Error(ErrorCode::NonIntegerTiling, "side and d must be positive");
    const double ratio = length / d;
    const double n = std::round(ratio);
    if (n < 1.0 || std::abs(ratio - n) > 1e-9 * ratio)
        throw Error(ErrorCode::NonIntegerTiling,
                    "side " + std::to_string(length) + " is not an integer multiple of d = " +
                        std::to_string(d));
    return static_cast<int>(n);
}

inline void validate(const ScatterConfig& cfg) {
    if (!(cfg.k > 0.0)) throw Error(ErrorCode::InvalidConfig, "k must be positive");
    if (std::abs(cfg.theta.norm() - 1.0) > 1e-12)
        throw Error(ErrorCode::InvalidConfig, "theta must be a unit vector");
    if (std::abs(cfg.pol.norm() - 1.0) > 1e-12)
        throw Error(ErrorCode::InvalidConfig, "pol must be a unit vector");
    if (std::abs(cfg.theta.dot(cfg.pol)) > 1e-12)
        throw Error(ErrorCode::InvalidConfig, "theta and pol must be orthogonal");
    if (const auto* p = std::get_if<PhysicalParams>(&cfg.mode)) {
        if (!(p->h > 9.0 / 11.0 && p->h < 1.0))
            throw Error(ErrorCode::InvalidH, "h = " + std::to_string(p->h) + " outside (9/11, 1)");
        if (!(p->a > 0.0 && p->c_r > 0.0 && p->eta0 > 0.0 && p->c0 > 0.0))
            throw Error(ErrorCode::InvalidConfig, "a, c_r, eta0, c0 must be positive");
    } else {
        const auto& q = std::get<DirectParams>(cfg.mode);
        if (!(q.xi >= 0.0) || !(q.d > 0.0))
            throw Error(ErrorCode::InvalidConfig, "direct mode needs xi >= 0 and d > 0");
    }
}

/// d = c_r a^{1-h/3}.
inline double cell_size(const PhysicalParams& p) { return p.c_r * std::pow(p.a, 1.0 - p.h / 3.0); }

/// xi = eta0 k^2 / (c0 c_r^3).
inline double coupling(const PhysicalParams& p, double k) {
    return p.eta0 * k * k / (p.c0 * p.c_r * p.c_r * p.c_r);
}

inline DerivedScales derive_scales(const ScatterConfig& cfg) {
    validate(cfg);
    DerivedScales out;
    out.s = sign_value(cfg.sign);
    if (const auto* p = std::get_if<PhysicalParams>(&cfg.mode)) {
        out.eta = p->eta0 / (p->a * p->a);
        out.d = cell_size(*p);
        out.xi = coupling(*p, cfg.k);
    } else {
        const auto& q = std::get<DirectParams>(cfg.mode);
        out.d = q.d;
        out.xi = q.xi;
    }
    out.aleph = 1;
    for (int i = 0; i < 3; ++i) {
        out.cells_per_axis(i) = tiling_count(cfg.domain.sides(i), out.d);
        out.aleph *= out.cells_per_axis(i);
    }
    return out;
}

}  // namespace nanohom
