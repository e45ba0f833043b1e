#pragma once

// Far-field samples on the unit sphere, the sup-norm comparison between two
// far-fields, and the common radiation sum used by both scattering models.

#include <cmath>
#include <vector>

#include "nanohom/core.hpp"

namespace nanohom {

struct Direction {
    double theta = 0.0;
    double phi = 0.0;
    Vec3 unit = Vec3::UnitZ();
};

/// Latitude-longitude grid: theta in [0, pi] inclusive (ntheta samples),
/// phi = 2 pi j / nphi. Each pole appears once, with phi = 0.
inline std::vector<Direction> direction_grid(int ntheta, int nphi) {
    if (ntheta < 2 || nphi < 4) throw Error(ErrorCode::InvalidConfig, "direction grid needs ntheta >= 2, nphi >= 4");
    std::vector<Direction> out;
    out.reserve(static_cast<std::size_t>(ntheta - 2) * nphi + 2);
    out.push_back({0.0, 0.0, Vec3::UnitZ()});
    for (int i = 1; i < ntheta - 1; ++i) {
        const double th = pi * i / (ntheta - 1);
        for (int j = 0; j < nphi; ++j) {
            const double ph = 2.0 * pi * j / nphi;
            out.push_back({th, ph, Vec3(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th))});
        }
    }
    out.push_back({pi, 0.0, -Vec3::UnitZ()});
    return out;
}

struct FarField {
    std::vector<Direction> directions;
    std::vector<CVec3> values;

    double sup_norm() const {
        double m = 0.0;
        for (const auto& v : values) m = std::max(m, v.norm());
        return m;
    }
};

/// E(x^) = -(i k / (s 4 pi)) weight sum_n e^{-i k x^.z_n} x^ x moment_n,
/// summed in index order.
inline FarField radiate(const std::vector<Vec3>& points, const std::vector<CVec3>& moments, double weight, double k,
                        double s, const std::vector<Direction>& directions) {
    FarField ff;
    ff.directions = directions;
    ff.values.assign(directions.size(), CVec3::Zero());
    const Complex pref = -(I_unit * k) / (s * 4.0 * pi) * weight;
    parallel_for(directions.size(), [&](std::size_t a) {
        const Vec3& xh = directions[a].unit;
        CVec3 acc = CVec3::Zero();
        for (std::size_t n = 0; n < points.size(); ++n) {
            const Complex ph = std::exp(-I_unit * (k * xh.dot(points[n])));
            acc += ph * moments[n];
        }
        ff.values[a] = pref * cross(xh, acc);
    });
    return ff;
}

struct ComparisonReport {
    double sup_error = 0.0;
    double sup_field = 0.0;
    double relative = 0.0;
};

/// Sup over the grid of |a - b|; sup_field is the sup of |b|, the reference.
inline ComparisonReport compare(const FarField& a, const FarField& b) {
    if (a.directions.size() != b.directions.size())
        throw Error(ErrorCode::GridMismatch, "far-fields sampled on different grids");
    for (std::size_t i = 0; i < a.directions.size(); ++i)
        if ((a.directions[i].unit - b.directions[i].unit).norm() > 1e-14)
            throw Error(ErrorCode::GridMismatch, "far-field directions differ at index " + std::to_string(i));
    ComparisonReport r;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        r.sup_error = std::max(r.sup_error, (a.values[i] - b.values[i]).norm());
        r.sup_field = std::max(r.sup_field, b.values[i].norm());
    }
    r.relative = r.sup_field > 0.0 ? r.sup_error / r.sup_field : 0.0;
    return r;
}

}  // namespace nanohom
