#pragma once

// Bit-stable text output: far-field CSV, convergence CSV, JSON helpers.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include <json.hpp>

#include "nanohom/core.hpp"
#include "nanohom/effective.hpp"
#include "nanohom/farfield.hpp"
#include "nanohom/pipeline.hpp"

namespace nanohom {

using Json = nlohmann::ordered_json;

/// %.17g, with "nan" for NaN so every row keeps its column count.
inline std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline constexpr const char* farfield_csv_header = "theta,phi,re_Ex,im_Ex,re_Ey,im_Ey,re_Ez,im_Ez";

inline void write_farfield_csv(const std::string& path, const FarField& ff) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
    out << farfield_csv_header << '\n';
    for (std::size_t i = 0; i < ff.values.size(); ++i) {
        const auto& dir = ff.directions[i];
        const auto& v = ff.values[i];
        out << format_real(dir.theta) << ',' << format_real(dir.phi);
        for (int c = 0; c < 3; ++c) out << ',' << format_real(v(c).real()) << ',' << format_real(v(c).imag());
        out << '\n';
    }
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

inline constexpr const char* convergence_csv_header =
    "d,aleph,M,sup_error,relative,slope_so_far,runtime_discrete_s,runtime_effective_s";

/// Appends one row per level and flushes it immediately.
class ConvergenceCsv {
public:
    explicit ConvergenceCsv(const std::string& path) : out_(path, std::ios::binary | std::ios::trunc) {
        if (!out_) throw Error(ErrorCode::IoError, "cannot write " + path);
        out_ << convergence_csv_header << '\n' << std::flush;
    }

    void append(const LevelReport& l) {
        out_ << format_real(l.d) << ',' << l.aleph << ',' << l.M << ',' << format_real(l.comparison.sup_error) << ','
             << format_real(l.comparison.relative) << ',' << format_real(l.slope_so_far) << ','
             << format_real(l.discrete_seconds) << ',' << format_real(l.effective_seconds) << '\n'
             << std::flush;
    }

private:
    std::ofstream out_;
};

inline Json to_json(const Mat3& m) {
    Json rows = Json::array();
    for (int i = 0; i < 3; ++i) rows.push_back({m(i, 0), m(i, 1), m(i, 2)});
    return rows;
}

inline Json to_json(const Vec3& v) { return Json::array({v(0), v(1), v(2)}); }

inline Json real_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json to_json(const ConditionReport& r) {
    return Json{{"norm_product", r.lhs},
                {"positivity", r.positivity},
                {"positivity_bound", real_or_null(r.positivity_rhs)},
                {"positivity_margin", real_or_null(r.positivity_margin())},
                {"regularity", r.regularity},
                {"regularity_bound", real_or_null(r.regularity_rhs)},
                {"regularity_margin", real_or_null(r.regularity_margin())}};
}

inline Json to_json(const DerivedScales& s) {
    Json j{{"d", s.d}, {"xi", s.xi}, {"aleph", s.aleph}, {"s", s.s},
           {"cells_per_axis", {s.cells_per_axis(0), s.cells_per_axis(1), s.cells_per_axis(2)}}};
    j["eta"] = s.eta ? Json(*s.eta) : Json(nullptr);
    return j;
}

inline void write_json(const std::string& path, const Json& j) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
    out << j.dump(2) << '\n';
}

}  // namespace nanohom
