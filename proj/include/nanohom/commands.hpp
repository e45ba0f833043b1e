#pragma once

// The scatter, effective and compare commands. Each one writes its artifacts
// plus manifest.json into the output directory and returns a process exit code.

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "nanohom/config.hpp"
#include "nanohom/io.hpp"
#include "nanohom/pipeline.hpp"

namespace nanohom {

inline constexpr const char* version = "1.0.0";

enum ExitCode : int { ExitOk = 0, ExitConfig = 2, ExitNumerical = 3, ExitCondition = 4 };

struct CommandOptions {
    std::string config_path;
    std::optional<std::string> out_dir;
    std::vector<double> d_levels;
    bool strict_conditions = false;
    std::optional<std::size_t> dense_limit;
    std::optional<std::pair<int, int>> grid;
};

/// "37x72" -> {37, 72}
inline std::pair<int, int> parse_grid(const std::string& text) {
    const auto x = text.find_first_of("xX");
    try {
        if (x == std::string::npos) throw std::invalid_argument(text);
        std::size_t u1 = 0, u2 = 0;
        const std::string a = text.substr(0, x), b = text.substr(x + 1);
        const int nt = std::stoi(a, &u1), np = std::stoi(b, &u2);
        if (u1 != a.size() || u2 != b.size()) throw std::invalid_argument(text);
        if (nt < 2 || np < 4) throw Error(ErrorCode::ConfigError, "grid needs NTHETA >= 2 and NPHI >= 4");
        return {nt, np};
    } catch (const std::logic_error&) {
        throw Error(ErrorCode::ConfigError, "grid must look like NTHETAxNPHI, got '" + text + "'");
    }
}

/// "1/6,0.125,1/10" -> values
inline std::vector<double> parse_levels(const std::string& text) {
    std::istringstream in("[grid]\nd_levels = " + text + "\n");
    const ConfigFile f = ConfigFile::parse(in, "--d-levels");
    return f.numbers(f.require("grid", "d_levels"), ',');
}

namespace detail {

inline Json config_echo(const ConfigFile& f) {
    Json j = Json::object();
    for (const auto& [name, sec] : f.sections()) {
        Json s = Json::object();
        for (const auto& [key, entry] : sec) s[key] = entry.value;
        j[name] = s;
    }
    return j;
}

inline Json error_json(const std::string& code, const std::string& message) {
    return Json{{"code", code}, {"message", message}};
}

class Session {
public:
    Session(std::string command, const CommandOptions& opt, std::ostream& log)
        : opt_(opt), log_(log) {
        manifest_["tool"] = "nanohom";
        manifest_["version"] = version;
        manifest_["command"] = std::move(command);
        manifest_["status"] = "running";
        manifest_["error"] = nullptr;
        manifest_["config"] = Json{{"path", opt.config_path}};
        manifest_["options"] = Json{{"strict_conditions", opt.strict_conditions}};
        manifest_["outputs"] = Json::array();
        manifest_["warnings"] = Json::array();
    }

    Json& manifest() { return manifest_; }
    const std::filesystem::path& out() const { return out_; }

    /// Loads the config and prepares the output directory. The directory comes
    /// from --out, else [output] dir, else the working directory.
    LoadedConfig load(bool need_d) {
        ConfigFile f = ConfigFile::load(opt_.config_path);
        manifest_["config"]["entries"] = config_echo(f);
        if (auto e = f.find("output", "dir")) out_ = e->value;
        if (opt_.out_dir) out_ = *opt_.out_dir;
        prepare_out();
        LoadedConfig lc = interpret(f, need_d);
        if (opt_.dense_limit) lc.run.dense_limit = *opt_.dense_limit;
        if (opt_.grid) std::tie(lc.run.ntheta, lc.run.nphi) = *opt_.grid;
        manifest_["options"]["dense_limit"] = lc.run.dense_limit;
        manifest_["options"]["grid"] = {lc.run.ntheta, lc.run.nphi};
        return lc;
    }

    std::string path(const std::string& name) {
        const std::string p = (out_ / name).string();
        manifest_["outputs"].push_back(p);
        return p;
    }

    void warn(const std::string& w) {
        manifest_["warnings"].push_back(w);
        log_ << "warning: " << w << '\n';
    }

    /// Runs body, classifies failures, and always writes the manifest.
    template <class Body>
    int run(Body&& body) {
        int code = ExitOk;
        try {
            code = body();
            if (code == ExitOk) manifest_["status"] = "ok";
        } catch (const Error& e) {
            code = e.is_config_error() ? ExitConfig : ExitNumerical;
            fail(std::string(to_string(e.code())), e.what());
        } catch (const std::exception& e) {
            code = ExitNumerical;
            fail("Exception", e.what());
        }
        manifest_["exit_code"] = code;
        try {
            if (!out_ready_) prepare_out();
            write_json((out_ / "manifest.json").string(), manifest_);
        } catch (const std::exception& e) {
            log_ << "error: manifest not written: " << e.what() << '\n';
            if (code == ExitOk) code = ExitConfig;
        }
        return code;
    }

    void fail(const std::string& code, const std::string& message) {
        manifest_["status"] = "error";
        manifest_["error"] = error_json(code, message);
        log_ << "error: " << message << '\n';
    }

private:
    void prepare_out() {
        std::error_code ec;
        std::filesystem::create_directories(out_, ec);
        if (ec) throw Error(ErrorCode::IoError, "cannot create output directory " + out_.string() + ": " + ec.message());
        out_ready_ = true;
    }

    const CommandOptions& opt_;
    std::ostream& log_;
    Json manifest_ = Json::object();
    std::filesystem::path out_ = ".";
    bool out_ready_ = false;
};

inline Json effective_json(const EffectiveSetup& e) {
    Json tilde = Json::array();
    for (const auto& m : e.medium.A_tilde) tilde.push_back(to_json(m));
    return Json{{"mu_r", to_json(e.medium.mu_r)},
                {"eps_r", to_json(e.medium.eps_r)},
                {"A", to_json(e.medium.A)},
                {"A_tilde", tilde},
                {"T_mu", to_json(e.medium.T_mu)},
                {"t1_condition", e.medium.t1_condition},
                {"conditions", to_json(e.conditions)},
                {"lse_bound", e.lse_bound.bound}};
}

inline bool conditions_hold(const ConditionReport& c) { return c.positivity && c.regularity; }

}  // namespace detail

/// Discrete Foldy-Lax far-field.
inline int cmd_scatter(const CommandOptions& opt, std::ostream& log) {
    detail::Session s("scatter", opt, log);
    return s.run([&] {
        const LoadedConfig lc = s.load(true);
        auto& m = s.manifest();
        const DerivedScales scales = scales_at(lc.run, std::nullopt);
        m["derived_scales"] = to_json(scales);
        const InvertibilityDiagnostic inv = check_invertibility(lc.run.p0, scales.xi);
        m["invertibility_margin"] = inv.margin;
        if (!inv.satisfied()) {
            s.warn("invertibility margin " + format_real(inv.margin) + " is not positive");
            if (opt.strict_conditions) {
                s.fail("ConditionViolation", "invertibility condition violated in strict mode");
                return static_cast<int>(ExitCondition);
            }
        }
        const DiscreteRun run = run_discrete(lc.run);
        m["particles"] = run.lattice.particle_count();
        m["residuals"] = Json{{"foldy_lax", run.solution.residual}};
        m["timings"] = Json{{"total_s", run.seconds}};
        write_farfield_csv(s.path("farfield_discrete.csv"), run.far_field);
        return static_cast<int>(ExitOk);
    });
}

/// Effective coefficients and the effective-medium far-field.
inline int cmd_effective(const CommandOptions& opt, std::ostream& log) {
    detail::Session s("effective", opt, log);
    return s.run([&] {
        const LoadedConfig lc = s.load(true);
        auto& m = s.manifest();
        m["approximation_flags"] = Json{{"far_field_cell_means_only", true}, {"cell_shape", "cube"}};
        const auto t0 = Clock::now();
        const EffectiveSetup setup = setup_effective(lc.run);
        m["derived_scales"] = to_json(setup.scales);
        m["conditions"] = to_json(setup.conditions);
        m["lse_bound"] = setup.lse_bound.bound;
        write_json(s.path("mu_r.json"), detail::effective_json(setup));
        if (!detail::conditions_hold(setup.conditions)) {
            s.warn("effective-medium conditions violated (positivity " +
                   std::string(setup.conditions.positivity ? "true" : "false") + ", regularity " +
                   std::string(setup.conditions.regularity ? "true" : "false") + ")");
            if (opt.strict_conditions) {
                s.fail("ConditionViolation", "effective-medium conditions violated in strict mode");
                return static_cast<int>(ExitCondition);
            }
        }
        if (setup.lse_bound.warn()) s.warn("xi ||T_mu|| = " + format_real(setup.lse_bound.bound) + " >= 1");
        const EffectiveRun run = run_effective(lc.run);
        m["voxels"] = run.grid.centers.size();
        m["residuals"] = Json{{"lse", run.solution.residual}};
        m["timings"] = Json{{"total_s", seconds_since(t0)}};
        write_farfield_csv(s.path("farfield_effective.csv"), run.far_field);
        return static_cast<int>(ExitOk);
    });
}

/// Convergence of the effective far-field towards the discrete one over d levels.
inline int cmd_compare(const CommandOptions& opt, std::ostream& log) {
    detail::Session s("compare", opt, log);
    return s.run([&] {
        const LoadedConfig lc = s.load(false);
        auto& m = s.manifest();
        std::vector<double> levels = opt.d_levels.empty() ? lc.d_levels : opt.d_levels;
        if (levels.empty()) {
            if (!lc.has_d) throw Error(ErrorCode::ConfigError, "no d levels: pass --d-levels or set [grid] d_levels");
            levels = {scales_at(lc.run, std::nullopt).d};
        }
        m["d_levels"] = levels;
        m["approximation_flags"] = Json{{"far_field_cell_means_only", true}, {"cell_shape", "cube"}};
        m["levels"] = Json::array();
        bool violated = false;
        ConvergenceCsv csv(s.path("convergence.csv"));
        const auto t0 = Clock::now();
        convergence_study(lc.run, levels, [&](const LevelReport& l) {
            csv.append(l);
            m["levels"].push_back(Json{{"d", l.d},
                                       {"aleph", l.aleph},
                                       {"M", l.M},
                                       {"sup_error", l.comparison.sup_error},
                                       {"relative", real_or_null(l.comparison.relative)},
                                       {"slope_so_far", real_or_null(l.slope_so_far)},
                                       {"residuals", {{"foldy_lax", l.discrete_residual}, {"lse", l.lse_residual}}},
                                       {"conditions", to_json(l.conditions)},
                                       {"invertibility_margin", l.invertibility_margin},
                                       {"timings", {{"discrete_s", l.discrete_seconds}, {"effective_s", l.effective_seconds}}}});
            if (!detail::conditions_hold(l.conditions) || l.invertibility_margin <= 0.0) violated = true;
        });
        m["timings"] = Json{{"total_s", seconds_since(t0)}};
        if (violated) {
            s.warn("conditions violated on at least one level");
            if (opt.strict_conditions) {
                s.fail("ConditionViolation", "conditions violated in strict mode");
                return static_cast<int>(ExitCondition);
            }
        }
        return static_cast<int>(ExitOk);
    });
}

inline int run_command(const std::string& name, const CommandOptions& opt, std::ostream& log) {
    if (name == "scatter") return cmd_scatter(opt, log);
    if (name == "effective") return cmd_effective(opt, log);
    if (name == "compare") return cmd_compare(opt, log);
    log << "error: unknown command " << name << '\n';
    return ExitConfig;
}

}  // namespace nanohom
