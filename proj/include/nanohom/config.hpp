#pragma once

// Run configuration: a flat sectioned key = value text file.
//
//   [physics]   k, sign (+|-), mode (direct|physical), xi, d | a, h, c_r, eta0, c0,
//               theta, pol (3-vectors), p0 (sphere | 9 numbers, row-major)
//   [geometry]  corner, sides (3-vectors)
//   [motif]     kind (single|dimer|custom), direction, offsets (triples in units
//               of d, comma separated), d_loc (units of d)
//   [grid]      ntheta, nphi, dense_limit, d_levels (comma separated)
//   [output]    dir
//
// Numbers accept the rational form p/q. '#' starts a comment.

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nanohom/core.hpp"
#include "nanohom/pipeline.hpp"

namespace nanohom {

struct ConfigEntry {
    std::string value;
    int line = 0;
};

class ConfigFile {
public:
    using Section = std::map<std::string, ConfigEntry>;

    static ConfigFile parse(std::istream& in, std::string source = "<config>") {
        ConfigFile cfg;
        cfg.source_ = std::move(source);
        std::string raw;
        std::string section;
        int line_no = 0;
        while (std::getline(in, raw)) {
            ++line_no;
            std::string line = trim(raw.substr(0, raw.find('#')));
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']') cfg.fail(line_no, "unterminated section header");
                section = trim(line.substr(1, line.size() - 2));
                if (!is_known_section(section)) cfg.fail(line_no, "unknown section [" + section + "]");
                cfg.sections_[section];
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos) cfg.fail(line_no, "expected key = value");
            if (section.empty()) cfg.fail(line_no, "key outside of any section");
            const std::string key = trim(line.substr(0, eq));
            if (key.empty()) cfg.fail(line_no, "empty key");
            auto& sec = cfg.sections_[section];
            if (sec.count(key)) cfg.fail(line_no, "duplicate key '" + key + "'");
            sec[key] = {trim(line.substr(eq + 1)), line_no};
        }
        return cfg;
    }

    static ConfigFile load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw Error(ErrorCode::IoError, "cannot open config file " + path);
        return parse(in, path);
    }

    const std::string& source() const { return source_; }
    const std::map<std::string, Section>& sections() const { return sections_; }

    std::optional<ConfigEntry> find(const std::string& section, const std::string& key) const {
        auto s = sections_.find(section);
        if (s == sections_.end()) return std::nullopt;
        auto k = s->second.find(key);
        if (k == s->second.end()) return std::nullopt;
        return k->second;
    }

    ConfigEntry require(const std::string& section, const std::string& key) const {
        auto e = find(section, key);
        if (!e) throw Error(ErrorCode::ConfigError, source_ + ": missing key '" + key + "' in [" + section + "]");
        return *e;
    }

    double number(const ConfigEntry& e) const { return parse_number(e.value, e); }

    std::vector<double> numbers(const ConfigEntry& e, char sep = ' ') const {
        std::vector<double> out;
        std::string tok;
        std::string text = e.value;
        if (sep != ' ')
            for (char& c : text)
                if (c == sep) c = ' ';
        std::istringstream ss(text);
        while (ss >> tok) out.push_back(parse_number(tok, e));
        return out;
    }

    Vec3 vec3(const ConfigEntry& e) const {
        const auto v = numbers(e);
        if (v.size() != 3) fail(e.line, "expected 3 numbers, got " + std::to_string(v.size()));
        return {v[0], v[1], v[2]};
    }

    [[noreturn]] void fail(int line, const std::string& msg) const {
        throw Error(ErrorCode::ConfigError, source_ + ":" + std::to_string(line) + ": " + msg);
    }

    /// Rejects keys the schema does not know.
    void check_keys() const {
        static const std::map<std::string, std::vector<std::string>> schema = {
            {"physics", {"k", "sign", "mode", "xi", "d", "a", "h", "c_r", "eta0", "c0", "theta", "pol", "p0"}},
            {"geometry", {"corner", "sides"}},
            {"motif", {"kind", "direction", "offsets", "d_loc"}},
            {"grid", {"ntheta", "nphi", "dense_limit", "d_levels"}},
            {"output", {"dir"}},
        };
        for (const auto& [name, sec] : sections_) {
            const auto& allowed = schema.at(name);
            for (const auto& [key, entry] : sec)
                if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
                    fail(entry.line, "unknown key '" + key + "' in [" + name + "]");
        }
    }

private:
    static std::string trim(const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return {};
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    }

    static bool is_known_section(const std::string& s) {
        return s == "physics" || s == "geometry" || s == "motif" || s == "grid" || s == "output";
    }

    double parse_number(const std::string& tok, const ConfigEntry& e) const {
        auto one = [&](const std::string& t) {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(t, &used);
            } catch (const std::exception&) {
                fail(e.line, "not a number: '" + t + "'");
            }
            if (used != t.size()) fail(e.line, "not a number: '" + t + "'");
            return v;
        };
        const auto slash = tok.find('/');
        if (slash == std::string::npos) return one(tok);
        const double den = one(tok.substr(slash + 1));
        if (den == 0.0) fail(e.line, "zero denominator in '" + tok + "'");
        return one(tok.substr(0, slash)) / den;
    }

    std::string source_;
    std::map<std::string, Section> sections_;
};

struct LoadedConfig {
    RunConfig run;
    ConfigFile file;
    std::vector<double> d_levels;
    std::string out_dir = ".";
    bool has_d = false;
};

/// Builds a RunConfig. `need_d` is false when the caller supplies cell sizes
/// itself (convergence levels).
inline LoadedConfig interpret(const ConfigFile& f, bool need_d = true) {
    f.check_keys();
    LoadedConfig out{RunConfig{}, f, {}, ".", false};
    RunConfig& rc = out.run;
    ScatterConfig& sc = rc.physics;

    sc.k = f.number(f.require("physics", "k"));
    if (auto e = f.find("physics", "sign")) {
        if (e->value == "+" || e->value == "plus")
            sc.sign = Sign::Plus;
        else if (e->value == "-" || e->value == "minus")
            sc.sign = Sign::Minus;
        else
            f.fail(e->line, "sign must be + or -");
    }
    std::string mode = "direct";
    if (auto e = f.find("physics", "mode")) mode = e->value;
    if (mode == "direct") {
        DirectParams dp;
        dp.xi = f.number(f.require("physics", "xi"));
        if (auto e = f.find("physics", "d")) {
            dp.d = f.number(*e);
            out.has_d = true;
        } else if (need_d) {
            f.require("physics", "d");
        } else {
            dp.d = 1.0;  // replaced per level
        }
        sc.mode = dp;
    } else if (mode == "physical") {
        PhysicalParams pp;
        pp.a = f.number(f.require("physics", "a"));
        pp.h = f.number(f.require("physics", "h"));
        pp.c_r = f.number(f.require("physics", "c_r"));
        pp.eta0 = f.number(f.require("physics", "eta0"));
        pp.c0 = f.number(f.require("physics", "c0"));
        sc.mode = pp;
        out.has_d = true;
    } else {
        f.fail(f.require("physics", "mode").line, "mode must be direct or physical");
    }
    if (auto e = f.find("physics", "theta")) sc.theta = f.vec3(*e);
    if (auto e = f.find("physics", "pol")) sc.pol = f.vec3(*e);
    if (auto e = f.find("physics", "p0")) {
        if (e->value != "sphere") {
            const auto v = f.numbers(*e);
            if (v.size() != 9) f.fail(e->line, "p0 needs 'sphere' or 9 numbers");
            Mat3 m;
            for (int i = 0; i < 9; ++i) m(i / 3, i % 3) = v[i];
            rc.p0 = p0_custom(m);
        }
    }

    if (auto e = f.find("geometry", "corner")) sc.domain.corner = f.vec3(*e);
    if (auto e = f.find("geometry", "sides")) sc.domain.sides = f.vec3(*e);

    std::string kind = "single";
    if (auto e = f.find("motif", "kind")) kind = e->value;
    if (kind == "single") {
        rc.motif.kind = MotifSpec::Kind::Single;
    } else if (kind == "dimer") {
        rc.motif.kind = MotifSpec::Kind::Dimer;
        rc.motif.direction = f.vec3(f.require("motif", "direction"));
    } else if (kind == "custom") {
        rc.motif.kind = MotifSpec::Kind::Custom;
        const auto e = f.require("motif", "offsets");
        const auto flat = f.numbers(e, ',');
        if (flat.empty() || flat.size() % 3 != 0) f.fail(e.line, "offsets must be comma-separated triples");
        for (std::size_t i = 0; i < flat.size(); i += 3) rc.motif.offsets_in_d.emplace_back(flat[i], flat[i + 1], flat[i + 2]);
        if (auto dl = f.find("motif", "d_loc")) rc.motif.d_loc_in_d = f.number(*dl);
    } else {
        f.fail(f.require("motif", "kind").line, "motif kind must be single, dimer or custom");
    }

    if (auto e = f.find("grid", "ntheta")) rc.ntheta = static_cast<int>(f.number(*e));
    if (auto e = f.find("grid", "nphi")) rc.nphi = static_cast<int>(f.number(*e));
    if (auto e = f.find("grid", "dense_limit")) rc.dense_limit = static_cast<std::size_t>(f.number(*e));
    if (auto e = f.find("grid", "d_levels")) out.d_levels = f.numbers(*e, ',');
    if (auto e = f.find("output", "dir")) out.out_dir = e->value;
    return out;
}

}  // namespace nanohom
