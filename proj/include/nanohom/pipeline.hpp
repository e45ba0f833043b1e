#pragma once

// End-to-end runs: the discrete Foldy-Lax far-field, the effective-medium
// far-field, and the convergence study comparing the two over a list of
// cell sizes.

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "nanohom/core.hpp"
#include "nanohom/effective.hpp"
#include "nanohom/farfield.hpp"
#include "nanohom/foldy_lax.hpp"
#include "nanohom/geometry.hpp"
#include "nanohom/lse.hpp"
#include "nanohom/params.hpp"
#include "nanohom/tensors.hpp"

namespace nanohom {

/// Motif description independent of the cell size; offsets are in units of d.
struct MotifSpec {
    enum class Kind { Single, Dimer, Custom };
    Kind kind = Kind::Single;
    Vec3 direction = Vec3::Ones();
    std::vector<Vec3> offsets_in_d;
    double d_loc_in_d = 0.0;

    Motif build(double d) const {
        switch (kind) {
            case Kind::Single: return Motif::single(d);
            case Kind::Dimer: return honeycomb_dimer_motif(d, direction);
            case Kind::Custom: return motif_from_units(offsets_in_d, d, d_loc_in_d);
        }
        return Motif::single(d);
    }
};

struct RunConfig {
    ScatterConfig physics;
    MotifSpec motif;
    PolarizationTensor p0 = p0_sphere();
    int ntheta = 37;
    int nphi = 72;
    std::size_t dense_limit = default_dense_limit;

    PlaneWave wave() const { return {physics.theta, physics.pol, physics.k}; }
    std::vector<Direction> directions() const { return direction_grid(ntheta, nphi); }
};

/// Scales with the cell size replaced by d. In Physical mode the particle
/// radius follows from d = c_r a^{1-h/3}; xi does not depend on it.
inline DerivedScales scales_at(const RunConfig& cfg, std::optional<double> d) {
    ScatterConfig sc = cfg.physics;
    if (d) {
        if (auto* p = std::get_if<PhysicalParams>(&sc.mode))
            p->a = std::pow(*d / p->c_r, 1.0 / (1.0 - p->h / 3.0));
        else
            std::get<DirectParams>(sc.mode).d = *d;
    }
    return derive_scales(sc);
}

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct DiscreteRun {
    DerivedScales scales;
    ParticleLattice lattice;
    InvertibilityDiagnostic invertibility;
    DipoleSolution solution;
    FarField far_field;
    double seconds = 0.0;
};

inline DiscreteRun run_discrete(const RunConfig& cfg, std::optional<double> d = std::nullopt) {
    const auto t0 = Clock::now();
    DiscreteRun run;
    run.scales = scales_at(cfg, d);
    run.lattice = build_lattice(cfg.physics.domain, cfg.motif.build(run.scales.d));
    run.invertibility = check_invertibility(cfg.p0, run.scales.xi);
    DenseSystem sys = assemble(run.lattice, cfg.p0, run.scales.xi, run.scales.d, cfg.wave(), run.scales.s,
                               cfg.dense_limit);
    run.solution = solve(sys);
    run.far_field = far_field_discrete(run.solution, run.lattice, run.scales.xi, run.scales.d, cfg.physics.k,
                                       run.scales.s, cfg.p0, cfg.directions());
    run.seconds = seconds_since(t0);
    return run;
}

struct EffectiveSetup {
    DerivedScales scales;
    Motif motif;
    EffectiveMedium medium;
    ConditionReport conditions;
    LseDiagnostic lse_bound;
};

/// Build A, mu_r and T^mu for the cubic cell of side d and check conditions.
inline EffectiveSetup setup_effective(const RunConfig& cfg, std::optional<double> d = std::nullopt) {
    EffectiveSetup e;
    e.scales = scales_at(cfg, d);
    e.motif = cfg.motif.build(e.scales.d);
    e.medium = build_effective_medium(e.motif.offsets, e.scales.d, cfg.p0, magnetization_average_cube(), e.scales.xi,
                                      e.scales.s);
    e.conditions = check_conditions(cfg.p0, e.medium.A, e.scales.xi, cfg.physics.k, cfg.physics.domain.volume());
    e.lse_bound = lse_invertibility(e.medium.T_mu, e.scales.xi);
    return e;
}

struct EffectiveRun {
    EffectiveSetup setup;
    VoxelGrid grid;
    LseSolution solution;
    FarField far_field;
    double seconds = 0.0;
};

inline EffectiveRun run_effective(const RunConfig& cfg, std::optional<double> d = std::nullopt) {
    const auto t0 = Clock::now();
    EffectiveRun run;
    run.setup = setup_effective(cfg, d);
    const auto& sc = run.setup.scales;
    run.grid = make_voxel_grid(cfg.physics.domain, sc.d);
    DenseSystem sys = assemble_lse(run.grid, run.setup.medium.T_mu, sc.xi, cfg.wave(), sc.s, cfg.dense_limit);
    run.solution = solve_lse(sys);
    run.far_field = far_field_effective(run.solution, run.grid, run.setup.medium.T_mu, sc.xi, cfg.physics.k, sc.s,
                                        cfg.directions());
    run.seconds = seconds_since(t0);
    return run;
}

struct LevelReport {
    double d = 0.0;
    long aleph = 0;
    std::size_t M = 0;
    ComparisonReport comparison;
    double slope_so_far = std::numeric_limits<double>::quiet_NaN();
    double discrete_residual = 0.0;
    double lse_residual = 0.0;
    ConditionReport conditions;
    double invertibility_margin = 1.0;
    double discrete_seconds = 0.0;
    double effective_seconds = 0.0;
};

/// Least-squares slope of log(sup_error) against log(d); NaN with fewer than
/// two levels or a non-positive error.
inline double loglog_slope(const std::vector<LevelReport>& levels) {
    if (levels.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& l : levels) {
        if (!(l.comparison.sup_error > 0.0)) return std::numeric_limits<double>::quiet_NaN();
        const double x = std::log(l.d), y = std::log(l.comparison.sup_error);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(levels.size());
    const double den = n * sxx - sx * sx;
    return den != 0.0 ? (n * sxy - sx * sy) / den : std::numeric_limits<double>::quiet_NaN();
}

/// Runs both models at each cell size and compares their far-fields. The
/// callback sees every finished level before the next one starts.
inline std::vector<LevelReport> convergence_study(const RunConfig& cfg, const std::vector<double>& d_levels,
                                                  const std::function<void(const LevelReport&)>& on_level = {}) {
    std::vector<LevelReport> table;
    for (const double d : d_levels) {
        const DiscreteRun disc = run_discrete(cfg, d);
        const EffectiveRun eff = run_effective(cfg, d);
        LevelReport lvl;
        lvl.d = d;
        lvl.aleph = disc.scales.aleph;
        lvl.M = disc.lattice.particle_count();
        lvl.comparison = compare(eff.far_field, disc.far_field);
        lvl.discrete_residual = disc.solution.residual;
        lvl.lse_residual = eff.solution.residual;
        lvl.conditions = eff.setup.conditions;
        lvl.invertibility_margin = disc.invertibility.margin;
        lvl.discrete_seconds = disc.seconds;
        lvl.effective_seconds = eff.seconds;
        table.push_back(lvl);
        table.back().slope_so_far = loglog_slope(table);
        if (on_level) on_level(table.back());
    }
    return table;
}

}  // namespace nanohom
