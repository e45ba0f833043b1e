#pragma once

// Cell partition of the domain and the per-cell particle motif.

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "nanohom/core.hpp"
#include "nanohom/params.hpp"

namespace nanohom {

/// Offsets of the K+1 particles of one cell relative to its center, in
/// length units. d_loc is the declared lower bound on their pairwise distance.
struct Motif {
    std::vector<Vec3> offsets;
    double d = 0.0;
    double d_loc = 0.0;

    std::size_t size() const { return offsets.size(); }
    int K() const { return static_cast<int>(offsets.size()) - 1; }

    static Motif single(double d) { return Motif{{Vec3::Zero()}, d, 0.0}; }
};

inline double min_pairwise_distance(const std::vector<Vec3>& pts) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) best = std::min(best, (pts[i] - pts[j]).norm());
    return best;
}

/// Checks that every offset sits strictly inside the cell and the pairwise
/// distances respect d_loc.
inline void validate(const Motif& motif) {
    if (motif.offsets.empty()) throw Error(ErrorCode::InvalidConfig, "motif has no particles");
    for (const auto& off : motif.offsets)
        if (!(off.cwiseAbs().maxCoeff() < 0.5 * motif.d))
            throw Error(ErrorCode::MotifOutOfCell, "motif offset leaves its cell");
    if (motif.size() > 1) {
        const double dmin = min_pairwise_distance(motif.offsets);
        if (dmin < 1e-14) throw Error(ErrorCode::CoincidentPoints, "motif has coincident particles");
        if (dmin < motif.d_loc * (1.0 - 1e-12))
            throw Error(ErrorCode::InvalidConfig, "motif violates its declared d_loc");
    }
}

/// Motif from offsets given in units of d.
inline Motif motif_from_units(const std::vector<Vec3>& offsets_in_d, double d, double d_loc_in_d = 0.0) {
    Motif m;
    m.d = d;
    m.d_loc = d_loc_in_d * d;
    m.offsets.reserve(offsets_in_d.size());
    for (const auto& o : offsets_in_d) m.offsets.push_back(o * d);
    validate(m);
    return m;
}

/// Two particles a distance d apart along `direction`, centered on the cell
/// center. Without a direction the motif degenerates to one particle.
inline Motif honeycomb_dimer_motif(double d, std::optional<Vec3> direction) {
    if (!direction) return Motif::single(d);
    const double len = direction->norm();
    if (len < 1e-14) throw Error(ErrorCode::InvalidConfig, "dimer direction must be nonzero");
    const Vec3 u = *direction / len;
    Motif m{{-0.5 * d * u, 0.5 * d * u}, d, d};
    // endpoints at +-(d/2)u stay inside iff max|u_i| < 1
    if (!(u.cwiseAbs().maxCoeff() < 1.0 - 1e-12))
        throw Error(ErrorCode::MotifOutOfCell, "dimer of length d along an axis touches the cell wall");
    validate(m);
    return m;
}

/// Centers of the n1 x n2 x n3 cubes of side d tiling the box, x-major.
inline std::vector<Vec3> partition_domain(const Box& box, double d) {
    const int n0 = tiling_count(box.sides(0), d);
    const int n1 = tiling_count(box.sides(1), d);
    const int n2 = tiling_count(box.sides(2), d);
    std::vector<Vec3> centers;
    centers.reserve(static_cast<std::size_t>(n0) * n1 * n2);
    for (int i = 0; i < n0; ++i)
        for (int j = 0; j < n1; ++j)
            for (int l = 0; l < n2; ++l)
                centers.push_back(box.corner + d * Vec3(i + 0.5, j + 0.5, l + 0.5));
    return centers;
}

struct ParticleLattice {
    std::vector<Vec3> cell_centers;
    std::vector<Vec3> positions;  // cell-major, then motif index
    double d = 0.0;
    int K = 0;
    double min_distance = std::numeric_limits<double>::infinity();

    std::size_t particle_count() const { return positions.size(); }
    std::size_t per_cell() const { return static_cast<std::size_t>(K) + 1; }
    const Vec3& position(std::size_t cell, std::size_t ell) const { return positions[cell * per_cell() + ell]; }
};

inline ParticleLattice instantiate(const std::vector<Vec3>& cell_centers, const Motif& motif) {
    ParticleLattice lat;
    lat.cell_centers = cell_centers;
    lat.d = motif.d;
    lat.K = motif.K();
    lat.positions.reserve(cell_centers.size() * motif.size());
    for (const auto& c : cell_centers)
        for (const auto& off : motif.offsets) lat.positions.push_back(c + off);
    if (lat.positions.size() > 1) lat.min_distance = min_pairwise_distance(lat.positions);
    return lat;
}

inline ParticleLattice build_lattice(const Box& box, const Motif& motif) {
    return instantiate(partition_domain(box, motif.d), motif);
}

}  // namespace nanohom
