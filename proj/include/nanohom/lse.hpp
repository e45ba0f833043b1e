#pragma once

// Voxelized Lippmann-Schwinger equation of the effective medium and its far-field.

#include <cmath>
#include <vector>

#include "nanohom/core.hpp"
#include "nanohom/farfield.hpp"
#include "nanohom/foldy_lax.hpp"
#include "nanohom/geometry.hpp"
#include "nanohom/interaction.hpp"

namespace nanohom {

struct VoxelGrid {
    std::vector<Vec3> centers;
    double d = 0.0;
    Eigen::Vector3i counts = Eigen::Vector3i::Zero();

    double cell_volume() const { return d * d * d; }
};

inline VoxelGrid make_voxel_grid(const Box& box, double d) {
    VoxelGrid g;
    g.d = d;
    for (int i = 0; i < 3; ++i) g.counts(i) = tiling_count(box.sides(i), d);
    g.centers = partition_domain(box, d);
    return g;
}

struct LseSolution {
    std::vector<CVec3> Q;
    double residual = 0.0;
};

/// sin(x)/x
inline double sinc(double x) { return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x; }

/// (1/|cube|) int_cube H^Inc for a cube of side d centered at z: the plane wave
/// at z times prod_i sinc(k theta_i d / 2).
inline CVec3 cell_average_H(const PlaneWave& wave, const Vec3& center, double d) {
    double factor = 1.0;
    for (int i = 0; i < 3; ++i) factor *= sinc(0.5 * wave.k * wave.theta(i) * d);
    return factor * incident_H(wave.theta, wave.pol, wave.k, center);
}

/// Q_m - s xi d^3 sum_{j != m} Upsilon_k(z_m, z_j) T^mu Q_j = i k avg_m H^Inc.
inline DenseSystem assemble_lse(const VoxelGrid& grid, const Mat3& t_mu, double xi, const PlaneWave& wave, double s,
                                std::size_t dense_limit = default_dense_limit) {
    const std::size_t m = grid.centers.size();
    if (m == 0) throw Error(ErrorCode::InvalidConfig, "voxel grid is empty");
    check_dense_limit(3 * m, dense_limit);
    InteractionOperator op{grid.centers, t_mu, s * xi * grid.cell_volume(), wave.k};
    Eigen::VectorXcd rhs(3 * m);
    for (std::size_t n = 0; n < m; ++n)
        rhs.segment<3>(3 * n) = I_unit * wave.k * cell_average_H(wave, grid.centers[n], grid.d);
    return assemble_dense(std::move(op), std::move(rhs), dense_limit);
}

struct LseDiagnostic {
    double bound = 0.0;  // xi ||T^mu||_2; the system is known invertible below 1
    bool warn() const { return bound >= 1.0; }
};

inline LseDiagnostic lse_invertibility(const Mat3& t_mu, double xi) { return {xi * spectral_norm(t_mu)}; }

inline LseSolution solve_lse(DenseSystem& sys) {
    const DenseSolution sol = solve_dense(sys);
    return {unpack(sol.x), sol.residual};
}

/// Cell-mean part of the effective far-field,
///   -(i k / (s 4 pi)) xi sum_m |Omega_m| e^{-ik x^.z_m} x^ x (T^mu Q_m),
/// using P0 A F-bar_m = T^mu Q_m. The oscillation of the field about its cell
/// mean is not included.
inline FarField far_field_effective(const LseSolution& solution, const VoxelGrid& grid, const Mat3& t_mu, double xi,
                                    double k, double s, const std::vector<Direction>& directions) {
    std::vector<CVec3> moments(solution.Q.size());
    const CMat3 c = t_mu.cast<Complex>();
    for (std::size_t n = 0; n < moments.size(); ++n) moments[n] = c * solution.Q[n];
    return radiate(grid.centers, moments, xi * grid.cell_volume(), k, s, directions);
}

}  // namespace nanohom
