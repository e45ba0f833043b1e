#include <catch_amalgamated.hpp>

#include <random>

#include "nanohom/effective.hpp"

using namespace nanohom;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double pi3 = pi * pi * pi;

ErrorCode code_of(const auto& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::ConfigError;
}

double max_abs(const Mat3& m) { return m.cwiseAbs().maxCoeff(); }

EffectiveMedium generic_dimer(double xi, double d, const Vec3& dir, double s) {
    return build_effective_medium({Vec3::Zero(), d * dir}, d, p0_sphere(), magnetization_average_cube(), xi, s);
}

/// Two-particle cells have T1 = [[P, Q], [Q, P]], so A = 2 (P + Q)^{-1}.
Mat3 dimer_A_by_symmetry(double xi, double d, const Vec3& dir, double s) {
    const Mat3 p0 = p0_sphere().matrix;
    const Mat3 c = s * xi * p0 / 3.0;
    const Mat3 b = s * xi * d * d * d * upsilon_0(Vec3::Zero(), d * dir) * p0;
    return 2.0 * (Mat3::Identity() - 2.0 * c - b).inverse();
}

const std::vector<Vec3>& dimer_directions() {
    static const std::vector<Vec3> dirs = {Vec3::UnitX(), Vec3::UnitZ(), Vec3::Ones().normalized()};
    return dirs;
}

}  // namespace

TEST_CASE("D0 block structure") {
    const auto k0 = build_D0({Vec3::Zero()}, p0_sphere());
    CHECK(k0.blocks() == 1);
    CHECK(k0.dense().isZero(0.0));

    const double d = 0.2;
    const auto dd = build_D0({Vec3::Zero(), d * Vec3::UnitX()}, p0_sphere());
    const Mat3 expect = (12.0 / pi3) / (4 * pi * d * d * d) * Mat3(Vec3(2, -1, -1).asDiagonal());
    CHECK(max_abs(dd.block(0, 1) - expect) <= 1e-12 * max_abs(expect));
    CHECK(max_abs(dd.block(1, 0) - expect) <= 1e-12 * max_abs(expect));
    CHECK(dd.block(0, 0).isZero(0.0));
    CHECK(dd.block(1, 1).isZero(0.0));

    const std::vector<Vec3> tri = {Vec3(0.1, 0, 0), Vec3(-0.05, 0.08, 0.01), Vec3(0, -0.04, 0.09)};
    const auto d3 = build_D0(tri, p0_sphere());
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(max_abs(d3.block(i, j) - d3.block(j, i)) <= 1e-12 * d3.dense().norm());
    CHECK(code_of([] { build_D0({Vec3::Zero(), Vec3::Zero()}, p0_sphere()); }) == ErrorCode::CoincidentPoints);
}

TEST_CASE("T0 and T1 assembly") {
    const auto single = build_D0({Vec3::Zero()}, p0_sphere());
    CHECK(build_T0(single, 0.4, 0.1, 1.0).dense().isIdentity(0.0));

    const double d = 0.1, xi = 0.5;
    const std::vector<Vec3> dimer = {Vec3::Zero(), d * Vec3::Ones().normalized()};
    const auto d0 = build_D0(dimer, p0_sphere());
    CHECK(build_T0(d0, 0.0, d, 1.0).dense().isIdentity(0.0));

    for (double s : {1.0, -1.0}) {
        const auto t0 = build_T0(d0, xi, d, s);
        const Mat3 off = -s * xi * d * d * d * upsilon_0(dimer[0], dimer[1]) * p0_sphere().matrix;
        CHECK(t0.block(0, 0).isIdentity(0.0));
        CHECK(max_abs(t0.block(0, 1) - off) <= 1e-14 * max_abs(off));

        const auto t1 = build_T1(t0, magnetization_average_cube(), p0_sphere(), xi, s);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                CHECK(max_abs(t1.block(i, j) - t0.block(i, j) + s * (4 * xi / pi3) * Mat3::Identity()) <= 1e-15);
    }
    const auto k0 = build_T1(build_T0(single, 0.3, 1.0, 1.0), magnetization_average_cube(), p0_sphere(), 0.3, 1.0);
    CHECK(max_abs(k0.dense() - (1 - 4 * 0.3 / pi3) * Mat3::Identity()) <= 1e-15);
    const auto same = build_T1(build_T0(d0, xi, d, 1.0), magnetization_average_cube(), p0_sphere(), 0.0, 1.0);
    CHECK(same.dense() == build_T0(d0, xi, d, 1.0).dense());
}

TEST_CASE("single-particle cell: A, mu_r and T^mu in closed form") {
    for (double xi : {0.0, 0.1, 1.0, 3.0}) {
        const auto med = build_effective_medium({Vec3::Zero()}, 0.2, p0_sphere(), magnetization_average_cube(), xi, 1.0);
        CHECK(max_abs(med.A - pi3 / (pi3 - 4 * xi) * Mat3::Identity()) <= 1e-14);
        CHECK(max_abs(med.mu_r - (1 + 12 * xi / (pi3 - 4 * xi)) * Mat3::Identity()) <= 1e-14);
        // P0 A (1 + (xi/3)(12/pi^3) A)^{-1} collapses to P0
        CHECK(max_abs(med.T_mu - p0_sphere().matrix) <= 1e-14);
        CHECK(med.eps_r == Mat3::Identity());
        REQUIRE(med.A_tilde.size() == 1);
        CHECK(max_abs(med.A_tilde[0] - med.A) <= 1e-15);
    }
}

TEST_CASE("vanishing coupling") {
    const std::vector<Vec3> motif = {Vec3::Zero(), Vec3(0.03, 0.01, 0), Vec3(-0.02, 0.03, 0.01)};
    const auto med = build_effective_medium(motif, 0.1, p0_sphere(), magnetization_average_cube(), 0.0, -1.0);
    CHECK(max_abs(med.A - 3 * Mat3::Identity()) == 0.0);
    CHECK(med.mu_r == Mat3::Identity());
    for (const auto& t : med.A_tilde) CHECK(t.isIdentity(0.0));
    CHECK(max_abs(tensor_T_mu(p0_sphere(), Mat3::Identity(), magnetization_average_cube(), 0.0, 1.0) -
                  p0_sphere().matrix) == 0.0);
}

TEST_CASE("A is the sum of its row components and mu_r reconstructs") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> u(-0.4, 0.4);
    for (int t = 0; t < 10; ++t) {
        std::vector<Vec3> motif = {Vec3::Zero()};
        for (int l = 0; l < 3; ++l) motif.push_back(Vec3(u(rng), u(rng), u(rng)) * 0.1);
        const Mat3 wbar = magnetization_average_box(Vec3(1, 1.5, 2), 12).matrix;
        const auto med = build_effective_medium(motif, 0.1, p0_custom(Vec3(0.2, 0.4, 0.3).asDiagonal()),
                                                {wbar, Vec3(1, 1.5, 2), 0.0}, 0.7, t % 2 ? 1.0 : -1.0);
        Mat3 sum = Mat3::Zero();
        for (const auto& a : med.A_tilde) sum += a;
        CHECK(max_abs(sum - med.A) <= 1e-12 * max_abs(med.A));
        const double s = t % 2 ? 1.0 : -1.0;
        CHECK(max_abs(med.mu_r - effective_mu(p0_custom(Vec3(0.2, 0.4, 0.3).asDiagonal()), med.A, 0.7, s)) == 0.0);
    }
}

TEST_CASE("T^mu equals P0 E^T T0^{-1} E for any magnetization average") {
    // eliminating the rank-structured shift from T1 removes W-bar entirely
    const std::vector<Vec3> motif = {Vec3::Zero(), Vec3(0.04, 0.02, -0.01), Vec3(-0.03, 0.035, 0.02)};
    const double d = 0.1;
    const auto p0 = p0_custom(Vec3(0.3, 0.5, 0.4).asDiagonal());
    for (double s : {1.0, -1.0})
        for (const Vec3& sides : {Vec3(1, 1, 1), Vec3(2, 1, 1), Vec3(1, 2, 3)}) {
            const MagnetizationAverage w =
                sides == Vec3::Ones() ? magnetization_average_cube() : magnetization_average_box(sides, 12);
            const auto med = build_effective_medium(motif, d, p0, w, 0.8, s);
            const auto t0 = build_T0(build_D0(motif, p0), 0.8, d, s);
            Eigen::MatrixXd e(9, 3);
            for (int i = 0; i < 3; ++i) e.block<3, 3>(3 * i, 0).setIdentity();
            const Mat3 a0 = e.transpose() * t0.dense().partialPivLu().solve(e);
            CHECK(max_abs(med.T_mu - p0.matrix * a0) <= 1e-12 * max_abs(med.T_mu));
        }
}

TEST_CASE("A does not depend on where the motif sits") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> u(-5, 5);
    const std::vector<Vec3> motif = {Vec3::Zero(), Vec3(0.05, 0.02, 0), Vec3(0, -0.03, 0.04)};
    const auto base = build_effective_medium(motif, 0.1, p0_sphere(), magnetization_average_cube(), 0.6, 1.0);
    for (int t = 0; t < 5; ++t) {
        const Vec3 shift(u(rng), u(rng), u(rng));
        auto moved = motif;
        for (auto& m : moved) m += shift;
        const auto med = build_effective_medium(moved, 0.1, p0_sphere(), magnetization_average_cube(), 0.6, 1.0);
        CHECK(max_abs(med.A - base.A) <= 1e-12 * max_abs(base.A));
    }
}

TEST_CASE("dimer closed forms against the generic solve") {
    for (double xi : {0.1, 0.5, 1.0})
        for (double d : {0.05, 0.1})
            for (double s : {1.0, -1.0})
                for (const Vec3& dir : dimer_directions()) {
                    INFO("xi " << xi << " d " << d << " s " << s << " dir " << dir.transpose());
                    const auto med = generic_dimer(xi, d, dir, s);
                    const Vec3 z1 = Vec3::Zero(), z2 = d * dir;
                    const Mat3 A = dimer_A_closed_form(xi, d, z1, z2, s);
                    CHECK(max_abs(A - med.A) <= 1e-10 * spectral_norm(med.A));
                    CHECK(max_abs(dimer_A_by_symmetry(xi, d, dir, s) - med.A) <= 1e-12 * spectral_norm(med.A));
                    const Mat3 mu = dimer_mu_closed_form(xi, d, z1, z2, s);
                    CHECK(max_abs(mu - med.mu_r) <= 1e-10 * spectral_norm(med.mu_r));
                    const Mat3 tm = dimer_Tmu_closed_form(xi, d, z1, z2, s);
                    CHECK(max_abs(tm - med.T_mu) <= 1e-9 * spectral_norm(med.T_mu));
                    CHECK(max_abs(A - A.transpose()) == 0.0);
                    CHECK(max_abs(med.mu_r - med.mu_r.transpose()) <= 1e-14 * spectral_norm(med.mu_r));
                }
}

TEST_CASE("tabulated dimer tensor at xi = 0.5, d = 0.1 along e3") {
    const Mat3 A = dimer_A_closed_form(0.5, 0.1, Vec3::Zero(), Vec3(0, 0, 0.1), 1.0);
    // 2 pi^4 / B and the corrected axial entry
    const double B = pi * (pi3 - 4.0) + 1.5, Bp = pi * (pi3 - 4.0) - 3.0;
    const double base = 2 * pi * pi3 / B;
    CHECK_THAT(A(0, 0), WithinRel(base, 1e-14));
    CHECK_THAT(A(1, 1), WithinRel(base, 1e-14));
    CHECK_THAT(A(2, 2), WithinRel(base * (1 + 4.5 / Bp), 1e-14));
    CHECK_THAT(A(0, 0), WithinRel(2.2563359264237763, 1e-12));
    CHECK_THAT(A(2, 2), WithinRel(2.380397194388056, 1e-12));
    CHECK(A(0, 1) == 0.0);
}

TEST_CASE("dimer closed-form limits and structure") {
    const Vec3 z1(0.2, 0.1, -0.3), dir = Vec3(1, -2, 2) / 3.0, z2 = z1 + 0.07 * dir;
    CHECK(max_abs(dimer_A_closed_form(0.0, 0.07, z1, z2, 1.0) - 2 * Mat3::Identity()) <= 1e-15);
    CHECK(max_abs(dimer_mu_closed_form(0.0, 0.07, z1, z2, -1.0) - Mat3::Identity()) <= 1e-15);
    CHECK(max_abs(dimer_Tmu_closed_form(0.0, 0.07, z1, z2, 1.0) - 2 * p0_sphere().matrix) <= 1e-14);

    const auto tiny = generic_dimer(1e-8, 0.07, dir, 1.0);
    CHECK(max_abs(dimer_Tmu_closed_form(1e-8, 0.07, Vec3::Zero(), 0.07 * dir, 1.0) - tiny.T_mu) <= 1e-6);

    const Mat3 mu = dimer_mu_closed_form(0.8, 0.07, z1, z2, 1.0);
    const Vec3 dz = z1 - z2;
    const Vec3 perp = dz.unitOrthogonal();
    const double alpha = perp.dot(mu * perp);
    CHECK((mu * perp - alpha * perp).norm() <= 1e-14);
    const double along = dz.dot(mu * dz) / dz.squaredNorm();
    CHECK((mu * dz - along * dz).norm() <= 1e-14 * dz.norm());
    // alpha - beta d^2 along the axis
    const double beta = (alpha - along) / (0.07 * 0.07);
    CHECK(max_abs(alpha * Mat3::Identity() - beta * dz * dz.transpose() - mu) <= 1e-13);
}

TEST_CASE("dimer closed-form errors") {
    CHECK(code_of([] { dimer_A_closed_form(0.5, 0.1, Vec3::Zero(), Vec3(0.2, 0, 0), 1.0); }) ==
          ErrorCode::SeparationMismatch);
    const double xi_star = std::pow(pi, 4) / (8 * pi - 3);  // pi(pi^3 - 8 xi) + 3 xi = 0
    CHECK(code_of([&] { dimer_A_closed_form(xi_star, 0.1, Vec3::Zero(), Vec3(0.1, 0, 0), 1.0); }) ==
          ErrorCode::DegenerateDenominator);
    const double xi_minus = std::pow(pi, 4) / 6;  // pi^4 - 6 xi = 0
    CHECK(code_of([&] { dimer_Tmu_closed_form(xi_minus, 0.1, Vec3::Zero(), Vec3(0.1, 0, 0), 1.0); }) ==
          ErrorCode::DegenerateDenominator);
}

TEST_CASE("singular T1 and shift are reported") {
    // 1 - 4 xi / pi^3 = 0
    CHECK(code_of([] {
              build_effective_medium({Vec3::Zero()}, 0.1, p0_sphere(), magnetization_average_cube(), pi3 / 4, 1.0);
          }) == ErrorCode::SingularT1);
    // I + xi W P0 A = 0 with P0 A = -3/xi I
    CHECK(code_of([] {
              tensor_T_mu(p0_custom(Mat3::Identity()), -3.0 * Mat3::Identity(), magnetization_average_cube(), 1.0, 1.0);
          }) == ErrorCode::SingularShift);
}

TEST_CASE("condition checks") {
    const auto zero = check_conditions(p0_sphere(), Mat3::Identity(), 0.0, 1.0, 1.0);
    CHECK(zero.positivity);
    CHECK(zero.regularity);
    CHECK(std::isinf(zero.positivity_rhs));

    const double xi = 1.0;
    const Mat3 A = pi3 / (pi3 - 4 * xi) * Mat3::Identity();
    const auto r = check_conditions(p0_sphere(), A, xi, 1.0, 1.0);
    CHECK_THAT(r.lhs, WithinRel(12 / (pi3 - 4), 1e-14));
    CHECK_THAT(r.positivity_rhs, WithinRel(1.0 / 3.0, 1e-15));
    CHECK_THAT(r.regularity_rhs, WithinRel(pi / (3 * std::sqrt(6.0) * (pi + 1)), 1e-15));
    CHECK_FALSE(r.positivity);
    CHECK_FALSE(r.regularity);

    const auto ok = check_conditions(p0_sphere(), A, 0.05, 1.0, 1.0);
    CHECK(ok.positivity);
    CHECK(ok.regularity);
    CHECK(ok.regularity_margin() > 0.0);
    CHECK(ok.positivity_margin() > ok.regularity_margin());
}

TEST_CASE("regularity implies positivity on sampled inputs") {
    // pi / (sqrt6 (pi + k|Omega|)) < 1 for all k|Omega| >= 0
    CHECK(pi < std::sqrt(6.0) * pi);
    std::mt19937 rng(101);
    std::uniform_real_distribution<double> u(-1, 1), pos(0, 1);
    int regular = 0;
    for (int t = 0; t < 500; ++t) {
        Eigen::Matrix3d g;
        for (int i = 0; i < 9; ++i) g(i / 3, i % 3) = u(rng);
        const auto p0 = p0_custom(g * g.transpose());
        Mat3 A;
        for (int i = 0; i < 9; ++i) A(i / 3, i % 3) = 3 * u(rng);
        const double xi = std::exp(-6 * pos(rng));
        const auto r = check_conditions(p0, A, xi, 10 * pos(rng), 5 * pos(rng));
        if (r.regularity) {
            ++regular;
            CHECK(r.positivity);
        }
        CHECK(r.regularity_rhs < r.positivity_rhs);
    }
    CHECK(regular > 20);
}
