#include "orbita/errors.hpp"
#include "orbita/restricted3body.hpp"

#include "oracle_helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace orbita;
using oracles::rel_err;

namespace {

// Independent re-derivation of the two-primary acceleration, term by term.
void reference_field(double alpha, double m, double t, const double q[2], double a[2]) {
    const double xiM[2] = {m * std::cos(t), m * std::sin(t)};
    const double xim[2] = {-(1.0 - m) * std::cos(t), -(1.0 - m) * std::sin(t)};
    a[0] = a[1] = 0.0;
    const double dM[2] = {xiM[0] - q[0], xiM[1] - q[1]};
    const double dm[2] = {xim[0] - q[0], xim[1] - q[1]};
    const double rM = std::hypot(dM[0], dM[1]);
    const double rm = std::hypot(dm[0], dm[1]);
    a[0] += (1.0 - m) * dM[0] / std::pow(rM, alpha + 2.0);
    a[1] += (1.0 - m) * dM[1] / std::pow(rM, alpha + 2.0);
    a[0] += m * dm[0] / std::pow(rm, alpha + 2.0);
    a[1] += m * dm[1] / std::pow(rm, alpha + 2.0);
}

double state_distance(const CartesianState& a, const CartesianState& b) {
    return std::sqrt((a.x1 - b.x1) * (a.x1 - b.x1) + (a.x2 - b.x2) * (a.x2 - b.x2) +
                     (a.v1 - b.v1) * (a.v1 - b.v1) + (a.v2 - b.v2) * (a.v2 - b.v2));
}

} // namespace

TEST_SUITE_BEGIN("restricted3body");

TEST_CASE("acceleration matches an independent term-by-term derivation") {
    const R3BConfig cfg(0.5, 0.01);
    const double q[2] = {0.5, 0.0};
    double got[2], want[2];
    r3b_acceleration(cfg, 0.0, q, got);
    reference_field(0.5, 0.01, 0.0, q, want);
    CHECK(std::fabs(got[0] - want[0]) < 1e-14);
    CHECK(std::fabs(got[1] - want[1]) < 1e-14);

    // off-axis, later time
    const double q2[2] = {0.21, -0.33};
    r3b_acceleration(cfg, 1.3, q2, got);
    reference_field(0.5, 0.01, 1.3, q2, want);
    CHECK(std::fabs(got[0] - want[0]) < 1e-14);
    CHECK(std::fabs(got[1] - want[1]) < 1e-14);
}

TEST_CASE("small-mass limit reduces to the one-center field") {
    const double alpha = 0.5;
    const double q[2] = {0.4, 0.1};
    const double r = std::hypot(q[0], q[1]);
    double a_limit[2] = {-q[0] / std::pow(r, alpha + 2.0), -q[1] / std::pow(r, alpha + 2.0)};
    for (const double m : {1e-4, 1e-6, 1e-8}) {
        const R3BConfig cfg(alpha, m);
        double a[2];
        r3b_acceleration(cfg, 0.7, q, a);
        CAPTURE(m);
        CHECK(std::fabs(a[0] - a_limit[0]) < 20.0 * m);
        CHECK(std::fabs(a[1] - a_limit[1]) < 20.0 * m);
    }
}

TEST_CASE("acceleration on the primary line is colinear with it") {
    const R3BConfig cfg(0.5, 0.01);
    const double q[2] = {0.5, 0.0};  // on the t = 0 primary axis
    double a[2];
    r3b_acceleration(cfg, 0.0, q, a);
    CHECK(std::fabs(a[1]) < 1e-15);
}

TEST_CASE("frame maps round-trip and the velocity term matches finite differences") {
    const R3BConfig cfg(0.5, 1e-3);
    const CartesianState q0{0.3, -0.1, 0.2, 1.4, 0.9};
    const CartesianState x0 = q_to_x(cfg, q0);
    const CartesianState back = x_to_q(cfg, x0);
    CHECK(state_distance(q0, back) < 1e-15);

    // velocity transform = d/dt of the position transform along a trajectory
    IntegratorOptions io;
    io.collision_floor = 1e-12;
    const Trajectory qtraj = integrate(r3b_field(cfg), {0.3, 0.0, 0.0, 1.4, 0.0}, 0.5, io);
    const double t = 0.25, h = 1e-6;
    auto xpos_at = [&](double tt) {
        CartesianState q = qtraj.state_at(tt);
        return q_to_x(cfg, q);
    };
    const CartesianState xm = xpos_at(t - h), xp = xpos_at(t + h), xc = xpos_at(t);
    CHECK(std::fabs((xp.x1 - xm.x1) / (2.0 * h) - xc.v1) < 1e-8);
    CHECK(std::fabs((xp.x2 - xm.x2) / (2.0 * h) - xc.v2) < 1e-8);
}

TEST_CASE("dual-frame integration consistency") {
    for (const double m : {1e-3, 1e-4}) {
        const R3BConfig cfg(0.5, m);
        const CartesianState q0{0.3, 0.0, 0.0, 1.4, 0.0};
        IntegratorOptions io;
        io.collision_floor = 1e-12;
        const Trajectory qtraj = integrate(r3b_field(cfg), q0, 2.0 * M_PI, io);
        const auto pot = RadialPotential::homogeneous(1.0, cfg.alpha);
        const PerturbationModel model = PerturbationModel::rotating_point_mass(cfg.alpha, m);
        const Trajectory xtraj = integrate(perturbed_field(pot, model), q_to_x(cfg, q0), 2.0 * M_PI, io);
        for (const double t : {0.7, 2.9, 2.0 * M_PI}) {
            CartesianState qf = qtraj.state_at(t);
            const CartesianState xf = xtraj.state_at(t);
            CAPTURE(m);
            CAPTURE(t);
            CHECK(state_distance(q_to_x(cfg, qf), xf) < 1e-9);
        }
    }
}

TEST_CASE("candidate tori shrink with ell at the homogeneity rate") {
    const auto cands = candidate_tori(0.5, 4, 3, 3);
    REQUIRE(cands.size() == 3);
    CHECK(cands[0].ell + 1 == cands[1].ell);
    CHECK(cands[1].ell + 1 == cands[2].ell);
    for (const auto& c : cands) {
        CHECK(c.r_plus < 0.5);
        CHECK(c.torus.residual_T < 1e-10);
    }
    CHECK(cands[0].r_plus > cands[1].r_plus);
    CHECK(cands[1].r_plus > cands[2].r_plus);
    // doubling ell scales the sup norm by 2^{-2/(2+alpha)}
    const auto pot = RadialPotential::homogeneous(1.0, 0.5);
    const TorusSolution a = find_torus(pot, 2.0 * M_PI, 4, 3, cands[0].ell);
    const TorusSolution b = find_torus(pot, 2.0 * M_PI, 4, 3, 2 * cands[0].ell);
    const double ra = RegularizedMap::radial(pot, a.L).turning_points(a.H).s_plus;
    const double rb = RegularizedMap::radial(pot, b.L).turning_points(b.H).s_plus;
    CHECK(rel_err(rb / ra, std::pow(2.0, -0.8)) < 1e-6);
}

TEST_CASE("config rejects out-of-range parameters") {
    CHECK_THROWS_AS(R3BConfig(1.0, 0.01), ParameterError);
    CHECK_THROWS_AS(R3BConfig(2.5, 0.01), ParameterError);
    CHECK_THROWS_AS(R3BConfig(0.5, 0.0), ParameterError);
    CHECK_THROWS_AS(R3BConfig(0.5, 1.0), ParameterError);
}

TEST_CASE("orbit-to-torus distance scales linearly in the mass") {
    const auto cands = candidate_tori(0.5, 4, 3, 1);
    const auto pot = RadialPotential::homogeneous(1.0, 0.5);
    double prev = 0.0;
    int idx = 0;
    for (const double m : {2e-4, 1e-4, 5e-5}) {
        const R3BConfig cfg(0.5, m);
        const R3BOrbit orbit = find_r3b_periodic(cfg, cands[0]);
        const double d = distance_to_torus(pot, cands[0].torus, orbit.orbit.z0);
        CAPTURE(m);
        CHECK(d > 0.0);
        if (idx++ > 0) {
            const double ratio = d / prev;
            CHECK(ratio > 0.25);
            CHECK(ratio < 1.0);
        }
        prev = d;
    }
}

TEST_CASE("periodic orbit in the q frame at small mass") {
    const R3BConfig cfg(0.5, 1e-4);
    const auto cands = candidate_tori(0.5, 4, 3, 1);
    const R3BOrbit orbit = find_r3b_periodic(cfg, cands[0]);
    CHECK(orbit.orbit.residual < 1e-8);
    CHECK(orbit.q_residual < 1e-8);
    CHECK(orbit.orbit.winding_k == cands[0].k * cands[0].ell);
    // stays away from the small primary's unit circle
    IntegratorOptions io;
    io.collision_floor = 1e-12;
    const auto pot = RadialPotential::homogeneous(1.0, cfg.alpha);
    const PerturbationModel model = PerturbationModel::rotating_point_mass(cfg.alpha, cfg.m);
    const Trajectory xtraj = integrate(perturbed_field(pot, model), orbit.orbit.z0, 2.0 * M_PI, io);
    double max_r = 0.0;
    for (std::size_t i = 0; i < xtraj.size(); ++i)
        max_r = std::max(max_r, xtraj.state(i).radius());
    CHECK(max_r < 0.6);
}

TEST_SUITE_END();
