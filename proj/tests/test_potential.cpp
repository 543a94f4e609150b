#include "orbita/errors.hpp"
#include "orbita/potential.hpp"

#include "oracle_helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace orbita;
using oracles::central_diff;
using oracles::rel_err;

TEST_SUITE_BEGIN("potential");

TEST_CASE("built-in families evaluate their term sums") {
    const auto lc = RadialPotential::levi_civita(1.0, 0.1);
    CHECK(lc(1.0) == doctest::Approx(1.1).epsilon(1e-15));

    // alpha = -2 is the harmonic oscillator, V(r) = -r^2/2
    const auto harm = RadialPotential::homogeneous(1.0, -2.0);
    CHECK(harm(2.0) == doctest::Approx(-2.0).epsilon(1e-15));
    CHECK(harm(1.0) == doctest::Approx(-0.5).epsilon(1e-15));

    const auto lj = RadialPotential::lennard_jones(1.0, 1.0);
    CHECK(lj(2.0) == doctest::Approx(4.0 / 64.0 - 4.0 / 4096.0).epsilon(1e-15));
    CHECK(lj(2.0) == doctest::Approx(0.0615234375).epsilon(1e-15));
}

TEST_CASE("analytic derivatives of the built-ins") {
    const auto kepler = RadialPotential::homogeneous(1.0, 1.0);
    CHECK(kepler.derivative(2.0, 1) == doctest::Approx(-0.25).epsilon(1e-15));

    const auto lc = RadialPotential::levi_civita(1.0, 0.1);
    // V'' = 2 kappa / r^3 + 6 lambda / r^4
    CHECK(lc.derivative(1.0, 2) == doctest::Approx(2.6).epsilon(1e-14));
}

TEST_CASE("fourth derivative of lennard_jones matches a 5-point difference of V'''") {
    const auto lj = RadialPotential::lennard_jones(1.0, 1.0);
    auto v3 = [&](double r) { return lj.derivative(r, 3); };
    const double fd = oracles::central_diff5(v3, 1.0, 1e-3);
    CHECK(rel_err(lj.derivative(1.0, 4), fd) < 1e-6);
}

TEST_CASE("each order differences the analytic order below it, step 1e-5 r") {
    const RadialPotential pots[] = {
        RadialPotential::homogeneous(1.0, 0.5),
        RadialPotential::homogeneous(2.0, -3.0),
        RadialPotential::logarithmic(1.0),
        RadialPotential::levi_civita(1.0, 0.1),
        RadialPotential::lennard_jones(1.0, 1.0),
    };
    for (const auto& p : pots) {
        for (int i = 0; i < 20; ++i) {
            const double r = std::pow(10.0, -0.5 + 1.2 * i / 19.0);
            for (int order = 1; order <= 4; ++order) {
                auto below = [&](double x) { return p.derivative(x, order - 1); };
                const double fd = central_diff(below, r, 1e-5 * r, 1);
                CAPTURE(p.label());
                CAPTURE(r);
                CAPTURE(order);
                CHECK(rel_err(p.derivative(r, order), fd) < 1e-6);
            }
        }
    }
}

TEST_CASE("homogeneity identity V'(r) r^{alpha+1} = -kappa") {
    for (const double alpha : {0.5, 1.0, 1.5, -0.5, -3.0}) {
        const auto p = RadialPotential::homogeneous(2.0, alpha);
        for (int i = 0; i < 20; ++i) {
            const double r = std::pow(10.0, -1.0 + 2.0 * i / 19.0);
            CHECK(rel_err(p.derivative(r, 1) * std::pow(r, alpha + 1.0), -2.0) < 1e-12);
        }
    }
}

TEST_CASE("parameter bounds are enforced with named errors") {
    CHECK_THROWS_AS(RadialPotential::homogeneous(-1.0, 0.5), ParameterError);
    CHECK_THROWS_AS(RadialPotential::homogeneous(1.0, 2.0), ParameterError);
    CHECK_THROWS_AS(RadialPotential::homogeneous(1.0, 0.0), ParameterError);
    CHECK_THROWS_AS(RadialPotential::logarithmic(0.0), ParameterError);
    CHECK_THROWS_AS(RadialPotential::lennard_jones(1.0, -1.0), ParameterError);
    CHECK_THROWS_AS(RadialPotential::levi_civita(0.0, 0.1), ParameterError);

    // levi_civita admits lambda <= 0 (Kepler at lambda = 0)
    CHECK_NOTHROW(RadialPotential::levi_civita(1.0, 0.0));
    CHECK_NOTHROW(RadialPotential::levi_civita(1.0, -0.1));
}

TEST_CASE("domain violations throw") {
    const RadialPotential p({{1.0, -1.0}}, 0.0, 0.5, 2.0, "window");
    CHECK_THROWS_AS(p(0.25), DomainError);
    CHECK_THROWS_AS(p(3.0), DomainError);
    CHECK_NOTHROW(p(1.0));
}

TEST_CASE("clairaut inversion keeps the representation exact") {
    const auto lj = RadialPotential::lennard_jones(1.0, 1.1);
    const auto inv = lj.inverted();
    for (int i = 0; i < 12; ++i) {
        const double u = std::pow(10.0, -1.0 + 1.5 * i / 11.0);
        CHECK(rel_err(inv(u), lj(1.0 / u)) < 1e-14);
    }
    const auto log_inv = RadialPotential::logarithmic(2.0).inverted();
    CHECK(log_inv(0.5) == doctest::Approx(-2.0 * std::log(2.0)).epsilon(1e-14));
}

TEST_SUITE_END();
