#include "orbita/effective.hpp"
#include "orbita/errors.hpp"

#include "oracle_helpers.hpp"

#include <doctest.h>

#include <random>

#include <cmath>

using namespace orbita;
using oracles::rel_err;

TEST_SUITE_BEGIN("effective");

TEST_CASE("homogeneous center: s0 = 1, omega0 = (2-alpha)/(2 alpha) at kappa = L = 1") {
    for (const double alpha : {0.5, 1.0, 1.5, -0.5, -3.0}) {
        const auto osc = EffectiveOscillator::radial(RadialPotential::homogeneous(1.0, alpha), 1.0);
        const CircularData c = find_center(osc);
        CAPTURE(alpha);
        CHECK(rel_err(c.s0, 1.0) < 1e-12);
        CHECK(rel_err(c.omega0, (2.0 - alpha) / (2.0 * alpha)) < 1e-12);
    }
}

TEST_CASE("levi-civita center: r0 = (L^2 - 2 lambda)/kappa, w0 = kappa^2/(2(L^2 - 2 lambda))") {
    const auto osc = EffectiveOscillator::radial(RadialPotential::levi_civita(1.0, 0.1), 1.0);
    const CircularData c = find_center(osc);
    CHECK(rel_err(c.s0, 0.8) < 1e-12);
    CHECK(rel_err(c.omega0, 0.625) < 1e-12);
}

TEST_CASE("lennard-jones: no minimum when L^2 exceeds the well bound") {
    // L^2 < (1/5)^{2/3} (72/5) varsigma sigma^2 is necessary for a well
    const auto pot = RadialPotential::lennard_jones(1.0, 1.0);
    CHECK_THROWS_AS(find_center(EffectiveOscillator::radial(pot, 2.3)), NoMinimumError);
    CHECK_NOTHROW(find_center(EffectiveOscillator::radial(pot, 0.5)));
}

TEST_CASE("admissible windows per family") {
    SUBCASE("homogeneous alpha = 0.5 traps only negative energies") {
        const auto osc = EffectiveOscillator::radial(RadialPotential::homogeneous(1.0, 0.5), 1.0);
        const auto an = analyze(osc);
        CHECK(rel_err(an.circ.omega0, 1.5) < 1e-12);
        CHECK(admissible(an, -0.4));
        CHECK(!admissible(an, 0.1));
        CHECK(!admissible(an, -1.6));
    }
    SUBCASE("harmonic oscillator traps all energies above the well bottom") {
        const auto osc = EffectiveOscillator::radial(RadialPotential::homogeneous(1.0, -2.0), 1.0);
        const auto an = analyze(osc);
        CHECK(admissible(an, 5.0));
        CHECK(admissible(an, 1e6));
        CHECK(!admissible(an, -an.circ.omega0));
    }
    SUBCASE("lennard-jones is capped by the interior maximum") {
        const auto osc = EffectiveOscillator::radial(RadialPotential::lennard_jones(1.0, 1.0), 0.5);
        const auto an = analyze(osc);
        CHECK(an.has_outer_edge);
        CHECK(an.H0 > 0.0);
        CHECK(an.H0 == doctest::Approx(osc.W(an.outer_edge, 0)));
        CHECK(admissible(an, 0.5 * (an.H0 - an.circ.omega0)));
        CHECK(!admissible(an, an.H0 * 1.01));
    }
}

TEST_CASE("turning points against the quadratic-formula oracle") {
    SUBCASE("kepler H = -0.4: roots of 0.8 r^2 - 2r + 1") {
        const auto osc = EffectiveOscillator::radial(RadialPotential::homogeneous(1.0, 1.0), 1.0);
        const auto an = analyze(osc);
        const TurningPoints tp = turning_points(osc, an, -0.4);
        const double disc = std::sqrt(4.0 - 4.0 * 0.8);
        CHECK(rel_err(tp.s_minus, (2.0 - disc) / 1.6) < 1e-10);
        CHECK(rel_err(tp.s_plus, (2.0 + disc) / 1.6) < 1e-10);
        CHECK(tp.s_minus == doctest::Approx(0.690983).epsilon(1e-5));
        CHECK(tp.s_plus == doctest::Approx(1.809017).epsilon(1e-5));
    }
    SUBCASE("levi-civita H = -0.5: r^2 - 2r + 0.8") {
        const auto osc = EffectiveOscillator::radial(RadialPotential::levi_civita(1.0, 0.1), 1.0);
        const auto an = analyze(osc);
        const TurningPoints tp = turning_points(osc, an, -0.5);
        const double disc = std::sqrt(4.0 - 4.0 * 0.8);
        CHECK(rel_err(tp.s_minus, (2.0 - disc) / 2.0) < 1e-10);
        CHECK(rel_err(tp.s_plus, (2.0 + disc) / 2.0) < 1e-10);
    }
    SUBCASE("near-circular energies collapse onto the center") {
        const auto osc = EffectiveOscillator::radial(RadialPotential::levi_civita(1.0, 0.1), 1.0);
        const auto an = analyze(osc);
        const TurningPoints tp = turning_points(osc, an, -an.circ.omega0 + 1e-14);
        CHECK(std::fabs(tp.s_minus - an.circ.s0) < 1e-6);
        CHECK(std::fabs(tp.s_plus - an.circ.s0) < 1e-6);
    }
}

TEST_CASE("residuals and interior depth of the turning points") {
    const RadialPotential pots[] = {
        RadialPotential::homogeneous(1.0, 0.5),
        RadialPotential::homogeneous(1.0, -3.0),
        RadialPotential::lennard_jones(1.0, 1.0),
    };
    const double Ls[] = {1.0, 1.0, 0.5};
    for (int p = 0; p < 3; ++p) {
        for (int k : {-1, +1}) {
            const auto osc = k < 0 ? EffectiveOscillator::radial(pots[p], Ls[p])
                                   : EffectiveOscillator::clairaut(pots[p], Ls[p]);
            const auto an = analyze(osc);
            const double H_hi = std::isfinite(an.H0)
                                    ? an.H0 - 0.05 * (an.H0 + an.circ.omega0)
                                    : -an.circ.omega0 + 8.0 * std::fabs(an.circ.omega0) + 1.0;
            for (int i = 1; i <= 5; ++i) {
                const double H = -an.circ.omega0 + (H_hi + an.circ.omega0) * i / 6.0;
                const TurningPoints tp = turning_points(osc, an, H);
                CAPTURE(p);
                CAPTURE(k);
                CAPTURE(H);
                CHECK(std::fabs(osc.W(tp.s_minus, 0) - H) <= 1e-12 * std::fabs(H) + 1e-13);
                CHECK(std::fabs(osc.W(tp.s_plus, 0) - H) <= 1e-12 * std::fabs(H) + 1e-13);
                for (int j = 1; j <= 10; ++j) {
                    const double s = tp.s_minus + (tp.s_plus - tp.s_minus) * j / 11.0;
                    CHECK(osc.W(s, 0) < H);
                }
            }
        }
    }
}

TEST_CASE("ds0/dL matches finite differences of the located center") {
    const RadialPotential pot = RadialPotential::lennard_jones(1.0, 1.0);
    for (int k : {-1, +1}) {
        const double L = 0.5;
        auto center_at = [&](double Lx) {
            const auto osc = k < 0 ? EffectiveOscillator::radial(pot, Lx)
                                   : EffectiveOscillator::clairaut(pot, Lx);
            return find_center(osc).s0;
        };
        const auto osc = k < 0 ? EffectiveOscillator::radial(pot, L)
                               : EffectiveOscillator::clairaut(pot, L);
        const CircularData c = find_center(osc);
        const double fd = oracles::central_diff(center_at, L, 1e-6, 1);
        CAPTURE(k);
        CHECK(rel_err(c.ds0_dL, fd) < 1e-6);
    }
}

TEST_CASE("clairaut center is the reciprocal of the radial one") {
    const RadialPotential pots[] = {
        RadialPotential::homogeneous(1.0, 0.5),
        RadialPotential::levi_civita(1.0, 0.1),
        RadialPotential::lennard_jones(1.0, 1.0),
    };
    const double Ls[] = {1.0, 1.0, 0.5};
    for (int p = 0; p < 3; ++p) {
        const auto rad = find_center(EffectiveOscillator::radial(pots[p], Ls[p]));
        const auto cla = find_center(EffectiveOscillator::clairaut(pots[p], Ls[p]));
        CHECK(rel_err(cla.s0, 1.0 / rad.s0) < 1e-10);
        CHECK(rel_err(cla.omega0, rad.omega0) < 1e-10);
    }
}

TEST_CASE("randomized custom potentials keep the oscillator invariants") {
    // attractive power-law pairs with a guaranteed well: V = c1 r^{-p1} + c2 r^{p2}
    std::mt19937 rng(20240817u);
    std::uniform_real_distribution<double> coef(0.4, 2.5);
    std::uniform_real_distribution<double> pow_lo(0.3, 1.8);
    std::uniform_real_distribution<double> Ldist(0.6, 1.6);
    for (int trial = 0; trial < 25; ++trial) {
        const double c1 = coef(rng);
        const double p1 = pow_lo(rng);
        const RadialPotential pot({{c1, -p1}}, 0.0, 0.0,
                                  std::numeric_limits<double>::infinity(), "random",
                                  EnergyCeiling::decays_to_zero);
        const double L = Ldist(rng);
        const auto rad = EffectiveOscillator::radial(pot, L);
        const auto cla = EffectiveOscillator::clairaut(pot, L);
        const auto an_r = analyze(rad);
        const auto an_c = analyze(cla);
        CAPTURE(trial);
        CAPTURE(c1);
        CAPTURE(p1);
        CAPTURE(L);
        // reciprocal centers, equal depths
        CHECK(rel_err(an_c.circ.s0, 1.0 / an_r.circ.s0) < 1e-9);
        CHECK(rel_err(an_c.circ.omega0, an_r.circ.omega0) < 1e-9);
        // turning points bracket the center and satisfy the residual contract
        const double w0 = an_r.circ.omega0;
        const double H = -w0 * (0.2 + 0.6 * (trial / 25.0));
        const TurningPoints tr = turning_points(rad, an_r, H);
        const TurningPoints tc = turning_points(cla, an_c, H);
        CHECK(tr.s_minus < an_r.circ.s0);
        CHECK(tr.s_plus > an_r.circ.s0);
        CHECK(rel_err(tc.s_minus, 1.0 / tr.s_plus) < 1e-8);
        CHECK(rel_err(tc.s_plus, 1.0 / tr.s_minus) < 1e-8);
        CHECK(std::fabs(rad.W(tr.s_minus, 0) - H) <= 1e-11 * std::fabs(H) + 1e-12);
        CHECK(std::fabs(rad.W(tr.s_plus, 0) - H) <= 1e-11 * std::fabs(H) + 1e-12);
    }
}

TEST_CASE("d omega2 / dL closed form matches finite differences") {
    const RadialPotential pot = RadialPotential::homogeneous(1.0, 0.5);
    for (int k : {-1, +1}) {
        auto omega2_at = [&](double Lx) {
            const auto osc = k < 0 ? EffectiveOscillator::radial(pot, Lx)
                                   : EffectiveOscillator::clairaut(pot, Lx);
            return find_center(osc).omega2;
        };
        const auto osc = k < 0 ? EffectiveOscillator::radial(pot, 1.0)
                               : EffectiveOscillator::clairaut(pot, 1.0);
        const CircularData c = find_center(osc);
        const double fd = oracles::central_diff(omega2_at, 1.0, 1e-6, 1);
        CAPTURE(k);
        CHECK(rel_err(c.d_omega2_dL, fd) < 1e-6);
    }
}

TEST_SUITE_END();
