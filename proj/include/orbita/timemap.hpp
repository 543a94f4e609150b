#ifndef ORBITA_TIMEMAP_HPP
#define ORBITA_TIMEMAP_HPP

#include "orbita/effective.hpp"

#include <utility>
#include <vector>

namespace orbita {

struct QuadratureOptions {
    int base_order = 64;          // Gauss-Legendre order of the first pass
    double rel_target = 1e-12;    // accept when two refinements agree to this
    double disagree_tol = 1e-8;   // hard failure beyond this at max_order
    int max_order = 8192;
    double center_series_rel = 0.05;  // |s - s0| < rel*s0 switches to the center series
    int series_terms = 18;            // Taylor terms of Omega/xi^2 kept at the center
};

/// T, Theta = L*P, their partials and the non-degeneracy determinant
/// D = dT_dH * dTheta_dL - dT_dL * dTheta_dH at one (H, L).
struct TimeMapValues {
    double T = 0.0;
    double Theta = 0.0;
    double P = 0.0;
    double dT_dH = 0.0;
    double dT_dL = 0.0;
    double dTheta_dH = 0.0;
    double dTheta_dL = 0.0;
    double D = 0.0;
};

/// Closed-form limits of the time map and its partials as H -> (-omega0)+.
struct CircularLimits {
    double T = 0.0;
    double dT_dH = 0.0;
    double dT_dL = 0.0;
};

/// One oscillator with the square-root singularity removed: the substitution
/// s = h^{-1}(sqrt(H + omega0) sin theta), with h(s) = sgn(s - s0) sqrt(Omega(s)),
/// turns every time-map integral into a regular integral over [-pi/2, pi/2].
/// Near the center the direct formulas for h', h'', h''' are 0/0 and lose
/// digits to the cancellation Omega = W + omega0, so within
/// |s - s0| < center_series_rel * s0 the map evaluates everything from an
/// exact Taylor series of q(xi) = Omega(s0 + xi)/xi^2 (the power-sum potential
/// representation supplies center derivatives of any order).
class RegularizedMap {
public:
    RegularizedMap(EffectiveOscillator osc, EffectiveOptions eopt = {}, QuadratureOptions qopt = {});

    static RegularizedMap radial(const RadialPotential& potential, double L,
                                 EffectiveOptions eopt = {}, QuadratureOptions qopt = {});
    static RegularizedMap clairaut(const RadialPotential& potential, double L,
                                   EffectiveOptions eopt = {}, QuadratureOptions qopt = {});

    const EffectiveOscillator& oscillator() const { return osc_; }
    const OscillatorAnalysis& analysis() const { return analysis_; }
    const CircularData& circular() const { return analysis_.circ; }
    int k() const { return osc_.k(); }
    double L() const { return osc_.L(); }
    double omega0() const { return analysis_.circ.omega0; }
    double H0() const { return analysis_.H0; }

    bool admissible(double H) const;
    TurningPoints turning_points(double H) const;

    /// T_Omega(H, L) by regularized Gauss-Legendre quadrature.
    double period(double H) const;

    /// (dT/dH, dT/dL) from the analytic derivative integrals.
    std::pair<double, double> d_period(double H) const;
    double dH_period(double H) const;

    /// d(L T_Omega)/dL as one fused quadrature (Clairaut use: dTheta/dL).
    double apsidal_dL(double H) const;

    /// Area enclosed by the (s, sdot) orbit: 2 sqrt(2) E Int cos^2(theta)/h' dtheta.
    double area(double H) const;

    /// Time along the ascending branch from the inner turning point to s.
    double time_from_pericenter(double H, double s) const;

    /// Swept polar angle Int L/s^2 dt over the same stretch (radial map only).
    double angle_from_pericenter(double H, double s) const;

    CircularLimits circular_limits() const;

    struct HValues {
        double h, hp, hpp, hppp, dLh, dLhp;
    };
    HValues h_values(double s) const;
    double h_inverse(double y, double H) const;

private:
    template <typename G>
    double integrate_theta(double H, double theta_lo, double theta_hi, G&& g) const;

    double h_only(double s) const;
    double invert(double y, double lo, double hi, double guess, double scale) const;

    EffectiveOscillator osc_;
    EffectiveOptions eopt_;
    QuadratureOptions qopt_;
    OscillatorAnalysis analysis_;

    // center series: g = sqrt(q) with q(xi) = Omega(s0+xi)/xi^2, plus the
    // L-derivative series u(xi) = dL q(xi) at fixed xi
    std::vector<double> gc_;  // coefficients of g
    std::vector<double> uc_;  // coefficients of u
    double series_radius_;
};

/// All time-map quantities and D(H, L) for a potential at one point.
TimeMapValues nondegeneracy(const RadialPotential& potential, double H, double L,
                            const EffectiveOptions& eopt = {}, const QuadratureOptions& qopt = {});

/// Theta(H, L) = L * P(H, L) through the Clairaut oscillator.
double apsidal_angle(const RadialPotential& potential, double H, double L,
                     const EffectiveOptions& eopt = {}, const QuadratureOptions& qopt = {});

/// One scaling identity evaluated on both sides.
struct ScalingIdentity {
    const char* name;
    double lhs;
    double rhs;
};

struct ScalingReduction {
    double H_reduced = 0.0;
    double L_reduced = 1.0;
    std::vector<ScalingIdentity> identities;
};

/// Reduce (H, L) to (H L^{2a/(2-a)}, 1) for the homogeneous family and
/// evaluate both sides of the period/apsidal scaling laws, the dL identities
/// and the D shortcut.
ScalingReduction scaling_reduce(double alpha, double kappa, double H, double L,
                                const EffectiveOptions& eopt = {}, const QuadratureOptions& qopt = {});

/// Same for the logarithmic potential: reduction (H - kappa log L, 1).
ScalingReduction scaling_reduce_logarithmic(double kappa, double H, double L,
                                            const EffectiveOptions& eopt = {},
                                            const QuadratureOptions& qopt = {});

/// Expected signs of (dTheta_dH, dTheta_dL, D) for the homogeneous family,
/// each -1 or +1. Requires alpha < 2 and alpha outside {-2, 0, 1}.
struct SignTriple {
    int dTheta_dH = 0;
    int dTheta_dL = 0;
    int D = 0;
};
SignTriple sign_table(double alpha);
SignTriple sign_table_logarithmic();

/// Period-monotonicity certificate: Schaaf's two conditions on the radial
/// well plus samples of Chicone's expression on the orbit range of a probe
/// energy. Condition (ii) applies at the interior zeros of W'' (vacuous if
/// there are none on the sampled range).
struct MonotonicityReport {
    double H_probe = 0.0;
    bool schaaf_i_pass = false;
    double schaaf_i_min = 0.0;
    bool schaaf_ii_pass = false;
    double schaaf_ii_max = 0.0;   // max of W' W''' over the W'' zeros
    int schaaf_ii_points = 0;
    double chicone_min = 0.0;     // min of 6 W W''^2 - 3 W'^2 W'' - 2 W W' W''' on (s-, s+), W shifted
    bool pass = false;
};
MonotonicityReport monotonicity_certificate(const RadialPotential& potential, double L,
                                            double H_probe = std::numeric_limits<double>::quiet_NaN(),
                                            const EffectiveOptions& eopt = {},
                                            const QuadratureOptions& qopt = {});

/// Circular-orbit limit values and signs for the Lennard-Jones family,
/// both oscillators.
struct LJCircularSigns {
    double lim_dT_dH = 0.0;
    double lim_dT_dL = 0.0;
    double lim_dTheta_dH = 0.0;
    double lim_dTheta_dL = 0.0;
    double lim_D = 0.0;
    int sign_dT_dH = 0, sign_dT_dL = 0, sign_dTheta_dH = 0, sign_dTheta_dL = 0, sign_D = 0;
};
LJCircularSigns lj_circular_sign(double varsigma, double sigma, double L,
                                 const EffectiveOptions& eopt = {});

/// Closed forms of the relativistic Kepler time maps.
struct RelativisticKepler {
    double T = 0.0;
    double Theta = 0.0;
    double dT_dH = 0.0;
    double dTheta_dL = 0.0;
    double D = 0.0;
    bool nondegenerate = false;
};
RelativisticKepler relativistic_kepler(double kappa, double c, double H, double L);

} // namespace orbita

#endif
