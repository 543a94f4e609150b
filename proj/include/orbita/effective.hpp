#ifndef ORBITA_EFFECTIVE_HPP
#define ORBITA_EFFECTIVE_HPP

#include "orbita/potential.hpp"

namespace orbita {

/// Tolerances and search controls for center finding and turning points.
struct EffectiveOptions {
    int scan_points = 256;          // log-spaced W' sign-change scan
    double scan_lo = 1e-8;          // scan range, clipped by the domain
    double scan_hi = 1e8;
    double center_residual_scale = 1e-12;  // |W'(s0)| <= scale*|W''(s0)|*s0
    double turning_rel_tol = 1e-12;        // |W(s+-) - H| <= rel*|H| + abs
    double turning_abs_tol = 1e-14;
    int max_bisections = 200;
};

/// Data attached to the circular solution s0(L) of one oscillator:
/// the well minimum, its depth, the center derivatives of the shifted
/// well Omega = W + omega0, and the L-derivatives used by the time maps.
struct CircularData {
    double s0 = 0.0;        // minimizer of W(.;L)
    double omega0 = 0.0;    // -W(s0;L)
    double omega2 = 0.0;    // Omega0^(2) = W''(s0)
    double omega3 = 0.0;    // Omega0^(3)
    double omega4 = 0.0;    // Omega0^(4)
    double sigma0 = 0.0;    // 5 omega3^2 - 3 omega2 omega4
    double d_omega2_dL = 0.0;
    double ds0_dL = 0.0;
};

struct TurningPoints {
    double s_minus = 0.0;
    double s_plus = 0.0;
};

/// The unified planar-problem oscillator
///
///     W(s;L) = (1/2) L^2 s^{2k} - V(s),
///
/// with k = -1 for the radial problem (V(s) the potential itself) and
/// k = +1 for the Clairaut-transformed angular problem (V(s) = potential(1/s)).
/// Immutable; safe to evaluate concurrently.
class EffectiveOscillator {
public:
    static EffectiveOscillator radial(const RadialPotential& potential, double L);
    static EffectiveOscillator clairaut(const RadialPotential& potential, double L);

    int k() const { return k_; }
    double L() const { return L_; }
    const RadialPotential& working_potential() const { return vee_; }
    EnergyCeiling ceiling() const { return vee_.ceiling(); }

    /// W and its s-derivatives, order 0..4.
    double W(double s, int order = 0) const;

    /// dW^{(order)}/dL, order 0..2: L s^{2k}, 2kL s^{2k-1}, 2k(2k-1)L s^{2k-2}.
    double dL_W(double s, int order) const;

    /// Rounding scale of W(s): the sum of absolute magnitudes of its terms.
    double W_magnitude(double s) const;

private:
    EffectiveOscillator(int k, RadialPotential vee, double L);

    int k_;
    RadialPotential vee_;
    double L_;
};

/// Center plus the admissible-energy window for one oscillator.
/// H ranges over (-omega0, H0); for a ceiling of interior_maximum type,
/// outer_edge is the location of the local maximum that caps the well
/// (the edge lies above the center for k = -1 and below it for k = +1).
struct OscillatorAnalysis {
    CircularData circ;
    double H0 = 0.0;
    double outer_edge = 0.0;  // well boundary toward large radius; 0/inf if unbounded
    bool has_outer_edge = false;
};

/// Locate the strict interior minimum of W(.;L) and fill the center data.
/// Throws NoMinimumError when W' has no - to + sign change on the scan
/// grid, DegenerateCenterError when W''(s0) <= 0.
CircularData find_center(const EffectiveOscillator& osc, const EffectiveOptions& opt = {});

/// Center plus admissible window (classified per the potential's ceiling).
OscillatorAnalysis analyze(const EffectiveOscillator& osc, const EffectiveOptions& opt = {});

/// True iff -omega0(L) < H < H0(L).
bool admissible(const OscillatorAnalysis& analysis, double H);

/// The two roots of W(s;L) = H around the center. Requires admissible H.
TurningPoints turning_points(const EffectiveOscillator& osc, const OscillatorAnalysis& analysis,
                             double H, const EffectiveOptions& opt = {});

} // namespace orbita

#endif
