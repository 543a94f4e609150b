#include "orbita/effective.hpp"

#include "orbita/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace orbita {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double falling_factorial(double p, int n) {
    double f = 1.0;
    for (int j = 0; j < n; ++j)
        f *= p - j;
    return f;
}

} // namespace

EffectiveOscillator::EffectiveOscillator(int k, RadialPotential vee, double L)
    : k_(k), vee_(std::move(vee)), L_(L) {
    if (!(L > 0.0))
        throw ParameterError("effective oscillator requires L > 0, got L = " + std::to_string(L));
}

EffectiveOscillator EffectiveOscillator::radial(const RadialPotential& potential, double L) {
    return EffectiveOscillator(-1, potential, L);
}

EffectiveOscillator EffectiveOscillator::clairaut(const RadialPotential& potential, double L) {
    return EffectiveOscillator(+1, potential.inverted(), L);
}

double EffectiveOscillator::W(double s, int order) const {
    const double p = 2.0 * k_;
    const double centrifugal = 0.5 * L_ * L_ * falling_factorial(p, order) * std::pow(s, p - order);
    return centrifugal - vee_.derivative(s, order);
}

double EffectiveOscillator::W_magnitude(double s) const {
    return 0.5 * L_ * L_ * std::pow(s, 2.0 * k_) + vee_.magnitude(s);
}

double EffectiveOscillator::dL_W(double s, int order) const {
    const double p = 2.0 * k_;
    switch (order) {
        case 0: return L_ * std::pow(s, p);
        case 1: return p * L_ * std::pow(s, p - 1.0);
        case 2: return p * (p - 1.0) * L_ * std::pow(s, p - 2.0);
        default: throw ParameterError("dL_W: order must lie in 0..2");
    }
}

CircularData find_center(const EffectiveOscillator& osc, const EffectiveOptions& opt) {
    const auto& vee = osc.working_potential();
    const double lo = std::max(opt.scan_lo, vee.domain_lo() * (1.0 + 1e-12));
    const double hi = std::min(opt.scan_hi, std::isinf(vee.domain_hi()) ? opt.scan_hi
                                                                        : vee.domain_hi() * (1.0 - 1e-12));
    if (!(lo < hi))
        throw ParameterError("find_center: empty scan range");

    // Log-spaced scan for the - to + sign change of W'.
    const int n = std::max(opt.scan_points, 8);
    const double log_lo = std::log(lo), log_hi = std::log(hi);
    double a = 0.0, b = 0.0;
    bool found = false;
    double s_prev = lo;
    double w_prev = osc.W(s_prev, 1);
    for (int i = 1; i < n && !found; ++i) {
        const double s = std::exp(log_lo + (log_hi - log_lo) * i / (n - 1));
        const double w = osc.W(s, 1);
        if (w_prev < 0.0 && w >= 0.0) {
            a = s_prev;
            b = s;
            found = true;
        }
        s_prev = s;
        w_prev = w;
    }
    if (!found) {
        std::ostringstream msg;
        msg << "find_center: W'(.;L) has no - to + sign change for '" << vee.label()
            << "' at L = " << osc.L() << " (no interior minimum)";
        throw NoMinimumError(msg.str());
    }

    // Bisect on W', then polish with Newton.
    for (int i = 0; i < opt.max_bisections; ++i) {
        const double m = 0.5 * (a + b);
        if (osc.W(m, 1) < 0.0)
            a = m;
        else
            b = m;
        if (b - a <= 8.0 * std::numeric_limits<double>::epsilon() * b)
            break;
    }
    double s0 = 0.5 * (a + b);
    for (int i = 0; i < 8; ++i) {
        const double w1 = osc.W(s0, 1);
        const double w2 = osc.W(s0, 2);
        if (w2 <= 0.0)
            break;
        const double step = w1 / w2;
        const double next = s0 - step;
        if (!(next > a && next < b))
            break;
        s0 = next;
        if (std::fabs(step) <= std::numeric_limits<double>::epsilon() * s0)
            break;
    }

    CircularData c;
    c.s0 = s0;
    c.omega0 = -osc.W(s0, 0);
    c.omega2 = osc.W(s0, 2);
    c.omega3 = osc.W(s0, 3);
    c.omega4 = osc.W(s0, 4);
    if (!(c.omega2 > 0.0)) {
        std::ostringstream msg;
        msg << "find_center: degenerate center for '" << vee.label() << "' at L = " << osc.L()
            << " (W''(s0) = " << c.omega2 << " <= 0)";
        throw DegenerateCenterError(msg.str());
    }
    const double residual = std::fabs(osc.W(s0, 1));
    if (residual > opt.center_residual_scale * c.omega2 * s0 + 1e-300)
        throw ConvergenceError("find_center: center residual " + std::to_string(residual) + " above tolerance");

    c.sigma0 = 5.0 * c.omega3 * c.omega3 - 3.0 * c.omega2 * c.omega4;
    const double k = osc.k();
    const double L = osc.L();
    c.ds0_dL = -2.0 * k * L * std::pow(s0, 2.0 * k - 1.0) / c.omega2;
    c.d_omega2_dL = -(2.0 * k * L * std::pow(s0, 2.0 * k - 2.0) / c.omega2) *
                    (s0 * c.omega3 - (2.0 * k - 1.0) * c.omega2);
    return c;
}

OscillatorAnalysis analyze(const EffectiveOscillator& osc, const EffectiveOptions& opt) {
    OscillatorAnalysis out;
    out.circ = find_center(osc, opt);
    switch (osc.ceiling()) {
        case EnergyCeiling::decays_to_zero:
            out.H0 = 0.0;
            break;
        case EnergyCeiling::coercive:
            out.H0 = kInf;
            break;
        case EnergyCeiling::interior_maximum: {
            // The capping local maximum sits on the large-radius side of the
            // well: above the center for k = -1, below it for k = +1.
            const double s0 = out.circ.s0;
            const bool upward = osc.k() < 0;
            double s_prev = s0;
            double w_prev = 0.0;  // W'(s0) ~ 0, treated as the + side start
            double a = 0.0, b = 0.0;
            bool found = false;
            double step = 1e-4;
            for (int i = 0; i < 400 && !found; ++i) {
                const double s = upward ? s0 * (1.0 + step) : s0 / (1.0 + step);
                const double w = osc.W(s, 1);
                // Moving outward from the minimum, W' first carries the sign
                // of the outward direction, then flips at the maximum.
                const bool flipped = upward ? (w_prev > 0.0 && w <= 0.0) : (w_prev < 0.0 && w >= 0.0);
                if (flipped) {
                    a = std::min(s_prev, s);
                    b = std::max(s_prev, s);
                    found = true;
                }
                s_prev = s;
                w_prev = w;
                step *= 1.5;
            }
            if (!found)
                throw ConvergenceError("analyze: no interior maximum found for '" +
                                       osc.working_potential().label() + "'");
            for (int i = 0; i < opt.max_bisections; ++i) {
                const double m = 0.5 * (a + b);
                const double w = osc.W(m, 1);
                const bool left_of_max = upward ? (w > 0.0) : (w < 0.0);
                if (left_of_max == upward)
                    a = m;
                else
                    b = m;
                if (b - a <= 8.0 * std::numeric_limits<double>::epsilon() * b)
                    break;
            }
            out.outer_edge = 0.5 * (a + b);
            out.has_outer_edge = true;
            out.H0 = osc.W(out.outer_edge, 0);
            break;
        }
    }
    return out;
}

bool admissible(const OscillatorAnalysis& analysis, double H) {
    return H > -analysis.circ.omega0 && H < analysis.H0;
}

namespace {

// Safeguarded bisection/Newton for W(s) = H on a bracket where W - H
// changes sign; `lo_below` states which side of the bracket has W < H.
// The tolerance carries a noise floor of eps * (term magnitudes): near a
// steep wall W is a difference of large terms and |W - H| cannot be
// resolved below that.
double solve_turning(const EffectiveOscillator& osc, double H, double lo, double hi,
                     bool lo_below, const EffectiveOptions& opt) {
    auto f = [&](double s) { return osc.W(s, 0) - H; };
    double a = lo, b = hi;
    double s = 0.5 * (a + b);
    for (int i = 0; i < opt.max_bisections; ++i) {
        const double fs = f(s);
        const double noise =
            8.0 * std::numeric_limits<double>::epsilon() * (osc.W_magnitude(s) + std::fabs(H));
        const double tol = opt.turning_rel_tol * std::fabs(H) + opt.turning_abs_tol + noise;
        if (std::fabs(fs) <= tol && (b - a) <= 1e-9 * std::max(1.0, std::fabs(s)))
            return s;
        if ((fs < 0.0) == lo_below)
            a = s;
        else
            b = s;
        // Try a Newton step from the current estimate; fall back to bisection.
        const double df = osc.W(s, 1);
        double next = s - fs / df;
        if (!(next > a && next < b) || df == 0.0)
            next = 0.5 * (a + b);
        if (b - a <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::fabs(a), std::fabs(b))) {
            if (std::fabs(fs) <= std::max(tol, 8.0 * noise))
                return s;
            throw ConvergenceError("turning_points: residual stalled at " + std::to_string(fs));
        }
        s = next;
    }
    throw ConvergenceError("turning_points: no convergence after max bisections");
}

} // namespace

TurningPoints turning_points(const EffectiveOscillator& osc, const OscillatorAnalysis& analysis,
                             double H, const EffectiveOptions& opt) {
    if (!admissible(analysis, H)) {
        std::ostringstream msg;
        msg << "turning_points: H = " << H << " outside admissible window ("
            << -analysis.circ.omega0 << ", " << analysis.H0 << ")";
        throw DomainError(msg.str());
    }
    const double s0 = analysis.circ.s0;
    const auto& vee = osc.working_potential();

    // The capping local maximum (when present) sits above the center for
    // k = -1 and below it for k = +1; the march in its direction clamps
    // there, where W = H0 > H guarantees a bracket.
    const bool edge_below = analysis.has_outer_edge && analysis.outer_edge < s0;
    const bool edge_above = analysis.has_outer_edge && analysis.outer_edge > s0;

    // Bracket below the center: march down until W >= H.
    double prev = s0;
    double a_in = 0.0;
    {
        const double floor = edge_below ? analysis.outer_edge : vee.domain_lo();
        bool found = false;
        double eps = 1e-8;
        while (eps < 0.5 && !found) {
            double s = s0 * (1.0 - eps);
            const bool clamped = s <= floor;
            if (clamped)
                s = edge_below ? floor : floor * (1.0 + 1e-12);
            if (osc.W(s, 0) >= H) {
                a_in = s;
                found = true;
            } else if (clamped) {
                break;
            } else {
                prev = s;
                eps *= 2.0;
            }
        }
        double s = std::max(s0 * 0.5, floor);
        int guard = 0;
        while (!found && guard++ < 4000) {
            const bool clamped = s <= floor;
            if (clamped && edge_below)
                s = floor;
            if (osc.W(s, 0) >= H) {
                a_in = s;
                found = true;
            } else if (clamped) {
                break;
            } else {
                prev = s;
                s = floor > 0.0 ? floor + 0.5 * (s - floor) : 0.5 * s;
                if (s < 1e-300)
                    break;
            }
        }
        if (!found)
            throw ConvergenceError("turning_points: no inner bracket for H = " + std::to_string(H));
    }
    const double s_minus = solve_turning(osc, H, a_in, prev, false, opt);

    // Bracket above the center: march up until W >= H.
    prev = s0;
    double b_out = 0.0;
    {
        const double ceil_s = edge_above ? analysis.outer_edge : std::min(vee.domain_hi(), 1e300);
        bool found = false;
        double eps = 1e-8;
        int guard = 0;
        while (!found && guard++ < 4000) {
            double s = s0 * (1.0 + eps);
            const bool clamped = s >= ceil_s;
            if (clamped)
                s = edge_above ? ceil_s : ceil_s * (1.0 - 1e-12);
            if (osc.W(s, 0) >= H) {
                b_out = s;
                found = true;
            } else {
                if (clamped)
                    break;
                prev = s;
                eps *= 2.0;
            }
        }
        if (!found)
            throw ConvergenceError("turning_points: no outer bracket for H = " + std::to_string(H));
    }
    const double s_plus = solve_turning(osc, H, prev, b_out, true, opt);

    return {s_minus, s_plus};
}

} // namespace orbita
