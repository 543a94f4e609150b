#include "orbita/timemap.hpp"

#include "orbita/errors.hpp"
#include "orbita/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace orbita {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kSqrt2 = 1.4142135623730951;

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

} // namespace

RegularizedMap::RegularizedMap(EffectiveOscillator osc, EffectiveOptions eopt, QuadratureOptions qopt)
    : osc_(std::move(osc)), eopt_(eopt), qopt_(qopt), analysis_(analyze(osc_, eopt_)) {
    const auto& c = analysis_.circ;
    const double k = osc_.k();
    const double L = osc_.L();
    const int M = std::clamp(qopt_.series_terms, 6, 24);

    // Center derivatives Omega^{(i)}(s0), i = 2 .. M+3, all exact for the
    // power-sum representation.
    std::vector<double> om(M + 4, 0.0);
    for (int i = 2; i <= M + 3; ++i)
        om[i] = osc_.W(c.s0, i);

    // q(xi) = Omega(s0+xi)/xi^2 and u(xi) = dL q at fixed xi.
    std::vector<double> qc(M + 1), duc(M + 1);
    double fact = 2.0;  // (j+2)!
    for (int j = 0; j <= M; ++j) {
        if (j > 0)
            fact *= j + 2;
        qc[j] = om[j + 2] / fact;
        const double p = 2.0 * k;
        double fall = 1.0;
        for (int i = 0; i < j + 2; ++i)
            fall *= p - i;
        const double dom = om[j + 3] * c.ds0_dL + L * fall * std::pow(c.s0, p - (j + 2));
        duc[j] = dom / fact;
    }

    // g = sqrt(q) by the series square root.
    gc_.assign(M + 1, 0.0);
    gc_[0] = std::sqrt(qc[0]);
    for (int n = 1; n <= M; ++n) {
        double acc = qc[n];
        for (int i = 1; i < n; ++i)
            acc -= gc_[i] * gc_[n - i];
        gc_[n] = acc / (2.0 * gc_[0]);
    }
    uc_ = std::move(duc);

    // Shrink the series region until the dropped tail is negligible.
    series_radius_ = qopt_.center_series_rel * c.s0;
    const double gscale = std::fabs(gc_[0]) + 1e-300;
    const double uscale = std::fabs(uc_[0]) + gscale;
    for (int guard = 0; guard < 60; ++guard) {
        const double rn = std::pow(series_radius_, M);
        const double tail = std::fabs(gc_[M]) * rn / gscale + std::fabs(uc_[M]) * rn / uscale;
        if (tail < 1e-14 || series_radius_ < 1e-6 * c.s0)
            break;
        series_radius_ *= 0.7;
    }
}

RegularizedMap RegularizedMap::radial(const RadialPotential& potential, double L,
                                      EffectiveOptions eopt, QuadratureOptions qopt) {
    return RegularizedMap(EffectiveOscillator::radial(potential, L), eopt, qopt);
}

RegularizedMap RegularizedMap::clairaut(const RadialPotential& potential, double L,
                                        EffectiveOptions eopt, QuadratureOptions qopt) {
    return RegularizedMap(EffectiveOscillator::clairaut(potential, L), eopt, qopt);
}

bool RegularizedMap::admissible(double H) const { return orbita::admissible(analysis_, H); }

TurningPoints RegularizedMap::turning_points(double H) const {
    return orbita::turning_points(osc_, analysis_, H, eopt_);
}

namespace {

/// h derivatives plus magnitude bounds used as rounding-noise floors for
/// the cancellation-prone combinations.
struct EvalEx {
    double h, hp, hpp, hppp, dLh, dLhp;
    double hpp_abs, hppp_abs, dLh_abs, dLhp_abs;
};

} // namespace

RegularizedMap::HValues RegularizedMap::h_values(double s) const {
    const auto& c = analysis_.circ;
    const double xi = s - c.s0;
    HValues v{};
    if (std::fabs(xi) < series_radius_) {
        const int M = static_cast<int>(gc_.size()) - 1;
        double g = 0.0, g1 = 0.0, g2 = 0.0, g3 = 0.0, u = 0.0, u1 = 0.0;
        for (int j = M; j >= 0; --j) {
            g = g * xi + gc_[j];
            u = u * xi + uc_[j];
            if (j >= 1) {
                g1 = g1 * xi + j * gc_[j];
                u1 = u1 * xi + j * uc_[j];
            }
            if (j >= 2)
                g2 = g2 * xi + j * (j - 1.0) * gc_[j];
            if (j >= 3)
                g3 = g3 * xi + j * (j - 1.0) * (j - 2.0) * gc_[j];
        }
        v.h = xi * g;
        v.hp = g + xi * g1;
        v.hpp = 2.0 * g1 + xi * g2;
        v.hppp = 3.0 * g2 + xi * g3;
        const double dLh_shift = xi * u / (2.0 * g);
        const double dLhp_shift = (u + xi * u1) / (2.0 * g) - xi * u * g1 / (2.0 * g * g);
        v.dLh = dLh_shift - v.hp * c.ds0_dL;
        v.dLhp = dLhp_shift - v.hpp * c.ds0_dL;
        return v;
    }
    const double sg = xi > 0.0 ? 1.0 : -1.0;
    const double omega = std::max(osc_.W(s, 0) + c.omega0, 1e-300);
    const double o1 = osc_.W(s, 1);
    const double o2 = osc_.W(s, 2);
    const double o3 = osc_.W(s, 3);
    const double sq = std::sqrt(omega);
    const double k = osc_.k();
    const double L = osc_.L();
    const double dLomega = L * std::pow(s, 2.0 * k) - L * std::pow(c.s0, 2.0 * k);
    const double dLo1 = 2.0 * k * L * std::pow(s, 2.0 * k - 1.0);

    v.h = sg * sq;
    v.hp = sg * o1 / (2.0 * sq);
    v.hpp = sg * (2.0 * omega * o2 - o1 * o1) / (4.0 * omega * sq);
    v.hppp = sg * (4.0 * omega * omega * o3 - 6.0 * omega * o1 * o2 + 3.0 * o1 * o1 * o1) /
             (8.0 * omega * omega * sq);
    v.dLh = sg * dLomega / (2.0 * sq);
    v.dLhp = sg * (2.0 * omega * dLo1 - o1 * dLomega) / (4.0 * omega * sq);
    return v;
}

double RegularizedMap::h_only(double s) const {
    const auto& c = analysis_.circ;
    const double xi = s - c.s0;
    if (std::fabs(xi) < series_radius_) {
        double g = 0.0;
        for (int j = static_cast<int>(gc_.size()) - 1; j >= 0; --j)
            g = g * xi + gc_[j];
        return xi * g;
    }
    const double sg = xi > 0.0 ? 1.0 : -1.0;
    const double omega = std::max(osc_.W(s, 0) + c.omega0, 0.0);
    return sg * std::sqrt(omega);
}

namespace {

EvalEx eval_extended(const RegularizedMap& map, const EffectiveOscillator& osc,
                     const CircularData& c, double series_radius, double s) {
    EvalEx e{};
    const RegularizedMap::HValues v = map.h_values(s);
    e.h = v.h;
    e.hp = v.hp;
    e.hpp = v.hpp;
    e.hppp = v.hppp;
    e.dLh = v.dLh;
    e.dLhp = v.dLhp;

    const double xi = s - c.s0;
    if (std::fabs(xi) < series_radius) {
        e.hpp_abs = std::fabs(v.hpp);
        e.hppp_abs = std::fabs(v.hppp);
        e.dLh_abs = std::fabs(v.dLh);
        e.dLhp_abs = std::fabs(v.dLhp);
        return e;
    }
    const double omega = std::max(osc.W(s, 0) + c.omega0, 1e-300);
    const double omega_mag = std::fabs(osc.W(s, 0)) + std::fabs(c.omega0);
    const double o1 = osc.W(s, 1);
    const double o2 = osc.W(s, 2);
    const double o3 = osc.W(s, 3);
    const double sq = std::sqrt(omega);
    const double k = osc.k();
    const double L = osc.L();
    const double dLomega_mag = L * std::pow(s, 2.0 * k) + L * std::pow(c.s0, 2.0 * k);
    const double dLo1 = 2.0 * k * L * std::pow(s, 2.0 * k - 1.0);

    e.hpp_abs = (2.0 * omega_mag * std::fabs(o2) + o1 * o1) / (4.0 * omega * sq);
    e.hppp_abs = (4.0 * omega_mag * omega_mag * std::fabs(o3) + 6.0 * omega_mag * std::fabs(o1 * o2) +
                  3.0 * std::fabs(o1 * o1 * o1)) /
                 (8.0 * omega * omega * sq);
    e.dLh_abs = dLomega_mag / (2.0 * sq);
    e.dLhp_abs = (2.0 * omega_mag * std::fabs(dLo1) + std::fabs(o1) * dLomega_mag) / (4.0 * omega * sq);
    return e;
}

} // namespace

double RegularizedMap::invert(double y, double lo, double hi, double guess, double A) const {
    double a = lo, b = hi;
    double s = std::clamp(guess, lo, hi);
    for (int it = 0; it < 100; ++it) {
        const double f = h_only(s) - y;
        if (std::fabs(f) <= 3.0 * kEps * A)
            return s;
        if (f < 0.0)
            a = s;
        else
            b = s;
        const double hp = h_values(s).hp;
        double next = hp > 0.0 ? s - f / hp : 0.5 * (a + b);
        if (!(next > a && next < b))
            next = 0.5 * (a + b);
        if (std::fabs(next - s) <= 2.0 * kEps * (std::fabs(s) + std::fabs(analysis_.circ.s0)))
            return next;
        s = next;
    }
    throw ConvergenceError("h_inverse: no convergence for y = " + std::to_string(y));
}

double RegularizedMap::h_inverse(double y, double H) const {
    const TurningPoints tp = turning_points(H);
    return invert(y, tp.s_minus, tp.s_plus, analysis_.circ.s0, std::sqrt(H + omega0()));
}

// The common adaptive driver: Gauss-Legendre over [theta_lo, theta_hi] with
// one inversion per node, doubling the order until two passes agree. The
// integrand returns (value, rounding magnitude); the accumulated magnitude
// supplies an absolute noise floor so that identically-vanishing integrals
// (isochronous wells) terminate.
template <typename G>
double RegularizedMap::integrate_theta(double H, double theta_lo, double theta_hi, G&& g) const {
    if (!admissible(H)) {
        std::ostringstream msg;
        msg << "time map: H = " << H << " outside admissible window (" << -omega0() << ", " << H0() << ")";
        throw DomainError(msg.str());
    }
    if (!(theta_hi > theta_lo))
        return 0.0;
    const double E = H + omega0();
    const double A = std::sqrt(E);
    const TurningPoints tp = turning_points(H);
    const auto& c = analysis_.circ;

    double prev = std::numeric_limits<double>::quiet_NaN();
    for (int order = qopt_.base_order;; order *= 2) {
        const auto& rule = gauss_legendre(order);
        const double mid = 0.5 * (theta_lo + theta_hi);
        const double half = 0.5 * (theta_hi - theta_lo);
        double acc = 0.0, mag = 0.0;
        double s_guess = tp.s_minus;
        for (int i = 0; i < order; ++i) {
            const double theta = mid + half * rule.nodes[i];
            const double y = A * std::sin(theta);
            const double s = invert(y, tp.s_minus, tp.s_plus, s_guess, A);
            s_guess = s;
            const EvalEx e = eval_extended(*this, osc_, c, series_radius_, s);
            const auto [value, noise] = g(e, s, std::cos(theta));
            acc += rule.weights[i] * value;
            mag += rule.weights[i] * std::fabs(noise);
        }
        const double I = half * acc;
        const double floor = 32.0 * kEps * half * mag + 1e-300;
        if (!std::isnan(prev)) {
            const double diff = std::fabs(I - prev);
            if (diff <= qopt_.rel_target * std::fabs(I) + floor)
                return I;
            if (2 * order > qopt_.max_order) {
                if (diff <= qopt_.disagree_tol * std::fabs(I) + floor)
                    return I;
                std::ostringstream msg;
                msg << "quadrature non-convergence at H = " << H << ", L = " << osc_.L()
                    << ": refinements " << order / 2 << "/" << order << " disagree by "
                    << diff / std::max(std::fabs(I), 1e-300) << " rel";
                throw ConvergenceError(msg.str());
            }
        }
        prev = I;
    }
}

double RegularizedMap::period(double H) const {
    return kSqrt2 * integrate_theta(H, -M_PI_2, M_PI_2, [](const EvalEx& e, double, double) {
        const double v = 1.0 / e.hp;
        return std::pair{v, std::fabs(v)};
    });
}

namespace {

// integrand pieces of dT/dH and of the dT/dL tail, with noise magnitudes
inline std::pair<double, double> dH_piece(const EvalEx& e, double ct) {
    const double p5 = std::pow(e.hp, 5);
    const double v = (3.0 * e.hpp * e.hpp - e.hp * e.hppp) * ct * ct / p5;
    const double n = (3.0 * e.hpp_abs * e.hpp_abs + e.hp * e.hppp_abs) * ct * ct / p5;
    return {v, n};
}

inline std::pair<double, double> dL_tail_piece(const EvalEx& e) {
    const double p3 = e.hp * e.hp * e.hp;
    const double v = (e.hpp * e.dLh - e.hp * e.dLhp) / p3;
    const double n = (e.hpp_abs * e.dLh_abs + std::fabs(e.hpp * e.dLh) + e.hp * e.dLhp_abs) / p3;
    return {v, n};
}

} // namespace

double RegularizedMap::dH_period(double H) const {
    return integrate_theta(H, -M_PI_2, M_PI_2, [](const EvalEx& e, double, double ct) {
               return dH_piece(e, ct);
           }) /
           kSqrt2;
}

std::pair<double, double> RegularizedMap::d_period(double H) const {
    const double dH = dH_period(H);
    // dT/dL in one quadrature: the omega0'(L) dT/dH part and the tail cancel
    // pointwise in the degenerate (isochronous) wells, which a difference of
    // separately converged integrals would not reproduce.
    const auto& c = analysis_.circ;
    const double w0p = -osc_.L() * std::pow(c.s0, 2.0 * osc_.k());
    const double dL =
        integrate_theta(H, -M_PI_2, M_PI_2, [w0p](const EvalEx& e, double, double ct) {
            const auto [a, na] = dH_piece(e, ct);
            const auto [b, nb] = dL_tail_piece(e);
            return std::pair{w0p * a / kSqrt2 + kSqrt2 * b,
                             std::fabs(w0p) * na / kSqrt2 + kSqrt2 * nb};
        });
    return {dH, dL};
}

double RegularizedMap::apsidal_dL(double H) const {
    // d/dL of L * T_Omega for the Clairaut oscillator, fused the same way:
    // P + L dP/dL vanishes pointwise for the isochronous wells.
    const auto& c = analysis_.circ;
    const double L = osc_.L();
    const double w0p = -L * std::pow(c.s0, 2.0 * osc_.k());
    return integrate_theta(H, -M_PI_2, M_PI_2, [w0p, L](const EvalEx& e, double, double ct) {
        const auto [a, na] = dH_piece(e, ct);
        const auto [b, nb] = dL_tail_piece(e);
        const double v = kSqrt2 / e.hp + L * (w0p * a / kSqrt2 + kSqrt2 * b);
        const double n = kSqrt2 / e.hp + L * (std::fabs(w0p) * na / kSqrt2 + kSqrt2 * nb);
        return std::pair{v, n};
    });
}

double RegularizedMap::area(double H) const {
    const double E = H + omega0();
    return 2.0 * kSqrt2 * E *
           integrate_theta(H, -M_PI_2, M_PI_2, [](const EvalEx& e, double, double ct) {
               const double v = ct * ct / e.hp;
               return std::pair{v, std::fabs(v)};
           });
}

double RegularizedMap::time_from_pericenter(double H, double s) const {
    const double E = H + omega0();
    const double A = std::sqrt(E);
    const double y = std::clamp(h_only(s) / A, -1.0, 1.0);
    const double theta_star = std::asin(y);
    if (theta_star <= -M_PI_2)
        return 0.0;
    return integrate_theta(H, -M_PI_2, theta_star, [](const EvalEx& e, double, double) {
               const double v = 1.0 / e.hp;
               return std::pair{v, std::fabs(v)};
           }) /
           kSqrt2;
}

double RegularizedMap::angle_from_pericenter(double H, double s) const {
    const double E = H + omega0();
    const double A = std::sqrt(E);
    const double y = std::clamp(h_only(s) / A, -1.0, 1.0);
    const double theta_star = std::asin(y);
    if (theta_star <= -M_PI_2)
        return 0.0;
    const double L = osc_.L();
    return integrate_theta(H, -M_PI_2, theta_star, [L](const EvalEx& e, double sv, double) {
               const double v = L / (sv * sv * e.hp);
               return std::pair{v, std::fabs(v)};
           }) /
           kSqrt2;
}

CircularLimits RegularizedMap::circular_limits() const {
    const auto& c = analysis_.circ;
    CircularLimits out;
    const double om2 = c.omega2;
    out.T = 2.0 * M_PI / std::sqrt(om2);
    const double om2_72 = std::pow(om2, 3.5);
    out.dT_dH = M_PI * c.sigma0 / (12.0 * om2_72);
    const double k = osc_.k();
    const double L = osc_.L();
    const double s0 = c.s0;
    out.dT_dL = -M_PI * L * std::pow(s0, 2.0 * k - 2.0) / (12.0 * om2_72) *
                (s0 * s0 * c.sigma0 - 24.0 * k * om2 * c.omega3 * s0 + 24.0 * k * (2.0 * k - 1.0) * om2 * om2);
    return out;
}

TimeMapValues nondegeneracy(const RadialPotential& potential, double H, double L,
                            const EffectiveOptions& eopt, const QuadratureOptions& qopt) {
    const RegularizedMap rad = RegularizedMap::radial(potential, L, eopt, qopt);
    const RegularizedMap cla = RegularizedMap::clairaut(potential, L, eopt, qopt);
    TimeMapValues out;
    out.T = rad.period(H);
    const auto [dTH, dTL] = rad.d_period(H);
    out.dT_dH = dTH;
    out.dT_dL = dTL;
    out.P = cla.period(H);
    out.Theta = L * out.P;
    out.dTheta_dH = L * cla.dH_period(H);
    out.dTheta_dL = cla.apsidal_dL(H);
    out.D = out.dT_dH * out.dTheta_dL - out.dT_dL * out.dTheta_dH;
    return out;
}

double apsidal_angle(const RadialPotential& potential, double H, double L,
                     const EffectiveOptions& eopt, const QuadratureOptions& qopt) {
    return L * RegularizedMap::clairaut(potential, L, eopt, qopt).period(H);
}

ScalingReduction scaling_reduce(double alpha, double kappa, double H, double L,
                                const EffectiveOptions& eopt, const QuadratureOptions& qopt) {
    const RadialPotential pot = RadialPotential::homogeneous(kappa, alpha);
    const double mu = std::pow(L, 2.0 * alpha / (2.0 - alpha));
    const double nu = std::pow(L, (2.0 + alpha) / (2.0 - alpha));
    ScalingReduction out;
    out.H_reduced = H * mu;
    out.L_reduced = 1.0;
    const TimeMapValues at = nondegeneracy(pot, H, L, eopt, qopt);
    const TimeMapValues red = nondegeneracy(pot, out.H_reduced, 1.0, eopt, qopt);
    out.identities.push_back({"T-scaling", at.T, nu * red.T});
    out.identities.push_back({"P-scaling", at.P, red.P / L});
    out.identities.push_back(
        {"dT_dL", at.dT_dL, ((2.0 + alpha) * at.T + 2.0 * alpha * H * at.dT_dH) / ((2.0 - alpha) * L)});
    out.identities.push_back(
        {"dTheta_dL", at.dTheta_dL, (2.0 * alpha / (2.0 - alpha)) * (H / L) * at.dTheta_dH});
    out.identities.push_back(
        {"D-shortcut", at.D, -((2.0 + alpha) / (2.0 - alpha)) * at.T * at.dTheta_dH / L});
    return out;
}

ScalingReduction scaling_reduce_logarithmic(double kappa, double H, double L,
                                            const EffectiveOptions& eopt, const QuadratureOptions& qopt) {
    const RadialPotential pot = RadialPotential::logarithmic(kappa);
    ScalingReduction out;
    out.H_reduced = H - kappa * std::log(L);
    out.L_reduced = 1.0;
    const TimeMapValues at = nondegeneracy(pot, H, L, eopt, qopt);
    const TimeMapValues red = nondegeneracy(pot, out.H_reduced, 1.0, eopt, qopt);
    out.identities.push_back({"T-scaling", at.T, L * red.T});
    out.identities.push_back({"P-scaling", at.P, red.P / L});
    out.identities.push_back({"dT_dL", at.dT_dL, (at.T - kappa * at.dT_dH) / L});
    out.identities.push_back({"dTheta_dL", at.dTheta_dL, -(kappa / L) * at.dTheta_dH});
    out.identities.push_back({"D-shortcut", at.D, -at.T * at.dTheta_dH / L});
    return out;
}

SignTriple sign_table(double alpha) {
    if (!(alpha < 2.0) || alpha == -2.0 || alpha == 0.0 || alpha == 1.0)
        throw ParameterError("sign_table: requires alpha < 2 with alpha outside {-2, 0, 1}");
    SignTriple s;
    s.dTheta_dH = (alpha < -2.0 || alpha > 1.0) ? +1 : -1;
    // dTheta_dL = (2 alpha/(2-alpha)) (H/L) dTheta_dH, and the admissible
    // energies satisfy H < 0 for alpha in (0,2) but H > 0 for alpha < 0
    // (the well bottom sits above zero there).
    const int sign_H = alpha > 0.0 ? -1 : +1;
    const int sign_pref = alpha > 0.0 ? +1 : -1;
    s.dTheta_dL = sign_pref * sign_H * s.dTheta_dH;
    s.D = alpha < 1.0 ? +1 : -1;
    return s;
}

SignTriple sign_table_logarithmic() { return SignTriple{-1, +1, +1}; }

MonotonicityReport monotonicity_certificate(const RadialPotential& potential, double L, double H_probe,
                                            const EffectiveOptions& eopt, const QuadratureOptions& qopt) {
    (void)qopt;
    const EffectiveOscillator osc = EffectiveOscillator::radial(potential, L);
    const OscillatorAnalysis analysis = analyze(osc, eopt);
    const auto& c = analysis.circ;

    MonotonicityReport rep;
    if (std::isnan(H_probe)) {
        if (std::isfinite(analysis.H0))
            H_probe = -c.omega0 + 0.99 * (analysis.H0 + c.omega0);
        else
            H_probe = -c.omega0 + 9.0 * std::max(std::fabs(c.omega0), c.omega2 * c.s0 * c.s0);
    }
    rep.H_probe = H_probe;
    const TurningPoints tp = turning_points(osc, analysis, H_probe, eopt);

    // Schaaf (i): 5 W'''^2 - 3 W'' W'''' > 0 on (s0, s+], geometric grid.
    const int n = 200;
    const double ratio = tp.s_plus / c.s0;
    auto grid_point = [&](int i) { return c.s0 * std::pow(ratio, static_cast<double>(i) / n); };
    rep.schaaf_i_min = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= n; ++i) {
        const double s = grid_point(i);
        const double w2 = osc.W(s, 2), w3 = osc.W(s, 3), w4 = osc.W(s, 4);
        rep.schaaf_i_min = std::min(rep.schaaf_i_min, 5.0 * w3 * w3 - 3.0 * w2 * w4);
    }
    rep.schaaf_i_pass = rep.schaaf_i_min > 0.0;

    // Schaaf (ii): W' W''' < 0 at each interior zero of W'' (vacuous if none).
    rep.schaaf_ii_max = -std::numeric_limits<double>::infinity();
    rep.schaaf_ii_points = 0;
    double s_prev = c.s0;
    double w2_prev = c.omega2;
    for (int i = 1; i <= n; ++i) {
        const double s = grid_point(i);
        const double w2 = osc.W(s, 2);
        if (w2_prev * w2 < 0.0) {
            double a = s_prev, b = s, wa = w2_prev;
            for (int j = 0; j < 80; ++j) {
                const double m = 0.5 * (a + b);
                const double wm = osc.W(m, 2);
                if (wa * wm <= 0.0)
                    b = m;
                else {
                    a = m;
                    wa = wm;
                }
            }
            const double z = 0.5 * (a + b);
            rep.schaaf_ii_max = std::max(rep.schaaf_ii_max, osc.W(z, 1) * osc.W(z, 3));
            ++rep.schaaf_ii_points;
        }
        s_prev = s;
        w2_prev = w2;
    }
    rep.schaaf_ii_pass = rep.schaaf_ii_points == 0 || rep.schaaf_ii_max < 0.0;

    // Chicone's expression on the orbit range (sign only; vanishes at s0).
    rep.chicone_min = std::numeric_limits<double>::infinity();
    for (int i = 1; i < n; ++i) {
        const double s = tp.s_minus + (tp.s_plus - tp.s_minus) * i / n;
        const double om = osc.W(s, 0) + c.omega0;
        const double o1 = osc.W(s, 1), o2 = osc.W(s, 2), o3 = osc.W(s, 3);
        rep.chicone_min =
            std::min(rep.chicone_min, 6.0 * om * o2 * o2 - 3.0 * o1 * o1 * o2 - 2.0 * om * o1 * o3);
    }
    rep.pass = rep.schaaf_i_pass && rep.schaaf_ii_pass;
    return rep;
}

LJCircularSigns lj_circular_sign(double varsigma, double sigma, double L, const EffectiveOptions& eopt) {
    const RadialPotential pot = RadialPotential::lennard_jones(varsigma, sigma);
    const RegularizedMap rad = RegularizedMap::radial(pot, L, eopt);
    const RegularizedMap cla = RegularizedMap::clairaut(pot, L, eopt);
    const CircularLimits lr = rad.circular_limits();
    const CircularLimits lc = cla.circular_limits();
    LJCircularSigns out;
    out.lim_dT_dH = lr.dT_dH;
    out.lim_dT_dL = lr.dT_dL;
    out.lim_dTheta_dH = L * lc.dT_dH;
    out.lim_dTheta_dL = lc.T + L * lc.dT_dL;
    out.lim_D = out.lim_dT_dH * out.lim_dTheta_dL - out.lim_dT_dL * out.lim_dTheta_dH;
    out.sign_dT_dH = sign_of(out.lim_dT_dH);
    out.sign_dT_dL = sign_of(out.lim_dT_dL);
    out.sign_dTheta_dH = sign_of(out.lim_dTheta_dH);
    out.sign_dTheta_dL = sign_of(out.lim_dTheta_dL);
    out.sign_D = sign_of(out.lim_D);
    return out;
}

RelativisticKepler relativistic_kepler(double kappa, double c, double H, double L) {
    if (!(kappa > 0.0) || !(c > 0.0))
        throw ParameterError("relativistic_kepler: requires kappa > 0 and c > 0");
    if (!(c * c * L * L > kappa * kappa))
        throw ParameterError("relativistic_kepler: requires c^2 L^2 > kappa^2 (got c^2 L^2 = " +
                             std::to_string(c * c * L * L) + ")");
    if (!(std::fabs(H) < c * c))
        throw ParameterError("relativistic_kepler: requires |H| < c^2");
    RelativisticKepler out;
    const double c3 = c * c * c;
    // factored form of c^4 - H^2; the direct difference loses all digits
    // when H approaches c^2
    const double den = (c * c - H) * (c * c + H);
    out.T = 2.0 * M_PI * kappa * c3 / std::pow(den, 1.5);
    const double root = std::sqrt(1.0 - kappa * kappa / (c * c * L * L));
    out.Theta = 2.0 * M_PI / root;
    out.dT_dH = 6.0 * M_PI * kappa * c3 * H / std::pow(den, 2.5);
    out.dTheta_dL = -2.0 * M_PI * kappa * kappa / (c * c * L * L * L * root * root * root);
    out.D = out.dT_dH * out.dTheta_dL;
    out.nondegenerate = out.D != 0.0;
    return out;
}

} // namespace orbita
