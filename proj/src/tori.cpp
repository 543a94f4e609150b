#include "orbita/tori.hpp"

#include "orbita/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace orbita {

namespace {

double wrap_2pi(double a) {
    const double two_pi = 2.0 * M_PI;
    double w = std::fmod(a, two_pi);
    if (w < 0.0)
        w += two_pi;
    return w;
}

} // namespace

double area(const RadialPotential& potential, double H, double L,
            const EffectiveOptions& eopt, const QuadratureOptions& qopt) {
    return RegularizedMap::radial(potential, L, eopt, qopt).area(H);
}

ActionAngleChart angles(const RadialPotential& potential, double r, double rdot, double theta,
                        double L, const EffectiveOptions& eopt, const QuadratureOptions& qopt) {
    const RegularizedMap rad = RegularizedMap::radial(potential, L, eopt, qopt);
    const double H = 0.5 * rdot * rdot + rad.oscillator().W(r, 0);
    if (!rad.admissible(H)) {
        std::ostringstream msg;
        msg << "angles: state (r = " << r << ", rdot = " << rdot << ") has H = " << H
            << " outside the admissible window";
        throw DomainError(msg.str());
    }
    const TurningPoints tp = rad.turning_points(H);
    const double rc = std::clamp(r, tp.s_minus, tp.s_plus);

    const double T = rad.period(H);
    const double Theta = apsidal_angle(potential, H, L, eopt, qopt);
    const double t_asc = rad.time_from_pericenter(H, rc);
    const double a_asc = rad.angle_from_pericenter(H, rc);

    const bool ascending = rdot > 0.0 || (rdot == 0.0 && r <= rad.circular().s0);
    ActionAngleChart out;
    out.mu = ascending ? t_asc : T - t_asc;
    if (out.mu >= T)
        out.mu -= T;
    const double swept = ascending ? a_asc : Theta - a_asc;
    out.psi = wrap_2pi(theta - swept);
    out.phi1 = 2.0 * M_PI * out.mu / T;
    out.phi2 = (Theta - 2.0 * M_PI) * out.mu / T + out.psi;
    out.area = rad.area(H);
    out.I1 = out.area / (2.0 * M_PI) + L;
    out.I2 = L;
    return out;
}

namespace {

struct TargetPair {
    double T;
    double Theta;
};

TorusSolution assemble_solution(const RadialPotential& potential, int n, int k, double tau, int ell,
                                double H, double L, const TargetPair& target,
                                const EffectiveOptions& eopt, const QuadratureOptions& qopt) {
    const TimeMapValues tm = nondegeneracy(potential, H, L, eopt, qopt);
    TorusSolution sol;
    sol.n = n;
    sol.k = k;
    sol.tau = tau;
    sol.ell = ell;
    sol.H = H;
    sol.L = L;
    sol.residual_T = std::fabs(tm.T - target.T) / target.T;
    sol.residual_Theta = std::fabs(tm.Theta - target.Theta) / target.Theta;
    sol.D = tm.D;
    sol.I2 = L;
    sol.I1 = RegularizedMap::radial(potential, L, eopt, qopt).area(H) / (2.0 * M_PI) + L;
    return sol;
}

// Damped Newton on F(H, L) = (T - T*, Theta - Theta*) with the analytic
// Jacobian. Steps that leave the admissible set are halved away.
std::pair<double, double> newton_2d(const RadialPotential& potential, const TargetPair& target,
                                    double H, double L, const EffectiveOptions& eopt,
                                    const QuadratureOptions& qopt) {
    auto norm = [&](const TimeMapValues& tm) {
        const double f1 = (tm.T - target.T) / target.T;
        const double f2 = (tm.Theta - target.Theta) / target.Theta;
        return std::sqrt(f1 * f1 + f2 * f2);
    };
    TimeMapValues tm = nondegeneracy(potential, H, L, eopt, qopt);
    double f = norm(tm);
    for (int it = 0; it < 60; ++it) {
        if (f < 1e-12)
            return {H, L};
        const double F1 = tm.T - target.T;
        const double F2 = tm.Theta - target.Theta;
        const double det = tm.dT_dH * tm.dTheta_dL - tm.dT_dL * tm.dTheta_dH;
        if (det == 0.0)
            throw ConvergenceError("find_torus: singular time-map Jacobian");
        const double dH = (-F1 * tm.dTheta_dL + F2 * tm.dT_dL) / det;
        const double dL = (-F2 * tm.dT_dH + F1 * tm.dTheta_dH) / det;
        double step = 1.0;
        bool accepted = false;
        while (step > 1e-8) {
            const double Hn = H + step * dH;
            const double Ln = L + step * dL;
            if (Ln > 0.0) {
                try {
                    const TimeMapValues next = nondegeneracy(potential, Hn, Ln, eopt, qopt);
                    const double fn = norm(next);
                    if (fn < f) {
                        H = Hn;
                        L = Ln;
                        tm = next;
                        f = fn;
                        accepted = true;
                        break;
                    }
                } catch (const Error&) {
                    // outside the admissible set; shrink
                }
            }
            step *= 0.5;
        }
        if (!accepted)
            throw ConvergenceError("find_torus: Newton stalled at residual " + std::to_string(f));
    }
    throw ConvergenceError("find_torus: Newton did not reach tolerance in 60 iterations");
}

} // namespace

TorusSolution find_torus(const RadialPotential& potential, double tau, int n, int k, int ell,
                         std::optional<std::pair<double, double>> seed,
                         const EffectiveOptions& eopt, const QuadratureOptions& qopt) {
    if (n < 1 || k < 1)
        throw ParameterError("find_torus: n and k must be positive integers");
    if (std::gcd(n, k) != 1)
        throw ParameterError("find_torus: n and k must be coprime, got (" + std::to_string(n) + ", " +
                             std::to_string(k) + ")");
    if (ell < 1)
        throw ParameterError("find_torus: ell must be >= 1");
    if (!(tau > 0.0))
        throw ParameterError("find_torus: tau must be positive");

    const TargetPair target{tau / (static_cast<double>(ell) * n), 2.0 * M_PI * k / n};

    if (seed) {
        const auto [H, L] = newton_2d(potential, target, seed->first, seed->second, eopt, qopt);
        return assemble_solution(potential, n, k, tau, ell, H, L, target, eopt, qopt);
    }

    const double alpha = potential.alpha();
    if (potential.family() != PotentialFamily::homogeneous || !(alpha > 0.0 && alpha < 2.0) ||
        alpha == 1.0)
        throw ParameterError("find_torus: a seed (H, L) is required outside the homogeneous family "
                             "with alpha in (0,2) \\ {1}");

    // Solvability interval for k/n: between 1/(2-alpha) and 1/sqrt(2-alpha).
    const double end_a = 1.0 / (2.0 - alpha);
    const double end_b = 1.0 / std::sqrt(2.0 - alpha);
    const double ratio = static_cast<double>(k) / n;
    const double lo = std::min(end_a, end_b), hi = std::max(end_a, end_b);
    if (!(ratio > lo && ratio < hi)) {
        std::ostringstream msg;
        msg << "find_torus: k/n = " << ratio << " outside the admissible interval (" << lo << ", " << hi
            << ") for alpha = " << alpha;
        throw InadmissibleRatioError(msg.str());
    }

    // Reduce to L = 1: Theta(H, L) = P(H L^{2a/(2-a)}, 1), so the apsidal
    // equation is one-dimensional and strictly monotone in the reduced energy.
    const RegularizedMap cla1 = RegularizedMap::clairaut(potential, 1.0, eopt, qopt);
    const double w0 = cla1.omega0();
    auto theta1 = [&](double h) { return cla1.period(h); };

    // Bracket on a logistic grid of E/w0 covering (0, 1).
    double h_lo = 0.0, h_hi = 0.0;
    {
        double t_prev = 0.0, f_prev = 0.0;
        bool have_prev = false, found = false;
        for (int i = 0; i <= 36 && !found; ++i) {
            const double x = -18.0 + 36.0 * i / 36.0;
            const double t = 1.0 / (1.0 + std::exp(-x));
            const double h = -w0 * (1.0 - t);
            const double f = theta1(h) - target.Theta;
            if (have_prev && f_prev * f <= 0.0) {
                h_lo = -w0 * (1.0 - t_prev);
                h_hi = -w0 * (1.0 - t);
                found = true;
            }
            t_prev = t;
            f_prev = f;
            have_prev = true;
        }
        if (!found)
            throw ConvergenceError("find_torus: apsidal target not bracketed (ratio numerically at an "
                                   "interval endpoint)");
    }

    double a = h_lo, b = h_hi;
    double fa = theta1(a) - target.Theta;
    double h = 0.5 * (a + b);
    for (int it = 0; it < 200; ++it) {
        const double fh = theta1(h) - target.Theta;
        if (std::fabs(fh) <= 1e-13 * target.Theta)
            break;
        if (fa * fh <= 0.0)
            b = h;
        else {
            a = h;
            fa = fh;
        }
        const double slope = cla1.d_period(h).first;
        double next = slope != 0.0 ? h - fh / slope : 0.5 * (a + b);
        if (!(next > std::min(a, b) && next < std::max(a, b)))
            next = 0.5 * (a + b);
        if (std::fabs(next - h) <= 1e-16 * std::fabs(h))
            break;
        h = next;
    }

    // Back out L from the radial period scaling, then polish in 2D.
    const RegularizedMap rad1 = RegularizedMap::radial(potential, 1.0, eopt, qopt);
    const double T1 = rad1.period(h);
    const double L_star = std::pow(target.T / T1, (2.0 - alpha) / (2.0 + alpha));
    const double H_star = h * std::pow(L_star, -2.0 * alpha / (2.0 - alpha));
    const auto [H, L] = newton_2d(potential, target, H_star, L_star, eopt, qopt);
    return assemble_solution(potential, n, k, tau, ell, H, L, target, eopt, qopt);
}

KamDeterminant kam_determinant(const RadialPotential& potential, double H, double L, double tau,
                               const EffectiveOptions& eopt, const QuadratureOptions& qopt) {
    KamDeterminant out;
    out.maps = nondegeneracy(potential, H, L, eopt, qopt);
    const double T = out.maps.T;
    out.det_DPhi = -2.0 * M_PI * tau * tau / (T * T * T) * out.maps.D;
    out.nondegenerate = out.det_DPhi != 0.0;
    return out;
}

} // namespace orbita
