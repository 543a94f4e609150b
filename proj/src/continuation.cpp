#include "orbita/continuation.hpp"

#include "orbita/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace orbita {

PerturbationModel PerturbationModel::uniform_drive(double tau, double epsilon, double e1, double e2) {
    if (!(tau > 0.0))
        throw ParameterError("uniform_drive: tau must be positive");
    const double norm = std::hypot(e1, e2);
    if (!(norm > 0.0))
        throw ParameterError("uniform_drive: direction must be nonzero");
    PerturbationModel m;
    m.kind = Kind::uniform_drive;
    m.tau = tau;
    m.epsilon = epsilon;
    m.e1 = e1 / norm;
    m.e2 = e2 / norm;
    return m;
}

PerturbationModel PerturbationModel::rotating_point_mass(double alpha, double mass) {
    if (!(alpha > 0.0 && alpha < 2.0) || alpha == 1.0)
        throw ParameterError("rotating_point_mass: alpha must lie in (0,2) with alpha != 1");
    if (!(mass >= 0.0 && mass < 1.0))
        throw ParameterError("rotating_point_mass: mass must lie in [0,1)");
    PerturbationModel m;
    m.kind = Kind::rotating_point_mass;
    m.tau = 2.0 * M_PI;
    m.epsilon = mass;
    m.alpha = alpha;
    return m;
}

PerturbationModel PerturbationModel::none_model(double tau) {
    PerturbationModel m;
    m.kind = Kind::none;
    m.tau = tau;
    return m;
}

void PerturbationModel::grad_U(double t, const double x[2], double g[2]) const {
    switch (kind) {
        case Kind::none:
            g[0] = g[1] = 0.0;
            return;
        case Kind::uniform_drive: {
            const double c = std::cos(2.0 * M_PI * t / tau);
            g[0] = c * e1;
            g[1] = c * e2;
            return;
        }
        case Kind::rotating_point_mass: {
            const double m = epsilon;
            const double beta = std::pow(1.0 - m, -1.0 / (alpha + 2.0));
            const double w1 = beta * std::cos(t) + x[0];
            const double w2 = beta * std::sin(t) + x[1];
            const double wn = std::hypot(w1, w2);
            if (wn < small_primary_guard)
                throw CollisionError("rotating_point_mass: within guard radius of the small primary");
            const double pref = 1.0 / ((1.0 - m) * std::pow(wn, alpha + 2.0));
            g[0] = beta * std::cos(t) - pref * w1;
            g[1] = beta * std::sin(t) - pref * w2;
            return;
        }
    }
}

void PerturbationModel::hess_U(double t, const double x[2], double h[4]) const {
    switch (kind) {
        case Kind::none:
        case Kind::uniform_drive:
            h[0] = h[1] = h[2] = h[3] = 0.0;
            return;
        case Kind::rotating_point_mass: {
            const double m = epsilon;
            const double beta = std::pow(1.0 - m, -1.0 / (alpha + 2.0));
            const double w1 = beta * std::cos(t) + x[0];
            const double w2 = beta * std::sin(t) + x[1];
            const double wn = std::hypot(w1, w2);
            if (wn < small_primary_guard)
                throw CollisionError("rotating_point_mass: within guard radius of the small primary");
            const double inv = 1.0 / ((1.0 - m) * std::pow(wn, alpha + 2.0));
            const double pull = (alpha + 2.0) / (wn * wn);
            h[0] = -inv * (1.0 - pull * w1 * w1);
            h[1] = inv * pull * w1 * w2;
            h[2] = h[1];
            h[3] = -inv * (1.0 - pull * w2 * w2);
            return;
        }
    }
}

ForceField perturbed_field(const RadialPotential& potential, const PerturbationModel& model) {
    ForceField base = central_field(potential);
    ForceField f;
    const double eps = model.epsilon;
    f.accel = [base, model, eps](double t, const double x[2], double a[2]) {
        base.accel(t, x, a);
        double g[2] = {0.0, 0.0};
        model.grad_U(t, x, g);
        a[0] += eps * g[0];
        a[1] += eps * g[1];
    };
    f.accel_jacobian = [base, model, eps](double t, const double x[2], double jac[4]) {
        base.accel_jacobian(t, x, jac);
        double h[4];
        model.hess_U(t, x, h);
        for (int i = 0; i < 4; ++i)
            jac[i] += eps * h[i];
    };
    f.has_jacobian = true;
    return f;
}

FlowWithMonodromy time_tau_map(const RadialPotential& potential, const PerturbationModel& model,
                               const CartesianState& z0, const IntegratorOptions& iopt) {
    CartesianState s = z0;
    s.t = 0.0;
    return flow_with_monodromy(perturbed_field(potential, model), s, model.tau, iopt);
}

std::vector<CartesianState> seed_grid(const RadialPotential& potential, const TorusSolution& torus,
                                      int N_lambda, int N_phi, const EffectiveOptions& eopt,
                                      const QuadratureOptions& qopt, const IntegratorOptions& iopt) {
    if (N_lambda < 1 || N_phi < 1)
        throw ParameterError("seed_grid: grid counts must be >= 1");
    const CartesianState z0 = torus_pericenter_state(potential, torus, eopt, qopt);
    const double T = torus.tau / (static_cast<double>(torus.ell) * torus.n);
    const Trajectory traj = integrate(central_field(potential), z0, T, iopt);

    std::vector<CartesianState> seeds;
    seeds.reserve(static_cast<std::size_t>(N_lambda) * N_phi);
    for (int j = 0; j < N_lambda; ++j) {
        const double lambda = T * j / N_lambda;
        const CartesianState base = traj.state_at(lambda);
        for (int i = 0; i < N_phi; ++i) {
            const double phi = (2.0 * M_PI / torus.k) * i / N_phi;
            const double c = std::cos(phi), s = std::sin(phi);
            CartesianState seed;
            seed.x1 = c * base.x1 - s * base.x2;
            seed.x2 = s * base.x1 + c * base.x2;
            seed.v1 = c * base.v1 - s * base.v2;
            seed.v2 = s * base.v1 + c * base.v2;
            seed.t = 0.0;
            seeds.push_back(seed);
        }
    }
    return seeds;
}

namespace {

double det4(const std::array<double, 16>& a) {
    double m[4][4];
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            m[i][j] = a[i * 4 + j];
    double det = 1.0;
    for (int c = 0; c < 4; ++c) {
        int piv = c;
        for (int r = c + 1; r < 4; ++r)
            if (std::fabs(m[r][c]) > std::fabs(m[piv][c]))
                piv = r;
        if (m[piv][c] == 0.0)
            return 0.0;
        if (piv != c) {
            std::swap(m[piv], m[c]);
            det = -det;
        }
        det *= m[c][c];
        for (int r = c + 1; r < 4; ++r) {
            const double f = m[r][c] / m[c][c];
            for (int j = c; j < 4; ++j)
                m[r][j] -= f * m[c][j];
        }
    }
    return det;
}

// Solve the 4x4 SPD system (A^T A + mu I) d = -A^T F by Gaussian elimination.
bool solve_damped(const std::array<double, 16>& A, const double F[4], double mu, double d[4]) {
    double N[4][5];
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            double acc = 0.0;
            for (int k = 0; k < 4; ++k)
                acc += A[k * 4 + i] * A[k * 4 + j];
            N[i][j] = acc + (i == j ? mu : 0.0);
        }
        double rhs = 0.0;
        for (int k = 0; k < 4; ++k)
            rhs += A[k * 4 + i] * F[k];
        N[i][4] = -rhs;
    }
    for (int c = 0; c < 4; ++c) {
        int piv = c;
        for (int r = c + 1; r < 4; ++r)
            if (std::fabs(N[r][c]) > std::fabs(N[piv][c]))
                piv = r;
        if (N[piv][c] == 0.0)
            return false;
        if (piv != c)
            for (int j = 0; j < 5; ++j)
                std::swap(N[piv][j], N[c][j]);
        for (int r = c + 1; r < 4; ++r) {
            const double f = N[r][c] / N[c][c];
            for (int j = c; j < 5; ++j)
                N[r][j] -= f * N[c][j];
        }
    }
    for (int i = 3; i >= 0; --i) {
        double acc = N[i][4];
        for (int j = i + 1; j < 4; ++j)
            acc -= N[i][j] * d[j];
        d[i] = acc / N[i][i];
    }
    return true;
}

int winding_number(const Trajectory& traj) {
    double acc = 0.0;
    CartesianState prev = traj.state(0);
    for (std::size_t i = 1; i < traj.size(); ++i) {
        const CartesianState s = traj.state(i);
        acc += std::atan2(prev.x1 * s.x2 - prev.x2 * s.x1, prev.x1 * s.x1 + prev.x2 * s.x2);
        prev = s;
    }
    return static_cast<int>(std::lround(acc / (2.0 * M_PI)));
}

double state_norm(const CartesianState& s) {
    return std::sqrt(s.x1 * s.x1 + s.x2 * s.x2 + s.v1 * s.v1 + s.v2 * s.v2);
}

// Distance between states minimized over a joint rotation of positions and
// velocities (closed form through the complex inner product).
double rotation_reduced_distance(const CartesianState& a, const CartesianState& b) {
    const std::complex<double> pa(a.x1, a.x2), wa(a.v1, a.v2);
    const std::complex<double> pb(b.x1, b.x2), wb(b.v1, b.v2);
    const std::complex<double> corr = std::conj(pa) * pb + std::conj(wa) * wb;
    const double q = std::norm(pa) + std::norm(pb) + std::norm(wa) + std::norm(wb) -
                     2.0 * std::abs(corr);
    return std::sqrt(std::max(q, 0.0));
}

} // namespace

CartesianState reflect_state(const CartesianState& s) { return {s.x1, -s.x2, s.v1, -s.v2, s.t}; }

namespace {

// Projections of the time-tau displacement P(z) - z onto an orthonormal
// complement of the torus tangent plane span{zdot, iz}. Zeros of this
// two-component field over the torus angles mark the orbits that survive
// the perturbation; the full Newton solve is started there.
struct BifurcationField {
    const RadialPotential* potential;
    const PerturbationModel* model;
    const ForceField* field;
    const Trajectory* torus_traj;  // one radial period of the torus
    double T;                      // radial period
    double phi_period;             // 2 pi / k
    bool reflect;
    const IntegratorOptions* iopt;

    CartesianState state_at(double lambda, double phi) const {
        lambda = std::fmod(lambda, T);
        if (lambda < 0.0)
            lambda += T;
        CartesianState base = torus_traj->state_at(lambda);
        if (reflect)
            base = reflect_state(base);
        const double c = std::cos(phi), s = std::sin(phi);
        CartesianState z;
        z.x1 = c * base.x1 - s * base.x2;
        z.x2 = s * base.x1 + c * base.x2;
        z.v1 = c * base.v1 - s * base.v2;
        z.v2 = s * base.v1 + c * base.v2;
        z.t = 0.0;
        return z;
    }

    bool eval(double lambda, double phi, double out[2]) const {
        const CartesianState z = state_at(lambda, phi);
        double F[4];
        try {
            const Trajectory traj = integrate(*field, z, model->tau, *iopt);
            const CartesianState zf = traj.state(traj.size() - 1);
            F[0] = zf.x1 - z.x1;
            F[1] = zf.x2 - z.x2;
            F[2] = zf.v1 - z.v1;
            F[3] = zf.v2 - z.v2;
        } catch (const Error&) {
            return false;
        }
        // tangents: the flow direction and the rotation generator
        double a[2];
        const double x[2] = {z.x1, z.x2};
        field->accel(0.0, x, a);
        double t1[4] = {z.v1, z.v2, a[0], a[1]};
        double t2[4] = {-z.x2, z.x1, -z.v2, z.v1};
        auto dot = [](const double* p, const double* q) {
            return p[0] * q[0] + p[1] * q[1] + p[2] * q[2] + p[3] * q[3];
        };
        auto normalize = [&](double* p) {
            const double n = std::sqrt(dot(p, p));
            for (int i = 0; i < 4; ++i)
                p[i] /= n;
        };
        normalize(t1);
        const double c12 = dot(t2, t1);
        for (int i = 0; i < 4; ++i)
            t2[i] -= c12 * t1[i];
        normalize(t2);
        // complement basis by Gram-Schmidt over the canonical directions
        double n1[4] = {0, 0, 0, 0}, n2[4] = {0, 0, 0, 0};
        int found = 0;
        for (int c = 0; c < 4 && found < 2; ++c) {
            double v[4] = {0, 0, 0, 0};
            v[c] = 1.0;
            const double p1 = dot(v, t1), p2 = dot(v, t2);
            for (int i = 0; i < 4; ++i)
                v[i] -= p1 * t1[i] + p2 * t2[i];
            if (found == 1) {
                const double q = dot(v, n1);
                for (int i = 0; i < 4; ++i)
                    v[i] -= q * n1[i];
            }
            const double n = std::sqrt(dot(v, v));
            if (n < 1e-6)
                continue;
            for (int i = 0; i < 4; ++i)
                v[i] /= n;
            if (found == 0)
                std::copy(v, v + 4, n1);
            else
                std::copy(v, v + 4, n2);
            ++found;
        }
        out[0] = dot(n1, F);
        out[1] = dot(n2, F);
        return true;
    }

    // 2D Newton with finite-difference Jacobian on the angle torus.
    bool solve(double& lambda, double& phi) const {
        const double dl = 1e-4 * T, dp = 1e-4 * phi_period;
        for (int it = 0; it < 14; ++it) {
            double B[2], Bl[2], Bp[2];
            if (!eval(lambda, phi, B) || !eval(lambda + dl, phi, Bl) || !eval(lambda, phi + dp, Bp))
                return false;
            const double J11 = (Bl[0] - B[0]) / dl, J12 = (Bp[0] - B[0]) / dp;
            const double J21 = (Bl[1] - B[1]) / dl, J22 = (Bp[1] - B[1]) / dp;
            const double det = J11 * J22 - J12 * J21;
            if (det == 0.0)
                return false;
            double step_l = (-B[0] * J22 + B[1] * J12) / det;
            double step_p = (-B[1] * J11 + B[0] * J21) / det;
            // keep steps below a quarter of each period
            const double cap = std::max(std::fabs(step_l) / (0.25 * T),
                                        std::fabs(step_p) / (0.25 * phi_period));
            if (cap > 1.0) {
                step_l /= cap;
                step_p /= cap;
            }
            lambda += step_l;
            phi += step_p;
            if (std::fabs(step_l) < 1e-12 * T && std::fabs(step_p) < 1e-12 * phi_period)
                return true;
        }
        return true;  // hand whatever we reached to the full Newton
    }
};

} // namespace

std::optional<PeriodicOrbit> newton_fixed_point(const RadialPotential& potential,
                                                const PerturbationModel& model,
                                                const CartesianState& seed, const NewtonOptions& nopt) {
    // Levenberg-Marquardt around the Newton system (M - I) d = -F. The
    // damping starts at mu = max(floor, scale*eps) and adapts both ways:
    // it must be allowed to drop well below (c eps)^2 - the square
    // of the torus-angle singular values of M - I - or those directions are
    // biased and the iteration creeps linearly; it must grow on rejection or
    // the quadratic terms amplified by 1/(c eps) take over the step.
    const double mu0 = std::max(nopt.tikhonov_floor, nopt.tikhonov_scale * std::fabs(model.epsilon));
    CartesianState z = seed;
    z.t = 0.0;

    const ForceField field = perturbed_field(potential, model);
    auto state_residual = [&](const CartesianState& s, double F[4]) {
        const Trajectory traj = integrate(field, s, model.tau, nopt.integrator);
        const CartesianState zf = traj.state(traj.size() - 1);
        F[0] = zf.x1 - s.x1;
        F[1] = zf.x2 - s.x2;
        F[2] = zf.v1 - s.v1;
        F[3] = zf.v2 - s.v2;
        return std::sqrt(F[0] * F[0] + F[1] * F[1] + F[2] * F[2] + F[3] * F[3]);
    };

    try {
        double F[4];
        double res = state_residual(z, F);
        double mu = mu0;
        int it = 0;
        int stagnant = 0;
        for (; it < nopt.max_iterations && res >= nopt.residual_tol; ++it) {
            const FlowWithMonodromy flow = time_tau_map(potential, model, z, nopt.integrator);
            std::array<double, 16> A = flow.monodromy;
            for (int i = 0; i < 4; ++i)
                A[i * 4 + i] -= 1.0;
            bool accepted = false;
            const double res_before = res;
            for (int inner = 0; inner < 20 && !accepted; ++inner) {
                double d[4];
                if (!solve_damped(A, F, mu, d))
                    return std::nullopt;
                // cap single steps: a jump across the torus lands on an
                // unrelated orbit even when it reduces |F|
                const double dn = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2] + d[3] * d[3]);
                const double cap = nopt.step_cap *
                                   std::max(1.0, std::sqrt(z.x1 * z.x1 + z.x2 * z.x2 +
                                                           z.v1 * z.v1 + z.v2 * z.v2));
                if (dn > cap)
                    for (double& di : d)
                        di *= cap / dn;
                CartesianState trial = z;
                trial.x1 += d[0];
                trial.x2 += d[1];
                trial.v1 += d[2];
                trial.v2 += d[3];
                double Ft[4] = {0.0, 0.0, 0.0, 0.0};
                double trial_res = std::numeric_limits<double>::infinity();
                try {
                    trial_res = state_residual(trial, Ft);
                } catch (const CollisionError&) {
                }
                if (trial_res < res) {
                    z = trial;
                    res = trial_res;
                    std::copy(Ft, Ft + 4, F);
                    mu = std::max(nopt.tikhonov_floor, mu / 4.0);
                    accepted = true;
                } else {
                    mu *= 8.0;
                    if (mu > 1e8)
                        break;
                }
            }
            if (!accepted)
                return std::nullopt;
            stagnant = res > (1.0 - 3e-3) * res_before ? stagnant + 1 : 0;
            if (stagnant >= 4)
                return std::nullopt;
        }
        if (res >= nopt.residual_tol)
            return std::nullopt;

        const FlowWithMonodromy flow = time_tau_map(potential, model, z, nopt.integrator);

        PeriodicOrbit orbit;
        orbit.epsilon = model.epsilon;
        orbit.z0 = z;
        orbit.residual = res;
        orbit.monodromy = flow.monodromy;
        orbit.monodromy_det = det4(flow.monodromy);
        orbit.newton_iterations = it;
        const Trajectory traj = integrate(field, z, model.tau, nopt.integrator);
        orbit.winding_k = winding_number(traj);
        return orbit;
    } catch (const CollisionError&) {
        return std::nullopt;
    } catch (const ConvergenceError&) {
        return std::nullopt;
    }
}

double distance_to_torus(const RadialPotential& potential, const TorusSolution& torus,
                         const CartesianState& z, bool reflect, const EffectiveOptions& eopt,
                         const QuadratureOptions& qopt, const IntegratorOptions& iopt) {
    const CartesianState peri = torus_pericenter_state(potential, torus, eopt, qopt);
    const double T = torus.tau / (static_cast<double>(torus.ell) * torus.n);
    const Trajectory traj = integrate(central_field(potential), peri, T, iopt);
    auto at = [&](double lambda) {
        lambda = std::fmod(lambda, T);
        if (lambda < 0.0)
            lambda += T;
        CartesianState s = traj.state_at(lambda);
        if (reflect)
            s = reflect_state(s);
        return rotation_reduced_distance(s, z);
    };
    // coarse scan, then golden-section refinement in the time shift; the
    // sample granularity otherwise floors the measurement near T/n_samples
    const int n_samples = 256;
    double best = std::numeric_limits<double>::infinity();
    double best_lambda = 0.0;
    for (int i = 0; i < n_samples; ++i) {
        const double lambda = T * i / n_samples;
        const double d = at(lambda);
        if (d < best) {
            best = d;
            best_lambda = lambda;
        }
    }
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = best_lambda - T / n_samples, b = best_lambda + T / n_samples;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = at(x1), f2 = at(x2);
    for (int i = 0; i < 60; ++i) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = at(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = at(x2);
        }
    }
    return std::min({best, f1, f2});
}

SurveyResult survey(const RadialPotential& potential, const PerturbationModel& model,
                    const TorusSolution& torus, int N_lambda, int N_phi, const NewtonOptions& nopt,
                    double dedup_rel_threshold, bool reflect, const EffectiveOptions& eopt,
                    const QuadratureOptions& qopt) {
    if (N_lambda < 1 || N_phi < 1)
        throw ParameterError("survey: grid counts must be >= 1");

    // One radial period of the (unreflected) torus; the bifurcation field
    // applies the reflection itself.
    const CartesianState peri = torus_pericenter_state(potential, torus, eopt, qopt);
    const double T = torus.tau / (static_cast<double>(torus.ell) * torus.n);
    const Trajectory torus_traj = integrate(central_field(potential), peri, T, nopt.integrator);
    const int n_samples = 512;

    SurveyResult out;
    const double scale = state_norm(peri);
    std::vector<std::vector<CartesianState>> orbit_samples;

    auto try_seed = [&](const CartesianState& seed, double lambda, double phi) {
        ++out.attempts;
        auto orbit = newton_fixed_point(potential, model, seed, nopt);
        if (!orbit)
            return;
        orbit->seed_lambda = lambda;
        orbit->seed_phi = phi;
        ++out.converged;
        // Duplicate iff close to an accepted orbit under time shift + rotation.
        const Trajectory traj =
            integrate(perturbed_field(potential, model), orbit->z0, model.tau, nopt.integrator);
        for (const auto& samples : orbit_samples) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& s : samples)
                best = std::min(best, rotation_reduced_distance(s, orbit->z0));
            if (best < dedup_rel_threshold * scale)
                return;
        }
        std::vector<CartesianState> samples;
        samples.reserve(n_samples);
        for (int i = 0; i < n_samples; ++i)
            samples.push_back(traj.state_at(model.tau * i / n_samples));
        orbit_samples.push_back(std::move(samples));
        orbit->distance_to_torus =
            distance_to_torus(potential, torus, orbit->z0, reflect, eopt, qopt, nopt.integrator);
        out.orbits.push_back(*orbit);
    };

    // Zeros of the tangent-complement displacement field over the torus
    // angles seed the Newton runs; raw grid seeds are the fallback.
    const ForceField field = perturbed_field(potential, model);
    BifurcationField bf{&potential, &model, &field,     &torus_traj,
                        T,          2.0 * M_PI / torus.k, reflect,     &nopt.integrator};
    const int NL = std::max(N_lambda, 4), NP = std::max(N_phi, 2);
    std::vector<double> B1(static_cast<std::size_t>(NL) * NP), B2(B1.size());
    std::vector<char> valid(B1.size(), 0);
    for (int i = 0; i < NL; ++i) {
        for (int j = 0; j < NP; ++j) {
            double B[2];
            if (bf.eval(T * i / NL, bf.phi_period * j / NP, B)) {
                B1[i * NP + j] = B[0];
                B2[i * NP + j] = B[1];
                valid[i * NP + j] = 1;
            }
        }
    }
    for (int i = 0; i < NL; ++i) {
        for (int j = 0; j < NP; ++j) {
            const int i1 = (i + 1) % NL, j1 = (j + 1) % NP;
            const int c[4] = {i * NP + j, i1 * NP + j, i * NP + j1, i1 * NP + j1};
            if (!(valid[c[0]] && valid[c[1]] && valid[c[2]] && valid[c[3]]))
                continue;
            double lo1 = B1[c[0]], hi1 = lo1, lo2 = B2[c[0]], hi2 = lo2;
            for (int q = 1; q < 4; ++q) {
                lo1 = std::min(lo1, B1[c[q]]);
                hi1 = std::max(hi1, B1[c[q]]);
                lo2 = std::min(lo2, B2[c[q]]);
                hi2 = std::max(hi2, B2[c[q]]);
            }
            if (lo1 > 0.0 || hi1 < 0.0 || lo2 > 0.0 || hi2 < 0.0)
                continue;
            double lambda = T * (i + 0.5) / NL;
            double phi = bf.phi_period * (j + 0.5) / NP;
            if (!bf.solve(lambda, phi))
                continue;
            lambda = std::fmod(lambda, T);
            if (lambda < 0.0)
                lambda += T;
            phi = std::fmod(phi, bf.phi_period);
            if (phi < 0.0)
                phi += bf.phi_period;
            try_seed(bf.state_at(lambda, phi), lambda, phi);
        }
    }

    if (out.orbits.empty()) {
        std::vector<CartesianState> seeds =
            seed_grid(potential, torus, N_lambda, N_phi, eopt, qopt, nopt.integrator);
        if (reflect)
            for (auto& s : seeds)
                s = reflect_state(s);
        const double nan = std::numeric_limits<double>::quiet_NaN();
        for (const auto& seed : seeds)
            try_seed(seed, nan, nan);
    }

    std::sort(out.orbits.begin(), out.orbits.end(), [](const PeriodicOrbit& a, const PeriodicOrbit& b) {
        if (std::isnan(a.seed_lambda) || std::isnan(b.seed_lambda))
            return false;
        return a.seed_lambda != b.seed_lambda ? a.seed_lambda < b.seed_lambda
                                              : a.seed_phi < b.seed_phi;
    });
    return out;
}

} // namespace orbita
