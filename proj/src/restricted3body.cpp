#include "orbita/restricted3body.hpp"

#include "orbita/errors.hpp"

#include <cmath>
#include <sstream>

namespace orbita {

R3BConfig::R3BConfig(double alpha_, double m_) : alpha(alpha_), m(m_) {
    if (!(alpha > 0.0 && alpha < 2.0) || alpha == 1.0)
        throw ParameterError("R3BConfig: alpha must lie in (0,2) with alpha != 1");
    if (!(m > 0.0 && m < 1.0))
        throw ParameterError("R3BConfig: m must lie in (0,1)");
}

void r3b_acceleration(const R3BConfig& config, double t, const double q[2], double a[2]) {
    const double ct = std::cos(t), st = std::sin(t);
    const double m = config.m;
    // xi_M = m e^{it}, xi_m = -(1-m) e^{it}
    const double dM1 = m * ct - q[0];
    const double dM2 = m * st - q[1];
    const double dm1 = -(1.0 - m) * ct - q[0];
    const double dm2 = -(1.0 - m) * st - q[1];
    const double rM = std::hypot(dM1, dM2);
    const double rm = std::hypot(dm1, dm2);
    if (rM < config.guard_large)
        throw CollisionError("r3b_acceleration: collision with the large primary");
    if (rm < config.guard_small * std::pow(1.0 - m, 1.0 / (config.alpha + 2.0)))
        throw CollisionError("r3b_acceleration: collision guard around the small primary");
    const double cM = (1.0 - m) / std::pow(rM, config.alpha + 2.0);
    const double cm = m / std::pow(rm, config.alpha + 2.0);
    a[0] = cM * dM1 + cm * dm1;
    a[1] = cM * dM2 + cm * dm2;
}

ForceField r3b_field(const R3BConfig& config) {
    ForceField f;
    f.accel = [config](double t, const double q[2], double a[2]) {
        r3b_acceleration(config, t, q, a);
    };
    f.has_jacobian = false;
    return f;
}

CartesianState q_to_x(const R3BConfig& config, const CartesianState& q) {
    const double beta = std::pow(1.0 - config.m, -1.0 / (config.alpha + 2.0));
    const double ct = std::cos(q.t), st = std::sin(q.t);
    CartesianState x;
    x.t = q.t;
    x.x1 = beta * (q.x1 - config.m * ct);
    x.x2 = beta * (q.x2 - config.m * st);
    x.v1 = beta * (q.v1 + config.m * st);
    x.v2 = beta * (q.v2 - config.m * ct);
    return x;
}

CartesianState x_to_q(const R3BConfig& config, const CartesianState& x) {
    const double beta = std::pow(1.0 - config.m, -1.0 / (config.alpha + 2.0));
    const double ct = std::cos(x.t), st = std::sin(x.t);
    CartesianState q;
    q.t = x.t;
    q.x1 = x.x1 / beta + config.m * ct;
    q.x2 = x.x2 / beta + config.m * st;
    q.v1 = x.v1 / beta - config.m * st;
    q.v2 = x.v2 / beta + config.m * ct;
    return q;
}

std::vector<TorusCandidate> candidate_tori(double alpha, int n, int k, int count,
                                           const EffectiveOptions& eopt, const QuadratureOptions& qopt) {
    if (count < 1)
        throw ParameterError("candidate_tori: count must be >= 1");
    const RadialPotential pot = RadialPotential::homogeneous(1.0, alpha);
    std::vector<TorusCandidate> out;
    for (int ell = 1; ell <= 100000 && static_cast<int>(out.size()) < count; ++ell) {
        TorusCandidate cand;
        cand.n = n;
        cand.k = k;
        cand.ell = ell;
        cand.torus = find_torus(pot, 2.0 * M_PI, n, k, ell, std::nullopt, eopt, qopt);
        const RegularizedMap rad = RegularizedMap::radial(pot, cand.torus.L, eopt, qopt);
        cand.r_plus = rad.turning_points(cand.torus.H).s_plus;
        if (cand.r_plus < 0.5)
            out.push_back(cand);
    }
    if (static_cast<int>(out.size()) < count)
        throw ConvergenceError("candidate_tori: could not collect enough candidates");
    return out;
}

R3BOrbit find_r3b_periodic(const R3BConfig& config, const TorusCandidate& candidate,
                           const NewtonOptions& nopt, int N_lambda, int N_phi,
                           const EffectiveOptions& eopt, const QuadratureOptions& qopt) {
    const RadialPotential pot = RadialPotential::homogeneous(1.0, config.alpha);
    const PerturbationModel model = PerturbationModel::rotating_point_mass(config.alpha, config.m);

    const std::vector<CartesianState> seeds =
        seed_grid(pot, candidate.torus, N_lambda, N_phi, eopt, qopt, nopt.integrator);
    for (const auto& seed : seeds) {
        auto orbit = newton_fixed_point(pot, model, seed, nopt);
        if (!orbit)
            continue;
        R3BOrbit out;
        out.orbit = *orbit;
        out.candidate = candidate;
        out.q0 = x_to_q(config, orbit->z0);

        // Independent q-frame check of the 2 pi period.
        IntegratorOptions iq = nopt.integrator;
        iq.collision_floor = 1e-12;
        const Trajectory qtraj = integrate(r3b_field(config), out.q0, 2.0 * M_PI, iq);
        const CartesianState qf = qtraj.state(qtraj.size() - 1);
        out.q_residual = std::sqrt((qf.x1 - out.q0.x1) * (qf.x1 - out.q0.x1) +
                                   (qf.x2 - out.q0.x2) * (qf.x2 - out.q0.x2) +
                                   (qf.v1 - out.q0.v1) * (qf.v1 - out.q0.v1) +
                                   (qf.v2 - out.q0.v2) * (qf.v2 - out.q0.v2));
        return out;
    }
    std::ostringstream msg;
    msg << "find_r3b_periodic: no seed converged for (n,k,ell) = (" << candidate.n << "," << candidate.k
        << "," << candidate.ell << ") at m = " << config.m;
    throw ConvergenceError(msg.str());
}

} // namespace orbita
