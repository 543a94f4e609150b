#ifndef ORBITA_RESTRICTED3BODY_HPP
#define ORBITA_RESTRICTED3BODY_HPP

#include "orbita/continuation.hpp"

namespace orbita {

/// Normalized alpha-homogeneous restricted planar circular 3-body problem:
/// primaries xi_M(t) = m e^{it}, xi_m(t) = -(1-m) e^{it}, G = 1, period 2 pi,
/// separation 1, masses 1-m and m.
struct R3BConfig {
    double alpha = 0.5;  // (0, 2) \ {1}
    double m = 1e-4;     // small mass
    double guard_large = 1e-6;  // collision guards around the primaries (q-frame)
    double guard_small = 0.2;

    R3BConfig(double alpha_, double m_);
};

/// Acceleration of the massless body in the inertial q-frame.
void r3b_acceleration(const R3BConfig& config, double t, const double q[2], double a[2]);
ForceField r3b_field(const R3BConfig& config);

/// Frame maps between q and the translated-rescaled x placing the large
/// primary at the origin: x = (1-m)^{-1/(alpha+2)} (q - m e^{it}).
CartesianState q_to_x(const R3BConfig& config, const CartesianState& q);
CartesianState x_to_q(const R3BConfig& config, const CartesianState& x);

struct TorusCandidate {
    int n = 0, k = 0, ell = 0;
    TorusSolution torus;
    double r_plus = 0.0;  // sup norm of the orbit
};

/// Type-(n,k) tori of the kappa = 1 homogeneous problem with minimal period
/// 2 pi / ell, for increasing ell; returns the first `count` candidates whose
/// sup-norm stays below 1/2 (inside the perturbation's domain).
std::vector<TorusCandidate> candidate_tori(double alpha, int n, int k, int count,
                                           const EffectiveOptions& eopt = {},
                                           const QuadratureOptions& qopt = {});

struct R3BOrbit {
    PeriodicOrbit orbit;      // x-frame fixed point
    CartesianState q0;        // q-frame initial state at t = 0
    double q_residual = 0.0;  // |q(2 pi) - q(0)| from a direct q-frame integration
    TorusCandidate candidate;
};

/// Continue one candidate torus into the restricted problem at mass m,
/// then map back to the q-frame and verify the 2 pi period there.
R3BOrbit find_r3b_periodic(const R3BConfig& config, const TorusCandidate& candidate,
                           const NewtonOptions& nopt = {}, int N_lambda = 6, int N_phi = 3,
                           const EffectiveOptions& eopt = {}, const QuadratureOptions& qopt = {});

} // namespace orbita

#endif
