#ifndef ORBITA_TORI_HPP
#define ORBITA_TORI_HPP

#include "orbita/timemap.hpp"

#include <optional>
#include <utility>

namespace orbita {

/// Action-angle data attached to one phase-space state on a bounded orbit.
struct ActionAngleChart {
    double I1 = 0.0;     // area/(2 pi) + L
    double I2 = 0.0;     // L
    double area = 0.0;   // area enclosed by the (r, rdot) orbit
    double mu = 0.0;     // time since pericenter, in [0, T)
    double psi = 0.0;    // pericenter angle, in [0, 2 pi)
    double phi1 = 0.0;   // 2 pi mu / T
    double phi2 = 0.0;   // (Theta - 2 pi) mu / T + psi
};

/// Area enclosed by the (r, rdot) orbit at (H, L).
double area(const RadialPotential& potential, double H, double L,
            const EffectiveOptions& eopt = {}, const QuadratureOptions& qopt = {});

/// Angle coordinates of the state (r, rdot, theta) with angular momentum L.
/// The ascending branch is selected for rdot > 0; a tie rdot = 0 resolves to
/// pericenter when r <= r0(L). psi jumps exactly at mu = 0+.
ActionAngleChart angles(const RadialPotential& potential, double r, double rdot, double theta,
                        double L, const EffectiveOptions& eopt = {}, const QuadratureOptions& qopt = {});

/// An invariant torus filled by type-(n,k) periodic orbits: T = tau/(ell n),
/// Theta = 2 pi k / n at the located pair (H, L).
struct TorusSolution {
    int n = 0;
    int k = 0;
    double tau = 0.0;
    int ell = 1;
    double H = 0.0;
    double L = 0.0;
    double I1 = 0.0;
    double I2 = 0.0;
    double residual_T = 0.0;      // |T - tau/(ell n)| / (tau/(ell n))
    double residual_Theta = 0.0;  // |Theta - 2 pi k/n| / (2 pi k/n)
    double D = 0.0;
};

/// Locate the torus of type (n, k) whose solutions have minimal period
/// tau/ell. For the homogeneous family with alpha in (0,2)\{1} no seed is
/// needed and the solution is unique; general potentials require a seed
/// (H, L) for the damped Newton iteration.
TorusSolution find_torus(const RadialPotential& potential, double tau, int n, int k, int ell = 1,
                         std::optional<std::pair<double, double>> seed = std::nullopt,
                         const EffectiveOptions& eopt = {}, const QuadratureOptions& qopt = {});

/// det DPhi(H, L) = -2 pi tau^2 / T^3 * D(H, L); its nonvanishing is the
/// twist condition behind the torus bifurcation.
struct KamDeterminant {
    double det_DPhi = 0.0;
    bool nondegenerate = false;
    TimeMapValues maps;
};
KamDeterminant kam_determinant(const RadialPotential& potential, double H, double L, double tau,
                               const EffectiveOptions& eopt = {}, const QuadratureOptions& qopt = {});

} // namespace orbita

#endif
