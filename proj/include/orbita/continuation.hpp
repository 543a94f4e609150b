#ifndef ORBITA_CONTINUATION_HPP
#define ORBITA_CONTINUATION_HPP

#include "orbita/dynamics.hpp"

#include <cmath>
#include <optional>
#include <vector>

namespace orbita {

/// Time-periodic perturbation U(t, x) entering xddot = V'(|x|)x/|x| + eps grad U.
/// For rotating_point_mass the parameter eps is the small mass m, which also
/// appears inside U itself.
struct PerturbationModel {
    enum class Kind { none, uniform_drive, rotating_point_mass };

    Kind kind = Kind::none;
    double tau = 2.0 * M_PI;
    double epsilon = 0.0;
    double e1 = 1.0, e2 = 0.0;     // drive direction (uniform_drive)
    double alpha = 0.5;            // homogeneity exponent (rotating_point_mass)
    double small_primary_guard = 0.2;  // x-frame guard radius around the singular circle

    /// U = cos(2 pi t / tau) <e, x>.
    static PerturbationModel uniform_drive(double tau, double epsilon, double e1, double e2);

    /// The x-frame perturbation of the alpha-homogeneous restricted 3-body
    /// problem with primaries of period 2 pi; eps = m.
    static PerturbationModel rotating_point_mass(double alpha, double m);

    static PerturbationModel none_model(double tau);

    void grad_U(double t, const double x[2], double g[2]) const;
    void hess_U(double t, const double x[2], double h[4]) const;
};

/// Central field plus eps * grad U, with the combined Jacobian.
ForceField perturbed_field(const RadialPotential& potential, const PerturbationModel& model);

struct PeriodicOrbit {
    double epsilon = 0.0;
    CartesianState z0;
    double residual = 0.0;
    int winding_k = 0;
    double distance_to_torus = std::numeric_limits<double>::quiet_NaN();
    std::array<double, 16> monodromy{};
    double monodromy_det = 0.0;
    int newton_iterations = 0;
    // torus angles of the bifurcation-field zero this orbit was seeded from
    // (NaN for orbits from raw grid seeds); families match across epsilon
    // by these angles.
    double seed_lambda = std::numeric_limits<double>::quiet_NaN();
    double seed_phi = std::numeric_limits<double>::quiet_NaN();
};

struct NewtonOptions {
    double residual_tol = 1e-9;
    int max_iterations = 50;
    double tikhonov_floor = 1e-12;
    double tikhonov_scale = 1e-3;  // mu = max(floor, scale * |eps|)
    double step_cap = 0.05;       // max Newton step, relative to the state scale
    IntegratorOptions integrator;
};

/// One application of the time-tau map with its 4x4 differential.
FlowWithMonodromy time_tau_map(const RadialPotential& potential, const PerturbationModel& model,
                               const CartesianState& z0, const IntegratorOptions& iopt = {});

/// N_lambda x N_phi states on the invariant torus: the pericenter state
/// advanced by lambda_j in [0, T) and rotated by phi_i in [0, 2 pi / k).
std::vector<CartesianState> seed_grid(const RadialPotential& potential, const TorusSolution& torus,
                                      int N_lambda, int N_phi,
                                      const EffectiveOptions& eopt = {},
                                      const QuadratureOptions& qopt = {},
                                      const IntegratorOptions& iopt = {});

/// Damped, Tikhonov-regularized Newton on F(z) = P_eps(z) - z. Returns
/// nullopt on divergence or collision (an acceptable outcome, not an error).
std::optional<PeriodicOrbit> newton_fixed_point(const RadialPotential& potential,
                                                const PerturbationModel& model,
                                                const CartesianState& seed,
                                                const NewtonOptions& nopt = {});

struct SurveyResult {
    std::vector<PeriodicOrbit> orbits;  // deduplicated
    int attempts = 0;
    int converged = 0;
};

/// Run newton_fixed_point from every grid seed, deduplicate by the minimum
/// over time-shift-and-rotation state distance, and attach each orbit's
/// distance to the unperturbed torus. With reflect = true the search runs
/// from the reflected (negative angular momentum) torus.
SurveyResult survey(const RadialPotential& potential, const PerturbationModel& model,
                    const TorusSolution& torus, int N_lambda, int N_phi,
                    const NewtonOptions& nopt = {}, double dedup_rel_threshold = 1e-5,
                    bool reflect = false,
                    const EffectiveOptions& eopt = {}, const QuadratureOptions& qopt = {});

/// The (x1, x2, v1, v2) -> (x1, -x2, v1, -v2) reflection, flipping L.
CartesianState reflect_state(const CartesianState& s);

/// Distance from a state to the invariant torus: minimum over torus samples
/// of the rotation-reduced state distance.
double distance_to_torus(const RadialPotential& potential, const TorusSolution& torus,
                         const CartesianState& z, bool reflect = false,
                         const EffectiveOptions& eopt = {}, const QuadratureOptions& qopt = {},
                         const IntegratorOptions& iopt = {});

} // namespace orbita

#endif
