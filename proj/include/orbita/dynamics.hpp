#ifndef ORBITA_DYNAMICS_HPP
#define ORBITA_DYNAMICS_HPP

#include "orbita/potential.hpp"
#include "orbita/tori.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace orbita {

struct CartesianState {
    double x1 = 0.0, x2 = 0.0;
    double v1 = 0.0, v2 = 0.0;
    double t = 0.0;

    double radius() const;
    double angular_momentum() const;                       // x1 v2 - x2 v1
    double energy(const RadialPotential& potential) const; // |v|^2/2 - V(|x|)
};

/// Planar acceleration field a(t, x), optionally with its x-Jacobian
/// (row-major 2x2) for the variational equations.
struct ForceField {
    std::function<void(double t, const double x[2], double a[2])> accel;
    std::function<void(double t, const double x[2], double jac[4])> accel_jacobian;
    bool has_jacobian = false;
};

/// The unperturbed central field xddot = V'(|x|) x/|x|.
ForceField central_field(const RadialPotential& potential);

struct IntegratorOptions {
    double rtol = 1e-12;
    double atol = 1e-14;
    double collision_floor = 0.0;  // 0 selects 1e-6 * initial radius
    double initial_step = 0.0;     // 0 selects automatically
    long max_steps = 20000000;
};

/// Accepted-step record of one integration. Interpolation re-integrates
/// from the enclosing step start at the original tolerances, so dense
/// states carry the same accuracy as the stored ones.
class Trajectory {
public:
    double t_begin() const { return times_.front(); }
    double t_end() const { return times_.back(); }
    std::size_t size() const { return times_.size(); }
    const std::vector<double>& times() const { return times_; }
    CartesianState state(std::size_t i) const;
    CartesianState state_at(double t) const;

private:
    friend Trajectory integrate(const ForceField&, const CartesianState&, double,
                                const IntegratorOptions&);
    std::vector<double> times_;
    std::vector<std::array<double, 4>> states_;
    ForceField field_;
    IntegratorOptions opts_;
    double floor_ = 0.0;
};

/// Propagate s0 to t_end with the adaptive embedded Runge-Kutta 8(7) pair.
/// Throws CollisionError below the collision floor and ConvergenceError on
/// step-size underflow.
Trajectory integrate(const ForceField& field, const CartesianState& s0, double t_end,
                     const IntegratorOptions& opts = {});

/// State transition over [t0, t_end]: final state plus the 4x4 monodromy
/// (row-major), via the variational equations when the field carries a
/// Jacobian, or 4-column finite differences otherwise (or when forced).
struct FlowWithMonodromy {
    CartesianState state;
    std::array<double, 16> monodromy{};
};
FlowWithMonodromy flow_with_monodromy(const ForceField& field, const CartesianState& s0, double t_end,
                                      const IntegratorOptions& opts = {}, bool force_fd = false);

/// Radial-period and apsidal measurements from pericenter events.
struct OrbitDiagnostics {
    double measured_T = 0.0;
    double measured_Theta = 0.0;
    int winding_n = 0;  // radial periods spanned by the events
    int winding_k = 0;  // nearest integer of swept angle / 2 pi over those periods
    double H_drift = 0.0;
    double L_drift = 0.0;
    std::vector<double> pericenter_times;
};
OrbitDiagnostics measure(const Trajectory& trajectory, const RadialPotential& potential);

struct TorusVerification {
    bool passed = false;
    double closure_error = 0.0;
    int winding_n = 0;
    int winding_k = 0;
    bool minimal = false;
    double min_separation = 0.0;  // over candidate earlier closure times
    double radial_period = 0.0;
    std::string failure;
};

/// Integrate the torus pericenter state over tau = ell n T and check
/// closure, winding type (n, k), and minimality of the period n T.
TorusVerification verify_torus(const RadialPotential& potential, const TorusSolution& torus,
                               double closure_tol = 1e-7,
                               const EffectiveOptions& eopt = {}, const QuadratureOptions& qopt = {},
                               const IntegratorOptions& iopt = {});

/// Second oracle: propagate in polar coordinates (valid for the unperturbed
/// problem, where L is constant) and return the final state.
CartesianState integrate_polar(const RadialPotential& potential, const CartesianState& s0,
                               double t_end, const IntegratorOptions& opts = {});

/// Pericenter initial state of a located torus: r = r-(H, L), rdot = 0,
/// theta = 0, thetadot = L/r^2.
CartesianState torus_pericenter_state(const RadialPotential& potential, const TorusSolution& torus,
                                      const EffectiveOptions& eopt = {},
                                      const QuadratureOptions& qopt = {});

} // namespace orbita

#endif
