#include "orbita/dynamics.hpp"

#include "orbita/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

namespace orbita {

double CartesianState::radius() const { return std::hypot(x1, x2); }

double CartesianState::angular_momentum() const { return x1 * v2 - x2 * v1; }

double CartesianState::energy(const RadialPotential& potential) const {
    return 0.5 * (v1 * v1 + v2 * v2) - potential(radius());
}

ForceField central_field(const RadialPotential& potential) {
    ForceField f;
    f.accel = [potential](double, const double x[2], double a[2]) {
        const double r = std::hypot(x[0], x[1]);
        const double vp = potential.derivative(r, 1);
        a[0] = vp * x[0] / r;
        a[1] = vp * x[1] / r;
    };
    f.accel_jacobian = [potential](double, const double x[2], double jac[4]) {
        const double r = std::hypot(x[0], x[1]);
        const double vp = potential.derivative(r, 1);
        const double vpp = potential.derivative(r, 2);
        const double c = (vpp - vp / r) / (r * r);
        jac[0] = vp / r + c * x[0] * x[0];
        jac[1] = c * x[0] * x[1];
        jac[2] = c * x[1] * x[0];
        jac[3] = vp / r + c * x[1] * x[1];
    };
    f.has_jacobian = true;
    return f;
}

namespace {

// 13-stage embedded Runge-Kutta 8(7) pair (Prince & Dormand). The lower
// triangle is stored row by row; stage times come from the row sums.
constexpr int kStages = 13;

const double kB[] = {
    // row 2
    .0555555555555555555555555555556,
    // row 3
    .0208333333333333333333333333333, .0625,
    // row 4
    .03125, 0., .09375,
    // row 5
    .3125, 0., -1.171875, 1.171875,
    // row 6
    .0375, 0., 0., .1875, .15,
    // row 7
    .0479101371111111111111111111111, 0., 0., .112248712777777777777777777778,
    -.0255056737777777777777777777778, .0128468238888888888888888888889,
    // row 8
    .016917989787292281181431107136, 0., 0., .387848278486043169526545744159,
    .0359773698515003278967008896348, .196970214215666060156715256072,
    -.172713852340501838761392997002,
    // row 9
    .0690957533591923006485645489846, 0., 0., -.634247976728854151882807874972,
    -.161197575224604080366876923982, .138650309458825255419866950133, .94092861403575626972423968413,
    .211636326481943981855372117132,
    // row 10
    .183556996839045385489806023537, 0., 0., -2.46876808431559245274431575997,
    -.291286887816300456388002572804, -.026473020233117375688439799466, 2.84783876419280044916451825422,
    .281387331469849792539403641827, .123744899863314657627030212664,
    // row 11
    -1.21542481739588805916051052503, 0., 0., 16.6726086659457724322804132886,
    .915741828416817960595718650451, -6.05660580435747094755450554309, -16.0035735941561781118417064101,
    14.849303086297662557545391898, -13.3715757352898493182930413962, 5.13418264817963793317325361166,
    // row 12
    .258860916438264283815730932232, 0., 0., -4.77448578548920511231011750971,
    -.43509301377703250944070041181, -3.04948333207224150956051286631, 5.57792003993609911742367663447,
    6.15583158986104009733868912669, -5.06210458673693837007740643391, 2.19392617318067906127491429047,
    .134627998659334941535726237887,
    // row 13
    .822427599626507477963168204773, 0., 0., -11.6586732572776642839765530355,
    -.757622116690936195881116154088, .713973588159581527978269282765, 12.0757749868900567395661704486,
    -2.12765911392040265639082085897, 1.99016620704895541832807169835, -.234286471544040292660294691857,
    .17589857770794226507310510589, 0.};

// order-8 propagation weights
const double kW8[kStages] = {
    .0417474911415302462220859284685, 0., 0., 0., 0.,
    -.0554523286112393089615218946547, .239312807201180097046747354249, .70351066940344302305804641089,
    -.759759613814460929884487677085, .660563030922286341461378594838, .158187482510123335529614838601,
    -.238109538752862804471863555306, .25};

// order-7 weights, used only for the error estimate
const double kW7[kStages] = {
    .029553213676353496981964883112, 0., 0., 0., 0.,
    -.828606276487797039766805612689, .311240900051118327929913751627, 2.46734519059988698196468570407,
    -2.54694165184190873912738007542, 1.44354858367677524030187495069, .0794155958811272872713019541622,
    .0444444444444444444444444444445, 0.};

struct Tableau {
    double c[kStages];
    const double* row[kStages];
    Tableau() {
        const double* p = kB;
        row[0] = nullptr;
        c[0] = 0.0;
        for (int i = 1; i < kStages; ++i) {
            row[i] = p;
            double sum = 0.0;
            for (int j = 0; j < i; ++j)
                sum += p[j];
            c[i] = sum;
            p += i;
        }
    }
};

const Tableau& tableau() {
    static const Tableau tab;
    return tab;
}

using DerivFn = std::function<void(double t, const double* y, double* dy)>;

constexpr int kMaxDim = 20;

// One adaptive integration pass; on_step is called after every accepted
// step (including the initial state).
template <typename OnStep>
void rk87_drive(const DerivFn& f, double t0, double* y, int n, double t_end,
                const IntegratorOptions& opts, OnStep&& on_step) {
    const Tableau& tab = tableau();
    const double dir = t_end >= t0 ? 1.0 : -1.0;
    double t = t0;
    on_step(t, y);
    if (t_end == t0)
        return;

    double k[kStages][kMaxDim];
    double ytmp[kMaxDim], y8[kMaxDim];

    f(t, y, k[0]);
    double h = opts.initial_step;
    if (h == 0.0) {
        double ynorm = 0.0, fnorm = 0.0;
        for (int i = 0; i < n; ++i) {
            const double sc = opts.atol + opts.rtol * std::fabs(y[i]);
            ynorm = std::max(ynorm, std::fabs(y[i]) / sc);
            fnorm = std::max(fnorm, std::fabs(k[0][i]) / sc);
        }
        h = fnorm > 0.0 ? 0.01 * std::max(ynorm, 1.0) / fnorm : 1e-6;
        h = std::min(h, std::fabs(t_end - t0));
    }
    h *= dir;

    long steps = 0;
    bool fsal_valid = true;  // k[0] holds f(t, y)
    while (dir * (t_end - t) > 0.0) {
        if (++steps > opts.max_steps)
            throw ConvergenceError("integrate: step budget exhausted");
        if (dir * (t + h - t_end) > 0.0)
            h = t_end - t;
        if (std::fabs(h) < 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::fabs(t), 1.0))
            throw ConvergenceError("integrate: step-size underflow at t = " + std::to_string(t));

        if (!fsal_valid) {
            f(t, y, k[0]);
            fsal_valid = true;
        }
        for (int s = 1; s < kStages; ++s) {
            const double* b = tab.row[s];
            for (int i = 0; i < n; ++i) {
                double acc = 0.0;
                for (int j = 0; j < s; ++j)
                    acc += b[j] * k[j][i];
                ytmp[i] = y[i] + h * acc;
            }
            f(t + tab.c[s] * h, ytmp, k[s]);
        }
        double err = 0.0;
        for (int i = 0; i < n; ++i) {
            double acc8 = 0.0, accd = 0.0;
            for (int s = 0; s < kStages; ++s) {
                acc8 += kW8[s] * k[s][i];
                accd += (kW8[s] - kW7[s]) * k[s][i];
            }
            y8[i] = y[i] + h * acc8;
            const double sc = opts.atol + opts.rtol * std::max(std::fabs(y[i]), std::fabs(y8[i]));
            const double e = h * accd / sc;
            err += e * e;
        }
        err = std::sqrt(err / n);

        if (err <= 1.0) {
            t += h;
            std::memcpy(y, y8, sizeof(double) * n);
            on_step(t, y);
            fsal_valid = false;
        }
        const double fac = err > 0.0 ? 0.9 * std::pow(err, -1.0 / 8.0) : 5.0;
        h *= std::clamp(fac, 0.2, 5.0);
    }
}

DerivFn state_deriv(const ForceField& field, double floor) {
    return [field, floor](double t, const double* y, double* dy) {
        const double r2 = y[0] * y[0] + y[1] * y[1];
        if (r2 < floor * floor)
            throw CollisionError("integrate: |x| = " + std::to_string(std::sqrt(r2)) +
                                 " fell below the collision floor " + std::to_string(floor));
        double a[2];
        const double x[2] = {y[0], y[1]};
        field.accel(t, x, a);
        dy[0] = y[2];
        dy[1] = y[3];
        dy[2] = a[0];
        dy[3] = a[1];
    };
}

double auto_floor(const IntegratorOptions& opts, const CartesianState& s0) {
    return opts.collision_floor > 0.0 ? opts.collision_floor : 1e-6 * s0.radius();
}

} // namespace

CartesianState Trajectory::state(std::size_t i) const {
    const auto& y = states_[i];
    return {y[0], y[1], y[2], y[3], times_[i]};
}

CartesianState Trajectory::state_at(double t) const {
    if (t < times_.front() - 1e-12 || t > times_.back() + 1e-12)
        throw ParameterError("state_at: t = " + std::to_string(t) + " outside trajectory span");
    t = std::clamp(t, times_.front(), times_.back());
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    std::size_t i = it == times_.begin() ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
    if (i + 1 >= times_.size())
        i = times_.size() - 2;
    if (t == times_[i])
        return state(i);
    if (t == times_[i + 1])
        return state(i + 1);

    double y[4] = {states_[i][0], states_[i][1], states_[i][2], states_[i][3]};
    IntegratorOptions local = opts_;
    local.initial_step = t - times_[i];
    rk87_drive(state_deriv(field_, floor_), times_[i], y, 4, t, local, [](double, const double*) {});
    return {y[0], y[1], y[2], y[3], t};
}

Trajectory integrate(const ForceField& field, const CartesianState& s0, double t_end,
                     const IntegratorOptions& opts) {
    Trajectory traj;
    traj.field_ = field;
    traj.opts_ = opts;
    traj.floor_ = auto_floor(opts, s0);
    double y[4] = {s0.x1, s0.x2, s0.v1, s0.v2};
    rk87_drive(state_deriv(field, traj.floor_), s0.t, y, 4, t_end, opts,
               [&traj](double t, const double* yy) {
                   traj.times_.push_back(t);
                   traj.states_.push_back({yy[0], yy[1], yy[2], yy[3]});
               });
    return traj;
}

FlowWithMonodromy flow_with_monodromy(const ForceField& field, const CartesianState& s0, double t_end,
                                      const IntegratorOptions& opts, bool force_fd) {
    FlowWithMonodromy out;
    const double floor = auto_floor(opts, s0);

    if (field.has_jacobian && !force_fd) {
        // State plus the 4x4 variational matrix, row-major in y[4..19].
        DerivFn deriv = [&field, floor](double t, const double* y, double* dy) {
            const double r2 = y[0] * y[0] + y[1] * y[1];
            if (r2 < floor * floor)
                throw CollisionError("flow_with_monodromy: collision floor reached");
            const double x[2] = {y[0], y[1]};
            double a[2], J[4];
            field.accel(t, x, a);
            field.accel_jacobian(t, x, J);
            dy[0] = y[2];
            dy[1] = y[3];
            dy[2] = a[0];
            dy[3] = a[1];
            const double* M = y + 4;
            double* dM = dy + 4;
            for (int c = 0; c < 4; ++c) {
                dM[0 * 4 + c] = M[2 * 4 + c];
                dM[1 * 4 + c] = M[3 * 4 + c];
                dM[2 * 4 + c] = J[0] * M[0 * 4 + c] + J[1] * M[1 * 4 + c];
                dM[3 * 4 + c] = J[2] * M[0 * 4 + c] + J[3] * M[1 * 4 + c];
            }
        };
        double y[20] = {s0.x1, s0.x2, s0.v1, s0.v2};
        for (int i = 0; i < 4; ++i)
            y[4 + i * 4 + i] = 1.0;
        rk87_drive(deriv, s0.t, y, 20, t_end, opts, [](double, const double*) {});
        out.state = {y[0], y[1], y[2], y[3], t_end};
        for (int i = 0; i < 16; ++i)
            out.monodromy[i] = y[4 + i];
        return out;
    }

    // Columnwise finite differences of the flow map.
    auto flow = [&](const CartesianState& s) {
        const Trajectory traj = integrate(field, s, t_end, opts);
        return traj.state(traj.size() - 1);
    };
    out.state = flow(s0);
    const double scale = std::max({s0.radius(), std::fabs(s0.v1), std::fabs(s0.v2), 1.0});
    const double dstep = 1e-7 * scale;
    for (int j = 0; j < 4; ++j) {
        CartesianState plus = s0, minus = s0;
        double* pf[4] = {&plus.x1, &plus.x2, &plus.v1, &plus.v2};
        double* mf[4] = {&minus.x1, &minus.x2, &minus.v1, &minus.v2};
        *pf[j] += dstep;
        *mf[j] -= dstep;
        const CartesianState fp = flow(plus);
        const CartesianState fm = flow(minus);
        out.monodromy[0 * 4 + j] = (fp.x1 - fm.x1) / (2.0 * dstep);
        out.monodromy[1 * 4 + j] = (fp.x2 - fm.x2) / (2.0 * dstep);
        out.monodromy[2 * 4 + j] = (fp.v1 - fm.v1) / (2.0 * dstep);
        out.monodromy[3 * 4 + j] = (fp.v2 - fm.v2) / (2.0 * dstep);
    }
    return out;
}

namespace {

double angle_increment(double x1a, double x2a, double x1b, double x2b) {
    return std::atan2(x1a * x2b - x2a * x1b, x1a * x1b + x2a * x2b);
}

} // namespace

OrbitDiagnostics measure(const Trajectory& trajectory, const RadialPotential& potential) {
    const std::size_t n = trajectory.size();
    if (n < 3)
        throw InsufficientEventsError("measure: trajectory too short");

    // Unwrapped polar angle and conservation drift at the step ends.
    std::vector<double> theta_acc(n);
    OrbitDiagnostics diag;
    const CartesianState first = trajectory.state(0);
    const double H0 = first.energy(potential);
    const double L0 = first.angular_momentum();
    theta_acc[0] = std::atan2(first.x2, first.x1);
    CartesianState prev = first;
    for (std::size_t i = 1; i < n; ++i) {
        const CartesianState s = trajectory.state(i);
        theta_acc[i] = theta_acc[i - 1] + angle_increment(prev.x1, prev.x2, s.x1, s.x2);
        diag.H_drift = std::max(diag.H_drift,
                                std::fabs(s.energy(potential) - H0) / std::max(std::fabs(H0), 1e-300));
        diag.L_drift = std::max(diag.L_drift,
                                std::fabs(s.angular_momentum() - L0) / std::max(std::fabs(L0), 1e-300));
        prev = s;
    }

    // Pericenter events: d(r^2)/dt = 2 <x, v> crossing - to +, refined by
    // bisection on the dense output.
    auto gdot = [](const CartesianState& s) { return s.x1 * s.v1 + s.x2 * s.v2; };
    std::vector<double> events;
    std::vector<double> event_angles;
    for (std::size_t i = 1; i < n; ++i) {
        const CartesianState sa = trajectory.state(i - 1);
        const CartesianState sb = trajectory.state(i);
        const double ga = gdot(sa), gb = gdot(sb);
        if (!(ga < 0.0 && gb >= 0.0))
            continue;
        double ta = sa.t, tb = sb.t;
        for (int it = 0; it < 80 && (tb - ta) > 1e-15 * std::max(1.0, std::fabs(tb)); ++it) {
            const double tm = 0.5 * (ta + tb);
            const double gm = gdot(trajectory.state_at(tm));
            if (gm < 0.0)
                ta = tm;
            else
                tb = tm;
        }
        const double te = 0.5 * (ta + tb);
        const CartesianState se = trajectory.state_at(te);
        events.push_back(te);
        event_angles.push_back(theta_acc[i - 1] + angle_increment(sa.x1, sa.x2, se.x1, se.x2));
    }
    diag.pericenter_times = events;
    if (events.size() < 2)
        throw InsufficientEventsError("measure: fewer than two pericenter passages (" +
                                      std::to_string(events.size()) + ")");
    const std::size_t m = events.size();
    diag.measured_T = (events.back() - events.front()) / static_cast<double>(m - 1);
    const double swept = event_angles.back() - event_angles.front();
    diag.measured_Theta = swept / static_cast<double>(m - 1);
    diag.winding_n = static_cast<int>(m - 1);
    diag.winding_k = static_cast<int>(std::lround(swept / (2.0 * M_PI)));
    return diag;
}

CartesianState torus_pericenter_state(const RadialPotential& potential, const TorusSolution& torus,
                                      const EffectiveOptions& eopt, const QuadratureOptions& qopt) {
    const RegularizedMap rad = RegularizedMap::radial(potential, torus.L, eopt, qopt);
    const TurningPoints tp = rad.turning_points(torus.H);
    CartesianState s;
    s.x1 = tp.s_minus;
    s.x2 = 0.0;
    s.v1 = 0.0;
    s.v2 = torus.L / tp.s_minus;
    s.t = 0.0;
    return s;
}

TorusVerification verify_torus(const RadialPotential& potential, const TorusSolution& torus,
                               double closure_tol, const EffectiveOptions& eopt,
                               const QuadratureOptions& qopt, const IntegratorOptions& iopt) {
    TorusVerification out;
    const RegularizedMap rad = RegularizedMap::radial(potential, torus.L, eopt, qopt);
    const double T = rad.period(torus.H);
    out.radial_period = T;
    const CartesianState z0 = torus_pericenter_state(potential, torus, eopt, qopt);
    const double tau = torus.tau;

    // Span a little beyond tau so the winding measurement always sees at
    // least two clean interior pericenter passages.
    const ForceField field = central_field(potential);
    const Trajectory traj = integrate(field, z0, tau + 2.5 * T, iopt);

    auto state_distance = [](const CartesianState& a, const CartesianState& b) {
        return std::sqrt((a.x1 - b.x1) * (a.x1 - b.x1) + (a.x2 - b.x2) * (a.x2 - b.x2) +
                         (a.v1 - b.v1) * (a.v1 - b.v1) + (a.v2 - b.v2) * (a.v2 - b.v2));
    };
    const CartesianState zf = traj.state_at(tau);
    out.closure_error = state_distance(z0, zf);

    const double scale = std::max(1.0, std::sqrt(z0.x1 * z0.x1 + z0.x2 * z0.x2 + z0.v1 * z0.v1 +
                                                 z0.v2 * z0.v2));
    const double tol = closure_tol * scale;
    if (out.closure_error > tol) {
        out.failure = "closure error " + std::to_string(out.closure_error) + " above tolerance";
        return out;
    }

    // Winding type over one minimal period n T.
    const OrbitDiagnostics diag = measure(traj, potential);
    const double two_pi = 2.0 * M_PI;
    const double per_period = diag.measured_Theta;
    out.winding_n = torus.n;
    out.winding_k = static_cast<int>(std::lround(torus.n * per_period / two_pi));
    if (out.winding_k != torus.k) {
        out.failure = "winding over n radial periods is " + std::to_string(out.winding_k) +
                      ", expected " + std::to_string(torus.k);
        return out;
    }
    const int expected_periods = torus.ell * torus.n;
    if (diag.winding_n < expected_periods) {
        out.failure = "found " + std::to_string(diag.winding_n) + " radial periods, expected at least " +
                      std::to_string(expected_periods);
        return out;
    }

    // Minimality: no closure at m T for m = 1..n-1.
    out.min_separation = std::numeric_limits<double>::infinity();
    for (int m = 1; m < torus.n; ++m) {
        const CartesianState zm = traj.state_at(m * T);
        out.min_separation = std::min(out.min_separation, state_distance(z0, zm));
    }
    out.minimal = torus.n == 1 || out.min_separation > 1e3 * tol;
    if (!out.minimal) {
        out.failure = "early closure at a proper fraction of the period";
        return out;
    }
    out.passed = true;
    return out;
}

CartesianState integrate_polar(const RadialPotential& potential, const CartesianState& s0,
                               double t_end, const IntegratorOptions& opts) {
    const double r0 = s0.radius();
    const double L = s0.angular_momentum();
    const double rdot0 = (s0.x1 * s0.v1 + s0.x2 * s0.v2) / r0;
    const double th0 = std::atan2(s0.x2, s0.x1);
    const double floor = auto_floor(opts, s0);

    DerivFn deriv = [&potential, L, floor](double, const double* y, double* dy) {
        const double r = y[0];
        if (r < floor)
            throw CollisionError("integrate_polar: collision floor reached");
        dy[0] = y[1];
        dy[1] = L * L / (r * r * r) + potential.derivative(r, 1);
        dy[2] = L / (r * r);
    };
    double y[3] = {r0, rdot0, th0};
    rk87_drive(deriv, s0.t, y, 3, t_end, opts, [](double, const double*) {});
    const double r = y[0], rd = y[1], th = y[2];
    CartesianState s;
    s.x1 = r * std::cos(th);
    s.x2 = r * std::sin(th);
    s.v1 = rd * std::cos(th) - r * (L / (r * r)) * std::sin(th);
    s.v2 = rd * std::sin(th) + r * (L / (r * r)) * std::cos(th);
    s.t = t_end;
    return s;
}

} // namespace orbita
