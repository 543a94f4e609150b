// orbita: central-force time maps, invariant tori, and periodic-orbit
// continuation from the command line.

#include "orbita/continuation.hpp"
#include "orbita/dynamics.hpp"
#include "orbita/errors.hpp"
#include "orbita/io.hpp"
#include "orbita/restricted3body.hpp"
#include "orbita/timemap.hpp"
#include "orbita/tori.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

namespace {

using nlohmann::json;
using namespace orbita;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitEmptyGrid = 3;
constexpr int kExitNoConvergence = 4;

int thread_count(int requested) {
    if (const char* env = std::getenv("ORBITA_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0)
            return n;
    }
    if (requested > 0)
        return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out)
        throw ParameterError("cannot open output file '" + path + "'");
    out << text;
}

struct ScanArgs {
    std::string potential_file;
    double H_min = 0, H_max = 0;
    double L_min = 0, L_max = 0;
    int H_count = 1, L_count = 1;
    std::string output;
    int threads = 0;
};

int cmd_scan(const ScanArgs& args) {
    const RadialPotential pot = load_potential_file(args.potential_file);
    if (args.H_count < 1 || args.L_count < 1)
        throw ParameterError("scan: grid counts must be >= 1");
    if (args.H_max < args.H_min || args.L_max < args.L_min)
        throw ParameterError("scan: ranges must be ordered");

    struct Cell {
        double H = 0, L = 0;
        bool admissible = false;
        TimeMapValues tm;
    };
    const int total = args.H_count * args.L_count;
    std::vector<Cell> cells(total);
    for (int j = 0; j < args.L_count; ++j) {
        for (int i = 0; i < args.H_count; ++i) {
            Cell& c = cells[j * args.H_count + i];
            c.H = args.H_count == 1 ? args.H_min
                                    : args.H_min + (args.H_max - args.H_min) * i / (args.H_count - 1);
            c.L = args.L_count == 1 ? args.L_min
                                    : args.L_min + (args.L_max - args.L_min) * j / (args.L_count - 1);
        }
    }

    const int workers = std::min(thread_count(args.threads), total);
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                const int idx = next.fetch_add(1);
                if (idx >= total)
                    return;
                Cell& c = cells[idx];
                try {
                    c.tm = nondegeneracy(pot, c.H, c.L);
                    c.admissible = true;
                } catch (const Error&) {
                    c.admissible = false;
                }
            }
        });
    }
    for (auto& t : pool)
        t.join();

    int n_admissible = 0;
    std::ostringstream csv;
    csv << "H,L,T,Theta,dT_dH,dT_dL,dTheta_dH,dTheta_dL,D,admissible\n";
    for (const Cell& c : cells) {
        csv << format_g17(c.H) << ',' << format_g17(c.L) << ',';
        if (c.admissible) {
            ++n_admissible;
            csv << format_g17(c.tm.T) << ',' << format_g17(c.tm.Theta) << ',' << format_g17(c.tm.dT_dH)
                << ',' << format_g17(c.tm.dT_dL) << ',' << format_g17(c.tm.dTheta_dH) << ','
                << format_g17(c.tm.dTheta_dL) << ',' << format_g17(c.tm.D) << ",1\n";
        } else {
            csv << "nan,nan,nan,nan,nan,nan,nan,0\n";
        }
    }
    write_output(args.output, csv.str());
    return n_admissible == 0 ? kExitEmptyGrid : kExitOk;
}

struct TorusArgs {
    std::string potential_file;
    double alpha = 0.5, kappa = 1.0;
    double tau = 2.0 * M_PI;
    int n = 4, k = 3, ell = 1;
    double seed_H = std::numeric_limits<double>::quiet_NaN();
    double seed_L = std::numeric_limits<double>::quiet_NaN();
    std::string output;
};

int cmd_find_torus(const TorusArgs& args) {
    RadialPotential pot = args.potential_file.empty()
                              ? RadialPotential::homogeneous(args.kappa, args.alpha)
                              : load_potential_file(args.potential_file);
    std::optional<std::pair<double, double>> seed;
    if (!std::isnan(args.seed_H) && !std::isnan(args.seed_L))
        seed = std::make_pair(args.seed_H, args.seed_L);
    const TorusSolution sol = find_torus(pot, args.tau, args.n, args.k, args.ell, seed);
    write_output(args.output, torus_to_json(sol, pot).dump(2) + "\n");
    return kExitOk;
}

struct VerifyArgs {
    std::string torus_file;
    double closure_tol = 1e-7;
};

int cmd_verify(const VerifyArgs& args) {
    std::ifstream in(args.torus_file);
    if (!in)
        throw ParameterError("cannot open torus file '" + args.torus_file + "'");
    const json j = json::parse(in);
    const RadialPotential pot = potential_from_json(j.at("potential"));
    const TorusSolution torus = torus_from_json(j);
    const TorusVerification ver = verify_torus(pot, torus, args.closure_tol);
    json out;
    out["passed"] = ver.passed;
    out["closure_error"] = ver.closure_error;
    out["winding_n"] = ver.winding_n;
    out["winding_k"] = ver.winding_k;
    out["minimal"] = ver.minimal;
    out["radial_period"] = ver.radial_period;
    if (!ver.passed)
        out["failure"] = ver.failure;
    std::cout << out.dump(2) << '\n';
    return ver.passed ? kExitOk : kExitNoConvergence;
}

struct ContinueArgs {
    std::string torus_file;
    double epsilon = 1e-3;
    double ex = 1.0, ey = 0.0;
    int N_lambda = 8, N_phi = 4;
    bool reflect = false;
    std::string output;
};

int cmd_continue(const ContinueArgs& args) {
    std::ifstream in(args.torus_file);
    if (!in)
        throw ParameterError("cannot open torus file '" + args.torus_file + "'");
    const json j = json::parse(in);
    const RadialPotential pot = potential_from_json(j.at("potential"));
    const TorusSolution torus = torus_from_json(j);
    const PerturbationModel model =
        PerturbationModel::uniform_drive(torus.tau, args.epsilon, args.ex, args.ey);
    const SurveyResult result =
        survey(pot, model, torus, args.N_lambda, args.N_phi, {}, 1e-5, args.reflect);
    json out = json::array();
    for (const auto& orbit : result.orbits) {
        out.push_back({{"epsilon", orbit.epsilon},
                       {"z0", {orbit.z0.x1, orbit.z0.x2, orbit.z0.v1, orbit.z0.v2}},
                       {"residual", orbit.residual},
                       {"winding_k", orbit.winding_k},
                       {"distance_to_torus", orbit.distance_to_torus}});
    }
    json report;
    report["attempts"] = result.attempts;
    report["converged"] = result.converged;
    report["orbits"] = out;
    write_output(args.output, report.dump(2) + "\n");
    return result.orbits.empty() ? kExitNoConvergence : kExitOk;
}

struct R3BArgs {
    double alpha = 0.5;
    double m = 1e-4;
    int n = 4, k = 3, count = 2;
    std::string output_dir = ".";
};

int cmd_r3b(const R3BArgs& args) {
    const R3BConfig config(args.alpha, args.m);
    const auto candidates = candidate_tori(args.alpha, args.n, args.k, args.count);
    const RadialPotential pot = RadialPotential::homogeneous(1.0, args.alpha);
    json out = json::array();
    for (const auto& cand : candidates) {
        const R3BOrbit orbit = find_r3b_periodic(config, cand);
        json jo;
        jo["n"] = cand.n;
        jo["k"] = cand.k;
        jo["ell"] = cand.ell;
        jo["r_plus"] = cand.r_plus;
        jo["m"] = args.m;
        jo["q0"] = {orbit.q0.x1, orbit.q0.x2, orbit.q0.v1, orbit.q0.v2};
        jo["x_residual"] = orbit.orbit.residual;
        jo["q_residual"] = orbit.q_residual;
        jo["winding_k"] = orbit.orbit.winding_k;

        // q-frame trajectory; H and L columns carry the slowly varying
        // central-problem invariants of the matched x-frame state.
        IntegratorOptions iq;
        iq.collision_floor = 1e-12;
        const Trajectory traj = integrate(r3b_field(config), orbit.q0, 2.0 * M_PI, iq);
        const std::string csv_path =
            args.output_dir + "/r3b_orbit_ell" + std::to_string(cand.ell) + ".csv";
        std::ofstream csv(csv_path);
        csv << "t,x1,x2,v1,v2,H,L\n";
        for (std::size_t i = 0; i < traj.size(); ++i) {
            const CartesianState q = traj.state(i);
            const CartesianState x = q_to_x(config, q);
            csv << format_g17(q.t) << ',' << format_g17(q.x1) << ',' << format_g17(q.x2) << ','
                << format_g17(q.v1) << ',' << format_g17(q.v2) << ',' << format_g17(x.energy(pot))
                << ',' << format_g17(x.angular_momentum()) << '\n';
        }
        jo["trajectory_csv"] = csv_path;
        out.push_back(jo);
    }
    std::cout << out.dump(2) << '\n';
    return kExitOk;
}

struct LimitsArgs {
    std::string potential_file;
    double L = 1.0;
};

int cmd_limits(const LimitsArgs& args) {
    const RadialPotential pot = load_potential_file(args.potential_file);
    const RegularizedMap rad = RegularizedMap::radial(pot, args.L);
    const RegularizedMap cla = RegularizedMap::clairaut(pot, args.L);
    const CircularLimits lr = rad.circular_limits();
    const CircularLimits lc = cla.circular_limits();
    json out;
    out["L"] = args.L;
    out["omega0"] = rad.omega0();
    out["radial"] = {{"lim_T", lr.T}, {"lim_dT_dH", lr.dT_dH}, {"lim_dT_dL", lr.dT_dL}};
    const double lim_theta = args.L * lc.T;
    const double lim_dTheta_dH = args.L * lc.dT_dH;
    const double lim_dTheta_dL = lc.T + args.L * lc.dT_dL;
    out["apsidal"] = {{"lim_Theta", lim_theta},
                      {"lim_dTheta_dH", lim_dTheta_dH},
                      {"lim_dTheta_dL", lim_dTheta_dL}};
    out["lim_D"] = lr.dT_dH * lim_dTheta_dL - lr.dT_dL * lim_dTheta_dH;
    std::cout << out.dump(2) << '\n';
    return kExitOk;
}

struct InfoArgs {
    std::string potential_file;
    double L = std::numeric_limits<double>::quiet_NaN();
    double r = std::numeric_limits<double>::quiet_NaN();
};

int cmd_potential_info(const InfoArgs& args) {
    const RadialPotential pot = load_potential_file(args.potential_file);
    json out;
    out["potential"] = potential_to_json(pot);
    out["domain"] = {pot.domain_lo(), pot.domain_hi()};
    if (!std::isnan(args.r)) {
        const auto d = pot.derivatives(args.r, 4);
        out["at_r"] = {{"r", args.r}, {"V", d[0]}, {"V1", d[1]}, {"V2", d[2]}, {"V3", d[3]}, {"V4", d[4]}};
    }
    if (!std::isnan(args.L)) {
        const RegularizedMap rad = RegularizedMap::radial(pot, args.L);
        const auto& c = rad.circular();
        out["center"] = {{"L", args.L},       {"s0", c.s0},         {"omega0", c.omega0},
                         {"omega2", c.omega2}, {"omega3", c.omega3}, {"omega4", c.omega4},
                         {"sigma0", c.sigma0}, {"H0", rad.H0()}};
    }
    std::cout << out.dump(2) << '\n';
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"central force time maps, invariant tori, and periodic-orbit continuation"};
    app.require_subcommand(1);

    ScanArgs scan_args;
    auto* scan = app.add_subcommand("scan", "time-map grid scan to CSV");
    scan->add_option("--potential", scan_args.potential_file, "potential file (.toml/.json)")->required();
    scan->add_option("--H-min", scan_args.H_min)->required();
    scan->add_option("--H-max", scan_args.H_max)->required();
    scan->add_option("--H-count", scan_args.H_count)->required();
    scan->add_option("--L-min", scan_args.L_min)->required();
    scan->add_option("--L-max", scan_args.L_max)->required();
    scan->add_option("--L-count", scan_args.L_count)->required();
    scan->add_option("--output", scan_args.output, "CSV path (default stdout)");
    scan->add_option("--threads", scan_args.threads, "worker cap (ORBITA_THREADS overrides)");

    TorusArgs torus_args;
    auto* ft = app.add_subcommand("find-torus", "locate an (n,k) invariant torus");
    ft->add_option("--potential", torus_args.potential_file, "potential file (general path; needs seed)");
    ft->add_option("--alpha", torus_args.alpha, "homogeneous exponent (no-seed path)");
    ft->add_option("--kappa", torus_args.kappa);
    ft->add_option("--tau", torus_args.tau)->required();
    ft->add_option("--n", torus_args.n)->required();
    ft->add_option("--k", torus_args.k)->required();
    ft->add_option("--ell", torus_args.ell);
    ft->add_option("--seed-H", torus_args.seed_H);
    ft->add_option("--seed-L", torus_args.seed_L);
    ft->add_option("--output", torus_args.output, "JSON path (default stdout)");

    VerifyArgs verify_args;
    auto* verify = app.add_subcommand("verify", "ODE verification of a torus file");
    verify->add_option("--torus", verify_args.torus_file)->required();
    verify->add_option("--closure-tol", verify_args.closure_tol);

    ContinueArgs continue_args;
    auto* cont = app.add_subcommand("continue", "continue a torus under a uniform drive");
    cont->add_option("--torus", continue_args.torus_file)->required();
    cont->add_option("--epsilon", continue_args.epsilon)->required();
    cont->add_option("--drive-ex", continue_args.ex);
    cont->add_option("--drive-ey", continue_args.ey);
    cont->add_option("--N-lambda", continue_args.N_lambda);
    cont->add_option("--N-phi", continue_args.N_phi);
    cont->add_flag("--reflect", continue_args.reflect, "search from the reflected (L < 0) torus");
    cont->add_option("--output", continue_args.output, "JSON path (default stdout)");

    R3BArgs r3b_args;
    auto* r3b = app.add_subcommand("r3b", "restricted 3-body periodic orbits");
    r3b->add_option("--alpha", r3b_args.alpha)->required();
    r3b->add_option("--m", r3b_args.m)->required();
    r3b->add_option("--n", r3b_args.n)->required();
    r3b->add_option("--k", r3b_args.k)->required();
    r3b->add_option("--count", r3b_args.count);
    r3b->add_option("--output-dir", r3b_args.output_dir);

    LimitsArgs limits_args;
    auto* limits = app.add_subcommand("limits", "circular-orbit limits of the time maps");
    limits->add_option("--potential", limits_args.potential_file)->required();
    limits->add_option("--L", limits_args.L)->required();

    InfoArgs info_args;
    auto* info = app.add_subcommand("potential-info", "inspect a potential file");
    info->add_option("--potential", info_args.potential_file)->required();
    info->add_option("--L", info_args.L, "also report the circular center at this L");
    info->add_option("--r", info_args.r, "also report V and derivatives at this radius");

    try {
        app.parse(argc, argv);
        if (scan->parsed())
            return cmd_scan(scan_args);
        if (ft->parsed())
            return cmd_find_torus(torus_args);
        if (verify->parsed())
            return cmd_verify(verify_args);
        if (cont->parsed())
            return cmd_continue(continue_args);
        if (r3b->parsed())
            return cmd_r3b(r3b_args);
        if (limits->parsed())
            return cmd_limits(limits_args);
        if (info->parsed())
            return cmd_potential_info(info_args);
        return kExitConfig;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    } catch (const ParameterError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DomainError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const InadmissibleRatioError& e) {
        std::cerr << "inadmissible: " << e.what() << '\n';
        return kExitConfig;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNoConvergence;
    }
}
