#include "orbita/errors.hpp"
#include "orbita/io.hpp"
#include "orbita/tori.hpp"

#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

using namespace orbita;
using nlohmann::json;

TEST_SUITE_BEGIN("io");

TEST_CASE("flat toml parsing") {
    const json j = parse_flat_toml("# a potential\n"
                                   "family = \"levi_civita\"  # inline comment\n"
                                   "kappa = 1.0\n"
                                   "lambda = 0.1\n");
    CHECK(j["family"] == "levi_civita");
    CHECK(j["kappa"] == 1.0);
    CHECK(j["lambda"] == 0.1);

    const json arr = parse_flat_toml("terms = [[1.0, -1.0], [0.1, -2.0]]\nlog_coefficient = 0.0\n"
                                     "family = \"custom\"\n");
    CHECK(arr["terms"].size() == 2);
    CHECK(arr["terms"][1][1] == -2.0);

    CHECK_THROWS_AS(parse_flat_toml("novalue\n"), ParameterError);
    CHECK_THROWS_AS(parse_flat_toml("x = \n"), ParameterError);
    CHECK_THROWS_AS(parse_flat_toml("x = [1, 2\n"), ParameterError);
}

TEST_CASE("potential from json for every family") {
    const auto lc = potential_from_json(json{{"family", "levi_civita"}, {"kappa", 1.0}, {"lambda", 0.1}});
    CHECK(lc(1.0) == doctest::Approx(1.1));
    const auto hom = potential_from_json(json{{"family", "homogeneous"}, {"kappa", 2.0}, {"alpha", 0.5}});
    CHECK(hom.alpha() == 0.5);
    const auto log = potential_from_json(json{{"family", "logarithmic"}, {"kappa", 1.5}});
    CHECK(log.family() == PotentialFamily::logarithmic);
    const auto lj =
        potential_from_json(json{{"family", "lennard_jones"}, {"varsigma", 1.0}, {"sigma", 1.0}});
    CHECK(lj(2.0) == doctest::Approx(0.0615234375));
    const auto custom = potential_from_json(
        json{{"family", "custom"}, {"terms", {{1.0, -1.0}, {0.1, -2.0}}}, {"ceiling", "decays_to_zero"}});
    CHECK(custom(1.0) == doctest::Approx(1.1));

    CHECK_THROWS_AS(potential_from_json(json{{"family", "unknown"}}), ParameterError);
    CHECK_THROWS_AS(potential_from_json(json{{"family", "homogeneous"}, {"kappa", 1.0}}), ParameterError);
}

TEST_CASE("potential json round trip") {
    const auto lj = RadialPotential::lennard_jones(1.3, 0.9);
    const auto back = potential_from_json(potential_to_json(lj));
    for (double r : {0.8, 1.1, 2.5})
        CHECK(back(r) == doctest::Approx(lj(r)).epsilon(1e-15));

    const RadialPotential custom({{2.0, -3.0}}, 0.5, 0.1, 10.0, "windowed", EnergyCeiling::coercive);
    const auto back2 = potential_from_json(potential_to_json(custom));
    CHECK(back2.domain_lo() == custom.domain_lo());
    CHECK(back2.ceiling() == custom.ceiling());
    CHECK(back2(1.0) == doctest::Approx(custom(1.0)));
}

TEST_CASE("torus json round trip") {
    TorusSolution t;
    t.n = 4;
    t.k = 3;
    t.tau = 2.0 * M_PI;
    t.ell = 2;
    t.H = -1.25;
    t.L = 0.37;
    t.I1 = 0.8;
    t.I2 = 0.37;
    t.D = 3.25;
    t.residual_T = 1e-12;
    t.residual_Theta = 2e-12;
    const json j = torus_to_json(t, RadialPotential::homogeneous(1.0, 0.5));
    const TorusSolution back = torus_from_json(j);
    CHECK(back.n == 4);
    CHECK(back.k == 3);
    CHECK(back.ell == 2);
    CHECK(back.H == t.H);
    CHECK(back.L == t.L);
    CHECK(back.residual_Theta == t.residual_Theta);
    const auto pot = potential_from_json(j["potential"]);
    CHECK(pot.alpha() == 0.5);
}

TEST_CASE("g17 formatting keeps 17 significant digits") {
    CHECK(format_g17(2.0 * M_PI) == "6.2831853071795862");
    CHECK(format_g17(0.1) == "0.10000000000000001");
    CHECK(format_g17(-1.0) == "-1");
}

TEST_SUITE_END();

// ---------------------------------------------------------------------------
// CLI: spawn the built binary (path from ORBITA_CLI) against temp files.

namespace {

struct CliRunner {
    std::string exe;
    bool available() const { return !exe.empty(); }
    int run(const std::string& args, const std::string& out_file = "") const {
        std::string cmd = exe + " " + args;
        if (!out_file.empty())
            cmd += " > " + out_file + " 2>/dev/null";
        else
            cmd += " > /dev/null 2>&1";
        const int rc = std::system(cmd.c_str());
        return WEXITSTATUS(rc);
    }
};

CliRunner cli() {
    const char* env = std::getenv("ORBITA_CLI");
    return CliRunner{env ? env : ""};
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("scan writes full-grid CSV and signals empty windows") {
    const CliRunner c = cli();
    if (!c.available())
        return;  // only meaningful under ctest, which sets ORBITA_CLI
    write_file("/tmp/orbita_lc.toml", "family = \"levi_civita\"\nkappa = 1.0\nlambda = 0.1\n");
    int rc = c.run("scan --potential /tmp/orbita_lc.toml --H-min -0.38 --H-max -0.05 --H-count 10 "
                   "--L-min 1.0 --L-max 1.2 --L-count 10 --threads 2 --output /tmp/orbita_scan.csv");
    CHECK(rc == 0);
    const std::string csv = slurp("/tmp/orbita_scan.csv");
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "H,L,T,Theta,dT_dH,dT_dL,dTheta_dH,dTheta_dL,D,admissible");
    int rows = 0, admissible = 0, negative_D = 0;
    while (std::getline(lines, line)) {
        ++rows;
        if (line.back() == '1') {
            ++admissible;
            // column 9 is D
            std::istringstream fields(line);
            std::string f;
            for (int i = 0; i < 9; ++i)
                std::getline(fields, f, ',');
            if (std::stod(f) < 0.0)
                ++negative_D;
        }
    }
    CHECK(rows == 100);
    CHECK(admissible == 100);
    CHECK(negative_D == 100);

    // empty admissible set: LJ with L above the well bound
    write_file("/tmp/orbita_lj.toml", "family = \"lennard_jones\"\nvarsigma = 1.0\nsigma = 1.0\n");
    rc = c.run("scan --potential /tmp/orbita_lj.toml --H-min -0.01 --H-max 0.01 --H-count 3 "
               "--L-min 3.0 --L-max 3.0 --L-count 1 --output /tmp/orbita_scan2.csv");
    CHECK(rc == 3);

    // invalid config
    rc = c.run("scan --potential /tmp/missing.toml --H-min 0 --H-max 1 --H-count 2 "
               "--L-min 1 --L-max 2 --L-count 2");
    CHECK(rc == 2);
}

TEST_CASE("find-torus then verify round-trips through the JSON file") {
    const CliRunner c = cli();
    if (!c.available())
        return;
    int rc = c.run("find-torus --alpha 0.5 --n 4 --k 3 --tau 6.283185307179586 "
                   "--output /tmp/orbita_torus.json");
    CHECK(rc == 0);
    const json torus = json::parse(slurp("/tmp/orbita_torus.json"));
    CHECK(torus["n"] == 4);
    CHECK(torus["residuals"]["T"].get<double>() < 1e-10);

    rc = c.run("verify --torus /tmp/orbita_torus.json", "/tmp/orbita_verify.json");
    CHECK(rc == 0);
    const json ver = json::parse(slurp("/tmp/orbita_verify.json"));
    CHECK(ver["passed"] == true);
    CHECK(ver["winding_k"] == 3);

    // corrupt the energy: verification must fail with exit 4
    json bad = torus;
    bad["H"] = bad["H"].get<double>() * 1.02;
    write_file("/tmp/orbita_torus_bad.json", bad.dump());
    rc = c.run("verify --torus /tmp/orbita_torus_bad.json");
    CHECK(rc == 4);

    // inadmissible ratio reports a config error
    rc = c.run("find-torus --alpha 0.5 --n 2 --k 1 --tau 6.283185307179586");
    CHECK(rc == 2);
}

TEST_CASE("limits and potential-info emit JSON reports") {
    const CliRunner c = cli();
    if (!c.available())
        return;
    write_file("/tmp/orbita_lj.toml", "family = \"lennard_jones\"\nvarsigma = 1.0\nsigma = 1.0\n");
    int rc = c.run("limits --potential /tmp/orbita_lj.toml --L 0.5", "/tmp/orbita_limits.json");
    CHECK(rc == 0);
    const json lim = json::parse(slurp("/tmp/orbita_limits.json"));
    CHECK(lim["radial"]["lim_dT_dH"].get<double>() > 0.0);
    CHECK(lim["radial"]["lim_dT_dL"].get<double>() < 0.0);
    CHECK(lim["apsidal"]["lim_dTheta_dH"].get<double>() > 0.0);
    CHECK(lim["apsidal"]["lim_dTheta_dL"].get<double>() >= 0.0);
    CHECK(lim["lim_D"].get<double>() > 0.0);

    rc = c.run("potential-info --potential /tmp/orbita_lj.toml --L 0.5 --r 2.0",
               "/tmp/orbita_info.json");
    CHECK(rc == 0);
    const json info = json::parse(slurp("/tmp/orbita_info.json"));
    CHECK(info["at_r"]["V"].get<double>() == doctest::Approx(0.0615234375));
    CHECK(info["center"]["omega2"].get<double>() > 0.0);
}

TEST_CASE("deterministic scan output across thread counts and the env override") {
    const CliRunner c = cli();
    if (!c.available())
        return;
    write_file("/tmp/orbita_lc.toml", "family = \"levi_civita\"\nkappa = 1.0\nlambda = 0.1\n");
    const std::string base = "scan --potential /tmp/orbita_lc.toml --H-min -0.5 --H-max -0.3 "
                             "--H-count 4 --L-min 1.0 --L-max 1.5 --L-count 3 ";
    CHECK(c.run(base + "--threads 1 --output /tmp/orbita_scan_t1.csv") == 0);
    CHECK(c.run(base + "--threads 4 --output /tmp/orbita_scan_t4.csv") == 0);
    CHECK(slurp("/tmp/orbita_scan_t1.csv") == slurp("/tmp/orbita_scan_t4.csv"));

    // ORBITA_THREADS overrides --threads; the output stays identical
    CliRunner env = c;
    env.exe = "ORBITA_THREADS=2 " + c.exe;
    CHECK(env.run(base + "--threads 16 --output /tmp/orbita_scan_env.csv") == 0);
    CHECK(slurp("/tmp/orbita_scan_t1.csv") == slurp("/tmp/orbita_scan_env.csv"));
}

TEST_CASE("r3b emits a JSON report and trajectory CSVs") {
    const CliRunner c = cli();
    if (!c.available())
        return;
    const int rc = c.run("r3b --alpha 0.5 --m 1e-4 --n 4 --k 3 --count 1 --output-dir /tmp",
                         "/tmp/orbita_r3b.json");
    CHECK(rc == 0);
    const json rep = json::parse(slurp("/tmp/orbita_r3b.json"));
    REQUIRE(rep.size() == 1);
    CHECK(rep[0]["q_residual"].get<double>() < 1e-8);
    CHECK(rep[0]["r_plus"].get<double>() < 0.5);
    const std::string csv = slurp(rep[0]["trajectory_csv"].get<std::string>());
    CHECK(csv.rfind("t,x1,x2,v1,v2,H,L", 0) == 0);
}

TEST_CASE("continue surveys a torus file end to end") {
    const CliRunner c = cli();
    if (!c.available())
        return;
    write_file("/tmp/orbita_lc.toml", "family = \"levi_civita\"\nkappa = 1.0\nlambda = 0.1\n");
    int rc = c.run("find-torus --potential /tmp/orbita_lc.toml --seed-H -1.0 --seed-L 0.7 "
                   "--n 3 --k 4 --tau 6.283185307179586 --output /tmp/orbita_torus_lc.json");
    CHECK(rc == 0);
    rc = c.run("continue --torus /tmp/orbita_torus_lc.json --epsilon 1e-3 --N-lambda 6 --N-phi 4 "
               "--output /tmp/orbita_continue.json");
    CHECK(rc == 0);
    const json rep = json::parse(slurp("/tmp/orbita_continue.json"));
    REQUIRE(rep["orbits"].size() >= 1);
    CHECK(rep["orbits"][0]["residual"].get<double>() < 1e-9);
    CHECK(rep["orbits"][0]["winding_k"] == 4);
    CHECK(rep["orbits"][0]["distance_to_torus"].get<double>() < 0.02);
}

TEST_SUITE_END();
