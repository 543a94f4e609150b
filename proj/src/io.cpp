#include "orbita/io.hpp"

#include "orbita/errors.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace orbita {

using nlohmann::json;

namespace {

EnergyCeiling ceiling_from_string(const std::string& s) {
    if (s == "decays_to_zero")
        return EnergyCeiling::decays_to_zero;
    if (s == "coercive")
        return EnergyCeiling::coercive;
    if (s == "interior_maximum")
        return EnergyCeiling::interior_maximum;
    throw ParameterError("unknown ceiling '" + s + "'");
}

std::string ceiling_to_string(EnergyCeiling c) {
    switch (c) {
        case EnergyCeiling::decays_to_zero: return "decays_to_zero";
        case EnergyCeiling::coercive: return "coercive";
        case EnergyCeiling::interior_maximum: return "interior_maximum";
    }
    return "decays_to_zero";
}

double need_number(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number())
        throw ParameterError(std::string("potential file: missing numeric key '") + key + "'");
    return j[key].get<double>();
}

} // namespace

RadialPotential potential_from_json(const json& j) {
    if (!j.contains("family") || !j["family"].is_string())
        throw ParameterError("potential file: missing string key 'family'");
    const std::string family = j["family"].get<std::string>();
    if (family == "homogeneous")
        return RadialPotential::homogeneous(need_number(j, "kappa"), need_number(j, "alpha"));
    if (family == "logarithmic")
        return RadialPotential::logarithmic(need_number(j, "kappa"));
    if (family == "levi_civita")
        return RadialPotential::levi_civita(need_number(j, "kappa"), need_number(j, "lambda"));
    if (family == "lennard_jones")
        return RadialPotential::lennard_jones(need_number(j, "varsigma"), need_number(j, "sigma"));
    if (family == "custom") {
        if (!j.contains("terms") || !j["terms"].is_array())
            throw ParameterError("potential file: custom family requires 'terms' = [[c, p], ...]");
        std::vector<PowerTerm> terms;
        for (const auto& t : j["terms"]) {
            if (!t.is_array() || t.size() != 2)
                throw ParameterError("potential file: each term must be a [coefficient, exponent] pair");
            terms.push_back({t[0].get<double>(), t[1].get<double>()});
        }
        const double log_c = j.value("log_coefficient", 0.0);
        double lo = 0.0, hi = std::numeric_limits<double>::infinity();
        if (j.contains("domain")) {
            lo = j["domain"][0].get<double>();
            hi = j["domain"][1].get<double>();
        }
        const EnergyCeiling ceiling = ceiling_from_string(j.value("ceiling", "decays_to_zero"));
        return RadialPotential(std::move(terms), log_c, lo, hi, j.value("label", "custom"), ceiling);
    }
    throw ParameterError("potential file: unknown family '" + family + "'");
}

json potential_to_json(const RadialPotential& p) {
    json j;
    switch (p.family()) {
        case PotentialFamily::homogeneous:
            j["family"] = "homogeneous";
            j["kappa"] = p.kappa();
            j["alpha"] = p.alpha();
            return j;
        case PotentialFamily::logarithmic:
            j["family"] = "logarithmic";
            j["kappa"] = p.kappa();
            return j;
        case PotentialFamily::levi_civita:
            j["family"] = "levi_civita";
            j["kappa"] = p.kappa();
            j["lambda"] = p.lambda();
            return j;
        case PotentialFamily::lennard_jones:
            j["family"] = "lennard_jones";
            j["varsigma"] = p.varsigma();
            j["sigma"] = p.sigma();
            return j;
        case PotentialFamily::custom:
            break;
    }
    j["family"] = "custom";
    json terms = json::array();
    for (const auto& t : p.terms())
        terms.push_back({t.coefficient, t.exponent});
    j["terms"] = terms;
    j["log_coefficient"] = p.log_coefficient();
    if (p.domain_lo() != 0.0 || std::isfinite(p.domain_hi()))
        j["domain"] = {p.domain_lo(), p.domain_hi()};
    j["ceiling"] = ceiling_to_string(p.ceiling());
    j["label"] = p.label();
    return j;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a])))
        ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1])))
        --b;
    return s.substr(a, b - a);
}

// Parse one TOML scalar or (nested) numeric array into json.
json parse_toml_value(const std::string& raw) {
    const std::string v = trim(raw);
    if (v.empty())
        throw ParameterError("flat toml: empty value");
    if (v.front() == '"') {
        if (v.size() < 2 || v.back() != '"')
            throw ParameterError("flat toml: unterminated string " + v);
        return v.substr(1, v.size() - 2);
    }
    if (v == "true")
        return true;
    if (v == "false")
        return false;
    if (v.front() == '[') {
        if (v.back() != ']')
            throw ParameterError("flat toml: unterminated array " + v);
        json arr = json::array();
        int depth = 0;
        std::string item;
        for (std::size_t i = 1; i + 1 < v.size(); ++i) {
            const char c = v[i];
            if (c == '[')
                ++depth;
            if (c == ']')
                --depth;
            if (c == ',' && depth == 0) {
                arr.push_back(parse_toml_value(item));
                item.clear();
            } else {
                item += c;
            }
        }
        if (!trim(item).empty())
            arr.push_back(parse_toml_value(item));
        return arr;
    }
    std::size_t used = 0;
    const double num = std::stod(v, &used);
    if (used != v.size())
        throw ParameterError("flat toml: cannot parse value '" + v + "'");
    return num;
}

} // namespace

json parse_flat_toml(const std::string& text) {
    json out = json::object();
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        // strip comments outside strings
        bool in_string = false;
        std::string body;
        for (char c : line) {
            if (c == '"')
                in_string = !in_string;
            if (c == '#' && !in_string)
                break;
            body += c;
        }
        body = trim(body);
        if (body.empty())
            continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw ParameterError("flat toml: line " + std::to_string(lineno) + " has no '='");
        const std::string key = trim(body.substr(0, eq));
        if (key.empty())
            throw ParameterError("flat toml: line " + std::to_string(lineno) + " has an empty key");
        out[key] = parse_toml_value(body.substr(eq + 1));
    }
    return out;
}

RadialPotential load_potential_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParameterError("cannot open potential file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    if (path.size() > 5 && path.substr(path.size() - 5) == ".json")
        return potential_from_json(json::parse(text));
    return potential_from_json(parse_flat_toml(text));
}

json torus_to_json(const TorusSolution& torus, const RadialPotential& potential) {
    json j;
    j["n"] = torus.n;
    j["k"] = torus.k;
    j["tau"] = torus.tau;
    j["ell"] = torus.ell;
    j["H"] = torus.H;
    j["L"] = torus.L;
    j["I1"] = torus.I1;
    j["I2"] = torus.I2;
    j["D"] = torus.D;
    j["residuals"] = {{"T", torus.residual_T}, {"Theta", torus.residual_Theta}};
    j["potential"] = potential_to_json(potential);
    return j;
}

TorusSolution torus_from_json(const json& j) {
    TorusSolution t;
    t.n = j.at("n").get<int>();
    t.k = j.at("k").get<int>();
    t.tau = j.at("tau").get<double>();
    t.ell = j.value("ell", 1);
    t.H = j.at("H").get<double>();
    t.L = j.at("L").get<double>();
    t.I1 = j.value("I1", 0.0);
    t.I2 = j.value("I2", t.L);
    t.D = j.value("D", 0.0);
    if (j.contains("residuals")) {
        t.residual_T = j["residuals"].value("T", 0.0);
        t.residual_Theta = j["residuals"].value("Theta", 0.0);
    }
    return t;
}

std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

} // namespace orbita
