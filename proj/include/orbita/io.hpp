#ifndef ORBITA_IO_HPP
#define ORBITA_IO_HPP

#include "orbita/potential.hpp"
#include "orbita/tori.hpp"

#include <json.hpp>

#include <string>

namespace orbita {

/// Parse a potential description from JSON keys
///   { "family": "levi_civita", "kappa": 1.0, "lambda": 0.1 }
/// or the custom form
///   { "family": "custom", "terms": [[c, p], ...], "log_coefficient": 0.0,
///     "domain": [lo, hi], "ceiling": "decays_to_zero", "label": "..." }.
RadialPotential potential_from_json(const nlohmann::json& j);
nlohmann::json potential_to_json(const RadialPotential& p);

/// Load a potential from a .json file or a flat .toml file carrying the
/// same keys (`key = value` pairs, numbers, strings and nested numeric
/// arrays; `#` comments).
RadialPotential load_potential_file(const std::string& path);

/// Flat-TOML reader used by load_potential_file; exposed for tests.
nlohmann::json parse_flat_toml(const std::string& text);

nlohmann::json torus_to_json(const TorusSolution& torus, const RadialPotential& potential);
TorusSolution torus_from_json(const nlohmann::json& j);

/// Number formatting with 17 significant digits (CSV contract).
std::string format_g17(double x);

} // namespace orbita

#endif
