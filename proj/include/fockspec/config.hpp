#pragma once

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fockspec/model.hpp"
#include "fockspec/torus_grid.hpp"

namespace fockspec {

/// Raised for malformed or unknown configuration input.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GridSettings {
  int n_per_axis = 4;
  bool offset = true;
  int grading = 24;
  int points_per_cell = 3;

  TorusGrid build() const { return build_grid(n_per_axis, offset, grading, points_per_cell); }
};

struct ModelConfig {
  std::vector<EpsTerm> eps_terms;
  double eps_zero = 0.0;
  double c = 0.0;
  double u0 = 0.0;
  std::string v_kind = "constant";
  std::vector<double> v_params{1.0};
  GridSettings grid;

  ModelSpec model() const {
    return ModelSpec(eps_terms, eps_zero, c, u0, FormFactor::from_name(v_kind, v_params));
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

/**
 * @brief Parses a flat `key = value` model file.
 *
 * Values are JSON literals. Lines starting with '#' are comments.
 * Unknown or repeated keys are rejected.
 *
 * Keys: eps.coeffs (list of [s1, s2, s3, value]), eps.zero, c, u0,
 * v.kind, v.params, grid.n_per_axis, grid.offset, grid.grading, grid.points_per_cell.
 */
inline ModelConfig parse_model_config(std::istream& in, const std::string& origin = "<config>") {
  static const std::set<std::string> known{"eps.coeffs",     "eps.zero",    "c",
                                           "u0",             "v.kind",      "v.params",
                                           "grid.n_per_axis", "grid.offset", "grid.grading",
                                           "grid.points_per_cell"};
  ModelConfig cfg;
  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    auto where = [&] { return origin + ":" + std::to_string(lineno) + ": "; };
    if (eq == std::string::npos) throw ConfigError(where() + "expected key = value");
    const std::string key = detail::trim(t.substr(0, eq));
    const std::string text = detail::trim(t.substr(eq + 1));
    if (!known.count(key)) throw ConfigError(where() + "unknown key '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError(where() + "duplicate key '" + key + "'");

    nlohmann::json val;
    try {
      val = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(where() + "value of '" + key + "' is not valid JSON: " + e.what());
    }
    try {
      if (key == "eps.coeffs") {
        cfg.eps_terms.clear();
        for (const auto& row : val) {
          if (!row.is_array() || row.size() != 4) throw ConfigError(where() + "eps.coeffs rows are [s1, s2, s3, value]");
          cfg.eps_terms.push_back({LatticeVector{row[0].get<int>(), row[1].get<int>(), row[2].get<int>()},
                                   row[3].get<double>()});
        }
      } else if (key == "eps.zero") {
        cfg.eps_zero = val.get<double>();
      } else if (key == "c") {
        cfg.c = val.get<double>();
      } else if (key == "u0") {
        cfg.u0 = val.get<double>();
      } else if (key == "v.kind") {
        cfg.v_kind = val.get<std::string>();
      } else if (key == "v.params") {
        cfg.v_params = val.get<std::vector<double>>();
      } else if (key == "grid.n_per_axis") {
        cfg.grid.n_per_axis = val.get<int>();
      } else if (key == "grid.offset") {
        cfg.grid.offset = val.get<bool>();
      } else if (key == "grid.grading") {
        cfg.grid.grading = val.get<int>();
      } else if (key == "grid.points_per_cell") {
        cfg.grid.points_per_cell = val.get<int>();
      }
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(where() + "bad value for '" + key + "': " + e.what());
    }
  }
  if (!seen.count("eps.coeffs")) throw ConfigError(origin + ": missing required key eps.coeffs");
  if (cfg.grid.n_per_axis < 2) throw ConfigError(origin + ": grid.n_per_axis must be >= 2");
  if (cfg.grid.grading < 0 || cfg.grid.grading > 40) throw ConfigError(origin + ": grid.grading must be in [0, 40]");
  if (cfg.grid.points_per_cell < 1 || cfg.grid.points_per_cell > 4)
    throw ConfigError(origin + ": grid.points_per_cell must be in [1, 4]");
  try {
    (void)cfg.model();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  return cfg;
}

inline ModelConfig load_model_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model file '" + path + "'");
  return parse_model_config(in, path);
}

inline std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Canonical text of a model: the input of the model hash.
inline std::string canonical_text(const ModelSpec& m) {
  std::ostringstream os;
  os << "eps0=" << format_g17(m.eps0()) << ";c=" << format_g17(m.c()) << ";u0=" << format_g17(m.u0());
  for (const auto& t : m.eps_terms())
    os << ";s=" << t.s[0] << "," << t.s[1] << "," << t.s[2] << ":" << format_g17(t.value);
  os << ";v=" << m.form_factor().name();
  for (double p : m.form_factor().params()) os << "," << format_g17(p);
  return os.str();
}

/// 64-bit FNV-1a hash as 16 hex digits.
inline std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string model_hash(const ModelSpec& m) { return fnv1a_hex(canonical_text(m)); }

}  // namespace fockspec
