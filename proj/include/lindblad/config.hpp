#pragma once

#include <cctype>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lindblad/complex_matrix.hpp"

// Flat `key = value` run configuration. Unknown keys, malformed values, and
// out-of-range settings are all collected and reported together.

namespace lindblad {

class ConfigError : public InvalidInputError {
 public:
  explicit ConfigError(std::vector<std::string> problems)
      : InvalidInputError(join(problems)), problems_(std::move(problems)) {}

  const std::vector<std::string>& problems() const { return problems_; }

 private:
  static std::string join(const std::vector<std::string>& problems) {
    std::string all = "invalid configuration:";
    for (const auto& p : problems) all += "\n  - " + p;
    return all;
  }
  std::vector<std::string> problems_;
};

enum class Scenario {
  battery,
  lightcone,
  rme,
  expansion,
  basic_equality,
  stationary,
  conjecture,
  audit
};

inline const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::battery: return "battery";
    case Scenario::lightcone: return "lightcone";
    case Scenario::rme: return "rme";
    case Scenario::expansion: return "expansion";
    case Scenario::basic_equality: return "basic-equality";
    case Scenario::stationary: return "stationary";
    case Scenario::conjecture: return "conjecture";
    case Scenario::audit: return "audit";
  }
  return "?";
}

enum class StationaryChoice { none, uniform, solve };

struct RunConfig {
  Scenario scenario = Scenario::battery;
  std::uint64_t seed = 0;
  std::string output_dir = ".";

  int half_width = 60;
  double hopping = 1.0;
  int hopping_range = 1;
  double potential = 0.0;           // uniform on-site value
  std::string kraus = "dephasing";  // dephasing | directed_jump | none
  double strength = 1.0;
  int order = 3;

  double initial_center = 0.0;
  double initial_width = 1.5;
  double radius_b = 2.0;
  StationaryChoice stationary = StationaryChoice::none;

  std::string backend = "rk4";  // rk4 | superop_exp
  std::optional<double> dt;     // nullopt = auto
  double t_final = 20.0;
  int samples = 41;
  int positivity_checks = 16;

  std::optional<double> speed_outer;  // nullopt = auto (1.5 kappa)
  std::optional<double> speed_inner;  // nullopt = auto (1.2 kappa)
  double frame_a = 3.0;
  std::vector<double> cone_scales = {4.0, 5.656854249492381, 8.0, 11.313708498984761, 16.0};
  int eta_count = 24;

  std::vector<double> rme_scales = {8.0, 16.0, 32.0, 64.0};
  double rme_frame_a = 3.0;

  std::vector<int> expansion_orders = {2, 3, 4};
  std::vector<double> expansion_scales = {4.0, 8.0, 16.0, 32.0, 64.0};
  std::vector<double> expansion_offsets = {1.5, 4.5, 9.0};

  double equality_scale = 8.0;
  int equality_nodes = 121;

  int conjecture_trials = 50;
  double conjecture_strength = 1.0;
  double conjecture_amplitude = 1.0;
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

struct ConfigParser {
  std::vector<std::string> problems;

  bool parse_double(const std::string& key, const std::string& value, double& out) {
    try {
      std::size_t used = 0;
      const double v = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
      out = v;
      return true;
    } catch (const std::exception&) {
      problems.push_back(key + ": expected a number, got '" + value + "'");
      return false;
    }
  }

  bool parse_int(const std::string& key, const std::string& value, int& out) {
    try {
      std::size_t used = 0;
      const long v = std::stol(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
      out = static_cast<int>(v);
      return true;
    } catch (const std::exception&) {
      problems.push_back(key + ": expected an integer, got '" + value + "'");
      return false;
    }
  }

  bool parse_u64(const std::string& key, const std::string& value, std::uint64_t& out) {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
      out = v;
      return true;
    } catch (const std::exception&) {
      problems.push_back(key + ": expected a non-negative integer, got '" + value + "'");
      return false;
    }
  }

  bool parse_auto_double(const std::string& key, const std::string& value,
                         std::optional<double>& out) {
    if (value == "auto") {
      out = std::nullopt;
      return true;
    }
    double v = 0.0;
    if (!parse_double(key, value, v)) return false;
    out = v;
    return true;
  }

  bool parse_double_list(const std::string& key, const std::string& value,
                         std::vector<double>& out) {
    std::vector<double> items;
    std::stringstream ss(value);
    std::string part;
    while (std::getline(ss, part, ',')) {
      part = trim(part);
      if (part.empty()) continue;
      double v = 0.0;
      if (!parse_double(key, part, v)) return false;
      items.push_back(v);
    }
    if (items.empty()) {
      problems.push_back(key + ": expected a comma-separated list of numbers");
      return false;
    }
    out = std::move(items);
    return true;
  }

  bool parse_int_list(const std::string& key, const std::string& value, std::vector<int>& out) {
    std::vector<double> items;
    if (!parse_double_list(key, value, items)) return false;
    out.clear();
    for (double v : items) out.push_back(static_cast<int>(v));
    return true;
  }
};

}  // namespace detail

inline RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  detail::ConfigParser p;

  std::stringstream stream(text);
  std::string line;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      p.problems.push_back("line " + std::to_string(line_no) + ": expected 'key = value'");
      continue;
    }
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (value.empty()) {
      p.problems.push_back(key + ": empty value");
      continue;
    }

    if (key == "scenario") {
      if (value == "battery") cfg.scenario = Scenario::battery;
      else if (value == "lightcone") cfg.scenario = Scenario::lightcone;
      else if (value == "rme") cfg.scenario = Scenario::rme;
      else if (value == "expansion") cfg.scenario = Scenario::expansion;
      else if (value == "basic-equality") cfg.scenario = Scenario::basic_equality;
      else if (value == "stationary") cfg.scenario = Scenario::stationary;
      else if (value == "conjecture") cfg.scenario = Scenario::conjecture;
      else if (value == "audit") cfg.scenario = Scenario::audit;
      else p.problems.push_back("scenario: unknown scenario '" + value + "'");
    } else if (key == "seed") {
      p.parse_u64(key, value, cfg.seed);
    } else if (key == "output.dir") {
      cfg.output_dir = value;
    } else if (key == "lattice.half_width") {
      p.parse_int(key, value, cfg.half_width);
    } else if (key == "model.hopping") {
      p.parse_double(key, value, cfg.hopping);
    } else if (key == "model.hopping_range") {
      p.parse_int(key, value, cfg.hopping_range);
    } else if (key == "model.potential") {
      p.parse_double(key, value, cfg.potential);
    } else if (key == "model.kraus") {
      if (value == "dephasing" || value == "directed_jump" || value == "none") cfg.kraus = value;
      else p.problems.push_back("model.kraus: expected dephasing|directed_jump|none, got '" +
                                value + "'");
    } else if (key == "model.strength") {
      p.parse_double(key, value, cfg.strength);
    } else if (key == "model.order") {
      p.parse_int(key, value, cfg.order);
    } else if (key == "initial.center") {
      p.parse_double(key, value, cfg.initial_center);
    } else if (key == "initial.width") {
      p.parse_double(key, value, cfg.initial_width);
    } else if (key == "initial.radius_b") {
      p.parse_double(key, value, cfg.radius_b);
    } else if (key == "initial.stationary") {
      if (value == "none") cfg.stationary = StationaryChoice::none;
      else if (value == "uniform") cfg.stationary = StationaryChoice::uniform;
      else if (value == "solve") cfg.stationary = StationaryChoice::solve;
      else p.problems.push_back("initial.stationary: expected none|uniform|solve, got '" +
                                value + "'");
    } else if (key == "evolve.backend") {
      if (value == "rk4" || value == "superop_exp") cfg.backend = value;
      else p.problems.push_back("evolve.backend: expected rk4|superop_exp, got '" + value + "'");
    } else if (key == "evolve.dt") {
      p.parse_auto_double(key, value, cfg.dt);
    } else if (key == "evolve.t_final") {
      p.parse_double(key, value, cfg.t_final);
    } else if (key == "evolve.samples") {
      p.parse_int(key, value, cfg.samples);
    } else if (key == "evolve.positivity_checks") {
      p.parse_int(key, value, cfg.positivity_checks);
    } else if (key == "cone.speed_outer") {
      p.parse_auto_double(key, value, cfg.speed_outer);
    } else if (key == "cone.speed_inner") {
      p.parse_auto_double(key, value, cfg.speed_inner);
    } else if (key == "cone.frame_a") {
      p.parse_double(key, value, cfg.frame_a);
    } else if (key == "cone.scales") {
      p.parse_double_list(key, value, cfg.cone_scales);
    } else if (key == "front.eta_count") {
      p.parse_int(key, value, cfg.eta_count);
    } else if (key == "rme.scales") {
      p.parse_double_list(key, value, cfg.rme_scales);
    } else if (key == "rme.frame_a") {
      p.parse_double(key, value, cfg.rme_frame_a);
    } else if (key == "expansion.orders") {
      p.parse_int_list(key, value, cfg.expansion_orders);
    } else if (key == "expansion.scales") {
      p.parse_double_list(key, value, cfg.expansion_scales);
    } else if (key == "expansion.offsets") {
      p.parse_double_list(key, value, cfg.expansion_offsets);
    } else if (key == "equality.scale_s") {
      p.parse_double(key, value, cfg.equality_scale);
    } else if (key == "equality.nodes") {
      p.parse_int(key, value, cfg.equality_nodes);
    } else if (key == "conjecture.trials") {
      p.parse_int(key, value, cfg.conjecture_trials);
    } else if (key == "conjecture.strength") {
      p.parse_double(key, value, cfg.conjecture_strength);
    } else if (key == "conjecture.potential_amplitude") {
      p.parse_double(key, value, cfg.conjecture_amplitude);
    } else {
      p.problems.push_back("unknown key '" + key + "'");
    }
  }

  // range checks on whatever parsed cleanly
  if (cfg.half_width < 1) p.problems.push_back("lattice.half_width: must be >= 1");
  if (cfg.hopping_range < 1) p.problems.push_back("model.hopping_range: must be >= 1");
  if (cfg.strength < 0.0) p.problems.push_back("model.strength: must be >= 0");
  if (cfg.order < 2 || cfg.order > 8) p.problems.push_back("model.order: must be in [2, 8]");
  if (!(cfg.initial_width > 0.0)) p.problems.push_back("initial.width: must be > 0");
  if (!(cfg.radius_b > 0.0)) p.problems.push_back("initial.radius_b: must be > 0");
  if (!(cfg.t_final > 0.0)) p.problems.push_back("evolve.t_final: must be > 0");
  if (cfg.samples < 2) p.problems.push_back("evolve.samples: must be >= 2");
  if (cfg.positivity_checks < 0) p.problems.push_back("evolve.positivity_checks: must be >= 0");
  if (cfg.dt && !(*cfg.dt > 0.0)) p.problems.push_back("evolve.dt: must be > 0 or auto");
  if (cfg.speed_outer && !(*cfg.speed_outer > 0.0))
    p.problems.push_back("cone.speed_outer: must be > 0 or auto");
  if (cfg.speed_inner && !(*cfg.speed_inner > 0.0))
    p.problems.push_back("cone.speed_inner: must be > 0 or auto");
  if (!(cfg.frame_a > cfg.radius_b))
    p.problems.push_back(
        "cone.frame_a: must exceed initial.radius_b (the cone offset a must enclose the "
        "initial localization radius b)");
  if (cfg.eta_count < 4) p.problems.push_back("front.eta_count: must be >= 4");
  for (int n : cfg.expansion_orders)
    if (n < 2 || n > 8) p.problems.push_back("expansion.orders: entries must be in [2, 8]");
  if (cfg.equality_nodes < 3 || cfg.equality_nodes % 2 == 0)
    p.problems.push_back("equality.nodes: must be odd and >= 3");
  if (cfg.conjecture_trials < 1) p.problems.push_back("conjecture.trials: must be >= 1");

  if (!p.problems.empty()) throw ConfigError(std::move(p.problems));
  return cfg;
}

// Canonical config text with every key at its default; parses back losslessly.
inline std::string default_config_text() {
  return
      "# lindblad-lightcone run configuration\n"
      "scenario = battery\n"
      "seed = 0\n"
      "output.dir = .\n"
      "\n"
      "lattice.half_width = 60\n"
      "model.hopping = 1.0\n"
      "model.hopping_range = 1\n"
      "model.potential = 0.0\n"
      "model.kraus = dephasing\n"
      "model.strength = 1.0\n"
      "model.order = 3\n"
      "\n"
      "initial.center = 0.0\n"
      "initial.width = 1.5\n"
      "initial.radius_b = 2.0\n"
      "initial.stationary = none\n"
      "\n"
      "evolve.backend = rk4\n"
      "evolve.dt = auto\n"
      "evolve.t_final = 20.0\n"
      "evolve.samples = 41\n"
      "evolve.positivity_checks = 16\n"
      "\n"
      "cone.speed_outer = auto\n"
      "cone.speed_inner = auto\n"
      "cone.frame_a = 3.0\n"
      "cone.scales = 4,5.656854249492381,8,11.313708498984761,16\n"
      "front.eta_count = 24\n"
      "\n"
      "rme.scales = 8,16,32,64\n"
      "rme.frame_a = 3.0\n"
      "\n"
      "expansion.orders = 2,3,4\n"
      "expansion.scales = 4,8,16,32,64\n"
      "expansion.offsets = 1.5,4.5,9.0\n"
      "\n"
      "equality.scale_s = 8.0\n"
      "equality.nodes = 121\n"
      "\n"
      "conjecture.trials = 50\n"
      "conjecture.strength = 1.0\n"
      "conjecture.potential_amplitude = 1.0\n";
}

}  // namespace lindblad
