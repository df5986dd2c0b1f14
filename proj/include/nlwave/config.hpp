#pragma once

// Plain-text experiment configuration.
//
//   # comment
//   scenario = gwp_growth
//   seed = 7
//   [grid]
//   r_max = 64
//   n_modes = 4096
//
// Sections: (top), grid, time, data, data_ut, study, output. Keys outside any
// section belong to the top level. Unknown keys, duplicate keys and malformed
// lines are errors reported with their line number. Lists are comma separated.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "nlwave/error.hpp"
#include "nlwave/evolve.hpp"
#include "nlwave/experiments.hpp"
#include "nlwave/io.hpp"

namespace nlwave {

struct Config {
  ExperimentConfig experiment;
  std::string out_dir = "out";
  int verbosity = 1;

  // Canonical text with every default written out.
  std::string echo() const;
  // FNV-1a of the echo, ignoring keys that cannot change results
  // (output dir, verbosity, thread count).
  std::string hash() const {
    Config c = *this;
    c.out_dir.clear();
    c.verbosity = 0;
    c.experiment.threads = 0;
    return hex64(fnv1a64(c.echo()));
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(v);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline double parse_real(const std::string& key, const std::string& v) {
  double x = 0.0;
  const char* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || p != end) throw ConfigError(key + ": expected a real number, got '" + v + "'");
  return x;
}

inline std::uint64_t parse_uint(const std::string& key, const std::string& v) {
  std::uint64_t x = 0;
  const char* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || p != end) throw ConfigError(key + ": expected a nonnegative integer, got '" + v + "'");
  return x;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

inline std::vector<double> parse_reals(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& item : split_list(v)) out.push_back(parse_real(key, item));
  return out;
}

inline std::string join_reals(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_real(v[i]);
  return s;
}

inline std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i];
  return s;
}

using Setter = std::function<void(Config&, const std::string&)>;
using Getter = std::function<std::string(const Config&)>;

struct KeySpec {
  std::string section;
  std::string key;
  Setter set;
  Getter get;
  bool allow_empty = false;
};

inline void add_profile_keys(std::vector<KeySpec>& keys, const std::string& section,
                             ProfileParams ExperimentConfig::*member) {
  auto P = [member](Config& c) -> ProfileParams& { return c.experiment.*member; };
  auto Q = [member](const Config& c) -> const ProfileParams& { return c.experiment.*member; };
  auto real = [&](const std::string& key, double ProfileParams::*field) {
    keys.push_back({section, key, [P, field, key](Config& c, const std::string& v) { P(c).*field = parse_real(key, v); },
                    [Q, field](const Config& c) { return format_real(Q(c).*field); }});
  };
  keys.push_back({section, "profile",
                  [P](Config& c, const std::string& v) {
                    try {
                      P(c).kind = parse_profile_kind(v);
                    } catch (const InvalidArgument& e) {
                      throw ConfigError(std::string("profile: ") + e.what());
                    }
                  },
                  [Q](const Config& c) { return to_string(Q(c).kind); }});
  real("amplitude", &ProfileParams::amplitude);
  real("width", &ProfileParams::width);
  real("inner", &ProfileParams::inner);
  real("thickness", &ProfileParams::thickness);
  keys.push_back({section, "mode",
                  [P](Config& c, const std::string& v) { P(c).mode = static_cast<std::size_t>(parse_uint("mode", v)); },
                  [Q](const Config& c) { return std::to_string(Q(c).mode); }});
  real("band_lo", &ProfileParams::band_lo);
  real("band_hi", &ProfileParams::band_hi);
  real("center", &ProfileParams::center);
  real("sigma", &ProfileParams::sigma);
  real("s", &ProfileParams::s);
  real("eps", &ProfileParams::eps);
  real("cutoff", &ProfileParams::cutoff);
  real("cap", &ProfileParams::cap);
  real("window", &ProfileParams::window);
}

inline const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> table = [] {
    std::vector<KeySpec> k;
    using E = ExperimentConfig;
    auto real = [&](const std::string& section, const std::string& key, double E::*field) {
      k.push_back({section, key, [field, key](Config& c, const std::string& v) { c.experiment.*field = parse_real(key, v); },
                   [field](const Config& c) { return format_real(c.experiment.*field); }});
    };
    auto count = [&](const std::string& section, const std::string& key, std::size_t E::*field) {
      k.push_back({section, key,
                   [field, key](Config& c, const std::string& v) {
                     c.experiment.*field = static_cast<std::size_t>(parse_uint(key, v));
                   },
                   [field](const Config& c) { return std::to_string(c.experiment.*field); }});
    };
    auto reals = [&](const std::string& section, const std::string& key, std::vector<double> E::*field) {
      k.push_back({section, key, [field, key](Config& c, const std::string& v) { c.experiment.*field = parse_reals(key, v); },
                   [field](const Config& c) { return join_reals(c.experiment.*field); }});
    };

    k.push_back({"", "scenario",
                 [](Config& c, const std::string& v) {
                   try {
                     c.experiment.scenario = parse_scenario(v);
                   } catch (const InvalidArgument& e) {
                     throw ConfigError(std::string("scenario: ") + e.what());
                   }
                 },
                 [](const Config& c) { return to_string(c.experiment.scenario); }});
    k.push_back({"", "seed", [](Config& c, const std::string& v) { c.experiment.seed = parse_uint("seed", v); },
                 [](const Config& c) { return std::to_string(c.experiment.seed); }});

    real("grid", "r_max", &E::r_max);
    count("grid", "n_modes", &E::n_modes);

    real("time", "dt", &E::dt);
    real("time", "t_final", &E::t_final);
    count("time", "snapshot_stride", &E::snapshot_stride);
    real("time", "margin", &E::margin);
    k.push_back({"time", "nonlinear",
                 [](Config& c, const std::string& v) { c.experiment.nonlinear = parse_bool("nonlinear", v); },
                 [](const Config& c) { return std::string(c.experiment.nonlinear ? "true" : "false"); }});

    add_profile_keys(k, "data", &E::data);
    add_profile_keys(k, "data_ut", &E::data_ut);

    reals("study", "N_list", &E::N_list);
    reals("study", "s_list", &E::s_list);
    reals("study", "M_list", &E::M_list);
    reals("study", "lambda_list", &E::lambda_list);
    count("study", "ensemble", &E::ensemble);
    real("study", "huygens_T", &E::huygens_T);
    real("study", "huygens_R", &E::huygens_R);
    count("study", "huygens_samples", &E::huygens_samples);
    real("study", "energy_drift_tol", &E::energy_drift_tol);
    k.push_back({"study", "checks", [](Config& c, const std::string& v) { c.experiment.checks = split_list(v); },
                 [](const Config& c) { return join(c.experiment.checks); }, true});

    k.push_back({"output", "dir", [](Config& c, const std::string& v) { c.out_dir = v; },
                 [](const Config& c) { return c.out_dir; }});
    k.push_back({"output", "verbosity",
                 [](Config& c, const std::string& v) { c.verbosity = static_cast<int>(parse_uint("verbosity", v)); },
                 [](const Config& c) { return std::to_string(c.verbosity); }});
    k.push_back({"output", "threads",
                 [](Config& c, const std::string& v) {
                   c.experiment.threads = static_cast<unsigned>(parse_uint("threads", v));
                 },
                 [](const Config& c) { return std::to_string(c.experiment.threads); }});
    return k;
  }();
  return table;
}

inline const std::set<std::string>& known_sections() {
  static const std::set<std::string> s = {"", "grid", "time", "data", "data_ut", "study", "output"};
  return s;
}

}  // namespace detail

inline std::string Config::echo() const {
  std::string out;
  std::string section = "";
  for (const auto& k : detail::key_table()) {
    if (k.section != section) {
      section = k.section;
      out += "\n[" + section + "]\n";
    }
    const std::string v = k.get(*this);
    out += k.key + (v.empty() ? " =" : " = " + v) + "\n";
  }
  return out;
}

// Checks that need the grid: data profiles and boundary safety.
inline void validate_config(const Config& cfg) {
  const auto& e = cfg.experiment;
  if (e.n_modes < kMinModes)
    throw ConfigError("n_modes: constraint n_modes ≥ 8 violated (got " + std::to_string(e.n_modes) + ")");
  validate_experiment(e);
  const GridPtr grid = make_grid(e.r_max, e.n_modes);
  State s0;
  try {
    s0 = initial_state(e, grid);
  } catch (const InvalidArgument& ex) {
    throw ConfigError(std::string("data: ") + ex.what());
  }
  const bool evolves = e.scenario == Scenario::gwp_growth || e.scenario == Scenario::scaling ||
                       e.scenario == Scenario::bilinear_sweep || e.scenario == Scenario::convergence;
  if (evolves) {
    const double support = state_support_radius(s0);
    if (support + e.t_final + e.margin > e.r_max)
      throw ConfigError("t_final: boundary safety needs support (" + format_real(support) + ") + t_final + margin <= r_max");
  }
}

// Parses configuration text. `origin` names the source in error messages.
inline Config parse_config_text(const std::string& text, const std::string& origin = "<config>") {
  Config cfg;
  std::map<std::string, const detail::KeySpec*> index;
  for (const auto& k : detail::key_table()) index[k.section + "." + k.key] = &k;
  std::set<std::string> seen;
  std::string section;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string body = detail::trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') fail("syntax error: unterminated section header");
      section = detail::trim(body.substr(1, body.size() - 2));
      if (!detail::known_sections().count(section) || section.empty()) fail("unknown section [" + section + "]");
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) fail("syntax error: expected 'key = value'");
    const std::string key = detail::trim(body.substr(0, eq));
    const std::string value = detail::trim(body.substr(eq + 1));
    if (key.empty()) fail("syntax error: missing key");
    const std::string full = section + "." + key;
    auto it = index.find(full);
    if (it == index.end())
      fail("unknown key '" + key + "'" + (section.empty() ? std::string() : " in [" + section + "]"));
    if (!seen.insert(full).second) fail("duplicate key '" + key + "'");
    if (value.empty() && !it->second->allow_empty) fail(key + ": missing value");
    try {
      it->second->set(cfg, value);
    } catch (const ConfigError& e) {
      fail(e.what());
    }
  }
  try {
    validate_config(cfg);
  } catch (const ConfigError& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  return cfg;
}

inline Config parse_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const IoError& e) {
    throw ConfigError(std::string("cannot read config: ") + e.what());
  }
  return parse_config_text(text, path.string());
}

}  // namespace nlwave
