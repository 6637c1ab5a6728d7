#pragma once

// Experiment configuration: a flat key = value text format with optional
// [section] headers. Grammar (README has the full key list):
//
//   line    := blank | comment | section | pair
//   comment := '#' anything
//   section := '[' name ']'
//   pair    := key '=' value      (whitespace around tokens is ignored)
//
// Unknown sections or keys, duplicate keys and malformed values are errors.

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "qfilter/dynamics.hpp"
#include "qfilter/errors.hpp"
#include "qfilter/goalprog.hpp"

namespace qfilter {

inline constexpr std::string_view kVersion = "1.0.0";
inline constexpr int kFormatVersion = 1;
inline constexpr std::int64_t kFastStepsPerPeriod = 10000;
inline constexpr std::int64_t kFullStepsPerPeriod = 150000;

struct ExperimentConfig {
  int format_version = kFormatVersion;
  std::string scenario = "default";
  std::uint64_t seed = 20120607;
  std::string out = "qfilter_out";

  // [sim]
  double omega = 1.0;
  double epsilon = 0.0;
  double kappa = 0.005;
  double periods = 15.0;
  std::int64_t steps_per_period = kFullStepsPerPeriod;
  std::int64_t output_points = 1000;

  // [ensemble]
  std::int64_t realizations = 2000;
  bool compare_me2 = false;

  // [sweep]  (also the goal-programming grid)
  double t_max_periods = 15.0;
  std::int64_t t_points = 100;
  double kappa_min = 0.0005;
  double kappa_max = 0.02;
  std::int64_t kappa_points = 100;

  // [goalprog]  sets = standard runs a-d; sets = single uses the weights below
  std::string goal_sets = "standard";
  double eta1 = 1.0;
  double eta2 = 1.0;
  double delta_c = 0.1;
  double delta_b = 0.1;

  // [discord]
  std::int64_t discord_states = 200;
  std::int64_t discord_bases = 50;
  std::int64_t discord_resolution = 64;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;

  SimConfig sim() const {
    SimConfig c = SimConfig::rabi(periods, steps_per_period, omega, kappa);
    c.epsilon = epsilon;
    c.seed = seed;
    c.output_points = output_points;
    return c;
  }

  void validate() const {
    if (format_version != kFormatVersion) throw ConfigError("unsupported format_version");
    if (scenario.empty()) throw ConfigError("scenario must be nonempty");
    if (out.empty()) throw ConfigError("out must be nonempty");
    if (!(periods > 0.0)) throw ConfigError("periods must be positive");
    if (steps_per_period < 1) throw ConfigError("steps_per_period must be positive");
    sim().validate();
    if (realizations < 1) throw ConfigError("realizations must be at least 1");
    if (!(t_max_periods > 0.0)) throw ConfigError("t_max must be positive");
    if (t_points < 2 || kappa_points < 1) throw ConfigError("sweep grid needs t_points >= 2 and kappa_points >= 1");
    if (!(kappa_min > 0.0) || kappa_max < kappa_min || (kappa_points > 1 && !(kappa_max > kappa_min)))
      throw ConfigError("sweep kappa range must satisfy 0 < kappa_min < kappa_max");
    if (goal_sets != "standard" && goal_sets != "single") throw ConfigError("goalprog sets must be standard or single");
    if (!(eta1 > 0.0 && eta2 > 0.0 && delta_c > 0.0 && delta_b > 0.0))
      throw ConfigError("goal weights and tolerances must be positive");
    if (discord_states < 1 || discord_bases < 1) throw ConfigError("discord counts must be positive");
    if (discord_resolution < 8) throw ConfigError("discord resolution must be at least 8");
  }

  std::vector<double> sweep_t_grid() const { return linspace(0.0, t_max_periods, static_cast<std::size_t>(t_points)); }
  std::vector<double> sweep_kappa_grid() const {
    return linspace(kappa_min, kappa_max, static_cast<std::size_t>(kappa_points));
  }
};

namespace config_detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T v{};
  const char* end = text.data() + text.size();
  const auto r = std::from_chars(text.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end) throw ConfigError("bad value for " + key + ": '" + text + "'");
  return v;
}

inline bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true") return true;
  if (text == "false") return false;
  throw ConfigError("bad value for " + key + ": expected true or false");
}

// One entry per key: qualified name, reader, writer.
struct Field {
  std::string section;
  std::string key;
  std::function<void(ExperimentConfig&, const std::string&)> read;
  std::function<std::string(const ExperimentConfig&)> write;
};

template <class T>
Field number(std::string section, std::string key, T ExperimentConfig::*member) {
  const std::string name = section.empty() ? key : section + "." + key;
  return {std::move(section), std::move(key),
          [member, name](ExperimentConfig& c, const std::string& v) { c.*member = parse_number<T>(name, v); },
          [member](const ExperimentConfig& c) {
            if constexpr (std::is_floating_point_v<T>) {
              return format_double(c.*member);
            } else {
              return std::to_string(c.*member);
            }
          }};
}

inline Field text(std::string section, std::string key, std::string ExperimentConfig::*member) {
  const std::string name = section.empty() ? key : section + "." + key;
  return {std::move(section), std::move(key),
          [member, name](ExperimentConfig& c, const std::string& v) {
            if (v.empty()) throw ConfigError("empty value for " + name);
            c.*member = v;
          },
          [member](const ExperimentConfig& c) { return c.*member; }};
}

inline Field flag(std::string section, std::string key, bool ExperimentConfig::*member) {
  const std::string name = section.empty() ? key : section + "." + key;
  return {std::move(section), std::move(key),
          [member, name](ExperimentConfig& c, const std::string& v) { c.*member = parse_bool(name, v); },
          [member](const ExperimentConfig& c) { return std::string(c.*member ? "true" : "false"); }};
}

inline const std::vector<Field>& fields() {
  using E = ExperimentConfig;
  static const std::vector<Field> f = {
      number("", "format_version", &E::format_version),
      text("", "scenario", &E::scenario),
      number("", "seed", &E::seed),
      text("", "out", &E::out),
      number("sim", "omega", &E::omega),
      number("sim", "epsilon", &E::epsilon),
      number("sim", "kappa", &E::kappa),
      number("sim", "periods", &E::periods),
      number("sim", "steps_per_period", &E::steps_per_period),
      number("sim", "output_points", &E::output_points),
      number("ensemble", "realizations", &E::realizations),
      flag("ensemble", "compare_me2", &E::compare_me2),
      number("sweep", "t_max_periods", &E::t_max_periods),
      number("sweep", "t_points", &E::t_points),
      number("sweep", "kappa_min", &E::kappa_min),
      number("sweep", "kappa_max", &E::kappa_max),
      number("sweep", "kappa_points", &E::kappa_points),
      text("goalprog", "sets", &E::goal_sets),
      number("goalprog", "eta1", &E::eta1),
      number("goalprog", "eta2", &E::eta2),
      number("goalprog", "delta_c", &E::delta_c),
      number("goalprog", "delta_b", &E::delta_b),
      number("discord", "states", &E::discord_states),
      number("discord", "bases", &E::discord_bases),
      number("discord", "resolution", &E::discord_resolution),
  };
  return f;
}

}  // namespace config_detail

// Parses config text over the defaults. Does not validate ranges.
inline ExperimentConfig parse_config(std::string_view text) {
  using namespace config_detail;
  std::map<std::string, const Field*> by_name;
  std::map<std::string, bool> sections{{"", true}};
  for (const auto& f : fields()) {
    by_name[f.section + "." + f.key] = &f;
    sections[f.section] = true;
  }

  ExperimentConfig cfg;
  std::map<std::string, int> seen;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "unterminated section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (section.empty() || !sections.count(section)) throw ConfigError(where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    const std::string name = section + "." + key;
    const auto it = by_name.find(name);
    if (it == by_name.end())
      throw ConfigError(where + "unknown key '" + key + "'" + (section.empty() ? "" : " in [" + section + "]"));
    if (seen[name]++) throw ConfigError(where + "duplicate key '" + key + "'");
    try {
      it->second->read(cfg, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  return cfg;
}

// Canonical text; parse_config(serialize_config(c)) == c. With
// `include_out = false` the output directory is omitted (used for hashing).
inline std::string serialize_config(const ExperimentConfig& cfg, bool include_out = true) {
  std::string s;
  std::string section;
  for (const auto& f : config_detail::fields()) {
    if (!include_out && f.section.empty() && f.key == "out") continue;
    if (f.section != section) {
      section = f.section;
      s += "\n[" + section + "]\n";
    }
    s += f.key + " = " + f.write(cfg) + "\n";
  }
  return s;
}

// 64-bit FNV-1a over the canonical serialization (output directory excluded).
inline std::uint64_t config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : serialize_config(cfg, false)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hash_hex(std::uint64_t h) {
  char buf[17];
  const auto r = std::to_chars(buf, buf + 16, h, 16);
  std::string s(buf, r.ptr);
  return std::string(16 - s.size(), '0') + s;
}

// QFILTER_SEED and QFILTER_OUT override the file; `getenv` is injectable for tests.
inline void apply_environment(ExperimentConfig& cfg,
                              const std::function<const char*(const char*)>& getenv = [](const char* k) {
                                return std::getenv(k);
                              }) {
  if (const char* s = getenv("QFILTER_SEED"); s && *s)
    cfg.seed = config_detail::parse_number<std::uint64_t>("QFILTER_SEED", s);
  if (const char* o = getenv("QFILTER_OUT"); o && *o) cfg.out = o;
}

}  // namespace qfilter
