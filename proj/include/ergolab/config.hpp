#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ergolab/observables.hpp"
#include "ergolab/systems.hpp"

// Flat key-value experiment configuration with dotted sections, e.g.
//
//   experiment = clt
//   system.kind = doubling
//   observable.kind = centered_coordinate
//   ensemble.m = 5000
//   ensemble.n_list = 100,1000,10000
//   seed = 42
//
// '#' starts a comment. Validation collects every violation, not just the
// first. The seed is mandatory: there is no wall-clock default.

namespace ergolab::expcli {

enum class Experiment {
  covariance,
  clt,
  stable,
  asclt,
  berry_esseen,
  large_dev,
  cgf_rate,
  erdos_renyi,
  moderate,
  concentration_envelope,
  correlation_dev,
  empirical_measure,
  shadowing,
  periodogram,
  nonconventional,
};

inline const std::vector<std::pair<std::string, Experiment>>& experiment_names() {
  static const std::vector<std::pair<std::string, Experiment>> names = {
      {"covariance", Experiment::covariance},
      {"clt", Experiment::clt},
      {"stable", Experiment::stable},
      {"asclt", Experiment::asclt},
      {"berry_esseen", Experiment::berry_esseen},
      {"large_dev", Experiment::large_dev},
      {"cgf_rate", Experiment::cgf_rate},
      {"erdos_renyi", Experiment::erdos_renyi},
      {"moderate", Experiment::moderate},
      {"concentration_envelope", Experiment::concentration_envelope},
      {"correlation_dev", Experiment::correlation_dev},
      {"empirical_measure", Experiment::empirical_measure},
      {"shadowing", Experiment::shadowing},
      {"periodogram", Experiment::periodogram},
      {"nonconventional", Experiment::nonconventional},
  };
  return names;
}

inline const char* to_string(Experiment e) {
  for (const auto& [name, val] : experiment_names()) {
    if (val == e) return name.c_str();
  }
  return "?";
}

struct ExperimentConfig {
  Experiment experiment = Experiment::clt;
  dynsys::SystemDescriptor system;
  // observable
  observables::ObsKind observable = observables::ObsKind::centered_coordinate;
  std::optional<double> center;  // explicit center; otherwise exact/calibrated
  double theta = 0.5;            // sign_threshold
  double c0 = 0.0, c1 = 1.0;     // affine
  std::size_t calibration_steps = 10'000'000;
  std::size_t calibration_orbits = 16;
  // ensemble
  std::size_t m = 1000;
  std::vector<std::size_t> n_list;  // single n is a one-element list
  std::size_t burn_in = 1000;
  std::uint64_t seed = 0;
  // experiment-specific knobs (documented defaults)
  std::size_t max_lag = 64;        // covariance / periodogram limit series
  std::size_t lag_k = 1;           // correlation lag
  double epsilon = 0.1;            // large deviations threshold
  double z_max = 1.0;              // CGF grid half-width
  std::size_t z_count = 41;        // CGF grid points (odd)
  std::vector<double> t_list;      // rate-function evaluation points
  double er_t = 0.5;               // Erdos-Renyi level
  double er_rate = 0.0;            // I(t); required for erdos_renyi
  std::vector<std::size_t> k_list; // Erdos-Renyi window widths
  std::size_t er_budget = 10'000'000;
  double moderate_theta = 0.75;
  double moderate_a = 0.5;
  double moderate_b = std::numeric_limits<double>::infinity();
  std::string functional = "ergodic_average";  // concentration_envelope
  double dev_t = 0.02;             // correlation_dev threshold
  double mu_a = 0.25;              // shadowing target measure
  std::size_t omega_count = 64;    // periodogram grid size
  std::size_t ell = 2;             // nonconventional average length
  double stable_alpha = 0.0;       // filled from system.alpha

  std::map<std::string, std::string> echo;  // parsed key/value pairs, sorted
};

struct ConfigError {
  std::vector<std::string> violations;
};

namespace detail {

struct RawConfig {
  // key -> (value, first line); duplicates recorded separately
  std::map<std::string, std::pair<std::string, int>> kv;
  std::vector<std::string> violations;
  std::set<std::string> consumed;
};

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline RawConfig tokenize(std::string_view text) {
  RawConfig raw;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos
                                                                           : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      raw.violations.push_back("line " + std::to_string(line_no) + ": expected key = value");
      continue;
    }
    const std::string key = trim(std::string_view(stripped).substr(0, eq));
    const std::string value = trim(std::string_view(stripped).substr(eq + 1));
    if (key.empty()) {
      raw.violations.push_back("line " + std::to_string(line_no) + ": empty key");
      continue;
    }
    const auto it = raw.kv.find(key);
    if (it != raw.kv.end()) {
      raw.violations.push_back("duplicate key '" + key + "' at lines " +
                               std::to_string(it->second.second) + " and " +
                               std::to_string(line_no));
      continue;
    }
    raw.kv.emplace(key, std::make_pair(value, line_no));
  }
  return raw;
}

inline std::optional<std::string> get(RawConfig& raw, const std::string& key) {
  raw.consumed.insert(key);
  const auto it = raw.kv.find(key);
  if (it == raw.kv.end()) return std::nullopt;
  return it->second.first;
}

inline bool parse_double(const std::string& s, double& out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  const auto res = std::from_chars(begin, end, out);
  return res.ec == std::errc{} && res.ptr == end;
}

inline bool parse_size(const std::string& s, std::size_t& out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  const auto res = std::from_chars(begin, end, out);
  return res.ec == std::errc{} && res.ptr == end;
}

inline bool parse_u64(const std::string& s, std::uint64_t& out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  const auto res = std::from_chars(begin, end, out);
  return res.ec == std::errc{} && res.ptr == end;
}

template <typename T, typename ParseOne>
bool parse_list(const std::string& s, std::vector<T>& out, ParseOne parse_one) {
  out.clear();
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto comma = s.find(',', pos);
    const std::string item =
        trim(std::string_view(s).substr(pos, comma == std::string::npos ? s.size() - pos
                                                                        : comma - pos));
    if (!item.empty()) {
      T v{};
      if (!parse_one(item, v)) return false;
      out.push_back(v);
    } else if (comma != std::string::npos || !out.empty()) {
      return false;
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return !out.empty();
}

}  // namespace detail

/// Parses and validates a configuration. Throws ConfigError carrying the
/// full list of violations (unknown keys, range violations, missing seed,
/// duplicates) rather than just the first.
inline ExperimentConfig parse_config(std::string_view text) {
  auto raw = detail::tokenize(text);
  auto& errs = raw.violations;
  ExperimentConfig cfg;

  const auto want_double = [&](const std::string& key, double& out, auto&& check,
                               const std::string& range_msg) {
    if (auto v = detail::get(raw, key)) {
      double d;
      if (!detail::parse_double(*v, d)) {
        errs.push_back(key + ": not a number ('" + *v + "')");
      } else if (!check(d)) {
        errs.push_back(key + ": " + range_msg + " (got " + *v + ")");
      } else {
        out = d;
      }
      return true;
    }
    return false;
  };
  const auto want_size = [&](const std::string& key, std::size_t& out, std::size_t min_value) {
    if (auto v = detail::get(raw, key)) {
      std::size_t s;
      if (!detail::parse_size(*v, s)) {
        errs.push_back(key + ": not a nonnegative integer ('" + *v + "')");
      } else if (s < min_value) {
        errs.push_back(key + ": must be >= " + std::to_string(min_value));
      } else {
        out = s;
      }
    }
  };

  // experiment
  if (auto v = detail::get(raw, "experiment")) {
    bool found = false;
    for (const auto& [name, val] : experiment_names()) {
      if (name == *v) {
        cfg.experiment = val;
        found = true;
        break;
      }
    }
    if (!found) errs.push_back("experiment: unknown experiment '" + *v + "'");
  } else {
    errs.push_back("experiment: missing");
  }

  // system
  double alpha = 0.75, a = 0.0, b = 0.0;
  bool has_alpha = want_double("system.alpha", alpha,
                               [](double d) { return d > 0.0 && d <= 1.0; },
                               "alpha must be in (0,1]");
  bool has_a = want_double("system.a", a, [](double) { return true; }, "");
  bool has_b = want_double("system.b", b, [](double) { return true; }, "");
  if (auto v = detail::get(raw, "system.kind")) {
    try {
      using dynsys::SystemDescriptor;
      if (*v == "doubling") {
        cfg.system = SystemDescriptor::doubling();
      } else if (*v == "cat") {
        cfg.system = SystemDescriptor::cat();
      } else if (*v == "manneville_pomeau") {
        if (!has_alpha) errs.push_back("system.alpha: required for manneville_pomeau");
        cfg.system = SystemDescriptor::manneville_pomeau(alpha);
      } else if (*v == "quadratic") {
        if (!has_a) errs.push_back("system.a: required for quadratic");
        cfg.system = SystemDescriptor::quadratic(has_a ? a : 2.0);
      } else if (*v == "lozi") {
        cfg.system = has_a || has_b ? SystemDescriptor::lozi(has_a ? a : 1.7, has_b ? b : 0.5)
                                    : SystemDescriptor::lozi();
      } else if (*v == "henon") {
        cfg.system = has_a || has_b ? SystemDescriptor::henon(has_a ? a : 1.4, has_b ? b : 0.3)
                                    : SystemDescriptor::henon();
      } else if (*v == "iid_uniform") {
        cfg.system = SystemDescriptor::iid_uniform();
      } else if (*v == "iid_rademacher") {
        cfg.system = SystemDescriptor::iid_rademacher();
      } else {
        errs.push_back("system.kind: unknown kind '" + *v + "'");
      }
    } catch (const std::invalid_argument& e) {
      errs.push_back(std::string("system: ") + e.what());
    }
  } else {
    errs.push_back("system.kind: missing");
  }

  // observable
  if (auto v = detail::get(raw, "observable.kind")) {
    using observables::ObsKind;
    if (*v == "coordinate") {
      cfg.observable = ObsKind::coordinate;
    } else if (*v == "centered_coordinate") {
      cfg.observable = ObsKind::centered_coordinate;
    } else if (*v == "affine") {
      cfg.observable = ObsKind::affine;
    } else if (*v == "sign_threshold") {
      cfg.observable = ObsKind::sign_threshold;
    } else if (*v == "constant") {
      cfg.observable = ObsKind::constant;
    } else {
      errs.push_back("observable.kind: unknown kind '" + *v + "'");
    }
  }
  if (auto v = detail::get(raw, "observable.center")) {
    double d;
    if (detail::parse_double(*v, d)) {
      cfg.center = d;
    } else if (*v == "auto") {
      cfg.center.reset();
    } else {
      errs.push_back("observable.center: expected a number or 'auto'");
    }
  }
  want_double("observable.theta", cfg.theta, [](double) { return true; }, "");
  want_double("observable.c0", cfg.c0, [](double) { return true; }, "");
  want_double("observable.c1", cfg.c1, [](double) { return true; }, "");
  want_size("observable.calibration_steps", cfg.calibration_steps, 1);
  want_size("observable.calibration_orbits", cfg.calibration_orbits, 1);

  // ensemble
  want_size("ensemble.m", cfg.m, 1);
  want_size("ensemble.burn_in", cfg.burn_in, 0);
  {
    std::size_t n_single = 0;
    bool has_n = false;
    if (auto v = detail::get(raw, "ensemble.n")) {
      has_n = true;
      if (!detail::parse_size(*v, n_single) || n_single < 1) {
        errs.push_back("ensemble.n: must be a positive integer");
        has_n = false;
      }
    }
    if (auto v = detail::get(raw, "ensemble.n_list")) {
      if (has_n) errs.push_back("ensemble.n and ensemble.n_list are mutually exclusive");
      std::vector<std::size_t> list;
      if (!detail::parse_list<std::size_t>(*v, list, detail::parse_size)) {
        errs.push_back("ensemble.n_list: expected comma-separated positive integers");
      } else if (!std::is_sorted(list.begin(), list.end()) ||
                 std::adjacent_find(list.begin(), list.end()) != list.end()) {
        errs.push_back("ensemble.n_list: must be strictly increasing");
      } else if (list.front() < 1) {
        errs.push_back("ensemble.n_list: entries must be >= 1");
      } else {
        cfg.n_list = std::move(list);
      }
    } else if (has_n) {
      cfg.n_list = {n_single};
    }
    if (cfg.n_list.empty()) {
      bool already_reported = false;
      for (const auto& e : errs) {
        if (e.rfind("ensemble.n", 0) == 0) already_reported = true;
      }
      if (!already_reported) errs.push_back("ensemble.n or ensemble.n_list: missing");
    }
  }

  // seed (mandatory: reports must be reproducible)
  if (auto v = detail::get(raw, "seed")) {
    if (!detail::parse_u64(*v, cfg.seed)) {
      errs.push_back("seed: must be a 64-bit unsigned integer");
    }
  } else {
    errs.push_back("seed: missing (no wall-clock default)");
  }

  // experiment-specific
  want_size("lags.max", cfg.max_lag, 1);
  want_size("lag.k", cfg.lag_k, 0);
  want_double("epsilon", cfg.epsilon, [](double d) { return d > 0.0; }, "must be positive");
  want_double("cgf.z_max", cfg.z_max, [](double d) { return d > 0.0; }, "must be positive");
  want_size("cgf.z_count", cfg.z_count, 3);
  if (cfg.z_count % 2 == 0) errs.push_back("cgf.z_count: must be odd (grid contains 0)");
  if (auto v = detail::get(raw, "rate.t_list")) {
    if (!detail::parse_list<double>(*v, cfg.t_list, detail::parse_double)) {
      errs.push_back("rate.t_list: expected comma-separated numbers");
    }
  }
  want_double("er.t", cfg.er_t, [](double) { return true; }, "");
  want_double("er.rate", cfg.er_rate, [](double d) { return d > 0.0; }, "must be positive");
  if (auto v = detail::get(raw, "er.k_list")) {
    if (!detail::parse_list<std::size_t>(*v, cfg.k_list, detail::parse_size)) {
      errs.push_back("er.k_list: expected comma-separated positive integers");
    }
  }
  want_size("er.budget", cfg.er_budget, 1);
  want_double("moderate.theta", cfg.moderate_theta,
              [](double d) { return d > 0.5 && d < 1.0; }, "must be in (1/2, 1)");
  want_double("moderate.a", cfg.moderate_a, [](double) { return true; }, "");
  if (auto v = detail::get(raw, "moderate.b")) {
    if (*v == "inf") {
      cfg.moderate_b = std::numeric_limits<double>::infinity();
    } else {
      double d;
      if (!detail::parse_double(*v, d)) {
        errs.push_back("moderate.b: expected a number or 'inf'");
      } else {
        cfg.moderate_b = d;
      }
    }
  }
  if (auto v = detail::get(raw, "conc.functional")) {
    static const std::set<std::string> known = {"ergodic_average", "ergodic_sum", "correlation",
                                                "kantorovich"};
    if (!known.count(*v)) {
      errs.push_back("conc.functional: unknown functional '" + *v + "'");
    } else {
      cfg.functional = *v;
    }
  }
  want_double("dev.t", cfg.dev_t, [](double d) { return d > 0.0; }, "must be positive");
  want_double("shadow.mu_a", cfg.mu_a, [](double d) { return d > 0.0 && d <= 1.0; },
              "must be in (0,1]");
  want_size("pg.omega_count", cfg.omega_count, 2);
  want_size("nonconv.ell", cfg.ell, 1);

  // unknown keys
  for (const auto& [key, value] : raw.kv) {
    if (!raw.consumed.count(key)) errs.push_back("unknown key '" + key + "'");
  }

  if (!errs.empty()) {
    std::sort(errs.begin(), errs.end());
    throw ConfigError{std::move(errs)};
  }
  cfg.stable_alpha = cfg.system.alpha;
  for (const auto& [key, vp] : raw.kv) cfg.echo[key] = vp.first;
  return cfg;
}

/// The centered observable a config denotes, resolving 'auto' centering
/// through the exact invariant mean or a calibration orbit.
inline observables::Observable resolve_observable(const ExperimentConfig& cfg,
                                                  unsigned threads = 1) {
  using observables::ObsKind;
  switch (cfg.observable) {
    case ObsKind::coordinate:
      return observables::coordinate();
    case ObsKind::centered_coordinate:
      if (cfg.center) return observables::centered_coordinate(*cfg.center);
      return observables::make_centered_coordinate(cfg.system, prng::mix64(cfg.seed ^ 0xCA11B),
                                                   cfg.calibration_steps,
                                                   cfg.calibration_orbits, threads);
    case ObsKind::affine:
      return observables::affine(cfg.c0, cfg.c1);
    case ObsKind::sign_threshold: {
      // mean-zero claim holds for the symmetric threshold on Lebesgue-
      // invariant systems and for the iid signs
      const bool symmetric =
          (cfg.theta == 0.5 &&
           (cfg.system.kind == dynsys::MapKind::doubling ||
            cfg.system.kind == dynsys::MapKind::cat ||
            cfg.system.kind == dynsys::MapKind::iid_uniform)) ||
          (cfg.theta == 0.0 && cfg.system.kind == dynsys::MapKind::iid_rademacher);
      return observables::sign_threshold(cfg.theta, symmetric);
    }
    case ObsKind::constant:
      return observables::constant(cfg.c0);
    default:
      throw std::invalid_argument("resolve_observable: unsupported kind");
  }
}

}  // namespace ergolab::expcli
