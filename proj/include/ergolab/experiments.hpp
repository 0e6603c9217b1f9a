#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "ergolab/concentration.hpp"
#include "ergolab/config.hpp"
#include "ergolab/deviation.hpp"
#include "ergolab/ergostat.hpp"
#include "ergolab/limitlaw.hpp"
#include "ergolab/observables.hpp"
#include "ergolab/report.hpp"
#include "ergolab/systems.hpp"

// Experiment drivers: dispatch a validated config to the estimator modules
// and collect machine-readable tables plus every warning the inner modules
// raise (censoring, degeneracy, escaped orbits, extrapolation tags).

namespace ergolab::expcli {

struct RunOptions {
  unsigned threads = 1;
};

namespace detail {

inline std::int64_t i64(std::size_t v) { return static_cast<std::int64_t>(v); }

inline void note_system_warnings(const ExperimentConfig& cfg, ExperimentReport& report) {
  if (!cfg.system.theory_note.empty()) {
    report.warnings.push_back("system: " + cfg.system.theory_note);
  }
}

inline dynsys::EnsembleSpec spec_for(const ExperimentConfig& cfg, std::size_t n,
                                     std::uint64_t seed) {
  dynsys::EnsembleSpec s;
  s.m = cfg.m;
  s.n = n;
  s.burn_in = cfg.burn_in;
  s.seed = seed;
  return s;
}

inline limitlaw::CltOptions clt_options(const ExperimentConfig& cfg, const RunOptions& run) {
  limitlaw::CltOptions opt;
  opt.m = cfg.m;
  opt.burn_in = cfg.burn_in;
  opt.max_lag = cfg.max_lag;
  opt.threads = run.threads;
  return opt;
}

inline std::vector<double> omega_grid(std::size_t count) {
  std::vector<double> g(count);
  for (std::size_t i = 0; i < count; ++i) {
    g[i] = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return g;
}

// ---------------------------------------------------------------------------

inline void run_covariance(const ExperimentConfig& cfg, const observables::Observable& f,
                           const RunOptions& run, ExperimentReport& report) {
  const std::size_t n = cfg.n_list.back();
  auto ensemble =
      dynsys::generate_ensemble(cfg.system, spec_for(cfg, n + cfg.max_lag, cfg.seed), run.threads);
  if (const auto escaped = ensemble.escaped_count()) {
    report.warnings.push_back("ensemble: " + std::to_string(escaped) + " escaped orbits");
  }
  const auto series = ergostat::covariance_series(f, ensemble, cfg.max_lag);
  Table tc;
  tc.name = "covariance";
  tc.columns = {"lag", "c_hat", "std_error"};
  for (std::size_t l = 0; l < series.values.size(); ++l) {
    tc.rows.push_back({i64(l), series.values[l], series.std_errors[l]});
  }
  report.tables.push_back(std::move(tc));
  const auto gk = ergostat::green_kubo(series);
  Table tg;
  tg.name = "green_kubo";
  tg.columns = {"sigma2_hat", "cutoff_lag", "degenerate"};
  tg.rows.push_back({gk.sigma2, i64(gk.cutoff_lag), gk.degenerate});
  report.tables.push_back(std::move(tg));
  if (gk.degenerate) {
    report.warnings.push_back("green_kubo: variance clamped at 0 (degenerate)");
    report.status = RunStatus::degenerate;
  }
}

inline void run_clt(const ExperimentConfig& cfg, const observables::Observable& f,
                    const RunOptions& run, ExperimentReport& report) {
  const auto result =
      limitlaw::clt_test(f, cfg.system, cfg.n_list, cfg.seed, clt_options(cfg, run));
  Table t;
  t.name = "clt";
  t.columns = {"n", "ks_distance", "sigma2_hat", "m"};
  for (const auto& pt : result.points) {
    t.rows.push_back({i64(pt.n), pt.ks, result.sigma2_hat, i64(result.m)});
  }
  report.tables.push_back(std::move(t));
  if (result.escaped_count > 0) {
    report.warnings.push_back("clt: " + std::to_string(result.escaped_count) +
                              " escaped orbits excluded");
  }
  if (result.degenerate) {
    report.warnings.push_back("clt: degenerate sigma2_hat; KS against the Heaviside step is "
                              "not informative");
    report.status = RunStatus::degenerate;
  }
}

inline void run_stable(const ExperimentConfig& cfg, const observables::Observable& f,
                       const RunOptions& run, ExperimentReport& report) {
  if (cfg.system.kind != dynsys::MapKind::manneville_pomeau) {
    report.warnings.push_back("stable: theory covers the Manneville-Pomeau map; results are "
                              "exploratory for this system");
  }
  const double alpha = cfg.system.alpha > 0.0 ? cfg.system.alpha : 0.75;
  const double p = std::min(2.0, 1.0 / alpha);
  const double beta = f.value_at_zero > 0.0 ? 1.0 : (f.value_at_zero < 0.0 ? -1.0 : 0.0);
  if (beta == 0.0) {
    report.warnings.push_back("stable: f(0) = 0, stable regime does not apply (CLT branch)");
  }
  const std::size_t n = cfg.n_list.back();
  const auto spec = spec_for(cfg, n, cfg.seed);
  const auto seq = limitlaw::RenormSequence::n_alpha(alpha);
  std::vector<double> samples(spec.m, std::numeric_limits<double>::quiet_NaN());
  dynsys::for_each_orbit(cfg.system, spec, run.threads,
                         [&](std::size_t i, const dynsys::Orbit& o) {
                           if (o.escaped || o.points.size() < n) return;
                           samples[i] = observables::ergodic_sum(f, o) /
                                        limitlaw::renorm_value(seq, n);
                         });
  std::erase_if(samples, [](double v) { return !std::isfinite(v); });

  const auto tail = limitlaw::tail_exponent(samples);
  if (tail.unreliable) report.warnings.push_back("tail_exponent: unreliable (too few tail points)");
  if (tail.poor_fit) report.warnings.push_back("tail_exponent: poor linear fit");
  if (tail.steep) report.warnings.push_back("tail_exponent: estimate > 3, no heavy tail at this scale");

  const auto grid = limitlaw::default_cf_grid();
  const double c_hat = limitlaw::fit_stable_scale(samples, p, beta, grid);
  const double cf_dist =
      limitlaw::cf_distance(samples, limitlaw::StableLawParams(p, c_hat, beta), grid);
  Table t;
  t.name = "stable";
  t.columns = {"n", "m", "p_theory", "beta", "p_hat", "tail_r2", "tail_points",
               "c_hat", "cf_distance"};
  t.rows.push_back({i64(n), i64(samples.size()), p, beta, tail.p_hat, tail.r2,
                    i64(tail.tail_points), c_hat, cf_dist});
  report.tables.push_back(std::move(t));
}

inline void run_asclt(const ExperimentConfig& cfg, const observables::Observable& f,
                      const RunOptions& run, ExperimentReport& report) {
  const auto gk = limitlaw::green_kubo_variance(f, cfg.system, prng::mix64(cfg.seed ^ 0x6111ca),
                                                clt_options(cfg, run));
  if (gk.degenerate) {
    report.warnings.push_back("asclt: degenerate sigma2_hat");
    report.status = RunStatus::degenerate;
    return;
  }
  const std::size_t n_max = cfg.n_list.back();
  Table t;
  t.name = "asclt";
  t.columns = {"orbit", "n", "kantorovich", "sigma2_hat"};
  dynsys::EnsembleSpec spec = spec_for(cfg, n_max, cfg.seed);
  std::vector<std::vector<double>> dists(spec.m, std::vector<double>(cfg.n_list.size(), 0.0));
  dynsys::for_each_orbit(cfg.system, spec, run.threads,
                         [&](std::size_t i, const dynsys::Orbit& o) {
                           for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
                             const auto measure = limitlaw::asclt_measure(
                                 f, o, cfg.n_list[ni], limitlaw::RenormSequence::sqrt_n());
                             dists[i][ni] = ergostat::kantorovich_1d(
                                 measure.distribution, ergostat::GaussianLaw{gk.sigma2});
                           }
                         });
  for (std::size_t i = 0; i < spec.m; ++i) {
    for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
      t.rows.push_back({i64(i), i64(cfg.n_list[ni]), dists[i][ni], gk.sigma2});
    }
  }
  report.tables.push_back(std::move(t));
}

inline void run_berry_esseen(const ExperimentConfig& cfg, const observables::Observable& f,
                             const RunOptions& run, ExperimentReport& report) {
  const auto result =
      limitlaw::berry_esseen_probe(f, cfg.system, cfg.n_list, cfg.seed, clt_options(cfg, run));
  Table t;
  t.name = "berry_esseen";
  t.columns = {"n", "ks_distance"};
  for (const auto& pt : result.clt.points) t.rows.push_back({i64(pt.n), pt.ks});
  report.tables.push_back(std::move(t));
  Table tf;
  tf.name = "fit";
  tf.columns = {"slope", "r2", "sigma2_hat"};
  tf.rows.push_back({result.slope, result.r2, result.clt.sigma2_hat});
  report.tables.push_back(std::move(tf));
  if (result.degenerate) {
    report.warnings.push_back("berry_esseen: degenerate sigma2_hat");
    report.status = RunStatus::degenerate;
  }
}

inline void run_large_dev(const ExperimentConfig& cfg, const observables::Observable& f,
                          const RunOptions& run, ExperimentReport& report) {
  Table t;
  t.name = "large_dev";
  t.columns = {"n", "fraction", "std_error", "censored"};
  std::vector<std::pair<std::size_t, double>> probs;
  for (std::size_t idx = 0; idx < cfg.n_list.size(); ++idx) {
    const std::size_t n = cfg.n_list[idx];
    const auto frac = deviation::deviation_prob(
        f, cfg.system, spec_for(cfg, n, prng::substream_seed(cfg.seed, idx)), cfg.epsilon,
        run.threads);
    t.rows.push_back({i64(n), frac.value, frac.std_error, frac.censored});
    if (frac.censored) {
      report.warnings.push_back("large_dev: zero exceedances at n = " + std::to_string(n) +
                                " (1/m bound used)");
    } else {
      probs.emplace_back(n, frac.value);
    }
  }
  report.tables.push_back(std::move(t));
  const auto fit = deviation::decay_fit(probs);
  Table tf;
  tf.name = "decay_fit";
  tf.columns = {"regime", "slope", "r2_exponential", "r2_polynomial"};
  tf.rows.push_back({std::string(deviation::to_string(fit.regime)), fit.slope,
                     fit.r2_exponential, fit.r2_polynomial});
  report.tables.push_back(std::move(tf));
  if (fit.regime == deviation::DecayRegime::undetectable) {
    report.warnings.push_back("large_dev: decay regime undetectable (need larger m)");
    report.status = RunStatus::degenerate;
  }
}

inline void run_cgf_rate(const ExperimentConfig& cfg, const observables::Observable& f,
                         const RunOptions& run, ExperimentReport& report) {
  const auto grid = deviation::symmetric_grid(cfg.z_max, cfg.z_count);
  const auto cgf = deviation::cgf_estimate(f, cfg.system, spec_for(cfg, cfg.n_list.back(), cfg.seed),
                                           grid, run.threads);
  Table t;
  t.name = "cgf";
  t.columns = {"z", "psi_hat", "std_error", "ess"};
  for (std::size_t i = 0; i < cgf.z_grid.size(); ++i) {
    t.rows.push_back({cgf.z_grid[i], cgf.psi[i], cgf.std_error[i], cgf.ess[i]});
  }
  report.tables.push_back(std::move(t));
  if (cgf.ess_collapse) {
    report.warnings.push_back("cgf: effective sample size collapse on part of the z grid");
  }
  std::vector<double> t_list = cfg.t_list;
  if (t_list.empty()) t_list = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
  const auto rate = deviation::rate_from_cgf(cgf, t_list);
  Table tr;
  tr.name = "rate";
  tr.columns = {"t", "i_hat", "boundary"};
  for (std::size_t i = 0; i < rate.t_grid.size(); ++i) {
    tr.rows.push_back({rate.t_grid[i], rate.values[i], static_cast<bool>(rate.boundary[i])});
    if (rate.boundary[i]) {
      report.warnings.push_back("rate: Legendre supremum at grid boundary for t = " +
                                detail::format_double(rate.t_grid[i]) +
                                " (extrapolation unsafe)");
    }
  }
  report.tables.push_back(std::move(tr));
}

inline void run_erdos_renyi(const ExperimentConfig& cfg, const observables::Observable& f,
                            const RunOptions& run, ExperimentReport& report) {
  (void)run;
  if (!(cfg.er_rate > 0.0)) {
    throw ConfigError{{"er.rate: required (positive rate-function value I(t))"}};
  }
  std::vector<std::size_t> k_list = cfg.k_list;
  if (k_list.empty()) k_list = {25, 50, 75, 100};
  const auto points = deviation::erdos_renyi_rate(f, cfg.system, cfg.er_rate, k_list, cfg.seed,
                                                  cfg.er_budget, cfg.burn_in);
  Table t;
  t.name = "erdos_renyi";
  t.columns = {"k", "window_count", "m_k", "ratio", "t_target", "truncated"};
  bool truncated = false;
  for (const auto& pt : points) {
    t.rows.push_back({i64(pt.k), i64(pt.window_count), pt.m_k, pt.ratio, cfg.er_t, pt.truncated});
    truncated = truncated || pt.truncated;
  }
  report.tables.push_back(std::move(t));
  if (truncated) {
    report.warnings.push_back("erdos_renyi: window budget exceeded; k list truncated to the cap");
    report.status = RunStatus::budget_exceeded;
  }
}

inline void run_moderate(const ExperimentConfig& cfg, const observables::Observable& f,
                         const RunOptions& run, ExperimentReport& report) {
  const auto gk = limitlaw::green_kubo_variance(f, cfg.system, prng::mix64(cfg.seed ^ 0x30de),
                                                clt_options(cfg, run));
  const auto result = deviation::moderate_probe(f, cfg.system, cfg.moderate_theta, cfg.n_list,
                                                cfg.m, cfg.moderate_a, cfg.moderate_b, gk.sigma2,
                                                cfg.seed, cfg.burn_in, run.threads);
  if (result.degenerate) {
    report.warnings.push_back("moderate: degenerate sigma2_hat");
    report.status = RunStatus::degenerate;
    return;
  }
  Table t;
  t.name = "moderate";
  t.columns = {"n", "fraction", "value", "limit", "censored"};
  for (const auto& pt : result.points) {
    t.rows.push_back({i64(pt.n), pt.fraction, pt.value, result.limit, pt.censored});
    if (pt.censored) {
      report.warnings.push_back("moderate: zero hits at n = " + std::to_string(pt.n));
    }
  }
  report.tables.push_back(std::move(t));
}

inline observables::SeparatelyLipschitzFunctional make_conc_functional(
    const ExperimentConfig& cfg, const observables::Observable& f, std::size_t n,
    std::uint64_t seed, const RunOptions& run) {
  if (cfg.functional == "ergodic_average") return observables::ergodic_average_functional(f, n);
  if (cfg.functional == "ergodic_sum") return observables::ergodic_sum_functional(f, n);
  if (cfg.functional == "correlation") {
    return observables::correlation_functional(f, n, cfg.lag_k,
                                               f.sup_abs(dynsys::x_range(cfg.system)));
  }
  if (cfg.functional == "kantorovich") {
    const auto ref = concentration::make_reference_measure(
        cfg.system, prng::mix64(seed ^ 0x4e5), cfg.calibration_steps, 100'000, run.threads);
    observables::SeparatelyLipschitzFunctional K;
    K.name = "kantorovich";
    K.arity = n;
    K.lip.assign(n, 1.0 / static_cast<double>(n));
    K.eval = [ref, n](std::span<const dynsys::Point> w) {
      std::vector<double> xs(n);
      for (std::size_t i = 0; i < n; ++i) xs[i] = w[i].x;
      return concentration::distance_to_reference(
          ergostat::EmpiricalDistribution::from_samples(std::move(xs)), ref);
    };
    return K;
  }
  throw ConfigError{{"conc.functional: unknown functional '" + cfg.functional + "'"}};
}

inline void run_concentration_envelope(const ExperimentConfig& cfg,
                                       const observables::Observable& f, const RunOptions& run,
                                       ExperimentReport& report) {
  const std::size_t n = cfg.n_list.back();
  const auto K = make_conc_functional(cfg, f, n, cfg.seed, run);
  const auto d = concentration::functional_samples(K, cfg.system, cfg.m, cfg.seed, cfg.burn_in,
                                                   run.threads);
  if (d.excluded_escaped > 0) {
    report.warnings.push_back("concentration: " + std::to_string(d.excluded_escaped) +
                              " escaped orbits excluded");
  }
  const auto fit = concentration::envelope_fit(d);
  Table te;
  te.name = "envelope";
  te.columns = {"t", "tail_fraction"};
  for (std::size_t i = 0; i < fit.t_grid.size() && i < fit.tail_fraction.size(); ++i) {
    te.rows.push_back({fit.t_grid[i], fit.tail_fraction[i]});
  }
  report.tables.push_back(std::move(te));
  Table tf;
  tf.name = "fit";
  tf.columns = {"regime", "c_hat", "quality", "gaussian_slope", "gaussian_r2",
                "polynomial_slope", "polynomial_r2", "censored", "lip_sum_sq"};
  tf.rows.push_back({std::string(concentration::to_string(fit.regime)), fit.c_hat, fit.quality,
                     fit.gaussian_slope, fit.gaussian_r2, fit.polynomial_slope,
                     fit.polynomial_r2, i64(fit.censored), d.lip_sum_sq});
  report.tables.push_back(std::move(tf));
  if (fit.zero_variance) {
    report.warnings.push_back("concentration: zero-variance deviation sample (inconclusive)");
    report.status = RunStatus::degenerate;
  }
}

inline void run_correlation_dev(const ExperimentConfig& cfg, const observables::Observable& f,
                                const RunOptions& run, ExperimentReport& report) {
  const auto points = concentration::correlation_dev_experiment(
      f, cfg.system, cfg.n_list, cfg.lag_k, cfg.dev_t, cfg.m, cfg.seed, run.threads);
  Table t;
  t.name = "correlation_dev";
  t.columns = {"n", "fraction", "censored"};
  for (const auto& pt : points) {
    t.rows.push_back({i64(pt.n), pt.fraction, pt.censored});
    if (pt.censored) {
      report.warnings.push_back("correlation_dev: zero exceedances at n = " +
                                std::to_string(pt.n) + " (1/m bound)");
    }
  }
  report.tables.push_back(std::move(t));
}

inline void run_empirical_measure(const ExperimentConfig& cfg, const RunOptions& run,
                                  ExperimentReport& report) {
  const auto ref = concentration::make_reference_measure(
      cfg.system, prng::mix64(cfg.seed ^ 0x5ef), cfg.calibration_steps, 100'000, run.threads);
  if (!ref.exact_uniform) {
    report.warnings.push_back("empirical_measure: reference measure from a calibration orbit "
                              "(no closed form)");
  }
  Table t;
  t.name = "empirical_measure";
  t.columns = {"n", "mean_dist"};
  std::vector<double> logn, logd;
  std::optional<concentration::EmpiricalMeasureConc> largest;
  for (std::size_t idx = 0; idx < cfg.n_list.size(); ++idx) {
    auto conc = concentration::empirical_measure_conc(cfg.system, cfg.n_list[idx], cfg.m, ref,
                                                      prng::substream_seed(cfg.seed, idx),
                                                      run.threads);
    t.rows.push_back({i64(conc.n), conc.mean_dist});
    logn.push_back(std::log(static_cast<double>(conc.n)));
    logd.push_back(std::log(conc.mean_dist));
    largest = std::move(conc);
  }
  report.tables.push_back(std::move(t));
  if (logn.size() >= 2) {
    const auto fit = numeric::linear_fit(logn, logd);
    Table tf;
    tf.name = "fit";
    tf.columns = {"slope", "r2"};
    tf.rows.push_back({fit.slope, fit.r2});
    report.tables.push_back(std::move(tf));
  }
  if (largest) {
    const auto env = concentration::envelope_fit(largest->scaled);
    Table te;
    te.name = "envelope";
    te.columns = {"regime", "quality", "c_hat"};
    te.rows.push_back(
        {std::string(concentration::to_string(env.regime)), env.quality, env.c_hat});
    report.tables.push_back(std::move(te));
  }
  if (cfg.system.kind == dynsys::MapKind::doubling) {
    report.warnings.push_back("empirical_measure: the 1/sqrt(n) mean bound is proved for the "
                              "quadratic family; doubling is tagged as extrapolation");
  }
}

inline void run_shadowing(const ExperimentConfig& cfg, const RunOptions& run,
                          ExperimentReport& report) {
  const std::size_t m_test = std::min<std::size_t>(cfg.m, 200);
  const auto quantiles = concentration::shadowing_experiment(
      cfg.system, cfg.mu_a, cfg.n_list, cfg.m, m_test, cfg.seed, run.threads);
  Table t;
  t.name = "shadowing";
  t.columns = {"n", "q50", "q90", "q99", "theory_scale"};
  for (const auto& q : quantiles) {
    t.rows.push_back({i64(q.n), q.q50, q.q90, q.q99, q.theory_scale});
  }
  report.tables.push_back(std::move(t));
}

inline void run_periodogram(const ExperimentConfig& cfg, const observables::Observable& f,
                            const RunOptions& run, ExperimentReport& report) {
  // limit series from a dedicated calibration ensemble
  dynsys::EnsembleSpec cal;
  cal.m = 64;
  cal.n = 8192 + cfg.max_lag;
  cal.burn_in = cfg.burn_in;
  cal.seed = prng::mix64(cfg.seed ^ 0x9d09);
  const auto ensemble = dynsys::generate_ensemble(cfg.system, cal, run.threads);
  const auto series = ergostat::covariance_series(f, ensemble, cfg.max_lag);
  const auto gk = ergostat::green_kubo(series);
  const auto grid = omega_grid(cfg.omega_count);
  Table tl;
  tl.name = "limit";
  tl.columns = {"omega", "j_limit"};
  for (double w : grid) {
    tl.rows.push_back({w, concentration::periodogram_limit(series, w, gk.cutoff_lag)});
  }
  report.tables.push_back(std::move(tl));
  Table t;
  t.name = "supdev";
  t.columns = {"n", "median_sup_dev", "q99_sup_dev", "theory_scale"};
  for (std::size_t idx = 0; idx < cfg.n_list.size(); ++idx) {
    const auto sd = concentration::periodogram_sup_dev(
        f, cfg.system, cfg.n_list[idx], cfg.m, series, gk.cutoff_lag, grid,
        prng::substream_seed(cfg.seed, idx), run.threads);
    t.rows.push_back({i64(sd.n), sd.median, sd.q99, sd.theory_scale});
  }
  report.tables.push_back(std::move(t));
  report.warnings.push_back("periodogram: lag-aggregated evaluation capped at lag " +
                            std::to_string(concentration::kPeriodogramLagCap));
}

inline void run_nonconventional(const ExperimentConfig& cfg, const observables::Observable& f,
                                const RunOptions& run, ExperimentReport& report) {
  const std::size_t n = cfg.n_list.back();
  const std::vector<observables::Observable> f_list(cfg.ell, f);
  dynsys::EnsembleSpec spec = spec_for(cfg, cfg.ell * (n - 1) + 1, cfg.seed);
  std::vector<double> values(spec.m, std::numeric_limits<double>::quiet_NaN());
  dynsys::for_each_orbit(cfg.system, spec, run.threads,
                         [&](std::size_t i, const dynsys::Orbit& o) {
                           if (o.escaped || o.points.size() < spec.n) return;
                           values[i] = ergostat::nonconventional_average(f_list, o, n);
                         });
  std::erase_if(values, [](double v) { return !std::isfinite(v); });
  if (values.empty()) throw std::runtime_error("nonconventional: no usable orbits");
  Table t;
  t.name = "nonconventional";
  t.columns = {"ell", "n", "m", "value", "std_error"};
  t.rows.push_back({i64(cfg.ell), i64(n), i64(values.size()), numeric::mean(values),
                    numeric::std_error_of_mean(values)});
  report.tables.push_back(std::move(t));
}

}  // namespace detail

/// Runs a validated config. Deterministic given the config: reports carry
/// no wall-clock state.
inline ExperimentReport run(const ExperimentConfig& cfg, const RunOptions& options = {}) {
  ExperimentReport report;
  report.experiment = to_string(cfg.experiment);
  report.config_echo = cfg.echo;
  report.seed = cfg.seed;
  detail::note_system_warnings(cfg, report);

  const auto f = resolve_observable(cfg, options.threads);
  switch (cfg.experiment) {
    case Experiment::covariance:
      detail::run_covariance(cfg, f, options, report);
      break;
    case Experiment::clt:
      detail::run_clt(cfg, f, options, report);
      break;
    case Experiment::stable:
      detail::run_stable(cfg, f, options, report);
      break;
    case Experiment::asclt:
      detail::run_asclt(cfg, f, options, report);
      break;
    case Experiment::berry_esseen:
      detail::run_berry_esseen(cfg, f, options, report);
      break;
    case Experiment::large_dev:
      detail::run_large_dev(cfg, f, options, report);
      break;
    case Experiment::cgf_rate:
      detail::run_cgf_rate(cfg, f, options, report);
      break;
    case Experiment::erdos_renyi:
      detail::run_erdos_renyi(cfg, f, options, report);
      break;
    case Experiment::moderate:
      detail::run_moderate(cfg, f, options, report);
      break;
    case Experiment::concentration_envelope:
      detail::run_concentration_envelope(cfg, f, options, report);
      break;
    case Experiment::correlation_dev:
      detail::run_correlation_dev(cfg, f, options, report);
      break;
    case Experiment::empirical_measure:
      detail::run_empirical_measure(cfg, options, report);
      break;
    case Experiment::shadowing:
      detail::run_shadowing(cfg, options, report);
      break;
    case Experiment::periodogram:
      detail::run_periodogram(cfg, f, options, report);
      break;
    case Experiment::nonconventional:
      detail::run_nonconventional(cfg, f, options, report);
      break;
  }
  return report;
}

}  // namespace ergolab::expcli
