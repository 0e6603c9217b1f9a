#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ergolab/ergostat.hpp"
#include "ergolab/numeric.hpp"
#include "ergolab/observables.hpp"
#include "ergolab/systems.hpp"

// Monte Carlo verification of the concentration inequalities and their
// applications: correlation estimator, empirical-measure distance, orbit
// shadowing, integrated periodogram.
//
// The inequalities' constants are existential, not numeric, so every
// experiment here asserts envelope shape (linearity of the log-tail in t^2
// or in log t) and scaling exponents in n, never absolute constants.

namespace ergolab::concentration {

using dynsys::EnsembleSpec;
using dynsys::Orbit;
using dynsys::SystemDescriptor;
using observables::Observable;
using observables::SeparatelyLipschitzFunctional;

// ---------------------------------------------------------------------------
// Deviation samples of a separately Lipschitz functional.

struct DeviationSample {
  std::string functional;
  std::vector<double> values;  // centered: sum is ~0
  double lip_sum_sq = 0.0;
  std::size_t excluded_escaped = 0;
  bool zero_variance = false;
};

/// m centered evaluations of K over independent orbits of length K.arity.
inline DeviationSample functional_samples(const SeparatelyLipschitzFunctional& K,
                                          const SystemDescriptor& system, std::size_t m,
                                          std::uint64_t seed, std::size_t burn_in = 1000,
                                          unsigned threads = 1) {
  DeviationSample out;
  out.functional = K.name;
  out.lip_sum_sq = observables::lip_sum_sq(K);
  EnsembleSpec spec;
  spec.m = m;
  spec.n = K.arity;
  spec.burn_in = burn_in;
  spec.seed = seed;
  std::vector<double> vals(m, std::numeric_limits<double>::quiet_NaN());
  dynsys::for_each_orbit(system, spec, threads, [&](std::size_t i, const Orbit& o) {
    if (o.escaped || o.points.size() < K.arity) return;
    vals[i] = K.eval(std::span<const dynsys::Point>(o.points.data(), K.arity));
  });
  for (double v : vals) {
    if (std::isfinite(v)) {
      out.values.push_back(v);
    } else {
      ++out.excluded_escaped;
    }
  }
  if (out.values.empty()) throw std::runtime_error("functional_samples: no usable orbits");
  const double mean = numeric::mean(out.values);
  for (double& v : out.values) v -= mean;
  if (numeric::variance(out.values) == 0.0) out.zero_variance = true;
  return out;
}

// ---------------------------------------------------------------------------
// Envelope fitting.

enum class EnvelopeRegime { gaussian_envelope, polynomial_envelope, inconclusive };

inline const char* to_string(EnvelopeRegime r) {
  switch (r) {
    case EnvelopeRegime::gaussian_envelope: return "gaussian_envelope";
    case EnvelopeRegime::polynomial_envelope: return "polynomial_envelope";
    case EnvelopeRegime::inconclusive: return "inconclusive";
  }
  return "?";
}

struct ConcentrationReport {
  EnvelopeRegime regime = EnvelopeRegime::inconclusive;
  double c_hat = 0.0;  // fitted envelope constant (gaussian regime)
  double quality = 0.0;  // R^2 of the winning regression
  double gaussian_slope = 0.0;    // of log P against t^2 / lip_sum_sq
  double gaussian_r2 = 0.0;
  double polynomial_slope = 0.0;  // of log P against log t
  double polynomial_r2 = 0.0;
  std::vector<double> t_grid;
  std::vector<double> tail_fraction;
  std::size_t censored = 0;
  bool zero_variance = false;
};

/// Quantile-spaced default grid over the deviation magnitudes.
inline std::vector<double> default_t_grid(const DeviationSample& d, std::size_t points = 9) {
  std::vector<double> mags(d.values.size());
  for (std::size_t i = 0; i < d.values.size(); ++i) mags[i] = std::abs(d.values[i]);
  std::sort(mags.begin(), mags.end());
  std::vector<double> grid;
  for (std::size_t i = 0; i < points; ++i) {
    const double q = 0.5 + 0.49 * static_cast<double>(i) / static_cast<double>(points - 1);
    grid.push_back(mags[static_cast<std::size_t>(q * static_cast<double>(mags.size() - 1))]);
  }
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

/// Fits log P(|D| > t) against t^2 / lip_sum_sq (gaussian envelope) and
/// against log t (polynomial envelope); reports the better regime. The
/// gaussian slope s recovers the envelope constant via C = -1/(4 s).
inline ConcentrationReport envelope_fit(const DeviationSample& d,
                                        std::vector<double> t_grid = {}) {
  if (d.values.size() < 1000) throw std::invalid_argument("envelope_fit: need >= 1000 samples");
  ConcentrationReport report;
  if (d.zero_variance) {
    report.zero_variance = true;
    return report;
  }
  if (t_grid.empty()) t_grid = default_t_grid(d);
  const double m = static_cast<double>(d.values.size());
  std::vector<double> x_gauss, x_poly, y;
  report.t_grid = t_grid;
  for (double t : t_grid) {
    if (!(t > 0.0)) continue;
    std::size_t count = 0;
    for (double v : d.values) count += std::abs(v) > t ? 1 : 0;
    double frac = static_cast<double>(count) / m;
    if (count == 0) {
      ++report.censored;
      report.tail_fraction.push_back(0.0);
      continue;  // censored points carry no usable log value
    }
    report.tail_fraction.push_back(frac);
    x_gauss.push_back(t * t / d.lip_sum_sq);
    x_poly.push_back(std::log(t));
    y.push_back(std::log(frac));
  }
  if (y.size() < 5) {
    throw std::invalid_argument("envelope_fit: fewer than 5 usable t-grid points");
  }
  const auto fit_g = numeric::linear_fit(x_gauss, y);
  const auto fit_p = numeric::linear_fit(x_poly, y);
  report.gaussian_slope = fit_g.slope;
  report.gaussian_r2 = fit_g.r2;
  report.polynomial_slope = fit_p.slope;
  report.polynomial_r2 = fit_p.r2;
  if (fit_g.r2 >= fit_p.r2) {
    report.regime = EnvelopeRegime::gaussian_envelope;
    report.quality = fit_g.r2;
    report.c_hat = fit_g.slope < 0.0 ? -1.0 / (4.0 * fit_g.slope) : 0.0;
  } else {
    report.regime = EnvelopeRegime::polynomial_envelope;
    report.quality = fit_p.r2;
    report.c_hat = fit_p.slope < 0.0 ? -fit_p.slope : 0.0;
  }
  if (report.c_hat <= 0.0) report.regime = EnvelopeRegime::inconclusive;
  return report;
}

// ---------------------------------------------------------------------------
// Variance bound (the p = 2 concentration inequality).

struct VarianceRatio {
  std::size_t n = 0;
  double variance = 0.0;
  double lip_sum_sq = 0.0;
  double ratio = 0.0;
};

/// Var(K_n) / sum Lip_l(K_n)^2 across a family of functionals indexed by n;
/// the concentration inequality bounds this by a constant.
template <typename MakeFunctional>
std::vector<VarianceRatio> variance_bound_check(MakeFunctional&& make,
                                                const SystemDescriptor& system,
                                                std::span<const std::size_t> n_list,
                                                std::size_t m, std::uint64_t seed,
                                                unsigned threads = 1) {
  std::vector<VarianceRatio> out;
  for (std::size_t idx = 0; idx < n_list.size(); ++idx) {
    const std::size_t n = n_list[idx];
    const SeparatelyLipschitzFunctional K = make(n);
    const auto d =
        functional_samples(K, system, m, prng::substream_seed(seed, idx), 1000, threads);
    VarianceRatio r;
    r.n = n;
    r.variance = numeric::variance(d.values);
    r.lip_sum_sq = d.lip_sum_sq;
    r.ratio = r.lip_sum_sq > 0.0 ? r.variance / r.lip_sum_sq : 0.0;
    out.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Correlation-estimator concentration.

struct ExceedancePoint {
  std::size_t n = 0;
  double fraction = 0.0;
  bool censored = false;
};

/// Exceedance fraction of |C_hat_f(n,k,x) - mean| > t per n. The theorem's
/// bound is 2 exp(-D n^2 t^2 / (n+k)); only the decreasing trend and the
/// log-linearity are asserted downstream.
inline std::vector<ExceedancePoint> correlation_dev_experiment(
    const Observable& f, const SystemDescriptor& system, std::span<const std::size_t> n_list,
    std::size_t k, double t, std::size_t m, std::uint64_t seed, unsigned threads = 1) {
  if (!f.mean_zero) throw std::invalid_argument("correlation_dev_experiment: centered f required");
  if (!std::isfinite(f.lipschitz_constant)) {
    throw std::invalid_argument("correlation_dev_experiment: Lipschitz f required");
  }
  std::vector<ExceedancePoint> out;
  for (std::size_t idx = 0; idx < n_list.size(); ++idx) {
    const std::size_t n = n_list[idx];
    EnsembleSpec spec;
    spec.m = m;
    spec.n = n + k;
    spec.burn_in = 1000;
    spec.seed = prng::substream_seed(seed, idx);
    auto est = dynsys::per_orbit_values(system, spec, threads, [&](const Orbit& o) {
      std::vector<double> fv(o.points.size());
      for (std::size_t i = 0; i < o.points.size(); ++i) fv[i] = f.eval(o.points[i]);
      return ergostat::correlation_estimator(fv, n, k);
    });
    const double center = numeric::mean(est);
    std::size_t count = 0;
    for (double v : est) count += std::abs(v - center) > t ? 1 : 0;
    ExceedancePoint pt;
    pt.n = n;
    pt.fraction = static_cast<double>(count) / static_cast<double>(est.size());
    if (count == 0) {
      pt.censored = true;
      pt.fraction = 1.0 / static_cast<double>(est.size());
    }
    out.push_back(pt);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Empirical-measure concentration.

struct EmpiricalMeasureConc {
  std::size_t n = 0;
  double mean_dist = 0.0;
  DeviationSample scaled;  // sqrt(n) (dist - mean), lip_sum_sq = 1
};

/// Reference measure for the Kantorovich comparison: the exact uniform law
/// for the doubling map, otherwise a quantile-compressed calibration orbit.
struct ReferenceMeasure {
  bool exact_uniform = false;
  ergostat::EmpiricalDistribution empirical;
};

inline ReferenceMeasure make_reference_measure(const SystemDescriptor& system,
                                               std::uint64_t seed,
                                               std::size_t calibration_steps = 10'000'000,
                                               std::size_t keep_atoms = 100'000,
                                               unsigned threads = 1) {
  ReferenceMeasure ref;
  if (system.kind == dynsys::MapKind::doubling || system.kind == dynsys::MapKind::iid_uniform) {
    ref.exact_uniform = true;
    return ref;
  }
  EnsembleSpec spec;
  spec.m = 16;
  spec.n = std::max<std::size_t>(1, calibration_steps / spec.m);
  spec.burn_in = 1000;
  spec.seed = seed;
  std::vector<std::vector<double>> chunks(spec.m);
  dynsys::for_each_orbit(system, spec, threads, [&](std::size_t i, const Orbit& o) {
    chunks[i].reserve(o.points.size());
    for (const auto& p : o.points) chunks[i].push_back(p.x);
  });
  std::vector<double> all;
  for (auto& c : chunks) all.insert(all.end(), c.begin(), c.end());
  if (all.empty()) throw std::runtime_error("make_reference_measure: calibration orbit missing");
  std::sort(all.begin(), all.end());
  // equal-mass quantile compression: W1 error <= 1/(2 keep_atoms) of range
  std::vector<double> atoms;
  atoms.reserve(keep_atoms);
  for (std::size_t i = 0; i < keep_atoms; ++i) {
    const double q = (static_cast<double>(i) + 0.5) / static_cast<double>(keep_atoms);
    atoms.push_back(all[static_cast<std::size_t>(q * static_cast<double>(all.size() - 1))]);
  }
  ref.empirical = ergostat::EmpiricalDistribution::from_samples(std::move(atoms));
  return ref;
}

inline double distance_to_reference(const ergostat::EmpiricalDistribution& e,
                                    const ReferenceMeasure& ref) {
  if (ref.exact_uniform) return ergostat::kantorovich_1d(e, ergostat::Uniform01{});
  return ergostat::kantorovich_1d(e, ref.empirical);
}

/// Distribution of sqrt(n) (dist_K(E_n, mu_ref) - mean) across orbits. The
/// scaling makes lip_sum_sq = n (1/n)^2 * n = 1 for the scaled sample.
inline EmpiricalMeasureConc empirical_measure_conc(const SystemDescriptor& system,
                                                   std::size_t n, std::size_t m,
                                                   const ReferenceMeasure& ref,
                                                   std::uint64_t seed, unsigned threads = 1) {
  if (system.dimension != 1) {
    throw std::invalid_argument("empirical_measure_conc: 1-D systems only");
  }
  EnsembleSpec spec;
  spec.m = m;
  spec.n = n;
  spec.burn_in = 1000;
  spec.seed = seed;
  auto dists = dynsys::per_orbit_values(system, spec, threads, [&](const Orbit& o) {
    return distance_to_reference(ergostat::empirical_measure(o), ref);
  });
  EmpiricalMeasureConc out;
  out.n = n;
  out.mean_dist = numeric::mean(dists);
  out.scaled.functional = "kantorovich_empirical_measure";
  out.scaled.lip_sum_sq = 1.0;
  out.scaled.values.reserve(dists.size());
  const double root_n = std::sqrt(static_cast<double>(n));
  for (double v : dists) out.scaled.values.push_back(root_n * (v - out.mean_dist));
  if (numeric::variance(out.scaled.values) == 0.0) out.scaled.zero_variance = true;
  return out;
}

// ---------------------------------------------------------------------------
// Orbit shadowing.

/// S_A(x, n) = (1/n) min over reference orbits of the summed tracing
/// distance; 0 when x's own orbit belongs to A.
inline double shadowing_stat(const SystemDescriptor& system, const Orbit& x_orbit,
                             std::span<const Orbit> reference_orbits, std::size_t n) {
  if (reference_orbits.empty()) throw std::invalid_argument("shadowing_stat: empty reference set");
  if (x_orbit.points.size() < n) throw std::invalid_argument("shadowing_stat: orbit too short");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& ref : reference_orbits) {
    if (ref.points.size() < n) throw std::invalid_argument("shadowing_stat: reference too short");
    numeric::KahanSum s;
    for (std::size_t j = 0; j < n; ++j) {
      s.add(dynsys::tracing_distance(system, x_orbit.points[j], ref.points[j]));
    }
    best = std::min(best, s.value() / static_cast<double>(n));
  }
  return best;
}

struct ShadowingQuantiles {
  std::size_t n = 0;
  double q50 = 0.0;
  double q90 = 0.0;
  double q99 = 0.0;
  double theory_scale = 0.0;  // sqrt(log n) / (mu(A) sqrt(n))
};

/// Quantiles of S_A over test orbits, with A the sub-ensemble of orbits
/// whose initial point falls in a set of target measure mu_A (an initial
/// interval of the 1-D domain).
inline std::vector<ShadowingQuantiles> shadowing_experiment(
    const SystemDescriptor& system, double mu_A, std::span<const std::size_t> n_list,
    std::size_t m_reference_pool, std::size_t m_test, std::uint64_t seed,
    unsigned threads = 1) {
  if (system.dimension != 1) throw std::invalid_argument("shadowing_experiment: 1-D systems only");
  if (!(mu_A > 0.0 && mu_A <= 1.0)) throw std::invalid_argument("shadowing_experiment: mu_A in (0,1]");
  const std::size_t n_max = *std::max_element(n_list.begin(), n_list.end());
  const auto range = dynsys::x_range(system);
  const double cut = range.lo + mu_A * (range.hi - range.lo);

  // Reference set: orbits from the pool whose initial point lies in the
  // target interval. No burn-in: membership is defined by the initial point.
  EnsembleSpec pool;
  pool.m = m_reference_pool;
  pool.n = n_max;
  pool.burn_in = 0;
  pool.seed = prng::mix64(seed ^ 0xA11ce5);
  std::vector<Orbit> reference;
  for (std::size_t i = 0; i < pool.m; ++i) {
    Orbit o = dynsys::make_orbit(system, pool, i);
    if (!o.points.empty() && o.points.front().x < cut) reference.push_back(std::move(o));
  }
  if (reference.empty()) throw std::runtime_error("shadowing_experiment: A is empty at this m");

  EnsembleSpec test;
  test.m = m_test;
  test.n = n_max;
  test.burn_in = 0;
  test.seed = prng::mix64(seed ^ 0x7e57);
  std::vector<std::vector<double>> stats(n_list.size(), std::vector<double>(m_test, 0.0));
  dynsys::for_each_orbit(system, test, threads, [&](std::size_t i, const Orbit& o) {
    for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
      stats[ni][i] = shadowing_stat(system, o, reference, n_list[ni]);
    }
  });
  std::vector<ShadowingQuantiles> out;
  for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
    ShadowingQuantiles q;
    q.n = n_list[ni];
    q.q50 = numeric::quantile(stats[ni], 0.50);
    q.q90 = numeric::quantile(stats[ni], 0.90);
    q.q99 = numeric::quantile(stats[ni], 0.99);
    const double nd = static_cast<double>(q.n);
    q.theory_scale = std::sqrt(std::log(nd)) / (mu_A * std::sqrt(nd));
    out.push_back(q);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Integrated periodogram.

/// Lag cap for the exact lag-aggregated evaluation; truncation error is
/// reported against the covariance cutoff diagnostics.
inline constexpr std::size_t kPeriodogramLagCap = 2000;

struct PeriodogramLags {
  double sum_sq = 0.0;             // sum f_j^2
  std::vector<double> lag_sums;    // A_d = sum_j f_j f_{j+d}, d = 1..L
  std::size_t n = 0;
};

inline PeriodogramLags periodogram_lags(std::span<const double> f_values,
                                        std::size_t lag_cap = kPeriodogramLagCap) {
  PeriodogramLags lags;
  lags.n = f_values.size();
  const std::size_t L = std::min(lag_cap, f_values.size() == 0 ? 0 : f_values.size() - 1);
  numeric::KahanSum sq;
  for (double v : f_values) sq.add(v * v);
  lags.sum_sq = sq.value();
  lags.lag_sums.resize(L, 0.0);
  for (std::size_t d = 1; d <= L; ++d) {
    double s = 0.0;
    for (std::size_t j = 0; j + d < f_values.size(); ++j) s += f_values[j] * f_values[j + d];
    lags.lag_sums[d - 1] = s;
  }
  return lags;
}

/// J_n(x, omega) by the exact closed form
/// (1/n) [omega sum f_j^2 + 2 sum_{d>=1} A_d sin(d omega) / d],
/// evaluated through the lag cap.
inline double integrated_periodogram_from_lags(const PeriodogramLags& lags, double omega) {
  if (!(omega >= 0.0 && omega <= 2.0 * std::numbers::pi)) {
    throw std::invalid_argument("integrated_periodogram: omega outside [0, 2pi]");
  }
  numeric::KahanSum s;
  s.add(omega * lags.sum_sq);
  for (std::size_t d = 1; d <= lags.lag_sums.size(); ++d) {
    s.add(2.0 * lags.lag_sums[d - 1] * std::sin(static_cast<double>(d) * omega) /
          static_cast<double>(d));
  }
  return s.value() / static_cast<double>(lags.n);
}

inline double integrated_periodogram(std::span<const double> f_values, double omega,
                                     std::size_t lag_cap = kPeriodogramLagCap) {
  if (f_values.empty()) throw std::invalid_argument("integrated_periodogram: empty values");
  return integrated_periodogram_from_lags(periodogram_lags(f_values, lag_cap), omega);
}

/// The limit J(omega) = C(0) omega + 2 sum_k sin(omega k) C(k) / k,
/// truncated at the series cutoff lag.
inline double periodogram_limit(const ergostat::CovarianceSeries& series, double omega,
                                std::size_t cutoff_lag) {
  if (!(omega >= 0.0 && omega <= 2.0 * std::numbers::pi)) {
    throw std::invalid_argument("periodogram_limit: omega outside [0, 2pi]");
  }
  if (series.values.empty()) throw std::invalid_argument("periodogram_limit: empty series");
  const std::size_t L = std::min(cutoff_lag, series.values.size() - 1);
  numeric::KahanSum s;
  s.add(series.values[0] * omega);
  for (std::size_t k = 1; k <= L; ++k) {
    s.add(2.0 * std::sin(omega * static_cast<double>(k)) / static_cast<double>(k) *
          series.values[k]);
  }
  return s.value();
}

struct PeriodogramSupDev {
  std::size_t n = 0;
  double median = 0.0;
  double q99 = 0.0;
  double theory_scale = 0.0;  // (1 + log n)^{3/2} / sqrt(n)
};

/// Distribution across orbits of sup over the omega grid of |J_n - J|.
inline PeriodogramSupDev periodogram_sup_dev(const Observable& f,
                                             const SystemDescriptor& system, std::size_t n,
                                             std::size_t m,
                                             const ergostat::CovarianceSeries& series,
                                             std::size_t cutoff_lag,
                                             std::span<const double> omega_grid,
                                             std::uint64_t seed, unsigned threads = 1) {
  if (!f.mean_zero) throw std::invalid_argument("periodogram_sup_dev: centered f required");
  if (omega_grid.empty()) throw std::invalid_argument("periodogram_sup_dev: empty omega grid");
  std::vector<double> limits(omega_grid.size());
  for (std::size_t i = 0; i < omega_grid.size(); ++i) {
    limits[i] = periodogram_limit(series, omega_grid[i], cutoff_lag);
  }
  EnsembleSpec spec;
  spec.m = m;
  spec.n = n;
  spec.burn_in = 1000;
  spec.seed = seed;
  auto sup_dev = dynsys::per_orbit_values(system, spec, threads, [&](const Orbit& o) {
    std::vector<double> fv(o.points.size());
    for (std::size_t i = 0; i < o.points.size(); ++i) fv[i] = f.eval(o.points[i]);
    const auto lags = periodogram_lags(fv);
    double sup = 0.0;
    for (std::size_t i = 0; i < omega_grid.size(); ++i) {
      sup = std::max(sup,
                     std::abs(integrated_periodogram_from_lags(lags, omega_grid[i]) - limits[i]));
    }
    return sup;
  });
  PeriodogramSupDev out;
  out.n = n;
  out.median = numeric::quantile(sup_dev, 0.5);
  out.q99 = numeric::quantile(sup_dev, 0.99);
  const double nd = static_cast<double>(n);
  out.theory_scale = std::pow(1.0 + std::log(nd), 1.5) / std::sqrt(nd);
  return out;
}

}  // namespace ergolab::concentration
