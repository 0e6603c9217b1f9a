#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "ergolab/ergostat.hpp"
#include "ergolab/numeric.hpp"
#include "ergolab/observables.hpp"
#include "ergolab/systems.hpp"

// Distributional limit testing: CLT, stable laws, almost-sure CLT and
// Berry-Esseen rate probes.

namespace ergolab::limitlaw {

using dynsys::EnsembleSpec;
using dynsys::SystemDescriptor;
using ergostat::EmpiricalDistribution;
using observables::Observable;

// ---------------------------------------------------------------------------
// Stable laws.

/// Parameters of the stable law W_{p,c,beta}, p in (1,2].
struct StableLawParams {
  double p = 2.0;
  double c = 1.0;
  double beta = 0.0;

  StableLawParams() = default;
  StableLawParams(double p_, double c_, double beta_) : p(p_), c(c_), beta(beta_) {
    if (!(p > 1.0 && p <= 2.0)) throw std::invalid_argument("StableLawParams: p outside (1,2]");
    if (!(c > 0.0)) throw std::invalid_argument("StableLawParams: c must be positive");
    if (!(beta >= -1.0 && beta <= 1.0)) throw std::invalid_argument("StableLawParams: |beta| > 1");
  }
};

/// Characteristic function e^{-c|t|^p (1 - i beta sgn(t) tan(p pi / 2))}.
/// p = 2 is the Gaussian case: tan(pi) = 0 kills the imaginary part exactly.
inline std::complex<double> stable_cf(double t, const StableLawParams& params) {
  if (t == 0.0) return {1.0, 0.0};
  const double mag = params.c * std::pow(std::abs(t), params.p);
  const double tan_term =
      params.p == 2.0 ? 0.0 : std::tan(params.p * std::numbers::pi / 2.0);
  const double sgn = t > 0.0 ? 1.0 : -1.0;
  const std::complex<double> exponent(-mag, mag * params.beta * sgn * tan_term);
  return std::exp(exponent);
}

/// Mean of e^{i t s} over the samples.
inline std::complex<double> empirical_cf(std::span<const double> samples, double t) {
  if (samples.empty()) throw std::invalid_argument("empirical_cf: no samples");
  numeric::KahanSum re, im;
  for (double s : samples) {
    re.add(std::cos(t * s));
    im.add(std::sin(t * s));
  }
  const double n = static_cast<double>(samples.size());
  return {re.value() / n, im.value() / n};
}

inline std::vector<double> default_cf_grid() {
  // 41 points on [-2, 2]: the CF is most discriminating at moderate |t|.
  std::vector<double> g(41);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = -2.0 + 0.1 * static_cast<double>(i);
  return g;
}

/// max over the grid of |empirical_cf - stable_cf|.
inline double cf_distance(std::span<const double> samples, const StableLawParams& params,
                          std::span<const double> t_grid) {
  if (t_grid.empty()) throw std::invalid_argument("cf_distance: empty grid");
  double sup = 0.0;
  for (double t : t_grid) {
    sup = std::max(sup, std::abs(empirical_cf(samples, t) - stable_cf(t, params)));
  }
  return sup;
}

/// Least-squares fit of the scale c on the CF grid for fixed p and beta.
/// (The limit theorem supplies p and beta but not c.)
inline double fit_stable_scale(std::span<const double> samples, double p, double beta,
                               std::span<const double> t_grid) {
  if (t_grid.empty()) throw std::invalid_argument("fit_stable_scale: empty grid");
  std::vector<std::complex<double>> ecf(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) ecf[i] = empirical_cf(samples, t_grid[i]);
  const auto objective = [&](double c) {
    const StableLawParams params(p, c, beta);
    double s = 0.0;
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
      s += std::norm(ecf[i] - stable_cf(t_grid[i], params));
    }
    return s;
  };
  // coarse log-scan then golden-section refinement
  double best_c = 1.0, best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 160; ++i) {
    const double c = std::pow(10.0, -4.0 + 6.0 * i / 160.0);
    const double v = objective(c);
    if (v < best) {
      best = v;
      best_c = c;
    }
  }
  double lo = best_c / 1.2, hi = best_c * 1.2;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 60; ++it) {
    const double c1 = hi - gr * (hi - lo);
    const double c2 = lo + gr * (hi - lo);
    if (objective(c1) < objective(c2)) {
      hi = c2;
    } else {
      lo = c1;
    }
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Renormalizing sequences.

enum class RenormKind { sqrt_n, n_alpha, sqrt_n_log_n };

struct RenormSequence {
  RenormKind kind = RenormKind::sqrt_n;
  double alpha = 0.5;  // for n_alpha

  static RenormSequence sqrt_n() { return {RenormKind::sqrt_n, 0.5}; }
  static RenormSequence n_alpha(double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("RenormSequence: alpha must be positive");
    return {RenormKind::n_alpha, alpha};
  }
  static RenormSequence sqrt_n_log_n() { return {RenormKind::sqrt_n_log_n, 0.0}; }
};

/// B_n > 0, nondecreasing for n >= 2.
inline double renorm_value(const RenormSequence& seq, std::size_t n) {
  if (n < 1) throw std::invalid_argument("renorm_value: n must be >= 1");
  const double nd = static_cast<double>(n);
  switch (seq.kind) {
    case RenormKind::sqrt_n:
      return std::sqrt(nd);
    case RenormKind::n_alpha:
      return std::pow(nd, seq.alpha);
    case RenormKind::sqrt_n_log_n:
      if (n < 2) throw std::invalid_argument("renorm_value: sqrt_n_log_n needs n >= 2");
      return std::sqrt(nd * std::log(nd));
  }
  throw std::logic_error("renorm_value: unknown kind");
}

// ---------------------------------------------------------------------------
// Normalized sums and CLT testing.

/// One sample (S_n f) / B_n per (non-escaped) orbit.
inline EmpiricalDistribution normalized_sums(const Observable& f,
                                             const dynsys::OrbitEnsemble& ensemble,
                                             const RenormSequence& seq) {
  if (!f.mean_zero) throw std::invalid_argument("normalized_sums: observable must be centered");
  std::vector<double> samples;
  samples.reserve(ensemble.orbits.size());
  for (const auto& orbit : ensemble.orbits) {
    if (orbit.escaped || orbit.points.empty()) continue;
    samples.push_back(observables::ergodic_sum(f, orbit) /
                      renorm_value(seq, orbit.points.size()));
  }
  return EmpiricalDistribution::from_samples(std::move(samples));
}

using ergostat::gaussian_cdf;

struct CltPoint {
  std::size_t n = 0;
  double ks = 0.0;
};

struct CltResult {
  std::vector<CltPoint> points;
  double sigma2_hat = 0.0;
  std::size_t cutoff_lag = 0;
  bool degenerate = false;
  std::size_t m = 0;
  std::size_t escaped_count = 0;
};

struct CltOptions {
  std::size_t m = 2000;             // orbits per n
  std::size_t burn_in = 1000;
  std::size_t calibration_m = 64;   // ensemble for the Green-Kubo variance
  std::size_t calibration_n = 8192;
  std::size_t max_lag = 64;
  unsigned threads = 1;
};

/// Green-Kubo variance of f under the system's SRB measure, estimated from
/// a dedicated calibration ensemble.
inline ergostat::GreenKuboResult green_kubo_variance(const Observable& f,
                                                     const SystemDescriptor& system,
                                                     std::uint64_t seed,
                                                     const CltOptions& opt = {}) {
  EnsembleSpec cal;
  cal.m = opt.calibration_m;
  cal.n = opt.calibration_n + opt.max_lag;
  cal.burn_in = opt.burn_in;
  cal.seed = seed;
  const auto ensemble = dynsys::generate_ensemble(system, cal, opt.threads);
  const auto series = ergostat::covariance_series(f, ensemble, opt.max_lag);
  return ergostat::green_kubo(series);
}

/// KS distance of (S_n f)/sqrt(n) to N(0, sigma2_hat) for each n.
inline CltResult clt_test(const Observable& f, const SystemDescriptor& system,
                          std::span<const std::size_t> n_list, std::uint64_t seed,
                          const CltOptions& opt = {}) {
  CltResult result;
  result.m = opt.m;
  const auto gk = green_kubo_variance(f, system, prng::mix64(seed ^ 0x5eedcafe), opt);
  result.sigma2_hat = gk.sigma2;
  result.cutoff_lag = gk.cutoff_lag;
  if (gk.degenerate || gk.sigma2 <= 0.0) {
    result.degenerate = true;
    return result;
  }
  for (std::size_t idx = 0; idx < n_list.size(); ++idx) {
    const std::size_t n = n_list[idx];
    EnsembleSpec spec;
    spec.m = opt.m;
    spec.n = n;
    spec.burn_in = opt.burn_in;
    spec.seed = prng::substream_seed(seed, idx);
    std::vector<double> sums(spec.m, std::numeric_limits<double>::quiet_NaN());
    dynsys::for_each_orbit(system, spec, opt.threads,
                           [&](std::size_t i, const dynsys::Orbit& o) {
                             if (o.escaped || o.points.size() < n) return;
                             sums[i] = observables::ergodic_sum(f, o) /
                                       std::sqrt(static_cast<double>(n));
                           });
    const std::size_t before = sums.size();
    std::erase_if(sums, [](double v) { return !std::isfinite(v); });
    result.escaped_count += before - sums.size();
    if (sums.empty()) throw std::runtime_error("clt_test: no usable orbits");
    const auto dist = EmpiricalDistribution::from_samples(std::move(sums));
    result.points.push_back({n, ergostat::ks_distance(dist, ergostat::GaussianLaw{gk.sigma2})});
  }
  return result;
}

/// Least-squares slope of log KS against log n; the Berry-Esseen probe.
struct BerryEsseenResult {
  CltResult clt;
  double slope = 0.0;
  double r2 = 0.0;
  bool degenerate = false;
};

inline BerryEsseenResult berry_esseen_probe(const Observable& f, const SystemDescriptor& system,
                                            std::span<const std::size_t> n_list,
                                            std::uint64_t seed, const CltOptions& opt = {}) {
  if (n_list.size() < 3) throw std::invalid_argument("berry_esseen_probe: need >= 3 n values");
  BerryEsseenResult result;
  result.clt = clt_test(f, system, n_list, seed, opt);
  if (result.clt.degenerate) {
    result.degenerate = true;
    return result;
  }
  std::vector<double> lx, ly;
  for (const auto& pt : result.clt.points) {
    lx.push_back(std::log(static_cast<double>(pt.n)));
    ly.push_back(std::log(pt.ks));
  }
  const auto fit = numeric::linear_fit(lx, ly);
  result.slope = fit.slope;
  result.r2 = fit.r2;
  return result;
}

// ---------------------------------------------------------------------------
// Heavy-tail exponent.

struct TailExponent {
  double p_hat = 0.0;
  double r2 = 0.0;
  std::size_t tail_points = 0;  // samples above the lowest threshold
  double window_lo = 0.0, window_hi = 0.0;
  bool unreliable = false;  // fewer than 50 tail points
  bool poor_fit = false;    // no decade window fits a power law well
  bool steep = false;       // estimate > 3: no heavy tail at this scale
};

/// Tail exponent of |samples|: the negated slope of log survival-fraction
/// against log threshold over a decade-wide window in the upper tail. The
/// window anchor is chosen among upper quantiles by best linear fit, which
/// keeps the estimate inside the power-law regime when the extreme tail is
/// distorted (finite-n truncation) and flags distributions with no power
/// regime at all.
inline TailExponent tail_exponent(std::span<const double> samples) {
  if (samples.size() < 1000) {
    throw std::invalid_argument("tail_exponent: need >= 1000 samples");
  }
  std::vector<double> a(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) a[i] = std::abs(samples[i]);
  std::sort(a.begin(), a.end());
  const auto survival = [&](double x) {
    return static_cast<double>(a.end() - std::upper_bound(a.begin(), a.end(), x)) /
           static_cast<double>(a.size());
  };
  TailExponent best;
  double best_r2 = -1.0;
  for (double q : {0.90, 0.95, 0.98, 0.995, 0.999}) {
    const double hi = a[static_cast<std::size_t>(q * static_cast<double>(a.size() - 1))];
    if (!(hi > 0.0)) continue;
    const double lo = hi / 10.0;
    std::vector<double> lx, ly;
    for (int i = 0; i < 12; ++i) {
      const double x = lo * std::pow(10.0, i / 11.0);
      const double s = survival(x);
      if (s <= 0.0) break;
      lx.push_back(std::log(x));
      ly.push_back(std::log(s));
    }
    if (lx.size() < 6) continue;
    const auto fit = numeric::linear_fit(lx, ly);
    if (fit.r2 > best_r2) {
      best_r2 = fit.r2;
      best.p_hat = -fit.slope;
      best.r2 = fit.r2;
      best.tail_points = static_cast<std::size_t>(
          static_cast<double>(a.size()) * survival(lo));
      best.window_lo = lo;
      best.window_hi = hi;
    }
  }
  if (best_r2 < 0.0) {
    best.unreliable = true;
    return best;
  }
  if (best.tail_points < 50) best.unreliable = true;
  if (best.r2 < 0.98) best.poor_fit = true;
  if (best.p_hat > 3.0) best.steep = true;
  return best;
}

// ---------------------------------------------------------------------------
// Almost-sure CLT.

/// Log-averaged empirical measure: atoms S_k f / B_k for k = 1..n with
/// weights (1/k)/H_n, H_n the harmonic sum, so the measure has exact mass 1
/// at every n (the 1/log n normalization is only asymptotically a
/// probability).
struct LogAvgMeasure {
  EmpiricalDistribution distribution;
  double harmonic_sum = 0.0;
  std::size_t n = 0;
};

inline LogAvgMeasure asclt_measure(const Observable& f, const dynsys::Orbit& orbit,
                                   std::size_t n, const RenormSequence& seq) {
  if (n < 1) throw std::invalid_argument("asclt_measure: n must be >= 1");
  if (orbit.points.size() < n) throw std::invalid_argument("asclt_measure: orbit too short");
  std::vector<double> atoms(n), weights(n);
  numeric::KahanSum sum;  // prefix S_k, O(n) total work
  numeric::KahanSum h;
  for (std::size_t k = 1; k <= n; ++k) {
    sum.add(f.eval(orbit.points[k - 1]));
    atoms[k - 1] = sum.value() / renorm_value(seq, k);
    const double w = 1.0 / static_cast<double>(k);
    weights[k - 1] = w;
    h.add(w);
  }
  LogAvgMeasure out;
  out.harmonic_sum = h.value();
  out.n = n;
  out.distribution = EmpiricalDistribution::from_weighted(std::move(atoms), std::move(weights));
  return out;
}

}  // namespace ergolab::limitlaw
