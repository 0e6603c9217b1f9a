#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ergolab/numeric.hpp"
#include "ergolab/observables.hpp"
#include "ergolab/systems.hpp"

// Large and moderate deviation statistics: deviation probabilities,
// decay-regime fitting, cumulant generating function, Legendre transform
// and the Erdos-Renyi maximal window statistic.

namespace ergolab::deviation {

using dynsys::EnsembleSpec;
using dynsys::SystemDescriptor;
using observables::Observable;

// ---------------------------------------------------------------------------
// Deviation probabilities.

struct Fraction {
  double value = 0.0;      // raw exceedance fraction
  double std_error = 0.0;  // binomial
  std::size_t m = 0;       // orbits used
  bool censored = false;   // no exceedances observed
  double log_bound = 0.0;  // max(value, 1/m): usable in log-scale fits
};

/// Fraction of orbits with |S_n f / n| > eps, with binomial standard error.
inline Fraction deviation_prob(const Observable& f, const SystemDescriptor& system,
                               const EnsembleSpec& spec, double eps, unsigned threads = 1) {
  if (!f.mean_zero) throw std::invalid_argument("deviation_prob: observable must be centered");
  if (!(eps > 0.0)) throw std::invalid_argument("deviation_prob: eps must be positive");
  std::vector<double> hits(spec.m, 0.0);
  std::vector<double> used(spec.m, 0.0);
  dynsys::for_each_orbit(system, spec, threads, [&](std::size_t i, const dynsys::Orbit& o) {
    if (o.escaped || o.points.empty()) return;
    used[i] = 1.0;
    const double avg = observables::ergodic_sum(f, o) / static_cast<double>(o.points.size());
    hits[i] = std::abs(avg) > eps ? 1.0 : 0.0;
  });
  const double m = numeric::sum(used);
  if (m == 0.0) throw std::runtime_error("deviation_prob: no usable orbits");
  Fraction out;
  out.m = static_cast<std::size_t>(m);
  const double k = numeric::sum(hits);
  out.value = k / m;
  out.std_error = std::sqrt(out.value * (1.0 - out.value) / m);
  out.censored = k == 0.0;
  out.log_bound = std::max(out.value, 1.0 / m);
  return out;
}

// ---------------------------------------------------------------------------
// Decay-regime classification.

enum class DecayRegime { exponential, polynomial, ambiguous, undetectable };

inline const char* to_string(DecayRegime r) {
  switch (r) {
    case DecayRegime::exponential: return "exponential";
    case DecayRegime::polynomial: return "polynomial";
    case DecayRegime::ambiguous: return "ambiguous";
    case DecayRegime::undetectable: return "undetectable";
  }
  return "?";
}

struct DecayFit {
  DecayRegime regime = DecayRegime::undetectable;
  double slope = 0.0;  // d log P / d n (exponential) or d log P / d log n (polynomial)
  double r2_exponential = 0.0;
  double r2_polynomial = 0.0;
};

/// Compares linear fits of log P against n (exponential decay) and against
/// log n (polynomial decay). Regimes within a 0.05 fit-quality margin are
/// reported as ambiguous; the slope reported is the better regime's.
inline DecayFit decay_fit(std::span<const std::pair<std::size_t, double>> probs) {
  std::vector<double> n, logn, logp;
  for (const auto& [nn, p] : probs) {
    if (p <= 0.0) continue;
    n.push_back(static_cast<double>(nn));
    logn.push_back(std::log(static_cast<double>(nn)));
    logp.push_back(std::log(p));
  }
  DecayFit out;
  if (n.size() < 4) {
    out.regime = DecayRegime::undetectable;
    return out;
  }
  const auto fit_exp = numeric::linear_fit(n, logp);
  const auto fit_poly = numeric::linear_fit(logn, logp);
  out.r2_exponential = fit_exp.r2;
  out.r2_polynomial = fit_poly.r2;
  if (std::abs(fit_exp.r2 - fit_poly.r2) < 0.05) {
    out.regime = DecayRegime::ambiguous;
    out.slope = fit_exp.r2 >= fit_poly.r2 ? fit_exp.slope : fit_poly.slope;
  } else if (fit_exp.r2 > fit_poly.r2) {
    out.regime = DecayRegime::exponential;
    out.slope = fit_exp.slope;
  } else {
    out.regime = DecayRegime::polynomial;
    out.slope = fit_poly.slope;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cumulant generating function and its Legendre transform.

/// Overflow guard: |z| n sup|f| must stay below this bound.
inline constexpr double kCgfExponentGuard = 500.0;

struct CgfEstimate {
  std::vector<double> z_grid;
  std::vector<double> psi;        // Psi_hat(z), exactly 0 at z = 0
  std::vector<double> std_error;  // delta-method standard errors
  std::vector<double> ess;        // effective sample size per z
  double convexity_violation = 0.0;  // worst midpoint-convexity defect on the grid
  std::size_t n_used = 0;
  std::size_t m_used = 0;
  bool ess_collapse = false;  // some grid point is dominated by few orbits
};

/// Psi_hat(z) = (1/n) log mean_i exp(z S_n f(x_i)) over independent orbits,
/// by max-shifted log-sum-exp.
inline CgfEstimate cgf_estimate(const Observable& f, const SystemDescriptor& system,
                                const EnsembleSpec& spec, std::vector<double> z_grid,
                                unsigned threads = 1) {
  const double sup = f.sup_abs(dynsys::x_range(system));
  double z_max = 0.0;
  for (double z : z_grid) z_max = std::max(z_max, std::abs(z));
  if (z_max * static_cast<double>(spec.n) * sup > kCgfExponentGuard) {
    throw std::domain_error("cgf_estimate: |z| n sup|f| exceeds the overflow guard");
  }
  std::vector<double> sums(spec.m, std::numeric_limits<double>::quiet_NaN());
  dynsys::for_each_orbit(system, spec, threads, [&](std::size_t i, const dynsys::Orbit& o) {
    if (o.escaped || o.points.size() < spec.n) return;
    sums[i] = observables::ergodic_sum(f, o);
  });
  std::vector<double> usable;
  usable.reserve(sums.size());
  for (double s : sums) {
    if (std::isfinite(s)) usable.push_back(s);
  }
  if (usable.empty()) throw std::runtime_error("cgf_estimate: no usable orbits");

  CgfEstimate est;
  est.z_grid = std::move(z_grid);
  est.n_used = spec.n;
  est.m_used = usable.size();
  est.psi.resize(est.z_grid.size());
  est.std_error.resize(est.z_grid.size());
  est.ess.resize(est.z_grid.size());
  const double n = static_cast<double>(spec.n);
  const double m = static_cast<double>(usable.size());
  std::vector<double> scaled(usable.size());
  for (std::size_t zi = 0; zi < est.z_grid.size(); ++zi) {
    const double z = est.z_grid[zi];
    if (z == 0.0) {
      est.psi[zi] = 0.0;
      est.std_error[zi] = 0.0;
      est.ess[zi] = m;
      continue;
    }
    for (std::size_t i = 0; i < usable.size(); ++i) scaled[i] = z * usable[i];
    est.psi[zi] = numeric::log_mean_exp(scaled) / n;
    est.ess[zi] = numeric::exp_weight_ess(scaled);
    // delta method: sd(log mean w) ~ sd(w) / (mean w sqrt(m)); computed on
    // the shifted weights for stability.
    const double shift = *std::max_element(scaled.begin(), scaled.end());
    double sw = 0.0, sw2 = 0.0;
    for (double v : scaled) {
      const double w = std::exp(v - shift);
      sw += w;
      sw2 += w * w;
    }
    const double mean_w = sw / m;
    const double var_w = std::max(0.0, sw2 / m - mean_w * mean_w);
    est.std_error[zi] = std::sqrt(var_w / m) / (mean_w * n);
    if (est.ess[zi] < std::min(30.0, 0.01 * m)) est.ess_collapse = true;
  }
  for (std::size_t zi = 1; zi + 1 < est.z_grid.size(); ++zi) {
    const double mid = 0.5 * (est.psi[zi - 1] + est.psi[zi + 1]);
    est.convexity_violation = std::max(est.convexity_violation, est.psi[zi] - mid);
  }
  return est;
}

inline std::vector<double> symmetric_grid(double z_max, std::size_t count) {
  if (count < 3 || count % 2 == 0) {
    throw std::invalid_argument("symmetric_grid: need an odd count >= 3");
  }
  std::vector<double> g(count);
  const auto half = static_cast<std::ptrdiff_t>(count / 2);
  for (std::ptrdiff_t i = -half; i <= half; ++i) {
    g[static_cast<std::size_t>(i + half)] =
        z_max * static_cast<double>(i) / static_cast<double>(half);
  }
  g[static_cast<std::size_t>(half)] = 0.0;
  return g;
}

struct LegendreValue {
  double value = 0.0;
  double z_star = 0.0;
  bool boundary = false;  // supremum attained at the grid edge: extrapolation unsafe
};

/// Grid-based Legendre transform: max over the grid of (t z - Psi(z)).
inline LegendreValue legendre(const CgfEstimate& cgf, double t) {
  if (cgf.z_grid.empty()) throw std::invalid_argument("legendre: empty grid");
  LegendreValue out;
  double best = -std::numeric_limits<double>::infinity();
  std::size_t best_i = 0;
  for (std::size_t i = 0; i < cgf.z_grid.size(); ++i) {
    const double v = t * cgf.z_grid[i] - cgf.psi[i];
    if (v > best) {
      best = v;
      best_i = i;
    }
  }
  out.value = std::max(0.0, best);  // rate functions are nonnegative
  out.z_star = cgf.z_grid[best_i];
  out.boundary = best_i == 0 || best_i + 1 == cgf.z_grid.size();
  return out;
}

enum class RateSource { legendre_of_cgf, erdos_renyi, analytic_oracle };

struct RateFunctionEstimate {
  std::vector<double> t_grid;
  std::vector<double> values;    // I(t) >= 0, I(0) = 0
  std::vector<bool> boundary;    // per t
  RateSource source = RateSource::legendre_of_cgf;
};

inline RateFunctionEstimate rate_from_cgf(const CgfEstimate& cgf, std::span<const double> t_grid) {
  RateFunctionEstimate r;
  r.t_grid.assign(t_grid.begin(), t_grid.end());
  r.source = RateSource::legendre_of_cgf;
  for (double t : t_grid) {
    const auto lv = legendre(cgf, t);
    r.values.push_back(lv.value);
    r.boundary.push_back(lv.boundary);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Erdos-Renyi maximal window statistic.

/// M_k = max over j in [0, len-k] of the window sum f_j + ... + f_{j+k-1},
/// via a prefix-sum recurrence (O(len) total work).
inline double erdos_renyi_stat(std::span<const double> f_values, std::size_t k) {
  if (k < 1 || k > f_values.size()) {
    throw std::invalid_argument("erdos_renyi_stat: need 1 <= k <= length");
  }
  std::vector<double> prefix(f_values.size() + 1, 0.0);
  numeric::KahanSum acc;
  for (std::size_t i = 0; i < f_values.size(); ++i) {
    acc.add(f_values[i]);
    prefix[i + 1] = acc.value();
  }
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j + k <= f_values.size(); ++j) {
    best = std::max(best, prefix[j + k] - prefix[j]);
  }
  return best;
}

struct ErdosRenyiPoint {
  std::size_t k = 0;
  std::size_t window_count = 0;  // floor(exp(k I)) - k + 1
  double m_k = 0.0;
  double ratio = 0.0;  // M_k / k
  bool truncated = false;
};

/// Window budget: N_k = floor(exp(k I)) is capped to keep runtime bounded.
inline constexpr std::size_t kErdosRenyiBudget = 10'000'000;

/// M_k / k per k for orbit windows of count floor(exp(k I_t)); expected to
/// approach t as k grows.
inline std::vector<ErdosRenyiPoint> erdos_renyi_rate(const Observable& f,
                                                     const SystemDescriptor& system,
                                                     double I_t, std::span<const std::size_t> k_list,
                                                     std::uint64_t seed,
                                                     std::size_t budget = kErdosRenyiBudget,
                                                     std::size_t burn_in = 1000) {
  if (!(I_t > 0.0)) throw std::invalid_argument("erdos_renyi_rate: need I_t > 0");
  std::vector<ErdosRenyiPoint> out;
  for (std::size_t idx = 0; idx < k_list.size(); ++idx) {
    const std::size_t k = k_list[idx];
    ErdosRenyiPoint pt;
    pt.k = k;
    const double raw = std::exp(static_cast<double>(k) * I_t);
    std::size_t N = raw > static_cast<double>(budget) ? budget : static_cast<std::size_t>(raw);
    if (raw > static_cast<double>(budget)) pt.truncated = true;
    if (N < k) N = k;
    EnsembleSpec spec;
    spec.m = 1;
    spec.n = N;
    spec.burn_in = burn_in;
    spec.seed = prng::substream_seed(seed, idx);
    const auto orbit = dynsys::make_orbit(system, spec, 0);
    std::vector<double> fv(orbit.points.size());
    for (std::size_t i = 0; i < orbit.points.size(); ++i) fv[i] = f.eval(orbit.points[i]);
    pt.m_k = erdos_renyi_stat(fv, k);
    pt.window_count = fv.size() - k + 1;
    pt.ratio = pt.m_k / static_cast<double>(k);
    out.push_back(pt);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Moderate deviations.

struct ModeratePoint {
  std::size_t n = 0;
  double fraction = 0.0;
  double value = 0.0;  // -(n / a_n^2) log P
  bool censored = false;
};

struct ModerateResult {
  std::vector<ModeratePoint> points;
  double limit = 0.0;  // inf over [a,b] of t^2 / (2 sigma^2)
  bool degenerate = false;
};

/// Per-n estimate of -(n/a_n^2) log P(S_n f / a_n in [a,b]) with a_n = n^theta,
/// against the quadratic rate inf t^2 / (2 sigma_f^2).
inline ModerateResult moderate_probe(const Observable& f, const SystemDescriptor& system,
                                     double theta, std::span<const std::size_t> n_list,
                                     std::size_t m, double a, double b, double sigma2,
                                     std::uint64_t seed, std::size_t burn_in = 1000,
                                     unsigned threads = 1) {
  if (!(theta > 0.5 && theta < 1.0)) {
    throw std::invalid_argument("moderate_probe: theta must be in (1/2, 1)");
  }
  if (!(a < b) || (a <= 0.0 && b >= 0.0)) {
    throw std::invalid_argument("moderate_probe: interval [a,b] must exclude 0");
  }
  ModerateResult out;
  if (!(sigma2 > 0.0)) {
    out.degenerate = true;
    return out;
  }
  const double t_min = std::min(std::abs(a), std::abs(b));
  out.limit = t_min * t_min / (2.0 * sigma2);
  for (std::size_t idx = 0; idx < n_list.size(); ++idx) {
    const std::size_t n = n_list[idx];
    const double a_n = std::pow(static_cast<double>(n), theta);
    EnsembleSpec spec;
    spec.m = m;
    spec.n = n;
    spec.burn_in = burn_in;
    spec.seed = prng::substream_seed(seed, idx);
    auto hits = dynsys::per_orbit_values(system, spec, threads, [&](const dynsys::Orbit& o) {
      const double v = observables::ergodic_sum(f, o) / a_n;
      return (v >= a && v <= b) ? 1.0 : 0.0;
    });
    ModeratePoint pt;
    pt.n = n;
    const double k = numeric::sum(hits);
    const double mm = static_cast<double>(hits.size());
    pt.fraction = k / mm;
    if (k == 0.0) {
      pt.censored = true;
      pt.fraction = 1.0 / mm;
    }
    pt.value = -(static_cast<double>(n) / (a_n * a_n)) * std::log(pt.fraction);
    out.points.push_back(pt);
  }
  return out;
}

}  // namespace ergolab::deviation
