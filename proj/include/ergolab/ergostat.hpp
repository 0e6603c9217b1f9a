#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "ergolab/numeric.hpp"
#include "ergolab/observables.hpp"
#include "ergolab/systems.hpp"

// Ergodic averages, covariance series, Green-Kubo variance, empirical
// measures and the 1-D distances used throughout.

namespace ergolab::ergostat {

using dynsys::Orbit;
using dynsys::OrbitEnsemble;
using observables::Observable;

// ---------------------------------------------------------------------------
// Empirical distributions.

/// Weighted empirical distribution with sorted atoms.
struct EmpiricalDistribution {
  std::vector<double> atoms;    // nondecreasing
  std::vector<double> weights;  // positive, sum to 1 (within 1e-12)

  static EmpiricalDistribution from_samples(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("EmpiricalDistribution: no samples");
    std::sort(values.begin(), values.end());
    EmpiricalDistribution d;
    const double w = 1.0 / static_cast<double>(values.size());
    d.weights.assign(values.size(), w);
    d.atoms = std::move(values);
    return d;
  }

  static EmpiricalDistribution from_weighted(std::vector<double> values,
                                             std::vector<double> weights) {
    if (values.empty() || values.size() != weights.size()) {
      throw std::invalid_argument("EmpiricalDistribution: bad weighted input");
    }
    std::vector<std::size_t> idx(values.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    EmpiricalDistribution d;
    d.atoms.reserve(values.size());
    d.weights.reserve(values.size());
    double total = 0.0;
    for (std::size_t i : idx) {
      if (!(weights[i] > 0.0)) throw std::invalid_argument("EmpiricalDistribution: nonpositive weight");
      d.atoms.push_back(values[i]);
      d.weights.push_back(weights[i]);
      total += weights[i];
    }
    for (double& w : d.weights) w /= total;
    return d;
  }

  double mean() const {
    numeric::KahanSum s;
    for (std::size_t i = 0; i < atoms.size(); ++i) s.add(atoms[i] * weights[i]);
    return s.value();
  }
};

/// Empirical measure (1/n) sum of point masses over the orbit's first
/// coordinate.
inline EmpiricalDistribution empirical_measure(const Orbit& orbit) {
  std::vector<double> v;
  v.reserve(orbit.points.size());
  for (const auto& p : orbit.points) v.push_back(p.x);
  return EmpiricalDistribution::from_samples(std::move(v));
}

inline EmpiricalDistribution empirical_measure(std::span<const double> samples) {
  return EmpiricalDistribution::from_samples(std::vector<double>(samples.begin(), samples.end()));
}

// ---------------------------------------------------------------------------
// Birkhoff averages.

inline double birkhoff_average(const Observable& f, const Orbit& orbit) {
  return observables::ergodic_sum(f, orbit) / static_cast<double>(orbit.points.size());
}

// ---------------------------------------------------------------------------
// Autocovariance and the Green-Kubo variance.

struct CovarianceEstimate {
  double value = 0.0;
  double std_error = 0.0;  // cross-orbit standard error (NaN for m = 1)
};

/// Lag-covariance series with per-lag standard errors.
struct CovarianceSeries {
  std::vector<double> values;      // C(0..L)
  std::vector<double> std_errors;  // per lag
  std::size_t n_used = 0;          // per-orbit window count
  std::size_t m_used = 0;          // orbits used
};

inline std::vector<double> observable_values(const Observable& f, const Orbit& orbit) {
  std::vector<double> v;
  v.reserve(orbit.points.size());
  for (const auto& p : orbit.points) v.push_back(f.eval(p));
  return v;
}

/// Per-orbit correlation estimator (1/n) sum_{j<n} f_j f_{j+k} with n
/// window terms; needs f_values of length >= n + k.
inline double correlation_estimator(std::span<const double> f_values, std::size_t n,
                                    std::size_t k) {
  if (f_values.size() < n + k) {
    throw std::invalid_argument("correlation_estimator: too few values");
  }
  numeric::KahanSum s;
  for (std::size_t j = 0; j < n; ++j) s.add(f_values[j] * f_values[j + k]);
  return s.value() / static_cast<double>(n);
}

/// Ensemble mean of the per-orbit estimator of C_f(k), with cross-orbit
/// standard error. Requires a centered observable and orbits of length
/// >= n + k (n = orbit length - k window terms).
inline CovarianceEstimate autocovariance(const Observable& f, const OrbitEnsemble& ensemble,
                                         std::size_t k) {
  if (!f.mean_zero) throw std::invalid_argument("autocovariance: observable must be centered");
  std::vector<double> per_orbit;
  per_orbit.reserve(ensemble.orbits.size());
  for (const auto& orbit : ensemble.orbits) {
    if (orbit.escaped) continue;
    if (orbit.points.size() <= k) {
      throw std::invalid_argument("autocovariance: orbit shorter than lag");
    }
    const auto fv = observable_values(f, orbit);
    per_orbit.push_back(correlation_estimator(fv, fv.size() - k, k));
  }
  if (per_orbit.empty()) throw std::invalid_argument("autocovariance: no usable orbits");
  CovarianceEstimate est;
  est.value = numeric::mean(per_orbit);
  est.std_error = numeric::std_error_of_mean(per_orbit);
  return est;
}

/// Batches the autocovariance over lags 0..L with a common window count
/// n = orbit length - L, so all lags use the same number of terms.
inline CovarianceSeries covariance_series(const Observable& f, const OrbitEnsemble& ensemble,
                                          std::size_t L) {
  if (!f.mean_zero) throw std::invalid_argument("covariance_series: observable must be centered");
  CovarianceSeries series;
  series.values.assign(L + 1, 0.0);
  series.std_errors.assign(L + 1, 0.0);
  std::vector<std::vector<double>> per_lag(L + 1);
  for (const auto& orbit : ensemble.orbits) {
    if (orbit.escaped) continue;
    if (orbit.points.size() <= L) {
      throw std::invalid_argument("covariance_series: orbit shorter than max lag");
    }
    const auto fv = observable_values(f, orbit);
    const std::size_t n = fv.size() - L;
    for (std::size_t k = 0; k <= L; ++k) {
      per_lag[k].push_back(correlation_estimator(fv, n, k));
    }
    series.n_used = n;
  }
  if (per_lag[0].empty()) throw std::invalid_argument("covariance_series: no usable orbits");
  series.m_used = per_lag[0].size();
  for (std::size_t k = 0; k <= L; ++k) {
    series.values[k] = numeric::mean(per_lag[k]);
    series.std_errors[k] = numeric::std_error_of_mean(per_lag[k]);
  }
  return series;
}

struct GreenKuboResult {
  double sigma2 = 0.0;
  std::size_t cutoff_lag = 0;  // last lag included in the sum
  bool degenerate = false;     // sigma2 clamped at 0
};

/// sigma_f^2 = C(0) + 2 sum_{l=1}^{L*} C(l). The cutoff L* stops before the
/// first run of 3 consecutive lags with |C(l)| < 2 * std_error(l), capped
/// at the series length.
inline GreenKuboResult green_kubo(const CovarianceSeries& series) {
  if (series.values.empty()) throw std::invalid_argument("green_kubo: empty series");
  const std::size_t L = series.values.size() - 1;
  std::size_t cutoff = L;
  for (std::size_t l = 1; l + 2 <= L; ++l) {
    bool noise_run = true;
    for (std::size_t j = l; j < l + 3; ++j) {
      const double se = series.std_errors[j];
      if (!(std::isfinite(se)) || se <= 0.0 || std::abs(series.values[j]) >= 2.0 * se) {
        noise_run = false;
        break;
      }
    }
    if (noise_run) {
      cutoff = l - 1;
      break;
    }
  }
  numeric::KahanSum s;
  s.add(series.values[0]);
  for (std::size_t l = 1; l <= cutoff; ++l) s.add(2.0 * series.values[l]);
  GreenKuboResult r;
  r.sigma2 = s.value();
  r.cutoff_lag = cutoff;
  if (r.sigma2 <= 0.0) {
    r.sigma2 = 0.0;
    r.degenerate = true;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Distances between distributions.

struct GaussianLaw {
  double sigma2 = 1.0;
};
struct Uniform01 {};
struct DiracLaw {
  double a = 0.0;
};

/// Phi(t / sigma); Heaviside step for sigma^2 = 0.
inline double gaussian_cdf(double t, double sigma2) {
  if (sigma2 < 0.0) throw std::invalid_argument("gaussian_cdf: negative variance");
  if (sigma2 == 0.0) return t >= 0.0 ? 1.0 : 0.0;
  return 0.5 * std::erfc(-t / std::sqrt(2.0 * sigma2));
}

namespace detail {

inline double gaussian_pdf(double t, double sigma2) {
  const double sigma = std::sqrt(sigma2);
  return std::exp(-t * t / (2.0 * sigma2)) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

/// Antiderivative of the N(0,sigma2) CDF: integral of Phi over (-inf, t].
inline double gaussian_cdf_integral(double t, double sigma2) {
  return t * gaussian_cdf(t, sigma2) + sigma2 * gaussian_pdf(t, sigma2);
}

/// Integral of (1 - Phi) over [t, inf) = E[(Z - t)^+].
inline double gaussian_upper_tail_integral(double t, double sigma2) {
  return sigma2 * gaussian_pdf(t, sigma2) - t * (1.0 - gaussian_cdf(t, sigma2));
}

}  // namespace detail

/// 1-D Kantorovich (Wasserstein-1) distance: the integral of |F1 - F2|,
/// the dual of the sup over 1-Lipschitz observables. Exact piecewise sweep.
inline double kantorovich_1d(const EmpiricalDistribution& d1, const EmpiricalDistribution& d2) {
  numeric::KahanSum total;
  std::size_t i = 0, j = 0;
  double f1 = 0.0, f2 = 0.0;
  double prev = std::min(d1.atoms.front(), d2.atoms.front());
  while (i < d1.atoms.size() || j < d2.atoms.size()) {
    double next;
    if (j >= d2.atoms.size() || (i < d1.atoms.size() && d1.atoms[i] <= d2.atoms[j])) {
      next = d1.atoms[i];
    } else {
      next = d2.atoms[j];
    }
    total.add(std::abs(f1 - f2) * (next - prev));
    while (i < d1.atoms.size() && d1.atoms[i] == next) f1 += d1.weights[i++];
    while (j < d2.atoms.size() && d2.atoms[j] == next) f2 += d2.weights[j++];
    prev = next;
  }
  return total.value();
}

/// W1 between an empirical distribution and N(0, sigma2), via the exact
/// piecewise closed form of the CDF integral. sigma2 = 0 degenerates to a
/// point mass at zero.
inline double kantorovich_1d(const EmpiricalDistribution& d, GaussianLaw g) {
  if (g.sigma2 < 0.0) throw std::invalid_argument("kantorovich_1d: negative variance");
  if (g.sigma2 == 0.0) {
    numeric::KahanSum s;
    for (std::size_t i = 0; i < d.atoms.size(); ++i) s.add(d.weights[i] * std::abs(d.atoms[i]));
    return s.value();
  }
  // Integral of |F_n - Phi| over each piece where F_n is constant at level c.
  // On such a piece, |c - Phi(t)| integrates in closed form around the
  // crossing t* = Phi^{-1}(c).
  const double sigma = std::sqrt(g.sigma2);
  const auto segment = [&](double lo, double hi, double c) {
    // integral over [lo, hi] of |c - Phi(t)| dt
    const auto raw = [&](double a, double b) {
      // integral of (Phi - c) over [a, b]
      return detail::gaussian_cdf_integral(b, g.sigma2) -
             detail::gaussian_cdf_integral(a, g.sigma2) - c * (b - a);
    };
    if (c <= 0.0) return raw(lo, hi);
    if (c >= 1.0) return -raw(lo, hi);
    const double t_star = sigma * numeric::normal_quantile(c);
    if (t_star <= lo) return raw(lo, hi);
    if (t_star >= hi) return -raw(lo, hi);
    return -raw(lo, t_star) + raw(t_star, hi);
  };
  numeric::KahanSum total;
  // left tail: F_n = 0 up to the first atom
  total.add(detail::gaussian_cdf_integral(d.atoms.front(), g.sigma2));
  double level = 0.0;
  for (std::size_t i = 0; i + 1 < d.atoms.size(); ++i) {
    level += d.weights[i];
    if (d.atoms[i + 1] > d.atoms[i]) total.add(segment(d.atoms[i], d.atoms[i + 1], level));
  }
  // right tail: F_n = 1 beyond the last atom
  total.add(detail::gaussian_upper_tail_integral(d.atoms.back(), g.sigma2));
  return total.value();
}

/// W1 between an empirical distribution and the uniform law on [0,1]
/// (exact piecewise-quadratic integral).
inline double kantorovich_1d(const EmpiricalDistribution& d, Uniform01) {
  // integral over [lo,hi] of |c - t| with F(t) = t on [0,1], constants
  // outside.
  const auto segment = [](double lo, double hi, double c) {
    const auto band = [&](double a, double b) {
      // integral of |c - t| over [a,b] within [0,1]
      if (a >= b) return 0.0;
      if (c <= a) return 0.5 * (b - a) * ((a - c) + (b - c));
      if (c >= b) return 0.5 * (b - a) * ((c - a) + (c - b));
      return 0.5 * ((c - a) * (c - a) + (b - c) * (b - c));
    };
    numeric::KahanSum s;
    // below 0: F = 0
    if (lo < 0.0) s.add(std::abs(c) * (std::min(hi, 0.0) - lo));
    // inside [0,1]
    s.add(band(std::clamp(lo, 0.0, 1.0), std::clamp(hi, 0.0, 1.0)));
    // above 1: F = 1
    if (hi > 1.0) s.add(std::abs(c - 1.0) * (hi - std::max(lo, 1.0)));
    return s.value();
  };
  numeric::KahanSum total;
  total.add(segment(std::min(0.0, d.atoms.front()), d.atoms.front(), 0.0));
  double level = 0.0;
  for (std::size_t i = 0; i + 1 < d.atoms.size(); ++i) {
    level += d.weights[i];
    if (d.atoms[i + 1] > d.atoms[i]) total.add(segment(d.atoms[i], d.atoms[i + 1], level));
  }
  total.add(segment(d.atoms.back(), std::max(1.0, d.atoms.back()), 1.0));
  return total.value();
}

inline double kantorovich_1d(const EmpiricalDistribution& d, DiracLaw m) {
  numeric::KahanSum s;
  for (std::size_t i = 0; i < d.atoms.size(); ++i) s.add(d.weights[i] * std::abs(d.atoms[i] - m.a));
  return s.value();
}

inline double kantorovich_1d(Uniform01, DiracLaw m) {
  const double a = std::clamp(m.a, 0.0, 1.0);
  double v = 0.5 * (a * a + (1.0 - a) * (1.0 - a));
  if (m.a < 0.0) v += -m.a;
  if (m.a > 1.0) v += m.a - 1.0;
  return v;
}

/// sup_t |F_n(t) - F(t)|, evaluated at atoms and their left limits.
inline double ks_distance(const EmpiricalDistribution& d,
                          const std::function<double(double)>& cdf) {
  double sup = 0.0;
  double level = 0.0;
  for (std::size_t i = 0; i < d.atoms.size(); ++i) {
    const double F = cdf(d.atoms[i]);
    sup = std::max(sup, std::abs(level - F));  // left limit
    level += d.weights[i];
    while (i + 1 < d.atoms.size() && d.atoms[i + 1] == d.atoms[i]) {
      level += d.weights[++i];
    }
    sup = std::max(sup, std::abs(level - F));
  }
  return sup;
}

inline double ks_distance(const EmpiricalDistribution& d, GaussianLaw g) {
  return ks_distance(d, [g](double t) { return gaussian_cdf(t, g.sigma2); });
}

inline double ks_distance(const EmpiricalDistribution& d, Uniform01) {
  return ks_distance(d, [](double t) { return std::clamp(t, 0.0, 1.0); });
}

// ---------------------------------------------------------------------------
// Invariant-density histogram.

struct DensityHistogram {
  std::vector<double> edges;    // size bins + 1
  std::vector<double> density;  // normalized: sum density * width = 1
  std::vector<std::size_t> counts;
  double out_of_range_fraction = 0.0;
  bool empty_edge_bins = false;  // flagged, not failed
};

/// Normalized histogram density of the ensemble's first coordinate over the
/// given edges (ascending).
inline DensityHistogram invariant_density_histogram(const OrbitEnsemble& ensemble,
                                                    std::vector<double> edges) {
  if (ensemble.system.dimension != 1) {
    throw std::invalid_argument("invariant_density_histogram: 1-D systems only");
  }
  if (edges.size() < 2 || !std::is_sorted(edges.begin(), edges.end())) {
    throw std::invalid_argument("invariant_density_histogram: need ascending edges");
  }
  DensityHistogram h;
  h.edges = std::move(edges);
  h.counts.assign(h.edges.size() - 1, 0);
  std::size_t total = 0, in_range = 0;
  for (const auto& orbit : ensemble.orbits) {
    for (const auto& p : orbit.points) {
      ++total;
      const auto it = std::upper_bound(h.edges.begin(), h.edges.end(), p.x);
      if (it == h.edges.begin() || it == h.edges.end()) continue;
      ++h.counts[static_cast<std::size_t>(it - h.edges.begin()) - 1];
      ++in_range;
    }
  }
  if (in_range == 0) throw std::invalid_argument("invariant_density_histogram: no points in range");
  h.out_of_range_fraction = 1.0 - static_cast<double>(in_range) / static_cast<double>(total);
  h.density.resize(h.counts.size());
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    const double width = h.edges[b + 1] - h.edges[b];
    h.density[b] = static_cast<double>(h.counts[b]) / (static_cast<double>(in_range) * width);
  }
  if (h.counts.front() == 0 || h.counts.back() == 0) h.empty_edge_bins = true;
  return h;
}

inline std::vector<double> linspace_edges(double lo, double hi, std::size_t bins) {
  std::vector<double> e(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) {
    e[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
  }
  return e;
}

inline std::vector<double> geomspace_edges(double lo, double hi, std::size_t bins) {
  if (!(lo > 0.0 && hi > lo)) throw std::invalid_argument("geomspace_edges: need 0 < lo < hi");
  std::vector<double> e(bins + 1);
  const double r = std::log(hi / lo);
  for (std::size_t i = 0; i <= bins; ++i) {
    e[i] = lo * std::exp(r * static_cast<double>(i) / static_cast<double>(bins));
  }
  return e;
}

/// log-log slope of the histogram density against the bin midpoint, for
/// the h(x) ~ x^{-alpha} diagnostic near the neutral fixed point.
inline numeric::LinearFit density_loglog_slope(const DensityHistogram& h) {
  std::vector<double> lx, ly;
  for (std::size_t b = 0; b < h.density.size(); ++b) {
    if (h.density[b] <= 0.0) continue;
    const double mid = std::sqrt(h.edges[b] * h.edges[b + 1]);
    lx.push_back(std::log(mid));
    ly.push_back(std::log(h.density[b]));
  }
  return numeric::linear_fit(lx, ly);
}

// ---------------------------------------------------------------------------
// Nonconventional (multiple) ergodic averages.

/// (1/n) sum_{k=0}^{n-1} prod_j f_j(T^{jk} x), j = 1..l. Needs orbit length
/// >= l(n-1) + 1.
inline double nonconventional_average(std::span<const Observable> f_list, const Orbit& orbit,
                                      std::size_t n) {
  const std::size_t l = f_list.size();
  if (l == 0) throw std::invalid_argument("nonconventional_average: no observables");
  if (n < 1) throw std::invalid_argument("nonconventional_average: n must be >= 1");
  if (orbit.points.size() < l * (n - 1) + 1) {
    throw std::invalid_argument("nonconventional_average: orbit too short");
  }
  numeric::KahanSum s;
  for (std::size_t k = 0; k < n; ++k) {
    double prod = 1.0;
    for (std::size_t j = 1; j <= l; ++j) prod *= f_list[j - 1].eval(orbit.points[j * k]);
    s.add(prod);
  }
  return s.value() / static_cast<double>(n);
}

}  // namespace ergolab::ergostat
