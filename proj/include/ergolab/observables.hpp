#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ergolab/numeric.hpp"
#include "ergolab/systems.hpp"

// Instantaneous observables f and n-variable separately Lipschitz
// functionals K, with the Lipschitz bookkeeping the concentration bounds
// need.
//
// Lipschitz constants of observables are taken with respect to the plain
// coordinate distance |u - v| on the system's interval representation.
// (The tracing metric of dynsys is used only where orbit points are
// compared with orbit points.)

namespace ergolab::observables {

using dynsys::Point;

enum class ObsKind {
  coordinate,
  centered_coordinate,
  affine,
  sign_threshold,
  constant,
  tabulated,
};

inline const char* to_string(ObsKind k) {
  switch (k) {
    case ObsKind::coordinate: return "coordinate";
    case ObsKind::centered_coordinate: return "centered_coordinate";
    case ObsKind::affine: return "affine";
    case ObsKind::sign_threshold: return "sign_threshold";
    case ObsKind::constant: return "constant";
    case ObsKind::tabulated: return "tabulated";
  }
  return "?";
}

struct Observable {
  ObsKind kind = ObsKind::coordinate;
  double c0 = 0.0;      // affine offset / constant value
  double c1 = 1.0;      // affine slope
  double theta = 0.0;   // sign threshold
  double center = 0.0;  // centered_coordinate: f(x) = x - center
  // tabulated: values on a uniform grid over [grid_lo, grid_hi]
  std::vector<double> table;
  double grid_lo = 0.0, grid_hi = 1.0;
  bool interpolate = true;

  double lipschitz_constant = 1.0;  // +inf for sign_threshold
  bool mean_zero = false;           // claim; checked against usage, not proven
  double value_at_zero = 0.0;

  double eval(const Point& p) const {
    switch (kind) {
      case ObsKind::coordinate:
        return p.x;
      case ObsKind::centered_coordinate:
        return p.x - center;
      case ObsKind::affine:
        return c0 + c1 * p.x;
      case ObsKind::sign_threshold:
        return p.x >= theta ? 1.0 : -1.0;
      case ObsKind::constant:
        return c0;
      case ObsKind::tabulated: {
        if (table.size() < 2) throw std::logic_error("tabulated: need >= 2 grid values");
        const double step = (grid_hi - grid_lo) / static_cast<double>(table.size() - 1);
        const double pos = (p.x - grid_lo) / step;
        if (pos < 0.0 || pos > static_cast<double>(table.size() - 1)) {
          throw std::domain_error("tabulated: point outside grid");
        }
        const auto idx = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(idx);
        if (!interpolate) {
          if (frac != 0.0) {
            throw std::domain_error("tabulated: off-grid query without interpolation policy");
          }
          return table[idx];
        }
        if (idx + 1 >= table.size()) return table.back();
        return table[idx] * (1.0 - frac) + table[idx + 1] * frac;
      }
    }
    throw std::logic_error("eval: unknown kind");
  }

  /// Upper bound on |f| over the coordinate range [lo, hi].
  double sup_abs(dynsys::CoordRange r) const {
    switch (kind) {
      case ObsKind::coordinate:
        return std::max(std::abs(r.lo), std::abs(r.hi));
      case ObsKind::centered_coordinate:
        return std::max(std::abs(r.lo - center), std::abs(r.hi - center));
      case ObsKind::affine:
        return std::max(std::abs(c0 + c1 * r.lo), std::abs(c0 + c1 * r.hi));
      case ObsKind::sign_threshold:
        return 1.0;
      case ObsKind::constant:
        return std::abs(c0);
      case ObsKind::tabulated: {
        double s = 0.0;
        for (double v : table) s = std::max(s, std::abs(v));
        return s;
      }
    }
    throw std::logic_error("sup_abs: unknown kind");
  }
};

inline Observable coordinate() {
  Observable f;
  f.kind = ObsKind::coordinate;
  f.lipschitz_constant = 1.0;
  f.value_at_zero = 0.0;
  return f;
}

/// f(x) = x - center. mean_zero holds when `center` equals the invariant
/// mean of the coordinate.
inline Observable centered_coordinate(double center) {
  Observable f;
  f.kind = ObsKind::centered_coordinate;
  f.center = center;
  f.lipschitz_constant = 1.0;
  f.mean_zero = true;
  f.value_at_zero = -center;
  return f;
}

inline Observable affine(double c0, double c1) {
  Observable f;
  f.kind = ObsKind::affine;
  f.c0 = c0;
  f.c1 = c1;
  f.lipschitz_constant = std::abs(c1);
  f.value_at_zero = c0;
  return f;
}

/// +1 above the threshold, -1 below. Infinite Lipschitz constant: barred
/// from concentration experiments, allowed in limit-law experiments.
inline Observable sign_threshold(double theta, bool mean_zero_claim = false) {
  Observable f;
  f.kind = ObsKind::sign_threshold;
  f.theta = theta;
  f.lipschitz_constant = std::numeric_limits<double>::infinity();
  f.mean_zero = mean_zero_claim;
  f.value_at_zero = 0.0 >= theta ? 1.0 : -1.0;
  return f;
}

inline Observable constant(double c) {
  Observable f;
  f.kind = ObsKind::constant;
  f.c0 = c;
  f.lipschitz_constant = 0.0;
  f.mean_zero = c == 0.0;
  f.value_at_zero = c;
  return f;
}

inline Observable tabulated(std::vector<double> values, double lo, double hi,
                            bool interpolate = true) {
  if (values.size() < 2) throw std::invalid_argument("tabulated: need >= 2 values");
  if (!(hi > lo)) throw std::invalid_argument("tabulated: empty grid range");
  Observable f;
  f.kind = ObsKind::tabulated;
  f.table = std::move(values);
  f.grid_lo = lo;
  f.grid_hi = hi;
  f.interpolate = interpolate;
  const double step = (hi - lo) / static_cast<double>(f.table.size() - 1);
  double lip = 0.0;
  for (std::size_t i = 0; i + 1 < f.table.size(); ++i) {
    lip = std::max(lip, std::abs(f.table[i + 1] - f.table[i]) / step);
  }
  f.lipschitz_constant = lip;
  f.value_at_zero = (lo <= 0.0 && 0.0 <= hi) ? f.eval({0.0, 0.0}) : 0.0;
  return f;
}

/// Exact invariant mean of the coordinate where the SRB measure is known in
/// closed form (Lebesgue for doubling/cat, the iid laws otherwise).
inline std::optional<double> known_invariant_mean(const dynsys::SystemDescriptor& s) {
  switch (s.kind) {
    case dynsys::MapKind::doubling:
    case dynsys::MapKind::cat:
    case dynsys::MapKind::iid_uniform:
      return 0.5;
    case dynsys::MapKind::iid_rademacher:
      return 0.0;
    default:
      return std::nullopt;
  }
}

/// High-precision estimate of the invariant mean of the coordinate from a
/// dedicated calibration ensemble (total budget `steps`, split across
/// `orbits` independent orbits). Used to center observables on systems with
/// no closed-form invariant measure.
inline double calibrate_coordinate_mean(const dynsys::SystemDescriptor& s,
                                        std::uint64_t seed, std::size_t steps = 10'000'000,
                                        std::size_t orbits = 16, unsigned n_threads = 1) {
  if (auto exact = known_invariant_mean(s)) return *exact;
  dynsys::EnsembleSpec spec;
  spec.m = orbits;
  spec.n = std::max<std::size_t>(1, steps / orbits);
  spec.burn_in = 1000;
  spec.seed = seed;
  std::vector<double> sums(spec.m, 0.0);
  std::vector<double> counts(spec.m, 0.0);
  dynsys::for_each_orbit(s, spec, n_threads, [&](std::size_t i, const dynsys::Orbit& o) {
    numeric::KahanSum acc;
    for (const auto& p : o.points) acc.add(p.x);
    sums[i] = acc.value();
    counts[i] = static_cast<double>(o.points.size());
  });
  const double total = numeric::sum(sums);
  const double count = numeric::sum(counts);
  if (count == 0.0) throw std::runtime_error("calibrate_coordinate_mean: no orbit points");
  return total / count;
}

/// Centered coordinate for a given system: exact centering when the
/// invariant mean is known, otherwise a calibration-orbit estimate.
inline Observable make_centered_coordinate(const dynsys::SystemDescriptor& s,
                                           std::uint64_t seed,
                                           std::size_t calibration_steps = 10'000'000,
                                           std::size_t calibration_orbits = 16,
                                           unsigned n_threads = 1) {
  return centered_coordinate(calibrate_coordinate_mean(s, seed, calibration_steps,
                                                       calibration_orbits, n_threads));
}

/// S_n f along an orbit (compensated summation).
inline double ergodic_sum(const Observable& f, const dynsys::Orbit& orbit) {
  if (orbit.points.empty()) throw std::invalid_argument("ergodic_sum: empty orbit");
  numeric::KahanSum s;
  for (const auto& p : orbit.points) s.add(f.eval(p));
  return s.value();
}

inline double ergodic_sum(const Observable& f, std::span<const Point> window) {
  if (window.empty()) throw std::invalid_argument("ergodic_sum: empty window");
  numeric::KahanSum s;
  for (const auto& p : window) s.add(f.eval(p));
  return s.value();
}

// ---------------------------------------------------------------------------
// Separately Lipschitz functionals of n variables.

struct SeparatelyLipschitzFunctional {
  std::string name;
  std::size_t arity = 0;
  std::vector<double> lip;  // Lip_i, one per coordinate
  std::function<double(std::span<const Point>)> eval;
};

inline double functional_eval(const SeparatelyLipschitzFunctional& K,
                              std::span<const Point> window) {
  if (window.size() != K.arity) {
    throw std::invalid_argument("functional_eval: window length does not match arity");
  }
  return K.eval(window);
}

/// Sum of squared Lipschitz constants; throws if any entry is infinite
/// (such functionals are barred from the concentration machinery).
inline double lip_sum_sq(const SeparatelyLipschitzFunctional& K) {
  numeric::KahanSum s;
  for (double l : K.lip) {
    if (!std::isfinite(l)) {
      throw std::domain_error("lip_sum_sq: infinite Lipschitz entry");
    }
    s.add(l * l);
  }
  return s.value();
}

/// K(x_0..x_{n-1}) = sum f(x_i); Lip_i = Lip(f).
inline SeparatelyLipschitzFunctional ergodic_sum_functional(Observable f, std::size_t n) {
  SeparatelyLipschitzFunctional K;
  K.name = "ergodic_sum";
  K.arity = n;
  K.lip.assign(n, f.lipschitz_constant);
  K.eval = [f = std::move(f)](std::span<const Point> w) { return ergodic_sum(f, w); };
  return K;
}

/// K = (1/n) sum f(x_i); Lip_i = Lip(f)/n.
inline SeparatelyLipschitzFunctional ergodic_average_functional(Observable f, std::size_t n) {
  SeparatelyLipschitzFunctional K;
  K.name = "ergodic_average";
  K.arity = n;
  K.lip.assign(n, f.lipschitz_constant / static_cast<double>(n));
  K.eval = [f = std::move(f), n](std::span<const Point> w) {
    return ergodic_sum(f, w) / static_cast<double>(n);
  };
  return K;
}

/// Correlation estimator as a functional of n+k variables:
/// K = (1/n) sum_{j<n} f(x_j) f(x_{j+k}).
/// Each coordinate enters at most twice, so the sharp per-coordinate bound
/// is multiplicity * sup|f| * Lip(f) / n.
inline SeparatelyLipschitzFunctional correlation_functional(Observable f, std::size_t n,
                                                            std::size_t k, double sup_f) {
  if (n < 1) throw std::invalid_argument("correlation_functional: n must be >= 1");
  SeparatelyLipschitzFunctional K;
  K.name = "correlation";
  K.arity = n + k;
  K.lip.assign(n + k, 0.0);
  const double unit = sup_f * f.lipschitz_constant / static_cast<double>(n);
  for (std::size_t i = 0; i < n + k; ++i) {
    int multiplicity = 0;
    if (i < n) ++multiplicity;             // appears as f(x_i) in term j = i
    if (i >= k && i - k < n) ++multiplicity;  // appears as f(x_{j+k}) in term j = i-k
    K.lip[i] = multiplicity * unit;
  }
  K.eval = [f = std::move(f), n, k](std::span<const Point> w) {
    numeric::KahanSum s;
    for (std::size_t j = 0; j < n; ++j) s.add(f.eval(w[j]) * f.eval(w[j + k]));
    return s.value() / static_cast<double>(n);
  };
  return K;
}

}  // namespace ergolab::observables
