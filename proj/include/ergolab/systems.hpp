#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "ergolab/parallel.hpp"
#include "ergolab/prng.hpp"

// Catalog of maps and reproducible orbit ensembles.
//
// Circle and torus maps are iterated in exact integer arithmetic:
//
//  * doubling: T(x) = 2x (mod 1) is the shift on binary digits. A typical
//    orbit is therefore generated as a sliding 53-bit window over an i.i.d.
//    fair-bit stream, which is the exact orbit of an initial condition with
//    n+53 random binary digits. (Naive double iteration collapses to 0
//    within ~53 steps, and fixed-point arithmetic mod 2^61-1 is unusable:
//    2 has multiplicative order 61 there, so every orbit has period 61.)
//    Explicit initial points iterate as exact rationals instead.
//
//  * cat: (x,y) -> (2x+y, x+y) (mod 1) acts on pairs of residues mod
//    M = 2^61-1. The matrix [[2,1],[1,1]] has order ~1.28e17 mod M, so
//    fixed-point orbits are aperiodic at any practical length.
//
// The remaining maps iterate in doubles; their nonlinearity keeps long
// orbits statistically typical.

namespace ergolab::dynsys {

enum class MapKind {
  doubling,
  cat,
  manneville_pomeau,
  quadratic,
  lozi,
  henon,
  iid_uniform,
  iid_rademacher,
};

enum class TailClass { exponential, polynomial, iid, unknown };

inline const char* to_string(MapKind k) {
  switch (k) {
    case MapKind::doubling: return "doubling";
    case MapKind::cat: return "cat";
    case MapKind::manneville_pomeau: return "manneville_pomeau";
    case MapKind::quadratic: return "quadratic";
    case MapKind::lozi: return "lozi";
    case MapKind::henon: return "henon";
    case MapKind::iid_uniform: return "iid_uniform";
    case MapKind::iid_rademacher: return "iid_rademacher";
  }
  return "?";
}

inline const char* to_string(TailClass t) {
  switch (t) {
    case TailClass::exponential: return "exponential";
    case TailClass::polynomial: return "polynomial";
    case TailClass::iid: return "iid";
    case TailClass::unknown: return "unknown";
  }
  return "?";
}

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Trapping box for the planar maps, with escape detection.
inline constexpr double kPlanarBoxHalfWidth = 2.0;

/// A named map with parameters, domain and tail-class metadata.
struct SystemDescriptor {
  MapKind kind = MapKind::doubling;
  double alpha = 0.0;  // manneville_pomeau
  double a = 0.0;      // quadratic / lozi / henon
  double b = 0.0;      // lozi / henon
  int dimension = 1;
  TailClass tail_class = TailClass::exponential;
  double tail_gamma = 0.0;  // decay exponent when tail_class == polynomial
  // Nonempty when parameters fall outside the range with proven statistical
  // theory (e.g. the 'historical' Henon parameters). Propagated to reports.
  std::string theory_note;

  static SystemDescriptor doubling() {
    SystemDescriptor s;
    s.kind = MapKind::doubling;
    s.dimension = 1;
    s.tail_class = TailClass::exponential;
    return s;
  }

  static SystemDescriptor cat() {
    SystemDescriptor s;
    s.kind = MapKind::cat;
    s.dimension = 2;
    s.tail_class = TailClass::exponential;
    return s;
  }

  // alpha in (0,1]; alpha = 1 is the boundary case gamma = 1, where the
  // polynomial-mixing theory no longer applies and results are tagged.
  static SystemDescriptor manneville_pomeau(double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
      throw std::invalid_argument("manneville_pomeau: alpha must be in (0,1]");
    }
    SystemDescriptor s;
    s.kind = MapKind::manneville_pomeau;
    s.alpha = alpha;
    s.dimension = 1;
    s.tail_class = TailClass::polynomial;
    s.tail_gamma = 1.0 / alpha;
    if (alpha >= 1.0) s.theory_note = "alpha = 1 boundary: gamma = 1 mixing bound not covered";
    return s;
  }

  static SystemDescriptor quadratic(double a) {
    if (!(a >= 1.0 && a <= 2.0)) {
      throw std::invalid_argument("quadratic: a must be in [1,2]");
    }
    SystemDescriptor s;
    s.kind = MapKind::quadratic;
    s.a = a;
    s.dimension = 1;
    s.tail_class = TailClass::exponential;
    s.theory_note = "Benedicks-Carleson parameter set not explicit; guarantees unverified";
    return s;
  }

  static SystemDescriptor lozi(double a = 1.7, double b = 0.5) {
    if (!(a > 0.0 && a <= 2.0 && std::abs(b) < 1.0)) {
      throw std::invalid_argument("lozi: need a in (0,2], |b| < 1");
    }
    SystemDescriptor s;
    s.kind = MapKind::lozi;
    s.a = a;
    s.b = b;
    s.dimension = 2;
    s.tail_class = TailClass::exponential;
    return s;
  }

  static SystemDescriptor henon(double a = 1.4, double b = 0.3) {
    if (!(a > 0.0 && a <= 2.0 && std::abs(b) < 1.0)) {
      throw std::invalid_argument("henon: need a in (0,2], |b| < 1");
    }
    SystemDescriptor s;
    s.kind = MapKind::henon;
    s.a = a;
    s.b = b;
    s.dimension = 2;
    s.tail_class = TailClass::exponential;
    s.theory_note = "historical Henon parameters are not covered by the proven results";
    return s;
  }

  static SystemDescriptor iid_uniform() {
    SystemDescriptor s;
    s.kind = MapKind::iid_uniform;
    s.dimension = 1;
    s.tail_class = TailClass::iid;
    return s;
  }

  static SystemDescriptor iid_rademacher() {
    SystemDescriptor s;
    s.kind = MapKind::iid_rademacher;
    s.dimension = 1;
    s.tail_class = TailClass::iid;
    return s;
  }

  bool is_iid() const {
    return kind == MapKind::iid_uniform || kind == MapKind::iid_rademacher;
  }
  bool is_planar() const { return kind == MapKind::lozi || kind == MapKind::henon; }
  bool on_circle() const { return kind == MapKind::doubling || kind == MapKind::cat; }
};

/// Range of the first coordinate over the domain; used for observable
/// bounds (sup |f|, Lipschitz probes).
struct CoordRange {
  double lo = 0.0;
  double hi = 1.0;
};

inline CoordRange x_range(const SystemDescriptor& s) {
  switch (s.kind) {
    case MapKind::quadratic:
    case MapKind::iid_rademacher:
      return {-1.0, 1.0};
    case MapKind::lozi:
    case MapKind::henon:
      return {-kPlanarBoxHalfWidth, kPlanarBoxHalfWidth};
    default:
      return {0.0, 1.0};
  }
}

// ---------------------------------------------------------------------------
// Exact rational state on [0,1) for the circle/torus maps.

struct Rat {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  static Rat make(std::uint64_t num, std::uint64_t den) {
    if (den == 0) throw std::invalid_argument("Rat: zero denominator");
    num %= den;
    const std::uint64_t g = std::gcd(num == 0 ? den : num, den);
    return Rat{num / g, den / g};
  }

  /// Exact representation of a double in [0,1) as a dyadic rational.
  static Rat from_unit_double(double v) {
    if (!(v >= 0.0 && v < 1.0)) {
      throw std::invalid_argument("Rat: value outside [0,1)");
    }
    int exp = 0;
    double mant = std::frexp(v, &exp);  // v = mant * 2^exp, mant in [0.5,1)
    std::uint64_t num = 0, den = 1;
    if (v != 0.0) {
      const double scaled = std::ldexp(mant, 53);
      num = static_cast<std::uint64_t>(scaled);
      int shift = 53 - exp;
      while (shift > 0 && (num & 1) == 0) {
        num >>= 1;
        --shift;
      }
      if (shift > 63) throw std::invalid_argument("Rat: subnormal input");
      den = std::uint64_t{1} << shift;
    }
    return Rat{num, den};
  }

  double to_double() const {
    return static_cast<double>(num) / static_cast<double>(den);
  }
};

/// 2x mod 1 on exact rationals.
inline Rat doubling_step(Rat r) {
  // num < den <= 2^63 keeps 2*num in range.
  if (r.den > (std::uint64_t{1} << 63)) throw std::overflow_error("doubling_step: denominator too large");
  std::uint64_t n = 2 * r.num;
  if (n >= r.den) n -= r.den;
  return Rat{n, r.den};
}

/// Cat map step on an exact rational pair with a common denominator.
inline void cat_step(std::uint64_t& u, std::uint64_t& v, std::uint64_t den) {
  if (den > (std::uint64_t{1} << 61)) throw std::overflow_error("cat_step: denominator too large");
  std::uint64_t nu = 2 * u + v;  // < 3*den <= 3*2^61 < 2^64
  while (nu >= den) nu -= den;
  std::uint64_t nv = u + v;
  if (nv >= den) nv -= den;
  u = nu;
  v = nv;
}

// ---------------------------------------------------------------------------
// One-step map evaluation.

namespace detail {

inline double wrap_unit(double v) {
  v -= std::floor(v);
  return v < 1.0 ? v : 0.0;
}

inline double mp_first_branch(double x, double alpha) {
  // x + 2^alpha x^{1+alpha}; sup over [0,1/2) is exactly 1.
  return x + std::exp2(alpha) * std::pow(x, 1.0 + alpha);
}

}  // namespace detail

/// Applies T once. Throws std::logic_error for the iid kinds (they have no
/// deterministic map) and std::domain_error for points outside the domain.
inline Point apply(const SystemDescriptor& s, Point p) {
  switch (s.kind) {
    case MapKind::doubling: {
      if (!(p.x >= 0.0 && p.x < 1.0)) throw std::domain_error("apply: point outside [0,1)");
      double v = 2.0 * p.x;
      if (v >= 1.0) v -= 1.0;
      return {v, 0.0};
    }
    case MapKind::cat: {
      if (!(p.x >= 0.0 && p.x < 1.0 && p.y >= 0.0 && p.y < 1.0)) {
        throw std::domain_error("apply: point outside unit torus");
      }
      double u = 2.0 * p.x + p.y;
      while (u >= 1.0) u -= 1.0;
      double v = p.x + p.y;
      if (v >= 1.0) v -= 1.0;
      return {u, v};
    }
    case MapKind::manneville_pomeau: {
      if (!(p.x >= 0.0 && p.x <= 1.0)) throw std::domain_error("apply: point outside [0,1]");
      if (p.x < 0.5) return {detail::mp_first_branch(p.x, s.alpha), 0.0};
      return {2.0 * p.x - 1.0, 0.0};
    }
    case MapKind::quadratic: {
      if (!(p.x >= -1.0 && p.x <= 1.0)) throw std::domain_error("apply: point outside [-1,1]");
      return {1.0 - s.a * p.x * p.x, 0.0};
    }
    case MapKind::lozi:
      return {1.0 - s.a * std::abs(p.x) + p.y, s.b * p.x};
    case MapKind::henon:
      return {1.0 - s.a * p.x * p.x + p.y, s.b * p.x};
    case MapKind::iid_uniform:
    case MapKind::iid_rademacher:
      throw std::logic_error("apply: iid kinds have no deterministic map");
  }
  throw std::logic_error("apply: unknown kind");
}

/// Exact fixed-point application for the circle/torus maps.
inline void apply_exact(const SystemDescriptor& s, Rat& u, Rat& v) {
  if (s.kind == MapKind::doubling) {
    u = doubling_step(u);
    u = Rat::make(u.num, u.den);
    return;
  }
  if (s.kind == MapKind::cat) {
    const std::uint64_t g = std::gcd(u.den, v.den);
    const std::uint64_t den = u.den / g * v.den;
    std::uint64_t un = u.num * (den / u.den);
    std::uint64_t vn = v.num * (den / v.den);
    cat_step(un, vn, den);
    u = Rat::make(un, den);
    v = Rat::make(vn, den);
    return;
  }
  throw std::logic_error("apply_exact: only doubling and cat iterate in fixed point");
}

// ---------------------------------------------------------------------------
// Orbits and ensembles.

struct EnsembleSpec {
  std::size_t m = 1;           // number of orbits
  std::size_t n = 1;           // recorded length per orbit
  std::size_t burn_in = 1000;  // discarded steps before recording
  std::uint64_t seed = 0;      // master seed (no wall-clock default)
};

struct Orbit {
  std::vector<Point> points;
  bool escaped = false;           // planar maps only
  std::size_t escape_index = 0;   // recorded length at which escape occurred

  std::size_t size() const { return points.size(); }
};

/// Streaming generator for one orbit; all randomness comes from the
/// per-orbit substream seed.
class OrbitGenerator {
 public:
  OrbitGenerator(const SystemDescriptor& s, std::uint64_t orbit_seed)
      : sys_(s), rng_(orbit_seed) {
    switch (sys_.kind) {
      case MapKind::doubling:
        cur_ = rng_();
        nxt_ = rng_();
        bit_offset_ = 0;
        break;
      case MapKind::cat:
        ca_ = draw_mod_m();
        cb_ = draw_mod_m();
        break;
      case MapKind::manneville_pomeau:
        x_ = rng_.uniform();
        break;
      case MapKind::quadratic:
        x_ = rng_.uniform(-1.0, 1.0);
        break;
      case MapKind::lozi:
        x_ = rng_.uniform(-1.0, 1.0);
        y_ = rng_.uniform(-0.5, 0.5);
        break;
      case MapKind::henon:
        x_ = rng_.uniform(-1.0, 1.0);
        y_ = rng_.uniform(-0.4, 0.4);
        break;
      default:
        break;
    }
  }

  bool escaped() const { return escaped_; }

  /// Current state as a point; then advances one step. Returns false once
  /// the orbit has escaped the trapping box (planar maps only).
  bool next(Point& out) {
    if (escaped_) return false;
    switch (sys_.kind) {
      case MapKind::doubling: {
        const std::uint64_t w =
            bit_offset_ == 0 ? cur_ : (cur_ << bit_offset_) | (nxt_ >> (64 - bit_offset_));
        out = {static_cast<double>(w >> 11) * 0x1.0p-53, 0.0};
        advance_bit();
        return true;
      }
      case MapKind::cat: {
        out = {static_cast<double>(ca_) * kInvM, static_cast<double>(cb_) * kInvM};
        const std::uint64_t na = mod_m(2 * ca_ % kM + cb_);
        const std::uint64_t nb = mod_m(ca_ + cb_);
        ca_ = na;
        cb_ = nb;
        return true;
      }
      case MapKind::manneville_pomeau:
        out = {x_, 0.0};
        x_ = x_ < 0.5 ? detail::mp_first_branch(x_, sys_.alpha) : 2.0 * x_ - 1.0;
        // The branch supremum is exactly 1; keep rounding away from the
        // fixed point at 1 so the orbit cannot freeze there.
        if (x_ >= 1.0) x_ = std::nextafter(1.0, 0.0);
        return true;
      case MapKind::quadratic:
        out = {x_, 0.0};
        x_ = 1.0 - sys_.a * x_ * x_;
        return true;
      case MapKind::lozi:
      case MapKind::henon: {
        out = {x_, y_};
        const double nx = sys_.kind == MapKind::lozi ? 1.0 - sys_.a * std::abs(x_) + y_
                                                     : 1.0 - sys_.a * x_ * x_ + y_;
        const double ny = sys_.b * x_;
        x_ = nx;
        y_ = ny;
        if (std::abs(x_) > kPlanarBoxHalfWidth || std::abs(y_) > kPlanarBoxHalfWidth ||
            !std::isfinite(x_) || !std::isfinite(y_)) {
          escaped_ = true;
        }
        return true;
      }
      case MapKind::iid_uniform:
        out = {rng_.uniform(), 0.0};
        return true;
      case MapKind::iid_rademacher:
        out = {rng_.bit() ? 1.0 : -1.0, 0.0};
        return true;
    }
    return false;
  }

  /// Discards `steps` states.
  void skip(std::size_t steps) {
    Point scratch;
    for (std::size_t i = 0; i < steps && !escaped_; ++i) next(scratch);
  }

 private:
  static constexpr std::uint64_t kM = (std::uint64_t{1} << 61) - 1;
  static constexpr double kInvM = 1.0 / static_cast<double>(kM);

  static std::uint64_t mod_m(std::uint64_t v) { return v >= kM ? v - kM : v; }

  std::uint64_t draw_mod_m() {
    std::uint64_t r;
    do {
      r = rng_() >> 3;  // 61 bits
    } while (r >= kM);
    return r;
  }

  void advance_bit() {
    if (++bit_offset_ == 64) {
      cur_ = nxt_;
      nxt_ = rng_();
      bit_offset_ = 0;
    }
  }

  SystemDescriptor sys_;
  prng::Xoshiro256 rng_;
  // doubling
  std::uint64_t cur_ = 0, nxt_ = 0;
  int bit_offset_ = 0;
  // cat
  std::uint64_t ca_ = 0, cb_ = 0;
  // double-valued states
  double x_ = 0.0, y_ = 0.0;
  bool escaped_ = false;
};

/// Generates orbit `index` of the ensemble; bit-identical for a given
/// (system, spec, index) regardless of which other orbits are generated.
inline Orbit make_orbit(const SystemDescriptor& s, const EnsembleSpec& spec,
                        std::size_t index) {
  if (spec.n < 1) throw std::invalid_argument("make_orbit: n must be >= 1");
  OrbitGenerator gen(s, prng::substream_seed(spec.seed, index));
  gen.skip(spec.burn_in);
  Orbit orbit;
  orbit.points.reserve(spec.n);
  Point p;
  for (std::size_t i = 0; i < spec.n; ++i) {
    if (!gen.next(p)) break;
    orbit.points.push_back(p);
  }
  if (gen.escaped()) {
    orbit.escaped = true;
    orbit.escape_index = orbit.points.size();
  }
  return orbit;
}

/// m independent orbits with per-orbit substreams split from the master seed.
struct OrbitEnsemble {
  SystemDescriptor system;
  EnsembleSpec spec;
  std::vector<Orbit> orbits;

  std::size_t escaped_count() const {
    std::size_t c = 0;
    for (const auto& o : orbits) c += o.escaped ? 1 : 0;
    return c;
  }
};

inline OrbitEnsemble generate_ensemble(const SystemDescriptor& s, const EnsembleSpec& spec,
                                       unsigned n_threads = 1) {
  if (spec.m < 1 || spec.n < 1) {
    throw std::invalid_argument("generate_ensemble: m and n must be >= 1");
  }
  OrbitEnsemble e;
  e.system = s;
  e.spec = spec;
  e.orbits.resize(spec.m);
  parallel::for_index(spec.m, n_threads,
                      [&](std::size_t i) { e.orbits[i] = make_orbit(s, spec, i); });
  return e;
}

/// Streams orbits one at a time (orbit index, orbit) without keeping the
/// whole ensemble in memory. fn must only touch per-index state.
template <typename Fn>
void for_each_orbit(const SystemDescriptor& s, const EnsembleSpec& spec, unsigned n_threads,
                    Fn&& fn) {
  parallel::for_index(spec.m, n_threads, [&](std::size_t i) {
    Orbit orbit = make_orbit(s, spec, i);
    fn(i, orbit);
  });
}

/// Convenience reduction: one value per orbit, indexed deterministically.
template <typename Fn>
std::vector<double> per_orbit_values(const SystemDescriptor& s, const EnsembleSpec& spec,
                                     unsigned n_threads, Fn&& fn) {
  std::vector<double> out(spec.m);
  for_each_orbit(s, spec, n_threads,
                 [&](std::size_t i, const Orbit& orbit) { out[i] = fn(orbit); });
  return out;
}

// ---------------------------------------------------------------------------
// Explicit-initial-condition iteration.

/// Orbit of x0: the points T^{burn_in} x0 ... T^{burn_in+n-1} x0.
/// doubling/cat iterate exactly on the dyadic rational represented by x0;
/// planar maps report escape from the trapping box via the orbit flags.
inline Orbit iterate(const SystemDescriptor& s, Point x0, std::size_t n,
                     std::size_t burn_in = 0) {
  if (n < 1) throw std::invalid_argument("iterate: n must be >= 1");
  if (s.is_iid()) throw std::logic_error("iterate: iid kinds have no deterministic map");
  Orbit orbit;
  orbit.points.reserve(n);
  if (s.on_circle()) {
    Rat u = Rat::from_unit_double(x0.x);
    Rat v = s.dimension == 2 ? Rat::from_unit_double(x0.y) : Rat{0, 1};
    for (std::size_t i = 0; i < burn_in; ++i) apply_exact(s, u, v);
    for (std::size_t i = 0; i < n; ++i) {
      orbit.points.push_back({u.to_double(), s.dimension == 2 ? v.to_double() : 0.0});
      apply_exact(s, u, v);
    }
    return orbit;
  }
  Point p = x0;
  for (std::size_t i = 0; i < burn_in; ++i) p = apply(s, p);
  for (std::size_t i = 0; i < n; ++i) {
    if (s.is_planar() &&
        (std::abs(p.x) > kPlanarBoxHalfWidth || std::abs(p.y) > kPlanarBoxHalfWidth ||
         !std::isfinite(p.x) || !std::isfinite(p.y))) {
      orbit.escaped = true;
      orbit.escape_index = orbit.points.size();
      return orbit;
    }
    orbit.points.push_back(p);
    p = apply(s, p);
  }
  return orbit;
}

/// Exact rational orbit for the circle/torus maps (e.g. x0 = 1/3).
inline std::vector<Rat> iterate_exact(const SystemDescriptor& s, Rat x0, std::size_t n,
                                      std::size_t burn_in = 0) {
  if (s.kind != MapKind::doubling) {
    throw std::logic_error("iterate_exact: 1-D rational orbits require the doubling map");
  }
  std::vector<Rat> orbit;
  orbit.reserve(n);
  Rat u = Rat::make(x0.num, x0.den);
  for (std::size_t i = 0; i < burn_in; ++i) u = doubling_step(u);
  for (std::size_t i = 0; i < n; ++i) {
    orbit.push_back(u);
    u = doubling_step(u);
  }
  return orbit;
}

/// m initial points uniform on the domain (basin box for the planar maps),
/// deterministic given the seed.
inline std::vector<Point> sample_initial(const SystemDescriptor& s, std::size_t m,
                                         std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("sample_initial: m must be >= 1");
  std::vector<Point> pts(m);
  parallel::for_index(m, 1, [&](std::size_t i) {
    OrbitGenerator gen(s, prng::substream_seed(seed, i));
    Point p;
    gen.next(p);
    pts[i] = p;
  });
  return pts;
}

// ---------------------------------------------------------------------------
// Tracing metric (used by the shadowing statistics): arc distance per
// coordinate on the circle/torus, Euclidean distance rescaled by the
// trapping-box diameter on the plane, |u-v| rescaled to unit diameter on
// intervals.

inline double arc_distance(double u, double v) {
  const double d = std::abs(u - v);
  return std::min(d, 1.0 - d);
}

inline double tracing_distance(const SystemDescriptor& s, const Point& p, const Point& q) {
  switch (s.kind) {
    case MapKind::doubling:
      return arc_distance(p.x, q.x);
    case MapKind::cat: {
      const double du = arc_distance(p.x, q.x);
      const double dv = arc_distance(p.y, q.y);
      return std::sqrt(du * du + dv * dv);
    }
    case MapKind::quadratic:
    case MapKind::iid_rademacher:
      return std::abs(p.x - q.x) / 2.0;
    case MapKind::lozi:
    case MapKind::henon: {
      const double dx = p.x - q.x;
      const double dy = p.y - q.y;
      const double diam = 2.0 * kPlanarBoxHalfWidth * std::numbers::sqrt2;
      return std::sqrt(dx * dx + dy * dy) / diam;
    }
    default:
      return std::abs(p.x - q.x);
  }
}

}  // namespace ergolab::dynsys
