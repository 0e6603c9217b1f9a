#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ergolab/ergostat.hpp"
#include "ergolab/observables.hpp"
#include "ergolab/systems.hpp"

using namespace ergolab;
using dynsys::SystemDescriptor;
using ergostat::EmpiricalDistribution;

namespace {

dynsys::OrbitEnsemble doubling_ensemble(std::size_t m, std::size_t n, std::uint64_t seed) {
  dynsys::EnsembleSpec spec;
  spec.m = m;
  spec.n = n;
  spec.burn_in = 200;
  spec.seed = seed;
  return dynsys::generate_ensemble(SystemDescriptor::doubling(), spec, 2);
}

/// trapezoid quadrature of |F_emp - F| used as an oracle for the closed-form
/// Kantorovich integrals
template <typename Cdf>
double w1_quadrature(const EmpiricalDistribution& d, Cdf cdf, double lo, double hi,
                     std::size_t steps) {
  const auto F_emp = [&](double t) {
    double level = 0.0;
    for (std::size_t i = 0; i < d.atoms.size() && d.atoms[i] <= t; ++i) level += d.weights[i];
    return level;
  };
  double prev = std::abs(F_emp(lo) - cdf(lo));
  double total = 0.0;
  for (std::size_t i = 1; i <= steps; ++i) {
    const double t = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps);
    const double cur = std::abs(F_emp(t) - cdf(t));
    total += 0.5 * (prev + cur) * (hi - lo) / static_cast<double>(steps);
    prev = cur;
  }
  return total;
}

}  // namespace

TEST_CASE("birkhoff average basics") {
  dynsys::Orbit orbit;
  orbit.points = {{0.5, 0}, {0.25, 0}};
  CHECK(ergostat::birkhoff_average(observables::constant(3.0), orbit) == 3.0);

  const auto big = doubling_ensemble(1, 1000000, 31);
  const double avg = ergostat::birkhoff_average(observables::coordinate(), big.orbits[0]);
  CHECK(std::abs(avg - 0.5) < 3.0 * 0.5 / 1000.0);  // sigma = 1/2 by Green-Kubo
}

TEST_CASE("cross-seed agreement for the MP birkhoff average") {
  const auto mp = SystemDescriptor::manneville_pomeau(0.75);
  dynsys::EnsembleSpec spec;
  spec.m = 1;
  spec.n = 1000000;
  spec.burn_in = 1000;
  const auto f = observables::coordinate();
  spec.seed = 100;
  const double a1 = ergostat::birkhoff_average(f, dynsys::make_orbit(mp, spec, 0));
  spec.seed = 200;
  const double a2 = ergostat::birkhoff_average(f, dynsys::make_orbit(mp, spec, 0));
  CHECK(std::abs(a1 - a2) < 0.01);
}

TEST_CASE("doubling autocovariance matches the piecewise integrals") {
  const auto f = observables::centered_coordinate(0.5);
  const auto ensemble = doubling_ensemble(100, 10008, 7);
  const auto c0 = ergostat::autocovariance(f, ensemble, 0);
  CHECK(std::abs(c0.value - 1.0 / 12.0) <= 3.0 * c0.std_error);
  const auto c1 = ergostat::autocovariance(f, ensemble, 1);
  CHECK(std::abs(c1.value - 1.0 / 24.0) <= 3.0 * c1.std_error);
  CHECK_THROWS_AS(ergostat::autocovariance(observables::coordinate(), ensemble, 1),
                  std::invalid_argument);
}

TEST_CASE("covariance series tracks the geometric closed form") {
  const auto f = observables::centered_coordinate(0.5);
  const auto ensemble = doubling_ensemble(100, 10008, 13);
  const auto series = ergostat::covariance_series(f, ensemble, 8);
  REQUIRE(series.values.size() == 9);
  for (std::size_t l = 0; l <= 8; ++l) {
    const double expect = std::ldexp(1.0 / 12.0, -static_cast<int>(l));
    CHECK(std::abs(series.values[l] - expect) <= 3.0 * series.std_errors[l]);
  }
}

TEST_CASE("iid covariance vanishes at positive lags") {
  dynsys::EnsembleSpec spec;
  spec.m = 200;
  spec.n = 5000;
  spec.burn_in = 0;
  spec.seed = 3;
  const auto ensemble = dynsys::generate_ensemble(SystemDescriptor::iid_rademacher(), spec, 2);
  const auto series =
      ergostat::covariance_series(observables::centered_coordinate(0.0), ensemble, 6);
  for (std::size_t l = 1; l <= 6; ++l) {
    CHECK(std::abs(series.values[l]) <= 3.0 * series.std_errors[l]);
  }
  CHECK(series.values[0] == Catch::Approx(1.0).epsilon(0.01));
}

TEST_CASE("green-kubo sums and cutoffs") {
  {
    ergostat::CovarianceSeries iid;
    iid.values = {1.0, 0.0, 0.0, 0.0};
    iid.std_errors = {0.0, 0.0, 0.0, 0.0};
    const auto gk = ergostat::green_kubo(iid);
    CHECK(gk.sigma2 == 1.0);
    CHECK_FALSE(gk.degenerate);
  }
  {
    // exact doubling series: sigma^2 = 1/12 + 2 sum 2^-l / 12 = 1/4
    ergostat::CovarianceSeries s;
    for (int l = 0; l <= 40; ++l) s.values.push_back(std::ldexp(1.0 / 12.0, -l));
    s.std_errors.assign(s.values.size(), 0.0);
    CHECK(ergostat::green_kubo(s).sigma2 == Catch::Approx(0.25).margin(1e-9));
  }
  {
    ergostat::CovarianceSeries zero;
    zero.values.assign(10, 0.0);
    zero.std_errors.assign(10, 0.0);
    const auto gk = ergostat::green_kubo(zero);
    CHECK(gk.sigma2 == 0.0);
    CHECK(gk.degenerate);
  }
  {
    // geometric series C(l) = rho^l C(0): sigma^2 = C0 (1+rho)/(1-rho)
    const double rho = 0.6, c0 = 2.0;
    ergostat::CovarianceSeries s;
    for (int l = 0; l <= 60; ++l) s.values.push_back(c0 * std::pow(rho, l));
    s.std_errors.assign(s.values.size(), 0.0);
    CHECK(ergostat::green_kubo(s).sigma2 ==
          Catch::Approx(c0 * (1.0 + rho) / (1.0 - rho)).margin(1e-9));
  }
  {
    // noise-aware cutoff: signal for 3 lags, then noise below 2 SE
    ergostat::CovarianceSeries s;
    s.values = {1.0, 0.4, 0.2, 0.001, -0.002, 0.001, 0.002};
    s.std_errors = {0.001, 0.001, 0.001, 0.01, 0.01, 0.01, 0.01};
    const auto gk = ergostat::green_kubo(s);
    CHECK(gk.cutoff_lag == 2);
    CHECK(gk.sigma2 == Catch::Approx(1.0 + 2.0 * (0.4 + 0.2)));
  }
}

TEST_CASE("empirical measures") {
  const auto single = EmpiricalDistribution::from_samples({0.3});
  CHECK(single.atoms.size() == 1);
  CHECK(single.weights[0] == 1.0);
  const auto pair = EmpiricalDistribution::from_samples({0.7, 0.1});
  CHECK(pair.atoms[0] == 0.1);
  CHECK(pair.weights[0] == 0.5);
  CHECK(pair.weights[1] == 0.5);
  double total = 0.0;
  for (double w : pair.weights) total += w;
  CHECK(std::abs(total - 1.0) <= 1e-12);
}

TEST_CASE("kantorovich distance examples and metric axioms") {
  const auto da = EmpiricalDistribution::from_samples({0.3});
  const auto db = EmpiricalDistribution::from_samples({0.8});
  CHECK(ergostat::kantorovich_1d(da, da) == 0.0);
  CHECK(ergostat::kantorovich_1d(da, db) == Catch::Approx(0.5));
  CHECK(ergostat::kantorovich_1d(ergostat::Uniform01{}, ergostat::DiracLaw{0.5}) ==
        Catch::Approx(0.25));
  CHECK(ergostat::kantorovich_1d(da, ergostat::DiracLaw{0.3}) == 0.0);

  prng::Xoshiro256 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> xs(5), ys(7), zs(4);
    for (auto& v : xs) v = rng.uniform();
    for (auto& v : ys) v = rng.uniform();
    for (auto& v : zs) v = rng.uniform();
    const auto dx = EmpiricalDistribution::from_samples(xs);
    const auto dy = EmpiricalDistribution::from_samples(ys);
    const auto dz = EmpiricalDistribution::from_samples(zs);
    const double dxy = ergostat::kantorovich_1d(dx, dy);
    CHECK(dxy == Catch::Approx(ergostat::kantorovich_1d(dy, dx)).margin(1e-12));
    CHECK(dxy >= 0.0);
    CHECK(dxy <= ergostat::kantorovich_1d(dx, dz) + ergostat::kantorovich_1d(dz, dy) + 1e-12);
    CHECK(ergostat::kantorovich_1d(dx, dx) <= 1e-15);
  }
}

TEST_CASE("closed-form kantorovich against quadrature") {
  prng::Xoshiro256 rng(77);
  std::vector<double> xs(20);
  for (auto& v : xs) v = 2.0 * rng.uniform() - 1.0;
  const auto d = EmpiricalDistribution::from_samples(xs);
  const double sigma2 = 0.41;
  const double closed = ergostat::kantorovich_1d(d, ergostat::GaussianLaw{sigma2});
  const double quad = w1_quadrature(
      d, [&](double t) { return ergostat::gaussian_cdf(t, sigma2); }, -8.0, 8.0, 200000);
  CHECK(closed == Catch::Approx(quad).margin(1e-5));

  std::vector<double> us(15);
  for (auto& v : us) v = rng.uniform();
  const auto du = EmpiricalDistribution::from_samples(us);
  const double closed_u = ergostat::kantorovich_1d(du, ergostat::Uniform01{});
  const double quad_u = w1_quadrature(
      du, [](double t) { return std::clamp(t, 0.0, 1.0); }, -0.5, 1.5, 200000);
  CHECK(closed_u == Catch::Approx(quad_u).margin(1e-5));
}

TEST_CASE("ks distance examples") {
  const auto d = EmpiricalDistribution::from_samples({0.1, 0.3, 0.5, 0.7, 0.9});
  // against its own empirical CDF the distance vanishes
  const auto own_cdf = [&](double t) {
    double level = 0.0;
    for (std::size_t i = 0; i < d.atoms.size() && d.atoms[i] <= t; ++i) level += d.weights[i];
    return level;
  };
  CHECK(ergostat::ks_distance(d, own_cdf) == 0.0);

  // dense uniform empirical against the Dirac step at 1/2
  std::vector<double> grid(1000);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid[i] = (static_cast<double>(i) + 0.5) / 1000.0;
  }
  const auto uniform_grid = EmpiricalDistribution::from_samples(grid);
  const auto dirac_cdf = [](double t) { return t >= 0.5 ? 1.0 : 0.0; };
  CHECK(ergostat::ks_distance(uniform_grid, dirac_cdf) == Catch::Approx(0.5).margin(1e-3));

  // single atom at the target's median
  const auto atom = EmpiricalDistribution::from_samples({0.0});
  CHECK(ergostat::ks_distance(atom, ergostat::GaussianLaw{1.0}) == Catch::Approx(0.5));

  // KS is a probability-scale statistic
  prng::Xoshiro256 rng(5);
  std::vector<double> xs(50);
  for (auto& v : xs) v = rng.uniform() * 4.0 - 2.0;
  const double ks =
      ergostat::ks_distance(EmpiricalDistribution::from_samples(xs), ergostat::GaussianLaw{1.0});
  CHECK(ks >= 0.0);
  CHECK(ks <= 1.0);
}

TEST_CASE("invariant density histogram") {
  {
    const auto ensemble = doubling_ensemble(10, 100000, 23);
    const auto h =
        ergostat::invariant_density_histogram(ensemble, ergostat::linspace_edges(0.0, 1.0, 20));
    double integral = 0.0;
    for (std::size_t b = 0; b < h.density.size(); ++b) {
      integral += h.density[b] * (h.edges[b + 1] - h.edges[b]);
      // flat density: bin count fluctuation within 3 sigma of binomial
      const double p = 0.05;
      const double n = 1e6;
      const double sigma = std::sqrt(n * p * (1 - p));
      CHECK(std::abs(static_cast<double>(h.counts[b]) - n * p) <= 3.5 * sigma);
    }
    CHECK(integral == Catch::Approx(1.0).margin(1e-9));
  }
  {
    // h(x) ~ x^-alpha near the neutral fixed point
    dynsys::EnsembleSpec spec;
    spec.m = 20;
    spec.n = 500000;
    spec.burn_in = 1000;
    spec.seed = 9;
    const auto mp =
        dynsys::generate_ensemble(SystemDescriptor::manneville_pomeau(0.75), spec, 2);
    const auto h = ergostat::invariant_density_histogram(
        mp, ergostat::geomspace_edges(0.001, 0.05, 12));
    const auto fit = ergostat::density_loglog_slope(h);
    CHECK(fit.slope == Catch::Approx(-0.75).margin(0.15));
  }
}

TEST_CASE("nonconventional averages") {
  // reduction to the birkhoff average at ell = 1
  const auto ensemble = doubling_ensemble(1, 1000, 41);
  const auto f = observables::coordinate();
  std::vector<observables::Observable> single = {f};
  CHECK(ergostat::nonconventional_average(single, ensemble.orbits[0], 1000) ==
        Catch::Approx(ergostat::birkhoff_average(f, ensemble.orbits[0])));

  // all factors identically one
  std::vector<observables::Observable> ones = {observables::constant(1.0),
                                               observables::constant(1.0)};
  CHECK(ergostat::nonconventional_average(ones, ensemble.orbits[0], 400) == 1.0);

  // exact enumeration on the period-2 doubling orbit of 1/3
  dynsys::Orbit per2;
  const auto exact = dynsys::iterate_exact(SystemDescriptor::doubling(), {1, 3}, 3);
  for (const auto& r : exact) per2.points.push_back({r.to_double(), 0});
  std::vector<observables::Observable> ff = {f, f};
  CHECK(ergostat::nonconventional_average(ff, per2, 2) ==
        Catch::Approx(1.0 / 6.0).margin(1e-12));

  // too short
  CHECK_THROWS_AS(ergostat::nonconventional_average(ff, per2, 3), std::invalid_argument);

  // weak-mixing consequence: centered factors on iid give 0 within noise
  dynsys::EnsembleSpec spec;
  spec.m = 200;
  spec.n = 2001;
  spec.burn_in = 0;
  spec.seed = 6;
  const auto iid = dynsys::generate_ensemble(SystemDescriptor::iid_uniform(), spec, 2);
  const auto g = observables::centered_coordinate(0.5);
  std::vector<observables::Observable> gg = {g, g};
  std::vector<double> vals;
  for (const auto& orbit : iid.orbits) {
    vals.push_back(ergostat::nonconventional_average(gg, orbit, 1000));
  }
  const double mean = numeric::mean(vals);
  const double se = numeric::std_error_of_mean(vals);
  CHECK(std::abs(mean) <= 3.0 * se);
}
