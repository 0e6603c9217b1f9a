#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>

#include "ergolab/limitlaw.hpp"

using namespace ergolab;
using dynsys::SystemDescriptor;
using limitlaw::RenormSequence;
using limitlaw::StableLawParams;

namespace {

/// error-function series oracle: erf(x) = 2/sqrt(pi) sum (-1)^k x^{2k+1} / (k! (2k+1))
double erf_series(double x) {
  double term = x, sum = x;
  for (int k = 1; k < 60; ++k) {
    term *= -x * x / static_cast<double>(k);
    sum += term / static_cast<double>(2 * k + 1);
  }
  return 2.0 / std::sqrt(std::numbers::pi) * sum;
}

std::vector<double> gaussian_samples(std::size_t m, double sigma, std::uint64_t seed) {
  prng::Xoshiro256 rng(seed);
  std::vector<double> out;
  out.reserve(m);
  while (out.size() < m) {
    const double u1 = rng.uniform();
    const double u2 = rng.uniform();
    const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
    out.push_back(sigma * r * std::cos(2.0 * std::numbers::pi * u2));
    if (out.size() < m) out.push_back(sigma * r * std::sin(2.0 * std::numbers::pi * u2));
  }
  return out;
}

}  // namespace

TEST_CASE("renormalizing sequences") {
  CHECK(limitlaw::renorm_value(RenormSequence::sqrt_n(), 100) == 10.0);
  CHECK(limitlaw::renorm_value(RenormSequence::n_alpha(0.75), 16) == Catch::Approx(8.0));
  CHECK(limitlaw::renorm_value(RenormSequence::sqrt_n_log_n(), 100) ==
        Catch::Approx(std::sqrt(100.0 * std::log(100.0))).margin(1e-4));
  CHECK_THROWS_AS(limitlaw::renorm_value(RenormSequence::sqrt_n(), 0), std::invalid_argument);
  CHECK_THROWS_AS(limitlaw::renorm_value(RenormSequence::sqrt_n_log_n(), 1),
                  std::invalid_argument);
  for (const auto seq : {RenormSequence::sqrt_n(), RenormSequence::n_alpha(0.6),
                         RenormSequence::sqrt_n_log_n()}) {
    double prev = limitlaw::renorm_value(seq, 2);
    for (std::size_t n = 3; n < 50; ++n) {
      const double cur = limitlaw::renorm_value(seq, n);
      CHECK(cur >= prev);
      prev = cur;
    }
  }
}

TEST_CASE("gaussian cdf") {
  CHECK(limitlaw::gaussian_cdf(0.0, 1.0) == 0.5);
  CHECK(limitlaw::gaussian_cdf(0.3, 0.0) == 1.0);  // Heaviside for sigma = 0
  CHECK(limitlaw::gaussian_cdf(-0.3, 0.0) == 0.0);
  const double oracle = 0.5 * (1.0 + erf_series(1.96 / std::sqrt(2.0)));
  CHECK(limitlaw::gaussian_cdf(1.96, 1.0) == Catch::Approx(oracle).margin(1e-10));
  CHECK(limitlaw::gaussian_cdf(1.96, 1.0) == Catch::Approx(0.9750).margin(1e-4));
  prng::Xoshiro256 rng(2);
  for (int i = 0; i < 1000; ++i) {
    const double t = 8.0 * (rng.uniform() - 0.5);
    const double s2 = 0.1 + rng.uniform();
    CHECK(limitlaw::gaussian_cdf(t, s2) + limitlaw::gaussian_cdf(-t, s2) ==
          Catch::Approx(1.0).margin(1e-12));
    CHECK(limitlaw::gaussian_cdf(t + 0.01, s2) >= limitlaw::gaussian_cdf(t, s2));
  }
}

TEST_CASE("stable characteristic function") {
  CHECK(limitlaw::stable_cf(0.0, StableLawParams(1.5, 2.0, -1.0)) == std::complex<double>(1.0, 0.0));
  const auto gauss = limitlaw::stable_cf(1.0, StableLawParams(2.0, 1.0, 0.7));
  CHECK(gauss.real() == Catch::Approx(std::exp(-1.0)).margin(1e-12));
  CHECK(gauss.imag() == 0.0);  // tan(pi) = 0 exactly in the p = 2 branch
  const auto sym = limitlaw::stable_cf(2.0, StableLawParams(1.5, 1.0, 0.0));
  CHECK(sym.real() == Catch::Approx(std::exp(-std::pow(2.0, 1.5))).margin(1e-12));
  CHECK(sym.imag() == Catch::Approx(0.0).margin(1e-15));

  CHECK_THROWS_AS(StableLawParams(0.9, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(StableLawParams(1.5, -1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(StableLawParams(1.5, 1.0, 1.5), std::invalid_argument);

  prng::Xoshiro256 rng(3);
  for (int i = 0; i < 500; ++i) {
    const StableLawParams params(1.0 + rng.uniform(), 0.1 + rng.uniform(),
                                 2.0 * rng.uniform() - 1.0);
    const double t = 6.0 * (rng.uniform() - 0.5);
    const auto cf = limitlaw::stable_cf(t, params);
    CHECK(std::abs(cf) <= 1.0 + 1e-12);
    const auto conj = limitlaw::stable_cf(-t, params);
    CHECK(conj.real() == Catch::Approx(cf.real()).margin(1e-12));
    CHECK(conj.imag() == Catch::Approx(-cf.imag()).margin(1e-12));
  }
}

TEST_CASE("empirical characteristic function") {
  std::vector<double> zeros(10, 0.0);
  CHECK(limitlaw::empirical_cf(zeros, 3.0) == std::complex<double>(1.0, 0.0));
  std::vector<double> pm = {-1.0, 1.0};
  const auto at_pi = limitlaw::empirical_cf(pm, std::numbers::pi);
  CHECK(at_pi.real() == Catch::Approx(-1.0).margin(1e-12));
  CHECK(at_pi.imag() == Catch::Approx(0.0).margin(1e-12));
  std::vector<double> one = {0.37};
  const auto single = limitlaw::empirical_cf(one, 2.0);
  CHECK(single.real() == Catch::Approx(std::cos(0.74)));
  CHECK(single.imag() == Catch::Approx(std::sin(0.74)));
  CHECK(limitlaw::empirical_cf(pm, 0.0) == std::complex<double>(1.0, 0.0));
}

TEST_CASE("cf distance and scale fitting") {
  CHECK_THROWS_AS(limitlaw::cf_distance({{1.0, 2.0}}, StableLawParams(2.0, 1.0, 0.0), {}),
                  std::invalid_argument);
  // at t = 0 both CFs equal 1
  std::vector<double> grid0 = {0.0};
  std::vector<double> samples = {0.4, -0.2, 1.0};
  CHECK(limitlaw::cf_distance(samples, StableLawParams(2.0, 1.0, 0.0), grid0) == 0.0);

  // p = 2 gaussian case: CF exp(-c t^2) means variance 2c
  const double c_true = 0.5;
  const auto gs = gaussian_samples(40000, std::sqrt(2.0 * c_true), 11);
  const auto grid = limitlaw::default_cf_grid();
  const double c_hat = limitlaw::fit_stable_scale(gs, 2.0, 0.0, grid);
  CHECK(c_hat == Catch::Approx(c_true).epsilon(0.1));
  CHECK(limitlaw::cf_distance(gs, StableLawParams(2.0, c_hat, 0.0), grid) < 0.03);
}

TEST_CASE("normalized sums of iid signs have unit variance") {
  dynsys::EnsembleSpec spec;
  spec.m = 4000;
  spec.n = 400;
  spec.burn_in = 0;
  spec.seed = 5;
  const auto ensemble = dynsys::generate_ensemble(SystemDescriptor::iid_rademacher(), spec, 2);
  const auto f = observables::centered_coordinate(0.0);
  const auto dist = limitlaw::normalized_sums(f, ensemble, RenormSequence::sqrt_n());
  std::vector<double> atoms = dist.atoms;
  CHECK(numeric::variance(atoms) == Catch::Approx(1.0).epsilon(0.08));

  // n = 1: atoms are the f-values themselves
  dynsys::EnsembleSpec one;
  one.m = 50;
  one.n = 1;
  one.burn_in = 0;
  one.seed = 6;
  const auto e1 = dynsys::generate_ensemble(SystemDescriptor::iid_rademacher(), one);
  const auto d1 = limitlaw::normalized_sums(f, e1, RenormSequence::sqrt_n());
  for (double a : d1.atoms) CHECK(std::abs(a) == 1.0);

  // f identically zero
  const auto z = limitlaw::normalized_sums(observables::constant(0.0), e1,
                                           RenormSequence::sqrt_n());
  for (double a : z.atoms) CHECK(a == 0.0);
}

TEST_CASE("clt test on iid signs and degenerate observables") {
  limitlaw::CltOptions opt;
  opt.m = 2000;
  opt.threads = 2;
  const std::vector<std::size_t> ns = {4096};
  const auto res = limitlaw::clt_test(observables::centered_coordinate(0.0),
                                      SystemDescriptor::iid_rademacher(), ns, 77, opt);
  REQUIRE_FALSE(res.degenerate);
  CHECK(res.sigma2_hat == Catch::Approx(1.0).epsilon(0.05));
  CHECK(res.points[0].ks <= 0.04);

  const auto degen = limitlaw::clt_test(observables::constant(0.0),
                                        SystemDescriptor::iid_rademacher(), ns, 78, opt);
  CHECK(degen.degenerate);
}

TEST_CASE("tail exponent oracles") {
  prng::Xoshiro256 rng(19);
  // Pareto with survival x^{-1.5} via inverse-CDF sampling
  std::vector<double> pareto(20000);
  for (auto& v : pareto) v = std::pow(1.0 - rng.uniform(), -1.0 / 1.5);
  const auto tp = limitlaw::tail_exponent(pareto);
  CHECK(tp.p_hat == Catch::Approx(1.5).margin(0.1));
  CHECK_FALSE(tp.unreliable);

  // bounded uniform samples: no power tail
  std::vector<double> uni(20000);
  for (auto& v : uni) v = rng.uniform();
  const auto tu = limitlaw::tail_exponent(uni);
  CHECK((tu.steep || tu.poor_fit || tu.unreliable));

  // gaussian: steep with poor power-law fit
  const auto tg = limitlaw::tail_exponent(gaussian_samples(20000, 1.0, 21));
  CHECK(tg.p_hat > 3.0);
  CHECK((tg.steep || tg.poor_fit));

  CHECK_THROWS_AS(limitlaw::tail_exponent(std::vector<double>(10, 1.0)), std::invalid_argument);
}

TEST_CASE("log-averaged measure bookkeeping") {
  dynsys::EnsembleSpec spec;
  spec.m = 1;
  spec.n = 5000;
  spec.burn_in = 100;
  spec.seed = 12;
  const auto orbit = dynsys::make_orbit(SystemDescriptor::doubling(), spec, 0);
  const auto f = observables::centered_coordinate(0.5);

  const auto m1 = limitlaw::asclt_measure(f, orbit, 1, RenormSequence::sqrt_n());
  CHECK(m1.distribution.atoms.size() == 1);
  CHECK(m1.distribution.weights[0] == 1.0);
  CHECK(m1.distribution.atoms[0] == Catch::Approx(f.eval(orbit.points[0])));

  for (std::size_t n : {10u, 100u, 5000u}) {
    const auto m = limitlaw::asclt_measure(f, orbit, n, RenormSequence::sqrt_n());
    double total = 0.0;
    for (double w : m.distribution.weights) total += w;
    CHECK(std::abs(total - 1.0) <= 1e-12);
  }
}

TEST_CASE("berry-esseen probe needs enough n values") {
  const std::vector<std::size_t> two = {100, 1000};
  CHECK_THROWS_AS(limitlaw::berry_esseen_probe(observables::centered_coordinate(0.0),
                                               SystemDescriptor::iid_rademacher(), two, 1),
                  std::invalid_argument);
  limitlaw::CltOptions opt;
  opt.m = 8000;
  opt.threads = 2;
  const std::vector<std::size_t> ns = {64, 512, 4096};
  const auto probe = limitlaw::berry_esseen_probe(observables::centered_coordinate(0.0),
                                                  SystemDescriptor::iid_rademacher(), ns, 9, opt);
  CHECK(probe.slope < -0.2);
  CHECK(probe.slope > -1.0);

  const auto degen = limitlaw::berry_esseen_probe(observables::constant(0.0),
                                                  SystemDescriptor::iid_rademacher(), ns, 9, opt);
  CHECK(degen.degenerate);
}
