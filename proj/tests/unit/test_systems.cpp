#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "ergolab/ergostat.hpp"
#include "ergolab/systems.hpp"

using namespace ergolab;
using dynsys::MapKind;
using dynsys::Point;
using dynsys::Rat;
using dynsys::SystemDescriptor;

TEST_CASE("apply matches the map formulas exactly") {
  CHECK(dynsys::apply(SystemDescriptor::doubling(), {0.3, 0}).x == Catch::Approx(0.6).margin(1e-12));
  CHECK(dynsys::apply(SystemDescriptor::manneville_pomeau(1.0), {0.25, 0}).x ==
        Catch::Approx(0.375).margin(1e-12));
  CHECK(dynsys::apply(SystemDescriptor::manneville_pomeau(0.5), {0.5, 0}).x ==
        Catch::Approx(0.0).margin(1e-12));
  const Point cat = dynsys::apply(SystemDescriptor::cat(), {0.25, 0.5});
  CHECK(cat.x == Catch::Approx(0.0).margin(1e-12));
  CHECK(cat.y == Catch::Approx(0.75).margin(1e-12));
  const Point henon = dynsys::apply(SystemDescriptor::henon(1.4, 0.3), {0.0, 0.0});
  CHECK(henon.x == Catch::Approx(1.0).margin(1e-12));
  CHECK(henon.y == Catch::Approx(0.0).margin(1e-12));
  const Point lozi = dynsys::apply(SystemDescriptor::lozi(1.7, 0.5), {1.0, 0.0});
  CHECK(lozi.x == Catch::Approx(-0.7).margin(1e-12));
  CHECK(lozi.y == Catch::Approx(0.5).margin(1e-12));
  CHECK(dynsys::apply(SystemDescriptor::quadratic(2.0), {0.5, 0}).x ==
        Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("apply rejects misuse") {
  CHECK_THROWS_AS(dynsys::apply(SystemDescriptor::iid_uniform(), {0.5, 0}), std::logic_error);
  CHECK_THROWS_AS(dynsys::apply(SystemDescriptor::doubling(), {1.5, 0}), std::domain_error);
  CHECK_THROWS_AS(dynsys::apply(SystemDescriptor::manneville_pomeau(0.5), {-0.1, 0}),
                  std::domain_error);
}

TEST_CASE("fixed-point application is exact on rationals") {
  // doubling: 3/10 -> 3/5
  Rat u = Rat::make(3, 10), v{0, 1};
  dynsys::apply_exact(SystemDescriptor::doubling(), u, v);
  CHECK(u.num == 3);
  CHECK(u.den == 5);
  // cat: (1/4, 1/2) -> (0, 3/4)
  Rat a = Rat::make(1, 4), b = Rat::make(1, 2);
  dynsys::apply_exact(SystemDescriptor::cat(), a, b);
  CHECK(a.num == 0);
  CHECK(b.num == 3);
  CHECK(b.den == 4);
}

TEST_CASE("parameter ranges are validated") {
  CHECK_THROWS_AS(SystemDescriptor::manneville_pomeau(1.5), std::invalid_argument);
  CHECK_THROWS_AS(SystemDescriptor::manneville_pomeau(0.0), std::invalid_argument);
  CHECK_THROWS_AS(SystemDescriptor::quadratic(2.5), std::invalid_argument);
  CHECK_THROWS_AS(SystemDescriptor::lozi(1.7, 1.5), std::invalid_argument);
  // tail-class metadata
  const auto mp = SystemDescriptor::manneville_pomeau(0.75);
  CHECK(mp.tail_class == dynsys::TailClass::polynomial);
  CHECK(mp.tail_gamma == Catch::Approx(1.0 / 0.75));
  CHECK(SystemDescriptor::doubling().tail_class == dynsys::TailClass::exponential);
  CHECK(SystemDescriptor::iid_rademacher().tail_class == dynsys::TailClass::iid);
  CHECK_FALSE(SystemDescriptor::henon().theory_note.empty());
}

TEST_CASE("iterate from explicit points") {
  // fixed point of doubling
  const auto zero = dynsys::iterate(SystemDescriptor::doubling(), {0.0, 0}, 3);
  for (const auto& p : zero.points) CHECK(p.x == 0.0);
  // quadratic fixed point at a = 2
  const auto q = dynsys::iterate(SystemDescriptor::quadratic(2.0), {0.5, 0}, 2);
  CHECK(q.points[0].x == Catch::Approx(0.5).margin(1e-12));
  CHECK(q.points[1].x == Catch::Approx(0.5).margin(1e-12));
  CHECK_THROWS_AS(dynsys::iterate(SystemDescriptor::iid_uniform(), {0.5, 0}, 3), std::logic_error);
}

TEST_CASE("doubling orbit of 1/3 alternates forever in fixed point") {
  const auto orbit = dynsys::iterate_exact(SystemDescriptor::doubling(), Rat{1, 3}, 100000);
  for (std::size_t i = 0; i < orbit.size(); ++i) {
    CHECK(orbit[i].den == 3);
    CHECK(orbit[i].num == (i % 2 == 0 ? 1u : 2u));
  }
}

TEST_CASE("sample_initial is deterministic and uniform") {
  const auto sys = SystemDescriptor::doubling();
  const auto a = dynsys::sample_initial(sys, 1000, 42);
  const auto b = dynsys::sample_initial(sys, 1000, 42);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].x == b[i].x);
  CHECK_THROWS_AS(dynsys::sample_initial(sys, 0, 42), std::invalid_argument);

  const auto big = dynsys::sample_initial(sys, 100000, 7);
  double mean = 0.0;
  for (const auto& p : big) mean += p.x;
  mean /= static_cast<double>(big.size());
  CHECK(std::abs(mean - 0.5) < 0.005);  // 3 sigma of the uniform-law moment
}

TEST_CASE("ensembles are reproducible and respect the domain") {
  const auto sys = SystemDescriptor::doubling();
  dynsys::EnsembleSpec spec;
  spec.m = 100;
  spec.n = 10000;
  spec.burn_in = 100;
  spec.seed = 11;
  const auto e1 = dynsys::generate_ensemble(sys, spec);
  const auto e2 = dynsys::generate_ensemble(sys, spec, 4);  // thread-count invariant
  REQUIRE(e1.orbits.size() == e2.orbits.size());
  for (std::size_t i = 0; i < e1.orbits.size(); ++i) {
    REQUIRE(e1.orbits[i].points.size() == e2.orbits[i].points.size());
    for (std::size_t j = 0; j < e1.orbits[i].points.size(); ++j) {
      CHECK(e1.orbits[i].points[j].x == e2.orbits[i].points[j].x);
      CHECK(e1.orbits[i].points[j].x >= 0.0);
      CHECK(e1.orbits[i].points[j].x < 1.0);
    }
  }
}

TEST_CASE("iid kinds emit reproducible sequences") {
  dynsys::EnsembleSpec spec;
  spec.m = 1;
  spec.n = 4;
  spec.burn_in = 0;
  spec.seed = 3;
  const auto sys = SystemDescriptor::iid_rademacher();
  const auto o1 = dynsys::make_orbit(sys, spec, 0);
  const auto o2 = dynsys::make_orbit(sys, spec, 0);
  for (std::size_t j = 0; j < 4; ++j) {
    CHECK(std::abs(o1.points[j].x) == 1.0);
    CHECK(o1.points[j].x == o2.points[j].x);
  }
}

TEST_CASE("henon ensembles flag escaped orbits and keep the rest in the box") {
  dynsys::EnsembleSpec spec;
  spec.m = 400;
  spec.n = 500;
  spec.burn_in = 1000;
  spec.seed = 5;
  const auto ensemble = dynsys::generate_ensemble(SystemDescriptor::henon(), spec);
  std::size_t recorded = 0;
  for (const auto& orbit : ensemble.orbits) {
    if (orbit.escaped) continue;
    ++recorded;
    for (const auto& p : orbit.points) {
      CHECK(std::abs(p.x) <= dynsys::kPlanarBoxHalfWidth);
      CHECK(std::abs(p.y) <= dynsys::kPlanarBoxHalfWidth);
    }
  }
  CHECK(recorded > 0);
}

TEST_CASE("manneville-pomeau preserves the unit interval") {
  prng::Xoshiro256 rng(99);
  for (int trial = 0; trial < 10000; ++trial) {
    const double alpha = 0.05 + 0.95 * rng.uniform();
    const double x = rng.uniform();
    const double y = dynsys::apply(SystemDescriptor::manneville_pomeau(alpha), {x, 0}).x;
    CHECK(y >= 0.0);
    CHECK(y <= 1.0);
  }
}

TEST_CASE("long doubling and cat orbits look Lebesgue-uniform") {
  dynsys::EnsembleSpec spec;
  spec.m = 1;
  spec.n = 1000000;
  spec.burn_in = 1000;
  spec.seed = 17;
  {
    const auto orbit = dynsys::make_orbit(SystemDescriptor::doubling(), spec, 0);
    const auto emp = ergostat::empirical_measure(orbit);
    CHECK(ergostat::ks_distance(emp, ergostat::Uniform01{}) <= 0.01);
  }
  {
    const auto orbit = dynsys::make_orbit(SystemDescriptor::cat(), spec, 0);
    const auto emp = ergostat::empirical_measure(orbit);
    CHECK(ergostat::ks_distance(emp, ergostat::Uniform01{}) <= 0.01);
    std::vector<double> ys;
    ys.reserve(orbit.points.size());
    for (const auto& p : orbit.points) ys.push_back(p.y);
    CHECK(ergostat::ks_distance(ergostat::empirical_measure(ys), ergostat::Uniform01{}) <= 0.01);
  }
}

TEST_CASE("tracing metric uses arc distance on the circle") {
  const auto sys = SystemDescriptor::doubling();
  CHECK(dynsys::tracing_distance(sys, {0.1, 0}, {0.9, 0}) == Catch::Approx(0.2));
  CHECK(dynsys::tracing_distance(sys, {0.2, 0}, {0.4, 0}) == Catch::Approx(0.2));
  const auto cat = SystemDescriptor::cat();
  CHECK(dynsys::tracing_distance(cat, {0.0, 0.0}, {0.5, 0.5}) ==
        Catch::Approx(std::sqrt(0.5)));
}
