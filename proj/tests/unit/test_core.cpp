#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "gci/core.hpp"
#include "gci/errors.hpp"
#include "gci/format.hpp"
#include "support/generators.hpp"

using namespace gci;
using Catch::Approx;

namespace {

ErrorKind kind_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected gci::Error");
  return ErrorKind::InvalidInput;
}

}  // namespace

TEST_CASE("level systems need two finite levels", "[core]") {
  CHECK(kind_of([] { LevelSystem{1.0}; }) == ErrorKind::InvalidInput);
  CHECK(kind_of([] { LevelSystem{0.0, std::nan("")}; }) == ErrorKind::InvalidInput);
  const LevelSystem e{2.0, -1.0, 0.5};
  CHECK(e.min() == -1.0);
  CHECK(e.max() == 2.0);
  CHECK(e.argmin() == 1);
  CHECK(e.shifted(1.0)[1] == 0.0);
}

TEST_CASE("level schedules interpolate linearly between knots", "[core]") {
  const LevelSchedule s({0.0, 1.0, 3.0}, {LevelSystem{0.0, 1.0}, LevelSystem{0.0, 3.0}, LevelSystem{0.0, 2.0}});
  CHECK(s.at(0.5)[1] == Approx(2.0));
  CHECK(s.at(2.0)[1] == Approx(2.5));
  CHECK(s.at(3.0)[1] == 2.0);
  CHECK_THROWS_AS(LevelSchedule({0.0, 0.0}, {LevelSystem{0.0, 1.0}, LevelSystem{0.0, 2.0}}), Error);
}

TEST_CASE("validate_distribution applies the tolerance policy", "[core]") {
  CHECK(validate_distribution({0.5, 0.5}).values() == std::vector<double>{0.5, 0.5});
  CHECK(kind_of([] { validate_distribution({0.7, 0.4}); }) == ErrorKind::InvalidDistribution);
  CHECK(kind_of([] { validate_distribution({1.5, -0.5}); }) == ErrorKind::InvalidDistribution);
  const ProbVector p = validate_distribution({1.0 + 1e-13, -1e-13});
  CHECK(p[0] == 1.0);
  CHECK(p[1] == 0.0);
}

TEST_CASE("gibbs_state examples", "[core]") {
  SECTION("near-infinite temperature is uniform") {
    const ThermalContext c = gibbs_state(LevelSystem{0.0, 1.0}, 1e-9);
    CHECK(c.gibbs[0] == Approx(0.5).margin(1e-9));
    CHECK(c.gibbs[1] == Approx(0.5).margin(1e-9));
  }
  SECTION("three levels at beta 2") {
    const ThermalContext c = gibbs_state(LevelSystem{0.0, 1.0, 2.0}, 2.0);
    const double z = 1.0 + std::exp(-2.0) + std::exp(-4.0);
    CHECK(c.partition_function == Approx(z).epsilon(1e-14));
    CHECK(c.gibbs[0] == Approx(0.8668).margin(1e-4));
    CHECK(c.gibbs[1] == Approx(0.1173).margin(1e-4));
    CHECK(c.gibbs[2] == Approx(0.01588).margin(1e-5));
  }
  SECTION("symmetric levels at T = 3") {
    const ThermalContext c = gibbs_state(LevelSystem{-0.5, 0.0, 0.5}, 1.0 / 3.0);
    CHECK(c.gibbs[0] == Approx(0.3902).margin(1e-4));
    CHECK(c.gibbs[1] == Approx(0.3303).margin(1e-4));
    CHECK(c.gibbs[2] == Approx(0.2796).margin(1e-4));
    CHECK(c.free_energy == Approx(-3.323550600161316).epsilon(1e-13));
  }
  SECTION("inadmissible beta") {
    CHECK_THROWS_AS(gibbs_state(LevelSystem{0.0, 1.0}, 0.0), Error);
    CHECK_THROWS_AS(gibbs_state(LevelSystem{0.0, 1.0}, -1.0), Error);
  }
}

TEST_CASE("shifted_moment examples", "[core]") {
  const LevelSystem e{0.0, 1.0};
  const ThermalContext c = gibbs_state(e, 1.0);
  CHECK(c.free_energy == Approx(-0.3132616875182228).epsilon(1e-14));
  CHECK(shifted_moment(ProbVector{0.3, 0.7}, c, 0.0) == 1.0);
  CHECK(shifted_moment(c.gibbs, c, 1.0) == Approx(0.5822031088882180).epsilon(1e-13));
  CHECK(shifted_moment(ProbVector{1.0, 0.0}, c, 2.0) == Approx(0.09813288486676469).epsilon(1e-13));
}

TEST_CASE("signed_power rejects fractional powers of negatives", "[core]") {
  CHECK(signed_power(-2.0, 3.0, "t") == -8.0);
  CHECK(kind_of([] { signed_power(-2.0, 0.5, "t"); }) == ErrorKind::Domain);
}

TEST_CASE("property: F <= E_min and shifts are invariant", "[core][property]") {
  testing::Rng rng(101);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = testing::index_in(rng, 2, 8);
    const LevelSystem e = testing::random_levels(rng, n, -3.0, 3.0);
    const double beta = std::exp(testing::uniform(rng, std::log(1e-3), std::log(1e3)));
    const double shift = testing::uniform(rng, -50.0, 50.0);
    const ThermalContext c = gibbs_state(e, beta);
    const ThermalContext cs = gibbs_state(e.shifted(shift), beta);
    REQUIRE(c.free_energy <= e.min() + 1e-12 * std::max(1.0, std::abs(e.min())));
    const ProbVector p = testing::random_distribution(rng, n);
    for (std::size_t j = 0; j < n; ++j) {
      REQUIRE(c.shifted_energies[j] >= 0.0);
      REQUIRE(std::abs(c.shifted_energies[j] - cs.shifted_energies[j]) <= 1e-9 * (1.0 + std::abs(shift)));
    }
    for (double alpha : {0.5, 1.0, 2.0, 3.7}) {
      const double h = shifted_moment(p, c, alpha);
      REQUIRE(std::abs(h - shifted_moment(p, cs, alpha)) <= 1e-8 * (1.0 + std::abs(h)) * (1.0 + std::abs(shift)));
    }
    double mean = 0.0;
    for (std::size_t j = 0; j < n; ++j) mean += p[j] * e[j];
    REQUIRE(shifted_moment(p, c, 1.0) == Approx(mean - c.free_energy).epsilon(1e-12).margin(1e-12));
    double total = 0.0;
    for (double g : c.gibbs.values()) total += g;
    REQUIRE(std::abs(total - 1.0) <= 1e-12);
  }
}

TEST_CASE("bath sets validate manifolds", "[core]") {
  CHECK_NOTHROW(validate_baths({{1.0, {}}}, 3));
  CHECK_NOTHROW(validate_baths({{1.0, {0, 1}}, {2.0, {1, 2}}}, 3));
  CHECK_THROWS_AS(validate_baths({{1.0, {0, 1}}}, 3), Error);                    // level 2 uncovered
  CHECK_THROWS_AS(validate_baths({{1.0, {0, 1, 2}}, {2.0, {1, 2}}}, 3), Error);  // two shared states
  CHECK_THROWS_AS(validate_baths({{1.0, {0, 5}}, {1.0, {1, 2}}}, 3), Error);
  CHECK_THROWS_AS(validate_baths({{0.0, {}}}, 3), Error);
}

TEST_CASE("reference state of two baths sharing a level", "[core]") {
  const LevelSystem e{0.0, 1.0, 3.0};
  const ReferenceState r = reference_state(e, {{1.0, {0, 1}}, {0.5, {1, 2}}}, ProbVector{1.0 / 3, 1.0 / 3, 1.0 / 3});
  // Detailed balance inside each manifold at its own temperature.
  CHECK(r.p[1] / r.p[0] == Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(r.p[2] / r.p[1] == Approx(std::exp(-0.5 * 2.0)).epsilon(1e-12));
  CHECK(r.level_bath == std::vector<std::size_t>{0, 0, 1});
}

TEST_CASE("bath schedules are contiguous", "[core]") {
  const BathSchedule s({{0.0, 1.0, {{1.0, {}}}}, {1.0, 2.0, {{2.0, {}}}}}, 2);
  CHECK(s.at(0.5).front().beta == 1.0);
  CHECK(s.at(1.5).front().beta == 2.0);
  CHECK_THROWS_AS(BathSchedule({{0.0, 1.0, {{1.0, {}}}}, {1.5, 2.0, {{2.0, {}}}}}, 2), Error);
}

TEST_CASE("compensated sum and number formatting", "[core]") {
  const std::vector<double> v{1.0, 1e100, 1.0, -1e100};
  CHECK(sum_of(v) == 2.0);
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(-0.0) == "0");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(format_double(std::nan("")) == "nan");
}
