#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "gci/bregman.hpp"
#include "gci/cli/reproduce.hpp"
#include "gci/errors.hpp"
#include "support/generators.hpp"

using namespace gci;
using Catch::Approx;

namespace {

std::vector<Generator> families() {
  return {Generator::alpha_entropy(0.5), Generator::alpha_entropy(1.0), Generator::alpha_entropy(2.0),
          Generator::alpha_entropy(3.7), Generator::tsallis(0.5),       Generator::tsallis(2.0),
          Generator::tsallis(3.0),       Generator::renyi(0.2),         Generator::renyi(0.7),
          Generator::shannon()};
}

}  // namespace

TEST_CASE("bregman_divergence examples", "[bregman]") {
  const ProbVector a{0.3, 0.7};
  for (const Generator& g : families()) CHECK(bregman_divergence(g, a, a) == Approx(0.0).margin(1e-15));
  const ProbVector p2{0.6, 0.4};
  const ProbVector p1{0.5, 0.5};
  CHECK(bregman_divergence(Generator::alpha_entropy(1.0), p2, p1) == Approx(0.02013551355068886).epsilon(1e-12));
  CHECK(bregman_divergence(Generator::tsallis(2.0), p2, p1) == Approx(0.02).epsilon(1e-12));
  try {
    bregman_divergence(Generator::shannon(), p1, ProbVector{1.0, 0.0});
    FAIL("expected a singular reference");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SingularReference);
  }
}

TEST_CASE("property: non-negativity and identity of indiscernibles", "[bregman][property]") {
  testing::Rng rng(23);
  for (const Generator& g : families()) {
    for (int trial = 0; trial < 1000; ++trial) {
      const std::size_t n = testing::index_in(rng, 2, 8);
      const ProbVector p2 = testing::random_distribution(rng, n);
      const ProbVector p1 = testing::random_distribution(rng, n, 0.01);
      const double d = bregman_divergence(g, p2, p1);
      REQUIRE(d >= -1e-12);
      REQUIRE(bregman_divergence(g, p1, p1) == Approx(0.0).margin(1e-12));
      double dist = 0.0;
      for (std::size_t j = 0; j < n; ++j) dist = std::max(dist, std::abs(p2[j] - p1[j]));
      if (dist > 1e-3) REQUIRE(d > 0.0);
    }
  }
}

TEST_CASE("property: convexity in the first argument", "[bregman][property]") {
  testing::Rng rng(29);
  for (const Generator& g : families()) {
    for (int trial = 0; trial < 300; ++trial) {
      const std::size_t n = testing::index_in(rng, 2, 6);
      const ProbVector a = testing::random_distribution(rng, n);
      const ProbVector b = testing::random_distribution(rng, n);
      const ProbVector ref = testing::random_distribution(rng, n, 0.05);
      const double lambda = testing::uniform(rng, 0.0, 1.0);
      std::vector<double> mix(n);
      for (std::size_t j = 0; j < n; ++j) mix[j] = lambda * a[j] + (1.0 - lambda) * b[j];
      const double lhs = bregman_divergence(g, validate_distribution(mix), ref);
      const double rhs = lambda * bregman_divergence(g, a, ref) + (1.0 - lambda) * bregman_divergence(g, b, ref);
      REQUIRE(lhs <= rhs + 1e-12 * (1.0 + std::abs(rhs)));
    }
  }
}

TEST_CASE("contractivity_gap examples", "[bregman]") {
  const Generator g = Generator::alpha_entropy(2.0);
  const ProbVector ref{0.2, 0.3, 0.5};
  const ProbVector p{0.6, 0.1, 0.3};
  const DivergenceReport full = contractivity_gap(g, p, ref, ref);
  CHECK(full.gap == Approx(bregman_divergence(g, p, ref)));
  CHECK(full.d_final == Approx(0.0).margin(1e-15));
  const DivergenceReport frozen = contractivity_gap(g, p, p, ref);
  CHECK(frozen.gap == 0.0);
  CHECK(frozen.gap == frozen.d_initial - frozen.d_final);
}

TEST_CASE("property: uniform maps on five levels never break validity", "[bregman][property]") {
  testing::Rng rng(31);
  for (const Generator& g : families()) {
    for (int trial = 0; trial < 500; ++trial) {
      const ProbVector ref = testing::random_distribution(rng, 5, 0.02);
      const ProbVector p = testing::random_distribution(rng, 5);
      std::vector<double> out(5);
      for (std::size_t j = 0; j < 5; ++j) out[j] = 0.5 * p[j] + 0.5 * ref[j];
      REQUIRE(contractivity_gap(g, p, validate_distribution(out), ref).valid());
    }
  }
}

TEST_CASE("property: non-overshooting two-level Gibbs-fixing maps are contractive", "[bregman][property]") {
  testing::Rng rng(37);
  for (int trial = 0; trial < 2000; ++trial) {
    const ProbVector ref = testing::random_distribution(rng, 2, 0.02);
    // Column-stochastic 2x2 with ref fixed: p_f = (1 - y) p + y ref with y = m10 + m01.
    const double m10 = testing::uniform(rng, 0.0, 1.0) * std::min(1.0, ref[1] / ref[0]);
    const double m01 = m10 * ref[0] / ref[1];
    const ProbVector p = testing::random_distribution(rng, 2);
    const ProbVector out = validate_distribution({(1.0 - m10) * p[0] + m01 * p[1], m10 * p[0] + (1.0 - m01) * p[1]});
    REQUIRE(contractivity_gap(Generator::shannon(), p, out, ref).gap >= -1e-12);
    if (m10 + m01 > 1.0) continue;
    for (const Generator& g : families()) REQUIRE(contractivity_gap(g, p, out, ref).gap >= -1e-10);
  }
}

TEST_CASE("overshooting two-level maps can break high-order validity", "[bregman]") {
  // Independent scipy oracle: y = 1.56 > 1 with alpha = 3.7.
  const ProbVector ref{0.3637613583746859, 0.6362386416253141};
  const ProbVector p{0.9326704500189937, 0.06732954998100621};
  const double y = 1.5639907285395693;
  const ProbVector out = validate_distribution({(1 - y) * p[0] + y * ref[0], (1 - y) * p[1] + y * ref[1]});
  CHECK(contractivity_gap(Generator::alpha_entropy(3.7), p, out, ref).gap == Approx(-0.3983659837324929).epsilon(1e-9));
  CHECK(contractivity_gap(Generator::shannon(), p, out, ref).gap >= 0.0);
}

TEST_CASE("divergences are quadratically small", "[bregman]") {
  const ProbVector p{0.2, 0.5, 0.3};
  const std::vector<double> dir{1.0, -2.0, 1.0};
  for (const Generator& g : families()) {
    std::vector<double> eps;
    std::vector<double> d;
    for (double e : {1e-2, 5e-3, 2.5e-3, 1.25e-3}) {
      std::vector<double> q(3);
      for (std::size_t j = 0; j < 3; ++j) q[j] = p[j] - e * dir[j];
      eps.push_back(e);
      d.push_back(bregman_divergence(g, ProbVector(q), p));
    }
    CHECK(cli::log_log_slope(eps, d) == Approx(2.0).margin(0.05));
  }
}

TEST_CASE("isochore identity examples", "[bregman]") {
  testing::Rng rng(41);
  for (double alpha : {1.0, 2.5}) {
    const LevelSystem e = testing::random_levels(rng, 4);
    const ProbVector pi = testing::random_distribution(rng, 4);
    const ProbVector pf = testing::random_distribution(rng, 4);
    CHECK(isochore_identity_residual(alpha, pi, pf, e, 0.7) <= 1e-10);
  }
  const LevelSystem e{-0.5, 0.0, 0.5};
  const ProbVector pf = gibbs_state(e, 1.0 / 3.0).gibbs;
  for (double alpha : {0.5, 1.0, 2.0}) CHECK(isochore_identity_residual(alpha, ProbVector{0.5, 0.5, 0.0}, pf, e, 1.0 / 3.0) <= 1e-8);
}

TEST_CASE("available_work examples", "[bregman]") {
  const ThermalContext c = gibbs_state(LevelSystem{0.0, 1.0}, 1.0);
  CHECK(available_work(2.0, c.gibbs, c) == Approx(0.0).margin(1e-15));
  CHECK(available_work(1.0, ProbVector{1.0, 0.0}, c) == Approx(0.3132616875182228).epsilon(1e-12));
  for (double alpha : {0.5, 1.0, 2.0}) {
    const ProbVector p{0.9, 0.1};
    double last = available_work(alpha, p, c);
    for (int k = 1; k <= 20; ++k) {
      const double y = k / 20.0;
      const ProbVector q{(1 - y) * p[0] + y * c.gibbs[0], (1 - y) * p[1] + y * c.gibbs[1]};
      const double a = available_work(alpha, q, c);
      CHECK(a <= last + 1e-15);
      last = a;
    }
  }
}
