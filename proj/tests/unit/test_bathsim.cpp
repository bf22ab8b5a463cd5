#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "gci/accounting.hpp"
#include "gci/bathsim.hpp"
#include "gci/errors.hpp"
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

// Direct oracle: <(H_p - f)^alpha> of one particle from its diagonal marginal.
double moment(const CompositeSystem& comp, const DensityMatrix& joint, std::size_t particle, double f, double alpha) {
  const ProbVector p = particle_populations(comp, joint, particle);
  const LevelSystem& e = particle_levels(comp, particle);
  double m = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) m += p[j] * std::pow(e[j] - f, alpha);
  return m;
}

}  // namespace

TEST_CASE("flip-flop Hamiltonian of two resonant qubits", "[bathsim]") {
  const CompositeSystem comp{LevelSystem{0.0, 1.0}, {LevelSystem{0.0, 1.0}}};
  const CMatrix h = flip_flop_hamiltonian(comp);
  REQUIRE(h.rows() == 4);
  // Basis |s b>: index 2 s + b; |eg> = 2 and |ge> = 1.
  for (Eigen::Index i = 0; i < 4; ++i) {
    for (Eigen::Index j = 0; j < 4; ++j) {
      const bool pair = (i == 1 && j == 2) || (i == 2 && j == 1);
      CHECK(std::abs(h(i, j)) == (pair ? 1.0 : 0.0));
    }
  }
}

TEST_CASE("mismatched gaps produce no coupling", "[bathsim]") {
  const CompositeSystem comp{LevelSystem{0.0, 1.0}, {LevelSystem{0.0, 1.5}}};
  CHECK(testing::max_abs(flip_flop_hamiltonian(comp)) == 0.0);
}

TEST_CASE("construction and size limits", "[bathsim]") {
  const LevelSystem q{0.0, 1.0};
  const LevelSystem t{0.0, 1.0, 3.0};
  CHECK(joint_dimension(CompositeSystem{q, {q, q, q, q, q}}) == 64);
  CHECK(kind_of([&] { joint_dimension(CompositeSystem{t, {t, t, t}}); }) == ErrorKind::Size);
  CHECK(kind_of([&] { joint_dimension(CompositeSystem{LevelSystem{0.0, 1.0, 2.0}, {q}}); }) == ErrorKind::Construction);
  // Same gap, shifted levels: resonant but not energy conserving in the alpha moments.
  CHECK(kind_of([&] { flip_flop_hamiltonian(CompositeSystem{q, {LevelSystem{0.5, 1.5}}}); }) == ErrorKind::Construction);
  CHECK(bonds(CompositeSystem{q, {q, q}, Topology::Collision}) == std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {0, 2}});
  CHECK(bonds(CompositeSystem{q, {q, q}, Topology::Chain}) == std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {1, 2}});
  CHECK(bonds(CompositeSystem{q, {q, q}, Topology::AllToAll}).size() == 3);
}

TEST_CASE("property: the interaction commutes with the bare Hamiltonian", "[bathsim][property]") {
  testing::Rng rng(113);
  const std::vector<LevelSystem> species{LevelSystem{0.0, 1.0}, LevelSystem{0.0, 1.0, 2.5}, LevelSystem{0.0, 2.5}};
  for (int trial = 0; trial < 200; ++trial) {
    CompositeSystem comp{species[testing::index_in(rng, 0, 2)], {}};
    std::size_t dim = comp.system.size();
    for (std::size_t k = 0; k < 3; ++k) {
      const LevelSystem& b = species[testing::index_in(rng, 0, 2)];
      if (dim * b.size() > kMaxJointDimension) break;
      comp.bath.push_back(b);
      dim *= b.size();
    }
    comp.topology = static_cast<Topology>(testing::index_in(rng, 0, 2));
    comp.coupling = testing::uniform(rng, 0.1, 2.0);
    const CMatrix h0 = bare_hamiltonian(comp);
    const CMatrix hi = flip_flop_hamiltonian(comp);
    REQUIRE(hermiticity_defect(hi) == 0.0);
    REQUIRE(testing::max_abs(h0 * hi - hi * h0) <= 1e-12);
  }
}

TEST_CASE("evolve_and_account examples", "[bathsim]") {
  const LevelSystem q{0.0, 1.0};
  const CompositeSystem comp{q, {q}};
  const DensityMatrix rho_s = DensityMatrix::diagonal(ProbVector{0.1, 0.9});
  const double beta = 1.0;
  const double f = gibbs_state(q, beta).free_energy;
  const DensityMatrix init = product_thermal_state(comp, rho_s, beta);

  const EvolutionReport zero = evolve_and_account(comp, init, 0.0, 2.0, f);
  CHECK(zero.exchange.q_sys == Approx(0.0).margin(1e-14));
  CHECK(zero.exchange.q_bath == Approx(0.0).margin(1e-14));

  // Full swap at c t = pi / 2.
  for (double alpha : {1.0, 2.0, 3.0}) {
    const EvolutionReport r = evolve_and_account(comp, init, M_PI / 2.0, alpha, f);
    const double qs = moment(comp, r.final_state, 0, f, alpha) - moment(comp, init, 0, f, alpha);
    const double qb = moment(comp, r.final_state, 1, f, alpha) - moment(comp, init, 1, f, alpha);
    CHECK(r.exchange.q_sys == Approx(qs).margin(1e-12));
    CHECK(r.exchange.q_bath == Approx(qb).margin(1e-12));
    CHECK(qs == Approx(-qb).margin(1e-12));
    CHECK(std::abs(qs) > 1e-3);
    CHECK(r.exchange.residual <= 1e-12);
  }
  const ProbVector swapped = particle_populations(comp, evolve(comp, init, M_PI / 2.0), 0);
  CHECK(swapped[0] == Approx(gibbs_state(q, beta).gibbs[0]).epsilon(1e-12));
}

TEST_CASE("Tsallis exchange with mismatched free energies", "[bathsim]") {
  const LevelSystem q{0.0, 1.0};
  const CompositeSystem comp{q, {q}};
  const double beta = 0.8;
  const DensityMatrix init = product_thermal_state(comp, DensityMatrix::diagonal(ProbVector{0.3, 0.7}), beta);
  const DensityMatrix out = evolve(comp, init, 0.6);
  for (double a : {0.5, 1.0, 2.0, 3.0}) {
    const TsallisExchange x = tsallis_exchange(comp, init, out, beta, a, -0.2, 0.35);
    CHECK(x.factor == Approx(-std::exp(-(a - 1.0) * beta * (-0.2 - 0.35))).epsilon(1e-14));
    CHECK(x.q_bath == Approx(x.factor * x.q_sys).margin(1e-12));
    CHECK(x.residual <= 1e-12);
  }
}

TEST_CASE("bath degradation report", "[bathsim]") {
  const LevelSystem t{0.0, 1.0, 2.5};
  const CompositeSystem comp{t, {t}};
  const double beta = 1.2;
  const double f = gibbs_state(t, beta).free_energy;
  const std::vector<double> alphas{0.5, 1.0, 2.0, 3.0};
  const DensityMatrix init = product_thermal_state(comp, DensityMatrix::diagonal(ProbVector{0.1, 0.1, 0.8}), beta);

  const DegradationReport fresh = bath_degradation_report(comp, init, 1, f, alphas);
  for (const ImpliedBeta& e : fresh.entries) {
    REQUIRE(e.beta.has_value());
    CHECK(*e.beta == Approx(beta).margin(1e-8));
  }

  const DegradationReport used = bath_degradation_report(comp, evolve(comp, init, 0.3), 1, f, alphas);
  CHECK(used.spread > 0.0);
  for (const ImpliedBeta& e : used.entries) {
    if (!e.beta) continue;
    // The implied beta reproduces the measured moment.
    const ThermalContext c = gibbs_state(t, *e.beta);
    double m = 0.0;
    for (std::size_t j = 0; j < 3; ++j) m += c.gibbs[j] * std::pow(t[j] - f, e.alpha);
    CHECK(m == Approx(e.moment).epsilon(1e-8));
  }

  // Longer contact inverts the bath particle: its moments lie beyond any beta >= 0.
  for (const ImpliedBeta& e : bath_degradation_report(comp, evolve(comp, init, 0.9), 1, f, alphas).entries) {
    CHECK_FALSE(e.beta.has_value());
  }

  const DensityMatrix hot = product_thermal_state(comp, DensityMatrix::diagonal(ProbVector{0.2, 0.3, 0.5}), 1e-12);
  for (const ImpliedBeta& e : bath_degradation_report(comp, hot, 1, f, alphas).entries) {
    REQUIRE(e.beta.has_value());
    CHECK(*e.beta == Approx(0.0).margin(1e-8));
  }
}

TEST_CASE("work repository relation", "[bathsim]") {
  CHECK(work_repository_relation(0.0, 1.0, -0.3, 1.0, 0.42) == Approx(0.42).epsilon(1e-15));
  for (double alpha : {0.5, 2.0, 3.0}) {
    const double f = -1e3;
    const double w = work_repository_relation(0.3, 1.0, f, alpha, 1.0);
    const double approx = std::pow(-f, 1.0 - alpha) / alpha;
    CHECK(std::abs(w / approx - 1.0) <= 0.01);
  }
  CHECK(work_repository_relation(0.0, 1.0, -0.5, 2.0, 1.0) == Approx(conversion_factor(1.0, 0.5, 1.5, 2.0)).epsilon(1e-15));
  CHECK_THROWS_AS(work_repository_relation(1.0, 1.0, -0.5, 2.0, 1.0), Error);
}
