// Acceptance runner: `acceptance [N ...]` evaluates the listed criteria (all twelve when none are
// given), prints one PASS/FAIL line per criterion and exits nonzero if any of them failed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "gci/bathsim.hpp"
#include "gci/bregman.hpp"
#include "gci/cli/reproduce.hpp"
#include "gci/entropy.hpp"
#include "gci/format.hpp"
#include "gci/protocols.hpp"
#include "gci/quantum.hpp"
#include "support/generators.hpp"

using namespace gci;
namespace t = gci::testing;

namespace {

struct Verdict {
  bool passed;
  std::string detail;
};

std::string f(double x) { return format_double(x); }

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// A reproduce target plus a wall-clock budget; failing sub-checks are listed by name.
Verdict from_report(cli::Target target, double budget) {
  const auto start = std::chrono::steady_clock::now();
  const cli::Report r = cli::reproduce(target);
  const double elapsed = seconds_since(start);
  std::ostringstream os;
  std::vector<std::string> failed;
  for (const auto& c : r.checks) {
    if (!c.passed) failed.push_back(c.name + " (" + c.detail + ")");
  }
  os << r.checks.size() - failed.size() << "/" << r.checks.size() << " checks, " << f(std::round(elapsed * 1e3) / 1e3)
     << " s of " << f(budget) << " s";
  for (const auto& s : failed) os << "; failed " << s;
  for (const auto& n : r.notes) os << "; " << n;
  return {failed.empty() && elapsed < budget, os.str()};
}

Verdict half_zero() { return from_report(cli::Target::HalfZero, 1.0); }
Verdict otto_bounds() { return from_report(cli::Target::Fig3, 5.0); }
Verdict high_t() { return from_report(cli::Target::Fig2, 1.0); }
Verdict qutrit() { return from_report(cli::Target::Qutrit, 1.0); }
Verdict staircase() { return from_report(cli::Target::IsothermConvergence, 10.0); }

Verdict isochore_identity() {
  t::Rng rng(5005);
  const std::vector<double> alphas{0.3, 1.0, 2.0, 3.7};
  double worst = 0.0;
  long draws = 0;
  for (int i = 0; i < 10000; ++i) {
    const std::size_t n = t::index_in(rng, 2, 8);
    const double alpha = alphas[static_cast<std::size_t>(i) % alphas.size()];
    const LevelSystem e = t::random_levels(rng, n, -1.0, 3.0);
    // Redraw beta until the Gibbs reference clears the divergence floor; below it the
    // identity is undefined and the operation propagates SingularReference by contract.
    double beta = 0.0;
    double floor = 0.0;
    do {
      beta = std::exp(t::uniform(rng, std::log(0.1), std::log(10.0)));
      const ProbVector ref = gibbs_state(e, beta).gibbs;
      floor = *std::min_element(ref.values().begin(), ref.values().end());
      ++draws;
    } while (floor < 1e-12);
    const ProbVector pi = t::random_distribution(rng, n);
    const ProbVector pf = t::random_distribution(rng, n);
    worst = std::max(worst, isochore_identity_residual(alpha, pi, pf, e, beta));
  }
  return {worst <= 1e-10, "max residual " + f(worst) + " over 10000 instances (tolerance 1e-10); " +
                              std::to_string(draws - 10000) + " beta redraws for a reference below 1e-12"};
}

Verdict reductions() {
  t::Rng rng(6006);
  double ent = 0.0;
  double kl = 0.0;
  double euc = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = t::index_in(rng, 2, 8);
    const ProbVector p = t::random_distribution(rng, n);
    const ProbVector q = t::random_distribution(rng, n, 0.01);
    double shannon = 0.0;
    double kl_direct = 0.0;
    double sq = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (p[j] > 0.0) {
        shannon -= p[j] * std::log(p[j]);
        kl_direct += p[j] * std::log(p[j] / q[j]);
      }
      sq += (p[j] - q[j]) * (p[j] - q[j]);
    }
    ent = std::max(ent, std::abs(entropy_value(Generator::alpha_entropy(1.0), p) - shannon));
    kl = std::max(kl, std::abs(bregman_divergence(Generator::alpha_entropy(1.0), p, q) - kl_direct));
    euc = std::max(euc, std::abs(bregman_divergence(Generator::tsallis(2.0), p, q) - sq));
  }
  const double worst = std::max({ent, kl, euc});
  return {worst <= 1e-10, "max |S_1 - Shannon| " + f(ent) + ", |D_1 - KL| " + f(kl) + ", |D_T2 - |dp|^2| " + f(euc) +
                              " over 1000 instances (tolerance 1e-10)"};
}

// Every entry at least 0.05, so the reshaped levels -T ln p stay moderate.
ProbVector endpoint(t::Rng& rng, std::size_t n) {
  const ProbVector d = t::random_distribution(rng, n);
  std::vector<double> p(n);
  for (std::size_t j = 0; j < n; ++j) p[j] = 0.05 + (1.0 - 0.05 * static_cast<double>(n)) * d[j];
  return validate_distribution(std::move(p));
}

Verdict reversible_preparation_check() {
  t::Rng rng(8008);
  double worst = 0.0;
  for (int pair = 0; pair < 20; ++pair) {
    const std::size_t n = t::index_in(rng, 2, 4);
    const ProbVector pi = endpoint(rng, n);
    const ProbVector pf = endpoint(rng, n);
    const LevelSystem hi = t::random_levels(rng, n);
    const LevelSystem hf = t::random_levels(rng, n);
    const double temp = t::uniform(rng, 0.5, 2.0);
    for (double alpha : {1.0, 2.0}) {
      const PreparationResult r = reversible_preparation(pi, hi, pf, hf, temp, alpha, 10000);
      worst = std::max(worst, std::abs(r.work - r.closed_form));
    }
  }
  return {worst <= 1e-3, "max |W - closed form| " + f(worst) + " over 20 pairs x alpha {1, 2} at N = 10000 (tolerance 1e-3)"};
}

Verdict quantum_decomposition() {
  t::Rng rng(9009);
  const std::vector<Generator> gens{Generator::alpha_entropy(0.5), Generator::alpha_entropy(1.0), Generator::alpha_entropy(2.0),
                                    Generator::tsallis(2.0), Generator::shannon()};
  double decomposition = 0.0;
  double invariance = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const DensityMatrix rho(t::random_density(rng, 3, 0.02));
    const DensityMatrix lambda = DensityMatrix::diagonal(t::random_distribution(rng, 3, 0.05));
    const CMatrix u = t::random_unitary(rng, 3);
    const Generator& g = gens[static_cast<std::size_t>(i) % gens.size()];
    const double d = matrix_bregman(g, rho, lambda) - matrix_bregman(g, rho.dephased(), lambda) - coherence_measure(g, rho);
    decomposition = std::max(decomposition, std::abs(d));
    invariance = std::max(invariance, std::abs(matrix_entropy(g, rho.evolved(u)) - matrix_entropy(g, rho)));
  }
  return {std::max(decomposition, invariance) <= 1e-10,
          "max decomposition residual " + f(decomposition) + ", max unitary-invariance residual " + f(invariance) +
              " over 1000 qutrits (tolerance 1e-10)"};
}

Verdict collision_conservation() {
  t::Rng rng(10010);
  const LevelSystem q{0.0, 1.0};
  std::vector<CompositeSystem> setups;
  for (Topology top : {Topology::Collision, Topology::Chain, Topology::AllToAll}) {
    setups.push_back(CompositeSystem{q, {q}, top, 0.8});
    setups.push_back(CompositeSystem{q, {q, q}, top, 0.8});
  }
  double drift = 0.0;
  std::size_t runs = 0;
  for (const CompositeSystem& comp : setups) {
    for (int trial = 0; trial < 5; ++trial) {
      const double beta = t::uniform(rng, 0.3, 3.0);
      const double f_sys = gibbs_state(q, beta).free_energy;
      const DensityMatrix init = product_thermal_state(comp, DensityMatrix(t::random_density(rng, 2, 0.0)), beta);
      for (double time : {0.3, 1.1, 2.7, 7.9}) {
        const DensityMatrix out = evolve(comp, init, time);
        for (double alpha : {0.5, 1.0, 2.0, 3.0}) {
          drift = std::max(drift, alpha_exchange(comp, init, out, f_sys, alpha).residual);
          ++runs;
        }
      }
    }
  }
  return {drift <= 1e-9, "max |Q_sys + Q_bath| " + f(drift) + " over " + std::to_string(runs) +
                             " evolutions (qubit + 1 and 2 qubits, three topologies; tolerance 1e-9)"};
}

Verdict validity() {
  t::Rng rng(11011);
  const std::vector<Generator> gens{Generator::alpha_entropy(0.3), Generator::alpha_entropy(1.0), Generator::alpha_entropy(2.0),
                                    Generator::alpha_entropy(3.7), Generator::tsallis(0.5),       Generator::tsallis(2.0),
                                    Generator::tsallis(3.0),       Generator::renyi(0.2),         Generator::renyi(0.7),
                                    Generator::shannon()};
  double two_level = 0.0;
  double non_overshoot = 0.0;
  double uniform = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const LevelSystem e = t::random_levels(rng, 2);
    const ProbVector ref = gibbs_state(e, t::uniform(rng, 0.2, 3.0)).gibbs;
    const double m10 = t::uniform(rng, 0.0, 1.0) * std::min(1.0, ref[1] / ref[0]);
    const double m01 = m10 * ref[0] / ref[1];
    const ProbVector p = t::random_distribution(rng, 2);
    const ProbVector out = validate_distribution({(1.0 - m10) * p[0] + m01 * p[1], m10 * p[0] + (1.0 - m01) * p[1]});
    for (const Generator& g : gens) {
      const double gap = contractivity_gap(g, p, out, ref).gap;
      two_level = std::min(two_level, gap);
      if (m10 + m01 <= 1.0) non_overshoot = std::min(non_overshoot, gap);
    }
  }
  for (int i = 0; i < 10000; ++i) {
    const std::size_t n = t::index_in(rng, 2, 8);
    const ProbVector ref = gibbs_state(t::random_levels(rng, n), t::uniform(rng, 0.2, 3.0)).gibbs;
    const ProbVector p = t::random_distribution(rng, n);
    const double y = t::uniform(rng, 0.0, 1.0);
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) out[j] = (1.0 - y) * p[j] + y * ref[j];
    const ProbVector pf = validate_distribution(out);
    for (const Generator& g : gens) uniform = std::min(uniform, contractivity_gap(g, p, pf, ref).gap);
  }
  return {std::min(two_level, uniform) >= -1e-10, "min gap " + f(two_level) + " (two-level maps), " + f(non_overshoot) + " (two-level, y <= 1), " + f(uniform) +
                                                      " (uniform maps) over 10000 instances each, 10 generators"};
}

// Residuals of the exact hot-isochore quantities against the shared leading term while alpha and
// |dp| are halved together.
Verdict low_t() {
  const ProbVector ph{0.5, 0.3, 0.2};
  const std::vector<double> dir{1.0, -2.0, 1.0};
  bool equal = true;
  std::vector<double> exponents;
  double last = 0.0;
  for (int k = 0; k < 5; ++k) {
    const double scale = std::ldexp(1.0, -k);
    const double alpha = 0.2 * scale;
    std::vector<double> dp(3);
    for (std::size_t j = 0; j < 3; ++j) dp[j] = 0.02 * scale * dir[j];
    const LowTTerms lead = low_T_expansion(ph, dp, alpha);
    const LowTTerms exact = low_T_exact(ph, dp, alpha);
    equal = equal && lead.delta_s == lead.beta_q;
    const double r = std::max(std::abs(exact.delta_s - lead.delta_s), std::abs(exact.beta_q - lead.beta_q));
    if (k > 0) exponents.push_back(std::log2(last / r));
    last = r;
  }
  double mean = 0.0;
  for (double x : exponents) mean += x / static_cast<double>(exponents.size());
  std::string list;
  for (double x : exponents) list += (list.empty() ? "" : ", ") + f(std::round(x * 1e4) / 1e4);
  return {equal && std::abs(mean - 2.0) <= 0.3, std::string("leading terms ") + (equal ? "identical" : "differ") +
                                                    "; residual exponent per halving " + list + " (mean " +
                                                    f(std::round(mean * 1e4) / 1e4) + ", expected 2 +/- 0.3)"};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Verdict()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {1, "half-zero machine", half_zero},
      {2, "otto bounds", otto_bounds},
      {3, "high-T Tsallis bound", high_t},
      {4, "qutrit coherence extraction", qutrit},
      {5, "isochore identity", isochore_identity},
      {6, "reductions", reductions},
      {7, "staircase isotherm", staircase},
      {8, "reversible preparation", reversible_preparation_check},
      {9, "quantum decomposition", quantum_decomposition},
      {10, "collision conservation", collision_conservation},
      {11, "validity regimes", validity},
      {12, "low-T expansion", low_t},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) {
    char* end = nullptr;
    const long id = std::strtol(argv[i], &end, 10);
    if (*end != '\0' || id < 1 || id > 12) {
      std::cerr << "usage: acceptance [criterion 1-12 ...]\n";
      return 2;
    }
    wanted.push_back(static_cast<int>(id));
  }
  bool all_passed = true;
  for (const Criterion& c : criteria()) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
    Verdict v{false, ""};
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    all_passed = all_passed && v.passed;
    std::cout << (v.passed ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << "): " << v.detail << std::endl;
  }
  return all_passed ? 0 : 1;
}
