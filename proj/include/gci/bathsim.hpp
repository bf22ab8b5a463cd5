#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "gci/core.hpp"
#include "gci/linalg.hpp"
#include "gci/quantum.hpp"

namespace gci {

// Collision: the system meets bath particle k alone during window k.
// Chain: bonds (0,1), (1,2), ... evolve jointly. AllToAll: every pair evolves jointly.
enum class Topology { Collision, Chain, AllToAll };

constexpr std::size_t kMaxJointDimension = 64;

// Particle 0 is the system and the leading tensor factor; particle k >= 1 is bath particle k-1.
struct CompositeSystem {
  LevelSystem system;
  std::vector<LevelSystem> bath;
  Topology topology = Topology::Collision;
  double coupling = 1.0;
  // Per-bond coefficients keyed by particle index pair (j < k); others use `coupling`.
  std::map<std::pair<std::size_t, std::size_t>, double> bond_coupling = {};
};

// Throws Size beyond 64 joint states and Construction when a particle has two equal gaps.
std::size_t joint_dimension(const CompositeSystem& comp);
std::size_t particle_count(const CompositeSystem& comp);
const LevelSystem& particle_levels(const CompositeSystem& comp, std::size_t particle);

// Coupled particle pairs, in evolution order.
std::vector<std::pair<std::size_t, std::size_t>> bonds(const CompositeSystem& comp);

// H_s (x) I + sum_k I (x) H_{b,k}, diagonal.
CMatrix bare_hamiltonian(const CompositeSystem& comp);
// Sum over the given bonds of c (|a><b|_j |b><a|_k + h.c.), over transitions a<b whose absolute
// energies coincide in both particles; all bonds of the topology when `only` is empty.
CMatrix flip_flop_hamiltonian(const CompositeSystem& comp,
                              const std::vector<std::pair<std::size_t, std::size_t>>& only = {});
CMatrix total_hamiltonian(const CompositeSystem& comp);

// rho_s (x) gibbs(b_1, beta_bath) (x) ...
DensityMatrix product_thermal_state(const CompositeSystem& comp, const DensityMatrix& rho_s,
                                    double beta_bath);

// Evolves for time t per window (Collision) or jointly (Chain, AllToAll).
DensityMatrix evolve(const CompositeSystem& comp, const DensityMatrix& joint, double t);

// Diagonal marginal of one particle.
ProbVector particle_populations(const CompositeSystem& comp, const DensityMatrix& joint,
                                std::size_t particle);

struct AlphaExchange {
  double q_sys;   // change of <(H_s - F)^alpha>
  double q_bath;  // sum over bath particles of the change of <(H_b - F)^alpha>
  double residual;  // |q_sys + q_bath|
};

AlphaExchange alpha_exchange(const CompositeSystem& comp, const DensityMatrix& initial,
                             const DensityMatrix& final_state, double f_shift, double alpha);

struct EvolutionReport {
  DensityMatrix final_state;
  AlphaExchange exchange;
};

EvolutionReport evolve_and_account(const CompositeSystem& comp, const DensityMatrix& initial,
                                   double t, double alpha, double f_shift);

struct TsallisExchange {
  double q_sys;
  double q_bath;
  // -e^{-(a-1) beta (F_sys - F_b)}; q_bath = factor q_sys.
  double factor;
  double residual;  // |q_bath - factor q_sys|
};

// Q = -a/(a-1) d<e^{-(a-1) beta (H - F)}>, and beta d<H - F> at a = 1.
TsallisExchange tsallis_exchange(const CompositeSystem& comp, const DensityMatrix& initial,
                                 const DensityMatrix& final_state, double beta, double alpha_tilde,
                                 double f_sys, double f_bath);

struct ImpliedBeta {
  double alpha;
  double moment;
  std::optional<double> beta;  // empty when the moment lies outside the thermal range
};

struct DegradationReport {
  std::vector<ImpliedBeta> entries;
  double spread;  // max - min over the solved entries
};

// For each alpha, the beta' at which gibbs(b, beta') reproduces <(H_b - F_sys)^alpha> of the given
// bath particle; beta' searched on [0, beta_max].
DegradationReport bath_degradation_report(const CompositeSystem& comp, const DensityMatrix& joint,
                                          std::size_t bath_particle, double f_sys,
                                          const std::vector<double>& alphas,
                                          double beta_max = 1e3);

// W = (E_l - E_k) / ((E_l - F)^alpha - (E_k - F)^alpha) W_alpha.
double work_repository_relation(double e_k, double e_l, double f, double alpha, double w_alpha);

}  // namespace gci
