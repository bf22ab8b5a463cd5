#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gci/bregman.hpp"
#include "gci/core.hpp"
#include "gci/entropy.hpp"

namespace gci {

enum class SegmentType { Isochore, Adiabat, Isotherm };

// Isochore: levels and baths frozen, populations move (heat only).
// Adiabat: populations frozen, levels and/or reference temperature move (work only).
// Driven: both move; integrated by trapezoid with a Richardson error estimate.
enum class IntervalKind { Isochore, Adiabat, Driven };

const char* to_string(SegmentType type);

// The bath set of a sample fixes the F shifts; whether heat flows is decided by the interval kind.
struct RecordSample {
  double t;
  ProbVector p;
  LevelSystem levels;
  BathSet baths;
};

struct StepMeta {
  SegmentType type;
  std::string tag;
  std::size_t first_interval;
  std::size_t end_interval;
  std::optional<DivergenceReport> gap;
};

class ProcessRecord {
 public:
  explicit ProcessRecord(RecordSample initial);

  // Opens a step; subsequent intervals belong to it until the next call.
  std::size_t begin_step(SegmentType type, std::string tag = {});
  void append(IntervalKind kind, RecordSample next);
  void set_step_gap(std::size_t step, DivergenceReport gap);
  // Replaces the reference baths of the final sample; allowed only after an adiabat interval,
  // where the F jump is accounted as work of that interval.
  void retarget_last(BathSet baths);

  std::size_t size() const noexcept { return samples_.size(); }
  std::size_t levels() const noexcept { return samples_.front().p.size(); }
  const RecordSample& sample(std::size_t i) const { return samples_[i]; }
  const ReferenceState& reference(std::size_t i) const { return refs_[i]; }
  const RecordSample& front() const { return samples_.front(); }
  const RecordSample& back() const { return samples_.back(); }
  IntervalKind interval_kind(std::size_t i) const { return kinds_[i]; }
  std::size_t intervals() const noexcept { return kinds_.size(); }
  std::size_t interval_step(std::size_t i) const { return interval_steps_[i]; }
  const std::vector<StepMeta>& steps() const noexcept { return steps_; }
  std::size_t bath_count() const noexcept { return bath_count_; }

 private:
  std::vector<RecordSample> samples_;
  std::vector<ReferenceState> refs_;
  std::vector<IntervalKind> kinds_;
  std::vector<std::size_t> interval_steps_;
  std::vector<StepMeta> steps_;
  std::size_t bath_count_ = 0;
};

struct IntegrationOptions {
  // Relative budget for the Richardson estimate on driven intervals.
  double tolerance = 1e-8;
};

struct Ledger {
  std::vector<double> heat_by_bath;  // indexed by position in the sample's bath set
  double heat;
  double work;
  double delta_h;
  double delta_s;
  double clausius_lhs;

  double first_law_residual() const { return delta_h - heat - work; }
};

std::vector<double> alpha_heat(const ProcessRecord& rec, double alpha,
                               const IntegrationOptions& opts = {});
double alpha_work(const ProcessRecord& rec, double alpha, const IntegrationOptions& opts = {});
Ledger ledger(const ProcessRecord& rec, double alpha, const IntegrationOptions& opts = {});

struct StepFlows {
  double heat;
  double work;
};
std::vector<StepFlows> step_flows(const ProcessRecord& rec, double alpha,
                                  const IntegrationOptions& opts = {});
// Sums of step flows grouped by step tag.
std::map<std::string, StepFlows> flows_by_tag(const ProcessRecord& rec, double alpha,
                                              const IntegrationOptions& opts = {});

// dS - int dp . g(p_ref): for AlphaEntropy this is dS_alpha - sum_k int beta_k^alpha dQ_{k,alpha};
// Tsallis and Renyi use their heats, Shannon uses beta Q.
double clausius_lhs(const ProcessRecord& rec, const Generator& gen,
                    const IntegrationOptions& opts = {});
// The heat term paired with gen in clausius_lhs.
double generator_heat(const ProcessRecord& rec, const Generator& gen,
                      const IntegrationOptions& opts = {});

// Centered gradient of gen at the reference state, built from x_j = beta_k (E_j - F_k) so it
// stays finite where p_ref underflows.
std::vector<double> reference_gradient(const Generator& gen, const ReferenceState& ref);

// int sum_j dp_j g_a(p_beta)_j with g_a(x) = (1 - a x^{a-1})/(a-1) up to a constant; -> beta Q at a=1.
double tsallis_heat(const ProcessRecord& rec, double alpha_tilde,
                    const IntegrationOptions& opts = {});
// Renyi heat, abar in [0, 1); -> beta Q at abar=1.
double renyi_heat(const ProcessRecord& rec, double alpha_bar, const IntegrationOptions& opts = {});

// <e^{-(a-1) beta (H-F)}> and the same with e^{-(a-1) beta (E_ref - F)} pulled out.
double tsallis_observable(const ProbVector& p, const ThermalContext& ctx, double alpha_tilde);
double tsallis_observable_factored(const ProbVector& p, const LevelSystem& levels,
                                   const ThermalContext& ctx, double alpha_tilde, double e_ref);

// F_alpha = H_alpha(p_beta) - T^alpha S_alpha(p_beta), H_alpha being F-shifted (so F_1 = 0).
double alpha_free_energy(const ThermalContext& ctx, double alpha);
double noneq_alpha_free_energy(const ProbVector& p, const ThermalContext& ctx, double alpha);

struct HighTBound {
  double bound;
  bool condition_ok;
  // T / (|a-1| (E_max - E_min) / 2); infinite at a = 1.
  double condition_ratio;
};

HighTBound high_T_bound(const ProbVector& p_i, const ProbVector& p_f, const LevelSystem& levels,
                        double temperature, double alpha_tilde, double margin = 5.0);

// min(1, <e^{-(a-1) beta (H-F)}> / xi), an upper bound on P(e^{-(a-1) beta (E-F)} >= xi).
double markov_tail(const ProbVector& p, const ThermalContext& ctx, double alpha_tilde, double xi);

// F + T D_abr(p, p_beta) with the Renyi divergence of order abr.
double rt_monotone(const ProbVector& p, const ThermalContext& ctx, double alpha_breve);

// dE / ((E_high - F)^alpha - (E_low - F)^alpha) from shifted energies.
double conversion_factor(double gap, double shifted_low, double shifted_high, double alpha);

}  // namespace gci
