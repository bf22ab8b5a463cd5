#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gci/accounting.hpp"
#include "gci/core.hpp"
#include "gci/entropy.hpp"

namespace gci {

struct FullThermalization {};
struct UniformMap {
  double y;  // in [0, 1]
};
// m[i][j] = probability of moving from level j to level i; columns sum to 1.
struct StochasticMatrix {
  std::vector<std::vector<double>> m;
};
using IsochoreMap = std::variant<FullThermalization, UniformMap, StochasticMatrix>;

struct IsochoreStep {
  BathSet baths;
  IsochoreMap map = FullThermalization{};
  double duration = 1.0;
  std::string tag = {};
};

// Quasi-static level morph with frozen populations.
struct AdiabatStep {
  LevelSystem target;
  double duration = 1.0;
  std::string tag = {};
};

// Staircase from the current levels and reference beta to (target, beta_end), linear in both.
struct IsothermStep {
  LevelSystem target;
  double beta_end;
  std::size_t steps;
  double duration = 1.0;
  std::string tag = {};
};

using ProtocolStep = std::variant<IsochoreStep, AdiabatStep, IsothermStep>;

// Every isochore (and isotherm, summed over stairs) gets a contractivity report for gap_generator.
ProcessRecord run_protocol(const ProbVector& initial, const LevelSystem& levels,
                           double reference_beta, const std::vector<ProtocolStep>& steps,
                           const Generator& gap_generator = Generator::shannon());

// Appends steps to an existing record, continuing from its last sample.
void extend_protocol(ProcessRecord& rec, const std::vector<ProtocolStep>& steps,
                     const Generator& gap_generator = Generator::shannon());

// Starts at gibbs(h_path(t0), beta_begin); stair k sits at t_k = t0 + k (t1 - t0) / n.
ProcessRecord staircase_isotherm(const LevelSchedule& h_path, double beta_begin, double beta_end,
                                 std::size_t n);

// max over samples of |p - p_ref|_inf.
double max_thermal_deviation(const ProcessRecord& rec);

struct PreparationResult {
  ProcessRecord record;
  double work;
  double heat;
  // dF_alpha - T^alpha D(p_i, p_beta_i) + T^alpha D(p_f, p_beta_f)
  double closed_form;
};

// Stage A: quench to -T ln p_i then isotherm back to H_i; B: isotherm H_i -> H_f; C: isotherm to
// -T ln p_f then quench to H_f. Each isotherm uses n stairs.
PreparationResult reversible_preparation(const ProbVector& p_i, const LevelSystem& h_i,
                                         const ProbVector& p_f, const LevelSystem& h_f,
                                         double temperature, double alpha, std::size_t n);

// Appends the three stages to rec, starting from its final state; steps are tagged `tag`
// (isotherms) and "work" (quenches).
void append_reversible_preparation(ProcessRecord& rec, const ProbVector& p_f,
                                   const LevelSystem& h_f, double temperature, std::size_t n,
                                   const std::string& tag);

double reversible_work_closed_form(const ProbVector& p_i, const LevelSystem& h_i,
                                   const ProbVector& p_f, const LevelSystem& h_f,
                                   double temperature, double alpha);

// (1 - 3x/4, x/2, x/4), x in [0, 4/3].
ProbVector s_curve_state(double x);
double s_curve_entropy_peak();
// The x on the far side of the Shannon-entropy maximum with S_1 equal to S_1(x0).
double equal_entropy_partner(double x0);

struct MachineSpec {
  LevelSystem cold;
  LevelSystem hot;
  double t_cold;
  double t_hot;
  std::size_t max_cycles = 100;
};

enum class MachineMode { Engine, Refrigerator, Heater, Accelerator, Idle };
const char* to_string(MachineMode mode);

struct OttoResult {
  ProcessRecord record;
  MachineMode mode;
  std::optional<double> efficiency;  // set in engine mode only
  double heat_cold;
  double heat_hot;
  double work;
  std::vector<StepFlows> strokes;  // cold isochore, compression, hot isochore, expansion
  std::size_t cycles;
};

// Cold isochore, adiabat to hot levels, hot isochore, adiabat back; full thermalization.
OttoResult otto_cycle(const MachineSpec& spec);

// 1 - (T_c/T_h)^alpha k_c/k_h with k the two-level conversion factor of each bath.
double otto_alpha_bound(const MachineSpec& spec, double alpha);

enum class BoundDirection { AtMost, AtLeast };

struct HalfZeroResult {
  ProcessRecord record;
  ProbVector p_cold;
  ProbVector p_hot;
  LevelSystem hot_levels;  // shifted so the first level is 0
  double q1_cold;
  double q1_hot;
  double q2_cold;
  double q2_hot;
  double ratio;  // -Q2c / Q2h
  double bound;  // (T_c/T_h)^2
  BoundDirection direction;
};

// p_h = p_c + (-1, 2, -1) fraction p_c[2]; hot levels from -T_h ln p_h.
HalfZeroResult half_zero_machine(double t_cold, double t_hot, const LevelSystem& cold_levels,
                                 double fraction);

struct FullZeroResult {
  ProcessRecord record;
  double q1_cold;
  double q1_hot;
  double q2_cold;
  double q2_hot;
  double ratio;  // -Q2c / Q2h
};

// Reversible A -> B at T_c then B -> A at T_h, both at fixed levels.
FullZeroResult full_zero_machine(double t_cold, double t_hot, const ProbVector& p_a,
                                 const ProbVector& p_b, const LevelSystem& levels, std::size_t n);

struct LowTTerms {
  double delta_s;
  double beta_q;
};

// Both leading terms: alpha sum_j dp_j ln(-ln p_h,j).
LowTTerms low_T_expansion(const ProbVector& p_h, const std::vector<double>& dp, double alpha);
// Exact hot-isochore values for p_c = p_h - dp relaxing to the thermal p_h.
LowTTerms low_T_exact(const ProbVector& p_h, const std::vector<double>& dp, double alpha);

}  // namespace gci
