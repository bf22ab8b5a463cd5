#include "gci/protocols.hpp"

#include <algorithm>
#include <cmath>

#include "gci/bregman.hpp"
#include "gci/errors.hpp"

namespace gci {

namespace {

constexpr double kSwitchDuration = 1e-6;

BathSet single_bath(double beta) { return BathSet{BathCoupling{beta, {}}}; }

ProbVector apply_map(const IsochoreMap& map, const ProbVector& p, const ProbVector& ref) {
  constexpr const char* op = "run_protocol";
  const std::size_t n = p.size();
  if (std::holds_alternative<FullThermalization>(map)) return ref;
  if (const auto* u = std::get_if<UniformMap>(&map)) {
    if (!(u->y >= 0.0 && u->y <= 1.0)) fail(ErrorKind::Construction, op, "uniform map y outside [0, 1]");
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) out[j] = (1.0 - u->y) * p[j] + u->y * ref[j];
    return validate_distribution(std::move(out));
  }
  const auto& m = std::get<StochasticMatrix>(map).m;
  if (m.size() != n) fail(ErrorKind::Construction, op, "stochastic matrix has wrong size");
  for (const auto& row : m) {
    if (row.size() != n) fail(ErrorKind::Construction, op, "stochastic matrix has wrong size");
    for (double x : row) {
      if (!(x >= 0.0) || !std::isfinite(x)) {
        fail(ErrorKind::Construction, op, "stochastic matrix entry negative or non-finite");
      }
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = m[i][j];
    if (std::abs(sum_of(col) - 1.0) > 1e-10) {
      fail(ErrorKind::Construction, op, "stochastic matrix column does not sum to 1");
    }
  }
  std::vector<double> fixed(n);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> a(n);
    std::vector<double> b(n);
    for (std::size_t j = 0; j < n; ++j) {
      a[j] = m[i][j] * ref[j];
      b[j] = m[i][j] * p[j];
    }
    fixed[i] = sum_of(a);
    out[i] = sum_of(b);
    if (std::abs(fixed[i] - ref[i]) > 1e-10) {
      fail(ErrorKind::Construction, op, "stochastic matrix does not fix the bath's Gibbs state");
    }
  }
  return validate_distribution(std::move(out));
}

std::optional<DivergenceReport> try_gap(const Generator& gen, const ProbVector& p_i,
                                        const ProbVector& p_f, const ProbVector& ref) {
  try {
    return contractivity_gap(gen, p_i, p_f, ref);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::SingularReference) return std::nullopt;
    throw;
  }
}

void append_staircase(ProcessRecord& rec, const LevelSchedule& path, double beta_begin,
                      double beta_end, std::size_t n, double duration, const std::string& tag,
                      const Generator& gen) {
  if (n == 0) fail(ErrorKind::Parameter, "staircase_isotherm", "need at least one stair");
  const double t0 = rec.back().t;
  const std::size_t step = rec.begin_step(SegmentType::Isotherm, tag);
  double d_initial = 0.0;
  double d_final = 0.0;
  bool have_gap = true;
  const double span = path.t_end() - path.t_begin();
  for (std::size_t k = 1; k <= n; ++k) {
    const double s = static_cast<double>(k) / static_cast<double>(n);
    const LevelSystem levels = path.at(path.t_begin() + s * span);
    const double beta = beta_begin + s * (beta_end - beta_begin);
    const ProbVector p = rec.back().p;
    rec.append(IntervalKind::Adiabat,
               RecordSample{t0 + duration * (static_cast<double>(k) - 0.5) / n, p, levels,
                            single_bath(beta)});
    ThermalContext ctx = gibbs_state(levels, beta);
    if (have_gap) {
      const auto g = try_gap(gen, p, ctx.gibbs, ctx.gibbs);
      if (g) {
        d_initial += g->d_initial;
        d_final += g->d_final;
      } else {
        have_gap = false;
      }
    }
    rec.append(IntervalKind::Isochore,
               RecordSample{t0 + duration * static_cast<double>(k) / n, std::move(ctx.gibbs),
                            levels, single_bath(beta)});
  }
  if (have_gap) rec.set_step_gap(step, DivergenceReport{d_initial, d_final, d_initial - d_final});
}

void require_positive(const ProbVector& p, const char* op) {
  for (double x : p.values()) {
    if (!(x > 0.0)) fail(ErrorKind::Domain, op, "endpoint populations must be strictly positive");
  }
}

LevelSystem surprisal_levels(const ProbVector& p, double temperature) {
  std::vector<double> e(p.size());
  for (std::size_t j = 0; j < p.size(); ++j) e[j] = -temperature * std::log(p[j]);
  return LevelSystem(std::move(e));
}

}  // namespace

void extend_protocol(ProcessRecord& rec, const std::vector<ProtocolStep>& steps,
                     const Generator& gap_generator) {
  constexpr const char* op = "run_protocol";
  for (const ProtocolStep& step : steps) {
    const RecordSample last = rec.back();
    const std::size_t n = last.p.size();
    if (const auto* iso = std::get_if<IsochoreStep>(&step)) {
      if (!(iso->duration > 0.0)) fail(ErrorKind::InvalidInput, op, "duration must be > 0");
      validate_baths(iso->baths, n);
      double t = last.t;
      if (last.baths != iso->baths) {
        if (rec.intervals() > 0 && rec.interval_kind(rec.intervals() - 1) == IntervalKind::Adiabat) {
          rec.retarget_last(iso->baths);
        } else {
          rec.begin_step(SegmentType::Adiabat, "switch");
          t += kSwitchDuration;
          rec.append(IntervalKind::Adiabat, RecordSample{t, last.p, last.levels, iso->baths});
        }
      }
      const ReferenceState ref = reference_state(last.levels, iso->baths, last.p);
      ProbVector p_f = apply_map(iso->map, last.p, ref.p);
      const std::size_t idx = rec.begin_step(SegmentType::Isochore, iso->tag);
      if (const auto g = try_gap(gap_generator, last.p, p_f, ref.p)) rec.set_step_gap(idx, *g);
      rec.append(IntervalKind::Isochore,
                 RecordSample{t + iso->duration, std::move(p_f), last.levels, iso->baths});
    } else if (const auto* adi = std::get_if<AdiabatStep>(&step)) {
      if (!(adi->duration > 0.0)) fail(ErrorKind::InvalidInput, op, "duration must be > 0");
      if (adi->target.size() != n) fail(ErrorKind::InvalidInput, op, "target level count differs");
      rec.begin_step(SegmentType::Adiabat, adi->tag);
      rec.append(IntervalKind::Adiabat,
                 RecordSample{last.t + adi->duration, last.p, adi->target, last.baths});
    } else {
      const auto& it = std::get<IsothermStep>(step);
      if (!(it.duration > 0.0)) fail(ErrorKind::InvalidInput, op, "duration must be > 0");
      if (it.target.size() != n) fail(ErrorKind::InvalidInput, op, "target level count differs");
      append_staircase(rec, LevelSchedule::linear(last.levels, it.target), last.baths.front().beta,
                       it.beta_end, it.steps, it.duration, it.tag, gap_generator);
    }
  }
}

ProcessRecord run_protocol(const ProbVector& initial, const LevelSystem& levels,
                           double reference_beta, const std::vector<ProtocolStep>& steps,
                           const Generator& gap_generator) {
  if (initial.size() != levels.size()) {
    fail(ErrorKind::InvalidInput, "run_protocol", "population/level size mismatch");
  }
  ProcessRecord rec(RecordSample{0.0, initial, levels, single_bath(reference_beta)});
  extend_protocol(rec, steps, gap_generator);
  return rec;
}

ProcessRecord staircase_isotherm(const LevelSchedule& h_path, double beta_begin, double beta_end,
                                 std::size_t n) {
  if (n < 2) fail(ErrorKind::Parameter, "staircase_isotherm", "need N >= 2");
  const LevelSystem start = h_path.at(h_path.t_begin());
  ProcessRecord rec(RecordSample{h_path.t_begin(), gibbs_state(start, beta_begin).gibbs, start,
                                 single_bath(beta_begin)});
  append_staircase(rec, h_path, beta_begin, beta_end, n, h_path.t_end() - h_path.t_begin(),
                   "isotherm", Generator::shannon());
  return rec;
}

double max_thermal_deviation(const ProcessRecord& rec) {
  double worst = 0.0;
  for (std::size_t s = 0; s < rec.size(); ++s) {
    const ProbVector& p = rec.sample(s).p;
    const ProbVector& ref = rec.reference(s).p;
    for (std::size_t j = 0; j < p.size(); ++j) worst = std::max(worst, std::abs(p[j] - ref[j]));
  }
  return worst;
}

void append_reversible_preparation(ProcessRecord& rec, const ProbVector& p_f,
                                   const LevelSystem& h_f, double temperature, std::size_t n,
                                   const std::string& tag) {
  constexpr const char* op = "reversible_preparation";
  if (!(temperature >= kMinTemperature)) fail(ErrorKind::InvalidInput, op, "temperature < 1e-12");
  const RecordSample start = rec.back();
  if (p_f.size() != start.p.size() || h_f.size() != start.levels.size()) {
    fail(ErrorKind::InvalidInput, op, "size mismatch");
  }
  require_positive(start.p, op);
  require_positive(p_f, op);
  const double beta = 1.0 / temperature;
  const Generator gen = Generator::shannon();

  const LevelSystem quench_i = surprisal_levels(start.p, temperature);
  rec.begin_step(SegmentType::Adiabat, "work");
  rec.append(IntervalKind::Adiabat,
             RecordSample{start.t + 1.0, start.p, quench_i, single_bath(beta)});
  // Isotherm between the two surprisal level sets: p_i == p_f leaves the levels fixed.
  const LevelSystem quench_f = surprisal_levels(p_f, temperature);
  append_staircase(rec, LevelSchedule::linear(quench_i, quench_f), beta, beta, n, 1.0, tag, gen);
  const RecordSample end = rec.back();
  rec.begin_step(SegmentType::Adiabat, "work");
  rec.append(IntervalKind::Adiabat, RecordSample{end.t + 1.0, end.p, h_f, single_bath(beta)});
}

double reversible_work_closed_form(const ProbVector& p_i, const LevelSystem& h_i,
                                   const ProbVector& p_f, const LevelSystem& h_f,
                                   double temperature, double alpha) {
  const double beta = 1.0 / temperature;
  const ThermalContext ci = gibbs_state(h_i, beta);
  const ThermalContext cf = gibbs_state(h_f, beta);
  return alpha_free_energy(cf, alpha) - alpha_free_energy(ci, alpha) -
         available_work(alpha, p_i, ci) + available_work(alpha, p_f, cf);
}

PreparationResult reversible_preparation(const ProbVector& p_i, const LevelSystem& h_i,
                                         const ProbVector& p_f, const LevelSystem& h_f,
                                         double temperature, double alpha, std::size_t n) {
  constexpr const char* op = "reversible_preparation";
  if (p_i.size() != h_i.size()) fail(ErrorKind::InvalidInput, op, "size mismatch");
  require_positive(p_i, op);
  require_positive(p_f, op);
  if (n < 1) fail(ErrorKind::Parameter, op, "need N >= 1");
  ProcessRecord rec(RecordSample{0.0, p_i, h_i, single_bath(1.0 / temperature)});
  append_reversible_preparation(rec, p_f, h_f, temperature, n, "prep");
  const double work = alpha_work(rec, alpha);
  const double heat = sum_of(alpha_heat(rec, alpha));
  const double closed = reversible_work_closed_form(p_i, h_i, p_f, h_f, temperature, alpha);
  return PreparationResult{std::move(rec), work, heat, closed};
}

ProbVector s_curve_state(double x) {
  if (!(x >= 0.0 && x <= 4.0 / 3.0)) {
    fail(ErrorKind::Parameter, "s_curve_state", "x outside [0, 4/3]");
  }
  return ProbVector({1.0 - 0.75 * x, 0.5 * x, 0.25 * x});
}

namespace {

double s_curve_entropy(double x) { return entropy_value(Generator::shannon(), s_curve_state(x)); }

// dS/dx along the family; strictly decreasing on (0, 4/3).
double s_curve_slope(double x) {
  return 0.75 * std::log(1.0 - 0.75 * x) - 0.5 * std::log(0.5 * x) - 0.25 * std::log(0.25 * x);
}

}  // namespace

double s_curve_entropy_peak() {
  double lo = 1e-12;
  double hi = 4.0 / 3.0 - 1e-12;
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    (s_curve_slope(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double equal_entropy_partner(double x0) {
  constexpr const char* op = "equal_entropy_partner";
  if (!(x0 > 0.0 && x0 < 4.0 / 3.0)) fail(ErrorKind::Parameter, op, "x0 outside (0, 4/3)");
  const double peak = s_curve_entropy_peak();
  const double target = s_curve_entropy(x0);
  double lo;
  double hi;
  if (x0 < peak) {
    lo = peak;
    hi = 4.0 / 3.0;
    if (s_curve_entropy(hi) > target) {
      fail(ErrorKind::Precondition, op, "no equal-entropy state beyond the maximum");
    }
  } else if (x0 > peak) {
    lo = 0.0;
    hi = peak;
  } else {
    return peak;
  }
  // f(x) = S(x) - target changes sign between lo and hi.
  const double f_lo = s_curve_entropy(lo) - target;
  for (int i = 0; i < 300 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = s_curve_entropy(mid) - target;
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

const char* to_string(MachineMode mode) {
  switch (mode) {
    case MachineMode::Engine: return "engine";
    case MachineMode::Refrigerator: return "refrigerator";
    case MachineMode::Heater: return "heater";
    case MachineMode::Accelerator: return "accelerator";
    case MachineMode::Idle: return "idle";
  }
  return "?";
}

namespace {

void validate_machine(const MachineSpec& spec, const char* op) {
  if (!(spec.t_cold >= kMinTemperature) || !(spec.t_hot > spec.t_cold) ||
      !std::isfinite(spec.t_hot)) {
    fail(ErrorKind::InvalidInput, op, "need T_h > T_c > 0");
  }
  if (spec.cold.size() != spec.hot.size()) fail(ErrorKind::InvalidInput, op, "level count differs");
  for (std::size_t i = 0; i < spec.cold.size(); ++i) {
    for (std::size_t j = i + 1; j < spec.cold.size(); ++j) {
      if ((spec.cold[i] - spec.cold[j]) * (spec.hot[i] - spec.hot[j]) < 0.0) {
        fail(ErrorKind::InvalidInput, op, "levels cross during the adiabats");
      }
    }
  }
}

MachineMode classify(double work, double q_cold, double q_hot) {
  const double scale = std::max({std::abs(work), std::abs(q_cold), std::abs(q_hot)});
  if (std::abs(work) <= 1e-14 * std::max(scale, 1e-300) || scale == 0.0) return MachineMode::Idle;
  if (work < 0.0) return MachineMode::Engine;
  if (q_cold > 0.0) return MachineMode::Refrigerator;
  if (q_hot > 0.0) return MachineMode::Accelerator;
  return MachineMode::Heater;
}

}  // namespace

OttoResult otto_cycle(const MachineSpec& spec) {
  constexpr const char* op = "otto_cycle";
  validate_machine(spec, op);
  const double beta_c = 1.0 / spec.t_cold;
  const double beta_h = 1.0 / spec.t_hot;
  const std::vector<ProtocolStep> strokes{
      IsochoreStep{single_bath(beta_c), FullThermalization{}, 1.0, "cold"},
      AdiabatStep{spec.hot, 1.0, "compress"},
      IsochoreStep{single_bath(beta_h), FullThermalization{}, 1.0, "hot"},
      AdiabatStep{spec.cold, 1.0, "expand"},
  };
  ProbVector p = gibbs_state(spec.hot, beta_h).gibbs;
  for (std::size_t cycle = 1; cycle <= spec.max_cycles; ++cycle) {
    ProcessRecord rec = run_protocol(p, spec.cold, beta_c, strokes);
    rec.retarget_last(single_bath(beta_c));
    double diff = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) diff = std::max(diff, std::abs(rec.back().p[j] - p[j]));
    if (diff <= 1e-12) {
      std::vector<StepFlows> flows = step_flows(rec, 1.0);
      const double q_cold = flows[0].heat;
      const double q_hot = flows[2].heat;
      double work = 0.0;
      for (const StepFlows& f : flows) work += f.work;
      const MachineMode mode = classify(work, q_cold, q_hot);
      std::optional<double> eta;
      if (mode == MachineMode::Engine && q_hot > 0.0) eta = -work / q_hot;
      return OttoResult{std::move(rec), mode, eta, q_cold, q_hot, work, std::move(flows), cycle};
    }
    p = rec.back().p;
  }
  fail(ErrorKind::Numeric, op, "cycle did not converge");
}

double otto_alpha_bound(const MachineSpec& spec, double alpha) {
  constexpr const char* op = "otto_alpha_bound";
  validate_machine(spec, op);
  if (spec.cold.size() != 2) fail(ErrorKind::InvalidInput, op, "two-level machine required");
  const auto factor = [alpha](const LevelSystem& levels, double temperature) {
    const ThermalContext ctx = gibbs_state(levels, 1.0 / temperature);
    const std::size_t lo = levels.argmin();
    const std::size_t hi = 1 - lo;
    return conversion_factor(levels[hi] - levels[lo], ctx.shifted_energies[lo],
                             ctx.shifted_energies[hi], alpha);
  };
  const double k_c = factor(spec.cold, spec.t_cold);
  const double k_h = factor(spec.hot, spec.t_hot);
  return 1.0 - std::pow(spec.t_cold / spec.t_hot, alpha) * k_c / k_h;
}

HalfZeroResult half_zero_machine(double t_cold, double t_hot, const LevelSystem& cold_levels,
                                 double fraction) {
  constexpr const char* op = "half_zero_machine";
  if (cold_levels.size() != 3) fail(ErrorKind::InvalidInput, op, "three levels required");
  if (!(t_cold >= kMinTemperature) || !(t_hot > 0.0)) {
    fail(ErrorKind::InvalidInput, op, "temperatures must be > 0");
  }
  const double beta_c = 1.0 / t_cold;
  const double beta_h = 1.0 / t_hot;
  const ProbVector p_c = gibbs_state(cold_levels, beta_c).gibbs;
  const double dp = fraction * p_c[2];
  const std::vector<double> raw{p_c[0] - dp, p_c[1] + 2.0 * dp, p_c[2] - dp};
  for (double x : raw) {
    if (!(x > 0.0 && x < 1.0)) fail(ErrorKind::Parameter, op, "hot populations leave the simplex");
  }
  ProbVector p_h = validate_distribution(raw);
  std::vector<double> e(3);
  for (std::size_t j = 0; j < 3; ++j) e[j] = -t_hot * std::log(p_h[j] / p_h[0]);
  LevelSystem hot_levels(std::move(e));

  const std::vector<ProtocolStep> strokes{
      IsochoreStep{single_bath(beta_c), FullThermalization{}, 1.0, "cold"},
      AdiabatStep{hot_levels, 1.0, "compress"},
      IsochoreStep{single_bath(beta_h), FullThermalization{}, 1.0, "hot"},
      AdiabatStep{cold_levels, 1.0, "expand"},
  };
  ProcessRecord rec = run_protocol(p_h, cold_levels, beta_c, strokes);
  rec.retarget_last(single_bath(beta_c));
  const auto f1 = flows_by_tag(rec, 1.0);
  const auto f2 = flows_by_tag(rec, 2.0);
  const double q1c = f1.at("cold").heat;
  const double q1h = f1.at("hot").heat;
  const double q2c = f2.at("cold").heat;
  const double q2h = f2.at("hot").heat;
  const double ratio = -q2c / q2h;
  const double bound = (t_cold / t_hot) * (t_cold / t_hot);
  return HalfZeroResult{std::move(rec), p_c,   std::move(p_h), std::move(hot_levels), q1c,   q1h,
                        q2c,            q2h,   ratio,          bound,
                        q2h > 0.0 ? BoundDirection::AtLeast : BoundDirection::AtMost};
}

FullZeroResult full_zero_machine(double t_cold, double t_hot, const ProbVector& p_a,
                                 const ProbVector& p_b, const LevelSystem& levels, std::size_t n) {
  constexpr const char* op = "full_zero_machine";
  if (p_a.size() < 3 || p_a.size() != p_b.size() || p_a.size() != levels.size()) {
    fail(ErrorKind::Precondition, op, "need >= 3 levels of matching size");
  }
  require_positive(p_a, op);
  require_positive(p_b, op);
  const Generator shannon = Generator::shannon();
  if (std::abs(entropy_value(shannon, p_a) - entropy_value(shannon, p_b)) > 1e-10) {
    fail(ErrorKind::Precondition, op, "states differ in Shannon entropy");
  }
  ProcessRecord rec(RecordSample{0.0, p_a, levels, single_bath(1.0 / t_cold)});
  append_reversible_preparation(rec, p_b, levels, t_cold, n, "cold");
  append_reversible_preparation(rec, p_a, levels, t_hot, n, "hot");
  rec.retarget_last(single_bath(1.0 / t_cold));
  const auto f1 = flows_by_tag(rec, 1.0);
  const auto f2 = flows_by_tag(rec, 2.0);
  const double q2c = f2.at("cold").heat;
  const double q2h = f2.at("hot").heat;
  return FullZeroResult{std::move(rec), f1.at("cold").heat, f1.at("hot").heat, q2c, q2h,
                        -q2c / q2h};
}

namespace {

void check_low_t(const ProbVector& p_h, const std::vector<double>& dp, const char* op) {
  if (dp.size() != p_h.size()) fail(ErrorKind::InvalidInput, op, "size mismatch");
  for (double x : p_h.values()) {
    if (!(x > 0.0)) fail(ErrorKind::Domain, op, "p_h must be strictly positive");
    if (x == 1.0) fail(ErrorKind::ExpansionSingularity, op, "entry equal to 1");
  }
  if (std::abs(sum_of(dp)) > 1e-12) fail(ErrorKind::Parameter, op, "dp must sum to 0");
}

}  // namespace

LowTTerms low_T_expansion(const ProbVector& p_h, const std::vector<double>& dp, double alpha) {
  check_low_t(p_h, dp, "low_T_expansion");
  std::vector<double> terms(dp.size());
  for (std::size_t j = 0; j < dp.size(); ++j) terms[j] = dp[j] * std::log(-std::log(p_h[j]));
  const double lead = alpha * sum_of(terms);
  return LowTTerms{lead, lead};
}

LowTTerms low_T_exact(const ProbVector& p_h, const std::vector<double>& dp, double alpha) {
  check_low_t(p_h, dp, "low_T_exact");
  std::vector<double> pc(dp.size());
  std::vector<double> q(dp.size());
  for (std::size_t j = 0; j < dp.size(); ++j) {
    pc[j] = p_h[j] - dp[j];
    q[j] = dp[j] * std::pow(-std::log(p_h[j]), alpha);
  }
  const Generator gen = Generator::alpha_entropy(alpha);
  const double ds = entropy_value(gen, p_h) - entropy_value(gen, validate_distribution(pc));
  return LowTTerms{ds, sum_of(q)};
}

}  // namespace gci
