#include "gci/cli/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>
#include <thread>
#include <type_traits>

#include "gci/accounting.hpp"
#include "gci/bregman.hpp"
#include "gci/errors.hpp"
#include "gci/protocols.hpp"
#include "gci/quantum.hpp"

namespace gci::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kGapFloor = -1e-10;

const char* family_name(GeneratorFamily f) {
  switch (f) {
    case GeneratorFamily::Alpha: return "alpha";
    case GeneratorFamily::Tsallis: return "tsallis";
    case GeneratorFamily::Renyi: return "renyi";
    case GeneratorFamily::Shannon: break;
  }
  return "shannon";
}

Generator make_generator(GeneratorFamily family, double parameter) {
  switch (family) {
    case GeneratorFamily::Alpha: return Generator::alpha_entropy(parameter);
    case GeneratorFamily::Tsallis: return Generator::tsallis(parameter);
    case GeneratorFamily::Renyi: return Generator::renyi(parameter);
    case GeneratorFamily::Shannon: break;
  }
  return Generator::shannon();
}

// (family, parameter) pairs; Shannon contributes one entry with parameter 1.
std::vector<std::pair<GeneratorFamily, double>> expand(const std::vector<GeneratorGrid>& grids,
                                                       const RunOptions& opts) {
  std::vector<std::pair<GeneratorFamily, double>> out;
  if (opts.alpha) {
    out.emplace_back(GeneratorFamily::Alpha, *opts.alpha);
    return out;
  }
  for (const auto& g : grids) {
    if (g.family == GeneratorFamily::Shannon) {
      out.emplace_back(g.family, 1.0);
    } else {
      for (double p : g.parameters) out.emplace_back(g.family, p);
    }
  }
  return out;
}

IntegrationOptions integration(const RunOptions& opts) {
  IntegrationOptions io;
  if (opts.tolerance) io.tolerance = *opts.tolerance;
  return io;
}

BathSet scaled(BathSet baths, double s) {
  for (auto& b : baths) b.beta /= s;
  return baths;
}

std::vector<ProtocolStep> scaled_steps(const std::vector<ProtocolStep>& steps, const RunOptions& opts) {
  std::vector<ProtocolStep> out;
  const double s = opts.temperature_scale;
  for (const auto& step : steps) {
    if (const auto* iso = std::get_if<IsochoreStep>(&step)) {
      IsochoreStep c = *iso;
      c.baths = scaled(c.baths, s);
      out.emplace_back(std::move(c));
    } else if (const auto* it = std::get_if<IsothermStep>(&step)) {
      IsothermStep c = *it;
      c.beta_end /= s;
      if (opts.steps) c.steps = *opts.steps;
      out.emplace_back(std::move(c));
    } else {
      out.push_back(step);
    }
  }
  return out;
}

Table run_protocol_scenario(const ProtocolScenario& sc, const RunOptions& opts) {
  Table t{columns_for(sc), {}};
  const double s = opts.temperature_scale;
  const ProbVector initial = sc.populations ? ProbVector(*sc.populations)
                                            : gibbs_state(sc.levels, *sc.gibbs_beta / s).gibbs;
  const std::vector<ProtocolStep> steps = scaled_steps(sc.steps, opts);
  const IntegrationOptions io = integration(opts);
  for (const auto& [family, param] : expand(sc.generators, opts)) {
    const Generator gen = make_generator(family, param);
    const ProcessRecord rec = run_protocol(initial, sc.levels, sc.reference_beta / s, steps, gen);
    const double ds = entropy_value(gen, rec.back().p) - entropy_value(gen, rec.front().p);
    const double heat_term = generator_heat(rec, gen, io);
    double min_gap = std::numeric_limits<double>::infinity();
    for (const auto& step : rec.steps()) {
      if (step.gap) min_gap = std::min(min_gap, step.gap->gap);
    }
    double q = kNaN;
    double w = kNaN;
    double residual = kNaN;
    if (family == GeneratorFamily::Alpha) {
      const Ledger l = ledger(rec, param, io);
      q = l.heat;
      w = l.work;
      residual = l.first_law_residual();
    }
    const bool any_gap = std::isfinite(min_gap);
    t.rows.push_back({std::string(family_name(family)), param, ds, heat_term, ds - heat_term, q, w,
                      residual, any_gap ? min_gap : kNaN, !any_gap || min_gap >= kGapFloor});
  }
  return t;
}

Table run_otto(const OttoScenario& sc, const RunOptions& opts) {
  Table t{columns_for(sc), {}};
  const MachineSpec spec{sc.cold, sc.hot, sc.t_cold * opts.temperature_scale,
                         sc.t_hot * opts.temperature_scale};
  const OttoResult cycle = otto_cycle(spec);
  const double actual = cycle.efficiency.value_or(kNaN);
  const double carnot = 1.0 - spec.t_cold / spec.t_hot;
  const std::vector<double> alphas = opts.alpha ? std::vector<double>{*opts.alpha} : sc.alphas;
  for (double a : alphas) t.rows.push_back({a, otto_alpha_bound(spec, a), actual, carnot});
  return t;
}

Table run_high_t(const HighTScenario& sc, const RunOptions& opts) {
  Table t{columns_for(sc), {}};
  const double temp = sc.temperature * opts.temperature_scale;
  const ProbVector p_i(sc.initial);
  const ThermalContext ctx = gibbs_state(sc.levels, 1.0 / temp);
  std::vector<double> terms;
  for (std::size_t j = 0; j < p_i.size(); ++j) terms.push_back((ctx.gibbs[j] - p_i[j]) * sc.levels[j]);
  const double q_actual = sum_of(terms);
  const std::vector<double> grid = opts.alpha ? std::vector<double>{*opts.alpha} : sc.alpha_tildes;
  for (double a : grid) {
    const HighTBound b = high_T_bound(p_i, ctx.gibbs, sc.levels, temp, a, sc.margin);
    t.rows.push_back({a, b.bound, q_actual, b.condition_ok});
  }
  return t;
}

Table run_half_zero(const HalfZeroScenario& sc, const RunOptions& opts) {
  Table t{columns_for(sc), {}};
  const HalfZeroResult r = half_zero_machine(sc.t_cold * opts.temperature_scale,
                                             sc.t_hot * opts.temperature_scale, sc.cold_levels,
                                             sc.fraction);
  t.rows.push_back({r.hot_levels[0], r.hot_levels[1], r.hot_levels[2], r.q1_cold, r.q1_hot, r.q2_cold,
                    r.q2_hot, r.ratio, r.bound,
                    std::string(r.direction == BoundDirection::AtMost ? "at_most" : "at_least")});
  return t;
}

Table run_coherence(const CoherenceScenario& sc, const RunOptions& opts) {
  Table t{columns_for(sc), {}};
  const DensityMatrix rho0(sc.rho0);
  const double temp = sc.temperature * opts.temperature_scale;
  ExtractionResult r = [&] {
    if (sc.passive) return passive_extraction_protocol(rho0, sc.levels, temp, opts.steps.value_or(2000));
    ExtractionOptions eo;
    if (opts.tolerance) eo.time_tolerance = *opts.tolerance;
    return coherence_extraction_protocol(rho0, sc.levels, *sc.h_int, temp, eo);
  }();
  t.rows.push_back({std::string(sc.passive ? "four_stage" : "two_stage"), r.t_f, r.q1, r.q2, r.bound2,
                    r.ratio});
  return t;
}

Table run_staircase(const StaircaseScenario& sc, const RunOptions& opts) {
  Table t{columns_for(sc), {}};
  const LevelSchedule path = LevelSchedule::linear(sc.from, sc.to);
  const std::vector<std::size_t> stairs = opts.steps ? std::vector<std::size_t>{*opts.steps} : sc.stairs;
  const std::vector<double> alphas = opts.alpha ? std::vector<double>{*opts.alpha} : sc.alphas;
  const IntegrationOptions io = integration(opts);
  for (std::size_t n : stairs) {
    const ProcessRecord rec = staircase_isotherm(path, sc.beta_begin / opts.temperature_scale,
                                                 sc.beta_end / opts.temperature_scale, n);
    const double dev = max_thermal_deviation(rec);
    for (double a : alphas) {
      const double residual = std::abs(clausius_lhs(rec, Generator::alpha_entropy(a), io));
      t.rows.push_back({a, static_cast<long long>(n), residual, dev});
    }
  }
  return t;
}

struct RandomInstance {
  ProbVector p_i;
  ProbVector p_f;
  ProbVector ref;
};

std::vector<double> normalized(std::vector<double> v) {
  const double s = sum_of(v);
  for (double& x : v) x /= s;
  return v;
}

RandomInstance random_instance(std::mt19937_64& rng, const RandomValidityScenario& sc,
                               RandomMapKind kind, double temperature_scale) {
  std::uniform_int_distribution<std::size_t> size_dist(sc.min_levels, sc.max_levels);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);
  const std::size_t n = size_dist(rng);
  std::vector<double> e(n);
  for (double& x : e) x = 2.0 * unit(rng);
  const double beta = (0.2 + 2.8 * unit(rng)) / temperature_scale;
  std::vector<double> p(n);
  for (double& x : p) x = expo(rng) + 1e-9;
  const ProbVector p_i(normalized(p));
  const ProbVector ref = gibbs_state(LevelSystem(e), beta).gibbs;
  std::vector<double> out(n);
  if (kind == RandomMapKind::Uniform) {
    const double y = unit(rng);
    for (std::size_t j = 0; j < n; ++j) out[j] = (1.0 - y) * p_i[j] + y * ref[j];
  } else {
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    const std::size_t j = pick(rng);
    std::size_t k = pick(rng);
    while (k == j) k = pick(rng);
    // Detailed balance a_j ref_j = a_k ref_k keeps ref fixed.
    const double flux = unit(rng) * std::min(ref[j], ref[k]);
    const double a_j = flux / ref[j];
    const double a_k = flux / ref[k];
    out = p_i.values();
    out[j] = p_i[j] - a_j * p_i[j] + a_k * p_i[k];
    out[k] = p_i[k] - a_k * p_i[k] + a_j * p_i[j];
  }
  return {p_i, validate_distribution(std::move(out)), ref};
}

Table run_random_validity(const RandomValidityScenario& sc, const RunOptions& opts) {
  Table t{columns_for(sc), {}};
  const auto gens = expand(sc.generators, opts);
  for (RandomMapKind kind : sc.maps) {
    std::mt19937_64 rng(opts.seed);
    std::vector<RandomInstance> instances;
    instances.reserve(sc.instances);
    for (std::size_t i = 0; i < sc.instances; ++i) {
      instances.push_back(random_instance(rng, sc, kind, opts.temperature_scale));
    }
    for (const auto& [family, param] : gens) {
      const Generator gen = make_generator(family, param);
      double min_gap = std::numeric_limits<double>::infinity();
      long long violations = 0;
      for (const auto& inst : instances) {
        const double gap = contractivity_gap(gen, inst.p_i, inst.p_f, inst.ref).gap;
        min_gap = std::min(min_gap, gap);
        violations += gap < kGapFloor;
      }
      t.rows.push_back({std::string(family_name(family)), param,
                        std::string(kind == RandomMapKind::Uniform ? "uniform" : "two_level"),
                        static_cast<long long>(instances.size()), min_gap, violations});
    }
  }
  return t;
}

}  // namespace

std::vector<std::string> columns_for(const ScenarioBody& body) {
  switch (body.index()) {
    case 0:
      return {"family", "parameter", "delta_s", "heat_term", "clausius_lhs", "alpha_heat", "alpha_work",
              "first_law_residual", "min_gap", "valid"};
    case 1: return {"alpha", "eta_bound", "eta_actual", "carnot"};
    case 2: return {"alpha_tilde", "q_bound", "q_actual", "condition_ok"};
    case 3:
      return {"e_hot_0", "e_hot_1", "e_hot_2", "q1_cold", "q1_hot", "q2_cold", "q2_hot", "ratio", "bound",
              "direction"};
    case 4: return {"variant", "t_f", "q1", "q2", "bound2", "ratio"};
    case 5: return {"alpha", "stairs", "residual", "max_deviation"};
    default: return {"family", "parameter", "map", "instances", "min_gap", "violations"};
  }
}

Table run_scenario(const Scenario& scenario, const RunOptions& opts) {
  if (!(opts.temperature_scale > 0.0) || !std::isfinite(opts.temperature_scale)) {
    fail(ErrorKind::Parameter, "run", "temperature scale must be positive and finite");
  }
  if (opts.steps && *opts.steps < 2) fail(ErrorKind::Parameter, "run", "steps must be >= 2");
  return std::visit(
      [&](const auto& sc) -> Table {
        using T = std::decay_t<decltype(sc)>;
        if constexpr (std::is_same_v<T, ProtocolScenario>) return run_protocol_scenario(sc, opts);
        else if constexpr (std::is_same_v<T, OttoScenario>) return run_otto(sc, opts);
        else if constexpr (std::is_same_v<T, HighTScenario>) return run_high_t(sc, opts);
        else if constexpr (std::is_same_v<T, HalfZeroScenario>) return run_half_zero(sc, opts);
        else if constexpr (std::is_same_v<T, CoherenceScenario>) return run_coherence(sc, opts);
        else if constexpr (std::is_same_v<T, StaircaseScenario>) return run_staircase(sc, opts);
        else return run_random_validity(sc, opts);
      },
      scenario.body);
}

SweepParameter parse_sweep_parameter(const std::string& name) {
  if (name == "alpha") return SweepParameter::Alpha;
  if (name == "steps") return SweepParameter::Steps;
  if (name == "temperature_scale") return SweepParameter::TemperatureScale;
  if (name == "seed") return SweepParameter::Seed;
  throw ScenarioError("--param", 0, "--param: expected one of alpha, steps, temperature_scale, seed");
}

const char* to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::Alpha: return "alpha";
    case SweepParameter::Steps: return "steps";
    case SweepParameter::TemperatureScale: return "temperature_scale";
    case SweepParameter::Seed: break;
  }
  return "seed";
}

Table sweep(const Scenario& scenario, SweepParameter param, const std::vector<double>& grid,
            const RunOptions& base, std::size_t threads) {
  if (grid.empty()) throw ScenarioError("--grid", 0, "--grid: the sweep grid is empty");
  struct Outcome {
    Table table;
    std::string error;
  };
  std::vector<Outcome> results(grid.size());
  const auto run_point = [&](std::size_t i) {
    RunOptions o = base;
    const double v = grid[i];
    try {
      switch (param) {
        case SweepParameter::Alpha: o.alpha = v; break;
        case SweepParameter::Steps:
          if (!(v >= 2.0) || v != std::floor(v)) fail(ErrorKind::Parameter, "sweep", "steps must be an integer >= 2");
          o.steps = static_cast<std::size_t>(v);
          break;
        case SweepParameter::TemperatureScale: o.temperature_scale = v; break;
        case SweepParameter::Seed:
          if (!(v >= 0.0) || v != std::floor(v)) fail(ErrorKind::Parameter, "sweep", "seed must be a non-negative integer");
          o.seed = static_cast<std::uint64_t>(v);
          break;
      }
      results[i].table = run_scenario(scenario, o);
    } catch (const Error& e) {
      results[i].error = e.what();
    }
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min(threads, grid.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < grid.size(); ++i) run_point(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < grid.size(); i = next++) run_point(i);
      });
    }
    for (auto& th : pool) th.join();
  }

  Table out;
  out.columns.push_back(to_string(param));
  const std::vector<std::string> cols = columns_for(scenario.body);
  out.columns.insert(out.columns.end(), cols.begin(), cols.end());
  out.columns.push_back("status");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!results[i].error.empty()) {
      std::vector<Cell> row{grid[i]};
      row.resize(cols.size() + 1, std::string{});
      row.push_back("error: " + results[i].error);
      out.rows.push_back(std::move(row));
      continue;
    }
    for (auto& r : results[i].table.rows) {
      std::vector<Cell> row{grid[i]};
      row.insert(row.end(), r.begin(), r.end());
      row.push_back(std::string("ok"));
      out.rows.push_back(std::move(row));
    }
  }
  return out;
}

std::size_t threads_from_env() {
  const char* env = std::getenv("GCI_THREADS");
  if (!env) return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || v < 1) return 1;
  return static_cast<std::size_t>(std::min<long>(v, 256));
}

}  // namespace gci::cli
