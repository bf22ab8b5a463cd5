#include "gci/accounting.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "gci/errors.hpp"

namespace gci {

const char* to_string(SegmentType type) {
  switch (type) {
    case SegmentType::Isochore: return "isochore";
    case SegmentType::Adiabat: return "adiabat";
    case SegmentType::Isotherm: return "isotherm";
  }
  return "?";
}

ProcessRecord::ProcessRecord(RecordSample initial) {
  if (initial.p.size() != initial.levels.size()) {
    fail(ErrorKind::InvalidInput, "ProcessRecord", "population/level size mismatch");
  }
  refs_.push_back(reference_state(initial.levels, initial.baths, initial.p));
  bath_count_ = initial.baths.size();
  samples_.push_back(std::move(initial));
}

std::size_t ProcessRecord::begin_step(SegmentType type, std::string tag) {
  steps_.push_back(StepMeta{type, std::move(tag), kinds_.size(), kinds_.size(), std::nullopt});
  return steps_.size() - 1;
}

void ProcessRecord::append(IntervalKind kind, RecordSample next) {
  constexpr const char* op = "ProcessRecord::append";
  const RecordSample& last = samples_.back();
  if (steps_.empty()) fail(ErrorKind::InvalidInput, op, "no open step");
  if (!(next.t > last.t)) fail(ErrorKind::InvalidInput, op, "sample times must strictly increase");
  if (next.p.size() != last.p.size() || next.levels.size() != last.levels.size()) {
    fail(ErrorKind::InvalidInput, op, "size changes within a record");
  }
  if (kind == IntervalKind::Adiabat) {
    for (std::size_t j = 0; j < next.p.size(); ++j) {
      if (std::abs(next.p[j] - last.p[j]) > 1e-12) {
        fail(ErrorKind::InvalidInput, op, "populations change during an adiabat");
      }
    }
  }
  if (kind == IntervalKind::Isochore && (next.levels != last.levels || next.baths != last.baths)) {
    fail(ErrorKind::InvalidInput, op, "levels or baths change during an isochore");
  }
  refs_.push_back(reference_state(next.levels, next.baths, next.p));
  bath_count_ = std::max(bath_count_, next.baths.size());
  samples_.push_back(std::move(next));
  kinds_.push_back(kind);
  interval_steps_.push_back(steps_.size() - 1);
  steps_.back().end_interval = kinds_.size();
}

void ProcessRecord::set_step_gap(std::size_t step, DivergenceReport gap) {
  steps_.at(step).gap = gap;
}

void ProcessRecord::retarget_last(BathSet baths) {
  if (kinds_.empty() || kinds_.back() != IntervalKind::Adiabat) {
    fail(ErrorKind::InvalidInput, "ProcessRecord::retarget_last",
         "only the end of an adiabat can change its reference baths");
  }
  RecordSample& last = samples_.back();
  refs_.back() = reference_state(last.levels, baths, last.p);
  bath_count_ = std::max(bath_count_, baths.size());
  last.baths = std::move(baths);
}

namespace {

using SampleIntegrand = std::function<std::vector<double>(const ProcessRecord&, std::size_t)>;

struct Flows {
  std::vector<double> heat_by_bath;
  std::vector<double> heat_by_interval;
  std::vector<double> work_by_interval;

  double heat() const { return sum_of(heat_by_interval); }
  double work() const { return sum_of(work_by_interval); }
};

void check_resolution(double fine, double coarse, double scale, const IntegrationOptions& opts,
                      const char* op, const char* what) {
  const double estimate = std::abs(fine - coarse) / 3.0;
  const double budget = opts.tolerance * std::max(std::abs(fine), scale);
  if (estimate > budget) {
    const double factor = std::ceil(std::sqrt(estimate / std::max(budget, 1e-300)));
    fail(ErrorKind::Resolution, op,
         std::string(what) + " error estimate " + std::to_string(estimate) + " exceeds budget " +
             std::to_string(budget) + "; refine driven samples by a factor of at least " +
             std::to_string(static_cast<long long>(std::max(2.0, factor))));
  }
}

// Stieltjes trapezoid: Q = dp . avg h and W = avg p . dh per interval, so dH = Q + W exactly.
Flows integrate(const ProcessRecord& rec, const SampleIntegrand& integrand,
                const IntegrationOptions& opts, const char* op) {
  const std::size_t n = rec.levels();
  std::vector<std::vector<double>> h(rec.size());
  for (std::size_t s = 0; s < rec.size(); ++s) h[s] = integrand(rec, s);

  Flows out;
  std::vector<std::vector<double>> bath_terms(std::max<std::size_t>(rec.bath_count(), 1));
  out.heat_by_interval.resize(rec.intervals());
  out.work_by_interval.resize(rec.intervals());
  std::vector<double> q_terms(n);
  std::vector<double> w_terms(n);
  for (std::size_t i = 0; i < rec.intervals(); ++i) {
    const ProbVector& p0 = rec.sample(i).p;
    const ProbVector& p1 = rec.sample(i + 1).p;
    const ReferenceState& ref = rec.reference(i);
    for (std::size_t j = 0; j < n; ++j) {
      q_terms[j] = (p1[j] - p0[j]) * 0.5 * (h[i][j] + h[i + 1][j]);
      w_terms[j] = 0.5 * (p0[j] + p1[j]) * (h[i + 1][j] - h[i][j]);
      bath_terms[ref.level_bath[j]].push_back(q_terms[j]);
    }
    out.heat_by_interval[i] = sum_of(q_terms);
    out.work_by_interval[i] = sum_of(w_terms);
  }
  out.heat_by_bath.resize(bath_terms.size());
  for (std::size_t k = 0; k < bath_terms.size(); ++k) out.heat_by_bath[k] = sum_of(bath_terms[k]);

  // Richardson estimate on each maximal run of driven intervals.
  std::size_t i = 0;
  while (i < rec.intervals()) {
    if (rec.interval_kind(i) != IntervalKind::Driven) {
      ++i;
      continue;
    }
    std::size_t end = i;
    while (end < rec.intervals() && rec.interval_kind(end) == IntervalKind::Driven) ++end;
    const std::size_t m = end - i;
    if (m < 2) {
      fail(ErrorKind::Resolution, op,
           "a single driven interval admits no error estimate; refine driven samples by a factor "
           "of at least 2");
    }
    std::vector<double> qf, wf, qc, wc;
    double q_scale = 0.0;
    double w_scale = 0.0;
    for (std::size_t k = i; k < end; ++k) {
      qf.push_back(out.heat_by_interval[k]);
      wf.push_back(out.work_by_interval[k]);
      q_scale += std::abs(out.heat_by_interval[k]);
      w_scale += std::abs(out.work_by_interval[k]);
    }
    for (std::size_t k = i; k < end; k += 2) {
      const std::size_t a = k;
      const std::size_t b = std::min(k + 2, end);
      for (std::size_t j = 0; j < n; ++j) {
        const double pa = rec.sample(a).p[j];
        const double pb = rec.sample(b).p[j];
        qc.push_back((pb - pa) * 0.5 * (h[a][j] + h[b][j]));
        wc.push_back(0.5 * (pa + pb) * (h[b][j] - h[a][j]));
      }
    }
    check_resolution(sum_of(qf), sum_of(qc), q_scale, opts, op, "heat");
    check_resolution(sum_of(wf), sum_of(wc), w_scale, opts, op, "work");
    i = end;
  }
  return out;
}

SampleIntegrand moment_integrand(double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    fail(ErrorKind::Domain, "alpha_heat", "alpha must be finite and >= 0");
  }
  return [alpha](const ProcessRecord& rec, std::size_t s) {
    const ReferenceState& ref = rec.reference(s);
    std::vector<double> h(ref.shifted_energies.size());
    for (std::size_t j = 0; j < h.size(); ++j) {
      h[j] = signed_power(ref.shifted_energies[j], alpha, "alpha_heat");
    }
    return h;
  };
}

// x_j = beta_k (E_j - F_k) = -ln p_ref,j, finite even where p_ref underflows.
std::vector<double> reference_surprisal(const ReferenceState& ref) {
  std::vector<double> x(ref.shifted_energies.size());
  for (std::size_t j = 0; j < x.size(); ++j) x[j] = ref.level_beta[j] * ref.shifted_energies[j];
  return x;
}

}  // namespace

std::vector<double> reference_gradient(const Generator& gen, const ReferenceState& ref) {
  const std::vector<double> x = reference_surprisal(ref);
  std::vector<double> g(x.size());
  const double a = gen.parameter();
  if (gen.shannon_limit()) return x;
  switch (gen.family()) {
    case GeneratorFamily::Alpha:
      for (std::size_t j = 0; j < x.size(); ++j) g[j] = a == 0.0 ? 1.0 : std::pow(x[j], a);
      break;
    case GeneratorFamily::Tsallis:
      for (std::size_t j = 0; j < x.size(); ++j) {
        g[j] = -a * std::expm1(-(a - 1.0) * x[j]) / (a - 1.0);
      }
      break;
    case GeneratorFamily::Renyi: {
      std::vector<double> terms(x.size());
      for (std::size_t j = 0; j < x.size(); ++j) {
        terms[j] = std::exp(-x[j]) * std::expm1((1.0 - a) * x[j]);
      }
      const double z = 1.0 + sum_of(terms);
      for (std::size_t j = 0; j < x.size(); ++j) {
        g[j] = a * std::expm1((1.0 - a) * x[j]) / ((1.0 - a) * z);
      }
      break;
    }
    case GeneratorFamily::Shannon: break;
  }
  return g;
}

namespace {

SampleIntegrand generator_integrand(const Generator& gen) {
  return [gen](const ProcessRecord& rec, std::size_t s) {
    return reference_gradient(gen, rec.reference(s));
  };
}

}  // namespace

std::vector<double> alpha_heat(const ProcessRecord& rec, double alpha,
                               const IntegrationOptions& opts) {
  return integrate(rec, moment_integrand(alpha), opts, "alpha_heat").heat_by_bath;
}

double alpha_work(const ProcessRecord& rec, double alpha, const IntegrationOptions& opts) {
  return integrate(rec, moment_integrand(alpha), opts, "alpha_work").work();
}

double generator_heat(const ProcessRecord& rec, const Generator& gen,
                      const IntegrationOptions& opts) {
  return integrate(rec, generator_integrand(gen), opts, "clausius_lhs").heat();
}

double clausius_lhs(const ProcessRecord& rec, const Generator& gen,
                    const IntegrationOptions& opts) {
  const double ds = entropy_value(gen, rec.back().p) - entropy_value(gen, rec.front().p);
  return ds - generator_heat(rec, gen, opts);
}

Ledger ledger(const ProcessRecord& rec, double alpha, const IntegrationOptions& opts) {
  const Flows f = integrate(rec, moment_integrand(alpha), opts, "ledger");
  const auto h_end = moment_integrand(alpha)(rec, rec.size() - 1);
  const auto h_begin = moment_integrand(alpha)(rec, 0);
  std::vector<double> terms;
  for (std::size_t j = 0; j < h_end.size(); ++j) {
    terms.push_back(rec.back().p[j] * h_end[j]);
    terms.push_back(-rec.front().p[j] * h_begin[j]);
  }
  const Generator gen = Generator::alpha_entropy(alpha);
  const double ds = entropy_value(gen, rec.back().p) - entropy_value(gen, rec.front().p);
  return Ledger{f.heat_by_bath, f.heat(), f.work(), sum_of(terms), ds,
                ds - generator_heat(rec, gen, opts)};
}

std::vector<StepFlows> step_flows(const ProcessRecord& rec, double alpha,
                                  const IntegrationOptions& opts) {
  const Flows f = integrate(rec, moment_integrand(alpha), opts, "step_flows");
  std::vector<StepFlows> out;
  for (const StepMeta& s : rec.steps()) {
    std::vector<double> q(f.heat_by_interval.begin() + static_cast<std::ptrdiff_t>(s.first_interval),
                          f.heat_by_interval.begin() + static_cast<std::ptrdiff_t>(s.end_interval));
    std::vector<double> w(f.work_by_interval.begin() + static_cast<std::ptrdiff_t>(s.first_interval),
                          f.work_by_interval.begin() + static_cast<std::ptrdiff_t>(s.end_interval));
    out.push_back(StepFlows{sum_of(q), sum_of(w)});
  }
  return out;
}

std::map<std::string, StepFlows> flows_by_tag(const ProcessRecord& rec, double alpha,
                                              const IntegrationOptions& opts) {
  const std::vector<StepFlows> per_step = step_flows(rec, alpha, opts);
  std::map<std::string, std::vector<double>> q;
  std::map<std::string, std::vector<double>> w;
  for (std::size_t i = 0; i < per_step.size(); ++i) {
    const std::string& tag = rec.steps()[i].tag;
    q[tag].push_back(per_step[i].heat);
    w[tag].push_back(per_step[i].work);
  }
  std::map<std::string, StepFlows> out;
  for (const auto& [tag, values] : q) out[tag] = StepFlows{sum_of(values), sum_of(w[tag])};
  return out;
}

double tsallis_heat(const ProcessRecord& rec, double alpha_tilde, const IntegrationOptions& opts) {
  return generator_heat(rec, Generator::tsallis(alpha_tilde), opts);
}

double renyi_heat(const ProcessRecord& rec, double alpha_bar, const IntegrationOptions& opts) {
  return generator_heat(rec, Generator::renyi(alpha_bar), opts);
}

double tsallis_observable(const ProbVector& p, const ThermalContext& ctx, double alpha_tilde) {
  std::vector<double> terms(p.size());
  for (std::size_t j = 0; j < p.size(); ++j) {
    terms[j] = p[j] * std::exp(-(alpha_tilde - 1.0) * ctx.beta * ctx.shifted_energies[j]);
  }
  return sum_of(terms);
}

double tsallis_observable_factored(const ProbVector& p, const LevelSystem& levels,
                                   const ThermalContext& ctx, double alpha_tilde, double e_ref) {
  const double k = -(alpha_tilde - 1.0) * ctx.beta;
  std::vector<double> terms(p.size());
  for (std::size_t j = 0; j < p.size(); ++j) terms[j] = p[j] * std::exp(k * (levels[j] - e_ref));
  return std::exp(k * (e_ref - ctx.free_energy)) * sum_of(terms);
}

double alpha_free_energy(const ThermalContext& ctx, double alpha) {
  return noneq_alpha_free_energy(ctx.gibbs, ctx, alpha);
}

double noneq_alpha_free_energy(const ProbVector& p, const ThermalContext& ctx, double alpha) {
  const Generator gen = Generator::alpha_entropy(alpha);
  return shifted_moment(p, ctx, alpha) -
         std::pow(ctx.temperature(), alpha) * entropy_value(gen, p);
}

HighTBound high_T_bound(const ProbVector& p_i, const ProbVector& p_f, const LevelSystem& levels,
                        double temperature, double alpha_tilde, double margin) {
  constexpr const char* op = "high_T_bound";
  if (!(alpha_tilde > 0.0)) fail(ErrorKind::Parameter, op, "alpha_tilde must be > 0");
  if (!(temperature >= kMinTemperature)) fail(ErrorKind::InvalidInput, op, "temperature < 1e-12");
  const ThermalContext ctx = gibbs_state(levels, 1.0 / temperature);
  const Generator gen = Generator::tsallis(alpha_tilde);
  const double ds = entropy_value(gen, p_f) - entropy_value(gen, p_i);
  const double emin = levels.min();
  const double mid_minus_f = 0.5 * (levels.max() - emin) + ctx.shifted_energies[levels.argmin()];
  const double bound =
      temperature * ds * std::exp(ctx.beta * (alpha_tilde - 1.0) * mid_minus_f) / alpha_tilde;
  const double scale = std::abs(alpha_tilde - 1.0) * 0.5 * (levels.max() - emin);
  const double ratio = scale > 0.0 ? temperature / scale : std::numeric_limits<double>::infinity();
  return HighTBound{bound, ratio >= margin, ratio};
}

double markov_tail(const ProbVector& p, const ThermalContext& ctx, double alpha_tilde, double xi) {
  if (!(xi > 0.0)) fail(ErrorKind::Parameter, "markov_tail", "xi must be > 0");
  if (std::isinf(xi)) return 0.0;
  return std::clamp(tsallis_observable(p, ctx, alpha_tilde) / xi, 0.0, 1.0);
}

double rt_monotone(const ProbVector& p, const ThermalContext& ctx, double alpha_breve) {
  constexpr const char* op = "rt_monotone";
  if (p.size() != ctx.gibbs.size()) fail(ErrorKind::InvalidInput, op, "size mismatch");
  const double a = alpha_breve;
  double d = 0.0;
  if (std::abs(a - 1.0) < 1e-8) {
    d = bregman_divergence(Generator::shannon(), p, ctx.gibbs);
  } else if (a == 0.0) {
    std::vector<double> q;
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (p[j] > 0.0) q.push_back(ctx.gibbs[j]);
    }
    d = -std::log(sum_of(q));
  } else {
    std::vector<double> terms;
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (p[j] == 0.0) {
        if (a < 0.0) fail(ErrorKind::Domain, op, "zero entry with negative exponent");
        continue;
      }
      const double log_q = -ctx.beta * ctx.shifted_energies[j];
      terms.push_back(std::exp(a * std::log(p[j]) + (1.0 - a) * log_q));
    }
    const double sign = a > 0.0 ? 1.0 : -1.0;
    d = sign / (a - 1.0) * std::log(sum_of(terms));
  }
  return ctx.free_energy + ctx.temperature() * d;
}

double conversion_factor(double gap, double shifted_low, double shifted_high, double alpha) {
  const double den = signed_power(shifted_high, alpha, "conversion_factor") -
                     signed_power(shifted_low, alpha, "conversion_factor");
  if (std::abs(den) < 1e-14) {
    fail(ErrorKind::DegenerateTransition, "conversion_factor", "alpha-moment difference below 1e-14");
  }
  return gap / den;
}

}  // namespace gci
