#include "gci/cli/reproduce.hpp"

#include <cmath>
#include <complex>
#include <ostream>
#include <sstream>

#include "gci/accounting.hpp"
#include "gci/cli/scenario.hpp"
#include "gci/format.hpp"
#include "gci/protocols.hpp"
#include "gci/quantum.hpp"

namespace gci::cli {

namespace {

std::string f(double x) { return format_double(x); }

Check within(const std::string& name, double measured, double expected, double tol) {
  const bool ok = std::abs(measured - expected) <= tol;
  return {name, ok, "measured " + f(measured) + " expected " + f(expected) + " +/- " + f(tol)};
}

Report fig2() {
  Report r;
  const LevelSystem levels{-0.5, 0.0, 0.5};
  const double temp = 3.0;
  const ProbVector p_i{0.5, 0.5, 0.0};
  const ThermalContext ctx = gibbs_state(levels, 1.0 / temp);
  std::vector<double> terms;
  for (std::size_t j = 0; j < 3; ++j) terms.push_back((ctx.gibbs[j] - p_i[j]) * levels[j]);
  const double q1 = sum_of(terms);
  const double at_one = high_T_bound(p_i, ctx.gibbs, levels, temp, 1.0).bound;
  r.checks.push_back(within("fig2/bound_at_1", at_one, 1.189, 1e-3));
  r.checks.push_back(within("fig2/actual_q1", q1, 0.1947, 1e-3));

  // Longest run of grid points with q1 < bound < bound(1).
  double best_lo = 0.0;
  double best_hi = 0.0;
  std::size_t best = 0;
  std::size_t run = 0;
  double run_lo = 0.0;
  const std::size_t points = 400;
  for (std::size_t i = 0; i <= points; ++i) {
    const double a = 0.5 + 3.5 * static_cast<double>(i) / static_cast<double>(points);
    const double b = high_T_bound(p_i, ctx.gibbs, levels, temp, a).bound;
    if (b < at_one && b > q1) {
      if (run == 0) run_lo = a;
      ++run;
      if (run > best) {
        best = run;
        best_lo = run_lo;
        best_hi = a;
      }
    } else {
      run = 0;
    }
  }
  r.checks.push_back({"fig2/bound_interval", best >= 2,
                      best >= 2 ? "q1 < bound < bound(1) for alpha_tilde in [" + f(best_lo) + ", " +
                                      f(best_hi) + "]"
                                : "no alpha_tilde interval with q1 < bound < bound(1)"});
  return r;
}

double naive_otto_bound(double t_c, double t_h, double alpha) {
  // F from a direct log of the partition sum; underflows to 0 at low T.
  const auto k = [&](double e0, double e1, double t) {
    const double fe = -t * std::log(std::exp(-e0 / t) + std::exp(-e1 / t));
    return (e1 - e0) / (std::pow(e1 - fe, alpha) - std::pow(e0 - fe, alpha));
  };
  return 1.0 - std::pow(t_c / t_h, alpha) * k(0.0, 1.0, t_c) / k(0.0, 2.0, t_h);
}

Report fig3() {
  Report r;
  const MachineSpec spec{LevelSystem{0.0, 1.0}, LevelSystem{0.0, 2.0}, 0.03, 0.12};
  r.checks.push_back(within("fig3/carnot", otto_alpha_bound(spec, 1.0), 0.75, 1e-12));
  const OttoResult cycle = otto_cycle(spec);
  const double eta = cycle.efficiency.value_or(std::nan(""));
  r.checks.push_back(within("fig3/actual", eta, 0.5, 1e-10));

  double lo = 0.0;
  double hi = 0.0;
  std::size_t inside = 0;
  const std::size_t points = 300;
  for (std::size_t i = 0; i < points; ++i) {
    const double a = std::exp(std::log(0.01) + (std::log(3.0) - std::log(0.01)) * static_cast<double>(i) /
                                                  static_cast<double>(points - 1));
    if (a >= 1.0) break;
    const double b = otto_alpha_bound(spec, a);
    if (b < 0.75 && b >= 0.5) {
      if (inside == 0) lo = a;
      hi = a;
      ++inside;
    }
  }
  r.checks.push_back({"fig3/bound_between", inside > 0,
                      inside > 0 ? "0.5 <= bound < 0.75 on " + std::to_string(inside) + " grid points in [" +
                                       f(lo) + ", " + f(hi) + "]"
                                 : "no alpha below 1 with 0.5 <= bound < 0.75"});

  const MachineSpec scaled{spec.cold, spec.hot, spec.t_cold / 3.0, spec.t_hot / 3.0};
  const std::vector<double> alphas{0.5, 0.1, 0.05, 0.01};
  std::vector<double> gaps;
  std::string listing;
  for (double a : alphas) {
    const double b = otto_alpha_bound(scaled, a);
    gaps.push_back(b - 0.5);
    listing += (listing.empty() ? "" : ", ") + f(a) + " -> " + f(b);
  }
  r.checks.push_back(within("fig3/scaled_limit", 0.5 + gaps.back(), 0.5, 0.02));
  bool monotone = true;
  for (std::size_t i = 1; i < gaps.size(); ++i) monotone = monotone && std::abs(gaps[i]) < std::abs(gaps[i - 1]);
  r.checks.push_back({"fig3/scaled_monotone", monotone, "bounds at T/3: " + listing});
  std::string naive;
  for (double a : alphas) {
    naive += (naive.empty() ? "" : ", ") + f(a) + " -> " + f(naive_otto_bound(scaled.t_cold, scaled.t_hot, a));
  }
  r.notes.push_back("fig3 scaled bounds with F from an unguarded log of the partition sum: " + naive);
  return r;
}

Report halfzero() {
  Report r;
  const HalfZeroResult h = half_zero_machine(0.5, 1.0, LevelSystem{0.0, 1.0, 2.0}, 1.0 / 20.0);
  const double expected[] = {0.0, 1.986, 4.05};
  for (std::size_t j = 0; j < 3; ++j) {
    r.checks.push_back(within("halfzero/e_hot_" + std::to_string(j), h.hot_levels[j], expected[j], 0.01));
  }
  r.checks.push_back(within("halfzero/q1_cold", h.q1_cold, 0.0, 1e-12));
  r.checks.push_back(within("halfzero/ratio", h.ratio, 0.234, 0.005));
  r.checks.push_back({"halfzero/bound", h.ratio <= h.bound && std::abs(h.bound - 0.25) <= 1e-15,
                      "ratio " + f(h.ratio) + " against bound " + f(h.bound)});
  return r;
}

Report qutrit() {
  Report r;
  const ExtractionResult x =
      coherence_extraction_protocol(DensityMatrix(qutrit_rho0()), qutrit_levels(), qutrit_interaction(), 1.0);
  r.checks.push_back(within("qutrit/t_f", x.t_f, 0.204, 0.005));
  r.checks.push_back(within("qutrit/q1", x.q1, 0.0, 1e-8));
  r.checks.push_back(within("qutrit/ratio", x.ratio, 1.92, 0.05));
  r.notes.push_back("qutrit q2 " + f(x.q2) + ", bound T^2 D_2 " + f(x.bound2));
  return r;
}

Report isotherm_convergence() {
  Report r;
  const LevelSchedule path = LevelSchedule::linear(LevelSystem{0.0, 1.0, 2.0}, LevelSystem{0.0, 0.5, 3.0});
  const std::vector<double> ns{1e2, 1e3, 1e4};
  for (double alpha : {1.0, 2.0}) {
    std::vector<double> residuals;
    for (double n : ns) {
      const ProcessRecord rec = staircase_isotherm(path, 1.0, 1.0, static_cast<std::size_t>(n));
      residuals.push_back(std::abs(clausius_lhs(rec, Generator::alpha_entropy(alpha))));
    }
    const double slope = log_log_slope(ns, residuals);
    Check c = within("isotherm-convergence/slope_alpha_" + f(alpha), slope, -1.0, 0.2);
    c.detail += " (residuals " + f(residuals[0]) + ", " + f(residuals[1]) + ", " + f(residuals[2]) + ")";
    r.checks.push_back(c);
  }
  return r;
}

}  // namespace

bool Report::passed() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

const std::vector<std::string>& target_names() {
  static const std::vector<std::string> names{"fig2", "fig3", "halfzero", "qutrit", "isotherm-convergence"};
  return names;
}

Target parse_target(const std::string& name) {
  if (name == "fig2") return Target::Fig2;
  if (name == "fig3") return Target::Fig3;
  if (name == "halfzero") return Target::HalfZero;
  if (name == "qutrit") return Target::Qutrit;
  if (name == "isotherm-convergence") return Target::IsothermConvergence;
  throw ScenarioError("target", 0, "unknown target '" + name +
                                       "'; expected fig2, fig3, halfzero, qutrit or isotherm-convergence");
}

Report reproduce(Target target) {
  switch (target) {
    case Target::Fig2: return fig2();
    case Target::Fig3: return fig3();
    case Target::HalfZero: return halfzero();
    case Target::Qutrit: return qutrit();
    case Target::IsothermConvergence: break;
  }
  return isotherm_convergence();
}

void print_report(std::ostream& os, const Report& report) {
  for (const auto& c : report.checks) os << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
  for (const auto& n : report.notes) os << "note: " << n << "\n";
}

CMatrix qutrit_rho0() {
  CMatrix m(3, 3);
  m << 1.0 / 6.0, 1.0 / 400.0, 0.0,
       1.0 / 400.0, 1.0 / 3.0, 1.0 / 20.0,
       0.0, 1.0 / 20.0, 1.0 / 2.0;
  return m;
}

LevelSystem qutrit_levels() { return LevelSystem{std::log(3.0), std::log(1.5), 0.0}; }

CMatrix qutrit_interaction() {
  const std::complex<double> i(0.0, 1.0);
  CMatrix m(3, 3);
  m << 0.0, i, 0.0,
       -i, 0.0, -i,
       0.0, i, 0.0;
  return m;
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0.0;
  double sy = 0.0;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double lx = std::log(x[k]);
    const double ly = std::log(y[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace gci::cli
