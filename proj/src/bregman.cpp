#include "gci/bregman.hpp"

#include <cmath>
#include <vector>

#include "gci/errors.hpp"

namespace gci {

namespace {

// Scalar primitive G with G(0) = 0 and its derivative, for separable families. Constants in the
// derivative are dropped: they cancel against zero-sum differences.
struct Primitive {
  const Generator& gen;

  double value(double x) const {
    if (!(x > 0.0)) return 0.0;
    const double a = gen.parameter();
    if (gen.shannon_limit()) return -x * std::log(x);
    switch (gen.family()) {
      case GeneratorFamily::Alpha:
        if (x <= 1e-300) return 0.0;
        return a == 0.0 ? x : upper_incomplete_gamma(a + 1.0, -std::log(x));
      case GeneratorFamily::Tsallis: return -x * std::expm1((a - 1.0) * std::log(x)) / (a - 1.0);
      default: break;
    }
    return 0.0;
  }

  double slope(double x) const {
    const double a = gen.parameter();
    if (gen.shannon_limit()) return -std::log(x);
    switch (gen.family()) {
      case GeneratorFamily::Alpha: return a == 0.0 ? 1.0 : std::pow(-std::log(x), a);
      case GeneratorFamily::Tsallis: return -a * std::expm1((a - 1.0) * std::log(x)) / (a - 1.0);
      default: break;
    }
    return 0.0;
  }
};

}  // namespace

double bregman_of_spectra(const Generator& gen, std::span<const double> p2,
                          std::span<const double> p1) {
  constexpr const char* op = "bregman_divergence";
  if (p1.size() != p2.size()) fail(ErrorKind::InvalidInput, op, "size mismatch");
  for (double x : p1) {
    if (!(x >= kMinReference)) {
      fail(ErrorKind::SingularReference, op, "reference entry below 1e-12");
    }
  }
  std::vector<double> terms(p1.size());
  if (gen.shannon_limit()) {
    // Generalized KL terms are individually non-negative.
    for (std::size_t j = 0; j < p1.size(); ++j) {
      const double x = p2[j];
      const double y = p1[j];
      terms[j] = (x > 0.0 ? x * std::log(x / y) : 0.0) - x + y;
    }
    return sum_of(terms);
  }
  if (gen.separable()) {
    const Primitive g{gen};
    for (std::size_t j = 0; j < p1.size(); ++j) {
      terms[j] = g.value(p1[j]) - g.value(p2[j]) + (p2[j] - p1[j]) * g.slope(p1[j]);
    }
    return sum_of(terms);
  }
  const std::vector<double> grad = centered_gradient(gen, p1);
  for (std::size_t j = 0; j < p1.size(); ++j) terms[j] = (p2[j] - p1[j]) * grad[j];
  return entropy_of_spectrum(gen, p1) - entropy_of_spectrum(gen, p2) + sum_of(terms);
}

double bregman_divergence(const Generator& gen, const ProbVector& p2, const ProbVector& p1) {
  return bregman_of_spectra(gen, p2.span(), p1.span());
}

DivergenceReport contractivity_gap(const Generator& gen, const ProbVector& p_i,
                                   const ProbVector& p_f, const ProbVector& reference) {
  const double di = bregman_divergence(gen, p_i, reference);
  const double df = bregman_divergence(gen, p_f, reference);
  return DivergenceReport{di, df, di - df};
}

double isochore_identity_residual(double alpha, const ProbVector& p_i, const ProbVector& p_f,
                                  const LevelSystem& levels, double beta) {
  if (p_i.size() != levels.size() || p_f.size() != levels.size()) {
    fail(ErrorKind::InvalidInput, "isochore_identity_residual", "size mismatch");
  }
  const Generator gen = Generator::alpha_entropy(alpha);
  const ThermalContext ctx = gibbs_state(levels, beta);
  const double ds = entropy_value(gen, p_f) - entropy_value(gen, p_i);
  const double q = shifted_moment(p_f, ctx, alpha) - shifted_moment(p_i, ctx, alpha);
  const double lhs = ds - std::pow(beta, alpha) * q;
  const double rhs =
      bregman_divergence(gen, p_i, ctx.gibbs) - bregman_divergence(gen, p_f, ctx.gibbs);
  return std::abs(lhs - rhs);
}

double available_work(double alpha, const ProbVector& p, const ThermalContext& ctx) {
  const Generator gen = Generator::alpha_entropy(alpha);
  return std::pow(ctx.temperature(), alpha) * bregman_divergence(gen, p, ctx.gibbs);
}

}  // namespace gci
