#include "gci/entropy.hpp"

#include <cmath>
#include <limits>

#include "gci/errors.hpp"
#include "gci/format.hpp"

namespace gci {

namespace {

constexpr double kLimitWindow = 1e-8;
constexpr double kNegligibleProb = 1e-300;

void check_parameter(bool ok, const char* op, const std::string& what) {
  if (!ok) fail(ErrorKind::UnsupportedGenerator, op, what);
}

}  // namespace

Generator Generator::alpha_entropy(double alpha) {
  check_parameter(std::isfinite(alpha) && alpha >= 0.0, "Generator::alpha_entropy",
                  "alpha must be finite and >= 0");
  return Generator(GeneratorFamily::Alpha, alpha);
}

Generator Generator::tsallis(double alpha_tilde) {
  check_parameter(std::isfinite(alpha_tilde) && alpha_tilde >= 0.0, "Generator::tsallis",
                  "alpha_tilde must be finite and >= 0");
  return Generator(GeneratorFamily::Tsallis, alpha_tilde);
}

Generator Generator::renyi(double alpha_bar) {
  check_parameter(alpha_bar >= 0.0 && alpha_bar <= 1.0, "Generator::renyi",
                  "alpha_bar must lie in [0, 1] (concavity)");
  return Generator(GeneratorFamily::Renyi, alpha_bar);
}

Generator Generator::shannon() { return Generator(GeneratorFamily::Shannon, 1.0); }

bool Generator::shannon_limit() const noexcept {
  switch (family_) {
    case GeneratorFamily::Shannon: return true;
    case GeneratorFamily::Tsallis:
    case GeneratorFamily::Renyi: return std::abs(parameter_ - 1.0) < kLimitWindow;
    case GeneratorFamily::Alpha: return false;
  }
  return false;
}

std::string Generator::name() const {
  switch (family_) {
    case GeneratorFamily::Alpha: return "alpha(" + format_double(parameter_) + ")";
    case GeneratorFamily::Tsallis: return "tsallis(" + format_double(parameter_) + ")";
    case GeneratorFamily::Renyi: return "renyi(" + format_double(parameter_) + ")";
    case GeneratorFamily::Shannon: return "shannon";
  }
  return "?";
}

double upper_incomplete_gamma(double s, double x) {
  constexpr const char* op = "upper_incomplete_gamma";
  if (!std::isfinite(s) || std::isnan(x)) fail(ErrorKind::Domain, op, "non-finite input");
  if (!(s > 0.0)) fail(ErrorKind::Domain, op, "s must be > 0");
  if (!(x >= 0.0)) fail(ErrorKind::Domain, op, "x must be >= 0");
  if (std::isinf(x)) return 0.0;
  if (x == 0.0) return std::tgamma(s);
  const double log_prefactor = -x + s * std::log(x);
  constexpr double eps = 1e-17;
  constexpr int max_iter = 100000;
  if (x < s + 1.0) {
    // Lower series: gamma(s, x) = e^{-x} x^s sum_n x^n / (s (s+1) ... (s+n)).
    double term = 1.0 / s;
    double sum = term;
    for (int n = 1; n < max_iter; ++n) {
      term *= x / (s + n);
      sum += term;
      if (std::abs(term) < std::abs(sum) * eps) {
        return std::tgamma(s) - std::exp(log_prefactor) * sum;
      }
    }
    fail(ErrorKind::Numeric, op, "series did not converge");
  }
  // Modified Lentz continued fraction for Gamma(s, x) e^{x} x^{-s}.
  constexpr double tiny = std::numeric_limits<double>::min() / eps;
  double b = x + 1.0 - s;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < max_iter; ++i) {
    const double an = -i * (i - s);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < eps) return std::exp(log_prefactor) * h;
  }
  fail(ErrorKind::Numeric, op, "continued fraction did not converge");
}

double entropy_of_spectrum(const Generator& gen, std::span<const double> p) {
  std::vector<double> terms;
  terms.reserve(p.size() + 1);
  const double a = gen.parameter();
  if (gen.shannon_limit()) {
    for (double x : p) {
      if (x > 0.0) terms.push_back(-x * std::log(x));
    }
    return sum_of(terms);
  }
  switch (gen.family()) {
    case GeneratorFamily::Alpha: {
      if (a == 0.0) return 0.0;
      // Gamma(a+1, -ln x) is the primitive int_0^x (-ln t)^a dt.
      for (double x : p) {
        if (x > kNegligibleProb) terms.push_back(upper_incomplete_gamma(a + 1.0, -std::log(x)));
      }
      terms.push_back(-std::tgamma(a + 1.0));
      return sum_of(terms);
    }
    case GeneratorFamily::Tsallis: {
      // (1 - sum x^a)/(a-1) = -sum x expm1((a-1) ln x)/(a-1).
      for (double x : p) {
        if (x > 0.0) terms.push_back(-x * std::expm1((a - 1.0) * std::log(x)) / (a - 1.0));
      }
      return sum_of(terms);
    }
    case GeneratorFamily::Renyi: {
      for (double x : p) {
        if (x > 0.0) terms.push_back(x * std::expm1((a - 1.0) * std::log(x)));
      }
      return std::log1p(sum_of(terms)) / (1.0 - a);
    }
    case GeneratorFamily::Shannon: break;
  }
  return 0.0;
}

namespace {

double renyi_power_sum(double a, std::span<const double> p) {
  std::vector<double> terms;
  for (double x : p) {
    if (x > 0.0) terms.push_back(x * std::expm1((a - 1.0) * std::log(x)));
  }
  return 1.0 + sum_of(terms);
}

std::vector<double> gradient_impl(const Generator& gen, std::span<const double> p, bool centered,
                                  const char* op) {
  for (double x : p) {
    if (!(x > 0.0)) fail(ErrorKind::SingularGradient, op, "gradient diverges at a zero entry");
  }
  std::vector<double> g(p.size());
  const double a = gen.parameter();
  if (gen.shannon_limit()) {
    for (std::size_t j = 0; j < p.size(); ++j) g[j] = -std::log(p[j]) - 1.0;
    return g;
  }
  switch (gen.family()) {
    case GeneratorFamily::Alpha:
      for (std::size_t j = 0; j < p.size(); ++j) {
        const double x = -std::log(p[j]);
        g[j] = a == 0.0 ? 1.0 : std::pow(x, a);
      }
      break;
    case GeneratorFamily::Tsallis:
      for (std::size_t j = 0; j < p.size(); ++j) {
        g[j] = -a * std::expm1((a - 1.0) * std::log(p[j])) / (a - 1.0) - 1.0;
      }
      break;
    case GeneratorFamily::Renyi: {
      const double z = renyi_power_sum(a, p);
      for (std::size_t j = 0; j < p.size(); ++j) {
        const double em1 = std::expm1((a - 1.0) * std::log(p[j]));
        g[j] = centered ? a * em1 / ((1.0 - a) * z) : a * (em1 + 1.0) / ((1.0 - a) * z);
      }
      break;
    }
    case GeneratorFamily::Shannon: break;
  }
  return g;
}

}  // namespace

std::vector<double> gradient_of_spectrum(const Generator& gen, std::span<const double> p) {
  return gradient_impl(gen, p, false, "generator_gradient");
}

std::vector<double> centered_gradient(const Generator& gen, std::span<const double> p) {
  return gradient_impl(gen, p, true, "generator_gradient");
}

double entropy_value(const Generator& gen, const ProbVector& p) {
  return entropy_of_spectrum(gen, p.span());
}

std::vector<double> generator_gradient(const Generator& gen, const ProbVector& p) {
  return gradient_of_spectrum(gen, p.span());
}

}  // namespace gci
