#pragma once

#include <span>
#include <string>
#include <vector>

#include "gci/core.hpp"

namespace gci {

enum class GeneratorFamily { Alpha, Tsallis, Renyi, Shannon };

// Concave entropy generator; S vanishes on deterministic states for every family.
class Generator {
 public:
  static Generator alpha_entropy(double alpha);  // alpha >= 0 (alpha = 0 gives S == 0)
  static Generator tsallis(double alpha_tilde);  // alpha_tilde >= 0
  static Generator renyi(double alpha_bar);      // alpha_bar in [0, 1]
  static Generator shannon();

  GeneratorFamily family() const noexcept { return family_; }
  double parameter() const noexcept { return parameter_; }
  bool separable() const noexcept { return family_ != GeneratorFamily::Renyi; }
  // Tsallis/Renyi within 1e-8 of 1 evaluate through the Shannon branch.
  bool shannon_limit() const noexcept;
  std::string name() const;

  friend bool operator==(const Generator&, const Generator&) = default;

 private:
  Generator(GeneratorFamily f, double p) : family_(f), parameter_(p) {}
  GeneratorFamily family_;
  double parameter_;
};

// Gamma(s, x) = int_x^inf t^{s-1} e^{-t} dt, relative error <= 1e-12.
double upper_incomplete_gamma(double s, double x);

double entropy_value(const Generator& gen, const ProbVector& p);
// Partial derivatives of the unconstrained functional.
std::vector<double> generator_gradient(const Generator& gen, const ProbVector& p);

// Spectrum-level forms used by the matrix layer; entries must lie in [0, 1] and sum to 1.
double entropy_of_spectrum(const Generator& gen, std::span<const double> p);
// Gradient shifted by a constant vector (Renyi only) so it stays finite near abar = 1;
// every quantity paired with a zero-sum direction is unchanged.
std::vector<double> centered_gradient(const Generator& gen, std::span<const double> p);
std::vector<double> gradient_of_spectrum(const Generator& gen, std::span<const double> p);

}  // namespace gci
