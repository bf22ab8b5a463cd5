#pragma once

#include <span>

#include "gci/core.hpp"
#include "gci/entropy.hpp"

namespace gci {

inline constexpr double kMinReference = 1e-12;
inline constexpr double kGapTolerance = 1e-10;

struct DivergenceReport {
  double d_initial;
  double d_final;
  double gap;

  bool valid() const { return gap >= -kGapTolerance; }
};

// D(p2, p1) = S(p1) - S(p2) + (p2 - p1) . grad S(p1); p1 entries must be >= 1e-12.
double bregman_divergence(const Generator& gen, const ProbVector& p2, const ProbVector& p1);
double bregman_of_spectra(const Generator& gen, std::span<const double> p2,
                          std::span<const double> p1);

DivergenceReport contractivity_gap(const Generator& gen, const ProbVector& p_i,
                                   const ProbVector& p_f, const ProbVector& reference);

// |(dS_alpha - beta^alpha Q_alpha) - (D(p_i, p_beta) - D(p_f, p_beta))| for one isochore.
double isochore_identity_residual(double alpha, const ProbVector& p_i, const ProbVector& p_f,
                                  const LevelSystem& levels, double beta);

// A_alpha = T^alpha D_alpha(p, p_beta).
double available_work(double alpha, const ProbVector& p, const ThermalContext& ctx);

}  // namespace gci
