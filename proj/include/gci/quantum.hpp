#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "gci/bregman.hpp"
#include "gci/core.hpp"
#include "gci/entropy.hpp"
#include "gci/linalg.hpp"

namespace gci {

// Hermitian, unit trace, spectrum in [-1e-10, 1 + 1e-10]; the stored spectrum is clamped to [0, 1].
// The energy eigenbasis is the computational basis throughout this module.
class DensityMatrix {
 public:
  explicit DensityMatrix(const CMatrix& rho);

  static DensityMatrix diagonal(const ProbVector& p);
  static DensityMatrix pure(const CVector& psi);

  Eigen::Index dim() const noexcept { return rho_.rows(); }
  const CMatrix& matrix() const noexcept { return rho_; }
  const HermitianEigen& eigen() const noexcept { return eig_; }
  std::vector<double> spectrum() const;
  ProbVector populations() const;
  // rho_Lambda: the diagonal part.
  DensityMatrix dephased() const;
  DensityMatrix evolved(const CMatrix& u) const;

 private:
  CMatrix rho_;
  HermitianEigen eig_;
};

double matrix_entropy(const Generator& gen, const DensityMatrix& rho);
// S(rho1) - S(rho2) + tr[(rho2 - rho1) g(rho1)]; rho1 eigenvalues must be >= 1e-12.
double matrix_bregman(const Generator& gen, const DensityMatrix& rho2, const DensityMatrix& rho1);
// S(rho_Lambda) - S(rho).
double coherence_measure(const Generator& gen, const DensityMatrix& rho);
// T^alpha D_alpha(rho, rho_Lambda).
double max_coherence_heat(double alpha, const DensityMatrix& rho, double temperature);

enum class QuantumIntervalKind { Unitary, Isochore };

struct QuantumSample {
  double t;
  DensityMatrix rho;
  LevelSystem levels;
  double beta;
};

// Unitary intervals may change the levels (work); isochores keep levels and beta fixed (heat).
class QuantumRecord {
 public:
  explicit QuantumRecord(QuantumSample initial);

  void append_unitary(const CMatrix& u, const LevelSystem& levels_after, double dt);
  void append_isochore(const DensityMatrix& rho_after, double dt);

  std::size_t size() const noexcept { return samples_.size(); }
  const QuantumSample& sample(std::size_t i) const { return samples_[i]; }
  const QuantumSample& front() const { return samples_.front(); }
  const QuantumSample& back() const { return samples_.back(); }
  QuantumIntervalKind interval_kind(std::size_t i) const { return kinds_[i]; }
  std::size_t intervals() const noexcept { return kinds_.size(); }

 private:
  std::vector<QuantumSample> samples_;
  std::vector<QuantumIntervalKind> kinds_;
};

struct QuantumGap {
  DivergenceReport population;  // populations against the Gibbs state
  double coherence_initial;
  double coherence_final;
  double coherence_gap;
  double total;  // D(rho_i, rho_beta) - D(rho_f, rho_beta)
};

struct QuantumClausiusReport {
  double lhs;
  double delta_s;
  double heat_term;
  std::vector<QuantumGap> gaps;  // one per isochore interval
};

// dS_g - sum over isochores of tr[d rho g(rho_beta)], i.e. dS_alpha - int dQ_alpha / T^alpha for
// AlphaEntropy.
QuantumClausiusReport quantum_clausius_lhs(const QuantumRecord& rec, const Generator& gen);
// Sum over isochores of tr[d rho (H - F)^alpha].
double quantum_alpha_heat(const QuantumRecord& rec, double alpha);

struct ExtractionOptions {
  std::optional<double> t_max;  // default pi / |H_int|_2
  double time_tolerance = 1e-10;
  std::size_t scan_points = 2048;
};

enum class ExtractionVariant { TwoStage, FourStage };

struct ExtractionResult {
  ExtractionVariant variant;
  double t_f;
  QuantumRecord record;
  double q1;
  double q2;
  double bound2;  // T^2 D_2(rho0, rho0_Lambda)
  double ratio;   // bound2 / |q2|
};

// rho(t) = e^{-i H_int t} rho0 e^{i H_int t}; t_f is the first t > 0 with <H>(t) = <H>(0);
// then full thermalization at fixed levels.
ExtractionResult coherence_extraction_protocol(const DensityMatrix& rho0, const LevelSystem& levels,
                                               const CMatrix& h_int, double temperature,
                                               const ExtractionOptions& opts = {});

// Passive-state pulse, quench to -T ln p of the passive state, full thermalization, then a
// staircase isotherm with `stairs` steps back to the original levels.
ExtractionResult passive_extraction_protocol(const DensityMatrix& rho0, const LevelSystem& levels,
                                             double temperature, std::size_t stairs = 2000);

// Unitary taking rho to the passive state for the given levels.
CMatrix passive_unitary(const DensityMatrix& rho, const LevelSystem& levels);

}  // namespace gci
