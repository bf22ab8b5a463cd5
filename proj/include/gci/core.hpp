#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace gci {

inline constexpr double kMinTemperature = 1e-12;
inline constexpr double kMaxBeta = 1.0 / kMinTemperature;

// Finite ordered set of energy levels, N >= 2, all finite.
class LevelSystem {
 public:
  explicit LevelSystem(std::vector<double> energies);
  LevelSystem(std::initializer_list<double> energies);

  std::size_t size() const noexcept { return energies_.size(); }
  double operator[](std::size_t j) const { return energies_[j]; }
  const std::vector<double>& energies() const noexcept { return energies_; }

  double min() const;
  double max() const;
  std::size_t argmin() const;

  LevelSystem shifted(double c) const;
  // (1 - s) a + s b, componentwise.
  static LevelSystem interpolate(const LevelSystem& a, const LevelSystem& b, double s);

  friend bool operator==(const LevelSystem&, const LevelSystem&) = default;

 private:
  std::vector<double> energies_;
};

// Piecewise-linear E_j(t) through knots at strictly increasing times.
class LevelSchedule {
 public:
  LevelSchedule(std::vector<double> times, std::vector<LevelSystem> knots);
  static LevelSchedule linear(const LevelSystem& from, const LevelSystem& to, double t0 = 0.0,
                              double t1 = 1.0);

  LevelSystem at(double t) const;
  double t_begin() const { return times_.front(); }
  double t_end() const { return times_.back(); }
  std::size_t levels() const { return knots_.front().size(); }

 private:
  std::vector<double> times_;
  std::vector<LevelSystem> knots_;
};

// Non-negative entries summing to 1 within 1e-12.
class ProbVector {
 public:
  // Validates through validate_distribution.
  explicit ProbVector(std::vector<double> probs);
  ProbVector(std::initializer_list<double> probs);

  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t j) const { return probs_[j]; }
  const std::vector<double>& values() const noexcept { return probs_; }
  std::span<const double> span() const noexcept { return probs_; }

  friend bool operator==(const ProbVector&, const ProbVector&) = default;

 private:
  struct Trusted {};
  ProbVector(Trusted, std::vector<double> probs) : probs_(std::move(probs)) {}
  friend ProbVector validate_distribution(std::vector<double> raw);

  std::vector<double> probs_;
};

// Clamps entries in [-1e-12, 0) to 0 and renormalizes when |sum - 1| <= 1e-9.
ProbVector validate_distribution(std::vector<double> raw);

struct ThermalContext {
  double beta;
  double log_partition_function;
  double partition_function;
  double free_energy;
  ProbVector gibbs;
  // E_j - F, evaluated without cancellation against the minimum level.
  std::vector<double> shifted_energies;

  double temperature() const { return 1.0 / beta; }
};

ThermalContext gibbs_state(const LevelSystem& levels, double beta);

// x^alpha; negative x only for integer alpha.
double signed_power(double x, double alpha, const char* operation);

// H_alpha = sum_j p_j (E_j - F)^alpha.
double shifted_moment(const ProbVector& p, const ThermalContext& ctx, double alpha);

// A bath at inverse temperature beta attached to a set of levels; empty manifold means all levels.
struct BathCoupling {
  double beta;
  std::vector<std::size_t> manifold;

  friend bool operator==(const BathCoupling&, const BathCoupling&) = default;
};

using BathSet = std::vector<BathCoupling>;

// Expanded manifolds; throws unless betas are admissible, indices in range, every level covered
// and distinct manifolds share at most one state.
std::vector<std::vector<std::size_t>> validate_baths(const BathSet& baths, std::size_t levels);

struct BathSegment {
  double t_begin;
  double t_end;
  BathSet baths;
};

// Piecewise-constant bath assignment over contiguous time segments.
class BathSchedule {
 public:
  BathSchedule(std::vector<BathSegment> segments, std::size_t levels);
  const BathSet& at(double t) const;
  const std::vector<BathSegment>& segments() const noexcept { return segments_; }

 private:
  std::vector<BathSegment> segments_;
};

// Joint fixed point of the baths in a set, with the per-level shift E_j - F_k and the bath that
// each level's population flow is attributed to (first manifold listing the level).
struct ReferenceState {
  ProbVector p;
  std::vector<double> shifted_energies;
  std::vector<double> level_beta;
  std::vector<std::size_t> level_bath;
};

// Disconnected groups of manifolds are normalized to their total probability in `current`.
ReferenceState reference_state(const LevelSystem& levels, const BathSet& baths,
                               const ProbVector& current);

double sum_of(std::span<const double> v);

}  // namespace gci
