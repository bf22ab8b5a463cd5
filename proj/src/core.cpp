#include "gci/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "gci/errors.hpp"

namespace gci {

double sum_of(std::span<const double> v) {
  // Neumaier compensated summation.
  double s = 0.0;
  double c = 0.0;
  for (double x : v) {
    const double t = s + x;
    if (std::abs(s) >= std::abs(x)) {
      c += (s - t) + x;
    } else {
      c += (x - t) + s;
    }
    s = t;
  }
  return s + c;
}

LevelSystem::LevelSystem(std::vector<double> energies) : energies_(std::move(energies)) {
  if (energies_.size() < 2) {
    fail(ErrorKind::InvalidInput, "LevelSystem", "need at least 2 levels");
  }
  for (double e : energies_) {
    if (!std::isfinite(e)) fail(ErrorKind::InvalidInput, "LevelSystem", "non-finite energy");
  }
}

LevelSystem::LevelSystem(std::initializer_list<double> energies)
    : LevelSystem(std::vector<double>(energies)) {}

double LevelSystem::min() const { return *std::min_element(energies_.begin(), energies_.end()); }
double LevelSystem::max() const { return *std::max_element(energies_.begin(), energies_.end()); }

std::size_t LevelSystem::argmin() const {
  return static_cast<std::size_t>(
      std::distance(energies_.begin(), std::min_element(energies_.begin(), energies_.end())));
}

LevelSystem LevelSystem::shifted(double c) const {
  std::vector<double> e = energies_;
  for (double& x : e) x += c;
  return LevelSystem(std::move(e));
}

LevelSystem LevelSystem::interpolate(const LevelSystem& a, const LevelSystem& b, double s) {
  if (a.size() != b.size()) {
    fail(ErrorKind::InvalidInput, "LevelSystem::interpolate", "level count mismatch");
  }
  if (s <= 0.0) return a;
  if (s >= 1.0) return b;
  std::vector<double> e(a.size());
  for (std::size_t j = 0; j < e.size(); ++j) e[j] = (1.0 - s) * a[j] + s * b[j];
  return LevelSystem(std::move(e));
}

LevelSchedule::LevelSchedule(std::vector<double> times, std::vector<LevelSystem> knots)
    : times_(std::move(times)), knots_(std::move(knots)) {
  if (times_.size() < 2 || times_.size() != knots_.size()) {
    fail(ErrorKind::InvalidInput, "LevelSchedule", "need >= 2 knots with one time each");
  }
  for (std::size_t i = 1; i < times_.size(); ++i) {
    if (!(times_[i] > times_[i - 1])) {
      fail(ErrorKind::InvalidInput, "LevelSchedule", "knot times must strictly increase");
    }
    if (knots_[i].size() != knots_[0].size()) {
      fail(ErrorKind::InvalidInput, "LevelSchedule", "level count changes between knots");
    }
  }
}

LevelSchedule LevelSchedule::linear(const LevelSystem& from, const LevelSystem& to, double t0,
                                    double t1) {
  return LevelSchedule({t0, t1}, {from, to});
}

LevelSystem LevelSchedule::at(double t) const {
  if (t <= times_.front()) return knots_.front();
  if (t >= times_.back()) return knots_.back();
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const std::size_t i = static_cast<std::size_t>(std::distance(times_.begin(), it));
  const double s = (t - times_[i - 1]) / (times_[i] - times_[i - 1]);
  return LevelSystem::interpolate(knots_[i - 1], knots_[i], s);
}

ProbVector::ProbVector(std::vector<double> probs)
    : probs_(validate_distribution(std::move(probs)).probs_) {}

ProbVector::ProbVector(std::initializer_list<double> probs)
    : ProbVector(std::vector<double>(probs)) {}

ProbVector validate_distribution(std::vector<double> raw) {
  constexpr const char* op = "validate_distribution";
  if (raw.empty()) fail(ErrorKind::InvalidDistribution, op, "empty vector");
  for (double& x : raw) {
    if (!std::isfinite(x)) fail(ErrorKind::InvalidDistribution, op, "non-finite entry");
    if (x < -1e-12) {
      fail(ErrorKind::InvalidDistribution, op, "entry " + std::to_string(x) + " below -1e-12");
    }
    if (x < 0.0) x = 0.0;
  }
  const double s = sum_of(raw);
  if (std::abs(s - 1.0) > 1e-9) {
    fail(ErrorKind::InvalidDistribution, op, "entries sum to " + std::to_string(s));
  }
  if (s != 1.0) {
    for (double& x : raw) x /= s;
  }
  return ProbVector(ProbVector::Trusted{}, std::move(raw));
}

namespace {

void check_beta(double beta, const char* op) {
  if (!std::isfinite(beta) || !(beta > 0.0)) {
    fail(ErrorKind::InvalidInput, op, "beta must be finite and > 0");
  }
  if (beta > kMaxBeta) fail(ErrorKind::InvalidInput, op, "temperature below 1e-12");
}

// For log-weights w: returns -ln(e^{w_j} / sum e^w) for every j, free of cancellation at the
// dominant entry.
std::vector<double> neg_log_softmax(std::span<const double> w) {
  std::size_t imax = 0;
  for (std::size_t j = 1; j < w.size(); ++j) {
    if (w[j] > w[imax]) imax = j;
  }
  double rest = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (j != imax) rest += std::exp(w[j] - w[imax]);
  }
  const double l = std::log1p(rest);
  std::vector<double> out(w.size());
  for (std::size_t j = 0; j < w.size(); ++j) out[j] = (w[imax] - w[j]) + l;
  return out;
}

}  // namespace

ThermalContext gibbs_state(const LevelSystem& levels, double beta) {
  check_beta(beta, "gibbs_state");
  const std::size_t n = levels.size();
  const std::size_t imin = levels.argmin();
  const double emin = levels[imin];
  double rest = 0.0;
  std::vector<double> boltz(n);
  for (std::size_t j = 0; j < n; ++j) {
    boltz[j] = std::exp(-beta * (levels[j] - emin));
    if (j != imin) rest += boltz[j];
  }
  const double l = std::log1p(rest);
  std::vector<double> p(n);
  std::vector<double> shifted(n);
  for (std::size_t j = 0; j < n; ++j) {
    p[j] = boltz[j] / (1.0 + rest);
    shifted[j] = (levels[j] - emin) + l / beta;
  }
  const double log_z = -beta * emin + l;
  return ThermalContext{beta,
                        log_z,
                        std::exp(log_z),
                        emin - l / beta,
                        validate_distribution(std::move(p)),
                        std::move(shifted)};
}

double signed_power(double x, double alpha, const char* operation) {
  if (x >= 0.0) {
    if (alpha == 0.0) return 1.0;
    return std::pow(x, alpha);
  }
  if (alpha != std::floor(alpha)) {
    fail(ErrorKind::Domain, operation, "negative base with non-integer exponent");
  }
  return std::pow(x, alpha);
}

double shifted_moment(const ProbVector& p, const ThermalContext& ctx, double alpha) {
  if (p.size() != ctx.shifted_energies.size()) {
    fail(ErrorKind::InvalidInput, "shifted_moment", "size mismatch");
  }
  if (!(alpha >= 0.0)) fail(ErrorKind::Domain, "shifted_moment", "alpha must be >= 0");
  std::vector<double> terms(p.size());
  for (std::size_t j = 0; j < p.size(); ++j) {
    terms[j] = p[j] * signed_power(ctx.shifted_energies[j], alpha, "shifted_moment");
  }
  return sum_of(terms);
}

std::vector<std::vector<std::size_t>> validate_baths(const BathSet& baths, std::size_t levels) {
  constexpr const char* op = "validate_baths";
  if (baths.empty()) fail(ErrorKind::InvalidInput, op, "no bath attached");
  std::vector<std::vector<std::size_t>> manifolds;
  std::vector<int> covered(levels, 0);
  for (const BathCoupling& b : baths) {
    check_beta(b.beta, op);
    std::vector<std::size_t> m = b.manifold;
    if (m.empty()) {
      m.resize(levels);
      std::iota(m.begin(), m.end(), std::size_t{0});
    }
    std::sort(m.begin(), m.end());
    if (std::adjacent_find(m.begin(), m.end()) != m.end()) {
      fail(ErrorKind::InvalidInput, op, "manifold lists a level twice");
    }
    for (std::size_t j : m) {
      if (j >= levels) fail(ErrorKind::InvalidInput, op, "manifold index out of range");
      covered[j] = 1;
    }
    manifolds.push_back(std::move(m));
  }
  for (std::size_t a = 0; a < manifolds.size(); ++a) {
    for (std::size_t b = a + 1; b < manifolds.size(); ++b) {
      std::vector<std::size_t> shared;
      std::set_intersection(manifolds[a].begin(), manifolds[a].end(), manifolds[b].begin(),
                            manifolds[b].end(), std::back_inserter(shared));
      if (shared.size() > 1) {
        fail(ErrorKind::InvalidInput, op, "manifolds share more than one state");
      }
    }
  }
  if (std::find(covered.begin(), covered.end(), 0) != covered.end()) {
    fail(ErrorKind::InvalidInput, op, "a level is not attached to any bath");
  }
  return manifolds;
}

BathSchedule::BathSchedule(std::vector<BathSegment> segments, std::size_t levels)
    : segments_(std::move(segments)) {
  if (segments_.empty()) fail(ErrorKind::InvalidInput, "BathSchedule", "no segments");
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    if (!(segments_[i].t_end > segments_[i].t_begin)) {
      fail(ErrorKind::InvalidInput, "BathSchedule", "segment with non-positive duration");
    }
    if (i > 0 && segments_[i].t_begin != segments_[i - 1].t_end) {
      fail(ErrorKind::InvalidInput, "BathSchedule", "segments leave a gap or overlap");
    }
    validate_baths(segments_[i].baths, levels);
  }
}

const BathSet& BathSchedule::at(double t) const {
  for (const BathSegment& s : segments_) {
    if (t < s.t_end) return s.baths;
  }
  return segments_.back().baths;
}

ReferenceState reference_state(const LevelSystem& levels, const BathSet& baths,
                               const ProbVector& current) {
  constexpr const char* op = "reference_state";
  const std::size_t n = levels.size();
  if (current.size() != n) fail(ErrorKind::InvalidInput, op, "size mismatch");
  const auto manifolds = validate_baths(baths, n);
  const std::size_t k_count = manifolds.size();

  std::vector<std::size_t> owner(n, k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    for (std::size_t j : manifolds[k]) {
      if (owner[j] == k_count) owner[j] = k;
    }
  }
  std::vector<double> level_beta(n);
  for (std::size_t j = 0; j < n; ++j) level_beta[j] = baths[owner[j]].beta;

  if (k_count == 1) {
    ThermalContext ctx = gibbs_state(levels, baths[0].beta);
    return ReferenceState{std::move(ctx.gibbs), std::move(ctx.shifted_energies),
                          std::move(level_beta), std::move(owner)};
  }

  // Log-offsets c_k so that -beta_k E_s + c_k agrees across manifolds at every shared state.
  std::vector<double> offset(k_count, 0.0);
  std::vector<std::size_t> component(k_count, k_count);
  std::size_t components = 0;
  for (std::size_t root = 0; root < k_count; ++root) {
    if (component[root] != k_count) continue;
    component[root] = components;
    std::vector<std::size_t> stack{root};
    while (!stack.empty()) {
      const std::size_t a = stack.back();
      stack.pop_back();
      for (std::size_t b = 0; b < k_count; ++b) {
        if (b == a) continue;
        for (std::size_t s : manifolds[a]) {
          if (!std::binary_search(manifolds[b].begin(), manifolds[b].end(), s)) continue;
          const double want = offset[a] + (baths[b].beta - baths[a].beta) * levels[s];
          if (component[b] == k_count) {
            component[b] = components;
            offset[b] = want;
            stack.push_back(b);
          } else if (std::abs(offset[b] - want) > 1e-9 * std::max(1.0, std::abs(want))) {
            fail(ErrorKind::Construction, op, "cyclic manifold graph has no common fixed point");
          }
        }
      }
    }
    ++components;
  }

  std::vector<double> p(n, 0.0);
  std::vector<double> shifted(n, 0.0);
  for (std::size_t c = 0; c < components; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t j = 0; j < n; ++j) {
      if (component[owner[j]] == c) members.push_back(j);
    }
    std::vector<double> w(members.size());
    double mass = 0.0;
    for (std::size_t i = 0; i < members.size(); ++i) {
      const std::size_t j = members[i];
      w[i] = -baths[owner[j]].beta * levels[j] + offset[owner[j]];
      mass += current[j];
    }
    const double log_mass = components == 1 ? 0.0 : (mass > 0.0 ? std::log(mass) : 0.0);
    const std::vector<double> nl = neg_log_softmax(w);
    for (std::size_t i = 0; i < members.size(); ++i) {
      const std::size_t j = members[i];
      const double neg_log_p = nl[i] - log_mass;
      p[j] = (components == 1 || mass > 0.0) ? std::exp(-neg_log_p) : 0.0;
      shifted[j] = neg_log_p / baths[owner[j]].beta;
    }
  }
  return ReferenceState{validate_distribution(std::move(p)), std::move(shifted),
                        std::move(level_beta), std::move(owner)};
}

}  // namespace gci
