#include "gci/bathsim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gci/accounting.hpp"
#include "gci/errors.hpp"

namespace gci {

namespace {

constexpr double kResonanceTolerance = 1e-12;

bool same_energy(double a, double b) {
  return std::abs(a - b) <= kResonanceTolerance * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

void require_nondegenerate_gaps(const LevelSystem& levels, std::size_t particle) {
  std::vector<double> gaps;
  for (std::size_t a = 0; a < levels.size(); ++a) {
    for (std::size_t b = a + 1; b < levels.size(); ++b) gaps.push_back(std::abs(levels[b] - levels[a]));
  }
  std::sort(gaps.begin(), gaps.end());
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    const bool zero = gaps[i] <= kResonanceTolerance;
    const bool repeated = i > 0 && same_energy(gaps[i], gaps[i - 1]);
    if (zero || repeated) {
      fail(ErrorKind::Construction, "CompositeSystem",
           "particle " + std::to_string(particle) + " has degenerate energy gaps");
    }
  }
}

// strides[j] = product of dimensions of particles after j.
std::vector<std::size_t> strides_of(const CompositeSystem& comp) {
  const std::size_t n = particle_count(comp);
  std::vector<std::size_t> s(n, 1);
  for (std::size_t j = n - 1; j > 0; --j) s[j - 1] = s[j] * particle_levels(comp, j).size();
  return s;
}

std::size_t digit(std::size_t flat, std::size_t particle, const CompositeSystem& comp,
                  const std::vector<std::size_t>& strides) {
  return (flat / strides[particle]) % particle_levels(comp, particle).size();
}

double bond_strength(const CompositeSystem& comp, std::size_t j, std::size_t k) {
  const auto it = comp.bond_coupling.find({std::min(j, k), std::max(j, k)});
  return it == comp.bond_coupling.end() ? comp.coupling : it->second;
}

std::vector<double> joint_diagonal(const DensityMatrix& joint) {
  std::vector<double> d(static_cast<std::size_t>(joint.dim()));
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    d[i] = joint.matrix()(ii, ii).real();
  }
  return d;
}

void require_joint(const CompositeSystem& comp, const DensityMatrix& joint, const char* op) {
  if (static_cast<std::size_t>(joint.dim()) != joint_dimension(comp)) {
    fail(ErrorKind::Size, op, "joint state dimension does not match the composite");
  }
}

// <f(H_particle)> in the joint state.
double particle_expectation(const CompositeSystem& comp, const std::vector<double>& diag,
                            std::size_t particle, const std::vector<double>& f_of_level) {
  const std::vector<std::size_t> strides = strides_of(comp);
  std::vector<double> terms(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) {
    terms[i] = diag[i] * f_of_level[digit(i, particle, comp, strides)];
  }
  return sum_of(terms);
}

template <class F>
double bath_change(const CompositeSystem& comp, const std::vector<double>& d0,
                   const std::vector<double>& d1, F level_fn) {
  std::vector<double> terms;
  for (std::size_t k = 1; k < particle_count(comp); ++k) {
    const std::vector<double> f = level_fn(particle_levels(comp, k));
    terms.push_back(particle_expectation(comp, d1, k, f));
    terms.push_back(-particle_expectation(comp, d0, k, f));
  }
  return sum_of(terms);
}

}  // namespace

std::size_t particle_count(const CompositeSystem& comp) { return comp.bath.size() + 1; }

const LevelSystem& particle_levels(const CompositeSystem& comp, std::size_t particle) {
  if (particle == 0) return comp.system;
  if (particle > comp.bath.size()) fail(ErrorKind::InvalidInput, "particle_levels", "no such particle");
  return comp.bath[particle - 1];
}

std::size_t joint_dimension(const CompositeSystem& comp) {
  if (comp.bath.empty()) fail(ErrorKind::Construction, "CompositeSystem", "at least one bath particle");
  if (!std::isfinite(comp.coupling)) fail(ErrorKind::Parameter, "CompositeSystem", "non-finite coupling");
  std::size_t dim = 1;
  for (std::size_t j = 0; j < particle_count(comp); ++j) {
    const LevelSystem& lv = particle_levels(comp, j);
    dim *= lv.size();
    if (dim > kMaxJointDimension) {
      fail(ErrorKind::Size, "CompositeSystem", "joint dimension exceeds 64");
    }
    require_nondegenerate_gaps(lv, j);
  }
  for (const auto& [bond, c] : comp.bond_coupling) {
    if (bond.first >= bond.second || bond.second >= particle_count(comp) || !std::isfinite(c)) {
      fail(ErrorKind::Construction, "CompositeSystem", "invalid bond coefficient");
    }
  }
  return dim;
}

std::vector<std::pair<std::size_t, std::size_t>> bonds(const CompositeSystem& comp) {
  const std::size_t n = particle_count(comp);
  std::vector<std::pair<std::size_t, std::size_t>> out;
  switch (comp.topology) {
    case Topology::Collision:
      for (std::size_t k = 1; k < n; ++k) out.emplace_back(0, k);
      break;
    case Topology::Chain:
      for (std::size_t k = 1; k < n; ++k) out.emplace_back(k - 1, k);
      break;
    case Topology::AllToAll:
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = j + 1; k < n; ++k) out.emplace_back(j, k);
      }
      break;
  }
  return out;
}

CMatrix bare_hamiltonian(const CompositeSystem& comp) {
  const auto dim = static_cast<Eigen::Index>(joint_dimension(comp));
  const std::vector<std::size_t> strides = strides_of(comp);
  CMatrix h = CMatrix::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    std::vector<double> terms;
    for (std::size_t j = 0; j < particle_count(comp); ++j) {
      terms.push_back(particle_levels(comp, j)[digit(static_cast<std::size_t>(i), j, comp, strides)]);
    }
    h(i, i) = sum_of(terms);
  }
  return h;
}

CMatrix flip_flop_hamiltonian(const CompositeSystem& comp,
                              const std::vector<std::pair<std::size_t, std::size_t>>& only) {
  const auto dim = static_cast<Eigen::Index>(joint_dimension(comp));
  const std::vector<std::size_t> strides = strides_of(comp);
  const auto pairs = only.empty() ? bonds(comp) : only;
  CMatrix h = CMatrix::Zero(dim, dim);
  for (const auto& [j, k] : pairs) {
    if (j == k || j >= particle_count(comp) || k >= particle_count(comp)) {
      fail(ErrorKind::Construction, "flip_flop_hamiltonian", "invalid bond");
    }
    const LevelSystem& lj = particle_levels(comp, j);
    const LevelSystem& lk = particle_levels(comp, k);
    const double c = bond_strength(comp, j, k);
    for (std::size_t a = 0; a < lj.size(); ++a) {
      for (std::size_t b = 0; b < lj.size(); ++b) {
        if (a == b) continue;
        for (std::size_t a2 = 0; a2 < lk.size(); ++a2) {
          for (std::size_t b2 = 0; b2 < lk.size(); ++b2) {
            if (a2 == b2 || lj[a] >= lj[b]) continue;
            const bool resonant = same_energy(lj[b] - lj[a], lk[b2] - lk[a2]);
            const bool aligned = same_energy(lj[a], lk[a2]) && same_energy(lj[b], lk[b2]);
            if (resonant && !aligned) {
              fail(ErrorKind::Construction, "flip_flop_hamiltonian",
                   "resonant transitions must share absolute level energies");
            }
            if (!aligned) continue;
            // |a>_j |b2>_k <- |b>_j |a2>_k, and its adjoint.
            for (Eigen::Index i = 0; i < dim; ++i) {
              const auto fi = static_cast<std::size_t>(i);
              if (digit(fi, j, comp, strides) != b || digit(fi, k, comp, strides) != a2) continue;
              const std::size_t target = fi - b * strides[j] + a * strides[j] - a2 * strides[k] +
                                         b2 * strides[k];
              const auto ti = static_cast<Eigen::Index>(target);
              h(ti, i) += c;
              h(i, ti) += c;
            }
          }
        }
      }
    }
  }
  return h;
}

CMatrix total_hamiltonian(const CompositeSystem& comp) {
  return bare_hamiltonian(comp) + flip_flop_hamiltonian(comp);
}

DensityMatrix product_thermal_state(const CompositeSystem& comp, const DensityMatrix& rho_s,
                                    double beta_bath) {
  joint_dimension(comp);
  if (static_cast<std::size_t>(rho_s.dim()) != comp.system.size()) {
    fail(ErrorKind::Size, "product_thermal_state", "system state dimension mismatch");
  }
  CMatrix joint = rho_s.matrix();
  for (const LevelSystem& b : comp.bath) {
    const ProbVector g = gibbs_state(b, beta_bath).gibbs;
    CMatrix d = CMatrix::Zero(static_cast<Eigen::Index>(g.size()), static_cast<Eigen::Index>(g.size()));
    for (std::size_t m = 0; m < g.size(); ++m) {
      d(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m)) = g[m];
    }
    CMatrix next(joint.rows() * d.rows(), joint.cols() * d.cols());
    for (Eigen::Index r = 0; r < joint.rows(); ++r) {
      for (Eigen::Index c = 0; c < joint.cols(); ++c) {
        next.block(r * d.rows(), c * d.cols(), d.rows(), d.cols()) = joint(r, c) * d;
      }
    }
    joint = std::move(next);
  }
  return DensityMatrix(joint);
}

DensityMatrix evolve(const CompositeSystem& comp, const DensityMatrix& joint, double t) {
  require_joint(comp, joint, "evolve");
  if (!std::isfinite(t)) fail(ErrorKind::InvalidInput, "evolve", "time must be finite");
  const CMatrix bare = bare_hamiltonian(comp);
  if (comp.topology != Topology::Collision) {
    return joint.evolved(unitary_evolution(bare + flip_flop_hamiltonian(comp), t));
  }
  DensityMatrix state = joint;
  for (const auto& bond : bonds(comp)) {
    state = state.evolved(unitary_evolution(bare + flip_flop_hamiltonian(comp, {bond}), t));
  }
  return state;
}

ProbVector particle_populations(const CompositeSystem& comp, const DensityMatrix& joint,
                                std::size_t particle) {
  require_joint(comp, joint, "particle_populations");
  const std::vector<std::size_t> strides = strides_of(comp);
  const std::vector<double> diag = joint_diagonal(joint);
  std::vector<std::vector<double>> buckets(particle_levels(comp, particle).size());
  for (std::size_t i = 0; i < diag.size(); ++i) {
    buckets[digit(i, particle, comp, strides)].push_back(diag[i]);
  }
  std::vector<double> p;
  for (const auto& b : buckets) p.push_back(sum_of(b));
  return validate_distribution(std::move(p));
}

AlphaExchange alpha_exchange(const CompositeSystem& comp, const DensityMatrix& initial,
                             const DensityMatrix& final_state, double f_shift, double alpha) {
  require_joint(comp, initial, "alpha_exchange");
  require_joint(comp, final_state, "alpha_exchange");
  const auto moments = [&](const LevelSystem& lv) {
    std::vector<double> f(lv.size());
    for (std::size_t m = 0; m < lv.size(); ++m) f[m] = signed_power(lv[m] - f_shift, alpha, "alpha_exchange");
    return f;
  };
  const std::vector<double> d0 = joint_diagonal(initial);
  const std::vector<double> d1 = joint_diagonal(final_state);
  const std::vector<double> fs = moments(comp.system);
  const double q_sys = particle_expectation(comp, d1, 0, fs) - particle_expectation(comp, d0, 0, fs);
  const double q_bath = bath_change(comp, d0, d1, moments);
  return {q_sys, q_bath, std::abs(q_sys + q_bath)};
}

EvolutionReport evolve_and_account(const CompositeSystem& comp, const DensityMatrix& initial,
                                   double t, double alpha, double f_shift) {
  DensityMatrix final_state = evolve(comp, initial, t);
  const AlphaExchange ex = alpha_exchange(comp, initial, final_state, f_shift, alpha);
  return {std::move(final_state), ex};
}

TsallisExchange tsallis_exchange(const CompositeSystem& comp, const DensityMatrix& initial,
                                 const DensityMatrix& final_state, double beta, double alpha_tilde,
                                 double f_sys, double f_bath) {
  const char* op = "tsallis_exchange";
  require_joint(comp, initial, op);
  require_joint(comp, final_state, op);
  if (!(beta > 0.0) || !std::isfinite(beta)) fail(ErrorKind::Parameter, op, "beta must be > 0");
  if (!(alpha_tilde >= 0.0) || !std::isfinite(alpha_tilde)) {
    fail(ErrorKind::UnsupportedGenerator, op, "alpha_tilde must be >= 0");
  }
  const double a = alpha_tilde;
  const bool limit = std::abs(a - 1.0) < 1e-8;
  const auto observable = [&](double f) {
    return [&, f](const LevelSystem& lv) {
      std::vector<double> out(lv.size());
      for (std::size_t m = 0; m < lv.size(); ++m) {
        const double x = beta * (lv[m] - f);
        out[m] = limit ? x : -a * std::exp(-(a - 1.0) * x) / (a - 1.0);
      }
      return out;
    };
  };
  const std::vector<double> d0 = joint_diagonal(initial);
  const std::vector<double> d1 = joint_diagonal(final_state);
  const std::vector<double> fs = observable(f_sys)(comp.system);
  const double q_sys = particle_expectation(comp, d1, 0, fs) - particle_expectation(comp, d0, 0, fs);
  const double q_bath = bath_change(comp, d0, d1, observable(f_bath));
  const double factor = limit ? -1.0 : -std::exp(-(a - 1.0) * beta * (f_sys - f_bath));
  return {q_sys, q_bath, factor, std::abs(q_bath - factor * q_sys)};
}

DegradationReport bath_degradation_report(const CompositeSystem& comp, const DensityMatrix& joint,
                                          std::size_t bath_particle, double f_sys,
                                          const std::vector<double>& alphas, double beta_max) {
  const char* op = "bath_degradation_report";
  if (bath_particle < 1 || bath_particle >= particle_count(comp)) {
    fail(ErrorKind::InvalidInput, op, "bath particle index out of range");
  }
  if (!(beta_max > 0.0) || beta_max > kMaxBeta) fail(ErrorKind::Parameter, op, "beta_max out of range");
  const LevelSystem& lv = particle_levels(comp, bath_particle);
  const ProbVector p = particle_populations(comp, joint, bath_particle);

  DegradationReport out{{}, 0.0};
  double lo_beta = std::numeric_limits<double>::infinity();
  double hi_beta = -lo_beta;
  for (double alpha : alphas) {
    std::vector<double> h(lv.size());
    for (std::size_t m = 0; m < lv.size(); ++m) h[m] = signed_power(lv[m] - f_sys, alpha, op);
    const auto thermal_moment = [&](double b) {
      std::vector<double> w(lv.size());
      const double e0 = lv.min();
      for (std::size_t m = 0; m < lv.size(); ++m) w[m] = std::exp(-b * (lv[m] - e0));
      const double z = sum_of(w);
      for (std::size_t m = 0; m < lv.size(); ++m) w[m] *= h[m] / z;
      return sum_of(w);
    };
    std::vector<double> terms(lv.size());
    for (std::size_t m = 0; m < lv.size(); ++m) terms[m] = p[m] * h[m];
    const double target = sum_of(terms);
    ImpliedBeta entry{alpha, target, std::nullopt};

    // The thermal moment is non-increasing in beta when h is increasing in energy.
    double lo = 0.0;
    double hi = beta_max;
    double m_lo = thermal_moment(lo) - target;
    const double m_hi = thermal_moment(hi) - target;
    const double scale = std::max(1.0, std::abs(target));
    if (std::abs(m_lo) <= 1e-14 * scale) {
      entry.beta = 0.0;
    } else if (std::abs(m_hi) <= 1e-14 * scale) {
      entry.beta = hi;
    } else if ((m_lo > 0.0) != (m_hi > 0.0)) {
      for (int it = 0; it < 400 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double v = thermal_moment(mid) - target;
        if (v == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((v > 0.0) == (m_lo > 0.0)) {
          lo = mid;
          m_lo = v;
        } else {
          hi = mid;
        }
      }
      entry.beta = 0.5 * (lo + hi);
    }
    if (entry.beta) {
      lo_beta = std::min(lo_beta, *entry.beta);
      hi_beta = std::max(hi_beta, *entry.beta);
    }
    out.entries.push_back(entry);
  }
  out.spread = hi_beta >= lo_beta ? hi_beta - lo_beta : 0.0;
  return out;
}

double work_repository_relation(double e_k, double e_l, double f, double alpha, double w_alpha) {
  if (e_k == e_l) {
    fail(ErrorKind::DegenerateTransition, "work_repository_relation", "levels coincide");
  }
  return conversion_factor(e_l - e_k, e_k - f, e_l - f, alpha) * w_alpha;
}

}  // namespace gci
