#include "gci/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <utility>

#include "gci/accounting.hpp"
#include "gci/errors.hpp"

namespace gci {

namespace {

constexpr double kHermitianTolerance = 1e-12;
constexpr double kTraceTolerance = 1e-12;
constexpr double kSpectrumSlack = 1e-10;

std::vector<double> clamped_spectrum(const HermitianEigen& eig) {
  std::vector<double> out(static_cast<std::size_t>(eig.values.size()));
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = std::clamp(eig.values(static_cast<Eigen::Index>(k)), 0.0, 1.0);
  }
  return out;
}

double energy_expectation(const CMatrix& rho, const LevelSystem& levels) {
  std::vector<double> terms(levels.size());
  for (std::size_t j = 0; j < levels.size(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    terms[j] = rho(jj, jj).real() * levels[j];
  }
  return sum_of(terms);
}

std::vector<double> diagonal_of(const DensityMatrix& rho) {
  std::vector<double> d(static_cast<std::size_t>(rho.dim()));
  for (std::size_t j = 0; j < d.size(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    d[j] = rho.matrix()(jj, jj).real();
  }
  return d;
}

void require_dim(const DensityMatrix& rho, const LevelSystem& levels, const char* op) {
  if (static_cast<std::size_t>(rho.dim()) != levels.size()) {
    fail(ErrorKind::Size, op, "density matrix and level system dimensions differ");
  }
}

}  // namespace

DensityMatrix::DensityMatrix(const CMatrix& rho) {
  const char* op = "DensityMatrix";
  if (rho.rows() != rho.cols() || rho.rows() < 2) {
    fail(ErrorKind::InvalidInput, op, "density matrix must be square with dimension >= 2");
  }
  if (!rho.allFinite()) fail(ErrorKind::InvalidInput, op, "non-finite entry");
  require_hermitian(rho, kHermitianTolerance, op);
  rho_ = (rho + rho.adjoint()) / 2.0;
  const double trace = rho_.trace().real();
  if (std::abs(trace - 1.0) > kTraceTolerance) {
    fail(ErrorKind::InvalidDistribution, op, "trace differs from 1");
  }
  eig_ = hermitian_eigen(rho_);
  const Eigen::Index n = eig_.values.size();
  if (eig_.values(0) < -kSpectrumSlack || eig_.values(n - 1) > 1.0 + kSpectrumSlack) {
    fail(ErrorKind::InvalidDistribution, op, "spectrum outside [0, 1]");
  }
}

DensityMatrix DensityMatrix::diagonal(const ProbVector& p) {
  const auto n = static_cast<Eigen::Index>(p.size());
  CMatrix m = CMatrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) m(j, j) = p[static_cast<std::size_t>(j)];
  return DensityMatrix(m);
}

DensityMatrix DensityMatrix::pure(const CVector& psi) {
  const double norm = psi.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    fail(ErrorKind::InvalidInput, "DensityMatrix::pure", "state vector must be nonzero and finite");
  }
  const CVector v = psi / norm;
  return DensityMatrix(v * v.adjoint());
}

std::vector<double> DensityMatrix::spectrum() const { return clamped_spectrum(eig_); }

ProbVector DensityMatrix::populations() const { return validate_distribution(diagonal_of(*this)); }

DensityMatrix DensityMatrix::dephased() const {
  CMatrix d = CMatrix::Zero(rho_.rows(), rho_.cols());
  for (Eigen::Index j = 0; j < rho_.rows(); ++j) d(j, j) = rho_(j, j).real();
  return DensityMatrix(d);
}

DensityMatrix DensityMatrix::evolved(const CMatrix& u) const {
  if (u.rows() != rho_.rows() || u.cols() != rho_.cols()) {
    fail(ErrorKind::Size, "DensityMatrix::evolved", "unitary dimension mismatch");
  }
  const double defect =
      (u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
  if (defect > 1e-10) fail(ErrorKind::InvalidInput, "DensityMatrix::evolved", "matrix is not unitary");
  return DensityMatrix(u * rho_ * u.adjoint());
}

double matrix_entropy(const Generator& gen, const DensityMatrix& rho) {
  const std::vector<double> s = rho.spectrum();
  return entropy_of_spectrum(gen, s);
}

double matrix_bregman(const Generator& gen, const DensityMatrix& rho2, const DensityMatrix& rho1) {
  const char* op = "matrix_bregman";
  if (rho2.dim() != rho1.dim()) fail(ErrorKind::Size, op, "dimension mismatch");
  const std::vector<double> lam = rho1.spectrum();
  if (*std::min_element(lam.begin(), lam.end()) < kMinReference) {
    fail(ErrorKind::SingularReference, op, "reference state has an eigenvalue below 1e-12");
  }
  const std::vector<double> g = centered_gradient(gen, lam);
  const CMatrix& v = rho1.eigen().vectors;
  const CMatrix rotated = v.adjoint() * rho2.matrix() * v;
  std::vector<double> terms;
  terms.reserve(2 * lam.size() + 2);
  terms.push_back(matrix_entropy(gen, rho1));
  terms.push_back(-matrix_entropy(gen, rho2));
  for (std::size_t k = 0; k < lam.size(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    terms.push_back(g[k] * rotated(kk, kk).real());
    terms.push_back(-g[k] * lam[k]);
  }
  return std::max(0.0, sum_of(terms));
}

double coherence_measure(const Generator& gen, const DensityMatrix& rho) {
  return std::max(0.0, matrix_entropy(gen, rho.dephased()) - matrix_entropy(gen, rho));
}

double max_coherence_heat(double alpha, const DensityMatrix& rho, double temperature) {
  if (!(temperature >= kMinTemperature) || !std::isfinite(temperature)) {
    fail(ErrorKind::Parameter, "max_coherence_heat", "temperature must be positive and finite");
  }
  const double d = matrix_bregman(Generator::alpha_entropy(alpha), rho, rho.dephased());
  return std::pow(temperature, alpha) * d;
}

QuantumRecord::QuantumRecord(QuantumSample initial) {
  require_dim(initial.rho, initial.levels, "QuantumRecord");
  if (!(initial.beta > 0.0) || initial.beta > kMaxBeta) {
    fail(ErrorKind::Parameter, "QuantumRecord", "beta must lie in (0, 1e12]");
  }
  samples_.push_back(std::move(initial));
}

void QuantumRecord::append_unitary(const CMatrix& u, const LevelSystem& levels_after, double dt) {
  if (!(dt >= 0.0)) fail(ErrorKind::InvalidInput, "append_unitary", "dt must be >= 0");
  const QuantumSample& last = samples_.back();
  DensityMatrix next = last.rho.evolved(u);
  require_dim(next, levels_after, "append_unitary");
  samples_.push_back({last.t + dt, std::move(next), levels_after, last.beta});
  kinds_.push_back(QuantumIntervalKind::Unitary);
}

void QuantumRecord::append_isochore(const DensityMatrix& rho_after, double dt) {
  if (!(dt >= 0.0)) fail(ErrorKind::InvalidInput, "append_isochore", "dt must be >= 0");
  const QuantumSample& last = samples_.back();
  require_dim(rho_after, last.levels, "append_isochore");
  samples_.push_back({last.t + dt, rho_after, last.levels, last.beta});
  kinds_.push_back(QuantumIntervalKind::Isochore);
}

QuantumClausiusReport quantum_clausius_lhs(const QuantumRecord& rec, const Generator& gen) {
  QuantumClausiusReport out{};
  out.delta_s = matrix_entropy(gen, rec.back().rho) - matrix_entropy(gen, rec.front().rho);
  std::vector<double> heat_terms;
  for (std::size_t i = 0; i < rec.intervals(); ++i) {
    if (rec.interval_kind(i) != QuantumIntervalKind::Isochore) continue;
    const QuantumSample& a = rec.sample(i);
    const QuantumSample& b = rec.sample(i + 1);
    const ProbVector pa = a.rho.populations();
    const ReferenceState ref = reference_state(a.levels, {BathCoupling{a.beta, {}}}, pa);
    const std::vector<double> g = reference_gradient(gen, ref);
    const std::vector<double> da = diagonal_of(a.rho);
    const std::vector<double> db = diagonal_of(b.rho);
    for (std::size_t j = 0; j < g.size(); ++j) heat_terms.push_back((db[j] - da[j]) * g[j]);

    QuantumGap gap{};
    gap.population = contractivity_gap(gen, pa, b.rho.populations(), ref.p);
    gap.coherence_initial = coherence_measure(gen, a.rho);
    gap.coherence_final = coherence_measure(gen, b.rho);
    gap.coherence_gap = gap.coherence_initial - gap.coherence_final;
    const DensityMatrix thermal = DensityMatrix::diagonal(ref.p);
    gap.total = matrix_bregman(gen, a.rho, thermal) - matrix_bregman(gen, b.rho, thermal);
    out.gaps.push_back(gap);
  }
  out.heat_term = sum_of(heat_terms);
  out.lhs = out.delta_s - out.heat_term;
  return out;
}

double quantum_alpha_heat(const QuantumRecord& rec, double alpha) {
  std::vector<double> terms;
  for (std::size_t i = 0; i < rec.intervals(); ++i) {
    if (rec.interval_kind(i) != QuantumIntervalKind::Isochore) continue;
    const QuantumSample& a = rec.sample(i);
    const ThermalContext ctx = gibbs_state(a.levels, a.beta);
    const std::vector<double> da = diagonal_of(a.rho);
    const std::vector<double> db = diagonal_of(rec.sample(i + 1).rho);
    for (std::size_t j = 0; j < da.size(); ++j) {
      const double h = signed_power(ctx.shifted_energies[j], alpha, "quantum_alpha_heat");
      terms.push_back((db[j] - da[j]) * h);
    }
  }
  return sum_of(terms);
}

namespace {

ExtractionResult finish(ExtractionVariant variant, double t_f, QuantumRecord rec,
                        const DensityMatrix& rho0, double temperature) {
  const double q1 = quantum_alpha_heat(rec, 1.0);
  const double q2 = quantum_alpha_heat(rec, 2.0);
  const double bound2 = max_coherence_heat(2.0, rho0, temperature);
  const double ratio = q2 == 0.0 ? std::numeric_limits<double>::infinity() : bound2 / std::abs(q2);
  return {variant, t_f, std::move(rec), q1, q2, bound2, ratio};
}

double checked_beta(double temperature, const char* op) {
  if (!(temperature >= kMinTemperature) || !std::isfinite(temperature)) {
    fail(ErrorKind::Parameter, op, "temperature must be positive and finite");
  }
  return 1.0 / temperature;
}

}  // namespace

ExtractionResult coherence_extraction_protocol(const DensityMatrix& rho0, const LevelSystem& levels,
                                               const CMatrix& h_int, double temperature,
                                               const ExtractionOptions& opts) {
  const char* op = "coherence_extraction_protocol";
  require_dim(rho0, levels, op);
  if (h_int.rows() != rho0.dim() || h_int.cols() != rho0.dim()) {
    fail(ErrorKind::Size, op, "interaction Hamiltonian dimension mismatch");
  }
  require_hermitian(h_int, kHermitianTolerance, op);
  const double beta = checked_beta(temperature, op);
  if (opts.scan_points < 2) fail(ErrorKind::Parameter, op, "scan_points must be >= 2");
  if (!(opts.time_tolerance > 0.0)) fail(ErrorKind::Parameter, op, "time_tolerance must be > 0");

  const HermitianEigen h_eig = hermitian_eigen((h_int + h_int.adjoint()) / 2.0);
  const Eigen::Index n = h_eig.values.size();
  const double norm = std::max(std::abs(h_eig.values(0)), std::abs(h_eig.values(n - 1)));
  const double e0 = energy_expectation(rho0.matrix(), levels);
  const auto f = [&](double t) {
    const CMatrix u = unitary_evolution(h_eig, t);
    return energy_expectation(u * rho0.matrix() * u.adjoint(), levels) - e0;
  };

  double t_f = 0.0;
  if (norm > 0.0) {
    const double t_max = opts.t_max.value_or(std::numbers::pi / norm);
    if (!(t_max > 0.0) || !std::isfinite(t_max)) fail(ErrorKind::Parameter, op, "t_max must be > 0");
    const double dt = t_max / static_cast<double>(opts.scan_points);
    // Values below the noise floor carry no sign; a stationary state stays below it everywhere.
    const double floor = 1e-14 * std::max(1.0, levels.max() - levels.min());
    double lo = 0.0;
    double f_lo = 0.0;
    double max_abs = 0.0;
    bool bracketed = false;
    double hi = 0.0;
    for (std::size_t k = 1; k <= opts.scan_points; ++k) {
      const double t = dt * static_cast<double>(k);
      const double v = f(t);
      max_abs = std::max(max_abs, std::abs(v));
      if (std::abs(v) < floor) continue;
      if (f_lo != 0.0 && (v > 0.0) != (f_lo > 0.0)) {
        hi = t;
        bracketed = true;
        break;
      }
      lo = t;
      f_lo = v;
    }
    if (!bracketed) {
      if (max_abs >= floor) fail(ErrorKind::RootNotFound, op, "no sign change of <H>(t) - <H>(0)");
    } else {
      while (hi - lo > opts.time_tolerance) {
        const double mid = 0.5 * (lo + hi);
        const double v = f(mid);
        if (v == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((v > 0.0) == (f_lo > 0.0)) {
          lo = mid;
          f_lo = v;
        } else {
          hi = mid;
        }
      }
      t_f = 0.5 * (lo + hi);
    }
  }

  QuantumRecord rec({0.0, rho0, levels, beta});
  rec.append_unitary(unitary_evolution(h_eig, t_f), levels, t_f);
  rec.append_isochore(DensityMatrix::diagonal(gibbs_state(levels, beta).gibbs), 1.0);
  return finish(ExtractionVariant::TwoStage, t_f, std::move(rec), rho0, temperature);
}

CMatrix passive_unitary(const DensityMatrix& rho, const LevelSystem& levels) {
  require_dim(rho, levels, "passive_unitary");
  const std::size_t n = levels.size();
  std::vector<std::size_t> by_energy(n);
  std::iota(by_energy.begin(), by_energy.end(), 0);
  std::stable_sort(by_energy.begin(), by_energy.end(),
                   [&](std::size_t a, std::size_t b) { return levels[a] < levels[b]; });
  // Eigenvalues are ascending, so the largest goes to the lowest level.
  const CMatrix& v = rho.eigen().vectors;
  CMatrix target = CMatrix::Zero(v.rows(), v.cols());
  for (std::size_t r = 0; r < n; ++r) {
    target(static_cast<Eigen::Index>(by_energy[r]), static_cast<Eigen::Index>(n - 1 - r)) = 1.0;
  }
  return target * v.adjoint();
}

ExtractionResult passive_extraction_protocol(const DensityMatrix& rho0, const LevelSystem& levels,
                                             double temperature, std::size_t stairs) {
  const char* op = "passive_extraction_protocol";
  require_dim(rho0, levels, op);
  const double beta = checked_beta(temperature, op);
  if (stairs < 1) fail(ErrorKind::Parameter, op, "stairs must be >= 1");

  QuantumRecord rec({0.0, rho0, levels, beta});
  const CMatrix u = passive_unitary(rho0, levels);
  rec.append_unitary(u, levels, 1.0);
  const std::vector<double> p = diagonal_of(rec.back().rho);
  std::vector<double> reshaped(p.size());
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (p[j] < kMinReference) {
      fail(ErrorKind::SingularReference, op, "passive state has a population below 1e-12");
    }
    reshaped[j] = -temperature * std::log(p[j]);
  }
  const LevelSystem shaped(reshaped);
  const std::size_t dim = levels.size();
  const CMatrix id = CMatrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  rec.append_unitary(id, shaped, 1.0);
  rec.append_isochore(DensityMatrix::diagonal(gibbs_state(shaped, beta).gibbs), 1.0);
  for (std::size_t k = 1; k <= stairs; ++k) {
    const double s = static_cast<double>(k) / static_cast<double>(stairs);
    const LevelSystem stair = LevelSystem::interpolate(shaped, levels, s);
    rec.append_unitary(id, stair, 0.0);
    rec.append_isochore(DensityMatrix::diagonal(gibbs_state(stair, beta).gibbs),
                        1.0 / static_cast<double>(stairs));
  }
  return finish(ExtractionVariant::FourStage, 0.0, std::move(rec), rho0, temperature);
}

}  // namespace gci
