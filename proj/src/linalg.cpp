#include "gci/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <vector>

#include "gci/errors.hpp"

namespace gci {

namespace {

using cd = std::complex<double>;

double off_diagonal_norm(const CMatrix& a) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (i != j) s += std::norm(a(i, j));
    }
  }
  return std::sqrt(s);
}

}  // namespace

double hermiticity_defect(const CMatrix& a) {
  if (a.rows() != a.cols()) return std::numeric_limits<double>::infinity();
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

void require_hermitian(const CMatrix& a, double tolerance, const char* operation) {
  if (a.rows() == 0 || a.rows() != a.cols()) {
    fail(ErrorKind::InvalidInput, operation, "matrix must be square and non-empty");
  }
  if (!a.allFinite()) fail(ErrorKind::InvalidInput, operation, "non-finite matrix entry");
  if (hermiticity_defect(a) > tolerance) {
    fail(ErrorKind::InvalidInput, operation, "matrix is not Hermitian");
  }
}

HermitianEigen hermitian_eigen(const CMatrix& input) {
  constexpr const char* op = "hermitian_eigen";
  require_hermitian(input, 1e-9 * std::max(1.0, input.cwiseAbs().maxCoeff()), op);
  const Eigen::Index n = input.rows();
  CMatrix a = 0.5 * (input + input.adjoint());
  CMatrix v = CMatrix::Identity(n, n);
  const double threshold = 1e-14 * std::max(1.0, a.norm());
  constexpr int max_sweeps = 100;
  int sweep = 0;
  for (; sweep < max_sweeps && off_diagonal_norm(a) > threshold; ++sweep) {
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const cd z = a(p, q);
        const double r = std::abs(z);
        if (r == 0.0) continue;
        const cd phase = z / r;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double theta = (aqq - app) / (2.0 * r);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::hypot(theta, 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // G = diag(1, conj(phase)) [[c, s], [-s, c]] acting on coordinates p, q.
        const cd gpp = c;
        const cd gpq = s;
        const cd gqp = -s * std::conj(phase);
        const cd gqq = c * std::conj(phase);
        for (Eigen::Index k = 0; k < n; ++k) {
          const cd akp = a(k, p);
          const cd akq = a(k, q);
          a(k, p) = akp * gpp + akq * gqp;
          a(k, q) = akp * gpq + akq * gqq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const cd apk = a(p, k);
          const cd aqk = a(q, k);
          a(p, k) = std::conj(gpp) * apk + std::conj(gqp) * aqk;
          a(q, k) = std::conj(gpq) * apk + std::conj(gqq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (Eigen::Index k = 0; k < n; ++k) {
          const cd vkp = v(k, p);
          const cd vkq = v(k, q);
          v(k, p) = vkp * gpp + vkq * gqp;
          v(k, q) = vkp * gpq + vkq * gqq;
        }
      }
    }
  }
  if (off_diagonal_norm(a) > threshold) fail(ErrorKind::Numeric, op, "Jacobi sweeps did not converge");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&a](Eigen::Index x, Eigen::Index y) { return a(x, x).real() < a(y, y).real(); });
  HermitianEigen out{Eigen::VectorXd(n), CMatrix(n, n), sweep};
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values(i) = a(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]).real();
    out.vectors.col(i) = v.col(order[static_cast<std::size_t>(i)]);
  }
  return out;
}

CMatrix spectral_apply(const HermitianEigen& eig, const std::function<double(double)>& f) {
  const Eigen::Index n = eig.values.size();
  Eigen::VectorXcd d(n);
  for (Eigen::Index i = 0; i < n; ++i) d(i) = f(eig.values(i));
  return eig.vectors * d.asDiagonal() * eig.vectors.adjoint();
}

CMatrix spectral_apply(const CMatrix& a, const std::function<double(double)>& f) {
  return spectral_apply(hermitian_eigen(a), f);
}

CMatrix unitary_evolution(const HermitianEigen& h, double t) {
  const Eigen::Index n = h.values.size();
  Eigen::VectorXcd d(n);
  for (Eigen::Index i = 0; i < n; ++i) d(i) = std::polar(1.0, -h.values(i) * t);
  return h.vectors * d.asDiagonal() * h.vectors.adjoint();
}

CMatrix unitary_evolution(const CMatrix& h, double t) {
  return unitary_evolution(hermitian_eigen(h), t);
}

double spectral_norm(const CMatrix& h) {
  const HermitianEigen e = hermitian_eigen(h);
  return std::max(std::abs(e.values(0)), std::abs(e.values(e.values.size() - 1)));
}

}  // namespace gci
