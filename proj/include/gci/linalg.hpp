#pragma once

#include <Eigen/Dense>
#include <functional>

namespace gci {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// Eigenvalues ascending; columns of `vectors` are the matching orthonormal eigenvectors.
struct HermitianEigen {
  Eigen::VectorXd values;
  CMatrix vectors;
  int sweeps;
};

// Cyclic complex Jacobi; stops when the off-diagonal Frobenius norm is <= 1e-14 max(1, |A|_F).
HermitianEigen hermitian_eigen(const CMatrix& a);

double hermiticity_defect(const CMatrix& a);
void require_hermitian(const CMatrix& a, double tolerance, const char* operation);

// V f(Lambda) V^dagger.
CMatrix spectral_apply(const HermitianEigen& eig, const std::function<double(double)>& f);
CMatrix spectral_apply(const CMatrix& a, const std::function<double(double)>& f);

// exp(-i h t) for Hermitian h, through its spectral decomposition.
CMatrix unitary_evolution(const HermitianEigen& h, double t);
CMatrix unitary_evolution(const CMatrix& h, double t);

// Largest |eigenvalue| of a Hermitian matrix.
double spectral_norm(const CMatrix& h);

}  // namespace gci
