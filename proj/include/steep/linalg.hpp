#ifndef STEEP_LINALG_HPP
#define STEEP_LINALG_HPP

#include <Eigen/Dense>
#include <complex>

namespace steep {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// 0.5*(M + M^H); kills the anti-Hermitian roundoff left by products of
// Hermitian factors so Cholesky/eigensolvers see an exactly Hermitian input.
Matrix hermitize(const Matrix& m);

// log2 det of a Hermitian positive definite matrix via Cholesky.
// Throws SingularChannel if the factorization fails.
double log2det_pd(const Matrix& m);

// Hermitian PSD square root. Eigenvalues below -tol*max_eig throw
// InvalidArgument; small negatives are clamped to zero.
Matrix hermitian_sqrt(const Matrix& m, double tol = 1e-10);

// log2 |G X + I| for Hermitian PSD G and X, evaluated as the Hermitian
// PD determinant |X^{1/2} G X^{1/2} + I|.
double log2det_gram_x_plus_i(const Matrix& g, const Matrix& x);
// Same with diagonal X (entries >= 0).
double log2det_gram_x_plus_i(const Matrix& g, const RealVector& x_diag);

// All rates are provably >= 0; clamp tiny negative roundoff, reject worse.
double clamp_rate(double bits, double floor_tol = 1e-9);

}  // namespace steep

#endif
