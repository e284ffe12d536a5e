#include "steep/linalg.hpp"

#include <cmath>

#include "steep/errors.hpp"

namespace steep {

Matrix hermitize(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

double log2det_pd(const Matrix& m) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) {
    throw SingularChannel("log2det_pd: matrix is not positive definite");
  }
  double acc = 0.0;
  const auto& l = llt.matrixLLT();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    acc += std::log2(l(i, i).real());
  }
  return 2.0 * acc;
}

Matrix hermitian_sqrt(const Matrix& m, double tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(m));
  if (es.info() != Eigen::Success) {
    throw SingularChannel("hermitian_sqrt: eigensolver failed");
  }
  RealVector ev = es.eigenvalues();
  const double scale = std::max(ev.cwiseAbs().maxCoeff(), 1.0);
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -tol * scale) {
      throw InvalidArgument("hermitian_sqrt: matrix has a negative eigenvalue");
    }
    ev(i) = std::sqrt(std::max(ev(i), 0.0));
  }
  Matrix scaled = es.eigenvectors();
  for (Eigen::Index j = 0; j < ev.size(); ++j) scaled.col(j) *= ev(j);
  return scaled * es.eigenvectors().adjoint();
}

double log2det_gram_x_plus_i(const Matrix& g, const Matrix& x) {
  const Matrix xs = hermitian_sqrt(x);
  Matrix h = hermitize(xs * g * xs);
  h.diagonal().array() += 1.0;
  return log2det_pd(h);
}

double log2det_gram_x_plus_i(const Matrix& g, const RealVector& x_diag) {
  const RealVector xs = x_diag.cwiseMax(0.0).cwiseSqrt();
  Matrix sandwich = g;
  for (Eigen::Index i = 0; i < xs.size(); ++i) sandwich.row(i) *= xs(i);
  for (Eigen::Index j = 0; j < xs.size(); ++j) sandwich.col(j) *= xs(j);
  Matrix h = hermitize(sandwich);
  h.diagonal().array() += 1.0;
  return log2det_pd(h);
}

double clamp_rate(double bits, double floor_tol) {
  if (bits < -floor_tol) {
    throw InternalCheckFailure("rate came out negative beyond roundoff: " +
                               std::to_string(bits));
  }
  return bits > 0.0 ? bits : 0.0;
}

}  // namespace steep
