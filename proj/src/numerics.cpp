#include "phmor/numerics.hpp"

#include <cmath>
#include <limits>

#include <Eigen/LU>
#include <Eigen/SVD>

namespace phmor {

void require_finite(const Matrix& m, const char* name) {
  if (!m.allFinite()) {
    throw NumericalError(std::string(name) + ": non-finite entries");
  }
}

void require_finite(const Vector& v, const char* name) {
  if (!v.allFinite()) {
    throw NumericalError(std::string(name) + ": non-finite entries");
  }
}

ThinSvd thin_svd(const Matrix& a) {
  require_finite(a, "thin_svd");
  if (a.rows() == 0 || a.cols() == 0) {  // BDCSVD rejects empty input
    return ThinSvd{Matrix(a.rows(), 0), Vector(), Matrix(a.cols(), 0)};
  }
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) {
    throw NumericalError("thin_svd: SVD failed to converge");
  }
  ThinSvd out{svd.matrixU(), svd.singularValues(), svd.matrixV()};
  // Deterministic orientation: the largest-magnitude entry of each left vector
  // positive. Keying the sign to the first nonzero entry instead would let
  // roundoff-level leading entries flip whole basis vectors.
  for (Index j = 0; j < out.u.cols(); ++j) {
    Index imax = 0;
    out.u.col(j).cwiseAbs().maxCoeff(&imax);
    if (out.u(imax, j) < 0.0) {
      out.u.col(j) = -out.u.col(j);
      out.v.col(j) = -out.v.col(j);
    }
  }
  return out;
}

Index numerical_rank(const Vector& sigma, Index rows, Index cols) {
  if (sigma.size() == 0) return 0;
  const double cutoff =
      static_cast<double>(std::max(rows, cols)) * std::numeric_limits<double>::epsilon() * sigma(0);
  Index rank = 0;
  while (rank < sigma.size() && sigma(rank) > cutoff) ++rank;
  return rank;
}

Matrix pseudo_inverse(const Matrix& a) {
  const ThinSvd svd = thin_svd(a);
  const Index rank = numerical_rank(svd.sigma, a.rows(), a.cols());
  if (rank == 0) return Matrix::Zero(a.cols(), a.rows());
  Vector inv = Vector::Zero(svd.sigma.size());
  for (Index k = 0; k < rank; ++k) inv(k) = 1.0 / svd.sigma(k);
  return svd.v * inv.asDiagonal() * svd.u.transpose();
}

namespace {

Eigen::PartialPivLU<Matrix> checked_lu(const Matrix& a, const char* caller) {
  if (a.rows() != a.cols()) {
    throw NumericalError(std::string(caller) + ": matrix must be square, got " +
                         std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
  require_finite(a, caller);
  Eigen::PartialPivLU<Matrix> lu(a);
  const double rcond = lu.rcond();
  if (!(rcond > std::numeric_limits<double>::epsilon())) {
    const double cond =
        rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
    throw SingularMatrixError(std::string(caller) +
                                  ": matrix singular to working precision (condition estimate " +
                                  std::to_string(cond) + ")",
                              cond);
  }
  return lu;
}

}  // namespace

Vector solve_dense(const Matrix& a, const Vector& b) {
  return checked_lu(a, "solve_dense").solve(b);
}

Matrix solve_dense(const Matrix& a, const Matrix& b) {
  return checked_lu(a, "solve_dense").solve(b);
}

double condition_estimate(const Matrix& a) {
  if (a.rows() != a.cols()) {
    throw NumericalError("condition_estimate: matrix must be square");
  }
  Eigen::PartialPivLU<Matrix> lu(a);
  const double rcond = lu.rcond();
  return rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
}

Matrix kron_square_jacobian(const Vector& z) {
  const Index k = z.size();
  Matrix jac = Matrix::Zero(k * k, k);
  for (Index i = 0; i < k; ++i) {
    for (Index j = 0; j < k; ++j) {
      // d(z_i z_j)/dz_l = delta_il z_j + z_i delta_jl
      jac(i * k + j, i) += z(j);
      jac(i * k + j, j) += z(i);
    }
  }
  return jac;
}

}  // namespace phmor
