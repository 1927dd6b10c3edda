#pragma once

#include <string>

#include <Eigen/Dense>

#include "phmor/types.hpp"

namespace phmor {

// Thin SVD a = u * sigma.asDiagonal() * v^T with singular values descending and
// a deterministic sign convention: the largest-magnitude entry of every column
// of u is positive (v is flipped together with u). The convention keeps POD
// bases, and therefore all downstream CSV output, byte-reproducible, and it is
// stable against roundoff in small leading entries.
template <typename Scalar>
struct ThinSvdResult {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> u;
  Eigen::Vector<Scalar, Eigen::Dynamic> sigma;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> v;
};

using ThinSvd = ThinSvdResult<double>;

ThinSvd thin_svd(const Matrix& a);

// Rank with the conventional cutoff: keep sigma_k > max(rows, cols) * eps * sigma_0.
Index numerical_rank(const Vector& sigma, Index rows, Index cols);

// Moore-Penrose inverse through thin_svd; singular values at or below the
// numerical_rank cutoff are treated as zero.
Matrix pseudo_inverse(const Matrix& a);

// Solve a x = b by pivoted LU. Throws SingularMatrixError (carrying the 1-norm
// condition estimate) when a is singular to working precision.
Vector solve_dense(const Matrix& a, const Vector& b);
Matrix solve_dense(const Matrix& a, const Matrix& b);

// 1-norm condition estimate from pivoted LU; infinity for exactly singular a.
double condition_estimate(const Matrix& a);

// kron(a, b) for equal-length vectors: result(i*k + j) = a(i) * b(j). The only
// use is z (x) z in the quadratic embedding, so unequal lengths are a bug.
template <typename DerivedA, typename DerivedB>
Eigen::Vector<typename DerivedA::Scalar, Eigen::Dynamic> kron(
    const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  static_assert(DerivedA::ColsAtCompileTime == 1 && DerivedB::ColsAtCompileTime == 1,
                "kron expects column vectors");
  if (a.size() != b.size()) {
    throw NumericalError("kron: length mismatch (" + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()) + ")");
  }
  const Index k = a.size();
  Eigen::Vector<typename DerivedA::Scalar, Eigen::Dynamic> out(k * k);
  for (Index i = 0; i < k; ++i) {
    out.segment(i * k, k) = a(i) * b;
  }
  return out;
}

// Jacobian of z -> kron(z, z): the k^2 x k matrix I (x) z + z (x) I.
Matrix kron_square_jacobian(const Vector& z);

}  // namespace phmor
