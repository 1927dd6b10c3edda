#include "phmor/embedding.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace phmor {

Vector QuadraticEmbedding::eval(const Vector& xr) const {
  const Index m = port_dim();
  const Vector z = xr.tail(xr.size() - m);
  return B * xr.head(m) + V1 * z + V2 * (M * kron(z, z));
}

Matrix QuadraticEmbedding::jacobian(const Vector& xr) const {
  const Index m = port_dim();
  const Vector z = xr.tail(xr.size() - m);
  Matrix d(dim(), xr.size());
  d.leftCols(m) = B;
  d.rightCols(z.size()) = V1 + V2 * (M * kron_square_jacobian(z));
  return d;
}

DeflatedPod deflated_pod(const Matrix& x, const Matrix& b) {
  if (b.rows() != x.rows()) {
    throw NumericalError("deflated_pod: B and X row counts differ");
  }
  require_finite(x, "deflated_pod X");
  DeflatedPod pod;
  pod.B = b;
  if (b.cols() > 0) {
    require_finite(b, "deflated_pod B");
    const ThinSvd bsvd = thin_svd(b);
    if (numerical_rank(bsvd.sigma, b.rows(), b.cols()) != b.cols()) {
      throw NumericalError("deflated_pod: port matrix B is column rank deficient");
    }
  }
  pod.Bdag = pseudo_inverse(b);
  pod.deflated = x - pod.B * (pod.Bdag * x);
  pod.svd = thin_svd(pod.deflated);
  // Rank relative to the snapshot scale: the subtraction leaves absolute
  // roundoff of order eps * |X| in the deflated family, so directions below
  // that scale are noise even when they dominate the deflated spectrum
  // (snapshots entirely inside span(B) must come out as rank 0).
  pod.rank = 0;
  if (pod.svd.sigma.size() > 0) {
    const double cutoff =
        static_cast<double>(std::max(pod.deflated.rows(), pod.deflated.cols())) *
        std::numeric_limits<double>::epsilon() * std::max(pod.svd.sigma(0), x.norm());
    while (pod.rank < pod.svd.sigma.size() && pod.svd.sigma(pod.rank) > cutoff) ++pod.rank;
  }
  return pod;
}

namespace {

void check_pod_order(const DeflatedPod& pod, Index r, Index extra, const char* caller) {
  const Index m = pod.B.cols();
  if (r < m || r > pod.B.rows()) {
    throw NumericalError(std::string(caller) + ": reduced order r = " + std::to_string(r) +
                         " outside [m, N] = [" + std::to_string(m) + ", " +
                         std::to_string(pod.B.rows()) + "]");
  }
  if (pod.rank < r - m + extra) {
    throw NumericalError(std::string(caller) + ": deflated snapshot rank " +
                         std::to_string(pod.rank) + " is insufficient (need " +
                         std::to_string(r - m + extra) +
                         " directions); maximum achievable r = " +
                         std::to_string(pod.rank + m - extra));
  }
}

}  // namespace

LinearEmbedding linear_embedding_from_pod(const DeflatedPod& pod, Index r) {
  check_pod_order(pod, r, 0, "linear embedding");
  LinearEmbedding emb;
  emb.B = pod.B;
  emb.Vbar = pod.svd.u.leftCols(r - pod.B.cols());
  emb.V.resize(pod.B.rows(), r);
  emb.V << emb.B, emb.Vbar;
  emb.Vdag = pseudo_inverse(emb.V);
  return emb;
}

LinearEmbedding build_linear_embedding(const Matrix& x, const Matrix& b, Index r) {
  return linear_embedding_from_pod(deflated_pod(x, b), r);
}

LinearEmbedding pod_embedding_from_svd(const ThinSvd& svd, Index rows, Index cols, Index r) {
  const Index rank = numerical_rank(svd.sigma, rows, cols);
  if (r < 1 || rank < r) {
    throw NumericalError("pod_embedding: snapshot rank " + std::to_string(rank) +
                         " is insufficient for r = " + std::to_string(r));
  }
  LinearEmbedding emb;
  emb.B.resize(rows, 0);
  emb.Vbar = svd.u.leftCols(r);
  emb.V = emb.Vbar;
  emb.Vdag = emb.V.transpose();  // orthonormal columns
  return emb;
}

LinearEmbedding pod_embedding(const Matrix& x, Index r) {
  return pod_embedding_from_svd(thin_svd(x), x.rows(), x.cols(), r);
}

namespace {

// Ridge fit M = argmin sum_i |targets_i - M k_i|^2 + lambda |M|_F^2 through the
// SVD of the regressor matrix; lambda = 0 falls back to the minimum-norm
// least-squares solution (pseudo-inverse filter).
Matrix ridge_fit(const Matrix& regressors, const Matrix& targets, double lambda) {
  const ThinSvd svd = thin_svd(regressors);
  Vector filter = Vector::Zero(svd.sigma.size());
  if (lambda > 0.0) {
    for (Index k = 0; k < filter.size(); ++k) {
      const double s = svd.sigma(k);
      filter(k) = s / (s * s + lambda);
    }
  } else {
    const Index rank = numerical_rank(svd.sigma, regressors.rows(), regressors.cols());
    for (Index k = 0; k < rank; ++k) filter(k) = 1.0 / svd.sigma(k);
  }
  // rows of `regressors` are k_i^T, rows of `targets` are target_i^T.
  return targets.transpose() * svd.u * filter.asDiagonal() * svd.v.transpose();
}

}  // namespace

QuadraticEmbedding quadratic_embedding_from_pod(const DeflatedPod& pod, const Matrix& x,
                                                Index r, Index r_n, double lambda) {
  const Index m = pod.B.cols();
  const Index rk = r - m;
  if (r_n < 1 || rk < 1 || r_n > rk * rk) {
    throw NumericalError("quadratic embedding: need 1 <= r_n <= (r - m)^2, got r_n = " +
                         std::to_string(r_n) + ", r - m = " + std::to_string(rk));
  }
  if (!(lambda >= 0.0)) {
    throw NumericalError("quadratic embedding: lambda_reg must be >= 0");
  }
  check_pod_order(pod, r, r_n, "quadratic embedding");
  if (x.cols() < 2) {
    throw NumericalError("quadratic embedding: need at least two snapshots to fit M");
  }

  QuadraticEmbedding emb;
  emb.B = pod.B;
  emb.V1 = pod.svd.u.leftCols(rk);
  emb.V2 = pod.svd.u.middleCols(rk, r_n);
  emb.lambda = lambda;
  Matrix bv1(pod.B.rows(), r);
  bv1 << emb.B, emb.V1;
  emb.BV1dag = pseudo_inverse(bv1);

  // Fit targets: residual of each training snapshot (the initial one excluded)
  // after the port and linear POD parts, projected onto V2; regressors are the
  // squared reduced coordinates z (x) z.
  const Index n_used = x.cols() - 1;
  Matrix regressors(n_used, rk * rk);
  Matrix targets(n_used, r_n);
  for (Index i = 1; i < x.cols(); ++i) {
    const Vector xi = x.col(i);
    const Vector z = emb.V1.transpose() * xi;
    const Vector residual = xi - pod.B * (pod.Bdag * xi) - emb.V1 * z;
    regressors.row(i - 1) = kron(z, z).transpose();
    targets.row(i - 1) = (emb.V2.transpose() * residual).transpose();
  }
  emb.M = ridge_fit(regressors, targets, lambda);
  return emb;
}

QuadraticEmbedding build_quadratic_embedding(const Matrix& x, const Matrix& b, Index r,
                                             Index r_n, double lambda) {
  return quadratic_embedding_from_pod(deflated_pod(x, b), x, r, r_n, lambda);
}

double linear_projection_error(const DeflatedPod& pod, const Matrix& x, Index r) {
  check_pod_order(pod, r, 0, "linear_projection_error");
  const Matrix vbar = pod.svd.u.leftCols(r - pod.B.cols());
  double num = 0.0;
  double den = 0.0;
  for (Index i = 1; i < x.cols(); ++i) {
    const Vector xi = x.col(i);
    const Vector residual = xi - pod.B * (pod.Bdag * xi) - vbar * (vbar.transpose() * xi);
    num += residual.squaredNorm();
    den += xi.squaredNorm();
  }
  if (den == 0.0) {
    throw NumericalError("linear_projection_error: training snapshots are all zero");
  }
  return std::sqrt(num / den);
}

Vector embed_eval(const Embedding& emb, const Vector& xr) {
  return std::visit([&](const auto& e) { return e.eval(xr); }, emb);
}

Matrix embed_jacobian(const Embedding& emb, const Vector& xr) {
  return std::visit(
      [&](const auto& e) -> Matrix {
        if constexpr (std::is_same_v<std::decay_t<decltype(e)>, LinearEmbedding>) {
          return e.jacobian();
        } else {
          return e.jacobian(xr);
        }
      },
      emb);
}

Vector embed_reduce(const Embedding& emb, const Vector& x) {
  return std::visit([&](const auto& e) { return e.reduce(x); }, emb);
}

}  // namespace phmor
