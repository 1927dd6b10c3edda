#pragma once

#include <variant>

#include "phmor/numerics.hpp"
#include "phmor/types.hpp"

namespace phmor {

// POD factors of the port-deflated snapshot family. One SVD of X - B B^+ X
// serves every reduced order r: the linear basis Vbar(r) is the first r - m
// left singular vectors, and the quadratic correction basis V2(r, r_n) is the
// next r_n columns, which by the orthogonal-deflation identity is exactly the
// POD basis of X - [B, Vbar][B, Vbar]^+ X.
struct DeflatedPod {
  Matrix B;         // N x m port section (full column rank; m = 0 for plain POD)
  Matrix Bdag;      // pseudo-inverse of B
  Matrix deflated;  // X - B Bdag X
  ThinSvd svd;      // of `deflated`
  Index rank = 0;   // numerical rank of `deflated`
};

DeflatedPod deflated_pod(const Matrix& x, const Matrix& b);

// phi(xr) = B xr_1 + Vbar xr_2 with point reduction rho = pinv(V).
struct LinearEmbedding {
  Matrix B;     // N x m
  Matrix Vbar;  // N x (r - m), orthonormal, orthogonal to span(B)
  Matrix V;     // [B, Vbar]
  Matrix Vdag;  // pseudo-inverse of V

  Index dim() const { return V.rows(); }
  Index reduced_dim() const { return V.cols(); }
  Index port_dim() const { return B.cols(); }
  Vector eval(const Vector& xr) const { return V * xr; }
  const Matrix& jacobian() const { return V; }
  Vector reduce(const Vector& x) const { return Vdag * x; }
};

// phi(xr) = B xr_1 + V1 xr_2 + V2 M (xr_2 (x) xr_2) with point reduction
// rho = pinv([B, V1]); the quadratic term only corrects the reconstruction.
struct QuadraticEmbedding {
  Matrix B;       // N x m
  Matrix V1;      // N x (r - m), orthonormal, orthogonal to span(B)
  Matrix V2;      // N x r_n, orthonormal, orthogonal to span([B, V1])
  Matrix M;       // r_n x (r - m)^2 ridge-fitted coefficients
  Matrix BV1dag;  // pseudo-inverse of [B, V1]
  double lambda = 0.0;  // ridge weight used for M

  Index dim() const { return B.rows(); }
  Index reduced_dim() const { return B.cols() + V1.cols(); }
  Index port_dim() const { return B.cols(); }
  Vector eval(const Vector& xr) const;
  Matrix jacobian(const Vector& xr) const;  // [B, V1 + V2 M (I (x) z + z (x) I)]
  Vector reduce(const Vector& x) const { return BV1dag * x; }
};

LinearEmbedding build_linear_embedding(const Matrix& x, const Matrix& b, Index r);
QuadraticEmbedding build_quadratic_embedding(const Matrix& x, const Matrix& b, Index r,
                                             Index r_n, double lambda);

// Shared-SVD variants used by the experiment sweep (one deflated POD for all r).
// The quadratic builder needs the raw snapshots again for the residual targets.
LinearEmbedding linear_embedding_from_pod(const DeflatedPod& pod, Index r);
QuadraticEmbedding quadratic_embedding_from_pod(const DeflatedPod& pod, const Matrix& x,
                                                Index r, Index r_n, double lambda);

// Plain POD embedding without a port section (SP1/SP2 baselines): B is N x 0.
LinearEmbedding pod_embedding(const Matrix& x, Index r);
LinearEmbedding pod_embedding_from_svd(const ThinSvd& svd, Index rows, Index cols, Index r);

// Relative projection error of [B, Vbar(r)] over the training snapshots
// (initial snapshot excluded); drives the lambda_reg(r) rule.
double linear_projection_error(const DeflatedPod& pod, const Matrix& x, Index r);

using Embedding = std::variant<LinearEmbedding, QuadraticEmbedding>;

Vector embed_eval(const Embedding& emb, const Vector& xr);
Matrix embed_jacobian(const Embedding& emb, const Vector& xr);
Vector embed_reduce(const Embedding& emb, const Vector& x);

}  // namespace phmor
