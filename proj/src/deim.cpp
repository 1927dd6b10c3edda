#include "phmor/deim.hpp"

#include <cmath>

#include "phmor/numerics.hpp"

namespace phmor {

namespace {

// Smallest d with the relative Frobenius tail below eps. tail(d) is the sum of
// the squared singular values from index d on, accumulated from the smallest
// values up so the partial sums are exact enough near the tolerance.
Index dim_from_singular_values(const Vector& sigma, double eps) {
  const Index k = sigma.size();
  Vector tail = Vector::Zero(k + 1);
  for (Index j = k - 1; j >= 0; --j) tail(j) = tail(j + 1) + sigma(j) * sigma(j);
  const double total = tail(0);
  for (Index d = 0; d <= k; ++d) {
    if (std::sqrt(tail(d) / total) < eps) return d;
  }
  return k;
}

void check_deim_eps(double eps) {
  if (!(eps > 0.0) || eps > 1.0) {
    throw ConfigError("choose_deim_dim: eps must lie in (0, 1]");
  }
}

}  // namespace

Index choose_deim_dim(const Matrix& x_q, double eps) {
  check_deim_eps(eps);
  require_finite(x_q, "choose_deim_dim");
  if (x_q.norm() == 0.0) return 0;
  return dim_from_singular_values(thin_svd(x_q).sigma, eps);
}

std::vector<Index> deim_indices(const Matrix& u) {
  const Index n = u.rows();
  const Index d = u.cols();
  if (d == 0) return {};
  if (d > n) throw NumericalError("deim_indices: more basis vectors than rows");
  require_finite(u, "deim_indices");

  // argmax of |v| with the smallest-index tie rule (strict improvement only).
  auto argmax_abs = [](const Vector& v) {
    Index best = 0;
    double best_val = std::abs(v(0));
    for (Index i = 1; i < v.size(); ++i) {
      const double a = std::abs(v(i));
      if (a > best_val) {
        best_val = a;
        best = i;
      }
    }
    return best;
  };

  std::vector<Index> indices;
  indices.reserve(d);
  indices.push_back(argmax_abs(u.col(0)));
  for (Index l = 1; l < d; ++l) {
    // Interpolate u_l on the indices chosen so far and take the worst residual row.
    Matrix etu(l, l);
    Vector etu_l(l);
    for (Index i = 0; i < l; ++i) {
      for (Index j = 0; j < l; ++j) etu(i, j) = u(indices[i], j);
      etu_l(i) = u(indices[i], l);
    }
    Vector coeff;
    try {
      coeff = solve_dense(etu, etu_l);
    } catch (const SingularMatrixError& e) {
      throw SingularMatrixError("deim_indices: singular interpolation system at step " +
                                    std::to_string(l + 1) + " (" + e.what() + ")",
                                e.condition_estimate());
    }
    const Vector residual = u.col(l) - u.leftCols(l) * coeff;
    indices.push_back(argmax_abs(residual));
  }
  return indices;
}

DeimModel build_deim(const SplitHamiltonian& ham, const Matrix& x_q, double eps) {
  DeimModel model;
  model.ham = ham;
  if (ham.quadratic_only()) {
    // No nonlinear part: any snapshot content would be spurious.
    model.d = 0;
    model.U.resize(ham.dim, 0);
    model.C.resize(ham.dim, 0);
    return model;
  }
  if (x_q.rows() != ham.dim) {
    throw NumericalError("build_deim: snapshot rows do not match the Hamiltonian dimension");
  }
  check_deim_eps(eps);
  require_finite(x_q, "build_deim");
  if (x_q.norm() == 0.0) {
    model.d = 0;
    model.U.resize(ham.dim, 0);
    model.C.resize(ham.dim, 0);
    return model;
  }
  const ThinSvd svd = thin_svd(x_q);
  model.d = dim_from_singular_values(svd.sigma, eps);
  if (model.d == 0) {
    model.U.resize(ham.dim, 0);
    model.C.resize(ham.dim, 0);
    return model;
  }
  model.U = svd.u.leftCols(model.d);
  model.indices = deim_indices(model.U);
  Matrix etu(model.d, model.d);
  for (Index i = 0; i < model.d; ++i) etu.row(i) = model.U.row(model.indices[i]);
  const Matrix etu_t = etu.transpose();
  const Matrix u_t = model.U.transpose();
  model.C = solve_dense(etu_t, u_t).transpose();  // U (E^T U)^{-1}
  return model;
}

namespace {

// Values of grad p (or p) at the scattered vector E z without the fast path:
// materialize P^T x once and evaluate the full callable.
Vector scatter(const DeimModel& deim, const Vector& z) {
  Vector w = Vector::Zero(deim.ham.dim);
  for (Index k = 0; k < deim.d; ++k) w(deim.indices[k]) = z(k);
  return w;
}

}  // namespace

Vector deim_selected_grad_p(const DeimModel& deim, const Vector& z) {
  if (deim.ham.grad_p_selected) {
    return deim.ham.grad_p_selected(deim.indices, z);
  }
  const Vector full = deim.ham.grad_p(scatter(deim, z));
  Vector out(deim.d);
  for (Index k = 0; k < deim.d; ++k) out(k) = full(deim.indices[k]);
  return out;
}

double deim_p_at(const DeimModel& deim, const Vector& z) {
  return deim.ham.p(scatter(deim, z));
}

double deim_hamiltonian(const DeimModel& deim, const Vector& x) {
  double h = 0.5 * x.dot(deim.ham.Q * x);
  if (deim.d > 0) h += deim_p_at(deim, deim.C.transpose() * x);
  return h;
}

Vector deim_grad(const DeimModel& deim, const Vector& x) {
  Vector g = deim.ham.Q * x;
  if (deim.d > 0) g += deim.C * deim_selected_grad_p(deim, deim.C.transpose() * x);
  return g;
}

}  // namespace phmor
