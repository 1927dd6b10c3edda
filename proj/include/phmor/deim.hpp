#pragma once

#include <vector>

#include "phmor/ph_system.hpp"
#include "phmor/types.hpp"

namespace phmor {

// Structure-preserving interpolation of the nonlinear Hamiltonian part:
// H_deim(x) = 1/2 x^T Q x + p(P^T x) with the oblique projector
// P = U (E^T U)^{-1} E^T. Because the interpolated Hamiltonian is modified
// (rather than the force), grad H_deim = Q x + P q(P^T x) is still the exact
// gradient of a scalar function, which is what keeps the reduced systems
// port-Hamiltonian. P is never materialized: the model stores C = U (E^T U)^{-1}
// and the row indices, so all evaluations scatter/gather through C.
struct DeimModel {
  SplitHamiltonian ham;       // underlying split Hamiltonian (dim N)
  Index d = 0;                // interpolation dimension; 0 = no nonlinear part
  Matrix U;                   // N x d POD basis of the grad_p snapshots
  std::vector<Index> indices; // greedily selected rows xi_1..xi_d
  Matrix C;                   // U (E^T U)^{-1}
};

// Smallest d with |X_Q - U_d U_d^T X_Q|_F / |X_Q|_F < eps, evaluated through
// the singular-value tail identity; d = 0 when X_Q vanishes.
Index choose_deim_dim(const Matrix& x_q, double eps);

// Greedy interpolation-index selection: xi_1 = argmax |u_1|; at step l the
// residual of u_l against the interpolation on the previous indices is
// maximized. Ties pick the smallest row index.
std::vector<Index> deim_indices(const Matrix& u);

DeimModel build_deim(const SplitHamiltonian& ham, const Matrix& x_q, double eps);

double deim_hamiltonian(const DeimModel& deim, const Vector& x);

// grad H_deim(x) = Q x + C * (q(P^T x) at the selected rows).
Vector deim_grad(const DeimModel& deim, const Vector& x);

// q(P^T x) restricted to the selected rows, given the packed coefficients
// z = C^T x (the nonzero values of P^T x). Shared by the reduced systems,
// which cache C^T V instead of forming P^T x in R^N.
Vector deim_selected_grad_p(const DeimModel& deim, const Vector& z);

// p(P^T x) given the packed coefficients z = C^T x.
double deim_p_at(const DeimModel& deim, const Vector& z);

}  // namespace phmor
