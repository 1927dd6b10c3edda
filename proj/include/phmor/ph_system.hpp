#pragma once

#include <functional>
#include <string>
#include <vector>

#include "phmor/types.hpp"

namespace phmor {

// Hamiltonian in split form H(x) = 1/2 x^T Q x + p(x), grad p = q. The quadratic
// part Q is symmetric positive semidefinite; x_e is an equilibrium of the full
// gradient (Q x_e + q(x_e) = 0). The split is carried explicitly by every model;
// it is never recovered from H by differentiation.
struct SplitHamiltonian {
  Index dim = 0;
  Matrix Q;
  std::function<double(const Vector&)> p;        // empty means p == 0
  std::function<Vector(const Vector&)> grad_p;   // empty iff p is empty
  std::function<Matrix(const Vector&)> hess_p;   // empty iff p is empty
  // Optional fast path for interpolated gradients: given row indices xi and the
  // values z_k = x(xi_k) of a vector supported on xi, returns grad p restricted
  // to xi. Only valid when component i of grad p depends on x_i alone
  // (componentwise nonlinearities); both benchmark models provide it.
  std::function<Vector(const std::vector<Index>&, const Vector&)> grad_p_selected;
  Vector x_e;

  bool quadratic_only() const { return !static_cast<bool>(p); }
  double hamiltonian(const Vector& x) const;
  Vector gradient(const Vector& x) const;  // Q x + q(x)
  Matrix hessian(const Vector& x) const;   // Q + hess_p(x)
};

// x' = (J - R) grad H(x) + B u,  y = B^T grad H(x), with J skew-symmetric,
// R symmetric positive semidefinite, J - R invertible and B of full column
// rank. The constructor enforces all structural invariants.
class PhSystem {
 public:
  // An empty x0 means the zero initial state.
  PhSystem(Matrix J, Matrix R, Matrix B, SplitHamiltonian ham, Vector x0 = Vector());

  Index dim() const { return J_.rows(); }
  Index input_dim() const { return B_.cols(); }
  const Matrix& J() const { return J_; }
  const Matrix& R() const { return R_; }
  const Matrix& B() const { return B_; }
  const SplitHamiltonian& ham() const { return ham_; }
  const Vector& x0() const { return x0_; }

 private:
  Matrix J_, R_, B_;
  SplitHamiltonian ham_;
  Vector x0_;
};

using InputSignal = std::function<Vector(double)>;

InputSignal constant_input(double amplitude, Index input_dim = 1);
InputSignal sine_input(double amplitude, double frequency, Index input_dim = 1);

Vector eval_rhs(const PhSystem& sys, const Vector& x, const Vector& u);
Vector eval_output(const PhSystem& sys, const Vector& x);
Matrix rhs_jacobian(const PhSystem& sys, const Vector& x);  // (J - R)(Q + hess_p(x))

// y^T u - [x'^T grad H + (R grad H)^T grad H]; identically zero in exact
// arithmetic for any port-Hamiltonian system.
double power_balance_residual(const PhSystem& sys, const Vector& x, const Vector& u);

// Detailed structural report for the `validate` subcommand: repeats the
// constructor checks with measured values and adds seeded finite-difference
// consistency checks of p against grad_p and hess_p.
struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;  // measured defect or estimate backing the verdict
};

std::vector<CheckResult> validate_structure(const PhSystem& sys, unsigned seed);

}  // namespace phmor
