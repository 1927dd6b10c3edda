#pragma once

#include <functional>
#include <utility>
#include <vector>

#include <Eigen/LU>

#include "phmor/ph_system.hpp"
#include "phmor/types.hpp"

namespace phmor {

// Uniform grid t_i = t0 + i * dt, i = 0..n_t, with dt = (t_end - t0) / n_t.
struct TimeGrid {
  double t0 = 0.0;
  double t_end = 0.0;
  Index n_t = 0;  // number of steps; the grid has n_t + 1 points

  double dt() const { return (t_end - t0) / static_cast<double>(n_t); }
  double time(Index i) const { return t0 + static_cast<double>(i) * dt(); }
  Index points() const { return n_t + 1; }
};

struct NewtonConfig {
  double tol = 1e-10;  // absolute bound on the stacked stage-residual norm
  int max_iter = 10;
};

struct Trajectory {
  TimeGrid grid;
  Matrix states;   // dim x (n_t + 1), column i at time grid.time(i)
  Matrix outputs;  // output_dim x (n_t + 1)
};

using OdeRhs = std::function<Vector(double, const Vector&)>;
using OdeJacobian = std::function<Matrix(double, const Vector&)>;
using OutputFn = std::function<Vector(const Vector&)>;

struct StepResult {
  Vector x;
  bool converged = false;
  int iterations = 0;   // Newton corrections applied
  double residual = 0;  // stacked stage-residual norm at exit
};

struct Gl6Tableau {
  Eigen::Matrix3d a;
  Eigen::Vector3d b;
  Eigen::Vector3d c;
};

// Three-stage Gauss-Legendre collocation tableau (classical order 6).
const Gl6Tableau& gl6_tableau();

// One implicit step of the three-stage Gauss-Legendre method. Newton runs on
// the stacked stage slopes (a 3*dim system) from the predictor K_i = f(t, x),
// with the simplified-Newton stage matrix I - dt (A (x) jac_f(t, x)). Failure
// to reach cfg.tol within cfg.max_iter corrections is reported through the
// converged flag, not an exception; a singular stage matrix or a non-finite
// state is a hard error.
StepResult step_gl6(const OdeRhs& f, const OdeJacobian& jac_f, double t, const Vector& x,
                    double dt, const NewtonConfig& cfg);

// Reusable stepper: keeps the LU of the stage matrix across steps and rebuilds
// it only when convergence degrades (or after a failed attempt, before the
// step is flagged). Results still satisfy the residual tolerance exactly as
// for per-step factorization; only the Newton path differs.
class Gl6Stepper {
 public:
  StepResult step(const OdeRhs& f, const OdeJacobian& jac_f, double t, const Vector& x,
                  double dt, const NewtonConfig& cfg);

 private:
  void factor(const OdeJacobian& jac_f, double t, const Vector& x, double dt);

  Eigen::PartialPivLU<Matrix> lu_;
  bool have_lu_ = false;
  bool refresh_next_ = false;
  double lu_dt_ = 0.0;
  Index lu_dim_ = -1;
};

struct SimulateDiagnostics {
  std::vector<Index> non_converged_steps;
};

// Fixed-step integration over the grid. states.col(0) = x0; outputs.col(i) =
// output(states.col(i)) when an output map is given. Newton non-convergence at
// a step emits a warning on stderr (and is recorded in diag when provided) but
// the integration continues with the last iterate.
Trajectory simulate(const OdeRhs& f, const OdeJacobian& jac_f, const Vector& x0,
                    const TimeGrid& grid, const NewtonConfig& cfg, const OutputFn& output,
                    SimulateDiagnostics* diag = nullptr);

// Port-Hamiltonian binding: f = (J-R) grad H + B u(t), analytic Jacobian,
// output y = B^T grad H.
Trajectory simulate_ph(const PhSystem& sys, const InputSignal& u, const Vector& x0,
                       const TimeGrid& grid, const NewtonConfig& cfg,
                       SimulateDiagnostics* diag = nullptr);

// Central-difference Jacobian with step 1e-7 * (1 + |x|); used for reduced
// systems where no analytic Jacobian is available.
OdeJacobian finite_difference_jacobian(const OdeRhs& f);

// (X, X_Q): state snapshots and grad_p snapshots column-by-column; X_Q is the
// zero matrix for purely quadratic Hamiltonians.
std::pair<Matrix, Matrix> snapshot_matrices(const PhSystem& sys, const Trajectory& traj);

// Full-gradient snapshots Q x^i + q(x^i) (input to the SP2 baseline).
Matrix gradient_snapshots(const PhSystem& sys, const Trajectory& traj);

}  // namespace phmor
