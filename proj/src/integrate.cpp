#include "phmor/integrate.hpp"

#include <cmath>
#include <iostream>
#include <limits>

#include "phmor/numerics.hpp"

namespace phmor {

const Gl6Tableau& gl6_tableau() {
  static const Gl6Tableau tab = [] {
    const double s15 = std::sqrt(15.0);
    Gl6Tableau t;
    t.a << 5.0 / 36.0, 2.0 / 9.0 - s15 / 15.0, 5.0 / 36.0 - s15 / 30.0,
        5.0 / 36.0 + s15 / 24.0, 2.0 / 9.0, 5.0 / 36.0 - s15 / 24.0,
        5.0 / 36.0 + s15 / 30.0, 2.0 / 9.0 + s15 / 15.0, 5.0 / 36.0;
    t.b << 5.0 / 18.0, 4.0 / 9.0, 5.0 / 18.0;
    t.c << 0.5 - s15 / 10.0, 0.5, 0.5 + s15 / 10.0;
    return t;
  }();
  return tab;
}

void Gl6Stepper::factor(const OdeJacobian& jac_f, double t, const Vector& x, double dt) {
  const Index n = x.size();
  const Matrix jf = jac_f(t, x);
  if (jf.rows() != n || jf.cols() != n) {
    throw NumericalError("gl6: Jacobian has wrong dimensions");
  }
  require_finite(jf, "gl6 Jacobian");
  const Gl6Tableau& tab = gl6_tableau();
  Matrix stage = Matrix::Zero(3 * n, 3 * n);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      stage.block(i * n, j * n, n, n) = (-dt * tab.a(i, j)) * jf;
    }
  }
  stage.diagonal().array() += 1.0;
  lu_.compute(stage);
  const double rcond = lu_.rcond();
  if (!(rcond > std::numeric_limits<double>::epsilon())) {
    const double cond = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
    throw SingularMatrixError("gl6: stage Jacobian singular to working precision", cond);
  }
  have_lu_ = true;
  refresh_next_ = false;
  lu_dt_ = dt;
  lu_dim_ = n;
}

StepResult Gl6Stepper::step(const OdeRhs& f, const OdeJacobian& jac_f, double t, const Vector& x,
                            double dt, const NewtonConfig& cfg) {
  const Index n = x.size();
  const Gl6Tableau& tab = gl6_tableau();

  const Vector f0 = f(t, x);
  require_finite(f0, "gl6 rhs");

  Vector slopes(3 * n);  // stacked stage slopes K_1, K_2, K_3
  Vector residual(3 * n);
  auto reset_predictor = [&] {
    for (int i = 0; i < 3; ++i) slopes.segment(i * n, n) = f0;
  };
  auto eval_residual = [&] {
    for (int i = 0; i < 3; ++i) {
      Vector xi = x;
      for (int j = 0; j < 3; ++j) xi += (dt * tab.a(i, j)) * slopes.segment(j * n, n);
      residual.segment(i * n, n) = slopes.segment(i * n, n) - f(t + tab.c(i) * dt, xi);
    }
    return residual.norm();
  };

  bool need_fresh = !have_lu_ || lu_dim_ != n || lu_dt_ != dt || refresh_next_;
  bool fresh = false;
  bool converged = false;
  int iterations = 0;
  double rnorm = std::numeric_limits<double>::infinity();

  for (int attempt = 0; attempt < 2; ++attempt) {
    if (need_fresh) {
      factor(jac_f, t, x, dt);
      fresh = true;
    }
    reset_predictor();
    iterations = 0;
    rnorm = eval_residual();
    while (std::isfinite(rnorm) && rnorm > cfg.tol && iterations < cfg.max_iter) {
      slopes -= lu_.solve(residual);
      ++iterations;
      rnorm = eval_residual();
    }
    if (!std::isfinite(rnorm) && !fresh) {
      need_fresh = true;  // a stale Jacobian can diverge; retry fresh before failing
      continue;
    }
    if (!std::isfinite(rnorm)) {
      throw NumericalError("gl6: non-finite Newton residual at t=" + std::to_string(t));
    }
    converged = rnorm <= cfg.tol;
    if (converged || fresh) break;
    need_fresh = true;  // retry the step once with a current-state Jacobian
  }

  // Slow (or failed) convergence usually means the frozen Jacobian drifted;
  // rebuild before the next step.
  if (!converged || iterations >= 5) refresh_next_ = true;

  StepResult out;
  out.x = x;
  for (int i = 0; i < 3; ++i) out.x += (dt * tab.b(i)) * slopes.segment(i * n, n);
  if (!out.x.allFinite()) {
    throw NumericalError("gl6: non-finite state after step at t=" + std::to_string(t));
  }
  out.converged = converged;
  out.iterations = iterations;
  out.residual = rnorm;
  return out;
}

StepResult step_gl6(const OdeRhs& f, const OdeJacobian& jac_f, double t, const Vector& x,
                    double dt, const NewtonConfig& cfg) {
  Gl6Stepper stepper;
  return stepper.step(f, jac_f, t, x, dt, cfg);
}

Trajectory simulate(const OdeRhs& f, const OdeJacobian& jac_f, const Vector& x0,
                    const TimeGrid& grid, const NewtonConfig& cfg, const OutputFn& output,
                    SimulateDiagnostics* diag) {
  if (grid.n_t < 1 || !(grid.t_end > grid.t0)) {
    throw ConfigError("simulate: time grid must satisfy t_end > t0 and n_t >= 1");
  }
  require_finite(x0, "simulate x0");

  Trajectory traj;
  traj.grid = grid;
  const Index n = x0.size();
  traj.states.resize(n, grid.points());
  traj.states.col(0) = x0;

  const Vector y0 = output ? output(x0) : Vector(0);
  traj.outputs.resize(y0.size(), grid.points());
  if (y0.size() > 0) traj.outputs.col(0) = y0;

  Gl6Stepper stepper;
  const double dt = grid.dt();
  for (Index i = 1; i <= grid.n_t; ++i) {
    const StepResult res =
        stepper.step(f, jac_f, grid.time(i - 1), traj.states.col(i - 1), dt, cfg);
    if (!res.converged) {
      std::cerr << "warning: gl6 Newton not converged at step " << i << " (t="
                << grid.time(i) << ", residual=" << res.residual << ")\n";
      if (diag) diag->non_converged_steps.push_back(i);
    }
    traj.states.col(i) = res.x;
    if (y0.size() > 0) traj.outputs.col(i) = output(res.x);
  }
  return traj;
}

Trajectory simulate_ph(const PhSystem& sys, const InputSignal& u, const Vector& x0,
                       const TimeGrid& grid, const NewtonConfig& cfg, SimulateDiagnostics* diag) {
  const Matrix jr = sys.J() - sys.R();
  OdeRhs f = [&sys, &u, jr](double t, const Vector& x) -> Vector {
    return jr * sys.ham().gradient(x) + sys.B() * u(t);
  };
  OdeJacobian jac = [&sys, jr](double, const Vector& x) -> Matrix {
    return jr * sys.ham().hessian(x);
  };
  OutputFn out = [&sys](const Vector& x) { return eval_output(sys, x); };
  return simulate(f, jac, x0, grid, cfg, out, diag);
}

OdeJacobian finite_difference_jacobian(const OdeRhs& f) {
  return [f](double t, const Vector& x) -> Matrix {
    const Index n = x.size();
    const double h = 1e-7 * (1.0 + x.norm());
    Matrix jac(n, n);
    Vector xp = x;
    Vector xm = x;
    for (Index j = 0; j < n; ++j) {
      xp(j) += h;
      xm(j) -= h;
      jac.col(j) = (f(t, xp) - f(t, xm)) / (2.0 * h);
      xp(j) = x(j);
      xm(j) = x(j);
    }
    return jac;
  };
}

std::pair<Matrix, Matrix> snapshot_matrices(const PhSystem& sys, const Trajectory& traj) {
  Matrix x = traj.states;
  Matrix xq = Matrix::Zero(x.rows(), x.cols());
  if (!sys.ham().quadratic_only()) {
    for (Index i = 0; i < x.cols(); ++i) xq.col(i) = sys.ham().grad_p(x.col(i));
  }
  return {std::move(x), std::move(xq)};
}

Matrix gradient_snapshots(const PhSystem& sys, const Trajectory& traj) {
  Matrix g = sys.ham().Q * traj.states;
  if (!sys.ham().quadratic_only()) {
    for (Index i = 0; i < g.cols(); ++i) g.col(i) += sys.ham().grad_p(traj.states.col(i));
  }
  return g;
}

}  // namespace phmor
