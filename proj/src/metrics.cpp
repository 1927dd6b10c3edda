#include "phmor/metrics.hpp"

#include <cmath>
#include <functional>

namespace phmor {

namespace {

double relative_sqrt_quotient(double num, double den, const char* what) {
  if (den == 0.0) {
    if (num == 0.0) return 0.0;
    throw NumericalError(std::string("compute_metrics: zero reference norm for ") + what);
  }
  return std::sqrt(num / den);
}

void check_same_grid(const TimeGrid& a, const TimeGrid& b) {
  if (a.t0 != b.t0 || a.t_end != b.t_end || a.n_t != b.n_t) {
    throw ConfigError("compute_metrics: trajectories live on different time grids");
  }
}

// The supply term uses the port output B^T grad H (for a ROM: Br^T grad Hr),
// recomputed from the states, so the balance is the structural identity of
// the (reduced) pH tuple itself.
Vector energy_series_impl(const Trajectory& traj, const InputSignal& u,
                          const std::function<double(const Vector&)>& hamiltonian,
                          const std::function<Vector(const Vector&)>& port_output,
                          const std::function<double(const Vector&)>& dissipation) {
  const Index np = traj.grid.points();
  if (traj.states.cols() != np) {
    throw NumericalError("energy_balance_error: trajectory is incomplete");
  }
  const double dt = traj.grid.dt();
  Vector err(np);
  err(0) = 0.0;
  const double h0 = hamiltonian(traj.states.col(0));
  double net = 0.0;  // cumulative trapezoid of y^T u - (R grad H)^T grad H
  double prev = port_output(traj.states.col(0)).dot(u(traj.grid.time(0))) -
                dissipation(traj.states.col(0));
  for (Index i = 1; i < np; ++i) {
    const double cur = port_output(traj.states.col(i)).dot(u(traj.grid.time(i))) -
                       dissipation(traj.states.col(i));
    net += 0.5 * dt * (prev + cur);
    prev = cur;
    err(i) = std::abs(hamiltonian(traj.states.col(i)) - h0 - net);
  }
  return err;
}

Index grid_index_of(const TimeGrid& grid, double t) {
  const double dt = grid.dt();
  const auto i = static_cast<Index>(std::llround((t - grid.t0) / dt));
  if (i < 0 || i >= grid.points() || std::abs(grid.time(i) - t) > 1e-9 * std::max(1.0, std::abs(t))) {
    throw ConfigError("energy_balance_error: requested time is not a grid point");
  }
  return i;
}

}  // namespace

MetricsReport compute_metrics(const Trajectory& fom, const Trajectory& rom_traj,
                              const Embedding& emb) {
  check_same_grid(fom.grid, rom_traj.grid);
  const Index np = fom.grid.points();
  if (fom.states.cols() != np || rom_traj.states.cols() != np ||
      fom.outputs.cols() != np || rom_traj.outputs.cols() != np) {
    throw NumericalError("compute_metrics: trajectory is incomplete");
  }
  if (fom.outputs.rows() != rom_traj.outputs.rows()) {
    throw NumericalError("compute_metrics: output dimensions differ");
  }

  const QuadraticEmbedding* quad = std::get_if<QuadraticEmbedding>(&emb);
  Matrix b_dag;
  if (quad != nullptr && quad->B.cols() > 0) b_dag = pseudo_inverse(quad->B);
  double num_red = 0.0, num_proj = 0.0, num_low = 0.0, den_x = 0.0;
  double num_y = 0.0, den_y = 0.0;
  for (Index i = 1; i < np; ++i) {
    const Vector xi = fom.states.col(i);
    num_red += (xi - embed_eval(emb, rom_traj.states.col(i))).squaredNorm();
    num_proj += (xi - embed_eval(emb, embed_reduce(emb, xi))).squaredNorm();
    if (quad != nullptr) {
      Vector res = xi - quad->V1 * (quad->V1.transpose() * xi) -
                   quad->V2 * (quad->V2.transpose() * xi);
      if (quad->B.cols() > 0) res -= quad->B * (b_dag * xi);
      num_low += res.squaredNorm();
    }
    den_x += xi.squaredNorm();
    num_y += (fom.outputs.col(i) - rom_traj.outputs.col(i)).squaredNorm();
    den_y += fom.outputs.col(i).squaredNorm();
  }

  MetricsReport report;
  report.e_x_red = relative_sqrt_quotient(num_red, den_x, "e_x_red");
  report.e_x_proj = relative_sqrt_quotient(num_proj, den_x, "e_x_proj");
  report.e_y = relative_sqrt_quotient(num_y, den_y, "e_y");
  if (quad != nullptr) {
    report.e_x_lowerbound = relative_sqrt_quotient(num_low, den_x, "e_x_lowerbound");
  }
  return report;
}

Vector energy_balance_error_series(const PhSystem& sys, const Trajectory& traj,
                                   const InputSignal& u) {
  return energy_series_impl(
      traj, u, [&sys](const Vector& x) { return sys.ham().hamiltonian(x); },
      [&sys](const Vector& x) { return eval_output(sys, x); },
      [&sys](const Vector& x) {
        const Vector g = sys.ham().gradient(x);
        return (sys.R() * g).dot(g);
      });
}

Vector energy_balance_error_series(const ReducedPhSystem& rom, const Trajectory& traj,
                                   const InputSignal& u) {
  return energy_series_impl(
      traj, u, [&rom](const Vector& xr) { return rom.hamiltonian(xr); },
      [&rom](const Vector& xr) { return rom.port_output(xr); },
      [&rom](const Vector& xr) { return rom.dissipation(xr); });
}

double energy_balance_error(const PhSystem& sys, const Trajectory& traj, const InputSignal& u,
                            double t) {
  return energy_balance_error_series(sys, traj, u)(grid_index_of(traj.grid, t));
}

double energy_balance_error(const ReducedPhSystem& rom, const Trajectory& traj,
                            const InputSignal& u, double t) {
  return energy_balance_error_series(rom, traj, u)(grid_index_of(traj.grid, t));
}

}  // namespace phmor
