#pragma once

#include <optional>

#include "phmor/embedding.hpp"
#include "phmor/integrate.hpp"
#include "phmor/rom.hpp"
#include "phmor/types.hpp"

namespace phmor {

// Relative trajectory errors, all summed over grid points i = 1..n_t (the
// initial snapshot is excluded):
//   e_x_red  = sqrt(sum |x_i - phi(xr_i)|^2   / sum |x_i|^2)
//   e_x_proj = sqrt(sum |x_i - phi(rho(x_i))|^2 / sum |x_i|^2)
//   e_y      = the same quotient on outputs
//   e_x_lowerbound (quadratic embeddings only) replaces the reconstruction by
//   the orthogonal-complement residual of span(B) + span(V1) + span(V2).
struct MetricsReport {
  double e_x_red = 0.0;
  double e_x_proj = 0.0;
  std::optional<double> e_x_lowerbound;
  double e_y = 0.0;
  Vector energy_error_series;  // filled by the sweep at the probe order, else empty
};

MetricsReport compute_metrics(const Trajectory& fom, const Trajectory& rom_traj,
                              const Embedding& emb);

// |H(x(t_i)) - H(x(0)) - int_0^{t_i} y^T u dt + int_0^{t_i} (R grad H)^T grad H dt|
// for every grid point, with both integrals by composite trapezoid on the grid.
// The reduced overload uses the reduced Hamiltonian, dissipation and outputs.
Vector energy_balance_error_series(const PhSystem& sys, const Trajectory& traj,
                                   const InputSignal& u);
Vector energy_balance_error_series(const ReducedPhSystem& rom, const Trajectory& traj,
                                   const InputSignal& u);

// Series value at one time t, which must lie on the grid.
double energy_balance_error(const PhSystem& sys, const Trajectory& traj, const InputSignal& u,
                            double t);
double energy_balance_error(const ReducedPhSystem& rom, const Trajectory& traj,
                            const InputSignal& u, double t);

}  // namespace phmor
