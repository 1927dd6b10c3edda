#pragma once

#include "phmor/ph_system.hpp"
#include "phmor/types.hpp"

namespace phmor {

// Chain of n masses; mass i and i+1 are joined by spring k_i and the last
// mass is anchored to the wall by spring k_n. Dampers c_i act on every mass
// and the input forces mass 1. State interleaved as (q_1, p_1, ..., q_n, p_n).
struct LinearMsdConfig {
  Index n_masses = 0;
  Vector masses;     // m_i > 0
  Vector stiffness;  // k_i > 0
  Vector damping;    // c_i > 0

  static LinearMsdConfig uniform(Index n, double mass, double stiffness, double damping);
};

PhSystem build_linear_msd(const LinearMsdConfig& cfg);

// Chain of n masses with cubic hardening springs k1 + k2 (elongation)^2 between
// neighbours (and to the wall for the last mass), uniform damping gamma and the
// input forcing the first velocity. The model is built directly in the
// elongation coordinates xhat = T x, T = blockdiag(M, I), (M x)_i = x_i - x_{i+1}
// (x_{n+1} = 0), which makes the non-quadratic Hamiltonian part componentwise:
// p(xhat) = sum_k 1/4 k2 xhat_k^4 over the first n entries.
struct NonlinearMsdConfig {
  Index n_masses = 0;
  double k1 = 1.0;
  double k2 = 1.0;
  double mass = 1.0;     // coefficient of the kinetic term 1/2 m v^2
  double damping = 1.0;  // gamma, uniform over the masses
};

struct NonlinearMsd {
  PhSystem system;  // transformed coordinates
  Matrix T;         // blockdiag(M, I_n)
};

NonlinearMsd build_nonlinear_msd(const NonlinearMsdConfig& cfg);

}  // namespace phmor
