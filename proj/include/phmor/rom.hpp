#pragma once

#include <memory>
#include <string>

#include <Eigen/LU>

#include "phmor/deim.hpp"
#include "phmor/embedding.hpp"
#include "phmor/integrate.hpp"
#include "phmor/ph_system.hpp"
#include "phmor/types.hpp"

namespace phmor {

// Condition-number bound on the Galerkin Gram matrix V^T (J-R)^{-1} V (and its
// state-dependent analogue for the quadratic manifold). Embeddings whose Gram
// matrix exceeds it are rejected with SubspaceConditionError.
inline constexpr double kGramConditionLimit = 1e12;

// Shared factorization of J - R. The generalized-Galerkin test basis and the
// quadratic-manifold online evaluation both need repeated solves with J - R
// and its transpose against tall blocks.
class GmgContext {
 public:
  explicit GmgContext(const PhSystem& sys);

  const PhSystem& system() const { return *sys_; }
  Matrix solve(const Matrix& rhs) const;             // (J - R)^{-1} rhs
  Matrix solve_transposed(const Matrix& rhs) const;  // (J - R)^{-T} rhs

 private:
  const PhSystem* sys_;
  Eigen::PartialPivLU<Matrix> lu_;
};

// Test basis W = (J-R)^{-T} V (V^T (J-R)^{-1} V)^{-T}, the unique W with
// W^T V = I and range(W) = range((J-R)^{-T} V). Throws SubspaceConditionError
// when cond(V^T (J-R)^{-1} V) exceeds kGramConditionLimit.
Matrix gmg_test_basis(const GmgContext& ctx, const Matrix& v);

// Reduced port-Hamiltonian system dxr = (Jr - Rr) grad Hr + Br u behind one
// interface for the four reduction methods. Jr, Rr, Br, and the tangent lift
// W are constant except for the quadratic manifold, where they depend on the
// expansion point. Two output maps live side by side: output() approximates
// the full-order output, y = B^T grad H evaluated on the reconstruction
// phi(xr), while port_output() is the port output Br^T grad Hr of the reduced
// tuple, the supply channel of the reduced energy balance. For the GMG
// methods the two coincide because range(B) lies inside range(D phi); for
// SP1/SP2 they differ by the effort-constraint residual.
class ReducedPhSystem {
 public:
  virtual ~ReducedPhSystem() = default;

  const std::string& method() const { return method_; }
  Index reduced_dim() const { return reduced_dim_; }
  Index full_dim() const { return full_dim_; }
  Index port_dim() const { return port_dim_; }
  const Vector& initial_state() const { return x0_; }
  const Embedding& embedding() const { return embedding_; }

  virtual Vector rhs(const Vector& xr, const Vector& u) const = 0;
  virtual Vector output(const Vector& xr) const = 0;
  // Br(xr)^T grad Hr(xr); overridden where a cheaper factored form exists.
  virtual Vector port_output(const Vector& xr) const;
  virtual double hamiltonian(const Vector& xr) const = 0;
  virtual Vector grad_hamiltonian(const Vector& xr) const = 0;
  virtual Matrix j_reduced(const Vector& xr) const = 0;
  virtual Matrix r_reduced(const Vector& xr) const = 0;
  virtual Matrix b_reduced(const Vector& xr) const = 0;
  virtual Matrix tangent_lift(const Vector& xr) const = 0;  // W(xr), N x r

  Vector reconstruct(const Vector& xr) const { return embed_eval(embedding_, xr); }
  // grad Hr^T Rr grad Hr, the reduced dissipated power (energy-balance metric).
  double dissipation(const Vector& xr) const;

 protected:
  ReducedPhSystem(std::string method, Embedding embedding, Vector x0, Index full_dim,
                  Index port_dim);

  std::string method_;
  Embedding embedding_;
  Vector x0_;
  Index full_dim_ = 0;
  Index reduced_dim_ = 0;
  Index port_dim_ = 0;
};

// Builders. Each takes the state snapshots X (initial column included; the
// initial reduced state is rho(X.col(0))) and, where the Hamiltonian has a
// nonlinear part, a DEIM model built from the grad_p snapshots of the same run.
std::unique_ptr<ReducedPhSystem> build_gmg_pod_rom(const PhSystem& sys, const Matrix& x,
                                                   const DeimModel& deim, Index r);
std::unique_ptr<ReducedPhSystem> build_gmg_qm_rom(const PhSystem& sys, const Matrix& x,
                                                  const DeimModel& deim, Index r, Index r_n,
                                                  double lambda);
std::unique_ptr<ReducedPhSystem> build_sp1_rom(const PhSystem& sys, const Matrix& x, Index r);
std::unique_ptr<ReducedPhSystem> build_sp2_rom(const PhSystem& sys, const Matrix& x,
                                               const Matrix& x_grad_h, Index r);

// Sweep variants sharing precomputed pieces across reduced orders: the J - R
// factorization, the DEIM model, and the POD factors behind the embeddings.
std::unique_ptr<ReducedPhSystem> make_gmg_pod_rom(const GmgContext& ctx, const DeimModel& deim,
                                                  LinearEmbedding emb, const Vector& x0_full);
std::unique_ptr<ReducedPhSystem> make_gmg_qm_rom(const GmgContext& ctx, const DeimModel& deim,
                                                 QuadraticEmbedding emb, const Vector& x0_full);
std::unique_ptr<ReducedPhSystem> make_sp1_rom(const PhSystem& sys, LinearEmbedding emb,
                                              const Vector& x0_full);
// v_grad: orthonormal POD basis (r columns) of the full-gradient snapshots.
std::unique_ptr<ReducedPhSystem> make_sp2_rom(const PhSystem& sys, LinearEmbedding emb,
                                              const Matrix& v_grad, const Vector& x0_full);

// Reduced-in-time integration: GL6 with the finite-difference Jacobian of the
// reduced right-hand side; outputs are the reduced outputs yr.
Trajectory simulate_rom(const ReducedPhSystem& rom, const InputSignal& u, const TimeGrid& grid,
                        const NewtonConfig& cfg, SimulateDiagnostics* diag = nullptr);

// Column-by-column lift of reduced states back to the full space.
Matrix reconstruct_states(const ReducedPhSystem& rom, const Matrix& reduced_states);

}  // namespace phmor
