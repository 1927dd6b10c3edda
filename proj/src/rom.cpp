#include "phmor/rom.hpp"

#include <limits>
#include <sstream>
#include <utility>

namespace phmor {

namespace {

Matrix symmetrized(const Matrix& a) { return 0.5 * (a + a.transpose()); }

}  // namespace

GmgContext::GmgContext(const PhSystem& sys) : sys_(&sys) {
  lu_.compute(sys.J() - sys.R());
  const double rc = lu_.rcond();
  if (!(rc > std::numeric_limits<double>::epsilon())) {
    throw SingularMatrixError(
        "gmg: J - R is numerically singular",
        rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity());
  }
}

Matrix GmgContext::solve(const Matrix& rhs) const { return lu_.solve(rhs); }

Matrix GmgContext::solve_transposed(const Matrix& rhs) const {
  return lu_.transpose().solve(rhs);
}

Matrix gmg_test_basis(const GmgContext& ctx, const Matrix& v) {
  if (v.rows() != ctx.system().dim()) {
    throw NumericalError("gmg_test_basis: basis row count does not match the system");
  }
  const Matrix gram = v.transpose() * ctx.solve(v);
  const double cond = condition_estimate(gram);
  if (!(cond <= kGramConditionLimit)) {
    std::ostringstream msg;
    msg << "gmg: embedding is not admissible, cond(V^T (J-R)^{-1} V) = " << cond
        << " exceeds " << kGramConditionLimit;
    throw SubspaceConditionError(msg.str(), v.cols(), cond);
  }
  // W = (J-R)^{-T} V gram^{-T}  <=>  gram W^T = ((J-R)^{-T} V)^T.
  const Matrix kt = ctx.solve_transposed(v).transpose();
  return solve_dense(gram, kt).transpose();
}

ReducedPhSystem::ReducedPhSystem(std::string method, Embedding embedding, Vector x0,
                                 Index full_dim, Index port_dim)
    : method_(std::move(method)),
      embedding_(std::move(embedding)),
      x0_(std::move(x0)),
      full_dim_(full_dim),
      reduced_dim_(x0_.size()),
      port_dim_(port_dim) {}

Vector ReducedPhSystem::port_output(const Vector& xr) const {
  return b_reduced(xr).transpose() * grad_hamiltonian(xr);
}

double ReducedPhSystem::dissipation(const Vector& xr) const {
  const Vector g = grad_hamiltonian(xr);
  return g.dot(r_reduced(xr) * g);
}

namespace {

// Shared behaviour of the methods with constant reduced operators (GMG with a
// linear embedding, SP1, SP2); only the reduced Hamiltonian differs.
class ConstantRom : public ReducedPhSystem {
 public:
  ConstantRom(std::string method, Embedding embedding, Vector x0, Index full_dim,
              Matrix w, Matrix jr, Matrix rr, Matrix br)
      : ReducedPhSystem(std::move(method), std::move(embedding), std::move(x0), full_dim,
                        br.cols()),
        W_(std::move(w)),
        Jr_(std::move(jr)),
        Rr_(std::move(rr)),
        Br_(std::move(br)),
        JmR_(Jr_ - Rr_) {}

  Vector rhs(const Vector& xr, const Vector& u) const override {
    return JmR_ * grad_hamiltonian(xr) + Br_ * u;
  }
  // Port output; the GMG methods inherit it as their output as well, since
  // there B^T grad H(V xr) = Br^T grad Hr(xr) exactly (range(B) in range(V)
  // and W^T V = I). SP1/SP2 override output() with the unreduced map.
  Vector output(const Vector& xr) const override {
    return Br_.transpose() * grad_hamiltonian(xr);
  }
  Matrix j_reduced(const Vector&) const override { return Jr_; }
  Matrix r_reduced(const Vector&) const override { return Rr_; }
  Matrix b_reduced(const Vector&) const override { return Br_; }
  Matrix tangent_lift(const Vector&) const override { return W_; }

 protected:
  Matrix W_, Jr_, Rr_, Br_, JmR_;
};

class GmgPodRom final : public ConstantRom {
 public:
  GmgPodRom(LinearEmbedding emb, Vector x0, Index full_dim, Matrix w, Matrix jr, Matrix rr,
            Matrix br, Matrix q_red, DeimModel deim)
      : ConstantRom("GMG-POD", Embedding(std::move(emb)), std::move(x0), full_dim,
                    std::move(w), std::move(jr), std::move(rr), std::move(br)),
        Qr_(std::move(q_red)),
        deim_(std::move(deim)) {
    if (deim_.d > 0) {
      VtC_ = std::get<LinearEmbedding>(embedding_).V.transpose() * deim_.C;
    }
  }

  double hamiltonian(const Vector& xr) const override {
    double h = 0.5 * xr.dot(Qr_ * xr);
    if (deim_.d > 0) h += deim_p_at(deim_, VtC_.transpose() * xr);
    return h;
  }

  Vector grad_hamiltonian(const Vector& xr) const override {
    Vector g = Qr_ * xr;
    if (deim_.d > 0) g += VtC_ * deim_selected_grad_p(deim_, VtC_.transpose() * xr);
    return g;
  }

 private:
  Matrix Qr_;       // V^T Q V
  DeimModel deim_;  // interpolated nonlinear part (d = 0: purely quadratic)
  Matrix VtC_;      // V^T C
};

class Sp1Rom final : public ConstantRom {
 public:
  Sp1Rom(LinearEmbedding emb, Vector x0, Index full_dim, Matrix w, Matrix jr, Matrix rr,
         Matrix br, Matrix q_red, Matrix bt_qv)
      : ConstantRom("SP1", Embedding(std::move(emb)), std::move(x0), full_dim, std::move(w),
                    std::move(jr), std::move(rr), std::move(br)),
        Qr_(std::move(q_red)),
        BtQV_(std::move(bt_qv)) {}

  double hamiltonian(const Vector& xr) const override { return 0.5 * xr.dot(Qr_ * xr); }
  Vector grad_hamiltonian(const Vector& xr) const override { return Qr_ * xr; }

  // y = B^T grad H(V xr) = (B^T Q V) xr; differs from the port output because
  // range(B) is not contained in range(V) for a plain POD basis.
  Vector output(const Vector& xr) const override { return BtQV_ * xr; }

 private:
  Matrix Qr_;
  Matrix BtQV_;  // B^T Q V
};

class Sp2Rom final : public ConstantRom {
 public:
  Sp2Rom(LinearEmbedding emb, Vector x0, Index full_dim, Matrix w, Matrix jr, Matrix rr,
         Matrix br, Matrix q_red, Matrix bt_qv, Matrix b_full, SplitHamiltonian ham)
      : ConstantRom("SP2", Embedding(std::move(emb)), std::move(x0), full_dim, std::move(w),
                    std::move(jr), std::move(rr), std::move(br)),
        Qr_(std::move(q_red)),
        BtQV_(std::move(bt_qv)),
        B_(std::move(b_full)),
        ham_(std::move(ham)) {}

  double hamiltonian(const Vector& xr) const override {
    double h = 0.5 * xr.dot(Qr_ * xr);
    if (ham_.p) h += ham_.p(std::get<LinearEmbedding>(embedding_).V * xr);
    return h;
  }

  Vector grad_hamiltonian(const Vector& xr) const override {
    Vector g = Qr_ * xr;
    if (ham_.grad_p) {
      const Matrix& v = std::get<LinearEmbedding>(embedding_).V;
      g += v.transpose() * ham_.grad_p(v * xr);
    }
    return g;
  }

  // y = B^T grad H(V xr); see Sp1Rom::output.
  Vector output(const Vector& xr) const override {
    Vector y = BtQV_ * xr;
    if (ham_.grad_p) {
      y += B_.transpose() * ham_.grad_p(std::get<LinearEmbedding>(embedding_).V * xr);
    }
    return y;
  }

 private:
  Matrix Qr_;
  Matrix BtQV_;           // B^T Q V
  Matrix B_;              // full-order port matrix, for the nonlinear output term
  SplitHamiltonian ham_;  // nonlinear part kept unreduced (no interpolation)
};

// Generalized-Galerkin reduction on the quadratic manifold. With
// F = [B, V1, V2] and the coefficient map c(xr) = [xr_1; z; M (z (x) z)],
// z = xr_2, the embedding is phi(xr) = F c(xr) and its Jacobian F Dc(z).
// Everything online is assembled from constant Gram blocks of F against
// Kt = (J-R)^{-T} F, so no evaluation touches the full dimension except the
// componentwise DEIM gradient.
class GmgQuadraticRom final : public ReducedPhSystem {
 public:
  GmgQuadraticRom(const GmgContext& ctx, DeimModel deim, QuadraticEmbedding emb, Vector x0)
      : ReducedPhSystem("GMG-QM", Embedding(std::move(emb)), std::move(x0),
                        ctx.system().dim(), ctx.system().input_dim()),
        deim_(std::move(deim)) {
    const QuadraticEmbedding& qe = quad();
    m_ = qe.port_dim();
    rk_ = qe.V1.cols();
    rn_ = qe.V2.cols();
    Matrix f(full_dim_, m_ + rk_ + rn_);
    f << qe.B, qe.V1, qe.V2;
    const PhSystem& sys = ctx.system();
    Kt_ = ctx.solve_transposed(f);
    KtF_ = Kt_.transpose() * f;
    KtB_ = Kt_.transpose() * sys.B();
    KtJKt_ = Kt_.transpose() * sys.J() * Kt_;
    KtRKt_ = Kt_.transpose() * sys.R() * Kt_;
    FtQF_ = symmetrized(f.transpose() * (sys.ham().Q * f));
    if (deim_.d > 0) FtC_ = f.transpose() * deim_.C;
    factor_gram(dcoeff(x0_.tail(rk_)));  // admissibility at the initial state
  }

  Vector rhs(const Vector& xr, const Vector& u) const override {
    const Vector c = coeff(xr);
    const Matrix dc = dcoeff(xr.tail(rk_));
    const auto lu = factor_gram(dc);
    return lu.solve(dc.transpose() * (bracket(c) + KtB_ * u));
  }

  Vector output(const Vector& xr) const override {
    // y_r = Br(xr)^T grad Hr(xr) with Br = S^{-1} Dc^T Kt^T B; on-manifold
    // this equals B^T grad H_deim(phi(xr)).
    const Vector c = coeff(xr);
    const Matrix dc = dcoeff(xr.tail(rk_));
    const auto lu = factor_gram(dc);
    const Vector grad = dc.transpose() * bracket(c);
    const Vector lifted = lu.transpose().solve(grad);
    return KtB_.transpose() * (dc * lifted);
  }

  Vector port_output(const Vector& xr) const override { return output(xr); }

  double hamiltonian(const Vector& xr) const override {
    const Vector c = coeff(xr);
    double h = 0.5 * c.dot(FtQF_ * c);
    if (deim_.d > 0) h += deim_p_at(deim_, FtC_.transpose() * c);
    return h;
  }

  Vector grad_hamiltonian(const Vector& xr) const override {
    return dcoeff(xr.tail(rk_)).transpose() * bracket(coeff(xr));
  }

  Matrix j_reduced(const Vector& xr) const override { return congruence(xr, KtJKt_); }
  Matrix r_reduced(const Vector& xr) const override { return congruence(xr, KtRKt_); }

  Matrix b_reduced(const Vector& xr) const override {
    const Matrix dc = dcoeff(xr.tail(rk_));
    return factor_gram(dc).solve(dc.transpose() * KtB_);
  }

  Matrix tangent_lift(const Vector& xr) const override {
    const Matrix dc = dcoeff(xr.tail(rk_));
    const auto lu = factor_gram(dc);
    return lu.solve((Kt_ * dc).transpose()).transpose();  // Kt Dc S^{-T}
  }

 private:
  const QuadraticEmbedding& quad() const { return std::get<QuadraticEmbedding>(embedding_); }

  Vector coeff(const Vector& xr) const {
    const Vector z = xr.tail(rk_);
    Vector c(m_ + rk_ + rn_);
    c.head(m_) = xr.head(m_);
    c.segment(m_, rk_) = z;
    c.tail(rn_) = quad().M * kron(z, z);
    return c;
  }

  Matrix dcoeff(const Vector& z) const {
    Matrix dc = Matrix::Zero(m_ + rk_ + rn_, m_ + rk_);
    dc.topLeftCorner(m_, m_).setIdentity();
    dc.block(m_, m_, rk_, rk_).setIdentity();
    dc.bottomRightCorner(rn_, rk_) = quad().M * kron_square_jacobian(z);
    return dc;
  }

  // F^T grad H_deim(F c) = F^T Q F c + F^T C q_sel((F^T C)^T c).
  Vector bracket(const Vector& c) const {
    Vector b = FtQF_ * c;
    if (deim_.d > 0) b += FtC_ * deim_selected_grad_p(deim_, FtC_.transpose() * c);
    return b;
  }

  Eigen::PartialPivLU<Matrix> factor_gram(const Matrix& dc) const {
    const Matrix s = dc.transpose() * KtF_ * dc;  // V^T (J-R)^{-1} V at this point
    const double cond = condition_estimate(s);
    if (!(cond <= kGramConditionLimit)) {
      std::ostringstream msg;
      msg << "gmg quadratic manifold: tangent space left the admissible set, "
             "cond(V^T (J-R)^{-1} V) = "
          << cond << " exceeds " << kGramConditionLimit;
      throw SubspaceConditionError(msg.str(), reduced_dim_, cond);
    }
    return Eigen::PartialPivLU<Matrix>(s);
  }

  Matrix congruence(const Vector& xr, const Matrix& core) const {
    const Matrix dc = dcoeff(xr.tail(rk_));
    const auto lu = factor_gram(dc);
    const Matrix tmp = lu.solve(dc.transpose() * core * dc);  // S^{-1} A
    return lu.solve(tmp.transpose()).transpose();             // S^{-1} A S^{-T}
  }

  DeimModel deim_;
  Index m_ = 0, rk_ = 0, rn_ = 0;
  Matrix Kt_;             // (J-R)^{-T} F
  Matrix KtF_, KtB_;      // Kt^T F, Kt^T B
  Matrix KtJKt_, KtRKt_;  // Kt^T J Kt, Kt^T R Kt
  Matrix FtQF_, FtC_;     // F^T Q F, F^T C
};

void check_rom_inputs(const PhSystem& sys, const SplitHamiltonian& ham, Index emb_rows) {
  if (emb_rows != sys.dim()) {
    throw NumericalError("reduced system: embedding dimension does not match the system");
  }
  if (ham.dim != sys.dim()) {
    throw NumericalError("reduced system: Hamiltonian dimension does not match the system");
  }
}

}  // namespace

std::unique_ptr<ReducedPhSystem> make_gmg_pod_rom(const GmgContext& ctx, const DeimModel& deim,
                                                  LinearEmbedding emb, const Vector& x0_full) {
  const PhSystem& sys = ctx.system();
  check_rom_inputs(sys, deim.ham, emb.dim());
  const Matrix w = gmg_test_basis(ctx, emb.V);
  Matrix jr = w.transpose() * sys.J() * w;
  Matrix rr = w.transpose() * sys.R() * w;
  Matrix br = w.transpose() * sys.B();
  Matrix qr = symmetrized(emb.V.transpose() * (sys.ham().Q * emb.V));
  Vector x0 = emb.reduce(x0_full);
  return std::make_unique<GmgPodRom>(std::move(emb), std::move(x0), sys.dim(), w,
                                     std::move(jr), std::move(rr), std::move(br),
                                     std::move(qr), deim);
}

std::unique_ptr<ReducedPhSystem> make_gmg_qm_rom(const GmgContext& ctx, const DeimModel& deim,
                                                 QuadraticEmbedding emb, const Vector& x0_full) {
  check_rom_inputs(ctx.system(), deim.ham, emb.dim());
  Vector x0 = emb.reduce(x0_full);
  return std::make_unique<GmgQuadraticRom>(ctx, deim, std::move(emb), std::move(x0));
}

std::unique_ptr<ReducedPhSystem> make_sp1_rom(const PhSystem& sys, LinearEmbedding emb,
                                              const Vector& x0_full) {
  check_rom_inputs(sys, sys.ham(), emb.dim());
  if (!sys.ham().quadratic_only()) {
    throw ConfigError("SP1 requires a quadratic Hamiltonian (no nonlinear part)");
  }
  const Matrix& v = emb.V;
  const Matrix qv = sys.ham().Q * v;
  const Matrix gram = symmetrized(v.transpose() * qv);  // V^T Q V
  // W = Q V (V^T Q V)^{-1}; the transpose solve uses the symmetry of the Gram.
  const Matrix qvt = qv.transpose();
  const Matrix w = solve_dense(gram, qvt).transpose();
  Matrix jr = w.transpose() * sys.J() * w;
  Matrix rr = w.transpose() * sys.R() * w;
  Matrix br = w.transpose() * sys.B();
  Matrix bt_qv = sys.B().transpose() * qv;
  Vector x0 = emb.reduce(x0_full);
  return std::make_unique<Sp1Rom>(std::move(emb), std::move(x0), sys.dim(), w, std::move(jr),
                                  std::move(rr), std::move(br), gram, std::move(bt_qv));
}

std::unique_ptr<ReducedPhSystem> make_sp2_rom(const PhSystem& sys, LinearEmbedding emb,
                                              const Matrix& v_grad, const Vector& x0_full) {
  check_rom_inputs(sys, sys.ham(), emb.dim());
  if (v_grad.rows() != sys.dim() || v_grad.cols() != emb.reduced_dim()) {
    throw NumericalError("SP2: gradient POD basis must be N x r");
  }
  const Matrix& v = emb.V;
  // W = Vg (V^T Vg)^{-1}  <=>  (V^T Vg)^T W^T = Vg^T.
  const Matrix gram_t = v_grad.transpose() * v;
  const Matrix vg_t = v_grad.transpose();
  const Matrix w = solve_dense(gram_t, vg_t).transpose();
  Matrix jr = w.transpose() * sys.J() * w;
  Matrix rr = w.transpose() * sys.R() * w;
  Matrix br = w.transpose() * sys.B();
  Matrix qr = symmetrized(v.transpose() * (sys.ham().Q * v));
  Matrix bt_qv = sys.B().transpose() * (sys.ham().Q * v);
  Vector x0 = emb.reduce(x0_full);
  return std::make_unique<Sp2Rom>(std::move(emb), std::move(x0), sys.dim(), w, std::move(jr),
                                  std::move(rr), std::move(br), std::move(qr),
                                  std::move(bt_qv), sys.B(), sys.ham());
}

std::unique_ptr<ReducedPhSystem> build_gmg_pod_rom(const PhSystem& sys, const Matrix& x,
                                                   const DeimModel& deim, Index r) {
  const GmgContext ctx(sys);
  return make_gmg_pod_rom(ctx, deim, build_linear_embedding(x, sys.B(), r), x.col(0));
}

std::unique_ptr<ReducedPhSystem> build_gmg_qm_rom(const PhSystem& sys, const Matrix& x,
                                                  const DeimModel& deim, Index r, Index r_n,
                                                  double lambda) {
  const GmgContext ctx(sys);
  return make_gmg_qm_rom(ctx, deim, build_quadratic_embedding(x, sys.B(), r, r_n, lambda),
                         x.col(0));
}

std::unique_ptr<ReducedPhSystem> build_sp1_rom(const PhSystem& sys, const Matrix& x, Index r) {
  return make_sp1_rom(sys, pod_embedding(x, r), x.col(0));
}

std::unique_ptr<ReducedPhSystem> build_sp2_rom(const PhSystem& sys, const Matrix& x,
                                               const Matrix& x_grad_h, Index r) {
  return make_sp2_rom(sys, pod_embedding(x, r), pod_embedding(x_grad_h, r).V, x.col(0));
}

Trajectory simulate_rom(const ReducedPhSystem& rom, const InputSignal& u, const TimeGrid& grid,
                        const NewtonConfig& cfg, SimulateDiagnostics* diag) {
  OdeRhs f = [&rom, &u](double t, const Vector& xr) { return rom.rhs(xr, u(t)); };
  OdeJacobian jac = finite_difference_jacobian(f);
  OutputFn out = [&rom](const Vector& xr) { return rom.output(xr); };
  return simulate(f, jac, rom.initial_state(), grid, cfg, out, diag);
}

Matrix reconstruct_states(const ReducedPhSystem& rom, const Matrix& reduced_states) {
  Matrix x(rom.full_dim(), reduced_states.cols());
  for (Index i = 0; i < reduced_states.cols(); ++i) {
    x.col(i) = rom.reconstruct(reduced_states.col(i));
  }
  return x;
}

}  // namespace phmor
