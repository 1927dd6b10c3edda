#include "phmor/benchmarks.hpp"

#include <utility>
#include <vector>

namespace phmor {

namespace {

void require_positive(const Vector& v, const char* name) {
  for (Index i = 0; i < v.size(); ++i) {
    if (!(v(i) > 0.0)) {
      throw ConfigError(std::string("linear_msd: ") + name + " entries must be positive");
    }
  }
}

}  // namespace

LinearMsdConfig LinearMsdConfig::uniform(Index n, double mass, double stiffness,
                                         double damping) {
  LinearMsdConfig cfg;
  cfg.n_masses = n;
  cfg.masses = Vector::Constant(n, mass);
  cfg.stiffness = Vector::Constant(n, stiffness);
  cfg.damping = Vector::Constant(n, damping);
  return cfg;
}

PhSystem build_linear_msd(const LinearMsdConfig& cfg) {
  const Index n = cfg.n_masses;
  if (n < 1) throw ConfigError("linear_msd: n_masses must be >= 1");
  if (cfg.masses.size() != n || cfg.stiffness.size() != n || cfg.damping.size() != n) {
    throw ConfigError("linear_msd: parameter vectors must have length n_masses");
  }
  require_positive(cfg.masses, "mass");
  require_positive(cfg.stiffness, "stiffness");
  require_positive(cfg.damping, "damping");

  const Index dim = 2 * n;
  Matrix j = Matrix::Zero(dim, dim);
  Matrix r = Matrix::Zero(dim, dim);
  Matrix q = Matrix::Zero(dim, dim);
  for (Index i = 0; i < n; ++i) {
    const Index qi = 2 * i;      // position of mass i
    const Index pi = 2 * i + 1;  // momentum of mass i
    j(qi, pi) = 1.0;
    j(pi, qi) = -1.0;
    r(pi, pi) = cfg.damping(i);
    q(pi, pi) = 1.0 / cfg.masses(i);
    if (i + 1 < n) {
      // Spring k_i between masses i and i+1: 1/2 k_i (q_i - q_{i+1})^2.
      const double k = cfg.stiffness(i);
      q(qi, qi) += k;
      q(qi + 2, qi + 2) += k;
      q(qi, qi + 2) -= k;
      q(qi + 2, qi) -= k;
    } else {
      // Spring k_n anchors the last mass to the wall.
      q(qi, qi) += cfg.stiffness(i);
    }
  }
  Matrix b = Matrix::Zero(dim, 1);
  b(1, 0) = 1.0;  // force on the momentum of mass 1

  SplitHamiltonian ham;
  ham.dim = dim;
  ham.Q = std::move(q);
  ham.x_e = Vector::Zero(dim);
  return PhSystem(std::move(j), std::move(r), std::move(b), std::move(ham));
}

NonlinearMsd build_nonlinear_msd(const NonlinearMsdConfig& cfg) {
  const Index n = cfg.n_masses;
  if (n < 1) throw ConfigError("nonlinear_msd: n_masses must be >= 1");
  if (!(cfg.k1 > 0.0) || !(cfg.k2 > 0.0) || !(cfg.mass > 0.0) || !(cfg.damping > 0.0)) {
    throw ConfigError("nonlinear_msd: k1, k2, mass and damping must be positive");
  }
  const Index dim = 2 * n;

  // M: upper bidiagonal, unit diagonal, -1 superdiagonal ((M x)_i = x_i - x_{i+1}).
  Matrix m = Matrix::Identity(n, n);
  for (Index i = 0; i + 1 < n; ++i) m(i, i + 1) = -1.0;
  Matrix t = Matrix::Zero(dim, dim);
  t.topLeftCorner(n, n) = m;
  t.bottomRightCorner(n, n).setIdentity();

  // Transformed operators. J~ = T J T^T with J canonical has the exact integer
  // blocks [[0, M], [-M^T, 0]]; R acts on the untransformed block, so R~ = R.
  Matrix j = Matrix::Zero(dim, dim);
  j.topRightCorner(n, n) = m;
  j.bottomLeftCorner(n, n) = -m.transpose();
  Matrix r = Matrix::Zero(dim, dim);
  r.bottomRightCorner(n, n).diagonal().setConstant(cfg.damping);

  // Q~ = T^{-T} Q T^{-1} with Q = blockdiag(k1 M^T M, mass I). M^{-1} is the
  // upper triangle of ones, so the congruence is exact integer arithmetic
  // (analytically Q~ = blockdiag(k1 I, mass I)).
  Matrix q0 = Matrix::Zero(dim, dim);
  q0.topLeftCorner(n, n) = cfg.k1 * (m.transpose() * m);
  q0.bottomRightCorner(n, n).diagonal().setConstant(cfg.mass);
  Matrix t_inv = Matrix::Identity(dim, dim);
  for (Index i = 0; i < n; ++i) {
    for (Index k = i + 1; k < n; ++k) t_inv(i, k) = 1.0;
  }
  Matrix q = t_inv.transpose() * q0 * t_inv;
  q = 0.5 * (q + q.transpose());

  Matrix b = Matrix::Zero(dim, 1);
  b(n, 0) = 1.0;  // T B with B forcing the first velocity row

  const double k2 = cfg.k2;
  SplitHamiltonian ham;
  ham.dim = dim;
  ham.Q = std::move(q);
  ham.x_e = Vector::Zero(dim);
  ham.p = [n, k2](const Vector& x) {
    double s = 0.0;
    for (Index i = 0; i < n; ++i) s += 0.25 * k2 * x(i) * x(i) * x(i) * x(i);
    return s;
  };
  ham.grad_p = [n, k2](const Vector& x) {
    Vector g = Vector::Zero(x.size());
    for (Index i = 0; i < n; ++i) g(i) = k2 * x(i) * x(i) * x(i);
    return g;
  };
  ham.hess_p = [n, k2](const Vector& x) {
    Matrix h = Matrix::Zero(x.size(), x.size());
    for (Index i = 0; i < n; ++i) h(i, i) = 3.0 * k2 * x(i) * x(i);
    return h;
  };
  ham.grad_p_selected = [n, k2](const std::vector<Index>& idx, const Vector& vals) {
    Vector out(static_cast<Index>(idx.size()));
    for (size_t i = 0; i < idx.size(); ++i) {
      const double v = vals(static_cast<Index>(i));
      out(static_cast<Index>(i)) = idx[i] < n ? k2 * v * v * v : 0.0;
    }
    return out;
  };

  PhSystem sys(std::move(j), std::move(r), std::move(b), std::move(ham));
  return NonlinearMsd{std::move(sys), std::move(t)};
}

}  // namespace phmor
