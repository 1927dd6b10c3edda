#include "phmor/ph_system.hpp"

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "phmor/numerics.hpp"

namespace phmor {

double SplitHamiltonian::hamiltonian(const Vector& x) const {
  double h = 0.5 * x.dot(Q * x);
  if (p) h += p(x);
  return h;
}

Vector SplitHamiltonian::gradient(const Vector& x) const {
  Vector g = Q * x;
  if (grad_p) g += grad_p(x);
  return g;
}

Matrix SplitHamiltonian::hessian(const Vector& x) const {
  if (hess_p) return Q + hess_p(x);
  return Q;
}

namespace {

double min_symmetric_eigenvalue(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("PhSystem: eigenvalue computation failed");
  }
  return eig.eigenvalues().minCoeff();
}

}  // namespace

PhSystem::PhSystem(Matrix J, Matrix R, Matrix B, SplitHamiltonian ham, Vector x0)
    : J_(std::move(J)), R_(std::move(R)), B_(std::move(B)), ham_(std::move(ham)),
      x0_(std::move(x0)) {
  const Index n = J_.rows();
  if (J_.cols() != n || R_.rows() != n || R_.cols() != n || B_.rows() != n) {
    throw NumericalError("PhSystem: inconsistent matrix dimensions");
  }
  if (x0_.size() == 0) x0_ = Vector::Zero(n);
  if (x0_.size() != n) {
    throw NumericalError("PhSystem: initial state dimension mismatch");
  }
  require_finite(x0_, "PhSystem x0");
  if (ham_.dim != n || ham_.Q.rows() != n || ham_.Q.cols() != n ||
      ham_.x_e.size() != n) {
    throw NumericalError("PhSystem: Hamiltonian dimension mismatch");
  }
  if (static_cast<bool>(ham_.p) != static_cast<bool>(ham_.grad_p) ||
      static_cast<bool>(ham_.p) != static_cast<bool>(ham_.hess_p)) {
    throw NumericalError("PhSystem: p, grad_p and hess_p must be given together");
  }
  require_finite(J_, "PhSystem J");
  require_finite(R_, "PhSystem R");
  require_finite(B_, "PhSystem B");
  require_finite(ham_.Q, "PhSystem Q");
  require_finite(ham_.x_e, "PhSystem x_e");

  if ((J_ + J_.transpose()).norm() > 1e-12 * std::max(1.0, J_.norm())) {
    throw NumericalError("PhSystem: J is not skew-symmetric");
  }
  if ((R_ - R_.transpose()).norm() > 1e-12 * std::max(1.0, R_.norm())) {
    throw NumericalError("PhSystem: R is not symmetric");
  }
  if ((ham_.Q - ham_.Q.transpose()).norm() > 1e-12 * std::max(1.0, ham_.Q.norm())) {
    throw NumericalError("PhSystem: Q is not symmetric");
  }
  const double r_scale = std::max(1.0, R_.norm());
  if (min_symmetric_eigenvalue(R_) < -1e-10 * r_scale) {
    throw NumericalError("PhSystem: R has a negative eigenvalue");
  }
  const double q_scale = std::max(1.0, ham_.Q.norm());
  if (min_symmetric_eigenvalue(ham_.Q) < -1e-10 * q_scale) {
    throw NumericalError("PhSystem: Q has a negative eigenvalue");
  }
  const double cond = condition_estimate(J_ - R_);
  if (!std::isfinite(cond) || cond > 1e15) {
    throw SingularMatrixError("PhSystem: J - R singular to working precision", cond);
  }
  {
    const ThinSvd svd = thin_svd(B_);
    if (numerical_rank(svd.sigma, B_.rows(), B_.cols()) != B_.cols()) {
      throw NumericalError("PhSystem: B is column rank deficient");
    }
  }
  const double eq_scale = std::max(1.0, ham_.Q.norm() * ham_.x_e.norm());
  if (ham_.gradient(ham_.x_e).norm() > 1e-10 * eq_scale) {
    throw NumericalError("PhSystem: x_e is not an equilibrium of grad H");
  }
}

InputSignal constant_input(double amplitude, Index input_dim) {
  return [amplitude, input_dim](double) { return Vector::Constant(input_dim, amplitude); };
}

InputSignal sine_input(double amplitude, double frequency, Index input_dim) {
  return [amplitude, frequency, input_dim](double t) {
    return Vector::Constant(input_dim, amplitude * std::sin(frequency * t));
  };
}

Vector eval_rhs(const PhSystem& sys, const Vector& x, const Vector& u) {
  return (sys.J() - sys.R()) * sys.ham().gradient(x) + sys.B() * u;
}

Vector eval_output(const PhSystem& sys, const Vector& x) {
  return sys.B().transpose() * sys.ham().gradient(x);
}

Matrix rhs_jacobian(const PhSystem& sys, const Vector& x) {
  return (sys.J() - sys.R()) * sys.ham().hessian(x);
}

double power_balance_residual(const PhSystem& sys, const Vector& x, const Vector& u) {
  const Vector g = sys.ham().gradient(x);
  const Vector xdot = (sys.J() - sys.R()) * g + sys.B() * u;
  const double supply = g.dot(sys.B() * u);  // y^T u
  return supply - (xdot.dot(g) + (sys.R() * g).dot(g));
}

std::vector<CheckResult> validate_structure(const PhSystem& sys, unsigned seed) {
  std::vector<CheckResult> out;
  const Matrix& J = sys.J();
  const Matrix& R = sys.R();
  const Matrix& Q = sys.ham().Q;

  const double skew = (J + J.transpose()).norm() / std::max(1.0, J.norm());
  out.push_back({"J skew-symmetric", skew <= 1e-12, skew});

  const double rsym = (R - R.transpose()).norm() / std::max(1.0, R.norm());
  out.push_back({"R symmetric", rsym <= 1e-12, rsym});

  const double rmin = min_symmetric_eigenvalue(R);
  out.push_back({"R positive semidefinite", rmin >= -1e-10 * std::max(1.0, R.norm()), rmin});

  const double qsym = (Q - Q.transpose()).norm() / std::max(1.0, Q.norm());
  out.push_back({"Q symmetric", qsym <= 1e-12, qsym});

  const double qmin = min_symmetric_eigenvalue(Q);
  out.push_back({"Q positive semidefinite", qmin >= -1e-10 * std::max(1.0, Q.norm()), qmin});

  const double cond = condition_estimate(J - R);
  out.push_back({"J - R invertible (condition estimate)", std::isfinite(cond) && cond <= 1e15, cond});

  {
    const ThinSvd svd = thin_svd(sys.B());
    const double ratio = svd.sigma.size() > 0 && svd.sigma(0) > 0.0
                             ? svd.sigma(svd.sigma.size() - 1) / svd.sigma(0)
                             : 0.0;
    out.push_back({"B full column rank (sigma_min/sigma_max)",
                   numerical_rank(svd.sigma, sys.B().rows(), sys.B().cols()) == sys.B().cols(),
                   ratio});
  }

  const double eq = sys.ham().gradient(sys.ham().x_e).norm();
  out.push_back({"grad H(x_e) = 0", eq <= 1e-10 * std::max(1.0, Q.norm() * sys.ham().x_e.norm()), eq});

  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const Index n = sys.dim();
  auto draw = [&](Index len) {
    Vector v(len);
    for (Index i = 0; i < len; ++i) v(i) = gauss(rng);
    return v;
  };

  // Power balance at random states: identically zero up to roundoff.
  double pb_worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    const Vector x = sys.ham().x_e + draw(n);
    const Vector u = draw(sys.input_dim());
    const Vector g = sys.ham().gradient(x);
    const double scale = 1.0 + std::abs(g.dot(sys.B() * u)) + g.squaredNorm();
    pb_worst = std::max(pb_worst, std::abs(power_balance_residual(sys, x, u)) / scale);
  }
  out.push_back({"power balance residual", pb_worst <= 1e-12, pb_worst});

  if (!sys.ham().quadratic_only()) {
    // Directional finite differences tie p, grad_p and hess_p together.
    double gp_worst = 0.0;
    double hp_worst = 0.0;
    for (int k = 0; k < 10; ++k) {
      const Vector x = sys.ham().x_e + draw(n);
      Vector dir = draw(n);
      dir.normalize();
      const double h = 1e-5 * (1.0 + x.norm());
      const double fd_p = (sys.ham().p(x + h * dir) - sys.ham().p(x - h * dir)) / (2.0 * h);
      const double an_p = sys.ham().grad_p(x).dot(dir);
      gp_worst = std::max(gp_worst, std::abs(fd_p - an_p) / std::max(1.0, std::abs(an_p)));
      const Vector fd_q =
          (sys.ham().grad_p(x + h * dir) - sys.ham().grad_p(x - h * dir)) / (2.0 * h);
      const Vector an_q = sys.ham().hess_p(x) * dir;
      hp_worst = std::max(hp_worst, (fd_q - an_q).norm() / std::max(1.0, an_q.norm()));
    }
    out.push_back({"grad_p consistent with p (finite differences)", gp_worst <= 5e-6, gp_worst});
    out.push_back({"hess_p consistent with grad_p (finite differences)", hp_worst <= 5e-6, hp_worst});

    if (sys.ham().grad_p_selected) {
      // The sparse fast path must agree with grad_p on scattered vectors.
      double sel_worst = 0.0;
      std::uniform_int_distribution<Index> pick(0, n - 1);
      for (int k = 0; k < 10; ++k) {
        std::vector<Index> idx;
        for (Index i = 0; i < std::min<Index>(4, n); ++i) idx.push_back(pick(rng));
        std::sort(idx.begin(), idx.end());
        idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
        Vector vals = draw(static_cast<Index>(idx.size()));
        Vector scattered = Vector::Zero(n);
        for (size_t i = 0; i < idx.size(); ++i) scattered(idx[i]) = vals(static_cast<Index>(i));
        const Vector full = sys.ham().grad_p(scattered);
        const Vector sel = sys.ham().grad_p_selected(idx, vals);
        for (size_t i = 0; i < idx.size(); ++i) {
          sel_worst = std::max(sel_worst, std::abs(sel(static_cast<Index>(i)) - full(idx[i])));
        }
      }
      out.push_back({"grad_p_selected consistent with grad_p", sel_worst <= 1e-12, sel_worst});
    }
  }
  return out;
}

}  // namespace phmor
