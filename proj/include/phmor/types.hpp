#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace phmor {

// All model data is dense double precision; every experiment stays below a few
// thousand states, where dense factorizations beat sparse bookkeeping.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Failure taxonomy, mirrored by the CLI exit codes:
//   ConfigError -> 1, NumericalError (and subclasses) -> 2, IoError -> 3.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A pivoted factorization found the matrix singular to working precision.
class SingularMatrixError : public NumericalError {
 public:
  SingularMatrixError(const std::string& what, double condition_estimate)
      : NumericalError(what), condition_(condition_estimate) {}
  double condition_estimate() const { return condition_; }

 private:
  double condition_;
};

// V^T G V left the admissible subspace set (condition number above 1e12), so
// the tangent-space Galerkin projection is not defined for this basis.
class SubspaceConditionError : public NumericalError {
 public:
  SubspaceConditionError(const std::string& what, Index reduced_dim, double condition_estimate)
      : NumericalError(what), reduced_dim_(reduced_dim), condition_(condition_estimate) {}
  Index reduced_dim() const { return reduced_dim_; }
  double condition_estimate() const { return condition_; }

 private:
  Index reduced_dim_;
  double condition_;
};

void require_finite(const Matrix& m, const char* name);
void require_finite(const Vector& v, const char* name);

}  // namespace phmor
