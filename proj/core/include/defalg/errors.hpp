#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace defalg {

// Root of the library's error hierarchy. Everything thrown on purpose derives
// from this; anything else escaping the library is a bug.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Bad arguments to a constructor or function (dimension mismatch, empty
// bounds, invalid enum value, malformed scenario input, ...).
class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error(what) {}
};

// --- expression module -----------------------------------------------------

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class SyntaxError : public ParseError {
 public:
  SyntaxError(const std::string& expected, std::size_t offset)
      : ParseError("syntax error: expected " + expected, offset), expected_(expected) {}
  const std::string& expected() const { return expected_; }

 private:
  std::string expected_;
};

class UnknownIdentifier : public ParseError {
 public:
  UnknownIdentifier(const std::string& name, std::size_t offset)
      : ParseError("unknown identifier '" + name + "'", offset), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class VariableOutOfRange : public ParseError {
 public:
  VariableOutOfRange(const std::string& name, int dim, std::size_t offset)
      : ParseError("variable '" + name + "' out of range for dimension " +
                       std::to_string(dim),
                   offset),
        name_(name),
        dim_(dim) {}
  const std::string& name() const { return name_; }
  int dim() const { return dim_; }

 private:
  std::string name_;
  int dim_;
};

// Evaluation hit a value outside a function's domain (log of a non-positive
// number, division by zero, fractional power of a non-positive base, ...).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what)
      : Error(what), argument_(0.0) {}
  DomainError(const std::string& function, double argument)
      : Error("domain error: " + function + " applied to " +
              std::to_string(argument)),
        function_(function),
        argument_(argument) {}
  const std::string& function() const { return function_; }
  double argument() const { return argument_; }

 private:
  std::string function_;
  double argument_;
};

// --- geometry --------------------------------------------------------------

// Metric (or metric-like tensor) failed its invertibility requirement at a
// sampled point: Cholesky failure under PositiveDefinite, rank/condition
// failure under Invertible.
class SingularMetric : public Error {
 public:
  SingularMetric(const std::string& what, Eigen::VectorXd point)
      : Error(what), point_(std::move(point)) {}
  const Eigen::VectorXd& point() const { return point_; }

 private:
  Eigen::VectorXd point_;
};

// An operator that requires g-self-adjointness received a J with
// g_ik J^k_j != g_jk J^k_i beyond tolerance.
class NotSelfAdjoint : public Error {
 public:
  NotSelfAdjoint(double residual, Eigen::VectorXd point)
      : Error("operator is not self-adjoint with respect to the metric "
              "(residual " + std::to_string(residual) + ")"),
        residual_(residual),
        point_(std::move(point)) {}
  double residual() const { return residual_; }
  const Eigen::VectorXd& point() const { return point_; }

 private:
  double residual_;
  Eigen::VectorXd point_;
};

// A derived bilinear form that must be positive definite is not.
class NotPositive : public Error {
 public:
  NotPositive(const std::string& what, Eigen::VectorXd point)
      : Error(what), point_(std::move(point)) {}
  const Eigen::VectorXd& point() const { return point_; }

 private:
  Eigen::VectorXd point_;
};

// An immersion whose Jacobian drops rank at a sampled point.
class DegenerateImmersion : public Error {
 public:
  explicit DegenerateImmersion(Eigen::VectorXd point)
      : Error("immersion Jacobian is rank deficient at a sampled point"),
        point_(std::move(point)) {}
  const Eigen::VectorXd& point() const { return point_; }

 private:
  Eigen::VectorXd point_;
};

// A second fundamental form that must be inverted is singular at a sampled
// point.
class DegenerateSecondForm : public Error {
 public:
  explicit DegenerateSecondForm(Eigen::VectorXd point)
      : Error("second fundamental form is singular at a sampled point"),
        point_(std::move(point)) {}
  const Eigen::VectorXd& point() const { return point_; }

 private:
  Eigen::VectorXd point_;
};

// An endomorphism field that must square to -identity does not.
class NotAlmostComplex : public Error {
 public:
  NotAlmostComplex(double residual, Eigen::VectorXd point)
      : Error("endomorphism does not square to -identity (residual " +
              std::to_string(residual) + ")"),
        residual_(residual),
        point_(std::move(point)) {}
  double residual() const { return residual_; }
  const Eigen::VectorXd& point() const { return point_; }

 private:
  double residual_;
  Eigen::VectorXd point_;
};

// The metric is not invariant under the supplied complex structure.
class NotHermitian : public Error {
 public:
  NotHermitian(double residual, Eigen::VectorXd point)
      : Error("metric is not invariant under the complex structure (residual " +
              std::to_string(residual) + ")"),
        residual_(residual),
        point_(std::move(point)) {}
  double residual() const { return residual_; }
  const Eigen::VectorXd& point() const { return point_; }

 private:
  double residual_;
  Eigen::VectorXd point_;
};

// Operation defined only for specific dimensions (e.g. cross products).
class UnsupportedDim : public Error {
 public:
  explicit UnsupportedDim(int dim)
      : Error("operation is not defined in dimension " + std::to_string(dim)),
        dim_(dim) {}
  int dim() const { return dim_; }

 private:
  int dim_;
};

// Structure constants violating antisymmetry, the Jacobi identity, or an
// invalid frame inner product.
class InvalidAlgebra : public Error {
 public:
  explicit InvalidAlgebra(const std::string& what) : Error(what) {}
};

// A construction's built-in consistency check failed (e.g. a connection whose
// torsion does not have the shape its recipe guarantees).
class SelfTestFailure : public Error {
 public:
  SelfTestFailure(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// --- dynamics --------------------------------------------------------------

// The integrator produced a non-finite state component.
class NonFiniteState : public Error {
 public:
  explicit NonFiniteState(double time)
      : Error("integration produced a non-finite state at t = " +
              std::to_string(time)),
        time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

// The least-squares basis is structurally or numerically rank deficient on
// the supplied data.
class RankDeficientBasis : public Error {
 public:
  explicit RankDeficientBasis(const std::string& what) : Error(what) {}
};

// --- scenario / CLI --------------------------------------------------------

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

}  // namespace defalg
