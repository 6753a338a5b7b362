#pragma once

#include <functional>
#include <memory>

#include "defalg/chart.hpp"
#include "defalg/expr.hpp"
#include "defalg/jet.hpp"

namespace defalg {

// A scalar function on a chart domain, evaluable as a plain value or as an
// order-2 jet. Implementations decide how much of the jet is exact:
// expression fields are exact throughout, numeric fields fall back to
// central finite differences for whatever derivative data their callable
// cannot provide.
class ScalarField {
 public:
  virtual ~ScalarField() = default;
  virtual int dim() const = 0;
  virtual double value(const Point& p) const = 0;
  virtual Jet2 jet(const Point& p) const = 0;
};

using FieldPtr = std::shared_ptr<const ScalarField>;

FieldPtr constant_field(int dim, double c);
FieldPtr zero_field(int dim);

// Exact-jet field from a compiled expression.
FieldPtr expr_field(expr::Compiled e);
FieldPtr expr_field(std::string_view text, int dim);

// Field from a plain callable. If a gradient callable is supplied the jet's
// gradient is exact and the Hessian comes from differencing the gradient;
// otherwise both come from differencing the value. fd_step is the central
// difference step h.
FieldPtr numeric_field(int dim, std::function<double(const Point&)> value,
                       std::function<Eigen::VectorXd(const Point&)> gradient =
                           nullptr,
                       double fd_step = 1e-4);

// Pointwise combinators; jets propagate through jet arithmetic, so the
// result is exact whenever the operands are.
FieldPtr sum(FieldPtr a, FieldPtr b);
FieldPtr difference(FieldPtr a, FieldPtr b);
FieldPtr product(FieldPtr a, FieldPtr b);
FieldPtr scaled(double c, FieldPtr a);
FieldPtr negated(FieldPtr a);
FieldPtr exp_of(FieldPtr a);

// The partial derivative d/dx_dir as a field: value and gradient are read
// off the parent's jet (exact when the parent jet is); the Hessian row comes
// from finite differences of the parent gradient.
FieldPtr partial(FieldPtr a, int dir, double fd_step = 1e-4);

// True for fields known to be identically zero by construction (the
// combinators propagate this, e.g. difference(f, f) is not detected but
// sum(zero, zero) is).
bool is_zero_field(const FieldPtr& f);

}  // namespace defalg
