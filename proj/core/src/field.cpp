#include "defalg/field.hpp"

#include <cmath>
#include <utility>

#include "defalg/errors.hpp"

namespace defalg {

namespace {

class ConstantField final : public ScalarField {
 public:
  ConstantField(int dim, double c) : dim_(dim), c_(c) {}
  int dim() const override { return dim_; }
  double value(const Point&) const override { return c_; }
  Jet2 jet(const Point&) const override { return Jet2::constant(dim_, c_); }
  double c() const { return c_; }

 private:
  int dim_;
  double c_;
};

class ExprField final : public ScalarField {
 public:
  explicit ExprField(expr::Compiled e) : e_(std::move(e)) {}
  int dim() const override { return e_.slots(); }
  double value(const Point& p) const override {
    return e_.value({p.data(), static_cast<std::size_t>(p.size())});
  }
  Jet2 jet(const Point& p) const override {
    return e_.jet({p.data(), static_cast<std::size_t>(p.size())});
  }

 private:
  expr::Compiled e_;
};

class NumericField final : public ScalarField {
 public:
  NumericField(int dim, std::function<double(const Point&)> value,
               std::function<Eigen::VectorXd(const Point&)> gradient,
               double fd_step)
      : dim_(dim), value_(std::move(value)), gradient_(std::move(gradient)),
        h_(fd_step) {}

  int dim() const override { return dim_; }
  double value(const Point& p) const override { return value_(p); }

  Jet2 jet(const Point& p) const override {
    Jet2 j(dim_);
    j.v = value_(p);
    if (gradient_) {
      j.g = gradient_(p);
      // Hessian: central difference of the exact gradient, symmetrized.
      Eigen::MatrixXd m(dim_, dim_);
      Point q = p;
      for (int d = 0; d < dim_; ++d) {
        q[d] = p[d] + h_;
        const Eigen::VectorXd gp = gradient_(q);
        q[d] = p[d] - h_;
        const Eigen::VectorXd gm = gradient_(q);
        q[d] = p[d];
        m.row(d) = ((gp - gm) / (2.0 * h_)).transpose();
      }
      j.h = 0.5 * (m + m.transpose());
      return j;
    }
    Point q = p;
    for (int d = 0; d < dim_; ++d) {
      q[d] = p[d] + h_;
      const double fp = value_(q);
      q[d] = p[d] - h_;
      const double fm = value_(q);
      q[d] = p[d];
      j.g[d] = (fp - fm) / (2.0 * h_);
      j.h(d, d) = (fp - 2.0 * j.v + fm) / (h_ * h_);
    }
    for (int a = 0; a < dim_; ++a) {
      for (int b = a + 1; b < dim_; ++b) {
        Point r = p;
        r[a] += h_;
        r[b] += h_;
        const double fpp = value_(r);
        r[b] = p[b] - h_;
        const double fpm = value_(r);
        r[a] = p[a] - h_;
        const double fmm = value_(r);
        r[b] = p[b] + h_;
        const double fmp = value_(r);
        const double mixed = (fpp - fpm - fmp + fmm) / (4.0 * h_ * h_);
        j.h(a, b) = mixed;
        j.h(b, a) = mixed;
      }
    }
    return j;
  }

 private:
  int dim_;
  std::function<double(const Point&)> value_;
  std::function<Eigen::VectorXd(const Point&)> gradient_;
  double h_;
};

enum class BinOp { Add, Sub, Mul };

class BinaryField final : public ScalarField {
 public:
  BinaryField(BinOp op, FieldPtr a, FieldPtr b)
      : op_(op), a_(std::move(a)), b_(std::move(b)) {}

  int dim() const override { return a_->dim(); }

  double value(const Point& p) const override {
    const double x = a_->value(p), y = b_->value(p);
    switch (op_) {
      case BinOp::Add:
        return x + y;
      case BinOp::Sub:
        return x - y;
      case BinOp::Mul:
        return x * y;
    }
    return 0.0;
  }

  Jet2 jet(const Point& p) const override {
    const Jet2 x = a_->jet(p), y = b_->jet(p);
    switch (op_) {
      case BinOp::Add:
        return x + y;
      case BinOp::Sub:
        return x - y;
      case BinOp::Mul:
        return x * y;
    }
    return Jet2(dim());
  }

 private:
  BinOp op_;
  FieldPtr a_, b_;
};

class ScaledField final : public ScalarField {
 public:
  ScaledField(double c, FieldPtr a) : c_(c), a_(std::move(a)) {}
  int dim() const override { return a_->dim(); }
  double value(const Point& p) const override { return c_ * a_->value(p); }
  Jet2 jet(const Point& p) const override { return c_ * a_->jet(p); }

 private:
  double c_;
  FieldPtr a_;
};

class ExpField final : public ScalarField {
 public:
  explicit ExpField(FieldPtr a) : a_(std::move(a)) {}
  int dim() const override { return a_->dim(); }
  double value(const Point& p) const override {
    return std::exp(a_->value(p));
  }
  Jet2 jet(const Point& p) const override { return jet_exp(a_->jet(p)); }

 private:
  FieldPtr a_;
};

class PartialField final : public ScalarField {
 public:
  PartialField(FieldPtr a, int dir, double fd_step)
      : a_(std::move(a)), dir_(dir), h_(fd_step) {}

  int dim() const override { return a_->dim(); }

  double value(const Point& p) const override { return a_->jet(p).g[dir_]; }

  Jet2 jet(const Point& p) const override {
    // Value and gradient of d_dir f are the parent jet's gradient entry and
    // Hessian row; the Hessian of d_dir f is third-order data and comes
    // from central differences of the parent's (exact) Hessian row.
    const Jet2 parent = a_->jet(p);
    const int n = dim();
    Jet2 j(n);
    j.v = parent.g[dir_];
    j.g = parent.h.row(dir_).transpose();
    Eigen::MatrixXd m(n, n);
    Point q = p;
    for (int d = 0; d < n; ++d) {
      q[d] = p[d] + h_;
      const Eigen::VectorXd rp = a_->jet(q).h.row(dir_).transpose();
      q[d] = p[d] - h_;
      const Eigen::VectorXd rm = a_->jet(q).h.row(dir_).transpose();
      q[d] = p[d];
      m.row(d) = ((rp - rm) / (2.0 * h_)).transpose();
    }
    j.h = 0.5 * (m + m.transpose());
    return j;
  }

 private:
  FieldPtr a_;
  int dir_;
  double h_;
};

void check_same_dim(const FieldPtr& a, const FieldPtr& b) {
  if (!a || !b) throw InvalidArgument("null field operand");
  if (a->dim() != b->dim()) {
    throw InvalidArgument("field dimension mismatch: " +
                          std::to_string(a->dim()) + " vs " +
                          std::to_string(b->dim()));
  }
}

bool is_const_zero(const FieldPtr& f) {
  const auto* c = dynamic_cast<const ConstantField*>(f.get());
  return c != nullptr && c->c() == 0.0;
}

}  // namespace

FieldPtr constant_field(int dim, double c) {
  return std::make_shared<ConstantField>(dim, c);
}

FieldPtr zero_field(int dim) { return constant_field(dim, 0.0); }

FieldPtr expr_field(expr::Compiled e) {
  return std::make_shared<ExprField>(std::move(e));
}

FieldPtr expr_field(std::string_view text, int dim) {
  return expr_field(expr::compile(text, dim));
}

FieldPtr numeric_field(int dim, std::function<double(const Point&)> value,
                       std::function<Eigen::VectorXd(const Point&)> gradient,
                       double fd_step) {
  if (!value) throw InvalidArgument("numeric field needs a value callable");
  return std::make_shared<NumericField>(dim, std::move(value),
                                        std::move(gradient), fd_step);
}

FieldPtr sum(FieldPtr a, FieldPtr b) {
  check_same_dim(a, b);
  if (is_const_zero(a)) return b;
  if (is_const_zero(b)) return a;
  return std::make_shared<BinaryField>(BinOp::Add, std::move(a), std::move(b));
}

FieldPtr difference(FieldPtr a, FieldPtr b) {
  check_same_dim(a, b);
  if (is_const_zero(b)) return a;
  if (is_const_zero(a)) return negated(std::move(b));
  return std::make_shared<BinaryField>(BinOp::Sub, std::move(a), std::move(b));
}

FieldPtr product(FieldPtr a, FieldPtr b) {
  check_same_dim(a, b);
  if (is_const_zero(a)) return a;
  if (is_const_zero(b)) return b;
  return std::make_shared<BinaryField>(BinOp::Mul, std::move(a), std::move(b));
}

FieldPtr scaled(double c, FieldPtr a) {
  if (!a) throw InvalidArgument("null field operand");
  if (c == 0.0) return zero_field(a->dim());
  if (c == 1.0) return a;
  return std::make_shared<ScaledField>(c, std::move(a));
}

FieldPtr negated(FieldPtr a) {
  if (!a) throw InvalidArgument("null field operand");
  if (is_const_zero(a)) return a;
  return std::make_shared<ScaledField>(-1.0, std::move(a));
}

FieldPtr exp_of(FieldPtr a) {
  if (!a) throw InvalidArgument("null field operand");
  return std::make_shared<ExpField>(std::move(a));
}

FieldPtr partial(FieldPtr a, int dir, double fd_step) {
  if (!a) throw InvalidArgument("null field operand");
  if (dir < 0 || dir >= a->dim()) {
    throw InvalidArgument("partial derivative direction out of range");
  }
  if (is_const_zero(a)) return a;
  return std::make_shared<PartialField>(std::move(a), dir, fd_step);
}

bool is_zero_field(const FieldPtr& f) { return is_const_zero(f); }

}  // namespace defalg
