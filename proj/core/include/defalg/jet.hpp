#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "defalg/errors.hpp"

namespace defalg {

// Order-2 jet of a scalar function at a point: value, gradient, and symmetric
// Hessian. The arithmetic below propagates all three through the chain rule,
// so any composite built from jets of the inputs is exact through second
// order (up to rounding). Third derivatives are outside the jet and must come
// from finite differences of jet data.
struct Jet2 {
  double v = 0.0;
  Eigen::VectorXd g;
  Eigen::MatrixXd h;

  Jet2() = default;
  explicit Jet2(int n)
      : v(0.0), g(Eigen::VectorXd::Zero(n)), h(Eigen::MatrixXd::Zero(n, n)) {}

  static Jet2 constant(int n, double c) {
    Jet2 j(n);
    j.v = c;
    return j;
  }

  // The coordinate function x_idx evaluated at x.
  static Jet2 variable(int n, int idx, double x) {
    Jet2 j(n);
    j.v = x;
    j.g[idx] = 1.0;
    return j;
  }

  int dim() const { return static_cast<int>(g.size()); }
};

inline Jet2 operator+(const Jet2& a, const Jet2& b) {
  Jet2 r = a;
  r.v += b.v;
  r.g += b.g;
  r.h += b.h;
  return r;
}

inline Jet2 operator-(const Jet2& a, const Jet2& b) {
  Jet2 r = a;
  r.v -= b.v;
  r.g -= b.g;
  r.h -= b.h;
  return r;
}

inline Jet2 operator-(const Jet2& a) {
  Jet2 r = a;
  r.v = -r.v;
  r.g = -r.g;
  r.h = -r.h;
  return r;
}

inline Jet2 operator*(const Jet2& a, const Jet2& b) {
  Jet2 r(a.dim());
  r.v = a.v * b.v;
  r.g = a.g * b.v + b.g * a.v;
  r.h = a.h * b.v + b.h * a.v + a.g * b.g.transpose() + b.g * a.g.transpose();
  return r;
}

inline Jet2 operator*(double c, const Jet2& a) {
  Jet2 r = a;
  r.v *= c;
  r.g *= c;
  r.h *= c;
  return r;
}

inline Jet2 operator+(const Jet2& a, double c) {
  Jet2 r = a;
  r.v += c;
  return r;
}

inline Jet2 operator/(const Jet2& a, const Jet2& b) {
  if (b.v == 0.0) throw DomainError("/", 0.0);
  Jet2 r(a.dim());
  r.v = a.v / b.v;
  r.g = (a.g - r.v * b.g) / b.v;
  // The symmetric cross term is materialized first so the Hessian stays
  // bitwise symmetric: mixing it into a longer elementwise expression lets
  // Eigen fold scalars into one GEMM factor, which rounds (i,j) and (j,i)
  // differently.
  const Eigen::MatrixXd cross =
      r.g * b.g.transpose() + b.g * r.g.transpose();
  r.h = (a.h - cross - r.v * b.h) / b.v;
  return r;
}

// Applies a scalar function with given value and first two derivatives at
// a.v: (f o a) has gradient f' a.g and Hessian f' a.h + f'' a.g a.g^T.
inline Jet2 jet_chain(const Jet2& a, double f0, double f1, double f2) {
  Jet2 r(a.dim());
  r.v = f0;
  r.g = f1 * a.g;
  // Evaluate the outer product before scaling, for bitwise symmetry (see
  // operator/).
  const Eigen::MatrixXd outer = a.g * a.g.transpose();
  r.h = f1 * a.h + f2 * outer;
  return r;
}

inline Jet2 jet_sin(const Jet2& a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  return jet_chain(a, s, c, -s);
}
inline Jet2 jet_cos(const Jet2& a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  return jet_chain(a, c, -s, -c);
}
inline Jet2 jet_tan(const Jet2& a) {
  const double t = std::tan(a.v), u = 1.0 + t * t;
  return jet_chain(a, t, u, 2.0 * t * u);
}
inline Jet2 jet_exp(const Jet2& a) {
  const double e = std::exp(a.v);
  return jet_chain(a, e, e, e);
}
inline Jet2 jet_log(const Jet2& a) {
  if (a.v <= 0.0) throw DomainError("log", a.v);
  const double inv = 1.0 / a.v;
  return jet_chain(a, std::log(a.v), inv, -inv * inv);
}
inline Jet2 jet_sqrt(const Jet2& a) {
  if (a.v <= 0.0) throw DomainError("sqrt", a.v);
  const double s = std::sqrt(a.v);
  return jet_chain(a, s, 0.5 / s, -0.25 / (s * a.v));
}
inline Jet2 jet_sinh(const Jet2& a) {
  const double s = std::sinh(a.v), c = std::cosh(a.v);
  return jet_chain(a, s, c, s);
}
inline Jet2 jet_cosh(const Jet2& a) {
  const double s = std::sinh(a.v), c = std::cosh(a.v);
  return jet_chain(a, c, s, c);
}
inline Jet2 jet_tanh(const Jet2& a) {
  const double t = std::tanh(a.v), u = 1.0 - t * t;
  return jet_chain(a, t, u, -2.0 * t * u);
}
inline Jet2 jet_atan(const Jet2& a) {
  const double d = 1.0 + a.v * a.v;
  return jet_chain(a, std::atan(a.v), 1.0 / d, -2.0 * a.v / (d * d));
}

// Integer power, valid for any base (negative bases included). Negative
// exponents require a nonzero base.
inline Jet2 jet_pow_int(const Jet2& a, long long k) {
  if (k == 0) return Jet2::constant(a.dim(), 1.0);
  if (k < 0 && a.v == 0.0) throw DomainError("^", 0.0);
  const auto ipow = [](double x, long long n) {
    double r = 1.0, b = x;
    unsigned long long m = n < 0 ? static_cast<unsigned long long>(-n)
                                 : static_cast<unsigned long long>(n);
    while (m) {
      if (m & 1ull) r *= b;
      b *= b;
      m >>= 1;
    }
    return n < 0 ? 1.0 / r : r;
  };
  const double kd = static_cast<double>(k);
  const double f0 = ipow(a.v, k);
  const double f1 = kd * ipow(a.v, k - 1);
  const double f2 = (k == 1) ? 0.0 : kd * (kd - 1.0) * ipow(a.v, k - 2);
  return jet_chain(a, f0, f1, f2);
}

// Real power with constant exponent; requires a positive base.
inline Jet2 jet_pow_real(const Jet2& a, double c) {
  if (a.v <= 0.0) throw DomainError("^", a.v);
  const double f0 = std::pow(a.v, c);
  const double f1 = c * std::pow(a.v, c - 1.0);
  const double f2 = c * (c - 1.0) * std::pow(a.v, c - 2.0);
  return jet_chain(a, f0, f1, f2);
}

// General power with a varying exponent: a^b = exp(b log a), base must be
// positive.
inline Jet2 jet_pow(const Jet2& a, const Jet2& b) {
  if (a.v <= 0.0) throw DomainError("^", a.v);
  return jet_exp(b * jet_log(a));
}

}  // namespace defalg
