#pragma once

#include <memory>

#include "defalg/metric.hpp"
#include "defalg/tensor.hpp"

namespace defalg {

// Connection coefficients and their first derivatives at a point:
// value(k,i,j) = Gamma^k_ij (k output, i direction, j argument),
// grad(k,i,j,m) = d_m Gamma^k_ij.
struct ConnectionJets {
  Tensor3 value;
  Tensor4 grad;
};

// An affine connection in chart coordinates: n^3 coefficient fields
// Gamma^k_ij with nabla_{E_i} E_j = Gamma^k_ij E_k. The Levi-Civita factory
// computes coefficients and their derivatives analytically from the metric
// jets; generic connections read derivatives from their coefficient fields'
// jets (exact for expression coefficients, finite differences otherwise).
class Connection {
 public:
  static Connection from_fields(Chart chart, std::vector<FieldPtr> gamma,
                                bool symmetric_lower);
  static Connection constant(Chart chart, const Tensor3& gamma,
                             bool symmetric_lower);

  const Chart& chart() const;
  int dim() const;
  bool symmetric_lower() const;
  const FieldPtr& coefficient(int k, int i, int j) const;

  Tensor3 at(const Point& p) const;
  ConnectionJets jets_at(const Point& p) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  explicit Connection(std::shared_ptr<const Impl> impl);
  friend Connection levi_civita(const Metric&, bool);
  friend Connection deform(const Connection&, const TensorField&);
};

// Levi-Civita connection of g:
//   Gamma^k_ij = (1/2) g^{kl} (d_i g_jl + d_j g_il - d_l g_ij).
// When selfcheck is set, metric compatibility is verified at every chart
// sample point at construction (throws SelfTestFailure beyond 1e-8).
Connection levi_civita(const Metric& g, bool selfcheck = true);

// The connection nabla + A for a (1,2) deformation tensor A.
Connection deform(const Connection& nabla, const TensorField& A);

// A = other - base as a (1,2) tensor field. Exact zeros where both
// connections share coefficient fields.
TensorField deformation(const Connection& base, const Connection& other);

// Torsion T^k_ij = Gamma^k_ij - Gamma^k_ji as a (1,2) tensor field
// (identically zero fields for a symmetric connection).
TensorField torsion(const Connection& c);

// max_{k,i,j} |d_k g_ij - Gamma^l_ki g_lj - Gamma^l_kj g_il| at p.
double compatibility_residual(const Connection& c, const Metric& g,
                              const Point& p);

// Covariant derivative of a (0,2) tensor:
//   (nabla S)_ijk = d_i S_jk - Gamma^l_ij S_lk - Gamma^l_ik S_jl,
// returned as a (0,3) tensor with indices (direction, arg1, arg2).
TensorField covariant_derivative_02(const Connection& c, const TensorField& S);

// Covariant derivative of a (1,1) tensor:
//   (nabla J)^k_ij = d_i J^k_j + Gamma^k_il J^l_j - Gamma^l_ij J^k_l,
// returned as a (1,2) tensor with indices (k, direction, arg).
TensorField covariant_derivative_11(const Connection& c, const TensorField& J);

// Curvature R^l_kij = d_i Gamma^l_jk - d_j Gamma^l_ik
//                   + Gamma^l_im Gamma^m_jk - Gamma^l_jm Gamma^m_ik,
// returned as a (1,3) tensor with indices (l, k, i, j).
TensorField curvature(const Connection& c);

// Ricci tensor R_jk = R^i_jik as a (0,2) tensor field.
TensorField ricci(const Connection& c);

// Exterior derivative of a 2-form:
//   (dW)_ijk = d_i W_jk - d_j W_ik + d_k W_ij, a (0,3) tensor.
TensorField exterior_derivative_2form(const TensorField& omega);

// Index raising/lowering with g: sharp maps a one-form to a vector field,
// flat the other way.
TensorField sharp(const Metric& g, const TensorField& theta);
TensorField flat(const Metric& g, const TensorField& X);

}  // namespace defalg
