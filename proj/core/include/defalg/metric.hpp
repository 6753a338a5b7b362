#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "defalg/tensor.hpp"

namespace defalg {

// Order-2 derivative data of the metric at a point: dg(m,i,j) = d_m g_ij and
// d2g(m,q,i,j) = d^2_{mq} g_ij (symmetric in m,q and in i,j).
struct MetricJets {
  Eigen::MatrixXd g;
  Tensor3 dg;
  Tensor4 d2g;
};

// A (pseudo-)Riemannian metric on a chart. Construction validates the
// requirement at every chart sample point and caches the sampled inverses:
//   PositiveDefinite -- Cholesky must succeed,
//   Invertible       -- the matrix must be invertible with condition number
//                       below the guard (needed for indefinite metrics and
//                       second-fundamental-form tensors used as metrics).
class Metric {
 public:
  enum class Requirement { PositiveDefinite, Invertible };

  Metric(Chart chart, std::vector<FieldPtr> comps,
         Requirement req = Requirement::PositiveDefinite,
         double condition_guard = 1e12);
  Metric(TensorField symmetric_bilinear,
         Requirement req = Requirement::PositiveDefinite,
         double condition_guard = 1e12);

  const Chart& chart() const;
  int dim() const;
  Requirement requirement() const;
  const TensorField& tensor() const;
  const FieldPtr& component(int i, int j) const;

  Eigen::MatrixXd at(const Point& p) const;
  Eigen::MatrixXd inverse_at(const Point& p) const;
  MetricJets jets_at(const Point& p) const;

  // Inverse-metric entry g^{ij} as a field with exact order-2 jets derived
  // from the component jets (d g^-1 = -g^-1 dg g^-1 and its derivative).
  FieldPtr inverse_component(int i, int j) const;

  // Inverses at the chart sample points, aligned with chart().points().
  const std::vector<Eigen::MatrixXd>& sample_inverses() const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

}  // namespace defalg
