#include "defalg/metric.hpp"

#include <cmath>

#include "defalg/errors.hpp"

namespace defalg {

struct Metric::Impl {
  TensorField t;
  Requirement req = Requirement::PositiveDefinite;
  double guard = 1e12;
  std::vector<Eigen::MatrixXd> sample_inv;

  explicit Impl(TensorField tf) : t(std::move(tf)) {}
};

namespace {

Eigen::MatrixXd invert_checked(const Eigen::MatrixXd& g,
                               Metric::Requirement req, double guard,
                               const Point& p) {
  const int n = static_cast<int>(g.rows());
  if (req == Metric::Requirement::PositiveDefinite) {
    Eigen::LLT<Eigen::MatrixXd> llt(g);
    if (llt.info() != Eigen::Success) {
      throw SingularMetric("metric is not positive definite at a sample point",
                           p);
    }
    return llt.solve(Eigen::MatrixXd::Identity(n, n));
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      g, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(n - 1);
  if (!(smin > 0.0) || smax / smin > guard) {
    throw SingularMetric(
        "metric-like tensor is singular or too ill-conditioned at a sample "
        "point",
        p);
  }
  return svd.solve(Eigen::MatrixXd::Identity(n, n));
}

}  // namespace

Metric::Metric(Chart chart, std::vector<FieldPtr> comps, Requirement req,
               double condition_guard)
    : Metric(TensorField(std::move(chart), Valence{0, 2}, std::move(comps),
                         TensorField::Symmetry::SymmetricPair),
             req, condition_guard) {}

Metric::Metric(TensorField symmetric_bilinear, Requirement req,
               double condition_guard) {
  if (symmetric_bilinear.valence() != Valence{0, 2}) {
    throw InvalidArgument("metric must be a (0,2) tensor field");
  }
  if (symmetric_bilinear.symmetry() != TensorField::Symmetry::SymmetricPair) {
    throw InvalidArgument("metric tensor must be constructed symmetric");
  }
  auto impl = std::make_shared<Impl>(std::move(symmetric_bilinear));
  impl->req = req;
  impl->guard = condition_guard;
  const int n = impl->t.dim();
  impl->sample_inv.reserve(impl->t.chart().points().size());
  for (const Point& p : impl->t.chart().points()) {
    const std::vector<double> vals = impl->t.values_at(p);
    Eigen::MatrixXd g(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        g(i, j) = vals[static_cast<std::size_t>(i * n + j)];
      }
    }
    impl->sample_inv.push_back(invert_checked(g, req, condition_guard, p));
  }
  impl_ = std::move(impl);
}

const Chart& Metric::chart() const { return impl_->t.chart(); }
int Metric::dim() const { return impl_->t.dim(); }
Metric::Requirement Metric::requirement() const { return impl_->req; }
const TensorField& Metric::tensor() const { return impl_->t; }

const FieldPtr& Metric::component(int i, int j) const {
  const int idx[2] = {i, j};
  return impl_->t.component(std::span<const int>(idx, 2));
}

Eigen::MatrixXd Metric::at(const Point& p) const {
  const int n = dim();
  const std::vector<double> vals = impl_->t.values_at(p);
  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      g(i, j) = vals[static_cast<std::size_t>(i * n + j)];
    }
  }
  return g;
}

Eigen::MatrixXd Metric::inverse_at(const Point& p) const {
  return invert_checked(at(p), impl_->req, impl_->guard, p);
}

MetricJets Metric::jets_at(const Point& p) const {
  const int n = dim();
  MetricJets out;
  out.g.resize(n, n);
  out.dg = Tensor3(n);
  out.d2g = Tensor4(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const Jet2 jet = component(i, j)->jet(p);
      out.g(i, j) = jet.v;
      out.g(j, i) = jet.v;
      for (int m = 0; m < n; ++m) {
        out.dg(m, i, j) = jet.g[m];
        out.dg(m, j, i) = jet.g[m];
        for (int q = 0; q < n; ++q) {
          out.d2g(m, q, i, j) = jet.h(m, q);
          out.d2g(m, q, j, i) = jet.h(m, q);
        }
      }
    }
  }
  return out;
}

namespace {

// g^{ij} with exact order-2 jets from the forward metric's jets.
class InverseComponentField final : public ScalarField {
 public:
  InverseComponentField(Metric g, int i, int j)
      : g_(std::move(g)), i_(i), j_(j) {}

  int dim() const override { return g_.dim(); }

  double value(const Point& p) const override {
    return g_.inverse_at(p)(i_, j_);
  }

  Jet2 jet(const Point& p) const override {
    const int n = g_.dim();
    const MetricJets mj = g_.jets_at(p);
    const Eigen::MatrixXd inv = g_.inverse_at(p);
    // dG_m = -G (d_m g) G
    std::vector<Eigen::MatrixXd> dg(n), dG(n);
    for (int m = 0; m < n; ++m) {
      dg[m].resize(n, n);
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) dg[m](a, b) = mj.dg(m, a, b);
      }
      dG[m] = -inv * dg[m] * inv;
    }
    Jet2 out(n);
    out.v = inv(i_, j_);
    for (int m = 0; m < n; ++m) out.g[m] = dG[m](i_, j_);
    // d2G_{mq} = -G d2g_{mq} G + G dg_m G dg_q G + G dg_q G dg_m G
    Eigen::MatrixXd d2g(n, n);
    for (int m = 0; m < n; ++m) {
      for (int q = m; q < n; ++q) {
        for (int a = 0; a < n; ++a) {
          for (int b = 0; b < n; ++b) d2g(a, b) = mj.d2g(m, q, a, b);
        }
        const Eigen::MatrixXd term = -inv * d2g * inv +
                                     inv * dg[m] * inv * dg[q] * inv +
                                     inv * dg[q] * inv * dg[m] * inv;
        out.h(m, q) = term(i_, j_);
        out.h(q, m) = term(i_, j_);
      }
    }
    return out;
  }

 private:
  Metric g_;
  int i_, j_;
};

}  // namespace

FieldPtr Metric::inverse_component(int i, int j) const {
  if (i < 0 || i >= dim() || j < 0 || j >= dim()) {
    throw InvalidArgument("metric component index out of range");
  }
  return std::make_shared<InverseComponentField>(*this, i, j);
}

const std::vector<Eigen::MatrixXd>& Metric::sample_inverses() const {
  return impl_->sample_inv;
}

}  // namespace defalg
