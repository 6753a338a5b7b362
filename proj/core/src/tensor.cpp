#include "defalg/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "defalg/errors.hpp"

namespace defalg {

double Tensor3::max_abs() const {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

double Tensor4::max_abs() const {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

struct TensorField::Impl {
  Chart chart;
  Valence valence;
  Symmetry sym = Symmetry::None;
  int n = 0;
  std::vector<FieldPtr> comps;
  std::function<std::vector<double>(const Point&)> bulk;

  explicit Impl(Chart c) : chart(std::move(c)) {}
};

TensorField::TensorField(std::shared_ptr<const Impl> impl)
    : impl_(std::move(impl)) {}

namespace {

std::size_t expected_count(int n, const Valence& v) {
  std::size_t c = 1;
  for (int i = 0; i < v.rank(); ++i) c *= static_cast<std::size_t>(n);
  return c;
}

}  // namespace

TensorField::TensorField(Chart chart, Valence valence,
                         std::vector<FieldPtr> comps, Symmetry sym) {
  const int n = chart.dim();
  if (valence.up < 0 || valence.up > 1 || valence.low < 0 ||
      valence.low > 3) {
    throw InvalidArgument("unsupported tensor valence");
  }
  if (comps.size() != expected_count(n, valence)) {
    throw InvalidArgument("tensor component count does not match valence");
  }
  for (const auto& c : comps) {
    if (!c) throw InvalidArgument("null tensor component");
    if (c->dim() != n) {
      throw InvalidArgument("tensor component dimension differs from chart");
    }
  }
  if (sym != Symmetry::None && valence.low < 2) {
    throw InvalidArgument(
        "pair symmetry needs at least two covariant indices");
  }

  auto impl = std::make_shared<Impl>(std::move(chart));
  impl->valence = valence;
  impl->sym = sym;
  impl->n = n;

  if (sym != Symmetry::None) {
    // Verify the declared symmetry numerically at a few sample points, then
    // rebuild the mirror components from the canonical (i <= j) ones so the
    // symmetry is exact by construction from here on.
    const double sign = (sym == Symmetry::SymmetricPair) ? 1.0 : -1.0;
    const std::size_t prefix =
        comps.size() / (static_cast<std::size_t>(n) * n);
    const int probes = std::min(4, impl->chart.sample_count());
    double scale = 1.0;
    for (int s = 0; s < probes; ++s) {
      const Point& p = impl->chart.points()[static_cast<std::size_t>(s)];
      for (const auto& c : comps) {
        scale = std::max(scale, std::abs(c->value(p)));
      }
    }
    for (int s = 0; s < probes; ++s) {
      const Point& p = impl->chart.points()[static_cast<std::size_t>(s)];
      for (std::size_t pre = 0; pre < prefix; ++pre) {
        for (int i = 0; i < n; ++i) {
          for (int j = i; j < n; ++j) {
            const std::size_t ij = (pre * n + static_cast<std::size_t>(i)) *
                                       static_cast<std::size_t>(n) +
                                   static_cast<std::size_t>(j);
            const std::size_t ji = (pre * n + static_cast<std::size_t>(j)) *
                                       static_cast<std::size_t>(n) +
                                   static_cast<std::size_t>(i);
            const double d = comps[ij]->value(p) - sign * comps[ji]->value(p);
            if (std::abs(d) > 1e-10 * scale) {
              throw InvalidArgument(
                  "tensor components do not satisfy the declared pair "
                  "symmetry");
            }
          }
        }
      }
    }
    for (std::size_t pre = 0; pre < prefix; ++pre) {
      for (int i = 0; i < n; ++i) {
        const std::size_t ii = (pre * n + static_cast<std::size_t>(i)) *
                                   static_cast<std::size_t>(n) +
                               static_cast<std::size_t>(i);
        if (sym == Symmetry::AntisymmetricPair) comps[ii] = zero_field(n);
        for (int j = i + 1; j < n; ++j) {
          const std::size_t ij = (pre * n + static_cast<std::size_t>(i)) *
                                     static_cast<std::size_t>(n) +
                                 static_cast<std::size_t>(j);
          const std::size_t ji = (pre * n + static_cast<std::size_t>(j)) *
                                     static_cast<std::size_t>(n) +
                                 static_cast<std::size_t>(i);
          comps[ji] = (sym == Symmetry::SymmetricPair)
                          ? comps[ij]
                          : negated(comps[ij]);
        }
      }
    }
  }

  impl->comps = std::move(comps);
  impl_ = std::move(impl);
}

const Chart& TensorField::chart() const { return impl_->chart; }
const Valence& TensorField::valence() const { return impl_->valence; }
TensorField::Symmetry TensorField::symmetry() const { return impl_->sym; }
int TensorField::dim() const { return impl_->n; }

int TensorField::component_count() const {
  return static_cast<int>(impl_->comps.size());
}

std::size_t TensorField::flat_index(std::span<const int> idx) const {
  if (static_cast<int>(idx.size()) != impl_->valence.rank()) {
    throw InvalidArgument("tensor index count does not match valence");
  }
  std::size_t flat = 0;
  for (int v : idx) {
    if (v < 0 || v >= impl_->n) {
      throw InvalidArgument("tensor index out of range");
    }
    flat = flat * static_cast<std::size_t>(impl_->n) +
           static_cast<std::size_t>(v);
  }
  return flat;
}

const FieldPtr& TensorField::component(std::span<const int> idx) const {
  return impl_->comps[flat_index(idx)];
}

std::vector<double> TensorField::values_at(const Point& p) const {
  if (impl_->bulk) return impl_->bulk(p);
  std::vector<double> out;
  out.reserve(impl_->comps.size());
  for (const auto& c : impl_->comps) out.push_back(c->value(p));
  return out;
}

double TensorField::max_abs_at(const Point& p) const {
  double m = 0.0;
  for (double v : values_at(p)) m = std::max(m, std::abs(v));
  return m;
}

TensorField TensorField::with_bulk(
    std::function<std::vector<double>(const Point&)> bulk) const {
  auto impl = std::make_shared<Impl>(*impl_);
  impl->bulk = std::move(bulk);
  return TensorField(std::move(impl));
}

TensorField one_form(Chart chart, std::vector<FieldPtr> comps) {
  return TensorField(std::move(chart), Valence{0, 1}, std::move(comps));
}

TensorField vector_field(Chart chart, std::vector<FieldPtr> comps) {
  return TensorField(std::move(chart), Valence{1, 0}, std::move(comps));
}

TensorField endomorphism_field(Chart chart, std::vector<FieldPtr> comps) {
  return TensorField(std::move(chart), Valence{1, 1}, std::move(comps));
}

TensorField bilinear_field(Chart chart, std::vector<FieldPtr> comps,
                           TensorField::Symmetry sym) {
  return TensorField(std::move(chart), Valence{0, 2}, std::move(comps), sym);
}

}  // namespace defalg
