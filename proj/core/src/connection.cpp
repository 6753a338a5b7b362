#include "defalg/connection.hpp"

#include <cmath>

#include "defalg/errors.hpp"

namespace defalg {

struct Connection::Impl {
  Chart chart;
  int n = 0;
  bool symmetric = false;
  std::vector<FieldPtr> gamma;  // (k,i,j) row-major
  std::function<Tensor3(const Point&)> bulk_values;
  std::function<ConnectionJets(const Point&)> bulk_jets;

  explicit Impl(Chart c) : chart(std::move(c)) {}

  std::size_t idx(int k, int i, int j) const {
    return static_cast<std::size_t>((k * n + i) * n + j);
  }
};

Connection::Connection(std::shared_ptr<const Impl> impl)
    : impl_(std::move(impl)) {}

Connection Connection::from_fields(Chart chart, std::vector<FieldPtr> gamma,
                                   bool symmetric_lower) {
  const int n = chart.dim();
  if (gamma.size() != static_cast<std::size_t>(n) * n * n) {
    throw InvalidArgument("connection needs n^3 coefficient fields");
  }
  for (const auto& f : gamma) {
    if (!f) throw InvalidArgument("null connection coefficient");
    if (f->dim() != n) {
      throw InvalidArgument("connection coefficient dimension mismatch");
    }
  }
  auto impl = std::make_shared<Impl>(std::move(chart));
  impl->n = n;
  impl->symmetric = symmetric_lower;
  if (symmetric_lower) {
    // Verify the claim at a few samples, then share the canonical fields so
    // the symmetry is exact.
    const int probes = std::min(4, impl->chart.sample_count());
    double scale = 1.0;
    for (int s = 0; s < probes; ++s) {
      const Point& p = impl->chart.points()[static_cast<std::size_t>(s)];
      for (const auto& f : gamma) {
        scale = std::max(scale, std::abs(f->value(p)));
      }
    }
    for (int s = 0; s < probes; ++s) {
      const Point& p = impl->chart.points()[static_cast<std::size_t>(s)];
      for (int k = 0; k < n; ++k) {
        for (int i = 0; i < n; ++i) {
          for (int j = i + 1; j < n; ++j) {
            const double d = gamma[impl->idx(k, i, j)]->value(p) -
                             gamma[impl->idx(k, j, i)]->value(p);
            if (std::abs(d) > 1e-10 * scale) {
              throw InvalidArgument(
                  "coefficients are not symmetric in the lower index pair");
            }
          }
        }
      }
    }
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
          gamma[impl->idx(k, j, i)] = gamma[impl->idx(k, i, j)];
        }
      }
    }
  }
  impl->gamma = std::move(gamma);
  return Connection(std::move(impl));
}

Connection Connection::constant(Chart chart, const Tensor3& coeffs,
                                bool symmetric_lower) {
  const int n = chart.dim();
  if (coeffs.n != n) {
    throw InvalidArgument("constant connection dimension mismatch");
  }
  std::vector<FieldPtr> gamma;
  gamma.reserve(static_cast<std::size_t>(n) * n * n);
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        gamma.push_back(constant_field(n, coeffs(k, i, j)));
      }
    }
  }
  Connection c = from_fields(std::move(chart), std::move(gamma),
                             symmetric_lower);
  auto impl = std::make_shared<Impl>(*c.impl_);
  const Tensor3 frozen = coeffs;
  impl->bulk_values = [frozen](const Point&) { return frozen; };
  impl->bulk_jets = [frozen](const Point&) {
    return ConnectionJets{frozen, Tensor4(frozen.n)};
  };
  return Connection(std::move(impl));
}

const Chart& Connection::chart() const { return impl_->chart; }
int Connection::dim() const { return impl_->n; }
bool Connection::symmetric_lower() const { return impl_->symmetric; }

const FieldPtr& Connection::coefficient(int k, int i, int j) const {
  const int n = impl_->n;
  if (k < 0 || k >= n || i < 0 || i >= n || j < 0 || j >= n) {
    throw InvalidArgument("connection coefficient index out of range");
  }
  return impl_->gamma[impl_->idx(k, i, j)];
}

Tensor3 Connection::at(const Point& p) const {
  if (impl_->bulk_values) return impl_->bulk_values(p);
  const int n = impl_->n;
  Tensor3 out(n);
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        out(k, i, j) = impl_->gamma[impl_->idx(k, i, j)]->value(p);
      }
    }
  }
  return out;
}

ConnectionJets Connection::jets_at(const Point& p) const {
  if (impl_->bulk_jets) return impl_->bulk_jets(p);
  const int n = impl_->n;
  ConnectionJets out{Tensor3(n), Tensor4(n)};
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const Jet2 jet = impl_->gamma[impl_->idx(k, i, j)]->jet(p);
        out.value(k, i, j) = jet.v;
        for (int m = 0; m < n; ++m) out.grad(k, i, j, m) = jet.g[m];
      }
    }
  }
  return out;
}

namespace {

// Shared Levi-Civita evaluation core. Gamma and dGamma come straight from
// the metric jets:
//   Gamma^k_ij   = (1/2) g^{kl} c_lij,  c_lij = d_i g_jl + d_j g_il - d_l g_ij
//   d_m Gamma^k_ij = (1/2) (d_m g^{kl}) c_lij + (1/2) g^{kl} d_m c_lij,
// with d_m g^{-1} = -g^{-1} (d_m g) g^{-1}. Everything through d_m Gamma is
// exact when the metric components have exact jets.
struct LeviCivitaCore {
  Metric g;

  explicit LeviCivitaCore(Metric metric) : g(std::move(metric)) {}

  Tensor3 values(const Point& p) const {
    const int n = g.dim();
    const MetricJets mj = g.jets_at(p);
    const Eigen::MatrixXd inv = g.inverse_at(p);
    Tensor3 out(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
          double s = 0.0;
          for (int l = 0; l < n; ++l) {
            s += inv(k, l) *
                 (mj.dg(i, j, l) + mj.dg(j, i, l) - mj.dg(l, i, j));
          }
          out(k, i, j) = 0.5 * s;
        }
      }
    }
    return out;
  }

  ConnectionJets jets(const Point& p) const {
    const int n = g.dim();
    const MetricJets mj = g.jets_at(p);
    const Eigen::MatrixXd inv = g.inverse_at(p);
    std::vector<Eigen::MatrixXd> dginv(static_cast<std::size_t>(n));
    for (int m = 0; m < n; ++m) {
      Eigen::MatrixXd dgm(n, n);
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) dgm(a, b) = mj.dg(m, a, b);
      }
      dginv[static_cast<std::size_t>(m)] = -inv * dgm * inv;
    }
    ConnectionJets out{Tensor3(n), Tensor4(n)};
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int l = 0; l < n; ++l) {
          const double c =
              mj.dg(i, j, l) + mj.dg(j, i, l) - mj.dg(l, i, j);
          for (int k = 0; k < n; ++k) {
            out.value(k, i, j) += 0.5 * inv(k, l) * c;
          }
          for (int m = 0; m < n; ++m) {
            const double dc = mj.d2g(m, i, j, l) + mj.d2g(m, j, i, l) -
                              mj.d2g(m, l, i, j);
            for (int k = 0; k < n; ++k) {
              out.grad(k, i, j, m) +=
                  0.5 * (dginv[static_cast<std::size_t>(m)](k, l) * c +
                         inv(k, l) * dc);
            }
          }
        }
      }
    }
    return out;
  }
};

// One Levi-Civita coefficient as a scalar field: value and gradient are
// analytic; the Hessian (third metric derivatives) is a central difference
// of the analytic gradient.
class LeviCivitaCoefficient final : public ScalarField {
 public:
  LeviCivitaCoefficient(std::shared_ptr<const LeviCivitaCore> core, int k,
                        int i, int j)
      : core_(std::move(core)), k_(k), i_(i), j_(j) {}

  int dim() const override { return core_->g.dim(); }

  double value(const Point& p) const override {
    return core_->values(p)(k_, i_, j_);
  }

  Jet2 jet(const Point& p) const override {
    const int n = dim();
    const ConnectionJets cj = core_->jets(p);
    Jet2 out(n);
    out.v = cj.value(k_, i_, j_);
    for (int m = 0; m < n; ++m) out.g[m] = cj.grad(k_, i_, j_, m);
    const double h = 1e-4;
    Eigen::MatrixXd hess(n, n);
    Point q = p;
    for (int d = 0; d < n; ++d) {
      q[d] = p[d] + h;
      const ConnectionJets jp = core_->jets(q);
      q[d] = p[d] - h;
      const ConnectionJets jm = core_->jets(q);
      q[d] = p[d];
      for (int m = 0; m < n; ++m) {
        hess(d, m) =
            (jp.grad(k_, i_, j_, m) - jm.grad(k_, i_, j_, m)) / (2.0 * h);
      }
    }
    out.h = 0.5 * (hess + hess.transpose());
    return out;
  }

 private:
  std::shared_ptr<const LeviCivitaCore> core_;
  int k_, i_, j_;
};

}  // namespace

Connection levi_civita(const Metric& g, bool selfcheck) {
  const int n = g.dim();
  auto core = std::make_shared<const LeviCivitaCore>(g);
  std::vector<FieldPtr> gamma;
  gamma.reserve(static_cast<std::size_t>(n) * n * n);
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        gamma.push_back(
            std::make_shared<LeviCivitaCoefficient>(core, k, i, j));
      }
    }
  }
  auto impl = std::make_shared<Connection::Impl>(g.chart());
  impl->n = n;
  impl->symmetric = true;
  impl->gamma = std::move(gamma);
  impl->bulk_values = [core](const Point& p) { return core->values(p); };
  impl->bulk_jets = [core](const Point& p) { return core->jets(p); };
  Connection c{std::shared_ptr<const Connection::Impl>(std::move(impl))};
  if (selfcheck) {
    for (const Point& p : g.chart().points()) {
      const double r = compatibility_residual(c, g, p);
      if (!(r <= 1e-8)) {
        throw SelfTestFailure(
            "Levi-Civita construction failed metric compatibility", r);
      }
    }
  }
  return c;
}

Connection deform(const Connection& nabla, const TensorField& A) {
  if (A.valence() != Valence{1, 2}) {
    throw InvalidArgument("deformation tensor must have valence (1,2)");
  }
  if (A.chart() != nabla.chart()) {
    throw InvalidArgument("deformation tensor lives on a different chart");
  }
  const int n = nabla.dim();
  auto impl = std::make_shared<Connection::Impl>(nabla.chart());
  impl->n = n;
  impl->symmetric = nabla.symmetric_lower() &&
                    A.symmetry() == TensorField::Symmetry::SymmetricPair;
  impl->gamma.reserve(static_cast<std::size_t>(n) * n * n);
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const int idx[3] = {k, i, j};
        impl->gamma.push_back(sum(nabla.coefficient(k, i, j),
                                  A.component(std::span<const int>(idx, 3))));
      }
    }
  }
  Connection base = nabla;
  TensorField def = A;
  impl->bulk_values = [base, def](const Point& p) {
    Tensor3 out = base.at(p);
    const std::vector<double> add = def.values_at(p);
    for (std::size_t q = 0; q < add.size(); ++q) out.a[q] += add[q];
    return out;
  };
  return Connection(std::shared_ptr<const Connection::Impl>(std::move(impl)));
}

TensorField deformation(const Connection& base, const Connection& other) {
  if (base.chart() != other.chart()) {
    throw InvalidArgument("connections live on different charts");
  }
  const int n = base.dim();
  std::vector<FieldPtr> comps;
  comps.reserve(static_cast<std::size_t>(n) * n * n);
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const FieldPtr& a = other.coefficient(k, i, j);
        const FieldPtr& b = base.coefficient(k, i, j);
        comps.push_back(a == b ? zero_field(n) : difference(a, b));
      }
    }
  }
  TensorField t(base.chart(), Valence{1, 2}, std::move(comps));
  Connection cb = base, co = other;
  return t.with_bulk([cb, co](const Point& p) {
    const Tensor3 tb = cb.at(p), to = co.at(p);
    std::vector<double> out(tb.a.size());
    for (std::size_t q = 0; q < out.size(); ++q) out[q] = to.a[q] - tb.a[q];
    return out;
  });
}

TensorField torsion(const Connection& c) {
  const int n = c.dim();
  std::vector<FieldPtr> comps(static_cast<std::size_t>(n) * n * n);
  const auto at = [n](int k, int i, int j) {
    return static_cast<std::size_t>((k * n + i) * n + j);
  };
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      comps[at(k, i, i)] = zero_field(n);
      for (int j = i + 1; j < n; ++j) {
        if (c.symmetric_lower()) {
          comps[at(k, i, j)] = zero_field(n);
          comps[at(k, j, i)] = zero_field(n);
        } else {
          comps[at(k, i, j)] =
              difference(c.coefficient(k, i, j), c.coefficient(k, j, i));
          comps[at(k, j, i)] = negated(comps[at(k, i, j)]);
        }
      }
    }
  }
  TensorField t(c.chart(), Valence{1, 2}, std::move(comps));
  if (c.symmetric_lower()) return t;
  Connection cc = c;
  return t.with_bulk([cc, n](const Point& p) {
    const Tensor3 g = cc.at(p);
    std::vector<double> out(g.a.size());
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          out[static_cast<std::size_t>((k * n + i) * n + j)] =
              g(k, i, j) - g(k, j, i);
        }
      }
    }
    return out;
  });
}

double compatibility_residual(const Connection& c, const Metric& g,
                              const Point& p) {
  const int n = g.dim();
  const MetricJets mj = g.jets_at(p);
  const Tensor3 gam = c.at(p);
  double worst = 0.0;
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        double r = mj.dg(k, i, j);
        for (int l = 0; l < n; ++l) {
          r -= gam(l, k, i) * mj.g(l, j) + gam(l, k, j) * mj.g(i, l);
        }
        worst = std::max(worst, std::abs(r));
      }
    }
  }
  return worst;
}

TensorField covariant_derivative_02(const Connection& c,
                                    const TensorField& S) {
  if (S.valence() != Valence{0, 2}) {
    throw InvalidArgument("covariant_derivative_02 expects a (0,2) tensor");
  }
  if (S.chart() != c.chart()) {
    throw InvalidArgument("tensor lives on a different chart");
  }
  const int n = c.dim();
  std::vector<FieldPtr> comps;
  comps.reserve(static_cast<std::size_t>(n) * n * n);
  const auto scomp = [&S](int a, int b) {
    const int idx[2] = {a, b};
    return S.component(std::span<const int>(idx, 2));
  };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        FieldPtr f = partial(scomp(j, k), i);
        for (int l = 0; l < n; ++l) {
          f = difference(f, product(c.coefficient(l, i, j), scomp(l, k)));
          f = difference(f, product(c.coefficient(l, i, k), scomp(j, l)));
        }
        comps.push_back(std::move(f));
      }
    }
  }
  TensorField t(c.chart(), Valence{0, 3}, std::move(comps));
  Connection cc = c;
  TensorField ss = S;
  return t.with_bulk([cc, ss, n](const Point& p) {
    const Tensor3 gam = cc.at(p);
    // Component jets give the exact partials d_i S_jk.
    std::vector<Jet2> jets;
    jets.reserve(static_cast<std::size_t>(n) * n);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        const int idx[2] = {a, b};
        jets.push_back(ss.component(std::span<const int>(idx, 2))->jet(p));
      }
    }
    const auto sj = [&jets, n](int a, int b) -> const Jet2& {
      return jets[static_cast<std::size_t>(a * n + b)];
    };
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n) * n * n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
          double v = sj(j, k).g[i];
          for (int l = 0; l < n; ++l) {
            v -= gam(l, i, j) * sj(l, k).v + gam(l, i, k) * sj(j, l).v;
          }
          out.push_back(v);
        }
      }
    }
    return out;
  });
}

TensorField covariant_derivative_11(const Connection& c,
                                    const TensorField& J) {
  if (J.valence() != Valence{1, 1}) {
    throw InvalidArgument("covariant_derivative_11 expects a (1,1) tensor");
  }
  if (J.chart() != c.chart()) {
    throw InvalidArgument("tensor lives on a different chart");
  }
  const int n = c.dim();
  std::vector<FieldPtr> comps;
  comps.reserve(static_cast<std::size_t>(n) * n * n);
  const auto jcomp = [&J](int a, int b) {
    const int idx[2] = {a, b};
    return J.component(std::span<const int>(idx, 2));
  };
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        FieldPtr f = partial(jcomp(k, j), i);
        for (int l = 0; l < n; ++l) {
          f = sum(f, product(c.coefficient(k, i, l), jcomp(l, j)));
          f = difference(f, product(c.coefficient(l, i, j), jcomp(k, l)));
        }
        comps.push_back(std::move(f));
      }
    }
  }
  TensorField t(c.chart(), Valence{1, 2}, std::move(comps));
  Connection cc = c;
  TensorField jj = J;
  return t.with_bulk([cc, jj, n](const Point& p) {
    const Tensor3 gam = cc.at(p);
    std::vector<Jet2> jets;
    jets.reserve(static_cast<std::size_t>(n) * n);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        const int idx[2] = {a, b};
        jets.push_back(jj.component(std::span<const int>(idx, 2))->jet(p));
      }
    }
    const auto jjet = [&jets, n](int a, int b) -> const Jet2& {
      return jets[static_cast<std::size_t>(a * n + b)];
    };
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n) * n * n);
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          double v = jjet(k, j).g[i];
          for (int l = 0; l < n; ++l) {
            v += gam(k, i, l) * jjet(l, j).v - gam(l, i, j) * jjet(k, l).v;
          }
          out.push_back(v);
        }
      }
    }
    return out;
  });
}

namespace {

Tensor4 curvature_at(const Connection& c, const Point& p) {
  const int n = c.dim();
  const ConnectionJets cj = c.jets_at(p);
  Tensor4 out(n);
  for (int l = 0; l < n; ++l) {
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          double v = cj.grad(l, j, k, i) - cj.grad(l, i, k, j);
          for (int m = 0; m < n; ++m) {
            v += cj.value(l, i, m) * cj.value(m, j, k) -
                 cj.value(l, j, m) * cj.value(m, i, k);
          }
          out(l, k, i, j) = v;
        }
      }
    }
  }
  return out;
}

}  // namespace

TensorField curvature(const Connection& c) {
  const int n = c.dim();
  Connection cc = c;
  std::vector<FieldPtr> comps;
  comps.reserve(static_cast<std::size_t>(n) * n * n * n);
  for (int l = 0; l < n; ++l) {
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          comps.push_back(numeric_field(
              n,
              [cc, l, k, i, j](const Point& p) {
                return curvature_at(cc, p)(l, k, i, j);
              }));
        }
      }
    }
  }
  TensorField t(c.chart(), Valence{1, 3}, std::move(comps));
  return t.with_bulk([cc](const Point& p) {
    Tensor4 r = curvature_at(cc, p);
    return std::move(r.a);
  });
}

TensorField ricci(const Connection& c) {
  const int n = c.dim();
  Connection cc = c;
  std::vector<FieldPtr> comps;
  comps.reserve(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      comps.push_back(numeric_field(n, [cc, j, k, n](const Point& p) {
        const Tensor4 r = curvature_at(cc, p);
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += r(i, j, i, k);
        return s;
      }));
    }
  }
  TensorField t(c.chart(), Valence{0, 2}, std::move(comps));
  return t.with_bulk([cc, n](const Point& p) {
    const Tensor4 r = curvature_at(cc, p);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += r(i, j, i, k);
        out.push_back(s);
      }
    }
    return out;
  });
}

TensorField exterior_derivative_2form(const TensorField& omega) {
  if (omega.valence() != Valence{0, 2} ||
      omega.symmetry() != TensorField::Symmetry::AntisymmetricPair) {
    throw InvalidArgument(
        "exterior_derivative_2form expects an antisymmetric (0,2) tensor");
  }
  const int n = omega.dim();
  const auto wcomp = [&omega](int a, int b) {
    const int idx[2] = {a, b};
    return omega.component(std::span<const int>(idx, 2));
  };
  std::vector<FieldPtr> comps;
  comps.reserve(static_cast<std::size_t>(n) * n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        FieldPtr f = partial(wcomp(j, k), i);
        f = difference(f, partial(wcomp(i, k), j));
        f = sum(f, partial(wcomp(i, j), k));
        comps.push_back(std::move(f));
      }
    }
  }
  TensorField t(omega.chart(), Valence{0, 3}, std::move(comps));
  TensorField w = omega;
  return t.with_bulk([w, n](const Point& p) {
    std::vector<Jet2> jets;
    jets.reserve(static_cast<std::size_t>(n) * n);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        const int idx[2] = {a, b};
        jets.push_back(w.component(std::span<const int>(idx, 2))->jet(p));
      }
    }
    const auto wj = [&jets, n](int a, int b) -> const Jet2& {
      return jets[static_cast<std::size_t>(a * n + b)];
    };
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n) * n * n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
          out.push_back(wj(j, k).g[i] - wj(i, k).g[j] + wj(i, j).g[k]);
        }
      }
    }
    return out;
  });
}

TensorField sharp(const Metric& g, const TensorField& theta) {
  if (theta.valence() != Valence{0, 1}) {
    throw InvalidArgument("sharp expects a one-form");
  }
  if (theta.chart() != g.chart()) {
    throw InvalidArgument("one-form lives on a different chart");
  }
  const int n = g.dim();
  std::vector<FieldPtr> comps;
  comps.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    FieldPtr f = zero_field(n);
    for (int j = 0; j < n; ++j) {
      const int idx[1] = {j};
      f = sum(f, product(g.inverse_component(i, j),
                         theta.component(std::span<const int>(idx, 1))));
    }
    comps.push_back(std::move(f));
  }
  return vector_field(g.chart(), std::move(comps));
}

TensorField flat(const Metric& g, const TensorField& X) {
  if (X.valence() != Valence{1, 0}) {
    throw InvalidArgument("flat expects a vector field");
  }
  if (X.chart() != g.chart()) {
    throw InvalidArgument("vector field lives on a different chart");
  }
  const int n = g.dim();
  std::vector<FieldPtr> comps;
  comps.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    FieldPtr f = zero_field(n);
    for (int j = 0; j < n; ++j) {
      const int idx[1] = {j};
      f = sum(f, product(g.component(i, j),
                         X.component(std::span<const int>(idx, 1))));
    }
    comps.push_back(std::move(f));
  }
  return one_form(g.chart(), std::move(comps));
}

}  // namespace defalg
