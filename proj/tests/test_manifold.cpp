#include <cmath>
#include <numbers>

#include "defalg/connection.hpp"
#include "defalg/errors.hpp"
#include "defalg/field.hpp"
#include "defalg/metric.hpp"
#include "defalg/tensor.hpp"
#include "doctest.h"

using namespace defalg;

namespace {

Chart unit_square(int samples = 32, std::uint64_t seed = 0) {
  return Chart(2, {{{-1.0, 1.0}}, {{-1.0, 1.0}}}, samples, seed);
}

// g = diag(1 + x2^2, 1): Levi-Civita coefficients in closed form are
// Gamma^1_12 = Gamma^1_21 = x2/(1+x2^2), Gamma^2_11 = -x2, rest zero.
Metric surface_metric(const Chart& chart) {
  return Metric(chart, {expr_field("1+x2^2", 2), zero_field(2), zero_field(2),
                        constant_field(2, 1.0)});
}

}  // namespace

TEST_CASE("chart sampling is deterministic and respects margins") {
  const Chart a = unit_square(64, 3);
  const Chart b = unit_square(64, 3);
  REQUIRE(a.points().size() == 64);
  for (std::size_t i = 0; i < a.points().size(); ++i) {
    CHECK((a.points()[i] - b.points()[i]).norm() == 0.0);
  }
  CHECK(a == b);

  // Margin keeps all points at least 5% of the interval away from the edge.
  for (const Point& p : a.points()) {
    CHECK(p[0] >= -0.9);
    CHECK(p[0] <= 0.9);
    CHECK(p[1] >= -0.9);
    CHECK(p[1] <= 0.9);
  }

  const Chart c = unit_square(64, 4);
  CHECK(c != a);
  CHECK((c.points()[0] - a.points()[0]).norm() > 0.0);

  CHECK(halton(1, 2) == 0.5);
  CHECK(halton(2, 2) == 0.25);
  CHECK(halton(3, 2) == 0.75);
  CHECK(halton(1, 3) == doctest::Approx(1.0 / 3.0));

  CHECK_THROWS_AS(Chart(0, {}, 8), InvalidArgument);
  CHECK_THROWS_AS(Chart(1, {{{1.0, 0.0}}}, 8), InvalidArgument);
  CHECK_THROWS_AS(Chart(1, {{{0.0, 1.0}}}, 0), InvalidArgument);
  CHECK_THROWS_AS(Chart(1, {{{0.0, 1.0}}}, 8, 0, 0.7), InvalidArgument);
}

TEST_CASE("field combinators propagate exact jets") {
  const FieldPtr f = expr_field("sin(x1)*x2", 2);
  const FieldPtr g = expr_field("x1^2+x2", 2);
  const FieldPtr combo = sum(product(f, g), scaled(2.0, negated(f)));
  const FieldPtr direct = expr_field("sin(x1)*x2*(x1^2+x2)-2*(sin(x1)*x2)", 2);
  const Point p = (Point(2) << 0.7, -0.4).finished();
  const Jet2 a = combo->jet(p);
  const Jet2 b = direct->jet(p);
  CHECK(a.v == doctest::Approx(b.v).epsilon(1e-14));
  CHECK((a.g - b.g).norm() == doctest::Approx(0.0).scale(1).epsilon(1e-13));
  CHECK((a.h - b.h).norm() == doctest::Approx(0.0).scale(1).epsilon(1e-13));

  // Zero-field propagation gives exact zeros, not tiny numbers.
  CHECK(is_zero_field(product(zero_field(2), f)));
  CHECK(is_zero_field(scaled(0.0, f)));
  CHECK(sum(zero_field(2), f) == f);

  // exp_of matches the expression form exactly.
  const FieldPtr ef = exp_of(expr_field("2*x1", 2));
  const FieldPtr eg = expr_field("exp(2*x1)", 2);
  CHECK(ef->jet(p).v == eg->jet(p).v);
  CHECK((ef->jet(p).g - eg->jet(p).g).norm() == 0.0);
}

TEST_CASE("numeric fields fall back to finite differences") {
  const FieldPtr exact = expr_field("exp(x1)*sin(x2)", 2);
  const FieldPtr fd = numeric_field(2, [](const Point& p) {
    return std::exp(p[0]) * std::sin(p[1]);
  });
  const FieldPtr semi = numeric_field(
      2, [](const Point& p) { return std::exp(p[0]) * std::sin(p[1]); },
      [](const Point& p) {
        return (Eigen::VectorXd(2) << std::exp(p[0]) * std::sin(p[1]),
                std::exp(p[0]) * std::cos(p[1]))
            .finished();
      });
  const Point p = (Point(2) << 0.3, 0.8).finished();
  const Jet2 je = exact->jet(p);
  const Jet2 jf = fd->jet(p);
  const Jet2 js = semi->jet(p);
  CHECK(jf.v == je.v);
  CHECK((jf.g - je.g).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((jf.h - je.h).cwiseAbs().maxCoeff() < 1e-6);
  // Exact gradient callable: gradient matches to rounding, Hessian to FD.
  CHECK((js.g - je.g).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((js.h - je.h).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("partial derivative fields read the parent jet") {
  const FieldPtr f = expr_field("x1^3*x2^2", 2);
  const FieldPtr d1 = partial(f, 0);
  const FieldPtr d2 = expr_field("3*x1^2*x2^2", 2);
  const Point p = (Point(2) << 1.25, -0.5).finished();
  CHECK(d1->value(p) == d2->value(p));
  const Jet2 a = d1->jet(p);
  const Jet2 b = d2->jet(p);
  CHECK(a.v == b.v);
  CHECK((a.g - b.g).cwiseAbs().maxCoeff() == 0.0);
  // Hessian of the derivative field is finite-differenced third-order data.
  CHECK((a.h - b.h).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("tensor symmetry flags are enforced and canonicalized") {
  const Chart chart = unit_square();
  // Mismatched mirror components must be rejected.
  CHECK_THROWS_AS(
      bilinear_field(chart,
                     {constant_field(2, 1.0), constant_field(2, 0.5),
                      constant_field(2, 0.25), constant_field(2, 1.0)},
                     TensorField::Symmetry::SymmetricPair),
      InvalidArgument);
  // Accepted symmetric input shares the canonical component exactly.
  const TensorField s =
      bilinear_field(chart,
                     {expr_field("x1", 2), expr_field("x1*x2", 2),
                      expr_field("x2*x1", 2), constant_field(2, 1.0)},
                     TensorField::Symmetry::SymmetricPair);
  CHECK(s.component({0, 1}) == s.component({1, 0}));

  const TensorField w =
      bilinear_field(chart,
                     {zero_field(2), expr_field("x1", 2),
                      expr_field("-x1", 2), zero_field(2)},
                     TensorField::Symmetry::AntisymmetricPair);
  const Point p = chart.points()[5];
  CHECK(w.component({0, 0})->value(p) == 0.0);
  CHECK(w.component({0, 1})->value(p) == -w.component({1, 0})->value(p));

  // Antisymmetric diagonals are forced to the exact zero field.
  CHECK(is_zero_field(w.component({1, 1})));
}

TEST_CASE("metric validates its requirement at every sample point") {
  const Chart chart = unit_square();
  CHECK_NOTHROW(surface_metric(chart));

  // diag(x1, 1) changes sign inside the box.
  CHECK_THROWS_AS(Metric(chart, {expr_field("x1", 2), zero_field(2),
                                 zero_field(2), constant_field(2, 1.0)}),
                  SingularMetric);

  // Indefinite metrics need the Invertible requirement.
  const std::vector<FieldPtr> lorentz = {constant_field(2, 1.0), zero_field(2),
                                         zero_field(2),
                                         constant_field(2, -1.0)};
  CHECK_THROWS_AS(Metric(chart, lorentz), SingularMetric);
  CHECK_NOTHROW(Metric(chart, lorentz, Metric::Requirement::Invertible));

  const Metric g = surface_metric(chart);
  const Point p = chart.points()[3];
  const Eigen::MatrixXd inv = g.inverse_at(p);
  CHECK(inv(0, 0) == doctest::Approx(1.0 / (1.0 + p[1] * p[1])).epsilon(1e-14));
  CHECK(inv(1, 1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(inv(0, 1) == doctest::Approx(0.0).scale(1).epsilon(1e-14));
  CHECK(g.sample_inverses().size() == chart.points().size());
}

TEST_CASE("inverse metric components carry exact jets") {
  const Chart chart = unit_square();
  const Metric g = surface_metric(chart);
  // g^{11} = 1/(1+x2^2) in closed form.
  const FieldPtr inv00 = g.inverse_component(0, 0);
  const FieldPtr closed = expr_field("1/(1+x2^2)", 2);
  for (int s = 0; s < 8; ++s) {
    const Point& p = chart.points()[static_cast<std::size_t>(s)];
    const Jet2 a = inv00->jet(p);
    const Jet2 b = closed->jet(p);
    CHECK(a.v == doctest::Approx(b.v).epsilon(1e-14));
    CHECK((a.g - b.g).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((a.h - b.h).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("Levi-Civita matches closed-form coefficients") {
  const Chart chart = unit_square();
  const Metric g = surface_metric(chart);
  const Connection lc = levi_civita(g);
  CHECK(lc.symmetric_lower());
  for (const Point& p : chart.points()) {
    const Tensor3 gam = lc.at(p);
    const double y = p[1];
    CHECK(gam(0, 0, 1) == doctest::Approx(y / (1 + y * y)).epsilon(1e-14));
    CHECK(gam(0, 1, 0) == doctest::Approx(y / (1 + y * y)).epsilon(1e-14));
    CHECK(gam(1, 0, 0) == doctest::Approx(-y).epsilon(1e-14));
    CHECK(gam(0, 0, 0) == doctest::Approx(0.0).scale(1).epsilon(1e-14));
    CHECK(gam(1, 1, 1) == doctest::Approx(0.0).scale(1).epsilon(1e-14));
    // Compatibility residual at every sample point.
    CHECK(compatibility_residual(lc, g, p) < 1e-12);
  }

  // Torsion of a symmetric connection is the exact zero tensor.
  const TensorField t = torsion(lc);
  for (int k = 0; k < 2; ++k) {
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        CHECK(is_zero_field(t.component({k, i, j})));
      }
    }
  }
}

TEST_CASE("analytic coefficient derivatives agree with expression jets") {
  const Chart chart = unit_square();
  const Metric g = surface_metric(chart);
  const Connection lc = levi_civita(g);

  // The same connection written out as expression coefficient fields.
  std::vector<FieldPtr> gamma(8, zero_field(2));
  const auto at = [](int k, int i, int j) { return (k * 2 + i) * 2 + j; };
  gamma[static_cast<std::size_t>(at(0, 0, 1))] =
      expr_field("x2/(1+x2^2)", 2);
  gamma[static_cast<std::size_t>(at(0, 1, 0))] =
      expr_field("x2/(1+x2^2)", 2);
  gamma[static_cast<std::size_t>(at(1, 0, 0))] = expr_field("-x2", 2);
  const Connection byexpr =
      Connection::from_fields(chart, std::move(gamma), true);

  for (int s = 0; s < 16; ++s) {
    const Point& p = chart.points()[static_cast<std::size_t>(s)];
    const ConnectionJets a = lc.jets_at(p);
    const ConnectionJets b = byexpr.jets_at(p);
    double dv = 0.0, dgrad = 0.0;
    for (std::size_t q = 0; q < a.value.a.size(); ++q) {
      dv = std::max(dv, std::abs(a.value.a[q] - b.value.a[q]));
    }
    for (std::size_t q = 0; q < a.grad.a.size(); ++q) {
      dgrad = std::max(dgrad, std::abs(a.grad.a[q] - b.grad.a[q]));
    }
    CHECK(dv < 1e-13);
    CHECK(dgrad < 1e-12);
  }
}

TEST_CASE("finite-difference coefficient derivatives crosscheck analytic") {
  const Chart chart = unit_square();
  const Metric g = surface_metric(chart);
  const Connection lc = levi_civita(g);

  // The same coefficients wrapped as plain numeric callables: jets_at then
  // uses central differences internally.
  std::vector<FieldPtr> gamma(8, zero_field(2));
  const auto at = [](int k, int i, int j) { return (k * 2 + i) * 2 + j; };
  const auto w = [](const Point& p) { return p[1] / (1 + p[1] * p[1]); };
  gamma[static_cast<std::size_t>(at(0, 0, 1))] = numeric_field(2, w);
  gamma[static_cast<std::size_t>(at(0, 1, 0))] = numeric_field(2, w);
  gamma[static_cast<std::size_t>(at(1, 0, 0))] =
      numeric_field(2, [](const Point& p) { return -p[1]; });
  const Connection fd = Connection::from_fields(chart, std::move(gamma), true);

  for (int s = 0; s < 8; ++s) {
    const Point& p = chart.points()[static_cast<std::size_t>(s)];
    const ConnectionJets a = lc.jets_at(p);
    const ConnectionJets b = fd.jets_at(p);
    for (std::size_t q = 0; q < a.grad.a.size(); ++q) {
      CHECK(a.grad.a[q] ==
            doctest::Approx(b.grad.a[q]).scale(1.0).epsilon(1e-6));
    }
  }
}

TEST_CASE("flat metrics have exactly vanishing curvature") {
  const Chart chart = unit_square();
  const Metric flat(chart, {constant_field(2, 1.0), zero_field(2),
                            zero_field(2), constant_field(2, 1.0)});
  const Connection lc = levi_civita(flat);
  const TensorField r = curvature(lc);
  for (int s = 0; s < 8; ++s) {
    const Point& p = chart.points()[static_cast<std::size_t>(s)];
    for (double v : r.values_at(p)) CHECK(v == 0.0);
  }
}

TEST_CASE("unit sphere satisfies Ric = g to jet accuracy") {
  // Chart (theta, phi) on the unit sphere, g = diag(1, sin^2 theta).
  const Chart chart(2, {{{0.3, std::numbers::pi - 0.3}}, {{0.2, 6.0}}}, 48);
  const Metric g(chart, {constant_field(2, 1.0), zero_field(2), zero_field(2),
                         expr_field("sin(x1)^2", 2)});
  const Connection lc = levi_civita(g);
  const TensorField ric = ricci(lc);
  double worst = 0.0;
  for (const Point& p : chart.points()) {
    const std::vector<double> rv = ric.values_at(p);
    const Eigen::MatrixXd gv = g.at(p);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        worst = std::max(worst,
                         std::abs(rv[static_cast<std::size_t>(i * 2 + j)] -
                                  gv(i, j)));
      }
    }
  }
  CHECK(worst < 1e-6);
  // With analytic coefficient derivatives the agreement is at rounding
  // level, far below the gate above.
  CHECK(worst < 1e-10);

  // Curvature antisymmetry in the last index pair.
  const TensorField r = curvature(lc);
  for (int s = 0; s < 8; ++s) {
    const Point& p = chart.points()[static_cast<std::size_t>(s)];
    const std::vector<double> rv = r.values_at(p);
    const auto comp = [&rv](int l, int k, int i, int j) {
      return rv[static_cast<std::size_t>(((l * 2 + k) * 2 + i) * 2 + j)];
    };
    for (int l = 0; l < 2; ++l) {
      for (int k = 0; k < 2; ++k) {
        for (int i = 0; i < 2; ++i) {
          for (int j = 0; j < 2; ++j) {
            CHECK(comp(l, k, i, j) == -comp(l, k, j, i));
          }
        }
      }
    }
  }
}

TEST_CASE("covariant derivative of the metric vanishes under Levi-Civita") {
  const Chart chart = unit_square();
  const Metric g = surface_metric(chart);
  const Connection lc = levi_civita(g);
  const TensorField nabla_g = covariant_derivative_02(lc, g.tensor());
  for (int s = 0; s < 16; ++s) {
    const Point& p = chart.points()[static_cast<std::size_t>(s)];
    for (double v : nabla_g.values_at(p)) {
      CHECK(std::abs(v) < 1e-13);
    }
  }
}

TEST_CASE("covariant derivative of the identity endomorphism vanishes") {
  const Chart chart = unit_square();
  const Metric g = surface_metric(chart);
  const Connection lc = levi_civita(g);
  const TensorField id = endomorphism_field(
      chart, {constant_field(2, 1.0), zero_field(2), zero_field(2),
              constant_field(2, 1.0)});
  const TensorField nabla_id = covariant_derivative_11(lc, id);
  for (int s = 0; s < 16; ++s) {
    const Point& p = chart.points()[static_cast<std::size_t>(s)];
    for (double v : nabla_id.values_at(p)) CHECK(v == 0.0);
  }
}

TEST_CASE("exterior derivative of a 2-form is totally antisymmetric") {
  const Chart chart(3, {{{-1.0, 1.0}}, {{-1.0, 1.0}}, {{-1.0, 1.0}}}, 16);
  // W = x3 dx1 ^ dx2 (as a matrix: W_12 = x3 = -W_21).
  std::vector<FieldPtr> comps(9, zero_field(3));
  comps[1] = expr_field("x3", 3);   // W_12
  comps[3] = expr_field("-x3", 3);  // W_21
  const TensorField w(chart, Valence{0, 2}, std::move(comps),
                      TensorField::Symmetry::AntisymmetricPair);
  const TensorField dw = exterior_derivative_2form(w);
  const Point p = chart.points()[2];
  const std::vector<double> v = dw.values_at(p);
  const auto comp = [&v](int i, int j, int k) {
    return v[static_cast<std::size_t>((i * 3 + j) * 3 + k)];
  };
  // dW = dx3 ^ dx1 ^ dx2 = dx1 ^ dx2 ^ dx3.
  CHECK(comp(0, 1, 2) == 1.0);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < 3; ++k) {
        CHECK(comp(i, j, k) == -comp(j, i, k));
        CHECK(comp(i, j, k) == -comp(i, k, j));
      }
    }
  }
}

TEST_CASE("sharp and flat are mutually inverse") {
  const Chart chart = unit_square();
  const Metric g = surface_metric(chart);
  const TensorField theta =
      one_form(chart, {expr_field("x1+x2", 2), expr_field("sin(x1)", 2)});
  const TensorField back = flat(g, sharp(g, theta));
  for (int s = 0; s < 16; ++s) {
    const Point& p = chart.points()[static_cast<std::size_t>(s)];
    const std::vector<double> a = theta.values_at(p);
    const std::vector<double> b = back.values_at(p);
    for (std::size_t q = 0; q < a.size(); ++q) {
      CHECK(a[q] == doctest::Approx(b[q]).epsilon(1e-13));
    }
  }
}

TEST_CASE("deformation between connections is the coefficient difference") {
  const Chart chart = unit_square();
  const Metric g = surface_metric(chart);
  const Connection lc = levi_civita(g);
  const Connection flat_conn =
      Connection::constant(chart, Tensor3(2), true);
  const TensorField a = deformation(flat_conn, lc);
  for (int s = 0; s < 8; ++s) {
    const Point& p = chart.points()[static_cast<std::size_t>(s)];
    const Tensor3 gam = lc.at(p);
    const std::vector<double> av = a.values_at(p);
    for (std::size_t q = 0; q < av.size(); ++q) {
      CHECK(av[q] == gam.a[q]);
    }
  }
  // Deforming back recovers the Levi-Civita coefficients.
  const Connection again = deform(flat_conn, a);
  for (int s = 0; s < 8; ++s) {
    const Point& p = chart.points()[static_cast<std::size_t>(s)];
    const Tensor3 x = lc.at(p);
    const Tensor3 y = again.at(p);
    for (std::size_t q = 0; q < x.a.size(); ++q) CHECK(x.a[q] == y.a[q]);
  }
  // The deformation of a connection against itself is exactly zero.
  const TensorField self = deformation(lc, lc);
  for (int k = 0; k < 2; ++k) {
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        CHECK(is_zero_field(self.component({k, i, j})));
      }
    }
  }
}
