#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "defalg/catalog.hpp"
#include "defalg/errors.hpp"
#include "defalg/frobenius.hpp"
#include "defalg/rng.hpp"
#include "doctest.h"

using namespace defalg;
using namespace defalg::catalog;

namespace {

Chart box2(int samples = 16, std::uint64_t seed = 0) {
  return Chart(2, {{{0.2, 1.0}}, {{0.2, 1.0}}}, samples, seed);
}

Metric flat_metric(const Chart& chart) {
  const int n = chart.dim();
  std::vector<FieldPtr> comps;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      comps.push_back(i == j ? constant_field(n, 1.0) : zero_field(n));
    }
  }
  return Metric(chart, std::move(comps));
}

// g = diag(1 + x2^2, 1), a curved metric with closed-form Christoffels.
Metric surface_metric(const Chart& chart) {
  return Metric(chart, {expr_field("1+x2^2", 2), zero_field(2), zero_field(2),
                        constant_field(2, 1.0)});
}

TensorField const_one_form(const Chart& chart, const std::vector<double>& v) {
  const int n = chart.dim();
  std::vector<FieldPtr> comps;
  for (int i = 0; i < n; ++i) {
    comps.push_back(v[static_cast<std::size_t>(i)] == 0.0
                        ? zero_field(n)
                        : constant_field(n, v[static_cast<std::size_t>(i)]));
  }
  return one_form(chart, std::move(comps));
}

TensorField const_endo(const Chart& chart, const Eigen::MatrixXd& m) {
  const int n = chart.dim();
  std::vector<FieldPtr> comps;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      comps.push_back(m(i, j) == 0.0 ? zero_field(n)
                                     : constant_field(n, m(i, j)));
    }
  }
  return endomorphism_field(chart, std::move(comps));
}

// Block rotation acting as multiplication by i on (x1,x2) and (x3,x4).
Eigen::MatrixXd standard_J4() {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(4, 4);
  J(0, 1) = -1.0;
  J(1, 0) = 1.0;
  J(2, 3) = -1.0;
  J(3, 2) = 1.0;
  return J;
}

Tensor3 to_t3(const std::vector<double>& v, int n) {
  Tensor3 t(n);
  t.a = v;
  return t;
}

frobenius::PointwiseData point_data(const Metric& g, const TensorField& A,
                                    const Point& p) {
  return frobenius::PointwiseData{g.at(p), to_t3(A.values_at(p), g.dim())};
}

std::string verdict(const frobenius::Classification& c) {
  return std::string(frobenius::to_string(c.verdict));
}

}  // namespace

TEST_CASE("subgeodesic deformation: dual pairing decides the verdict") {
  const Chart chart = box2();
  const Metric g = flat_metric(chart);
  const TensorField theta = const_one_form(chart, {1.0, 0.0});

  // P = sharp(theta): the pairing partner equals theta and the cyclic
  // condition holds identically.
  const TensorField P = sharp(g, theta);
  const TensorField A = subgeodesic_A(g, theta, P);
  for (const Point& p : chart.points()) {
    CHECK(residual_2_2(theta, theta, g, p) == 0.0);
    CHECK(frobenius::cyclic_residual_raw(point_data(g, A, p)) == 0.0);
    CHECK(frobenius::commutativity_residual_raw(point_data(g, A, p)) == 0.0);
  }
  const auto cf = frobenius::classify(g, A, 1e-8);
  CHECK(verdict(cf) == "FORMAL");

  // P = sharp(2 theta): pairing partner 2 theta breaks the condition with
  // residual exactly 1 for theta = dx1 on the flat plane.
  const TensorField psi = const_one_form(chart, {2.0, 0.0});
  const TensorField P2 = sharp(g, psi);
  const TensorField A2 = subgeodesic_A(g, theta, P2);
  for (const Point& p : chart.points()) {
    CHECK(residual_2_2(theta, psi, g, p) == 1.0);
  }
  const auto cn = frobenius::classify(g, A2, 1e-8);
  CHECK(verdict(cn) == "NONE");
  // Normalization: raw defect 1, maxabs(A2) = 4 (the (1,1,1) slot is
  // 1 + 1 + 2), maxabs(g) = 1.
  CHECK(cn.cyclic.max_residual == doctest::Approx(0.2).epsilon(1e-12));

  // The dedicated residual agrees with the generic cyclic defect of the
  // assembled tensor on a curved metric too (two independent code paths).
  const Metric gs = surface_metric(chart);
  const TensorField theta_s = const_one_form(chart, {0.3, -0.2});
  const TensorField psi_s = const_one_form(chart, {0.1, 0.4});
  const TensorField A_s = subgeodesic_A(gs, theta_s, sharp(gs, psi_s));
  for (const Point& p : chart.points()) {
    const double direct = residual_2_2(theta_s, psi_s, gs, p);
    const double generic =
        frobenius::cyclic_residual_raw(point_data(gs, A_s, p));
    CHECK(direct == doctest::Approx(generic).epsilon(1e-12));
  }
  // And the matched pairing stays formal away from flat space.
  const TensorField A_f = subgeodesic_A(gs, theta_s, sharp(gs, theta_s));
  CHECK(verdict(frobenius::classify(gs, A_f, 1e-8)) == "FORMAL");
}

TEST_CASE("conformal rescaling: recipe equals connection subtraction") {
  const Chart chart = box2();
  const Metric g = flat_metric(chart);
  for (const char* expr : {"x1", "x1*x2", "sin(x1)"}) {
    const ConformalRoutes routes = conformal_routes(g, expr_field(expr, 2));
    for (const Point& p : chart.points()) {
      CHECK(max_component_gap(routes.recipe, routes.subtraction, p) <= 1e-6);
    }
  }
  // Same identity over a curved base metric.
  const Metric gs = surface_metric(chart);
  const ConformalRoutes curved = conformal_routes(gs, expr_field("x1", 2));
  for (const Point& p : chart.points()) {
    CHECK(max_component_gap(curved.recipe, curved.subtraction, p) <= 1e-6);
  }

  // The conformal deformation pairs theta with -theta, so it is never
  // cyclic: normalized residual exactly 1 for u = x1 on the flat plane.
  const ConformalRoutes flat_routes = conformal_routes(g, expr_field("x1", 2));
  const auto c = frobenius::classify(g, flat_routes.recipe, 1e-8);
  CHECK(verdict(c) == "NONE");
  CHECK(c.cyclic.max_residual == doctest::Approx(1.0).epsilon(1e-12));
  // Scaled metric really is e^{2u} g.
  const Point q = chart.points()[3];
  CHECK(flat_routes.scaled.at(q)(0, 0) ==
        doctest::Approx(std::exp(2.0 * q[0])).epsilon(1e-14));
}

TEST_CASE("paraboloid: fundamental forms, normal, and both deformation "
          "routes") {
  const Chart chart(2, {{{-0.8, 0.8}}, {{-0.8, 0.8}}}, 24);
  const Hypersurface h = hypersurface_forms(
      chart, {expr_field("x1", 2), expr_field("x2", 2),
              expr_field("(x1^2+x2^2)/2", 2)});

  for (const Point& p : chart.points()) {
    const double r2 = p.squaredNorm();
    const double root = std::sqrt(1.0 + r2);
    const Eigen::MatrixXd G = h.g.at(p);
    const std::vector<double> bv = h.b.values_at(p);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        const double want_g = (i == j ? 1.0 : 0.0) + p[i] * p[j];
        const double want_b = (i == j ? 1.0 : 0.0) / root;
        CHECK(G(i, j) == doctest::Approx(want_g).epsilon(1e-12));
        CHECK(bv[static_cast<std::size_t>(i * 2 + j)] ==
              doctest::Approx(want_b).scale(1.0).epsilon(1e-12));
      }
    }
    const Eigen::VectorXd N = hypersurface_normal(h, p);
    CHECK(N[0] == doctest::Approx(-p[0] / root).scale(1.0).epsilon(1e-12));
    CHECK(N[1] == doctest::Approx(-p[1] / root).scale(1.0).epsilon(1e-12));
    CHECK(N[2] == doctest::Approx(1.0 / root).epsilon(1e-12));
  }

  const TensorField nabla_b =
      covariant_derivative_02(levi_civita(h.g), h.b);
  for (const Point& p : chart.points()) {
    CHECK(codazzi_residual(nabla_b, p) <= 1e-7);
  }

  const TensorField A = hypersurface_A(h);
  const TensorField A_sub = hypersurface_A_by_subtraction(h);
  for (const Point& p : chart.points()) {
    CHECK(max_component_gap(A, A_sub, p) <= 1e-6);
  }
  const Metric b_metric(h.b, Metric::Requirement::Invertible);
  CHECK(verdict(frobenius::classify(b_metric, A, 1e-6)) == "FORMAL");

  // Shape operator route: A' = nabla J for J = g^{-1} b is symmetric and
  // self-adjoint, hence formal with respect to g.
  const TensorField J = shape_operator(h);
  const TensorField nj = nabla_J_A(h.g, J);
  for (const Point& p : chart.points()) {
    CHECK(residual_4_1(h.g, J, p) <= 1e-7);
    CHECK(residual_4_2(nj, p) <= 1e-7);
  }
  CHECK(verdict(frobenius::classify(h.g, nj, 1e-6)) == "FORMAL");
}

TEST_CASE("sphere: totally umbilic second form with oriented sign") {
  const double pi = std::numbers::pi;
  const Chart chart(2, {{{0.3, pi - 0.3}}, {{0.2, 6.0}}}, 32);
  const Hypersurface h = hypersurface_forms(
      chart, {expr_field("sin(x1)*cos(x2)", 2),
              expr_field("sin(x1)*sin(x2)", 2), expr_field("cos(x1)", 2)});

  // The determinant orientation picks the outward normal, so b = -g.
  for (const Point& p : chart.points()) {
    const Eigen::MatrixXd G = h.g.at(p);
    const std::vector<double> bv = h.b.values_at(p);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        CHECK(bv[static_cast<std::size_t>(i * 2 + j)] ==
              doctest::Approx(-G(i, j)).scale(1.0).epsilon(1e-10));
      }
    }
    CHECK(proportionality_coefficient(h.b, h.g, p) ==
          doctest::Approx(-1.0).epsilon(1e-10));
  }

  // nabla b = -nabla g = 0, so the deformation vanishes along both routes.
  const TensorField A = hypersurface_A(h);
  const TensorField A_sub = hypersurface_A_by_subtraction(h);
  for (const Point& p : chart.points()) {
    CHECK(A.max_abs_at(p) <= 1e-7);
    CHECK(max_component_gap(A, A_sub, p) <= 1e-6);
  }
}

TEST_CASE("ellipsoid: non-umbilic surface stays formal for its second form") {
  const double pi = std::numbers::pi;
  const Chart chart(2, {{{0.3, pi - 0.3}}, {{0.2, 6.0}}}, 24);
  const Hypersurface h = hypersurface_forms(
      chart, {expr_field("sin(x1)*cos(x2)", 2),
              expr_field("1.2*sin(x1)*sin(x2)", 2),
              expr_field("0.8*cos(x1)", 2)});

  const TensorField nabla_b =
      covariant_derivative_02(levi_civita(h.g), h.b);
  const TensorField A = hypersurface_A(h);
  const TensorField A_sub = hypersurface_A_by_subtraction(h);
  double max_abs = 0.0;
  for (const Point& p : chart.points()) {
    CHECK(codazzi_residual(nabla_b, p) <= 1e-7);
    CHECK(max_component_gap(A, A_sub, p) <= 1e-6);
    max_abs = std::max(max_abs, A.max_abs_at(p));
  }
  // Unlike the round sphere the deformation is genuinely nonzero.
  CHECK(max_abs > 0.01);
  const Metric b_metric(h.b, Metric::Requirement::Invertible);
  CHECK(verdict(frobenius::classify(b_metric, A, 1e-6)) == "FORMAL");
}

TEST_CASE("hypersurface degeneracies raise their own error types") {
  const Chart chart = box2(8);
  CHECK_THROWS_AS(
      hypersurface_forms(chart, {expr_field("x1", 2), expr_field("x1", 2),
                                 expr_field("x1^2/2", 2)}),
      DegenerateImmersion);

  // A plane has b = 0: the forms exist but the recipe cannot invert b.
  const Hypersurface plane = hypersurface_forms(
      chart, {expr_field("x1", 2), expr_field("x2", 2), zero_field(2)});
  CHECK_THROWS_AS(hypersurface_A(plane), DegenerateSecondForm);

  CHECK_THROWS_AS(hypersurface_forms(chart, {expr_field("x1", 2)}),
                  InvalidArgument);
}

TEST_CASE("codazzi residual flags a planted non-closing form") {
  const Chart chart = box2(8);
  const Metric g = flat_metric(chart);
  const TensorField S = bilinear_field(
      chart, {expr_field("x2", 2), zero_field(2), zero_field(2),
              zero_field(2)},
      TensorField::Symmetry::SymmetricPair);
  const TensorField ns = covariant_derivative_02(levi_civita(g), S);
  for (const Point& p : chart.points()) {
    CHECK(codazzi_residual(ns, p) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("self-adjoint operator pairs: recurrent fixture and validation") {
  const Chart chart = box2();
  const Metric g = flat_metric(chart);

  // J = e^{x1} id is recurrent with omega = dx1.
  const FieldPtr e1 = expr_field("exp(x1)", 2);
  const TensorField J = endomorphism_field(
      chart, {e1, zero_field(2), zero_field(2), e1});
  const SelfAdjointPair pair = selfadjoint_pair(g, J);
  const TensorField omega = const_one_form(chart, {1.0, 0.0});
  for (const Point& p : chart.points()) {
    CHECK(recurrence_gap(pair.nabla_J, J, omega, p) <= 1e-12);
    CHECK(residual_2_9(omega, g, p) == 1.0);
  }
  // A nonzero recurrence form forces the verdict to NONE.
  CHECK(verdict(frobenius::classify(g, pair.A, 1e-6)) == "NONE");
  // g-tilde really is e^{x1} g.
  const Point q = chart.points()[0];
  CHECK(pair.g_tilde.at(q)(0, 0) ==
        doctest::Approx(std::exp(q[0])).epsilon(1e-14));

  // Rejections: skew operators and negative ones.
  Eigen::MatrixXd skew(2, 2);
  skew << 1.0, 0.5, -0.5, 1.0;
  CHECK_THROWS_AS(selfadjoint_pair(g, const_endo(chart, skew)),
                  NotSelfAdjoint);
  CHECK_THROWS_AS(
      selfadjoint_pair(g, const_endo(chart,
                                     -Eigen::MatrixXd::Identity(2, 2))),
      NotPositive);
}

TEST_CASE("self-adjoint pairs: verdict is equivalent to the derivative "
          "condition residual") {
  const Chart chart = box2(12);
  const Metric g = flat_metric(chart);
  const Metric gs = surface_metric(chart);
  const FieldPtr sx = expr_field("sin(x1)", 2);
  const FieldPtr x2f = expr_field("x2", 2);

  int formal_seen = 0;
  int none_seen = 0;
  for (std::uint64_t seed = 0; seed < 7; ++seed) {
    const bool curved = seed >= 5;
    const Metric& base = curved ? gs : g;
    TensorField J = [&] {
      if (seed == 0) {
        // Identity operator: A = 0 exactly.
        return const_endo(chart, Eigen::MatrixXd::Identity(2, 2));
      }
      if (seed == 1) {
        // Constant multiple: the rescaled metric shares its Levi-Civita
        // connection, so A = 0 again.
        return const_endo(chart, 1.7 * Eigen::MatrixXd::Identity(2, 2));
      }
      // Random symmetric perturbation of the identity, lowered through the
      // base metric so the operator is self-adjoint by construction:
      // J = g^{-1} S with S = id + 0.1 (a + b sin(x1) + c x2), a,b,c
      // symmetric.
      Rng rng(seed * 97 + 5);
      std::vector<FieldPtr> scomp;
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) scomp.push_back(nullptr);
      }
      for (int i = 0; i < 2; ++i) {
        for (int j = i; j < 2; ++j) {
          FieldPtr f = constant_field(2, i == j ? 1.0 : 0.0);
          f = sum(f, scaled(0.1 * rng.uniform(-1.0, 1.0),
                            constant_field(2, 1.0)));
          f = sum(f, scaled(0.1 * rng.uniform(-1.0, 1.0), sx));
          f = sum(f, scaled(0.1 * rng.uniform(-1.0, 1.0), x2f));
          scomp[static_cast<std::size_t>(i * 2 + j)] = f;
          scomp[static_cast<std::size_t>(j * 2 + i)] = f;
        }
      }
      std::vector<FieldPtr> jcomp;
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          FieldPtr f = zero_field(2);
          for (int k = 0; k < 2; ++k) {
            f = sum(f, product(base.inverse_component(i, k),
                               scomp[static_cast<std::size_t>(k * 2 + j)]));
          }
          jcomp.push_back(std::move(f));
        }
      }
      return endomorphism_field(chart, std::move(jcomp));
    }();

    const SelfAdjointPair pair = selfadjoint_pair(base, J);
    double worst = 0.0;
    for (const Point& p : chart.points()) {
      worst = std::max(worst, residual_2_8(base, pair.nabla_J, p));
    }
    const auto c = frobenius::classify(pair.g_tilde, pair.A, 1e-8);
    const bool formal = c.verdict == frobenius::StructureClass::Formal;
    CHECK(formal == (worst <= 1e-8));
    formal_seen += formal ? 1 : 0;
    none_seen += formal ? 0 : 1;
  }
  // Both sides of the equivalence must actually occur in the sample.
  CHECK(formal_seen >= 2);
  CHECK(none_seen >= 2);
}

TEST_CASE("torsion-carrying connection: worked values on the simplest "
          "fixture") {
  const Chart chart = box2();
  const Metric g = flat_metric(chart);
  const TensorField theta = const_one_form(chart, {1.0, 0.0});
  const TensorField F =
      const_endo(chart, Eigen::MatrixXd::Identity(2, 2));
  const GolabData data = golab_connection(g, theta, F);
  CHECK(data.torsion_shape_verified);

  const Point p = chart.points()[0];
  const std::vector<double> av = data.A.values_at(p);
  const auto a = [&av](int k, int i, int j) {
    return av[static_cast<std::size_t>((k * 2 + i) * 2 + j)];
  };
  // A^k_ij = theta_j d^k_i - d_ij theta^k.
  CHECK(a(0, 0, 0) == 0.0);
  CHECK(a(1, 1, 0) == 1.0);
  CHECK(a(0, 1, 1) == -1.0);
  CHECK(a(1, 0, 1) == 0.0);

  // Torsion on the first pair of frame fields points along -e2.
  const TensorField T = torsion(data.connection);
  const std::vector<double> tv = T.values_at(p);
  CHECK(tv[static_cast<std::size_t>((1 * 2 + 0) * 2 + 1)] == -1.0);
  CHECK(tv[static_cast<std::size_t>((0 * 2 + 0) * 2 + 1)] == 0.0);

  // Worst raw cyclic defect is 2 (the slot pairing A^0_11 = -1 against
  // A^1_10 = +1); with maxabs(A) = maxabs(g) = 1 the normalized residual is
  // exactly 1.
  const auto c = frobenius::classify(g, data.A, 1e-9);
  CHECK(verdict(c) == "NONE");
  CHECK(c.cyclic.max_residual == doctest::Approx(1.0).epsilon(1e-12));
  for (const Point& q : chart.points()) {
    CHECK(frobenius::cyclic_residual_raw(point_data(g, data.A, q)) ==
          doctest::Approx(2.0).epsilon(1e-12));
    // The compatibility residual agrees with the generic cyclic defect of
    // the assembled deformation whenever S is symmetric.
    CHECK(residual_3_3(theta, data.S, q) ==
          doctest::Approx(2.0).epsilon(1e-12));
  }
}

TEST_CASE("torsion-carrying connection: random self-adjoint operators keep "
          "the prescribed torsion and metricity") {
  const Chart chart = box2(12);
  const int n = 2;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(700 + seed);
    const bool curved = seed % 2 == 0;
    const Metric g = curved ? surface_metric(chart) : flat_metric(chart);

    // Self-adjoint F = g^{-1} S with S a constant symmetric matrix.
    Eigen::MatrixXd S(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        S(i, j) = rng.uniform(-1.0, 1.0);
        S(j, i) = S(i, j);
      }
    }
    std::vector<FieldPtr> fcomp;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        FieldPtr f = zero_field(n);
        for (int k = 0; k < n; ++k) {
          f = sum(f, scaled(S(k, j), g.inverse_component(i, k)));
        }
        fcomp.push_back(std::move(f));
      }
    }
    const TensorField F = endomorphism_field(chart, fcomp);
    std::vector<double> tv = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    const TensorField theta = const_one_form(chart, tv);

    const GolabData data = golab_connection(g, theta, F);
    CHECK(data.torsion_shape_verified);
    double worst_compat = 0.0;
    double worst_torsion = 0.0;
    const TensorField T = torsion(data.connection);
    for (const Point& p : chart.points()) {
      worst_compat =
          std::max(worst_compat, compatibility_residual(data.connection, g, p));
      const std::vector<double> tor = T.values_at(p);
      const std::vector<double> fv = F.values_at(p);
      const std::vector<double> th = theta.values_at(p);
      for (int k = 0; k < n; ++k) {
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < n; ++j) {
            const double want =
                th[static_cast<std::size_t>(j)] *
                    fv[static_cast<std::size_t>(k * n + i)] -
                th[static_cast<std::size_t>(i)] *
                    fv[static_cast<std::size_t>(k * n + j)];
            const double got =
                tor[static_cast<std::size_t>((k * n + i) * n + j)];
            worst_torsion = std::max(worst_torsion, std::abs(got - want));
          }
        }
      }
    }
    CHECK(worst_compat <= 1e-8);
    CHECK(worst_torsion <= 1e-10);
  }
}

TEST_CASE("product-structure fixtures: all four sign pairs are rigid") {
  for (const int dim : {2, 4}) {
    const Chart chart(dim,
                      std::vector<std::array<double, 2>>(
                          static_cast<std::size_t>(dim), {{0.2, 1.0}}),
                      8);
    for (const int eps : {1, -1}) {
      for (const int lambda : {1, -1}) {
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
          Rng rng(seed * 31 + 11);
          const EpsilonLambdaFixture fx =
              epsilon_lambda_fixture(chart, eps, lambda, rng);
          const GolabData data = golab_connection(fx.g, fx.theta, fx.F);
          double worst = 0.0;
          for (const Point& p : chart.points()) {
            worst = std::max(worst, residual_3_3(fx.theta, data.S, p));
          }
          // No nonzero theta admits the compatibility identity for these
          // structures.
          CHECK(worst > 1e-3);
        }
      }
    }
  }
  Rng rng(1);
  const Chart bad(3, {{{0.2, 1.0}}, {{0.2, 1.0}}, {{0.2, 1.0}}}, 4);
  CHECK_THROWS_AS(epsilon_lambda_fixture(bad, 1, 1, rng), UnsupportedDim);
}

TEST_CASE("complex-structure projection: residual identity and projector "
          "algebra") {
  const Chart chart(4,
                    std::vector<std::array<double, 2>>(4, {{0.2, 1.0}}), 6);
  const Metric g = flat_metric(chart);
  const TensorField J = const_endo(chart, standard_J4());
  const int n = 4;

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(400 + seed);
    std::vector<FieldPtr> qcomp;
    const bool varying = seed >= 7;
    for (int i = 0; i < n * n * n; ++i) {
      FieldPtr f = constant_field(n, rng.uniform(-1.0, 1.0));
      if (varying) {
        f = sum(f, scaled(rng.uniform(-0.5, 0.5), expr_field("x1", 4)));
      }
      qcomp.push_back(std::move(f));
    }
    const TensorField Q(chart, Valence{1, 2}, std::move(qcomp));
    const TensorField A = kahler_Q_A(J, Q);

    // The dedicated residual is exactly twice the generic cyclic defect of
    // the projected tensor (two independent code paths).
    for (int s = 0; s < 3; ++s) {
      const Point& p = chart.points()[static_cast<std::size_t>(s)];
      const double direct = residual_3_19(g, J, Q, p);
      const double generic =
          frobenius::cyclic_residual_raw(point_data(g, A, p));
      CHECK(direct == doctest::Approx(2.0 * generic).epsilon(1e-12));
    }

    // Idempotence: projecting the projection changes nothing, and the
    // complementary part projects to zero.
    const TensorField AA = kahler_Q_A(J, A);
    std::vector<FieldPtr> kcomp;
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          const int idx[3] = {k, i, j};
          kcomp.push_back(
              difference(Q.component(std::span<const int>(idx, 3)),
                         A.component(std::span<const int>(idx, 3))));
        }
      }
    }
    const TensorField K(chart, Valence{1, 2}, std::move(kcomp));
    const TensorField AK = kahler_Q_A(J, K);
    const Point& p0 = chart.points()[0];
    CHECK(max_component_gap(AA, A, p0) <= 1e-12);
    CHECK(AK.max_abs_at(p0) <= 1e-12);
  }

  // A non-complex operator is rejected.
  CHECK_THROWS_AS(
      kahler_Q_A(const_endo(chart, Eigen::MatrixXd::Identity(4, 4)),
                 TensorField(chart, Valence{1, 2},
                             std::vector<FieldPtr>(
                                 static_cast<std::size_t>(n * n * n),
                                 zero_field(4)))),
      NotAlmostComplex);
}

TEST_CASE("Hermitian connections: flat structure gives zero deformations") {
  const Chart chart(4,
                    std::vector<std::array<double, 2>>(4, {{0.2, 1.0}}), 6);
  const Metric g = flat_metric(chart);
  const TensorField J = const_endo(chart, standard_J4());

  const HermitianData chern = chern_bismut_A(g, J, HermitianConnection::Chern);
  const HermitianData bismut =
      chern_bismut_A(g, J, HermitianConnection::Bismut);
  for (const Point& p : chart.points()) {
    CHECK(chern.A.max_abs_at(p) <= 1e-10);
    CHECK(bismut.A.max_abs_at(p) <= 1e-10);
    CHECK(residual_3_22(J, chern.d_omega, p) <= 1e-10);
    CHECK(residual_3_23(J, chern.d_omega, p) <= 1e-10);
  }
  // Omega lowers J: for the flat metric Omega = J with lowered indices.
  const Point q = chart.points()[0];
  const std::vector<double> wv = chern.omega.values_at(q);
  CHECK(wv[1] == -1.0);
  CHECK(wv[4] == 1.0);

  // Non-Hermitian pairs are rejected.
  const Metric bad =
      Metric(chart, [&] {
        std::vector<FieldPtr> comps;
        for (int i = 0; i < 4; ++i) {
          for (int j = 0; j < 4; ++j) {
            const double v = (i == j) ? (i == 0 ? 2.0 : 1.0) : 0.0;
            comps.push_back(v == 0.0 ? zero_field(4)
                                     : constant_field(4, v));
          }
        }
        return comps;
      }());
  CHECK_THROWS_AS(chern_bismut_A(bad, J, HermitianConnection::Chern),
                  NotHermitian);
}

TEST_CASE("Hermitian connections: conformally flat structure is locally "
          "conformally closed") {
  const Chart chart(4,
                    std::vector<std::array<double, 2>>(4, {{0.2, 1.0}}), 6);
  const FieldPtr factor = exp_of(expr_field("2*x1", 4));
  std::vector<FieldPtr> comps;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      comps.push_back(i == j ? factor : zero_field(4));
    }
  }
  const Metric g(chart, std::move(comps));
  const TensorField J = const_endo(chart, standard_J4());
  const HermitianData data = chern_bismut_A(g, J, HermitianConnection::Bismut);

  // dOmega = theta ^ Omega with theta = 2 dx1 (the derivative of the
  // conformal exponent), the defining closure property.
  const TensorField theta = const_one_form(chart, {2.0, 0.0, 0.0, 0.0});
  const TensorField wrong = const_one_form(chart, {0.0, 2.0, 0.0, 0.0});
  double nonzero = 0.0;
  for (const Point& p : chart.points()) {
    CHECK(lck_residual(data.d_omega, data.omega, theta, p) <= 1e-8);
    nonzero = std::max(nonzero,
                       lck_residual(data.d_omega, data.omega, wrong, p));
  }
  // The residual is a real measurement: a wrong candidate form fails.
  CHECK(nonzero > 0.1);

  // The skew-twisted deformation keeps the cyclic identity even off-Kahler.
  const auto c = frobenius::classify(g, data.A, 1e-6);
  CHECK(c.cyclic.pass);
  double worst_a = 0.0;
  for (const Point& p : chart.points()) {
    worst_a = std::max(worst_a, data.A.max_abs_at(p));
  }
  CHECK(worst_a > 0.1);
}

TEST_CASE("three-form shift evaluator sees a planted asymmetry") {
  Tensor3 t(2);
  t(0, 0, 1) = 0.5;
  CHECK(circular_shift_residual(t) == 0.5);
  Tensor3 z(3);
  CHECK(circular_shift_residual(z) == 0.0);
}

TEST_CASE("codifferential-form residuals behave as printed") {
  const Chart chart(4,
                    std::vector<std::array<double, 2>>(4, {{0.2, 1.0}}), 4);
  const Metric g = flat_metric(chart);
  const TensorField J = const_endo(chart, standard_J4());
  const HermitianData data = chern_bismut_A(g, J, HermitianConnection::Chern);
  const TensorField w = const_one_form(chart, {0.3, -0.7, 0.2, 0.0});
  const TensorField zero_w = const_one_form(chart, {0.0, 0.0, 0.0, 0.0});
  for (const Point& p : chart.points()) {
    // The circular-sum comparison is termwise identical as printed.
    CHECK(residual_3_25(w, data.omega, p) == 0.0);
    CHECK(residual_3_24(g, J, data.omega, zero_w, p) == 0.0);
    CHECK(std::isfinite(residual_3_24(g, J, data.omega, w, p)));
  }
}

TEST_CASE("cross products: dimensions three and seven are weak structures") {
  for (const int dim : {3, 7}) {
    const Tensor3 f = cross_product_A(dim);
    Eigen::MatrixXd id = Eigen::MatrixXd::Identity(dim, dim);
    frobenius::PointwiseData d{id, f};
    CHECK(frobenius::cyclic_residual_raw(d) == 0.0);
    CHECK(frobenius::commutativity_residual_raw(d) == 2.0);
    CHECK(frobenius::commutativity_residual(d) == 1.0);

    std::vector<frobenius::PointwiseData> ds = {d};
    std::vector<Point> ps = {Point::Zero(dim)};
    const auto c = frobenius::classify_points(ds, ps, 1e-10);
    CHECK(std::string(frobenius::to_string(c.verdict)) == "WEAK");
  }

  // Spot values: e1 x e2 = e3 in dimension 3, e1 x e2 = e4 in dimension 7.
  CHECK(cross_product_A(3)(2, 0, 1) == 1.0);
  CHECK(cross_product_A(7)(3, 0, 1) == 1.0);
  CHECK(cross_product_A(7)(3, 1, 0) == -1.0);

  CHECK_THROWS_AS(cross_product_A(4), UnsupportedDim);
  CHECK_THROWS_AS(cross_product_A(2), UnsupportedDim);
}

TEST_CASE("round sphere solves the proportionality fit exactly") {
  const double pi = std::numbers::pi;
  const Chart chart(2, {{{0.3, pi - 0.3}}, {{0.2, 6.0}}}, 48);
  const Metric g(chart, {constant_field(2, 1.0), zero_field(2), zero_field(2),
                         expr_field("sin(x1)^2", 2)});

  const EinsteinFit fit = einstein_2d(g);
  CHECK(std::abs(fit.lambda - 1.0) <= 1e-4);
  CHECK(fit.max_gap <= 1e-4);
  CHECK(fit.max_deformation <= 1e-4);

  const Connection lc = levi_civita(g);
  const TensorField nr = covariant_derivative_02(lc, ricci(lc));
  for (const Point& p : chart.points()) {
    CHECK(ricci_codazzi_residual(nr, p) <= 1e-5);
  }

  CHECK_THROWS_AS(einstein_2d(flat_metric(Chart(
                      3, std::vector<std::array<double, 2>>(3, {{0.2, 1.0}}),
                      4))),
                  UnsupportedDim);
}
