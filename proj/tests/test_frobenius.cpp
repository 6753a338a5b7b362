#include <cmath>
#include <string>
#include <vector>

#include "defalg/field.hpp"
#include "defalg/frobenius.hpp"
#include "defalg/tensor.hpp"
#include "doctest.h"

using namespace defalg;
using namespace defalg::frobenius;

namespace {

Chart plane(int samples = 24) {
  return Chart(2, {{{-1.0, 1.0}}, {{-1.0, 1.0}}}, samples);
}

Metric euclidean(const Chart& chart) {
  const int n = chart.dim();
  std::vector<FieldPtr> comps;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      comps.push_back(i == j ? constant_field(n, 1.0) : zero_field(n));
    }
  }
  return Metric(chart, std::move(comps));
}

}  // namespace

TEST_CASE("single nonzero entry gives normalized cyclic residual 1/2") {
  // A^1_22 = 1, g the Euclidean metric on the plane. The only nonzero
  // pairing defects are |g(A(e2,e2),e1) - g(e2,A(e2,e1))| = 1 and its
  // mirror, so the raw residual is 1; the scale normalization divides by
  // 1 + 1*1 = 2.
  PointwiseData d;
  d.g = Eigen::MatrixXd::Identity(2, 2);
  d.A = Tensor3(2);
  d.A(0, 1, 1) = 1.0;
  CHECK(cyclic_residual_raw(d) == 1.0);
  CHECK(cyclic_residual(d) == 0.5);
  // That entry is symmetric in the lower pair.
  CHECK(commutativity_residual_raw(d) == 0.0);
}

TEST_CASE("cyclic failure forces verdict NONE regardless of commutativity") {
  PointwiseData d;
  d.g = Eigen::MatrixXd::Identity(2, 2);
  d.A = Tensor3(2);
  d.A(0, 1, 1) = 1.0;  // symmetric but not cyclic
  const std::vector<PointwiseData> data = {d};
  const std::vector<Point> where = {Point::Zero(2)};
  const Classification c = classify_points(data, where, 1e-9);
  CHECK(c.verdict == StructureClass::None);
  CHECK(c.cyclic.pass == false);
  CHECK(c.commutativity.pass == true);
  CHECK(std::string(to_string(c.verdict)) == "NONE");
}

TEST_CASE("cross product against the Euclidean metric is weak only") {
  // A(X,Y) = X x Y on R^3: g(A(X,Y),Z) is the determinant, fully
  // antisymmetric, so cyclic invariance holds exactly while commutativity
  // fails maximally.
  const Chart chart(3, {{{-1.0, 1.0}}, {{-1.0, 1.0}}, {{-1.0, 1.0}}}, 8);
  const Metric g = euclidean(chart);
  std::vector<FieldPtr> comps(27, zero_field(3));
  const auto put = [&](int k, int i, int j, double v) {
    comps[static_cast<std::size_t>((k * 3 + i) * 3 + j)] =
        constant_field(3, v);
  };
  put(0, 1, 2, 1.0);
  put(0, 2, 1, -1.0);
  put(1, 2, 0, 1.0);
  put(1, 0, 2, -1.0);
  put(2, 0, 1, 1.0);
  put(2, 1, 0, -1.0);
  const TensorField A(chart, Valence{1, 2}, std::move(comps));
  const Classification c = classify(g, A, 1e-9);
  CHECK(c.verdict == StructureClass::Weak);
  CHECK(c.cyclic.max_residual == 0.0);
  // Raw commutativity defect is 2, normalized by 1 + 1*1.
  CHECK(c.commutativity.max_residual == 1.0);
  CHECK(c.cyclic.samples == 8);
  CHECK(std::string(to_string(c.verdict)) == "WEAK");
}

TEST_CASE("formal verdict when both residuals vanish") {
  // A^k_ij = theta_i delta^k_j + theta_j delta^k_i + delta_ij theta_k with
  // constant theta and the Euclidean metric: the lowered tensor
  // g(A(X_i,X_j),X_k) is fully symmetric in (i,j,k), so cyclic invariance
  // and commutativity both hold exactly.
  const Chart chart = plane();
  const Metric g = euclidean(chart);
  const double t1 = 0.7, t2 = -0.3;
  std::vector<FieldPtr> comps(8, zero_field(2));
  const auto put = [&](int k, int i, int j, double v) {
    const std::size_t at = static_cast<std::size_t>((k * 2 + i) * 2 + j);
    comps[at] = sum(comps[at], constant_field(2, v));
  };
  const double theta[2] = {t1, t2};
  for (int k = 0; k < 2; ++k) {
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        double v = 0.0;
        if (k == j) v += theta[i];
        if (k == i) v += theta[j];
        if (i == j) v += theta[k];
        if (v != 0.0) put(k, i, j, v);
      }
    }
  }
  const TensorField A(chart, Valence{1, 2}, std::move(comps),
                      TensorField::Symmetry::SymmetricPair);
  const Classification c = classify(g, A, 1e-9);
  CHECK(c.verdict == StructureClass::Formal);
  CHECK(c.cyclic.max_residual < 1e-15);
  CHECK(c.commutativity.max_residual == 0.0);
  CHECK(std::string(to_string(c.verdict)) == "FORMAL");
}

TEST_CASE("normalization denominator uses both scales") {
  PointwiseData d;
  d.g = 10.0 * Eigen::MatrixXd::Identity(2, 2);
  d.A = Tensor3(2);
  d.A(0, 1, 1) = 4.0;
  // raw = |A^1_11 g_11 - A^1_11 g_11| candidates: the (1,1,0) triple gives
  // |A^l_22 g_l1 - A^l_21 g_2l| = |4*10 - 0| = 40; denominator 1 + 10*4.
  CHECK(cyclic_residual_raw(d) == 40.0);
  CHECK(cyclic_residual(d) == doctest::Approx(40.0 / 41.0).epsilon(1e-15));
}

TEST_CASE("check reports track worst point and mean") {
  CheckReport r = make_upper_check("demo", 1e-3);
  const Point p1 = (Point(1) << 1.0).finished();
  const Point p2 = (Point(1) << 2.0).finished();
  const Point p3 = (Point(1) << 3.0).finished();
  record_sample(r, 1e-5, p1);
  record_sample(r, 5e-4, p2);
  record_sample(r, 2e-4, p3);
  finalize(r);
  CHECK(r.samples == 3);
  CHECK(r.max_residual == 5e-4);
  REQUIRE(r.worst_point.has_value());
  CHECK((*r.worst_point)[0] == 2.0);
  CHECK(r.mean_residual == doctest::Approx((1e-5 + 5e-4 + 2e-4) / 3));
  CHECK(r.pass);

  record_sample(r, 2e-3, p1);
  finalize(r);
  CHECK_FALSE(r.pass);

  // Lower bounds pass when the residual stays large.
  CheckReport lo = make_upper_check("rigidity", 0.1);
  lo.bound = "lower";
  record_sample(lo, 0.5, p1);
  finalize(lo);
  CHECK(lo.pass);
  lo.tolerance = 0.9;
  finalize(lo);
  CHECK_FALSE(lo.pass);
}

TEST_CASE("pairwise mean is exact on short runs and stable on long ones") {
  const std::vector<double> xs = {1.0, 2.0, 3.0, 4.0};
  CHECK(pairwise_mean(xs) == 2.5);
  CHECK(pairwise_mean(std::vector<double>{7.0}) == 7.0);
  CHECK(pairwise_mean(std::vector<double>{}) == 0.0);

  // 10^5 copies of 0.1: naive summation drifts at 1e-12, pairwise stays
  // within a few ulps of 0.1.
  const std::vector<double> many(100000, 0.1);
  CHECK(std::abs(pairwise_mean(many) - 0.1) < 1e-15);
}

TEST_CASE("classification requires matching chart and valence") {
  const Chart chart = plane(8);
  const Metric g = euclidean(chart);
  std::vector<FieldPtr> bad(4, zero_field(2));
  const TensorField wrong_valence(chart, Valence{0, 2}, std::move(bad));
  CHECK_THROWS_AS(classify(g, wrong_valence, 1e-9), InvalidArgument);

  const Chart other = plane(16);
  std::vector<FieldPtr> comps(8, zero_field(2));
  const TensorField mismatched(other, Valence{1, 2}, std::move(comps));
  CHECK_THROWS_AS(classify(g, mismatched, 1e-9), InvalidArgument);
}
