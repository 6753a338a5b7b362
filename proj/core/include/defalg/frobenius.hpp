#pragma once

#include <optional>
#include <span>
#include <string>

#include "defalg/connection.hpp"
#include "defalg/metric.hpp"

namespace defalg::frobenius {

// Metric and deformation-tensor values at one point; A(k,i,j) = A^k_ij.
struct PointwiseData {
  Eigen::MatrixXd g;
  Tensor3 A;
};

// Cyclic-invariance defect: max over index triples of
//   | sum_l A^l_ij g_lk - sum_l A^l_jk g_il |,
// i.e. | g(A(X_i,X_j), X_k) - g(X_i, A(X_j,X_k)) | on basis vectors.
double cyclic_residual_raw(const PointwiseData& d);

// Commutativity defect: max |A^k_ij - A^k_ji|.
double commutativity_residual_raw(const PointwiseData& d);

// Scale-normalized residuals: raw / (1 + maxabs(g) * maxabs(A)).
double cyclic_residual(const PointwiseData& d);
double commutativity_residual(const PointwiseData& d);

// FORMAL: cyclic invariance and commutativity both hold.
// WEAK:   cyclic invariance holds, commutativity fails.
// NONE:   cyclic invariance fails (commutativity is then irrelevant).
enum class StructureClass { Formal, Weak, None };

const char* to_string(StructureClass c);

// One residual check aggregated over sample points. `bound` selects the
// pass direction: "upper" passes when max_residual <= tolerance, "lower"
// when max_residual >= tolerance (used by rigidity/negative checks).
struct CheckReport {
  std::string name;
  double max_residual = 0.0;
  double mean_residual = 0.0;
  std::optional<Point> worst_point;
  int samples = 0;
  double tolerance = 0.0;
  std::string bound = "upper";
  bool pass = false;
  std::string note;
};

CheckReport make_upper_check(std::string name, double tolerance);

// Records one sample into a report under construction (running max/mean).
void record_sample(CheckReport& r, double residual, const Point& p);

// Finalizes pass/fail from the bound direction.
void finalize(CheckReport& r);

struct Classification {
  StructureClass verdict = StructureClass::None;
  CheckReport cyclic;
  CheckReport commutativity;
};

// Classification from precomputed pointwise data (used by frame-based
// callers that have no chart).
Classification classify_points(std::span<const PointwiseData> data,
                               std::span<const Point> where, double tol);

// Classification of (M, g, A) over the metric chart's sample set.
Classification classify(const Metric& g, const TensorField& A, double tol);

// Mean with pairwise summation (stable for long sample runs).
double pairwise_mean(std::span<const double> xs);

}  // namespace defalg::frobenius
