#pragma once

#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "defalg/connection.hpp"

namespace defalg::dynamics {

// Right-hand side of an autonomous-or-not first-order system y' = f(t, y).
using Rhs = std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>;

struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
};

// Classical fixed-step fourth-order Runge-Kutta from t0 to t1. The final
// step is shortened to land exactly on t1. Every stride-th state is
// recorded, always including the initial and final ones. A non-finite
// state component aborts with NonFiniteState carrying the time reached.
Trajectory rk4_integrate(const Rhs& f, const Eigen::VectorXd& y0, double t0,
                         double t1, double step, int stride = 1);

// Second-order autoparallel system of a connection, as a first-order RHS
// on the stacked state (x, v):  x' = v,  v'^k = -Gamma^k_ij v^i v^j.
Rhs autoparallel(const Connection& conn);

Eigen::VectorXd stack_state(const Point& x, const Point& v);

// max_t |F(y(t)) - F(y(0))| over the recorded states.
double first_integral_drift(
    const Trajectory& traj,
    const std::function<double(const Eigen::VectorXd&)>& F);

// Surface system on state (x1, x2, v1, v2):
//   x' = v,  v1' = -(x2/(1+x2^2)) v1 v2,  v2' = 0,
// the autoparallel flow of the connection below.
Rhs bates_system();

// Gamma^1_12 = Gamma^1_21 = x2 / (2 (1 + x2^2)), all other coefficients
// zero; half the metric connection of diag(1+x2^2, 1).
Connection bates_connection(const Chart& chart);

// Conserved quantities of the surface system: v2, and v1 sqrt(1+x2^2).
double bates_integral_1(const Eigen::VectorXd& s);
double bates_integral_2(const Eigen::VectorXd& s);

// Quadratic three-dimensional flow
//   x1' = x2 x3 - x3 x1 - x1 x2   (and cyclic images),
// which is x'^k = -Gamma^k_ij x^i x^j for the constant coefficients below.
Rhs halphen_system();

// Constant coefficients with Gamma^1_23 = Gamma^1_32 = -1/2,
// Gamma^1_13 = Gamma^1_31 = Gamma^1_12 = Gamma^1_21 = +1/2, and cyclic
// images in the upper index.
Tensor3 halphen_coefficients();

// One scalar basis function of the state, with an exact gradient; the
// fitting routines differentiate along the flow via the chain rule.
struct BasisFunction {
  std::string name;
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
};

// All monomials over the selected state coordinates with total degree in
// [1, max_degree] (the constant is deliberately excluded: it is a trivial
// integral of every flow). `labels` names the selected coordinates for
// reporting, aligned with `coords`.
std::vector<BasisFunction> monomial_basis(int state_dim,
                                          std::span<const int> coords,
                                          std::span<const std::string> labels,
                                          int max_degree);

// First-integral detection by collocation. For samples y_r taken from the
// trajectories, M(r, b) = gradient of basis b at y_r dotted with f(t, y_r);
// a first integral in the basis span is a null combination. The basis is
// Gram-normalized before the singular value analysis: with B(r, b) the
// basis values and B = QR, the decomposition runs on M R^{-1} so that the
// residual is scale-free. RankDeficientBasis is raised when the basis is
// linearly dependent on the samples (R numerically singular).
struct IntegralFit {
  // Best direction in original basis coordinates, unit norm, largest
  // component made positive.
  Eigen::VectorXd coefficients;
  // sigma_min / sigma_max of the Gram-normalized collocation matrix.
  double residual = 0.0;
  // All directions with sigma <= null_tol * sigma_max, as columns in
  // original basis coordinates (unit norm); empty when none qualify.
  Eigen::MatrixXd null_directions;
  // All sigma_i / sigma_max, descending.
  Eigen::VectorXd singular_ratios;
};

IntegralFit fit_first_integral(const Rhs& f,
                               std::span<const Trajectory> trajectories,
                               std::span<const BasisFunction> basis,
                               double null_tol = 1e-6);

// One basis term of a symmetric matrix ansatz: `field` multiplies the
// (i, j) slot, mirrored to (j, i).
struct AnsatzTerm {
  int i = 0;
  int j = 0;
  FieldPtr field;
  std::string name;
};

// All slots i <= j, each carrying the monomials in the given chart
// coordinates up to `degree` (including the constant 1).
std::vector<AnsatzTerm> polynomial_ansatz(const Chart& chart,
                                          std::span<const int> vars,
                                          int degree);

// Best symmetric bilinear form g = sum_b a_b T_b compatible with the
// connection, in the least-squares sense of the linear equations
//   d_k g_ij - Gamma^l_ki g_lj - Gamma^l_kj g_il = 0
// collocated at the chart sample points, solved as a unit-norm smallest
// singular direction. Near-null directions (sigma <= null_tol * sigma_max)
// are screened for positive definiteness at the sample points, either
// sign; the first that passes is returned with positive_definite set.
// When every near-null direction fails the screen (a degenerate or
// indefinite exact solution), those directions are discarded and the
// residual reported is the smallest singular ratio outside the discarded
// set: the evidence that no metric in the ansatz fits the connection.
struct MetricFit {
  Eigen::VectorXd coefficients;
  double residual = 0.0;
  bool positive_definite = false;
  int discarded_directions = 0;
};

MetricFit metric_ansatz_fit(const Connection& conn,
                            std::span<const AnsatzTerm> terms,
                            double null_tol = 1e-8);

// Compare the traced curves of two connections from identical initial
// data, independently of parametrization: integrate both autoparallels
// with the given step until the coordinate arc length reaches `arc`,
// resample both curves at uniform arc length, and return the largest
// pointwise coordinate distance. DomainError if a curve fails to reach
// the requested length within a generous step budget.
double projective_path_equivalence(const Connection& a, const Connection& b,
                                   const Point& x0, const Point& v0,
                                   double arc, double step);

// CSV with header "t,<label>,..." and %.17g values, one recorded state
// per row.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                          std::span<const std::string> labels);

// Labels x1..xn (positions only) or x1..xn,v1..vn (stacked states).
std::vector<std::string> state_labels(int position_dim, bool with_velocity);

}  // namespace defalg::dynamics
