#pragma once

#include <vector>

#include "defalg/connection.hpp"
#include "defalg/frobenius.hpp"
#include "defalg/metric.hpp"
#include "defalg/rng.hpp"
#include "defalg/tensor.hpp"

// Constructors for the deformation-tensor situations the library ships, and
// the specialized pointwise condition residuals attached to them. Wherever a
// deformation tensor has both a closed-form recipe and a definition as a
// difference of two Levi-Civita connections, both routes are provided so
// callers can cross-validate them.
namespace defalg::catalog {

// --- subgeodesic and conformal deformations --------------------------------

// A(X,Y) = theta(X)Y + theta(Y)X + g(X,Y)P, i.e.
// A^k_ij = theta_i d^k_j + theta_j d^k_i + g_ij P^k. Symmetric in (i,j).
TensorField subgeodesic_A(const Metric& g, const TensorField& theta,
                          const TensorField& P);

// max over basis triples of |theta_i g_jk + psi_k g_ji - theta_k g_ji
// - psi_i g_jk|; psi is the lowered pairing partner (psi = flat(P)). Equals
// the unnormalized cyclic defect of the subgeodesic deformation.
double residual_2_2(const TensorField& theta, const TensorField& psi,
                    const Metric& g, const Point& p);

// The conformal deformation for gbar = e^{2u} g along both routes: the
// subgeodesic recipe with theta = du, P = -sharp(du), and the direct
// connection subtraction LC(gbar) - LC(g).
struct ConformalRoutes {
  Metric scaled;
  TensorField recipe;
  TensorField subtraction;
};
ConformalRoutes conformal_routes(const Metric& g, const FieldPtr& u);

// max componentwise |a - b| at p for two equal-shape tensor fields.
double max_component_gap(const TensorField& a, const TensorField& b,
                         const Point& p);

// --- hypersurfaces ---------------------------------------------------------

// First and second fundamental forms of an immersion given by n+1 expression
// fields in n variables: g_ij = <d_i f, d_j f>, b_ij = <d2_ij f, N> with N
// the unit normal oriented so det[d_1 f ... d_n f N] > 0.
struct Hypersurface {
  Chart chart;
  std::vector<FieldPtr> immersion;
  Metric g;
  TensorField b;
};
Hypersurface hypersurface_forms(Chart chart, std::vector<FieldPtr> immersion);

// Oriented unit normal at p. Throws DegenerateImmersion on rank loss.
Eigen::VectorXd hypersurface_normal(const Hypersurface& h, const Point& p);

// Deformation tensor determined by b(A(X,Y),Z) = -1/2 (nabla_X b)(Y,Z) with
// nabla the Levi-Civita connection of g:
//   A^l_ij = -1/2 (b^{-1})^{lk} (nabla b)_ijk.
// Throws DegenerateSecondForm where b cannot be inverted. The independent
// route to the same tensor is hypersurface_A_by_subtraction.
TensorField hypersurface_A(const Hypersurface& h);
TensorField hypersurface_A_by_subtraction(const Hypersurface& h);

// max |(nabla b)_ijk - (nabla b)_jki| at p, for nabla_b already computed as
// a (0,3) covariant derivative (direction, arg, arg).
double codazzi_residual(const TensorField& nabla_b, const Point& p);

// Trace ratio (1/n) b_ij g^{ij} at p; for a totally umbilic surface with
// b = sigma g this is exactly sigma.
double proportionality_coefficient(const TensorField& b, const Metric& g,
                                   const Point& p);

// Shape operator J^i_j = g^{ik} b_kj as a (1,1) field.
TensorField shape_operator(const Hypersurface& h);

// --- metrics related by a self-adjoint operator ----------------------------

// gtilde_ij = g_ik J^k_j for a g-self-adjoint positive J, with
// A = LC(gtilde) - LC(g) by direct subtraction and nabla_J = the covariant
// derivative of J under LC(g) (used by the residual evaluators).
// Throws NotSelfAdjoint / NotPositive at the offending sample point.
struct SelfAdjointPair {
  Metric g_tilde;
  TensorField A;
  TensorField nabla_J;
};
SelfAdjointPair selfadjoint_pair(const Metric& g, const TensorField& J);

// max over basis triples of
// |g(Y,(nabla_X J)Z - (nabla_Z J)X) - g(X,(nabla_Z J)Y) + g(Z,(nabla_X J)Y)|.
double residual_2_8(const Metric& g, const TensorField& nabla_J,
                    const Point& p);

// max over triples of |omega_i g_jk - omega_k g_ji| (recurrent case).
double residual_2_9(const TensorField& omega, const Metric& g, const Point& p);

// max |(nabla J)^k_ij - omega_i J^k_j| at p: how far J is from being
// recurrent with recurrence form omega.
double recurrence_gap(const TensorField& nabla_J, const TensorField& J,
                      const TensorField& omega, const Point& p);

// --- torsion-carrying metric connections -----------------------------------

// The unique metric connection with torsion theta(Y)F(X) - theta(X)F(Y):
//   nabla-bar = nabla + A,  A^k_ij = theta_j F^k_i - S_ij P^k,
// with S_ij = g(F e_i, e_j) and P = sharp(theta). Construction self-tests
// metric compatibility (<= 1e-8) at every chart point, and the prescribed
// torsion shape (<= 1e-10) whenever S is symmetric (the shape requires a
// g-self-adjoint F; torsion_shape_verified records whether the test ran).
struct GolabData {
  Connection connection;
  TensorField A;
  TensorField S;
  TensorField P;
  bool torsion_shape_verified = false;
};
GolabData golab_connection(const Metric& g, const TensorField& theta,
                           const TensorField& F);

// max over triples of |theta_i S_jk + theta_j S_ik - theta_k (S_ij + S_ji)|.
double residual_3_3(const TensorField& theta, const TensorField& S,
                    const Point& p);

// Validation helpers: F^2 = eps * identity, and g(FX,FY) = lambda g(X,Y),
// each checked at every chart sample point (throws InvalidArgument beyond
// tol).
void validate_epsilon_structure(const TensorField& F, double eps,
                                double tol = 1e-8);
void validate_lambda_hermitian(const Metric& g, const TensorField& F,
                               double lambda, double tol = 1e-8);

// A seeded random fixture with F^2 = eps*I, g lambda-Hermitian w.r.t. F, and
// a constant 1-form theta with max|theta_i| >= 0.1. Supported on charts of
// dimension 2 and 4; eps, lambda in {+1,-1}. The metric is constant:
// definite when lambda = +1, split-signature when lambda = -1.
struct EpsilonLambdaFixture {
  Metric g;
  TensorField F;
  TensorField theta;
};
EpsilonLambdaFixture epsilon_lambda_fixture(const Chart& chart, int eps,
                                            int lambda, Rng& rng);

// --- complex-structure deformations ----------------------------------------

// Throws NotAlmostComplex unless J^2 = -identity at every chart point.
void validate_almost_complex(const TensorField& J, double tol = 1e-8);

// A(X,Y) = 1/2 (Q(X,Y) - J Q(X, JY)):
//   A^k_ij = 1/2 (Q^k_ij - J^k_l Q^l_im J^m_j).
TensorField kahler_Q_A(const TensorField& J, const TensorField& Q);

// max over triples of |g(Q(e_i,e_j),e_k) - g(Q(e_j,e_k),e_i)
// - g(Q(e_j,Je_k),Je_i) + g(Q(e_i,Je_j),Je_k)|. Equals twice the cyclic
// defect of the kahler_Q_A tensor at the same point.
double residual_3_19(const Metric& g, const TensorField& J,
                     const TensorField& Q, const Point& p);

// Fundamental 2-form Omega_ij = g_il J^l_j, its exterior derivative, and the
// deformation tensor of the requested Hermitian connection:
//   g(A(X,Y),Z) =  1/2 dOmega(JX, Y, Z)   (Chern)
//   g(A(X,Y),Z) = -1/2 dOmega(JX,JY,JZ)   (Bismut).
// Validates J^2 = -I (NotAlmostComplex) and g(JX,JY) = g(X,Y)
// (NotHermitian) at every chart point.
enum class HermitianConnection { Chern, Bismut };
struct HermitianData {
  TensorField omega;
  TensorField d_omega;
  TensorField A;
};
HermitianData chern_bismut_A(const Metric& g, const TensorField& J,
                             HermitianConnection which, double tol = 1e-8);

// max |dOmega(Je_i,e_j,e_k) - dOmega(Je_j,e_k,e_i)| at p.
double residual_3_22(const TensorField& J, const TensorField& d_omega,
                     const Point& p);

// max |T_ijk - T_jki| for T_ijk = dOmega(Je_i,Je_j,Je_k) at p. The
// underlying evaluator is circular_shift_residual, which is also exposed so
// it can be verified on synthetic data with a planted asymmetry.
double residual_3_23(const TensorField& J, const TensorField& d_omega,
                     const Point& p);
double circular_shift_residual(const Tensor3& t);

// max |(dOmega)_ijk - (theta ^ Omega)_ijk| at p, with
// (theta ^ Omega)_ijk = theta_i Omega_jk - theta_j Omega_ik
// + theta_k Omega_ij.
double lck_residual(const TensorField& d_omega, const TensorField& omega,
                    const TensorField& theta, const Point& p);

// Two condition residuals stated through a codifferential 1-form w, which
// the caller must supply explicitly. residual_3_24 is
//   max |w(X)Omega(Y,Z) + w(JY)g(Z,X) - w(JZ)g(X,Y)
//        - w(Y)Omega(Z,X) - w(JZ)g(X,Y) + w(JX)g(Y,Z)|
// over basis triples; residual_3_25 compares the two circular sums
//   w(X)Omega(Y,Z) + w(Y)Omega(Z,X) + w(Z)Omega(X,Y)
// on both sides, which are termwise identical as printed, so the value is
// structurally zero (flagged by callers as trivially satisfied).
double residual_3_24(const Metric& g, const TensorField& J,
                     const TensorField& omega, const TensorField& dstar_omega,
                     const Point& p);
double residual_3_25(const TensorField& dstar_omega,
                     const TensorField& omega, const Point& p);

// --- cross products --------------------------------------------------------

// Constant cross-product tensor A(k,i,j) = (e_i x e_j)_k in dimension 3 or
// 7. Construction self-tests <x cross y, x> = 0 and the norm identity
// |x cross y|^2 = |x|^2 |y|^2 - <x,y>^2 on 1000 seeded random pairs
// (SelfTestFailure beyond 1e-10). Throws UnsupportedDim otherwise.
Tensor3 cross_product_A(int dim);

// --- deformations from a self-adjoint operator's covariant derivative ------

// A(X,Y) = (nabla_X J)Y under LC(g), as a (1,2) field (direction, arg).
TensorField nabla_J_A(const Metric& g, const TensorField& J);

// Self-adjointness violation max |g_ik J^k_j - g_jk J^k_i| at p.
double residual_4_1(const Metric& g, const TensorField& J, const Point& p);

// Commutativity violation max |(nabla J)^k_ij - (nabla J)^k_ji| at p.
double residual_4_2(const TensorField& nabla_J, const Point& p);

// max |(nabla R)_ijk - (nabla R)_jik| at p for the covariant derivative of
// a (0,2) tensor (direction and first argument swapped).
double ricci_codazzi_residual(const TensorField& nabla_ricci, const Point& p);

// Proportionality fit of the Ricci tensor against the metric:
// lambda = mean over sample points of (1/n) tr(g^{-1} R);
// max_gap = max |R_ij - lambda g_ij| over points;
// max_deformation = max |LC(R) - LC(g)| over points, with R used as a
// metric (requires R positive definite at the sample points).
struct EinsteinFit {
  double lambda = 0.0;
  double max_gap = 0.0;
  double max_deformation = 0.0;
};
EinsteinFit einstein_2d(const Metric& g);

}  // namespace defalg::catalog
