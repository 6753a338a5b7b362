#pragma once

#include <array>
#include <span>

#include <Eigen/Dense>

#include "defalg/frobenius.hpp"
#include "defalg/tensor.hpp"

namespace defalg::liegroup {

// One bracket coefficient: [E_i, E_j] has `value` along E_k. Indices are
// 1-based and require i < j; the antisymmetric mirror is filled in
// automatically.
struct SparseBracket {
  int i = 0;
  int j = 0;
  int k = 0;
  double value = 0.0;
};

// A finite-dimensional Lie algebra with an inner product on the frame
// {E_i}: structure constants c(k,i,j) = coefficient of E_k in [E_i,E_j]
// and a symmetric positive definite frame metric h. Construction validates
// antisymmetry of c exactly, the Jacobi identity to a scale-relative
// 1e-12, and positive definiteness of h; violations raise InvalidAlgebra.
//
// All connection and deformation analysis here is frame-based: every
// object is a constant tensor in the frame, so the computations are exact
// linear algebra with no sampling involved.
class LieAlgebra {
 public:
  LieAlgebra(Tensor3 c, Eigen::MatrixXd h);
  LieAlgebra(int dim, std::span<const SparseBracket> brackets,
             Eigen::MatrixXd h);

  int dim() const { return c_.n; }
  const Tensor3& structure() const { return c_; }
  const Eigen::MatrixXd& metric() const { return h_; }

  // Largest component of the Jacobi cyclic sum, recorded at validation.
  double jacobi_residual() const { return jacobi_; }

 private:
  Tensor3 c_;
  Eigen::MatrixXd h_;
  double jacobi_ = 0.0;
};

// The classical frame connections, as coefficient tensors Gamma(k,i,j) =
// coefficient of E_k in (the connection applied to E_j along E_i):
//   Flat:       all frame fields parallel (zero coefficients),
//   Plus:       the full bracket  [E_i,E_j],
//   Neutral:    half the bracket,
//   LeviCivita: the metric connection of h, from the frame Koszul formula
//     2 h(Gamma(E_i,E_j), E_k)
//       = h([E_i,E_j],E_k) - h([E_j,E_k],E_i) + h([E_k,E_i],E_j).
enum class FrameConnection { Flat, Plus, Neutral, LeviCivita };

Tensor3 frame_connection(const LieAlgebra& g, FrameConnection which);

// Torsion coefficients of a frame connection:
// T(k,i,j) = Gamma(k,i,j) - Gamma(k,j,i) - c(k,i,j).
Tensor3 frame_torsion(const LieAlgebra& g, const Tensor3& gamma);

// The six pairwise differences studied for the frame connections, each an
// exact subtraction of coefficient tensors. Closed forms (verified in the
// tests): plus - flat = c, plus - neutral = c/2, flat - neutral = -c/2,
// and the three against the metric connection subtract the Koszul tensor.
struct FrameDeformations {
  Tensor3 plus_minus_flat;
  Tensor3 plus_minus_neutral;
  Tensor3 flat_minus_neutral;
  Tensor3 plus_minus_levicivita;
  Tensor3 neutral_minus_levicivita;
  Tensor3 flat_minus_levicivita;
};

// Stable names for the six differences, in struct order; report writers
// key their per-deformation output on these.
extern const std::array<const char*, 6> kDeformationNames;

FrameDeformations deformations(const LieAlgebra& g);

const Tensor3& deformation(const FrameDeformations& d, int index);

// Residuals of the four reference pairing identities for the differences,
// in table order:
//   1: plus-minus-flat = 2 (plus-minus-neutral) = -2 (flat-minus-neutral)
//      = [E_i,E_j]                                   (three-way defect)
//   2: 2 h(flat-minus-levicivita (E_i,E_j), E_k)
//      = h(E_j,[E_i,E_k]) - h(E_k,[E_i,E_j]) + h(E_i,[E_j,E_k])
//   3: 2 h(plus-minus-levicivita (E_i,E_j), E_k)
//      = h(E_i,[E_j,E_k]) + h(E_j,[E_i,E_k]) + h(E_k,[E_i,E_j])
//   4: 2 h(neutral-minus-levicivita (E_i,E_j), E_k)
//      = h(E_i,[E_j,E_k]) + h(E_j,[E_k,E_i])
// Lines 1-3 follow from the Koszul formula and vanish to rounding. Line 4
// is quoted as in the reference table; the direct difference actually
// carries a minus sign on its second term, so this residual equals
// max 2|h([E_k,E_i],E_j)| and is nonzero for any nonabelian algebra whose
// pairing does not vanish (it measures the gap in the quoted line, not a
// defect of the computation).
std::array<double, 4> pairing_table_residuals(const LieAlgebra& g);

// Defect of the cyclic pairing condition
//   h([E_j,E_k],E_i) = h([E_k,E_i],E_j)  for all triples,
// the frame form of ad-invariance of h. Zero exactly when every pairwise
// difference above is cyclic.
double orthogonality_residual(const LieAlgebra& g);

// Full frame analysis: the six differences classified as pointwise
// structures against h, the orthogonality defect, the pairing table, and
// two consistency flags:
//   equivalence_holds:        (all six verdicts weak or formal)
//                             == (orthogonality <= tol)
//   commutativity_equivalence: the four differences with built-in torsion
//     (plus-minus-flat, plus-minus-neutral, flat-minus-neutral,
//     flat-minus-levicivita) are symmetric iff the algebra is abelian;
//     this flag records that both sides agree.
struct FrameStructureReport {
  FrameDeformations diffs;
  std::array<frobenius::Classification, 6> verdicts;
  std::array<double, 4> pairing_residuals{};
  double orthogonality = 0.0;
  bool equivalence_holds = false;
  bool commutativity_equivalence = false;
};

FrameStructureReport analyze(const LieAlgebra& g, double tol = 1e-12);

// Bundled algebras, all with h = identity.
LieAlgebra abelian(int dim);
LieAlgebra so3();
LieAlgebra affine2d();
LieAlgebra heisenberg3();

}  // namespace defalg::liegroup
