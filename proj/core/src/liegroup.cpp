#include "defalg/liegroup.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "defalg/errors.hpp"

namespace defalg::liegroup {

namespace {

// h([E_a, E_b], E_k) = sum_m c(m,a,b) h(m,k).
double bracket_pairing(const Tensor3& c, const Eigen::MatrixXd& h, int a,
                       int b, int k) {
  double s = 0.0;
  for (int m = 0; m < c.n; ++m) s += c(m, a, b) * h(m, k);
  return s;
}

double pairing(const Eigen::MatrixXd& h, const Tensor3& t, int i, int j,
               int k) {
  double s = 0.0;
  for (int m = 0; m < t.n; ++m) s += t(m, i, j) * h(m, k);
  return s;
}

Tensor3 subtract(const Tensor3& a, const Tensor3& b) {
  Tensor3 r(a.n);
  for (std::size_t s = 0; s < r.a.size(); ++s) r.a[s] = a.a[s] - b.a[s];
  return r;
}

}  // namespace

LieAlgebra::LieAlgebra(Tensor3 c, Eigen::MatrixXd h)
    : c_(std::move(c)), h_(std::move(h)) {
  const int n = c_.n;
  if (n <= 0) throw InvalidAlgebra("structure tensor has no dimension");
  if (h_.rows() != n || h_.cols() != n) {
    throw InvalidAlgebra("frame metric dimension mismatch");
  }
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (c_(k, i, j) + c_(k, j, i) != 0.0) {
          throw InvalidAlgebra("structure constants must be antisymmetric");
        }
      }
    }
  }
  const double scale = std::max(1.0, c_.max_abs() * c_.max_abs());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
          double s = 0.0;
          for (int m = 0; m < n; ++m) {
            s += c_(m, i, j) * c_(l, m, k) + c_(m, j, k) * c_(l, m, i) +
                 c_(m, k, i) * c_(l, m, j);
          }
          jacobi_ = std::max(jacobi_, std::abs(s));
        }
      }
    }
  }
  if (jacobi_ > 1e-12 * scale) {
    throw InvalidAlgebra("structure constants fail the Jacobi identity");
  }
  if (!h_.isApprox(h_.transpose(), 0.0)) {
    throw InvalidAlgebra("frame metric must be symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(h_);
  if (llt.info() != Eigen::Success) {
    throw InvalidAlgebra("frame metric must be positive definite");
  }
}

namespace {

Tensor3 from_sparse(int dim, std::span<const SparseBracket> brackets) {
  if (dim <= 0) throw InvalidAlgebra("structure tensor has no dimension");
  Tensor3 c(dim);
  for (const SparseBracket& b : brackets) {
    if (b.i < 1 || b.j < 1 || b.k < 1 || b.i > dim || b.j > dim ||
        b.k > dim) {
      throw InvalidArgument("bracket index out of range");
    }
    if (b.i >= b.j) {
      throw InvalidArgument("bracket entries require i < j");
    }
    c(b.k - 1, b.i - 1, b.j - 1) += b.value;
    c(b.k - 1, b.j - 1, b.i - 1) -= b.value;
  }
  return c;
}

}  // namespace

LieAlgebra::LieAlgebra(int dim, std::span<const SparseBracket> brackets,
                       Eigen::MatrixXd h)
    : LieAlgebra(from_sparse(dim, brackets), std::move(h)) {}

Tensor3 frame_connection(const LieAlgebra& g, FrameConnection which) {
  const Tensor3& c = g.structure();
  const int n = g.dim();
  Tensor3 gamma(n);
  switch (which) {
    case FrameConnection::Flat:
      break;
    case FrameConnection::Plus:
      gamma = c;
      break;
    case FrameConnection::Neutral:
      for (std::size_t s = 0; s < gamma.a.size(); ++s) {
        gamma.a[s] = 0.5 * c.a[s];
      }
      break;
    case FrameConnection::LeviCivita: {
      // Solve 2 h(Gamma(E_i,E_j), .) = Koszul right-hand side.
      Eigen::LLT<Eigen::MatrixXd> llt(g.metric());
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          Eigen::VectorXd rhs(n);
          for (int k = 0; k < n; ++k) {
            rhs[k] = bracket_pairing(c, g.metric(), i, j, k) -
                     bracket_pairing(c, g.metric(), j, k, i) +
                     bracket_pairing(c, g.metric(), k, i, j);
          }
          const Eigen::VectorXd sol = llt.solve(0.5 * rhs);
          for (int k = 0; k < n; ++k) gamma(k, i, j) = sol[k];
        }
      }
      break;
    }
  }
  return gamma;
}

Tensor3 frame_torsion(const LieAlgebra& g, const Tensor3& gamma) {
  const Tensor3& c = g.structure();
  const int n = g.dim();
  Tensor3 t(n);
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        t(k, i, j) = gamma(k, i, j) - gamma(k, j, i) - c(k, i, j);
      }
    }
  }
  return t;
}

const std::array<const char*, 6> kDeformationNames = {
    "plus-minus-flat",       "plus-minus-neutral",
    "flat-minus-neutral",    "plus-minus-levicivita",
    "neutral-minus-levicivita", "flat-minus-levicivita"};

FrameDeformations deformations(const LieAlgebra& g) {
  const Tensor3 flat = frame_connection(g, FrameConnection::Flat);
  const Tensor3 plus = frame_connection(g, FrameConnection::Plus);
  const Tensor3 neutral = frame_connection(g, FrameConnection::Neutral);
  const Tensor3 lc = frame_connection(g, FrameConnection::LeviCivita);
  FrameDeformations d;
  d.plus_minus_flat = subtract(plus, flat);
  d.plus_minus_neutral = subtract(plus, neutral);
  d.flat_minus_neutral = subtract(flat, neutral);
  d.plus_minus_levicivita = subtract(plus, lc);
  d.neutral_minus_levicivita = subtract(neutral, lc);
  d.flat_minus_levicivita = subtract(flat, lc);
  return d;
}

const Tensor3& deformation(const FrameDeformations& d, int index) {
  switch (index) {
    case 0: return d.plus_minus_flat;
    case 1: return d.plus_minus_neutral;
    case 2: return d.flat_minus_neutral;
    case 3: return d.plus_minus_levicivita;
    case 4: return d.neutral_minus_levicivita;
    case 5: return d.flat_minus_levicivita;
    default: throw InvalidArgument("deformation index out of range");
  }
}

std::array<double, 4> pairing_table_residuals(const LieAlgebra& g) {
  const Tensor3& c = g.structure();
  const Eigen::MatrixXd& h = g.metric();
  const int n = g.dim();
  const FrameDeformations d = deformations(g);

  std::array<double, 4> r{};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        const double cij = c(k, i, j);
        r[0] = std::max(r[0], std::abs(d.plus_minus_flat(k, i, j) - cij));
        r[0] =
            std::max(r[0], std::abs(2.0 * d.plus_minus_neutral(k, i, j) - cij));
        r[0] = std::max(r[0],
                        std::abs(-2.0 * d.flat_minus_neutral(k, i, j) - cij));

        const double hij_k = bracket_pairing(c, h, i, j, k);
        const double hjk_i = bracket_pairing(c, h, j, k, i);
        const double hki_j = bracket_pairing(c, h, k, i, j);
        // h(E_j,[E_i,E_k]) = -h([E_k,E_i],E_j) etc.
        const double rhs2 = -hki_j - hij_k + hjk_i;
        const double rhs3 = hjk_i - hki_j + hij_k;
        const double rhs4 = hjk_i + hki_j;
        r[1] = std::max(
            r[1],
            std::abs(2.0 * pairing(h, d.flat_minus_levicivita, i, j, k) -
                     rhs2));
        r[2] = std::max(
            r[2],
            std::abs(2.0 * pairing(h, d.plus_minus_levicivita, i, j, k) -
                     rhs3));
        r[3] = std::max(
            r[3],
            std::abs(2.0 * pairing(h, d.neutral_minus_levicivita, i, j, k) -
                     rhs4));
      }
    }
  }
  return r;
}

double orthogonality_residual(const LieAlgebra& g) {
  const Tensor3& c = g.structure();
  const Eigen::MatrixXd& h = g.metric();
  const int n = g.dim();
  double r = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        r = std::max(r, std::abs(bracket_pairing(c, h, j, k, i) -
                                 bracket_pairing(c, h, k, i, j)));
      }
    }
  }
  return r;
}

FrameStructureReport analyze(const LieAlgebra& g, double tol) {
  FrameStructureReport rep;
  rep.diffs = deformations(g);
  rep.pairing_residuals = pairing_table_residuals(g);
  rep.orthogonality = orthogonality_residual(g);

  const Point origin = Point::Zero(g.dim());
  bool all_cyclic = true;
  for (int idx = 0; idx < 6; ++idx) {
    const frobenius::PointwiseData data{g.metric(),
                                        deformation(rep.diffs, idx)};
    const std::vector<frobenius::PointwiseData> ds = {data};
    const std::vector<Point> ps = {origin};
    rep.verdicts[static_cast<std::size_t>(idx)] =
        frobenius::classify_points(ds, ps, tol);
    if (rep.verdicts[static_cast<std::size_t>(idx)].verdict ==
        frobenius::StructureClass::None) {
      all_cyclic = false;
    }
  }
  rep.equivalence_holds = (all_cyclic == (rep.orthogonality <= tol));

  double torsion_defect = 0.0;
  for (const int idx : {0, 1, 2, 5}) {
    const frobenius::PointwiseData data{g.metric(),
                                        deformation(rep.diffs, idx)};
    torsion_defect =
        std::max(torsion_defect, frobenius::commutativity_residual_raw(data));
  }
  rep.commutativity_equivalence =
      ((torsion_defect <= tol) == (g.structure().max_abs() <= tol));
  return rep;
}

LieAlgebra abelian(int dim) {
  return LieAlgebra(Tensor3(dim), Eigen::MatrixXd::Identity(dim, dim));
}

LieAlgebra so3() {
  const SparseBracket b[] = {
      {1, 2, 3, 1.0}, {2, 3, 1, 1.0}, {1, 3, 2, -1.0}};
  return LieAlgebra(3, b, Eigen::MatrixXd::Identity(3, 3));
}

LieAlgebra affine2d() {
  const SparseBracket b[] = {{1, 2, 2, 1.0}};
  return LieAlgebra(2, b, Eigen::MatrixXd::Identity(2, 2));
}

LieAlgebra heisenberg3() {
  const SparseBracket b[] = {{1, 2, 3, 1.0}};
  return LieAlgebra(3, b, Eigen::MatrixXd::Identity(3, 3));
}

}  // namespace defalg::liegroup
