#pragma once

#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <vector>

#include "defalg/chart.hpp"
#include "defalg/field.hpp"

namespace defalg {

// Dense cubical arrays used for pointwise tensor data. Index conventions
// follow the component functions: Tensor3(k,i,j) stores T^k_ij (or T_kij for
// a fully covariant tensor), Tensor4(l,k,i,j) stores values like R^l_kij or
// derivative stacks dGamma^l_ki / dx_j.
struct Tensor3 {
  int n = 0;
  std::vector<double> a;

  Tensor3() = default;
  explicit Tensor3(int dim)
      : n(dim), a(static_cast<std::size_t>(dim) * dim * dim, 0.0) {}

  double& operator()(int k, int i, int j) {
    return a[static_cast<std::size_t>((k * n + i) * n + j)];
  }
  double operator()(int k, int i, int j) const {
    return a[static_cast<std::size_t>((k * n + i) * n + j)];
  }

  double max_abs() const;
};

struct Tensor4 {
  int n = 0;
  std::vector<double> a;

  Tensor4() = default;
  explicit Tensor4(int dim)
      : n(dim),
        a(static_cast<std::size_t>(dim) * dim * dim * dim, 0.0) {}

  double& operator()(int l, int k, int i, int j) {
    return a[static_cast<std::size_t>(((l * n + k) * n + i) * n + j)];
  }
  double operator()(int l, int k, int i, int j) const {
    return a[static_cast<std::size_t>(((l * n + k) * n + i) * n + j)];
  }

  double max_abs() const;
};

struct Valence {
  int up = 0;
  int low = 0;

  int rank() const { return up + low; }
  bool operator==(const Valence&) const = default;
};

// A tensor field of valence (up, low) on a chart: one scalar component field
// per index tuple, upper indices first, row-major. Symmetry flags refer to
// the *last two lower* indices; construction enforces them by verifying the
// mirror components agree at a few sample points and then sharing (or
// negating) the canonical component field, so the symmetry holds exactly
// afterwards.
class TensorField {
 public:
  enum class Symmetry { None, SymmetricPair, AntisymmetricPair };

  TensorField(Chart chart, Valence valence, std::vector<FieldPtr> comps,
              Symmetry sym = Symmetry::None);

  const Chart& chart() const;
  const Valence& valence() const;
  Symmetry symmetry() const;
  int dim() const;
  int component_count() const;

  const FieldPtr& component(std::span<const int> idx) const;
  const FieldPtr& component(std::initializer_list<int> idx) const {
    return component(std::span<const int>(idx.begin(), idx.size()));
  }

  // All components evaluated at p, in storage order. Honors the bulk
  // evaluator when one is installed.
  std::vector<double> values_at(const Point& p) const;

  double max_abs_at(const Point& p) const;

  // Installs a bulk evaluator producing all components in storage order in
  // one call; used by derived tensors (curvature, Ricci) whose components
  // share almost all of their work.
  TensorField with_bulk(
      std::function<std::vector<double>(const Point&)> bulk) const;

  std::size_t flat_index(std::span<const int> idx) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  explicit TensorField(std::shared_ptr<const Impl> impl);
};

// Convenience constructors for the common valences.
TensorField one_form(Chart chart, std::vector<FieldPtr> comps);
TensorField vector_field(Chart chart, std::vector<FieldPtr> comps);
TensorField endomorphism_field(Chart chart, std::vector<FieldPtr> comps);
TensorField bilinear_field(Chart chart, std::vector<FieldPtr> comps,
                           TensorField::Symmetry sym);

}  // namespace defalg
