#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Core>

namespace defalg {

using Point = Eigen::VectorXd;

// A coordinate box with a deterministic low-discrepancy sample set. All
// pointwise verification runs over these samples, so two objects built on
// equal charts see exactly the same points.
//
// Sampling: Halton sequence with the first n primes as bases, starting at
// index 1 + seed * 8192 (distinct seeds give disjoint index windows), mapped
// into the box with a margin fraction excluded at both ends of every
// interval so finite-difference stencils stay inside.
class Chart {
 public:
  Chart(int dim, std::vector<std::array<double, 2>> bounds, int sample_count,
        std::uint64_t seed = 0, double margin = 0.05);

  int dim() const;
  const std::vector<std::array<double, 2>>& bounds() const;
  int sample_count() const;
  std::uint64_t seed() const;
  double margin() const;

  const std::vector<Point>& points() const;

  // True when every coordinate lies within the (unmargined) bounds.
  bool contains(const Point& p) const;

  bool operator==(const Chart& other) const;
  bool operator!=(const Chart& other) const { return !(*this == other); }

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

// The i-th Halton value in the given base (index is 1-based in the usual
// radical-inverse convention).
double halton(std::uint64_t index, int base);

}  // namespace defalg
