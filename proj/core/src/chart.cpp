#include "defalg/chart.hpp"

#include <cmath>

#include "defalg/errors.hpp"

namespace defalg {

namespace {
constexpr std::array<int, 16> kPrimes = {2,  3,  5,  7,  11, 13, 17, 19,
                                         23, 29, 31, 37, 41, 43, 47, 53};
}

double halton(std::uint64_t index, int base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * static_cast<double>(index % static_cast<std::uint64_t>(base));
    index /= static_cast<std::uint64_t>(base);
  }
  return r;
}

struct Chart::Impl {
  int dim;
  std::vector<std::array<double, 2>> bounds;
  int sample_count;
  std::uint64_t seed;
  double margin;
  std::vector<Point> points;
};

Chart::Chart(int dim, std::vector<std::array<double, 2>> bounds,
             int sample_count, std::uint64_t seed, double margin) {
  if (dim < 1 || dim > static_cast<int>(kPrimes.size())) {
    throw InvalidArgument("chart dimension must be in [1, " +
                          std::to_string(kPrimes.size()) + "]");
  }
  if (static_cast<int>(bounds.size()) != dim) {
    throw InvalidArgument("chart bounds count does not match dimension");
  }
  for (const auto& b : bounds) {
    if (!std::isfinite(b[0]) || !std::isfinite(b[1]) || !(b[0] < b[1])) {
      throw InvalidArgument("chart bounds must be finite with lo < hi");
    }
  }
  if (sample_count < 1) {
    throw InvalidArgument("chart sample count must be positive");
  }
  if (!(margin >= 0.0 && margin < 0.5)) {
    throw InvalidArgument("chart margin must lie in [0, 0.5)");
  }

  auto impl = std::make_shared<Impl>();
  impl->dim = dim;
  impl->bounds = std::move(bounds);
  impl->sample_count = sample_count;
  impl->seed = seed;
  impl->margin = margin;
  impl->points.reserve(static_cast<std::size_t>(sample_count));
  const std::uint64_t start = 1 + seed * 8192;
  for (int i = 0; i < sample_count; ++i) {
    Point p(dim);
    for (int d = 0; d < dim; ++d) {
      const double u = halton(start + static_cast<std::uint64_t>(i),
                              kPrimes[static_cast<std::size_t>(d)]);
      const auto& b = impl->bounds[static_cast<std::size_t>(d)];
      const double lo = b[0] + margin * (b[1] - b[0]);
      const double hi = b[1] - margin * (b[1] - b[0]);
      p[d] = lo + u * (hi - lo);
    }
    impl->points.push_back(std::move(p));
  }
  impl_ = std::move(impl);
}

int Chart::dim() const { return impl_->dim; }

const std::vector<std::array<double, 2>>& Chart::bounds() const {
  return impl_->bounds;
}

int Chart::sample_count() const { return impl_->sample_count; }

std::uint64_t Chart::seed() const { return impl_->seed; }

double Chart::margin() const { return impl_->margin; }

const std::vector<Point>& Chart::points() const { return impl_->points; }

bool Chart::contains(const Point& p) const {
  if (p.size() != impl_->dim) return false;
  for (int d = 0; d < impl_->dim; ++d) {
    const auto& b = impl_->bounds[static_cast<std::size_t>(d)];
    if (p[d] < b[0] || p[d] > b[1]) return false;
  }
  return true;
}

bool Chart::operator==(const Chart& other) const {
  if (impl_ == other.impl_) return true;
  return impl_->dim == other.impl_->dim &&
         impl_->bounds == other.impl_->bounds &&
         impl_->sample_count == other.impl_->sample_count &&
         impl_->seed == other.impl_->seed &&
         impl_->margin == other.impl_->margin;
}

}  // namespace defalg
