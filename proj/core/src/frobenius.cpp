#include "defalg/frobenius.hpp"

#include <cmath>
#include <vector>

#include "defalg/errors.hpp"

namespace defalg::frobenius {

double cyclic_residual_raw(const PointwiseData& d) {
  const int n = static_cast<int>(d.g.rows());
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        double lhs = 0.0, rhs = 0.0;
        for (int l = 0; l < n; ++l) {
          lhs += d.A(l, i, j) * d.g(l, k);
          rhs += d.A(l, j, k) * d.g(i, l);
        }
        worst = std::max(worst, std::abs(lhs - rhs));
      }
    }
  }
  return worst;
}

double commutativity_residual_raw(const PointwiseData& d) {
  const int n = d.A.n;
  double worst = 0.0;
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        worst = std::max(worst, std::abs(d.A(k, i, j) - d.A(k, j, i)));
      }
    }
  }
  return worst;
}

namespace {

double norm_scale(const PointwiseData& d) {
  double gmax = 0.0;
  for (int i = 0; i < d.g.rows(); ++i) {
    for (int j = 0; j < d.g.cols(); ++j) {
      gmax = std::max(gmax, std::abs(d.g(i, j)));
    }
  }
  return 1.0 + gmax * d.A.max_abs();
}

}  // namespace

double cyclic_residual(const PointwiseData& d) {
  return cyclic_residual_raw(d) / norm_scale(d);
}

double commutativity_residual(const PointwiseData& d) {
  return commutativity_residual_raw(d) / norm_scale(d);
}

const char* to_string(StructureClass c) {
  switch (c) {
    case StructureClass::Formal:
      return "FORMAL";
    case StructureClass::Weak:
      return "WEAK";
    case StructureClass::None:
      return "NONE";
  }
  return "NONE";
}

CheckReport make_upper_check(std::string name, double tolerance) {
  CheckReport r;
  r.name = std::move(name);
  r.tolerance = tolerance;
  return r;
}

void record_sample(CheckReport& r, double residual, const Point& p) {
  // mean_residual accumulates a plain running sum until finalize().
  r.mean_residual += residual;
  if (r.samples == 0 || residual > r.max_residual) {
    r.max_residual = residual;
    r.worst_point = p;
  }
  ++r.samples;
}

void finalize(CheckReport& r) {
  if (r.samples > 0) r.mean_residual /= r.samples;
  r.pass = (r.bound == "lower") ? (r.max_residual >= r.tolerance)
                                : (r.max_residual <= r.tolerance);
}

double pairwise_mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  // Pairwise (cascade) summation, then divide once.
  const auto rec = [](std::span<const double> s, auto&& self) -> double {
    if (s.size() <= 8) {
      double t = 0.0;
      for (double v : s) t += v;
      return t;
    }
    const std::size_t half = s.size() / 2;
    return self(s.first(half), self) + self(s.subspan(half), self);
  };
  return rec(xs, rec) / static_cast<double>(xs.size());
}

Classification classify_points(std::span<const PointwiseData> data,
                               std::span<const Point> where, double tol) {
  if (data.empty()) {
    throw InvalidArgument("classification needs at least one sample point");
  }
  if (!where.empty() && where.size() != data.size()) {
    throw InvalidArgument("sample point list does not match data list");
  }
  Classification out;
  out.cyclic = make_upper_check("cyclic_invariance", tol);
  out.commutativity = make_upper_check("commutativity", tol);
  std::vector<double> cyc, comm;
  cyc.reserve(data.size());
  comm.reserve(data.size());
  for (std::size_t s = 0; s < data.size(); ++s) {
    const double rc = cyclic_residual(data[s]);
    const double rm = commutativity_residual(data[s]);
    const Point p = where.empty() ? Point() : where[s];
    cyc.push_back(rc);
    comm.push_back(rm);
    if (s == 0 || rc > out.cyclic.max_residual) {
      out.cyclic.max_residual = rc;
      if (p.size() > 0) out.cyclic.worst_point = p;
    }
    if (s == 0 || rm > out.commutativity.max_residual) {
      out.commutativity.max_residual = rm;
      if (p.size() > 0) out.commutativity.worst_point = p;
    }
  }
  out.cyclic.samples = static_cast<int>(data.size());
  out.commutativity.samples = static_cast<int>(data.size());
  out.cyclic.mean_residual = pairwise_mean(cyc);
  out.commutativity.mean_residual = pairwise_mean(comm);
  out.cyclic.pass = out.cyclic.max_residual <= tol;
  out.commutativity.pass = out.commutativity.max_residual <= tol;
  if (!out.cyclic.pass) {
    out.verdict = StructureClass::None;
  } else if (!out.commutativity.pass) {
    out.verdict = StructureClass::Weak;
  } else {
    out.verdict = StructureClass::Formal;
  }
  return out;
}

Classification classify(const Metric& g, const TensorField& A, double tol) {
  if (A.valence() != Valence{1, 2}) {
    throw InvalidArgument("deformation tensor must have valence (1,2)");
  }
  if (A.chart() != g.chart()) {
    throw InvalidArgument("deformation tensor lives on a different chart");
  }
  const int n = g.dim();
  const auto& pts = g.chart().points();
  std::vector<PointwiseData> data;
  data.reserve(pts.size());
  for (const Point& p : pts) {
    PointwiseData d;
    d.g = g.at(p);
    d.A = Tensor3(n);
    const std::vector<double> vals = A.values_at(p);
    d.A.a = vals;
    data.push_back(std::move(d));
  }
  return classify_points(data, pts, tol);
}

}  // namespace defalg::frobenius
