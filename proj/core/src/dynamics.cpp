#include "defalg/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <utility>

#include "defalg/errors.hpp"
#include "defalg/field.hpp"

namespace defalg::dynamics {

namespace {

Eigen::VectorXd rk4_step(const Rhs& f, double t, const Eigen::VectorXd& y,
                         double h) {
  const Eigen::VectorXd k1 = f(t, y);
  const Eigen::VectorXd k2 = f(t + 0.5 * h, y + (0.5 * h) * k1);
  const Eigen::VectorXd k3 = f(t + 0.5 * h, y + (0.5 * h) * k2);
  const Eigen::VectorXd k4 = f(t + h, y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

Trajectory rk4_integrate(const Rhs& f, const Eigen::VectorXd& y0, double t0,
                         double t1, double step, int stride) {
  if (!(step > 0.0)) throw InvalidArgument("step size must be positive");
  if (!(t1 >= t0)) throw InvalidArgument("integration span must be forward");
  if (stride < 1) throw InvalidArgument("stride must be at least 1");

  const double total = t1 - t0;
  long nfull = static_cast<long>(std::floor(total / step + 1e-12));
  double rem = total - static_cast<double>(nfull) * step;
  if (rem <= 1e-12 * std::max(1.0, std::abs(total))) rem = 0.0;

  Trajectory traj;
  Eigen::VectorXd y = y0;
  traj.times.push_back(t0);
  traj.states.push_back(y);

  long recorded_at = 0;
  for (long i = 0; i < nfull; ++i) {
    const double t = t0 + static_cast<double>(i) * step;
    y = rk4_step(f, t, y, step);
    if (!y.allFinite()) throw NonFiniteState(t + step);
    if ((i + 1) % stride == 0) {
      traj.times.push_back(t0 + static_cast<double>(i + 1) * step);
      traj.states.push_back(y);
      recorded_at = i + 1;
    }
  }
  double t_end = t0 + static_cast<double>(nfull) * step;
  if (rem > 0.0) {
    y = rk4_step(f, t_end, y, rem);
    if (!y.allFinite()) throw NonFiniteState(t1);
    t_end = t1;
    traj.times.push_back(t1);
    traj.states.push_back(y);
  } else if (recorded_at != nfull) {
    traj.times.push_back(t_end);
    traj.states.push_back(y);
  }
  return traj;
}

Rhs autoparallel(const Connection& conn) {
  const int n = conn.dim();
  return [conn, n](double, const Eigen::VectorXd& y) {
    const Point x = y.head(n);
    const Eigen::VectorXd v = y.tail(n);
    const Tensor3 gamma = conn.at(x);
    Eigen::VectorXd out(2 * n);
    out.head(n) = v;
    for (int k = 0; k < n; ++k) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) acc += gamma(k, i, j) * v[i] * v[j];
      }
      out[n + k] = -acc;
    }
    return out;
  };
}

Eigen::VectorXd stack_state(const Point& x, const Point& v) {
  Eigen::VectorXd y(x.size() + v.size());
  y << x, v;
  return y;
}

double first_integral_drift(
    const Trajectory& traj,
    const std::function<double(const Eigen::VectorXd&)>& F) {
  if (traj.states.empty()) throw InvalidArgument("empty trajectory");
  const double base = F(traj.states.front());
  double drift = 0.0;
  for (const Eigen::VectorXd& s : traj.states) {
    drift = std::max(drift, std::abs(F(s) - base));
  }
  return drift;
}

Rhs bates_system() {
  return [](double, const Eigen::VectorXd& y) {
    Eigen::VectorXd out(4);
    const double x2 = y[1];
    const double v1 = y[2];
    const double v2 = y[3];
    out[0] = v1;
    out[1] = v2;
    out[2] = -(x2 / (1.0 + x2 * x2)) * v1 * v2;
    out[3] = 0.0;
    return out;
  };
}

Connection bates_connection(const Chart& chart) {
  if (chart.dim() != 2) throw InvalidArgument("surface chart must be 2d");
  std::vector<FieldPtr> gamma(8, zero_field(2));
  const FieldPtr half = expr_field("x2/(2*(1+x2^2))", 2);
  gamma[0 * 4 + 0 * 2 + 1] = half;
  gamma[0 * 4 + 1 * 2 + 0] = half;
  return Connection::from_fields(chart, std::move(gamma), true);
}

double bates_integral_1(const Eigen::VectorXd& s) { return s[3]; }

double bates_integral_2(const Eigen::VectorXd& s) {
  return s[2] * std::sqrt(1.0 + s[1] * s[1]);
}

Rhs halphen_system() {
  return [](double, const Eigen::VectorXd& y) {
    Eigen::VectorXd out(3);
    out[0] = y[1] * y[2] - y[2] * y[0] - y[0] * y[1];
    out[1] = y[2] * y[0] - y[0] * y[1] - y[1] * y[2];
    out[2] = y[0] * y[1] - y[1] * y[2] - y[2] * y[0];
    return out;
  };
}

Tensor3 halphen_coefficients() {
  Tensor3 g(3);
  for (int k = 0; k < 3; ++k) {
    // Cyclic images of Gamma^1_23 = -1/2, Gamma^1_13 = Gamma^1_12 = +1/2.
    const int a = (k + 1) % 3;
    const int b = (k + 2) % 3;
    g(k, a, b) = -0.5;
    g(k, b, a) = -0.5;
    g(k, k, b) = 0.5;
    g(k, b, k) = 0.5;
    g(k, k, a) = 0.5;
    g(k, a, k) = 0.5;
  }
  return g;
}

namespace {

void enumerate_exponents(int vars, int max_degree, std::vector<int>& cur,
                         const std::function<void(const std::vector<int>&)>& emit) {
  if (static_cast<int>(cur.size()) == vars) {
    int total = 0;
    for (const int e : cur) total += e;
    if (total >= 1) emit(cur);
    return;
  }
  int used = 0;
  for (const int e : cur) used += e;
  for (int e = 0; e <= max_degree - used; ++e) {
    cur.push_back(e);
    enumerate_exponents(vars, max_degree, cur, emit);
    cur.pop_back();
  }
}

std::string monomial_name(std::span<const std::string> labels,
                          const std::vector<int>& exps) {
  std::string name;
  for (std::size_t v = 0; v < exps.size(); ++v) {
    if (exps[v] == 0) continue;
    if (!name.empty()) name += "*";
    name += labels[v];
    if (exps[v] > 1) name += "^" + std::to_string(exps[v]);
  }
  return name.empty() ? "1" : name;
}

}  // namespace

std::vector<BasisFunction> monomial_basis(int state_dim,
                                          std::span<const int> coords,
                                          std::span<const std::string> labels,
                                          int max_degree) {
  if (coords.size() != labels.size()) {
    throw InvalidArgument("coordinate and label counts differ");
  }
  for (const int c : coords) {
    if (c < 0 || c >= state_dim) {
      throw InvalidArgument("basis coordinate out of range");
    }
  }
  if (max_degree < 1) throw InvalidArgument("degree must be at least 1");

  std::vector<std::vector<int>> all;
  std::vector<int> cur;
  enumerate_exponents(static_cast<int>(coords.size()), max_degree, cur,
                      [&all](const std::vector<int>& e) { all.push_back(e); });
  std::stable_sort(all.begin(), all.end(),
                   [](const std::vector<int>& a, const std::vector<int>& b) {
                     int ta = 0;
                     int tb = 0;
                     for (const int e : a) ta += e;
                     for (const int e : b) tb += e;
                     return ta < tb;
                   });

  std::vector<int> csel(coords.begin(), coords.end());
  std::vector<BasisFunction> basis;
  for (const std::vector<int>& exps : all) {
    BasisFunction f;
    f.name = monomial_name(labels, exps);
    f.value = [csel, exps](const Eigen::VectorXd& y) {
      double v = 1.0;
      for (std::size_t u = 0; u < exps.size(); ++u) {
        for (int r = 0; r < exps[u]; ++r) {
          v *= y[csel[u]];
        }
      }
      return v;
    };
    f.gradient = [csel, exps](const Eigen::VectorXd& y) {
      Eigen::VectorXd g = Eigen::VectorXd::Zero(y.size());
      for (std::size_t u = 0; u < exps.size(); ++u) {
        if (exps[u] == 0) continue;
        double v = static_cast<double>(exps[u]);
        for (std::size_t w = 0; w < exps.size(); ++w) {
          const int e = (w == u) ? exps[w] - 1 : exps[w];
          for (int r = 0; r < e; ++r) v *= y[csel[w]];
        }
        g[csel[u]] += v;
      }
      return g;
    };
    basis.push_back(std::move(f));
  }
  return basis;
}

namespace {

Eigen::VectorXd sign_normalized(Eigen::VectorXd c) {
  const double norm = c.norm();
  if (norm > 0.0) c /= norm;
  int imax = 0;
  for (int i = 1; i < c.size(); ++i) {
    if (std::abs(c[i]) > std::abs(c[imax])) imax = i;
  }
  if (c[imax] < 0.0) c = -c;
  return c;
}

}  // namespace

IntegralFit fit_first_integral(const Rhs& f,
                               std::span<const Trajectory> trajectories,
                               std::span<const BasisFunction> basis,
                               double null_tol) {
  const int nb = static_cast<int>(basis.size());
  if (nb < 1) throw InvalidArgument("empty basis");
  long rows = 0;
  for (const Trajectory& t : trajectories) {
    rows += static_cast<long>(t.states.size());
  }
  if (rows < nb) throw InvalidArgument("fewer samples than basis functions");

  Eigen::MatrixXd B(rows, nb);
  Eigen::MatrixXd M(rows, nb);
  long r = 0;
  for (const Trajectory& t : trajectories) {
    for (std::size_t s = 0; s < t.states.size(); ++s) {
      const Eigen::VectorXd& y = t.states[s];
      const Eigen::VectorXd fy = f(t.times[s], y);
      for (int b = 0; b < nb; ++b) {
        B(r, b) = basis[b].value(y);
        M(r, b) = basis[b].gradient(y).dot(fy);
      }
      ++r;
    }
  }

  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(B);
  const Eigen::MatrixXd R =
      qr.matrixQR().topRows(nb).triangularView<Eigen::Upper>();
  double dmax = 0.0;
  for (int j = 0; j < nb; ++j) dmax = std::max(dmax, std::abs(R(j, j)));
  for (int j = 0; j < nb; ++j) {
    if (std::abs(R(j, j)) <= 1e-10 * dmax) {
      throw RankDeficientBasis("basis function '" + basis[j].name +
                               "' is linearly dependent on the samples");
    }
  }

  // X = M R^{-1}, so null directions live in the Gram-orthonormal frame.
  const Eigen::MatrixXd X = R.triangularView<Eigen::Upper>()
                                .transpose()
                                .solve(M.transpose())
                                .transpose();
  const Eigen::BDCSVD<Eigen::MatrixXd> svd(X, Eigen::ComputeThinV);
  const Eigen::VectorXd sv = svd.singularValues();
  const double smax = std::max(sv[0], 1e-300);

  IntegralFit fit;
  fit.singular_ratios = sv / smax;
  fit.residual = sv[nb - 1] / smax;

  const auto back_map = [&](int col) {
    const Eigen::VectorXd w = svd.matrixV().col(col);
    const Eigen::VectorXd c =
        R.triangularView<Eigen::Upper>().solve(w);
    return sign_normalized(c);
  };
  fit.coefficients = back_map(nb - 1);

  int nulls = 0;
  for (int i = nb - 1; i >= 0; --i) {
    if (sv[i] <= null_tol * smax) ++nulls;
  }
  fit.null_directions.resize(nb, nulls);
  for (int c = 0; c < nulls; ++c) {
    fit.null_directions.col(c) = back_map(nb - 1 - c);
  }
  return fit;
}

std::vector<AnsatzTerm> polynomial_ansatz(const Chart& chart,
                                          std::span<const int> vars,
                                          int degree) {
  const int n = chart.dim();
  for (const int v : vars) {
    if (v < 0 || v >= n) throw InvalidArgument("ansatz variable out of range");
  }
  if (degree < 0) throw InvalidArgument("degree must be nonnegative");

  std::vector<std::string> monomials;
  if (vars.empty() || degree == 0) {
    monomials.push_back("1");
  } else {
    std::vector<std::vector<int>> all;
    std::vector<int> cur;
    enumerate_exponents(static_cast<int>(vars.size()), degree, cur,
                        [&all](const std::vector<int>& e) {
                          all.push_back(e);
                        });
    monomials.push_back("1");
    std::stable_sort(all.begin(), all.end(),
                     [](const std::vector<int>& a, const std::vector<int>& b) {
                       int ta = 0;
                       int tb = 0;
                       for (const int e : a) ta += e;
                       for (const int e : b) tb += e;
                       return ta < tb;
                     });
    for (const std::vector<int>& exps : all) {
      std::string m;
      for (std::size_t u = 0; u < exps.size(); ++u) {
        if (exps[u] == 0) continue;
        if (!m.empty()) m += "*";
        m += "x" + std::to_string(vars[u] + 1);
        if (exps[u] > 1) m += "^" + std::to_string(exps[u]);
      }
      monomials.push_back(m);
    }
  }

  std::vector<AnsatzTerm> terms;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      for (const std::string& m : monomials) {
        AnsatzTerm t;
        t.i = i;
        t.j = j;
        t.field = expr_field(m, n);
        t.name = "g" + std::to_string(i + 1) + std::to_string(j + 1) +
                 (m == "1" ? "" : "*" + m);
        terms.push_back(std::move(t));
      }
    }
  }
  return terms;
}

MetricFit metric_ansatz_fit(const Connection& conn,
                            std::span<const AnsatzTerm> terms,
                            double null_tol) {
  const Chart& chart = conn.chart();
  const int n = conn.dim();
  const int nt = static_cast<int>(terms.size());
  if (nt < 1) throw InvalidArgument("empty ansatz");
  for (const AnsatzTerm& t : terms) {
    if (t.i < 0 || t.j < 0 || t.i >= n || t.j >= n || t.i > t.j) {
      throw InvalidArgument("ansatz slot indices must satisfy 0 <= i <= j < n");
    }
  }

  std::vector<std::vector<FieldPtr>> partials(
      static_cast<std::size_t>(nt));
  for (int t = 0; t < nt; ++t) {
    for (int k = 0; k < n; ++k) {
      partials[static_cast<std::size_t>(t)].push_back(
          partial(terms[t].field, k));
    }
  }

  const std::vector<Point>& points = chart.points();
  const long rows_per_point = static_cast<long>(n) * n * (n + 1) / 2;
  Eigen::MatrixXd D(static_cast<long>(points.size()) * rows_per_point, nt);

  // Sampled symmetric matrices per term, reused by the definiteness screen.
  std::vector<std::vector<Eigen::MatrixXd>> sampled(
      points.size(), std::vector<Eigen::MatrixXd>(
                         static_cast<std::size_t>(nt)));

  long row = 0;
  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    const Point& p = points[pi];
    const Tensor3 gamma = conn.at(p);
    for (int t = 0; t < nt; ++t) {
      const double val = terms[t].field->value(p);
      Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
      S(terms[t].i, terms[t].j) = val;
      S(terms[t].j, terms[t].i) = val;
      sampled[pi][static_cast<std::size_t>(t)] = S;
    }
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
          for (int t = 0; t < nt; ++t) {
            const Eigen::MatrixXd& S =
                sampled[pi][static_cast<std::size_t>(t)];
            double entry = 0.0;
            if (i == terms[t].i && j == terms[t].j) {
              entry += partials[static_cast<std::size_t>(t)]
                               [static_cast<std::size_t>(k)]
                                   ->value(p);
            }
            for (int l = 0; l < n; ++l) {
              entry -= gamma(l, k, i) * S(l, j) + gamma(l, k, j) * S(i, l);
            }
            D(row, t) = entry;
          }
          ++row;
        }
      }
    }
  }

  const Eigen::BDCSVD<Eigen::MatrixXd> svd(D, Eigen::ComputeThinV);
  const Eigen::VectorXd sv = svd.singularValues();
  const double smax = std::max(sv[0], 1e-300);

  const auto candidate_pd = [&](const Eigen::VectorXd& c) {
    for (std::size_t pi = 0; pi < points.size(); ++pi) {
      Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, n);
      for (int t = 0; t < nt; ++t) {
        G += c[t] * sampled[pi][static_cast<std::size_t>(t)];
      }
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
          G, Eigen::EigenvaluesOnly);
      const double lo = eig.eigenvalues().minCoeff();
      const double hi = eig.eigenvalues().cwiseAbs().maxCoeff();
      if (!(lo > 1e-8 * std::max(1.0, hi))) return false;
    }
    return true;
  };

  MetricFit fit;
  int checked = 0;
  for (int i = nt - 1; i >= 0; --i) {
    if (sv[i] > null_tol * smax) break;
    Eigen::VectorXd c = sign_normalized(svd.matrixV().col(i));
    if (candidate_pd(c)) {
      fit.coefficients = c;
      fit.residual = sv[i] / smax;
      fit.positive_definite = true;
      fit.discarded_directions = checked;
      return fit;
    }
    if (candidate_pd(-c)) {
      fit.coefficients = -c;
      fit.residual = sv[i] / smax;
      fit.positive_definite = true;
      fit.discarded_directions = checked;
      return fit;
    }
    ++checked;
  }

  // No definite direction among the near-nulls: report the smallest
  // singular direction outside the discarded set as the evidence level.
  const int best = nt - 1 - checked;
  fit.discarded_directions = checked;
  if (best < 0) {
    fit.coefficients = sign_normalized(svd.matrixV().col(0));
    fit.residual = 0.0;
    fit.positive_definite = false;
    return fit;
  }
  fit.coefficients = sign_normalized(svd.matrixV().col(best));
  fit.residual = sv[best] / smax;
  fit.positive_definite = false;
  return fit;
}

namespace {

struct ArcCurve {
  std::vector<double> arc;
  std::vector<Point> pos;
};

ArcCurve trace_by_arc(const Connection& conn, const Point& x0,
                      const Point& v0, double arc_target, double step) {
  const Rhs f = autoparallel(conn);
  const int n = static_cast<int>(x0.size());
  Eigen::VectorXd y = stack_state(x0, v0);
  ArcCurve curve;
  curve.arc.push_back(0.0);
  curve.pos.push_back(x0);
  double s = 0.0;
  double t = 0.0;
  const long budget =
      static_cast<long>(std::ceil(arc_target / (step * 1e-3))) + 16;
  for (long it = 0; it < budget; ++it) {
    const Eigen::VectorXd next = rk4_step(f, t, y, step);
    if (!next.allFinite()) throw NonFiniteState(t + step);
    const double ds = (next.head(n) - y.head(n)).norm();
    s += ds;
    t += step;
    y = next;
    curve.arc.push_back(s);
    curve.pos.push_back(y.head(n));
    if (s >= arc_target) return curve;
  }
  throw DomainError("autoparallel did not reach the requested arc length");
}

Point sample_curve(const ArcCurve& c, double s) {
  const auto it = std::lower_bound(c.arc.begin(), c.arc.end(), s);
  if (it == c.arc.begin()) return c.pos.front();
  if (it == c.arc.end()) return c.pos.back();
  const std::size_t hi = static_cast<std::size_t>(it - c.arc.begin());
  const std::size_t lo = hi - 1;
  const double span = c.arc[hi] - c.arc[lo];
  const double w = span > 0.0 ? (s - c.arc[lo]) / span : 0.0;
  return (1.0 - w) * c.pos[lo] + w * c.pos[hi];
}

}  // namespace

double projective_path_equivalence(const Connection& a, const Connection& b,
                                   const Point& x0, const Point& v0,
                                   double arc, double step) {
  if (!(arc > 0.0)) throw InvalidArgument("arc length must be positive");
  const ArcCurve ca = trace_by_arc(a, x0, v0, arc, step);
  const ArcCurve cb = trace_by_arc(b, x0, v0, arc, step);
  const int samples = 200;
  double worst = 0.0;
  for (int i = 0; i <= samples; ++i) {
    const double s = arc * static_cast<double>(i) / samples;
    worst = std::max(worst, (sample_curve(ca, s) - sample_curve(cb, s)).norm());
  }
  return worst;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                          std::span<const std::string> labels) {
  os << "t";
  for (const std::string& l : labels) os << "," << l;
  os << "\n";
  char buf[40];
  for (std::size_t r = 0; r < traj.states.size(); ++r) {
    std::snprintf(buf, sizeof buf, "%.17g", traj.times[r]);
    os << buf;
    const Eigen::VectorXd& y = traj.states[r];
    if (static_cast<std::size_t>(y.size()) != labels.size()) {
      throw InvalidArgument("label count does not match state dimension");
    }
    for (int c = 0; c < y.size(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", y[c]);
      os << "," << buf;
    }
    os << "\n";
  }
}

std::vector<std::string> state_labels(int position_dim, bool with_velocity) {
  std::vector<std::string> labels;
  for (int i = 1; i <= position_dim; ++i) {
    labels.push_back("x" + std::to_string(i));
  }
  if (with_velocity) {
    for (int i = 1; i <= position_dim; ++i) {
      labels.push_back("v" + std::to_string(i));
    }
  }
  return labels;
}

}  // namespace defalg::dynamics
