#include <benchmark/benchmark.h>

#include <vector>

#include "defalg/catalog.hpp"
#include "defalg/connection.hpp"
#include "defalg/dynamics.hpp"
#include "defalg/field.hpp"
#include "defalg/frobenius.hpp"
#include "defalg/metric.hpp"
#include "defalg/scenario.hpp"

using namespace defalg;

namespace {

Chart sphere_chart(int samples = 8) {
  return Chart(2, {{{0.3, 2.8415926535897931}, {0.2, 6.0}}}, samples);
}

Metric sphere_metric(const Chart& chart) {
  return Metric(chart, {constant_field(2, 1.0), zero_field(2), zero_field(2),
                        expr_field("sin(x1)^2", 2)});
}

void BM_ScalarJet(benchmark::State& state) {
  FieldPtr f = expr_field("exp(x1)*sin(x2)+x1*x2^2", 2);
  Point p(2);
  p << 0.7, 1.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(f->jet(p));
  }
}
BENCHMARK(BM_ScalarJet);

void BM_MetricJets(benchmark::State& state) {
  Chart chart = sphere_chart();
  Metric g = sphere_metric(chart);
  const Point p = chart.points()[0];
  for (auto _ : state) {
    benchmark::DoNotOptimize(g.jets_at(p));
  }
}
BENCHMARK(BM_MetricJets);

void BM_Christoffel(benchmark::State& state) {
  Chart chart = sphere_chart();
  Metric g = sphere_metric(chart);
  Connection lc = levi_civita(g, false);
  const Point p = chart.points()[0];
  for (auto _ : state) {
    benchmark::DoNotOptimize(lc.at(p));
  }
}
BENCHMARK(BM_Christoffel);

void BM_Curvature(benchmark::State& state) {
  Chart chart = sphere_chart();
  Metric g = sphere_metric(chart);
  Connection lc = levi_civita(g, false);
  TensorField riemann = curvature(lc);
  const Point p = chart.points()[0];
  for (auto _ : state) {
    benchmark::DoNotOptimize(riemann.values_at(p));
  }
}
BENCHMARK(BM_Curvature);

void BM_CyclicResidual7(benchmark::State& state) {
  frobenius::PointwiseData d;
  d.g = Eigen::MatrixXd::Identity(7, 7);
  d.A = catalog::cross_product_A(7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(frobenius::cyclic_residual(d));
  }
}
BENCHMARK(BM_CyclicResidual7);

void BM_Rk4Steps100(benchmark::State& state) {
  dynamics::Rhs f = dynamics::bates_system();
  Eigen::VectorXd x0(4);
  x0 << 0.0, 0.5, 1.0, 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        dynamics::rk4_integrate(f, x0, 0.0, 0.1, 1e-3, 100));
  }
}
BENCHMARK(BM_Rk4Steps100);

void BM_IntegralFitSvd(benchmark::State& state) {
  scenario::DynamicsSetup setup = scenario::dynamics_setup("halphen");
  std::vector<dynamics::Trajectory> trajs =
      scenario::run_ensemble(setup, 4, 100, 2.0, 1e-3, 20);
  std::vector<dynamics::BasisFunction> basis = dynamics::monomial_basis(
      3, setup.basis_coords, setup.basis_labels, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        dynamics::fit_first_integral(setup.system, trajs, basis));
  }
}
BENCHMARK(BM_IntegralFitSvd);

void BM_RunScenarioConformal(benchmark::State& state) {
  const scenario::BuiltinScenario* b = scenario::find_builtin("conformal_r2");
  for (auto _ : state) {
    benchmark::DoNotOptimize(scenario::run_scenario_text(b->text));
  }
}
BENCHMARK(BM_RunScenarioConformal);

}  // namespace

BENCHMARK_MAIN();
