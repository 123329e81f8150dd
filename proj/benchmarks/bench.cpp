#include "crlab/asymptotics.hpp"
#include "crlab/catalog.hpp"
#include "crlab/functionals.hpp"
#include "crlab/immersion.hpp"
#include "crlab/moebius.hpp"
#include "crlab/quadrature.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

namespace {

crlab::AmbientVector axis(int k, double scale) {
  crlab::AmbientVector v = crlab::AmbientVector::Zero(6);
  v[k] = scale;
  return v;
}

void BM_weight(benchmark::State& state) {
  const crlab::MoebiusParam b{axis(0, 0.6)};
  const crlab::SpherePoint z{axis(2, 1.0)};
  for (auto _ : state) {
    benchmark::DoNotOptimize(crlab::weight(b, z));
  }
}
BENCHMARK(BM_weight);

void BM_apply_psi(benchmark::State& state) {
  const crlab::MoebiusParam b{axis(0, 0.6)};
  const crlab::SpherePoint z{axis(2, 1.0)};
  for (auto _ : state) {
    benchmark::DoNotOptimize(crlab::apply_psi_b(b, z));
  }
}
BENCHMARK(BM_apply_psi);

void BM_chart_jet(benchmark::State& state) {
  const crlab::ImmersionChart chart = crlab::make_chart("hexagonal_torus");
  Eigen::VectorXd u(2);
  u << 0.31, 0.77;
  for (auto _ : state) {
    benchmark::DoNotOptimize(crlab::evaluate_jet(chart, u));
  }
}
BENCHMARK(BM_chart_jet);

void BM_fundamental_data(benchmark::State& state) {
  crlab::ChartParams params;
  params.b = axis(3, 0.4);
  const crlab::ImmersionChart chart = crlab::make_chart("whitney_sphere", params);
  Eigen::VectorXd u(2);
  u << 1.1, 0.9;
  for (auto _ : state) {
    benchmark::DoNotOptimize(crlab::fundamental_data(chart, u));
  }
}
BENCHMARK(BM_fundamental_data);

void BM_volume_table(benchmark::State& state) {
  const crlab::ImmersionChart chart = crlab::make_chart("hexagonal_torus");
  const int res = static_cast<int>(state.range(0));
  const crlab::QuadratureGrid grid = crlab::build_grid(chart, res);
  for (auto _ : state) {
    benchmark::DoNotOptimize(crlab::build_volume_table(chart, grid));
  }
  state.SetItemsProcessed(state.iterations() * grid.node_count());
}
BENCHMARK(BM_volume_table)->Arg(32)->Arg(64)->Arg(128);

void BM_weighted_volume(benchmark::State& state) {
  const crlab::ImmersionChart chart = crlab::make_chart("hexagonal_torus");
  const int res = static_cast<int>(state.range(0));
  const crlab::VolumeTable table =
      crlab::build_volume_table(chart, crlab::build_grid(chart, res));
  const crlab::MoebiusParam b{axis(1, 0.5)};
  for (auto _ : state) {
    benchmark::DoNotOptimize(crlab::weighted_volume(table, b));
  }
  state.SetItemsProcessed(state.iterations() * table.points.rows());
}
BENCHMARK(BM_weighted_volume)->Arg(64)->Arg(256);

void BM_energies(benchmark::State& state) {
  const crlab::ImmersionChart chart = crlab::make_chart("hexagonal_torus");
  const crlab::QuadratureGrid grid = crlab::build_grid(chart, 32);
  for (auto _ : state) {
    benchmark::DoNotOptimize(crlab::energies(chart, grid, 1));
  }
}
BENCHMARK(BM_energies);

void BM_j_integral(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(crlab::j_integral(4, 7, 0.8, 0.9));
  }
}
BENCHMARK(BM_j_integral);

void BM_cr_volume(benchmark::State& state) {
  const crlab::ImmersionChart chart = crlab::make_chart("geodesic_sphere");
  const crlab::QuadratureGrid grid = crlab::build_grid(chart, 16);
  for (auto _ : state) {
    benchmark::DoNotOptimize(crlab::cr_volume(chart, grid));
  }
}
BENCHMARK(BM_cr_volume);

}  // namespace

BENCHMARK_MAIN();
