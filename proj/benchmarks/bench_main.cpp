#include "screenopt/analysis.hpp"
#include "screenopt/catalog.hpp"
#include "screenopt/constructor.hpp"
#include "screenopt/criteria.hpp"
#include "screenopt/design_io.hpp"
#include "screenopt/numerics.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace screenopt;

namespace {

const std::string kFixtures = SCREENOPT_FIXTURE_DIR;

void BM_SmwUpdate(benchmark::State& state) {
  const Design d = load_design_csv(kFixtures + "/k7n24_best.csv");
  const Matrix x1 = main_effect_matrix(d.settings);
  const Matrix v = *numerics::gram_inverse(x1);
  Vector x_new = x1.row(3).transpose();
  x_new(2) = -x_new(2);
  for (auto _ : state) benchmark::DoNotOptimize(numerics::smw_update(v, x1.row(3).transpose(), x_new, 1));
}
BENCHMARK(BM_SmwUpdate);

void BM_DirectInverse(benchmark::State& state) {
  const Design d = load_design_csv(kFixtures + "/k7n24_best.csv");
  const Matrix x1 = main_effect_matrix(d.settings);
  for (auto _ : state) benchmark::DoNotOptimize(numerics::gram_inverse(x1));
}
BENCHMARK(BM_DirectInverse);

void BM_EciTwoFactor(benchmark::State& state) {
  const Design d = load_design_csv(kFixtures + "/new_design.csv");
  const ModelSpec spec = ModelSpec::full(ModelOrder::TwoFactor, 5);
  EciParams p;
  p.r_min = 2;
  for (auto _ : state) benchmark::DoNotOptimize(eci(d, spec, p).total);
}
BENCHMARK(BM_EciTwoFactor);

void BM_EciQuadK7(benchmark::State& state) {
  const Design d = load_design_csv(kFixtures + "/k7n24_best.csv");
  const ModelSpec spec = ModelSpec::full(ModelOrder::FullQuadratic, 7);
  EciParams p;
  p.ell_min = 2;
  for (auto _ : state) benchmark::DoNotOptimize(eci(d, spec, p).total);
}
BENCHMARK(BM_EciQuadK7);

void BM_Rlof(benchmark::State& state) {
  const Design d = load_design_csv(kFixtures + "/new_design.csv");
  const ModelSpec spec = ModelSpec::full(ModelOrder::TwoFactor, 5);
  RlofParams p;
  p.p2 = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(rlof(d, spec, p));
}
BENCHMARK(BM_Rlof)->Arg(1)->Arg(2)->Arg(3);

void BM_AllSubsetsMbic(benchmark::State& state) {
  const Design d = adsd(6, 2);
  const ModelSpec spec = ModelSpec::full(ModelOrder::FullQuadratic, 6);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> z;
  const ModelMatrices mm = expand_model(d, spec);
  Vector y = 3.0 * mm.x1.col(1) - 3.0 * mm.x1.col(2) + 4.0 * mm.x1.col(3);
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += z(rng);
  AnalysisOptions o;
  o.heredity = Heredity::Weak;
  for (auto _ : state) benchmark::DoNotOptimize(analyze(y, d, spec, o).selection.mbic);
}
BENCHMARK(BM_AllSubsetsMbic);

void BM_SearchK5N12(benchmark::State& state) {
  SearchConfig c;
  c.k = 5;
  c.n = 12;
  c.spec = ModelSpec::full(ModelOrder::TwoFactor, 5);
  c.eci.r_min = 2;
  c.restarts = static_cast<std::size_t>(state.range(0));
  c.threads = 1;
  c.keep_pool = false;
  for (auto _ : state) benchmark::DoNotOptimize(search(c).best_eval.total);
}
BENCHMARK(BM_SearchK5N12)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
