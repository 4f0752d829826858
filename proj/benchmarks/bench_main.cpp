#include <map>

#include <benchmark/benchmark.h>

#include "spatialpu/evaluation.hpp"
#include "spatialpu/gibbs.hpp"
#include "spatialpu/logistic_kernel.hpp"
#include "spatialpu/observation.hpp"
#include "spatialpu/pooling.hpp"
#include "spatialpu/synthetic_city.hpp"

namespace {

using namespace spu;

struct Fixture {
  SpatialGraph graph;
  CovariateTable covariates;
  StateVector state;
  ReportVector reports;
  std::vector<double> psi;
};

// Square synthetic city with one semi-synthetic draw on it.
const Fixture& fixture(std::size_t side) {
  static std::map<std::size_t, Fixture> cache;
  auto it = cache.find(side);
  if (it != cache.end()) return it->second;
  CityOptions co;
  co.rows = co.cols = side;
  co.seed = 1;
  const auto city = make_synthetic_city(co);
  Fixture f{city_graph(city), {}, {}, {}, {}};
  f.covariates = city_covariates(city, f.graph);
  Rng rng(7);
  f.state = swendsen_wang_sample({-0.1, 0.2}, f.graph, random_state(f.graph.size(), rng), 200, rng);
  Eigen::VectorXd coeffs = Eigen::VectorXd::Constant(f.covariates.cols(), 0.3);
  f.psi = reporting_rates(ReportingParams::heterogeneous(-0.5, coeffs), f.covariates);
  f.reports = simulate_reports(f.state, f.psi, rng);
  return cache.emplace(side, std::move(f)).first->second;
}

void BM_SwendsenWangSweep(benchmark::State& st) {
  const auto& f = fixture(static_cast<std::size_t>(st.range(0)));
  SwendsenWang sw(f.graph);
  StateVector s = f.state;
  Rng rng(1);
  for (auto _ : st) sw.sweep(s, {-0.1, 0.2}, 1, rng);
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(f.graph.size()));
}
BENCHMARK(BM_SwendsenWangSweep)->Arg(16)->Arg(32)->Arg(48);

void BM_SveaUpdate(benchmark::State& st) {
  const auto& f = fixture(static_cast<std::size_t>(st.range(0)));
  SveaUpdater svea(f.graph, 50);
  const PriorConfig prior;
  IsingParams p{-0.1, 0.2};
  Rng rng(2);
  for (auto _ : st) p = svea.update(p, f.state, prior, 0.05, rng).params;
}
BENCHMARK(BM_SveaUpdate)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_LatentSweep(benchmark::State& st) {
  const auto& f = fixture(static_cast<std::size_t>(st.range(0)));
  StateVector s = f.state;
  Rng rng(3);
  for (auto _ : st) sample_latent_states(s, f.reports, {-0.1, 0.2}, f.psi, f.graph, rng);
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(f.graph.size()));
}
BENCHMARK(BM_LatentSweep)->Arg(16)->Arg(48);

void BM_LogisticUpdate(benchmark::State& st) {
  const auto& f = fixture(static_cast<std::size_t>(st.range(0)));
  const PriorConfig prior;
  Eigen::VectorXd alphas = Eigen::VectorXd::Zero(f.covariates.cols() + 1);
  Rng rng(4);
  for (auto _ : st) alphas = sample_heterogeneous_alphas(f.state, f.reports, f.covariates, alphas, prior, 50, rng);
}
BENCHMARK(BM_LogisticUpdate)->Arg(16)->Arg(48)->Unit(benchmark::kMicrosecond);

void BM_Auc(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  Rng rng(5);
  std::vector<double> scores(n);
  std::vector<std::uint8_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = uniform01(rng) < 0.3;
    scores[i] = uniform01(rng) + 0.3 * labels[i];
  }
  for (auto _ : st) benchmark::DoNotOptimize(auc(scores, labels));
}
BENCHMARK(BM_Auc)->Arg(2221)->Arg(20000);

void BM_Pool(benchmark::State& st) {
  std::vector<GaussianFit> fits;
  for (int k = 0; k < st.range(0); ++k) fits.push_back({0.1 * k, 0.4 + 0.1 * k, {}});
  for (auto _ : st) benchmark::DoNotOptimize(pool(fits, 0.0, 1.0));
}
BENCHMARK(BM_Pool)->Arg(2)->Arg(4);

}  // namespace

BENCHMARK_MAIN();
