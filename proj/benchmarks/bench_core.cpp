#include <benchmark/benchmark.h>

#include "statrcm/estimate.hpp"
#include "statrcm/mc_study.hpp"
#include "statrcm/simulate.hpp"
#include "statrcm/synthetic.hpp"

namespace {

using namespace statrcm;

struct Inputs {
  ModelParams params = published_estimates();
  data::CovariateTable cov = data::synthetic_historical_covariates();
  data::ObservationTable obs = simulate::simulate_dataset(params, cov, data::synthetic_initial_state(params), 1);
};

const Inputs& inputs() {
  static const Inputs in;
  return in;
}

void BM_FilterLoglik(benchmark::State& state) {
  const Inputs& in = inputs();
  for (auto _ : state) benchmark::DoNotOptimize(estimate::safe_log_likelihood(in.params, in.obs, in.cov));
}
BENCHMARK(BM_FilterLoglik);

void BM_Smoother(benchmark::State& state) {
  const Inputs& in = inputs();
  for (auto _ : state) benchmark::DoNotOptimize(ssm::ekf_smooth(in.params, in.obs, in.cov));
}
BENCHMARK(BM_Smoother);

void BM_SimulatePaths(benchmark::State& state) {
  const Inputs& in = inputs();
  simulate::Scenario sc;
  sc.covariates.rows.push_back(in.cov.rows.back());
  for (const auto& r : data::synthetic_mitigation_scenario(2023).rows) sc.covariates.rows.push_back(r);
  sc.initial = ssm::ekf_filter(in.params, in.obs, in.cov).steps.back().filtered;
  const simulate::ParameterDistribution dist(in.params);
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(simulate::simulate_paths(dist, sc, simulate::UncertaintySetup::ParamStateMeas, n, 7));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulatePaths)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
