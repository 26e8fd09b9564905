#include "losguide/engagement.hpp"

#include <benchmark/benchmark.h>

using namespace losguide;

namespace {

// One full engagement per iteration, per guidance method on a figure-8.
void BM_RunTrial(benchmark::State& state) {
  ExperimentConfig cfg;
  cfg.method = static_cast<GuidanceMethod>(state.range(0));
  cfg.path = PathKind::Figure8;
  cfg.sim.ideal_dynamics = state.range(1) != 0;
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(run_trial(cfg, seed++));
  state.SetLabel(std::string(to_string(cfg.method)) + (cfg.sim.ideal_dynamics ? " ideal" : " full"));
}
BENCHMARK(BM_RunTrial)
    ->ArgsProduct({{static_cast<long>(GuidanceMethod::Tpn), static_cast<long>(GuidanceMethod::Hybrid),
                    static_cast<long>(GuidanceMethod::ForecastTrajectory)},
                   {0, 1}})
    ->Unit(benchmark::kMillisecond);

}  // namespace
