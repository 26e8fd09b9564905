#include "losguide/geometry.hpp"
#include "losguide/guidance.hpp"
#include "losguide/trajectory.hpp"

#include <benchmark/benchmark.h>

#include <vector>

using namespace losguide;

namespace {

void BM_LosRate(benchmark::State& state) {
  const Vec3 a(0.10, -0.05, 1.0), b(0.11, -0.04, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(los_rate(a, b, 1.0 / 30.0));
}
BENCHMARK(BM_LosRate);

void BM_TpnCommand(benchmark::State& state) {
  const GuidanceParams p;
  const auto los = make_los_sample(Vec3(0.11, -0.04, 1.0), 1.0, Vec3(0.10, -0.05, 1.0), 1.0 / 30.0);
  for (auto _ : state) benchmark::DoNotOptimize(tpn_command(los, 2.5, p));
}
BENCHMARK(BM_TpnCommand);

// Half a second of camera frames, the default range-rate window.
void BM_RangeRate(benchmark::State& state) {
  std::vector<RangeObservation> obs;
  for (int i = 0; i < 15; ++i) obs.push_back({i / 30.0, 12.0 - 2.5 * i / 30.0});
  for (auto _ : state) benchmark::DoNotOptimize(closing_velocity_from_ranges(obs));
}
BENCHMARK(BM_RangeRate);

void BM_ForecastTarget(benchmark::State& state) {
  ForecastInputs in;
  in.los0 = Vec3(0.2, 0.1, 1.0).normalized();
  in.los1 = Vec3(0.19, 0.1, 1.0).normalized();
  in.d0 = 12.0;
  in.d1 = 11.9;
  in.t1 = 1.0 / 30.0;
  in.uav_vel = Vec3(0.0, 0.0, 3.0);
  for (auto _ : state) benchmark::DoNotOptimize(forecast_target(in));
}
BENCHMARK(BM_ForecastTarget);

}  // namespace
