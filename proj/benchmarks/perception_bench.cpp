#include "losguide/perception.hpp"

#include <benchmark/benchmark.h>

using namespace losguide;

namespace {

const CameraIntrinsics kCam = CameraIntrinsics::simulation_default();

// Range in metres comes in as the benchmark argument; the blob shrinks with it.
void BM_RenderSphere(benchmark::State& state) {
  const Vec3 c(0.8, -0.4, static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(render_sphere(c, 0.5, kCam));
}
BENCHMARK(BM_RenderSphere)->Arg(5)->Arg(10)->Arg(30);

void BM_Centroid(benchmark::State& state) {
  const auto img = render_sphere(Vec3(0.8, -0.4, static_cast<double>(state.range(0))), 0.5, kCam);
  for (auto _ : state) benchmark::DoNotOptimize(centroid(img));
}
BENCHMARK(BM_Centroid)->Arg(5)->Arg(10)->Arg(30);

void BM_EstimateDepth(benchmark::State& state) {
  const auto mode = static_cast<EdgeMode>(state.range(1));
  const auto img = render_sphere(Vec3(2.0, 1.0, static_cast<double>(state.range(0))), 0.5, kCam);
  const auto det = centroid(img);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_depth(img, *det, kCam, 1.0, mode));
}
BENCHMARK(BM_EstimateDepth)
    ->ArgsProduct({{5, 15}, {static_cast<long>(EdgeMode::ExtremePixel), static_cast<long>(EdgeMode::Moment),
                             static_cast<long>(EdgeMode::SolidAngle)}});

}  // namespace
