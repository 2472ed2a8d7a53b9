#include <benchmark/benchmark.h>

#include "dvlfill/error_model.hpp"
#include "dvlfill/solver.hpp"

using namespace dvlfill;

static void BM_SolveFourBeams(benchmark::State& state) {
  const BeamGeometry geometry;
  RandomState rng(1);
  const Vec4 y = corrupt_beams(Vec3(1.2, 0.1, -0.05), geometry.h(), DvlErrorParams{}, rng);
  for (auto _ : state) benchmark::DoNotOptimize(solve_velocity(y, geometry.h()));
}
BENCHMARK(BM_SolveFourBeams);

static void BM_SolveWithRegressed(benchmark::State& state) {
  const BeamGeometry geometry;
  const BeamMask mask = BeamMask::with_missing({2, 4});
  const Vec2 measured(0.4, -0.3);
  const Vec2 regressed(0.35, -0.25);
  for (auto _ : state) benchmark::DoNotOptimize(solve_with_regressed(measured, regressed, mask, geometry.h()));
}
BENCHMARK(BM_SolveWithRegressed);

static void BM_CorruptBeams(benchmark::State& state) {
  const BeamGeometry geometry;
  const DvlErrorParams params;
  RandomState rng(2);
  const Vec3 v(1.2, 0.1, -0.05);
  for (auto _ : state) benchmark::DoNotOptimize(corrupt_beams(v, geometry.h(), params, rng));
}
BENCHMARK(BM_CorruptBeams);
