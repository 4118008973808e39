#include <benchmark/benchmark.h>

#include <random>

#include "monstr/agents.hpp"
#include "monstr/forward_model.hpp"
#include "monstr/mace.hpp"
#include "monstr/phantom.hpp"

namespace {

using namespace monstr;

struct Reference {
  Geometry geometry = Geometry::reference();
  Projector projector{geometry};
  BeamPhantom beam = cantilever_strain(BeamPhantomParams{}, geometry.grid());
  StrainSinogram data = synthesize_strain_sinogram(beam.strain, beam.mask, projector);
};

const Reference& reference() {
  static const Reference r;
  return r;
}

template <typename T>
T random_array(Shape2D shape, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  T a(shape);
  for (auto& v : a.values()) v = u(rng);
  return a;
}

void BM_ProjectorBuild(benchmark::State& state) {
  const Geometry g = Geometry::reference();
  for (auto _ : state) benchmark::DoNotOptimize(Projector(g));
}
BENCHMARK(BM_ProjectorBuild)->Unit(benchmark::kMillisecond);

void BM_Project(benchmark::State& state) {
  const auto& r = reference();
  const auto x = random_array<ScalarField>(r.geometry.grid(), 1);
  for (auto _ : state) benchmark::DoNotOptimize(r.projector.project(x));
}
BENCHMARK(BM_Project)->Unit(benchmark::kMicrosecond);

void BM_Backproject(benchmark::State& state) {
  const auto& r = reference();
  const auto y = random_array<Sinogram>(r.geometry.sinogram(), 2);
  for (auto _ : state) benchmark::DoNotOptimize(r.projector.backproject(y));
}
BENCHMARK(BM_Backproject)->Unit(benchmark::kMicrosecond);

void BM_DetectorAgent(benchmark::State& state) {
  const auto& r = reference();
  const RayWeights w = compute_weights(r.geometry, ElasticityModel());
  const Shape2D s = r.geometry.sinogram();
  const VirtualSinogramTensor p(random_array<Sinogram>(s, 3), random_array<Sinogram>(s, 4),
                                random_array<Sinogram>(s, 5));
  for (auto _ : state) benchmark::DoNotOptimize(detector_agent(p, r.data, w, 0.01));
}
BENCHMARK(BM_DetectorAgent)->Unit(benchmark::kMicrosecond);

void BM_ReconstructionSweep(benchmark::State& state) {
  const auto& r = reference();
  const ReconstructionAgent agent(r.projector, r.data.valid, 30.0, {1.2, 2.0, 1.0, 1.0}, 1,
                                  r.beam.mask);
  const auto target = random_array<Sinogram>(r.geometry.sinogram(), 6);
  const ScalarField warm(r.geometry.grid());
  for (auto _ : state) benchmark::DoNotOptimize(agent.reconstruct(target, warm));
}
BENCHMARK(BM_ReconstructionSweep)->Unit(benchmark::kMillisecond);

void BM_EquilibriumAgent(benchmark::State& state) {
  const auto& r = reference();
  const Shape2D g = r.geometry.grid();
  const TensorField2D s(random_array<ScalarField>(g, 7), random_array<ScalarField>(g, 8),
                        random_array<ScalarField>(g, 9));
  const EquilibriumAgent agent(0.15, 3, 1e-10, r.beam.mask);
  for (auto _ : state) benchmark::DoNotOptimize(agent(s));
}
BENCHMARK(BM_EquilibriumAgent)->Unit(benchmark::kMillisecond);

void BM_ConsensusIteration(benchmark::State& state) {
  const auto& r = reference();
  MaceOptions o;
  o.max_iters = 1;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        run_monstr(r.data, r.beam.mask, ElasticityModel(), AgentParams{}, o, r.projector));
}
BENCHMARK(BM_ConsensusIteration)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
