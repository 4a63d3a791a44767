// Copyright 2026 The qmeas Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <array>
#include <numbers>

#include "qmeas/protocols.h"
#include "qmeas/random.h"
#include "qmeas/reconstruct.h"
#include "qmeas/spectral.h"

namespace qmeas {
namespace {

CMatrix planted_for(Index dim, Rng& rng) {
  const auto ranks = random_block_ranks(dim, 4, rng);
  std::vector<double> levels;
  for (std::size_t b = 0; b < ranks.size(); ++b) levels.push_back(static_cast<double>(b));
  return planted_hermitian(levels, ranks, rng);
}

void BM_SpectralDecompose(benchmark::State& state) {
  Rng rng(1);
  const CMatrix a = planted_for(state.range(0), rng);
  for (auto _ : state) benchmark::DoNotOptimize(spectral_decompose(a));
}
BENCHMARK(BM_SpectralDecompose)->RangeMultiplier(2)->Range(4, 64);

void BM_ReconstructBlockExact(benchmark::State& state) {
  Rng rng(2);
  const Index dm = state.range(0);
  const CMatrix u = haar_unitary(2 * dm, rng);
  std::vector<CVector> basis;
  for (Index c = 0; c < dm; ++c) basis.push_back(u.col(c));
  const ExactOracle oracle(haar_state(2 * dm, rng));
  for (auto _ : state) benchmark::DoNotOptimize(reconstruct_block(oracle, basis));
}
BENCHMARK(BM_ReconstructBlockExact)->DenseRange(1, 8);

void BM_ReconstructBlockSampled(benchmark::State& state) {
  Rng rng(3);
  const std::array<double, 2> levels{0.0, 1.0};
  const std::array<Index, 2> ranks{4, 4};
  const Observable obs = spectral_decompose(planted_hermitian(levels, ranks, rng));
  const SampledOracle oracle(haar_state(8, rng), obs, 0, static_cast<std::uint64_t>(state.range(0)), 7);
  for (auto _ : state) benchmark::DoNotOptimize(reconstruct_block(oracle, obs.eigenbasis(0)));
}
BENCHMARK(BM_ReconstructBlockSampled)->RangeMultiplier(100)->Range(1000, 1'000'000);

void BM_VerifyTheorem(benchmark::State& state) {
  Rng rng(4);
  const Index dim = state.range(0);
  const Observable obs = spectral_decompose(planted_for(dim, rng));
  const StateVector psi = haar_state(dim, rng);
  for (auto _ : state) benchmark::DoNotOptimize(verify_theorem(psi, obs));
}
BENCHMARK(BM_VerifyTheorem)->RangeMultiplier(2)->Range(4, 32);

void BM_TeleportAll(benchmark::State& state) {
  Rng rng(5);
  const StateVector psi = haar_state(2, rng);
  const ChannelConfig config =
      state.range(0) == 0 ? ChannelConfig::Luders() : ChannelConfig::VonNeumann(RefinementChoice::kRandom, 9);
  for (auto _ : state) benchmark::DoNotOptimize(teleport_all(psi, config));
}
BENCHMARK(BM_TeleportAll)->Arg(0)->Arg(1);

void BM_OneWayRotation(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(one_way_rotation(std::numbers::pi / 3, ChannelConfig::Luders()));
}
BENCHMARK(BM_OneWayRotation);

}  // namespace
}  // namespace qmeas

BENCHMARK_MAIN();
