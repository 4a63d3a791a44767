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

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "qmeas/hilbert.h"

namespace qmeas {

using Rng = std::mt19937_64;

/// SplitMix64 finaliser; used to derive independent per-task streams from a
/// base seed so that results do not depend on evaluation order.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

/// Complex vector with i.i.d. standard normal real and imaginary parts.
CVector gaussian_vector(Index dim, Rng& rng);

/// Haar-random pure state.
StateVector haar_state(Index dim, Rng& rng);

/// Haar-random unitary (QR of a Ginibre matrix with the phase fix).
CMatrix haar_unitary(Index dim, Rng& rng);

/// Random Hermitian matrix U diag(levels repeated by rank) U^dagger with a
/// Haar-random U. levels.size() must equal ranks.size().
CMatrix planted_hermitian(std::span<const double> levels, std::span<const Index> ranks, Rng& rng);

/// Random composition of `dim` into block ranks each in [1, max_rank].
std::vector<Index> random_block_ranks(Index dim, Index max_rank, Rng& rng);

}  // namespace qmeas
