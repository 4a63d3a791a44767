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

#include "qmeas/random.h"

#include <algorithm>
#include <cmath>

#include "qmeas/errors.h"

namespace qmeas {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  auto splitmix = [](std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  };
  return splitmix(splitmix(splitmix(seed) ^ a) ^ b);
}

CVector gaussian_vector(Index dim, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CVector v(dim);
  for (Index k = 0; k < dim; ++k) {
    const double re = normal(rng);
    const double im = normal(rng);
    v[k] = Complex(re, im);
  }
  return v;
}

StateVector haar_state(Index dim, Rng& rng) { return StateVector::Normalized(gaussian_vector(dim, rng)); }

CMatrix haar_unitary(Index dim, Rng& rng) {
  CMatrix z(dim, dim);
  for (Index c = 0; c < dim; ++c) z.col(c) = gaussian_vector(dim, rng);
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ() * CMatrix::Identity(dim, dim);
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index k = 0; k < dim; ++k) {
    const Complex d = r(k, k);
    const double a = std::abs(d);
    if (a > 0.0) q.col(k) *= d / a;
  }
  return q;
}

CMatrix planted_hermitian(std::span<const double> levels, std::span<const Index> ranks, Rng& rng) {
  if (levels.size() != ranks.size()) throw InvalidArgument("planted_hermitian: levels and ranks differ in length");
  Index dim = 0;
  for (Index r : ranks) dim += r;
  Eigen::VectorXd diag(dim);
  Index pos = 0;
  for (std::size_t b = 0; b < ranks.size(); ++b) {
    for (Index k = 0; k < ranks[b]; ++k) diag[pos++] = levels[b];
  }
  const CMatrix u = haar_unitary(dim, rng);
  CMatrix h = u * diag.cast<Complex>().asDiagonal() * u.adjoint();
  return 0.5 * (h + h.adjoint());
}

std::vector<Index> random_block_ranks(Index dim, Index max_rank, Rng& rng) {
  if (dim < 1 || max_rank < 1) throw InvalidArgument("random_block_ranks: dim and max_rank must be positive");
  std::vector<Index> ranks;
  Index left = dim;
  while (left > 0) {
    std::uniform_int_distribution<Index> pick(1, std::min(left, max_rank));
    const Index r = pick(rng);
    ranks.push_back(r);
    left -= r;
  }
  std::shuffle(ranks.begin(), ranks.end(), rng);
  return ranks;
}

}  // namespace qmeas
