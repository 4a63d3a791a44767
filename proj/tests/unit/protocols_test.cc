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

#include "qmeas/protocols.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "qmeas/errors.h"
#include "qmeas/random.h"
#include "test_util.h"

namespace qmeas {
namespace {

using testing::basis;
using testing::C;
using testing::cmat;
using testing::cvec;
using testing::MatrixNear;
using testing::Vec;

const double kH = 1.0 / std::sqrt(2.0);
const double kPi = std::numbers::pi;

// --- independent oracles -----------------------------------------------------

Vec naive_bell(std::size_t k) {
  switch (k) {
    case 0: return {kH, 0, 0, kH};
    case 1: return {0, kH, kH, 0};
    case 2: return {kH, 0, 0, -kH};
    default: return {0, kH, -kH, 0};
  }
}

// Bob's unnormalised qubit after Alice projects q0 q1 onto Bell vector k.
Vec naive_bob_branch(const Vec& psi, std::size_t k) {
  const Vec phi_plus{kH, 0, 0, kH};
  const Vec full = testing::kron(psi, phi_plus);
  const Vec b = naive_bell(k);
  Vec out(2, 0.0);
  for (std::size_t j = 0; j < 2; ++j) {
    for (std::size_t a = 0; a < 4; ++a) out[j] += std::conj(b[a]) * full[a * 2 + j];
  }
  return out;
}

// Applies I, X, Z or ZX to a qubit vector.
Vec naive_correct(Vec v, std::size_t k) {
  if (k == 1 || k == 3) std::swap(v[0], v[1]);
  if (k == 2 || k == 3) v[1] = -v[1];
  return v;
}

// Pure-state one-way simulation by contracting measured qubits one at a time.
struct NaiveBranch {
  double probability;
  Vec output;  // corrected, normalised
};

NaiveBranch naive_one_way(const std::vector<double>& angles, const std::vector<int>& outcomes) {
  const std::size_t n = angles.size() + 1;
  Vec v(std::size_t{1} << n, C(std::pow(0.5, 0.5 * static_cast<double>(n))));
  for (std::size_t q = 0; q + 1 < n; ++q) {
    for (std::size_t b = 0; b < v.size(); ++b) {
      const bool hi = (b >> (n - 1 - q)) & 1, lo = (b >> (n - 2 - q)) & 1;
      if (hi && lo) v[b] = -v[b];
    }
  }
  double prob = 1.0;
  int x = 0, z = 0;
  for (std::size_t k = 0; k < angles.size(); ++k) {
    const double t = (x ? -1.0 : 1.0) * angles[k];
    const double sign = outcomes[k] ? -1.0 : 1.0;
    const C m0 = kH, m1 = sign * kH * std::polar(1.0, t);
    const std::size_t rest = v.size() / 2;
    Vec next(rest);
    for (std::size_t r = 0; r < rest; ++r) next[r] = std::conj(m0) * v[r] + std::conj(m1) * v[rest + r];
    double p = 0.0;
    for (const auto& a : next) p += std::norm(a);
    prob *= p;
    for (auto& a : next) a /= std::sqrt(p);
    v = next;
    const int nx = outcomes[k] ^ z;
    z = x;
    x = nx;
  }
  if (x) std::swap(v[0], v[1]);
  if (z) v[1] = -v[1];
  return {prob, v};
}

Vec naive_target(const std::vector<double>& angles) {
  Vec v{kH, kH};
  for (double a : angles) {
    const C u0 = v[0], u1 = v[1] * std::polar(1.0, -a);
    v = {kH * (u0 + u1), kH * (u0 - u1)};
  }
  return v;
}

double overlap2(const Vec& a, const CVector& b) {
  C acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += std::conj(a[k]) * b[static_cast<Index>(k)];
  return std::norm(acc);
}

StateVector plus_state() { return StateVector(cvec({kH, kH})); }

// --- teleportation ------------------------------------------------------------

TEST(protocols, bell_states_and_observable) {
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_TRUE(MatrixNear(bell_state(k), testing::cvec({naive_bell(k)[0], naive_bell(k)[1], naive_bell(k)[2],
                                                          naive_bell(k)[3]}),
                           1e-15));
  }
  const Observable a = bell_observable();
  ASSERT_EQ(a.size(), 4u);
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_EQ(a.eigenvalue(k), static_cast<double>(k));
    EXPECT_EQ(a.rank(k), 2);
  }
  EXPECT_TRUE(MatrixNear(teleport_correction(3), cmat({{0, 1}, {-1, 0}}), 0));
}

TEST(protocols, teleport_basis_inputs_under_luders) {
  for (Index b = 0; b < 2; ++b) {
    for (std::size_t k = 0; k < 4; ++k) {
      const auto run = teleport(StateVector::Basis(2, b), ChannelConfig::Luders(), k);
      EXPECT_NEAR(run.probability, 0.25, 1e-15);
      EXPECT_NEAR(run.fidelity, 1.0, 1e-14);
      EXPECT_TRUE(run.refined.empty());
    }
  }
}

TEST(protocols, teleport_matches_naive_contraction) {
  Rng rng(17);
  for (int t = 0; t < 100; ++t) {
    const StateVector psi = haar_state(2, rng);
    const Vec pv = testing::to_vec(psi.amplitudes());
    for (std::size_t k = 0; k < 4; ++k) {
      const Vec b = naive_bob_branch(pv, k);
      const double p = std::norm(b[0]) + std::norm(b[1]);
      Vec bob = naive_correct(b, k);
      for (auto& a : bob) a /= std::sqrt(p);
      const auto run = teleport(psi, ChannelConfig::Luders(), k);
      EXPECT_NEAR(run.probability, p, 1e-12);
      const CVector bv = testing::cvec({bob[0], bob[1]});
      EXPECT_TRUE(MatrixNear(run.bob_state.matrix(), bv * bv.adjoint(), 1e-12));
    }
  }
}

TEST(protocols, teleport_fails_under_computational_refinement) {
  const StateVector plus = plus_state();
  const Vec pv = testing::to_vec(plus.amplitudes());
  for (std::size_t k = 0; k < 4; ++k) {
    // The computational refinement also reads Bob's qubit in {|0>, |1>}.
    const Vec b = naive_bob_branch(pv, k);
    const double p = std::norm(b[0]) + std::norm(b[1]);
    const std::array<double, 2> w{std::norm(b[0]) / p, std::norm(b[1]) / p};
    // After the Pauli correction Bob holds a computational-basis mixture, so
    // overlap with |+> is (w0 + w1)/2.
    const double expected = 0.5 * (w[0] + w[1]);
    const auto run = teleport(plus, ChannelConfig::VonNeumann(RefinementChoice::kComputational), k);
    EXPECT_NEAR(run.fidelity, expected, 1e-12);
    EXPECT_LT(run.fidelity, 1.0 - 1e-3);
    ASSERT_EQ(run.refined.size(), 2u);
    double total = 0.0;
    for (const auto& br : run.refined) total += br.probability;
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(protocols, teleport_rejects_bad_outcome) {
  EXPECT_THROW(teleport(plus_state(), ChannelConfig::Luders(), 4), InvalidArgument);
  EXPECT_THROW(teleport(StateVector::Basis(3, 0), ChannelConfig::Luders(), 0), DimMismatch);
}

TEST(protocols, teleport_properties_over_haar_inputs) {
  Rng rng(100);
  for (int t = 0; t < 100; ++t) {
    const StateVector psi = haar_state(2, rng);
    for (const auto& run : teleport_all(psi, ChannelConfig::Luders())) {
      EXPECT_NEAR(run.probability, 0.25, 1e-12);
      EXPECT_NEAR(run.fidelity, 1.0, 1e-12);
    }
    for (const auto& run : teleport_all(psi, ChannelConfig::VonNeumann(RefinementChoice::kAligned))) {
      EXPECT_NEAR(run.probability, 0.25, 1e-12);
      EXPECT_NEAR(run.fidelity, 1.0, 1e-12);
    }
    for (const auto& run : teleport_all(psi, ChannelConfig::VonNeumann(RefinementChoice::kRandom, t))) {
      EXPECT_NEAR(run.probability, 0.25, 1e-12);
    }
  }
}

TEST(protocols, bob_marginal_is_maximally_mixed) {
  Rng rng(101);
  const CMatrix half = 0.5 * CMatrix::Identity(2, 2);
  const std::array<ChannelConfig, 4> configs{ChannelConfig::Luders(),
                                             ChannelConfig::VonNeumann(RefinementChoice::kComputational),
                                             ChannelConfig::VonNeumann(RefinementChoice::kRotated),
                                             ChannelConfig::VonNeumann(RefinementChoice::kAligned)};
  for (int t = 0; t < 100; ++t) {
    const StateVector psi = haar_state(2, rng);
    for (const auto& c : configs) EXPECT_TRUE(MatrixNear(bob_marginal(psi, c).matrix(), half, 1e-10));
  }
}

// A refinement whose eigenvectors pair each Bell vector with a different,
// block-dependent basis of Bob's qubit is itself a joint measurement on
// Bob's side, so his averaged state need not stay maximally mixed.
TEST(protocols, bob_marginal_moves_when_refinement_reads_bob_per_block) {
  Rng rng(102);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const StateVector psi = haar_state(2, rng);
    const auto m = bob_marginal(psi, ChannelConfig::VonNeumann(RefinementChoice::kRandom, t));
    EXPECT_NEAR(m.matrix().trace().real(), 1.0, 1e-12);
    EXPECT_GE(hermitian_eigenvalues(m.matrix()).minCoeff(), -1e-12);
    worst = std::max(worst, max_abs_diff(m.matrix(), 0.5 * CMatrix::Identity(2, 2)));
  }
  EXPECT_GT(worst, 1e-3);
}

TEST(protocols, sweep_rows_and_spread) {
  const StateVector psi(cvec({std::cos(kPi / 7), std::polar(std::sin(kPi / 7), kPi / 5)}));
  const auto one = refinement_sweep(psi, 1, 42);
  ASSERT_EQ(one.size(), 4u);
  for (const auto& r : one) {
    EXPECT_EQ(r.basis_id, 0u);
    EXPECT_NEAR(r.fidelity, 1.0, 1e-12);
  }
  EXPECT_THROW(refinement_sweep(psi, 0, 42), InvalidArgument);

  const auto rows = refinement_sweep(psi, 50, 42);
  ASSERT_EQ(rows.size(), 200u);
  double lo = 1.0, hi = 0.0;
  for (const auto& r : rows) {
    EXPECT_NEAR(r.probability, 0.25, 1e-12);
    lo = std::min(lo, r.fidelity);
    hi = std::max(hi, r.fidelity);
  }
  EXPECT_GT(hi - lo, 1e-3);
  EXPECT_NEAR(hi, 1.0, 1e-12);

  const auto again = refinement_sweep(psi, 50, 42);
  for (std::size_t k = 0; k < rows.size(); ++k) EXPECT_EQ(rows[k].fidelity, again[k].fidelity);
}

// --- one-way computation ------------------------------------------------------

TEST(protocols, j_gate_examples) {
  EXPECT_TRUE(MatrixNear(j_gate(0), cmat({{kH, kH}, {kH, -kH}}), 1e-15));
  EXPECT_TRUE(MatrixNear(j_gate(0) * j_gate(0), CMatrix::Identity(2, 2), 1e-15));
  const CMatrix j = j_gate(0.7);
  EXPECT_TRUE(MatrixNear(j.adjoint() * j, CMatrix::Identity(2, 2), 1e-15));
}

TEST(protocols, one_way_identity_rotation_returns_plus) {
  for (const auto& run : one_way_rotation(0.0, ChannelConfig::Luders())) {
    EXPECT_NEAR(run.fidelity, 1.0, 1e-12);
    EXPECT_NEAR(run.probability, 0.25, 1e-12);
    EXPECT_NEAR(overlap2(Vec{kH, kH}, run.target_state.amplitudes()), 1.0, 1e-12);
  }
}

TEST(protocols, one_way_quarter_turn_matches_direct_target) {
  const Vec expected{kH, C(0, -kH)};
  const auto runs = one_way_rotation(kPi / 2, ChannelConfig::Luders());
  ASSERT_EQ(runs.size(), 4u);
  for (const auto& run : runs) {
    EXPECT_NEAR(overlap2(expected, run.target_state.amplitudes()), 1.0, 1e-12);
    EXPECT_NEAR(run.fidelity, 1.0, 1e-12);
  }
}

TEST(protocols, one_way_matches_naive_contraction) {
  Rng rng(55);
  std::uniform_real_distribution<double> angle(0.0, 2 * kPi);
  for (std::size_t n = 3; n <= 5; ++n) {
    for (int t = 0; t < 5; ++t) {
      std::vector<double> angles(n - 1);
      for (auto& a : angles) a = angle(rng);
      const Vec target = naive_target(angles);
      for (const auto& run : one_way_all_branches(angles, ChannelConfig::Luders())) {
        const auto naive = naive_one_way(angles, run.outcomes);
        EXPECT_NEAR(run.probability, naive.probability, 1e-12);
        const CVector nv = testing::cvec({naive.output[0], naive.output[1]});
        EXPECT_TRUE(MatrixNear(run.output_state.matrix(), nv * nv.adjoint(), 1e-10));
        EXPECT_NEAR(overlap2(target, run.target_state.amplitudes()), 1.0, 1e-12);
        EXPECT_NEAR(run.fidelity, 1.0, 1e-10);
      }
    }
  }
}

TEST(protocols, one_way_adaptation_and_byproducts) {
  const std::array<double, 2> angles{0.3, 0.9};
  const std::array<int, 2> outcomes{1, 0};
  const auto run = one_way_run(angles, outcomes, ChannelConfig::Luders());
  EXPECT_EQ(run.adapted_angles[0], 0.3);
  EXPECT_EQ(run.adapted_angles[1], -0.9);
  EXPECT_EQ(run.byproduct_x, 0);
  EXPECT_EQ(run.byproduct_z, 1);
  EXPECT_EQ(run.cluster_size, 3u);
}

TEST(protocols, one_way_rejects_bad_input) {
  const std::array<double, 1> short_angles{0.1};
  const std::array<int, 1> one{0};
  EXPECT_THROW(one_way_run(short_angles, one, ChannelConfig::Luders()), InvalidArgument);
  const std::array<double, 2> angles{0.1, 0.2};
  const std::array<int, 2> bad{0, 2};
  EXPECT_THROW(one_way_run(angles, bad, ChannelConfig::Luders()), InvalidArgument);
  const std::array<int, 1> too_few{0};
  EXPECT_THROW(one_way_run(angles, too_few, ChannelConfig::Luders()), InvalidArgument);
}

TEST(protocols, one_way_breaks_under_computational_refinement) {
  // The refinement reads every unmeasured qubit in the computational basis,
  // leaving the output diagonal there; the target diag(1, e^{-i beta})|+> is
  // unbiased with respect to that basis, so every branch has fidelity 1/2.
  for (const auto& run : one_way_rotation(kPi / 3, ChannelConfig::VonNeumann(RefinementChoice::kComputational))) {
    EXPECT_NEAR(run.fidelity, 0.5, 1e-12);
    EXPECT_LT(run.fidelity, 1.0 - 1e-3);
  }
}

TEST(protocols, one_way_random_angles_and_aligned_refinement) {
  Rng rng(66);
  std::uniform_real_distribution<double> angle(0.0, 2 * kPi);
  for (int t = 0; t < 20; ++t) {
    const double beta = angle(rng);
    double total = 0.0;
    for (const auto& run : one_way_rotation(beta, ChannelConfig::Luders())) {
      EXPECT_NEAR(run.fidelity, 1.0, 1e-9);
      total += run.probability;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    for (const auto& run : one_way_rotation(beta, ChannelConfig::VonNeumann(RefinementChoice::kAligned))) {
      EXPECT_NEAR(run.fidelity, 1.0, 1e-9);
    }
  }
}

// --- channel configuration ----------------------------------------------------

TEST(protocols, measure_dispatch_matches_postulates) {
  Rng rng(70);
  const std::array<double, 2> levels{0.0, 1.0};
  const std::array<Index, 2> ranks{3, 2};
  const Observable obs = spectral_decompose(planted_hermitian(levels, ranks, rng));
  const DensityOperator rho = pure_to_density(haar_state(5, rng));
  EXPECT_TRUE(MatrixNear(measure_nonselective(obs, rho, ChannelConfig::Luders()).matrix(),
                         luders_nonselective(obs, rho).matrix(), 1e-12));
  const auto cfg = ChannelConfig::VonNeumann(RefinementChoice::kComputational);
  EXPECT_TRUE(MatrixNear(measure_nonselective(obs, rho, cfg).matrix(),
                         vn_refined_nonselective(build_refinement(obs), rho).matrix(), 1e-12));
  const auto aligned = measure_selective(obs, rho, 0, ChannelConfig::VonNeumann(RefinementChoice::kAligned));
  EXPECT_LE(trace_distance(aligned.post_state.matrix(), luders_selective(obs, rho, 0).post_state.matrix()), 1e-10);
}

TEST(protocols, refinement_bases_span_each_eigenspace) {
  Rng rng(71);
  const std::array<double, 3> levels{0.0, 1.0, 2.0};
  const std::array<Index, 3> ranks{3, 1, 2};
  const Observable obs = spectral_decompose(planted_hermitian(levels, ranks, rng));
  const DensityOperator rho = pure_to_density(haar_state(6, rng));
  ChannelConfig custom = ChannelConfig::VonNeumann(RefinementChoice::kCustom);
  for (std::size_t i = 0; i < obs.size(); ++i) custom.custom.push_back(haar_unitary(obs.rank(i), rng));
  for (const auto& cfg : {ChannelConfig::VonNeumann(RefinementChoice::kComputational),
                          ChannelConfig::VonNeumann(RefinementChoice::kRotated),
                          ChannelConfig::VonNeumann(RefinementChoice::kAligned),
                          ChannelConfig::VonNeumann(RefinementChoice::kRandom, 3), custom}) {
    const auto bases = refinement_bases(obs, rho, cfg);
    ASSERT_EQ(bases.size(), obs.size());
    for (std::size_t i = 0; i < obs.size(); ++i) {
      EXPECT_LE(orthonormality_defect(bases[i]), 1e-10);
      EXPECT_TRUE(MatrixNear(projector_onto(bases[i], 6).matrix(), obs.projector(i).matrix(), 1e-10));
    }
  }
  // Rank-2 rotation is the Hadamard.
  const auto rot = refinement_bases(obs, rho, ChannelConfig::VonNeumann(RefinementChoice::kRotated))[2];
  const auto& e = obs.eigenbasis(2);
  EXPECT_TRUE(MatrixNear(rot[0], kH * (e[0] + e[1]), 1e-12));
  EXPECT_TRUE(MatrixNear(rot[1], kH * (e[0] - e[1]), 1e-12));
}

}  // namespace
}  // namespace qmeas
