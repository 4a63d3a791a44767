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

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "qmeas/hilbert.h"
#include "qmeas/measurement.h"
#include "qmeas/spectral.h"

namespace qmeas {

enum class OracleMode { kExact, kSampled };

/// Quadratic form phi -> <g_m phi, phi> of the hidden post-measurement block
/// operator, available only through refinement-measurement statistics.
///
/// `call_index` identifies the call within one reconstruction; sampled oracles
/// derive their random stream from it, so evaluating calls in any order or
/// concurrently gives the same values.
class QuadraticFormOracle {
 public:
  virtual ~QuadraticFormOracle() = default;
  virtual double evaluate(const CVector& phi, std::size_t call_index) const = 0;
  virtual OracleMode mode() const = 0;
  virtual std::uint64_t shots() const { return 0; }
};

/// q(phi) = |<psi, phi>|^2.
class ExactOracle final : public QuadraticFormOracle {
 public:
  explicit ExactOracle(StateVector psi) : psi_(std::move(psi)) {}
  double evaluate(const CVector& phi, std::size_t call_index) const override;
  OracleMode mode() const override { return OracleMode::kExact; }

 private:
  StateVector psi_;
};

/// Frequency estimate of q(phi) from `shots` simulated measurements of a
/// refinement D of `obs` whose eigenbasis in H_block starts with phi. The rest
/// of that eigenbasis is completed with fill vectors drawn from
/// mix_seed(seed, block, call_index).
class SampledOracle final : public QuadraticFormOracle {
 public:
  SampledOracle(StateVector psi, Observable obs, std::size_t block, std::uint64_t shots, std::uint64_t seed);
  double evaluate(const CVector& phi, std::size_t call_index) const override;
  OracleMode mode() const override { return OracleMode::kSampled; }
  std::uint64_t shots() const override { return shots_; }

  /// The refinement eigenbasis of H_block used for a given call.
  std::vector<CVector> probe_basis(const CVector& phi, std::size_t call_index) const;

 private:
  StateVector psi_;
  Observable obs_;
  std::size_t block_;
  std::uint64_t shots_;
  std::uint64_t seed_;
};

struct OracleConfig {
  OracleMode mode = OracleMode::kExact;
  std::uint64_t shots = 0;
  std::uint64_t seed = 0;

  static OracleConfig Exact() { return {}; }
  static OracleConfig Sampled(std::uint64_t shots, std::uint64_t seed) { return {OracleMode::kSampled, shots, seed}; }
};

struct BlockReconstruction {
  CMatrix coefficients;  ///< G[n, j] = <e_n, g e_j> in the supplied basis
  CMatrix embedded;      ///< sum_{n,j} G[n, j] e_n e_j^dagger in the full space
  std::size_t oracle_calls = 0;
};

/// Rebuilds g_m on H_m from d_m^2 quadratic-form values:
///   G[n,n]    = q(e_n)
///   Re G[n,j] = q((e_n + e_j)/sqrt 2)   - (G[n,n] + G[j,j]) / 2
///   Im G[n,j] = (G[n,n] + G[j,j]) / 2   - q((e_n + i e_j)/sqrt 2)
/// and G[j,n] = conj(G[n,j]).
///
/// The imaginary probe follows from <phi, g phi> being conjugate-linear in the
/// first slot: with c = (1, i)/sqrt 2, q = (G00 + G11)/2 + (i G01 - i G10)/2 =
/// (G00 + G11)/2 - Im G01. Worked example: for P_m psi = (1, i)/sqrt 2 the
/// reference is [[1/2, -i/2], [i/2, 1/2]]; the oracle gives q(e_0) = q(e_1) =
/// 1/2 and q((e_0 + i e_1)/sqrt 2) = 1, so Im G01 = 1/2 - 1 = -1/2.
///
/// Throws OracleRangeError if an exact oracle returns a value outside
/// [-tol.norm, 1 + tol.norm].
BlockReconstruction reconstruct_block(const QuadraticFormOracle& oracle, std::span<const CVector> basis_m,
                                      const Tolerances& tol = {});

/// max |<v, g w>| over v, w drawn from basis_m and complement with at least
/// one of them in the complement. Throws NotOrthonormal.
double block_support_check(const CMatrix& g, std::span<const CVector> basis_m, std::span<const CVector> complement,
                           const Tolerances& tol = {});

struct ReconstructionReport {
  std::size_t block = 0;
  double outcome = 0.0;
  double probability = 0.0;      ///< ||P_m psi||^2 = Tr(reference)
  CMatrix reconstructed;         ///< unnormalised g_m in the full space
  CMatrix reference;             ///< P_m psi (x) P_m psi
  double max_abs_error = 0.0;
  double frobenius_error = 0.0;
  double support_error = 0.0;    ///< block_support_check of `reconstructed`
  std::uint64_t shots_used = 0;  ///< per oracle call; 0 in exact mode
  std::size_t oracle_calls = 0;

  /// G_m = g_m / ||P_m psi||^2 (unit trace).
  CMatrix normalized() const { return reconstructed / probability; }
};

/// Reconstructs g_m for every block with ||P_m psi||^2 > tol.prob and compares
/// it with the Lueders prediction P_m psi (x) P_m psi.
std::vector<ReconstructionReport> verify_theorem(const StateVector& psi, const Observable& obs,
                                                 const OracleConfig& config = OracleConfig::Exact(),
                                                 const Tolerances& tol = {});

/// sum_m g_m. Throws BlockMissing if some block with probability above
/// tol.prob has no report, DimMismatch if reports disagree on dimension.
DensityOperator assemble_nonselective(std::span<const ReconstructionReport> reports,
                                      std::span<const BornEntry> probabilities, const Tolerances& tol = {});

}  // namespace qmeas
