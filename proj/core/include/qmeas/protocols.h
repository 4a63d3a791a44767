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

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "qmeas/hilbert.h"
#include "qmeas/measurement.h"
#include "qmeas/spectral.h"

namespace qmeas {

/// How a von Neumann refinement picks its eigenbasis inside each eigenspace.
/// Coordinates are relative to the parent observable's own eigenbasis.
enum class RefinementChoice {
  kComputational,  ///< the parent eigenbasis itself
  kRotated,        ///< parent basis rotated by the unitary DFT of the block size (Hadamard for rank 2)
  kAligned,        ///< diagonalises P_i rho P_i; first vector is the Lueders vector
  kRandom,         ///< Haar-random rotation per block, from `seed`
  kCustom,         ///< `custom[i]` is the rotation used in block i
};

std::string_view to_string(RefinementChoice c);

struct ChannelConfig {
  Postulate postulate = Postulate::kLuders;
  RefinementChoice refinement = RefinementChoice::kComputational;
  std::uint64_t seed = 0;
  std::vector<CMatrix> custom;

  static ChannelConfig Luders() { return {}; }
  static ChannelConfig VonNeumann(RefinementChoice choice, std::uint64_t seed = 0) {
    return {Postulate::kVonNeumannRefined, choice, seed, {}};
  }
};

/// Per-block refinement eigenbases for `obs` acting on `rho` under `config`.
/// `stream` decorrelates random choices between successive measurements.
std::vector<std::vector<CVector>> refinement_bases(const Observable& obs, const DensityOperator& rho,
                                                   const ChannelConfig& config, std::uint64_t stream = 0);

/// Selective measurement of `obs` with outcome `outcome` under the configured
/// postulate. Under von Neumann only the coarse outcome is kept.
MeasurementRecord measure_selective(const Observable& obs, const DensityOperator& rho, std::size_t outcome,
                                    const ChannelConfig& config, std::uint64_t stream = 0,
                                    const Tolerances& tol = {});

/// Non-selective counterpart of measure_selective.
DensityOperator measure_nonselective(const Observable& obs, const DensityOperator& rho, const ChannelConfig& config,
                                     std::uint64_t stream = 0, const Tolerances& tol = {});

// ---------------------------------------------------------------------------
// Teleportation. Qubit 0 carries the unknown state, qubits 1 and 2 share
// Phi+; Bob holds qubit 2. Bell outcomes k = 0..3 are Phi+, Psi+, Phi-, Psi-
// with Bob's corrections I, X, Z, ZX.
// ---------------------------------------------------------------------------

/// Bell vector k in the |q0 q1> basis.
CVector bell_state(std::size_t k);

/// A = sum_k k (B_k (x) I) on three qubits; every eigenspace has rank 2.
Observable bell_observable();

/// Bob's Pauli correction for Bell outcome k.
CMatrix teleport_correction(std::size_t k);

struct RefinedBranch {
  std::size_t refined_index;
  double probability;  ///< conditional on the coarse outcome
  double fidelity;
};

struct TeleportationRun {
  StateVector input_state;
  ChannelConfig config;
  std::size_t outcome;
  double probability;
  DensityOperator bob_state;  ///< after correction
  double fidelity;
  std::vector<RefinedBranch> refined;  ///< von Neumann only: refined outcome recorded
};

TeleportationRun teleport(const StateVector& psi_in, const ChannelConfig& config, std::size_t outcome,
                          const Tolerances& tol = {});
std::vector<TeleportationRun> teleport_all(const StateVector& psi_in, const ChannelConfig& config,
                                           const Tolerances& tol = {});

/// Bob's reduced state averaged over Alice's outcomes, before any correction.
DensityOperator bob_marginal(const StateVector& psi_in, const ChannelConfig& config, const Tolerances& tol = {});

struct SweepRow {
  std::size_t basis_id;
  std::size_t outcome;
  double probability;
  double fidelity;
};

/// Basis 0 is the aligned refinement; bases 1..n_bases-1 are Haar-random with
/// streams mix_seed(seed, id). Throws InvalidArgument when n_bases == 0.
std::vector<SweepRow> refinement_sweep(const StateVector& psi_in, std::size_t n_bases, std::uint64_t seed,
                                       const Tolerances& tol = {});

// ---------------------------------------------------------------------------
// One-way computation on a linear cluster |+>^n with CZ between neighbours.
// Qubits 0..n-2 are measured in {(|0> +- e^{i t}|1>)/sqrt 2} (outcome 0 for
// +), with t = (-1)^x theta_k adapted to the running X byproduct x; the
// output sits on qubit n-1. Each step implements J(theta) = H diag(1,
// e^{-i theta}), so the target is J(theta_{n-2}) ... J(theta_0) |+>.
// ---------------------------------------------------------------------------

CMatrix j_gate(double theta);

struct ClusterRun {
  std::size_t cluster_size;
  std::vector<double> angles;
  std::vector<double> adapted_angles;
  std::vector<int> outcomes;    ///< measured bits s_k
  int byproduct_x = 0;          ///< output carries X^x Z^z before correction
  int byproduct_z = 0;
  double probability;
  DensityOperator output_state;  ///< after correction
  CMatrix target_unitary;
  StateVector target_state;
  double fidelity;
};

/// Runs one branch. angles.size() + 1 is the cluster size (3..5) and
/// `outcomes` fixes the measurement results. Throws ZeroProbabilityOutcome.
ClusterRun one_way_run(std::span<const double> angles, std::span<const int> outcomes, const ChannelConfig& config,
                       const Tolerances& tol = {});

/// All 2^(n-1) branches.
std::vector<ClusterRun> one_way_all_branches(std::span<const double> angles, const ChannelConfig& config,
                                             const Tolerances& tol = {});

/// Three-qubit instance with angles (beta, 0): target J(0) J(beta) = diag(1, e^{-i beta}) up to phase.
std::vector<ClusterRun> one_way_rotation(double beta, const ChannelConfig& config, const Tolerances& tol = {});

}  // namespace qmeas
