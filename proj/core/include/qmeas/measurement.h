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
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "qmeas/hilbert.h"
#include "qmeas/spectral.h"

namespace qmeas {

enum class Postulate { kLuders, kVonNeumannRefined, kPpNondegenerate };

std::string_view to_string(Postulate p);

struct BornEntry {
  double outcome;
  double probability;
};

struct MeasurementRecord {
  double outcome;
  double probability;
  DensityOperator post_state;
  Postulate postulate;
  std::optional<std::size_t> selection;
};

/// p_i = Tr(rho P_i), one entry per eigenvalue in ascending order.
std::vector<BornEntry> born_probabilities(const Observable& obs, const DensityOperator& rho);
std::vector<BornEntry> born_probabilities(const Observable& obs, const StateVector& psi);

/// Lueders selective transition psi -> P_i psi / ||P_i psi||.
/// Throws ZeroProbabilityOutcome when ||P_i psi||^2 <= tol.prob.
MeasurementRecord luders_selective(const Observable& obs, const StateVector& psi, std::size_t outcome,
                                   const Tolerances& tol = {});
/// Mixed-state form: P_i rho P_i / Tr(rho P_i).
MeasurementRecord luders_selective(const Observable& obs, const DensityOperator& rho, std::size_t outcome,
                                   const Tolerances& tol = {});

/// sum_i P_i rho P_i.
DensityOperator luders_nonselective(const Observable& obs, const DensityOperator& rho, const Tolerances& tol = {});

/// One record per eigenvector for a nondegenerate observable.
/// Throws DegenerateSpectrum if any eigenspace has rank > 1.
std::vector<MeasurementRecord> pp_nondegenerate(const Observable& obs, const StateVector& psi,
                                                const Tolerances& tol = {});

/// gamma for refined outcome n of parent outcome i, given the largest rank
/// among the eigenspaces.
using GammaStrategy = std::function<double(std::size_t i, std::size_t n, std::size_t max_rank)>;

/// gamma_in = i + n / (2 max_n + 2) with max_n = max_rank - 1. Every gamma lies
/// in [i, i + 1/2), so floor(gamma) recovers the parent index.
double default_gamma(std::size_t i, std::size_t n, std::size_t max_rank);

/// A nondegenerate observable D = sum_i sum_n gamma_in P_{e_in} that refines
/// a degenerate parent A: {e_in}_n is an orthonormal basis of H_i, every
/// gamma_in is distinct, and coarse_grain(gamma_in) == alpha_i.
class RefinementObservable {
 public:
  const Observable& parent() const { return parent_; }
  Index dim() const { return parent_.dim(); }
  std::size_t blocks() const { return vectors_.size(); }

  const std::vector<CVector>& eigenvectors(std::size_t i) const { return vectors_.at(i); }
  const std::vector<double>& gammas(std::size_t i) const { return gammas_.at(i); }

  /// The coarse-graining function f with f(gamma_in) = alpha_i. Values that
  /// are not eigenvalues of D yield NaN.
  double coarse_grain(double gamma) const;

  /// sum_i sum_n gamma_in e_in e_in^dagger.
  CMatrix matrix() const;

  /// D as a (nondegenerate) Observable.
  Observable as_observable(const Tolerances& tol = {}) const;

 private:
  friend RefinementObservable build_refinement(const Observable&, const std::optional<std::vector<std::vector<CVector>>>&,
                                               const GammaStrategy&, const Tolerances&);

  Observable parent_;
  std::vector<std::vector<CVector>> vectors_;
  std::vector<std::vector<double>> gammas_;
  bool floor_map_ = false;
};

/// Chooses (or accepts) an orthonormal basis in every eigenspace and assigns
/// distinct gammas. Throws NotOrthonormal, SpanMismatch (a supplied basis does
/// not span its H_i), or DuplicateEigenvalue (strategy produced a repeat).
RefinementObservable build_refinement(const Observable& obs,
                                      const std::optional<std::vector<std::vector<CVector>>>& bases = std::nullopt,
                                      const GammaStrategy& gamma = default_gamma, const Tolerances& tol = {});

/// Replaces the basis of one eigenspace, keeping the parent's bases elsewhere.
RefinementObservable build_refinement_with_block(const Observable& obs, std::size_t block,
                                                 std::vector<CVector> basis, const Tolerances& tol = {});

/// sum_i sum_n |<psi, e_in>|^2 P_{e_in}; for rho, <e_in|rho|e_in> weights.
DensityOperator vn_refined_nonselective(const RefinementObservable& d, const StateVector& psi,
                                        const Tolerances& tol = {});
DensityOperator vn_refined_nonselective(const RefinementObservable& d, const DensityOperator& rho,
                                        const Tolerances& tol = {});

/// Normalisation of sum_n |<psi, e_in>|^2 P_{e_in}: what is left after
/// refining A through D and keeping only the coarse outcome alpha_i.
MeasurementRecord vn_refined_selective(const RefinementObservable& d, const StateVector& psi, std::size_t outcome,
                                       const Tolerances& tol = {});
MeasurementRecord vn_refined_selective(const RefinementObservable& d, const DensityOperator& rho, std::size_t outcome,
                                       const Tolerances& tol = {});

/// Post-state when the refined outcome (i, n) itself is recorded: pure e_in.
MeasurementRecord vn_refined_fine(const RefinementObservable& d, const DensityOperator& rho, std::size_t outcome,
                                  std::size_t refined, const Tolerances& tol = {});

struct BayesCheck {
  double lhs;       ///< P(D = gamma_phi | rho_psi) = |<psi, phi>|^2
  double rhs;       ///< P(A = alpha_i | rho_psi) * Tr(G_i P_phi)
  double residual;  ///< |lhs - rhs|
};

/// Both sides of the Bayes factorisation for a unit phi in H_i, with G_i the
/// Lueders post-state. Throws NotInEigenspace when ||P_i phi - phi|| > tol.norm.
BayesCheck bayes_check(const RefinementObservable& d, const StateVector& psi, std::size_t outcome,
                       const StateVector& phi, const Tolerances& tol = {});

}  // namespace qmeas
