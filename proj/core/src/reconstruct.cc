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

#include "qmeas/reconstruct.h"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <string>

#include "qmeas/errors.h"
#include "qmeas/random.h"

namespace qmeas {

double ExactOracle::evaluate(const CVector& phi, std::size_t /*call_index*/) const {
  return std::norm(inner(psi_.amplitudes(), phi));
}

SampledOracle::SampledOracle(StateVector psi, Observable obs, std::size_t block, std::uint64_t shots,
                             std::uint64_t seed)
    : psi_(std::move(psi)), obs_(std::move(obs)), block_(block), shots_(shots), seed_(seed) {
  if (shots_ == 0) throw InvalidArgument("SampledOracle: shots must be at least 1");
  if (block_ >= obs_.size()) throw InvalidArgument("SampledOracle: block index out of range");
  if (psi_.dim() != obs_.dim()) throw DimMismatch("SampledOracle: state and observable dimensions differ");
}

std::vector<CVector> SampledOracle::probe_basis(const CVector& phi, std::size_t call_index) const {
  const auto& block_basis = obs_.eigenbasis(block_);
  const auto rank = block_basis.size();
  const CMatrix coords = as_columns(block_basis, obs_.dim());

  std::vector<CVector> candidates{phi};
  Rng rng(mix_seed(seed_, block_, call_index));
  std::vector<CVector> basis;
  while (true) {
    basis = orthonormalize(candidates, 1e-6);
    if (basis.size() == rank) break;
    candidates.push_back(coords * gaussian_vector(static_cast<Index>(rank), rng));
  }
  return basis;
}

double SampledOracle::evaluate(const CVector& phi, std::size_t call_index) const {
  const RefinementObservable d = build_refinement_with_block(obs_, block_, probe_basis(phi, call_index));

  // Outcome 0 is the probe (first vector of the block); the rest are all
  // other refined outcomes of D.
  std::vector<double> probs;
  probs.push_back(std::norm(inner(d.eigenvectors(block_).front(), psi_.amplitudes())));
  for (std::size_t i = 0; i < d.blocks(); ++i) {
    const auto& vecs = d.eigenvectors(i);
    for (std::size_t n = (i == block_ ? 1 : 0); n < vecs.size(); ++n) {
      probs.push_back(std::norm(inner(vecs[n], psi_.amplitudes())));
    }
  }
  double mass = 0.0;
  for (double& p : probs) {
    p = std::max(p, 0.0);
    mass += p;
  }

  // Multinomial draw via sequential conditional binomials.
  Rng rng(mix_seed(seed_ ^ 0x5a5a5a5aULL, block_, call_index));
  std::uint64_t remaining = shots_;
  std::uint64_t probe_hits = 0;
  for (std::size_t k = 0; k < probs.size() && remaining > 0; ++k) {
    const double cond = mass > 0.0 ? std::clamp(probs[k] / mass, 0.0, 1.0) : 0.0;
    std::binomial_distribution<std::uint64_t> draw(remaining, cond);
    const std::uint64_t hits = k + 1 == probs.size() ? remaining : draw(rng);
    if (k == 0) probe_hits = hits;
    remaining -= hits;
    mass -= probs[k];
  }
  return static_cast<double>(probe_hits) / static_cast<double>(shots_);
}

BlockReconstruction reconstruct_block(const QuadraticFormOracle& oracle, std::span<const CVector> basis_m,
                                      const Tolerances& tol) {
  if (basis_m.empty()) throw InvalidArgument("reconstruct_block: empty basis");
  const Index dim = basis_m.front().size();
  if (!(orthonormality_defect(basis_m) <= tol.norm)) throw NotOrthonormal("reconstruct_block: basis");
  const auto rank = static_cast<Index>(basis_m.size());
  const bool exact = oracle.mode() == OracleMode::kExact;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const Complex i_unit(0.0, 1.0);

  std::size_t calls = 0;
  auto query = [&](const CVector& phi) {
    const double q = oracle.evaluate(phi, calls++);
    if (exact && !(q >= -tol.norm && q <= 1.0 + tol.norm)) {
      throw OracleRangeError("reconstruct_block: oracle returned " + std::to_string(q));
    }
    return q;
  };

  CMatrix g = CMatrix::Zero(rank, rank);
  for (Index n = 0; n < rank; ++n) g(n, n) = query(basis_m[n]);
  for (Index n = 0; n < rank; ++n) {
    for (Index j = n + 1; j < rank; ++j) {
      const double mean_diag = 0.5 * (g(n, n).real() + g(j, j).real());
      const double q_re = query(inv_sqrt2 * (basis_m[n] + basis_m[j]));
      const double q_im = query(inv_sqrt2 * (basis_m[n] + i_unit * basis_m[j]));
      g(n, j) = Complex(q_re - mean_diag, mean_diag - q_im);
      g(j, n) = std::conj(g(n, j));
    }
  }
  // Already Hermitian entrywise; the symmetrisation pins the diagonal to real.
  g = (0.5 * (g + g.adjoint())).eval();

  const CMatrix b = as_columns(basis_m, dim);
  return {g, b * g * b.adjoint(), calls};
}

double block_support_check(const CMatrix& g, std::span<const CVector> basis_m, std::span<const CVector> complement,
                           const Tolerances& tol) {
  std::vector<CVector> all(basis_m.begin(), basis_m.end());
  all.insert(all.end(), complement.begin(), complement.end());
  if (!(orthonormality_defect(all) <= tol.norm)) throw NotOrthonormal("block_support_check: bases");
  for (const auto& v : all) {
    if (v.size() != g.rows() || g.rows() != g.cols()) throw DimMismatch("block_support_check: dimensions differ");
  }
  double worst = 0.0;
  for (const auto& w : complement) {
    const CVector gw = g * w;
    for (const auto& v : all) worst = std::max(worst, std::abs(v.dot(gw)));
    // <w, g v> for v in the block; v in the complement is covered above.
    for (const auto& v : basis_m) worst = std::max(worst, std::abs(w.dot(g * v)));
  }
  return worst;
}

std::vector<ReconstructionReport> verify_theorem(const StateVector& psi, const Observable& obs,
                                                 const OracleConfig& config, const Tolerances& tol) {
  if (psi.dim() != obs.dim()) throw DimMismatch("verify_theorem: state and observable dimensions differ");
  std::vector<ReconstructionReport> reports;
  const auto born = born_probabilities(obs, psi);
  for (std::size_t m = 0; m < obs.size(); ++m) {
    if (born[m].probability <= tol.prob) continue;

    std::unique_ptr<QuadraticFormOracle> oracle;
    if (config.mode == OracleMode::kExact) {
      oracle = std::make_unique<ExactOracle>(psi);
    } else {
      oracle = std::make_unique<SampledOracle>(psi, obs, m, config.shots, config.seed);
    }
    const auto rec = reconstruct_block(*oracle, obs.eigenbasis(m), tol);

    const CVector projected = obs.projector(m).matrix() * psi.amplitudes();
    ReconstructionReport r;
    r.block = m;
    r.outcome = obs.eigenvalue(m);
    r.probability = born[m].probability;
    r.reconstructed = rec.embedded;
    r.reference = projected * projected.adjoint();
    r.max_abs_error = max_abs_diff(r.reconstructed, r.reference);
    r.frobenius_error = (r.reconstructed - r.reference).norm();
    std::vector<CVector> complement;
    for (std::size_t k = 0; k < obs.size(); ++k) {
      if (k != m) complement.insert(complement.end(), obs.eigenbasis(k).begin(), obs.eigenbasis(k).end());
    }
    r.support_error = block_support_check(r.reconstructed, obs.eigenbasis(m), complement, tol);
    r.shots_used = oracle->shots();
    r.oracle_calls = rec.oracle_calls;
    reports.push_back(std::move(r));
  }
  return reports;
}

DensityOperator assemble_nonselective(std::span<const ReconstructionReport> reports,
                                      std::span<const BornEntry> probabilities, const Tolerances& tol) {
  if (reports.empty()) throw BlockMissing("assemble_nonselective: no reports");
  const Index dim = reports.front().reconstructed.rows();
  for (std::size_t m = 0; m < probabilities.size(); ++m) {
    if (probabilities[m].probability <= tol.prob) continue;
    const bool found = std::any_of(reports.begin(), reports.end(), [&](const auto& r) { return r.block == m; });
    if (!found) throw BlockMissing("assemble_nonselective: no report for block " + std::to_string(m));
  }
  CMatrix out = CMatrix::Zero(dim, dim);
  for (const auto& r : reports) {
    if (r.reconstructed.rows() != dim) throw DimMismatch("assemble_nonselective: reports differ in dimension");
    out += r.reconstructed;
  }
  return DensityOperator(std::move(out), tol);
}

}  // namespace qmeas
