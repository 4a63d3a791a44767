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

#include "qmeas/measurement.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qmeas/errors.h"

namespace qmeas {

namespace {

void require_dim(const Observable& obs, Index dim, const char* what) {
  if (obs.dim() != dim) throw DimMismatch(std::string(what) + ": observable and state dimensions differ");
}

void require_outcome(std::size_t outcome, std::size_t count, const char* what) {
  if (outcome >= count) throw InvalidArgument(std::string(what) + ": outcome index out of range");
}

[[noreturn]] void impossible(const char* what, double p) {
  throw ZeroProbabilityOutcome(std::string(what) + ": selected outcome has probability " + std::to_string(p));
}

double expectation(const CVector& v, const CMatrix& rho) { return v.dot(rho * v).real(); }

// Weighted sum of rank-one projectors, normalised by `norm`.
CMatrix mixture(const std::vector<CVector>& vectors, const std::vector<double>& weights, double norm) {
  const Index dim = vectors.front().size();
  CMatrix m = CMatrix::Zero(dim, dim);
  for (std::size_t n = 0; n < vectors.size(); ++n) m.noalias() += (weights[n] / norm) * vectors[n] * vectors[n].adjoint();
  return m;
}

}  // namespace

std::string_view to_string(Postulate p) {
  switch (p) {
    case Postulate::kLuders:
      return "luders";
    case Postulate::kVonNeumannRefined:
      return "von_neumann_refined";
    case Postulate::kPpNondegenerate:
      return "pp_nondegenerate";
  }
  return "unknown";
}

std::vector<BornEntry> born_probabilities(const Observable& obs, const DensityOperator& rho) {
  require_dim(obs, rho.dim(), "born_probabilities");
  std::vector<BornEntry> out;
  out.reserve(obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const double p = (rho.matrix() * obs.projector(i).matrix()).trace().real();
    out.push_back({obs.eigenvalue(i), p});
  }
  return out;
}

std::vector<BornEntry> born_probabilities(const Observable& obs, const StateVector& psi) {
  require_dim(obs, psi.dim(), "born_probabilities");
  std::vector<BornEntry> out;
  out.reserve(obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i) {
    out.push_back({obs.eigenvalue(i), (obs.projector(i).matrix() * psi.amplitudes()).squaredNorm()});
  }
  return out;
}

MeasurementRecord luders_selective(const Observable& obs, const StateVector& psi, std::size_t outcome,
                                   const Tolerances& tol) {
  require_dim(obs, psi.dim(), "luders_selective");
  require_outcome(outcome, obs.size(), "luders_selective");
  const CVector projected = obs.projector(outcome).matrix() * psi.amplitudes();
  const double p = projected.squaredNorm();
  if (p <= tol.prob) impossible("luders_selective", p);
  const CVector post = projected / std::sqrt(p);
  return {obs.eigenvalue(outcome), p, DensityOperator(post * post.adjoint(), tol), Postulate::kLuders, outcome};
}

MeasurementRecord luders_selective(const Observable& obs, const DensityOperator& rho, std::size_t outcome,
                                   const Tolerances& tol) {
  require_dim(obs, rho.dim(), "luders_selective");
  require_outcome(outcome, obs.size(), "luders_selective");
  const CMatrix& proj = obs.projector(outcome).matrix();
  const CMatrix block = proj * rho.matrix() * proj;
  const double p = block.trace().real();
  if (p <= tol.prob) impossible("luders_selective", p);
  return {obs.eigenvalue(outcome), p, DensityOperator(block / p, tol), Postulate::kLuders, outcome};
}

DensityOperator luders_nonselective(const Observable& obs, const DensityOperator& rho, const Tolerances& tol) {
  require_dim(obs, rho.dim(), "luders_nonselective");
  CMatrix out = CMatrix::Zero(rho.dim(), rho.dim());
  for (const auto& proj : obs.projectors()) out.noalias() += proj.matrix() * rho.matrix() * proj.matrix();
  return DensityOperator(std::move(out), tol);
}

std::vector<MeasurementRecord> pp_nondegenerate(const Observable& obs, const StateVector& psi, const Tolerances& tol) {
  require_dim(obs, psi.dim(), "pp_nondegenerate");
  if (!obs.nondegenerate()) throw DegenerateSpectrum("pp_nondegenerate: observable has a degenerate eigenvalue");
  std::vector<MeasurementRecord> out;
  out.reserve(obs.size());
  for (std::size_t k = 0; k < obs.size(); ++k) {
    const CVector& e = obs.eigenbasis(k).front();
    const double p = std::norm(inner(e, psi.amplitudes()));
    out.push_back({obs.eigenvalue(k), p, DensityOperator(e * e.adjoint(), tol), Postulate::kPpNondegenerate, k});
  }
  return out;
}

double default_gamma(std::size_t i, std::size_t n, std::size_t max_rank) {
  const std::size_t max_n = max_rank == 0 ? 0 : max_rank - 1;
  return static_cast<double>(i) + static_cast<double>(n) / static_cast<double>(2 * max_n + 2);
}

double RefinementObservable::coarse_grain(double gamma) const {
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  if (floor_map_) {
    const double fl = std::floor(gamma);
    if (fl < 0.0 || fl >= static_cast<double>(blocks())) return kNaN;
    return parent_.eigenvalue(static_cast<std::size_t>(fl));
  }
  for (std::size_t i = 0; i < blocks(); ++i) {
    if (std::find(gammas_[i].begin(), gammas_[i].end(), gamma) != gammas_[i].end()) return parent_.eigenvalue(i);
  }
  return kNaN;
}

CMatrix RefinementObservable::matrix() const {
  CMatrix d = CMatrix::Zero(dim(), dim());
  for (std::size_t i = 0; i < blocks(); ++i) {
    for (std::size_t n = 0; n < vectors_[i].size(); ++n) {
      d.noalias() += gammas_[i][n] * vectors_[i][n] * vectors_[i][n].adjoint();
    }
  }
  return d;
}

Observable RefinementObservable::as_observable(const Tolerances& tol) const {
  std::vector<double> values;
  std::vector<std::vector<CVector>> bases;
  for (std::size_t i = 0; i < blocks(); ++i) {
    for (std::size_t n = 0; n < vectors_[i].size(); ++n) {
      values.push_back(gammas_[i][n]);
      bases.push_back({vectors_[i][n]});
    }
  }
  return make_observable(std::move(values), std::move(bases), tol);
}

RefinementObservable build_refinement(const Observable& obs,
                                      const std::optional<std::vector<std::vector<CVector>>>& bases,
                                      const GammaStrategy& gamma, const Tolerances& tol) {
  RefinementObservable d;
  d.parent_ = obs;
  d.vectors_ = bases ? *bases : obs.eigenbases();
  if (d.vectors_.size() != obs.size()) {
    throw SpanMismatch("build_refinement: expected one basis per eigenspace");
  }
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const auto& basis = d.vectors_[i];
    for (const auto& v : basis) {
      if (v.size() != obs.dim()) throw DimMismatch("build_refinement: basis vector has the wrong dimension");
    }
    const double defect = orthonormality_defect(basis);
    if (!(defect <= tol.norm)) throw NotOrthonormal("build_refinement: basis of block " + std::to_string(i));
    const Projector p = projector_onto(basis, obs.dim(), tol);
    if (!(max_abs_diff(p.matrix(), obs.projector(i).matrix()) <= tol.herm)) {
      throw SpanMismatch("build_refinement: basis does not span eigenspace " + std::to_string(i));
    }
  }

  std::size_t max_rank = 0;
  for (const auto& basis : d.vectors_) max_rank = std::max(max_rank, basis.size());
  std::vector<double> all;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    std::vector<double> g;
    for (std::size_t n = 0; n < d.vectors_[i].size(); ++n) {
      g.push_back(gamma(i, n, max_rank));
      all.push_back(g.back());
    }
    d.gammas_.push_back(std::move(g));
  }
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end()) {
    throw DuplicateEigenvalue("build_refinement: gamma strategy produced repeated values");
  }

  // The floor map is only valid if every gamma of block i lies in [i, i+1).
  d.floor_map_ = true;
  for (std::size_t i = 0; i < obs.size() && d.floor_map_; ++i) {
    for (double g : d.gammas_[i]) {
      if (std::floor(g) != static_cast<double>(i)) d.floor_map_ = false;
    }
  }

  const CMatrix a = obs.matrix();
  const CMatrix dm = d.matrix();
  const double comm = (a * dm - dm * a).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff() * dm.cwiseAbs().maxCoeff());
  if (!(comm <= tol.herm * scale)) {
    throw SpanMismatch("build_refinement: refinement does not commute with the parent observable");
  }
  return d;
}

RefinementObservable build_refinement_with_block(const Observable& obs, std::size_t block, std::vector<CVector> basis,
                                                 const Tolerances& tol) {
  require_outcome(block, obs.size(), "build_refinement_with_block");
  auto bases = obs.eigenbases();
  bases[block] = std::move(basis);
  return build_refinement(obs, bases, default_gamma, tol);
}

DensityOperator vn_refined_nonselective(const RefinementObservable& d, const StateVector& psi, const Tolerances& tol) {
  return vn_refined_nonselective(d, pure_to_density(psi, tol), tol);
}

DensityOperator vn_refined_nonselective(const RefinementObservable& d, const DensityOperator& rho,
                                        const Tolerances& tol) {
  require_dim(d.parent(), rho.dim(), "vn_refined_nonselective");
  CMatrix out = CMatrix::Zero(rho.dim(), rho.dim());
  for (std::size_t i = 0; i < d.blocks(); ++i) {
    for (const auto& e : d.eigenvectors(i)) out.noalias() += expectation(e, rho.matrix()) * e * e.adjoint();
  }
  return DensityOperator(std::move(out), tol);
}

MeasurementRecord vn_refined_selective(const RefinementObservable& d, const StateVector& psi, std::size_t outcome,
                                       const Tolerances& tol) {
  require_dim(d.parent(), psi.dim(), "vn_refined_selective");
  require_outcome(outcome, d.blocks(), "vn_refined_selective");
  const auto& vecs = d.eigenvectors(outcome);
  std::vector<double> w;
  double p = 0.0;
  for (const auto& e : vecs) {
    w.push_back(std::norm(inner(e, psi.amplitudes())));
    p += w.back();
  }
  if (p <= tol.prob) impossible("vn_refined_selective", p);
  return {d.parent().eigenvalue(outcome), p, DensityOperator(mixture(vecs, w, p), tol), Postulate::kVonNeumannRefined,
          outcome};
}

MeasurementRecord vn_refined_selective(const RefinementObservable& d, const DensityOperator& rho, std::size_t outcome,
                                       const Tolerances& tol) {
  require_dim(d.parent(), rho.dim(), "vn_refined_selective");
  require_outcome(outcome, d.blocks(), "vn_refined_selective");
  const auto& vecs = d.eigenvectors(outcome);
  std::vector<double> w;
  double p = 0.0;
  for (const auto& e : vecs) {
    w.push_back(expectation(e, rho.matrix()));
    p += w.back();
  }
  if (p <= tol.prob) impossible("vn_refined_selective", p);
  return {d.parent().eigenvalue(outcome), p, DensityOperator(mixture(vecs, w, p), tol), Postulate::kVonNeumannRefined,
          outcome};
}

MeasurementRecord vn_refined_fine(const RefinementObservable& d, const DensityOperator& rho, std::size_t outcome,
                                  std::size_t refined, const Tolerances& tol) {
  require_dim(d.parent(), rho.dim(), "vn_refined_fine");
  require_outcome(outcome, d.blocks(), "vn_refined_fine");
  require_outcome(refined, d.eigenvectors(outcome).size(), "vn_refined_fine");
  const CVector& e = d.eigenvectors(outcome)[refined];
  const double p = expectation(e, rho.matrix());
  if (p <= tol.prob) impossible("vn_refined_fine", p);
  return {d.gammas(outcome)[refined], p, DensityOperator(e * e.adjoint(), tol), Postulate::kVonNeumannRefined,
          outcome};
}

BayesCheck bayes_check(const RefinementObservable& d, const StateVector& psi, std::size_t outcome,
                       const StateVector& phi, const Tolerances& tol) {
  require_dim(d.parent(), psi.dim(), "bayes_check");
  require_dim(d.parent(), phi.dim(), "bayes_check");
  require_outcome(outcome, d.blocks(), "bayes_check");
  const CMatrix& proj = d.parent().projector(outcome).matrix();
  const double leak = (proj * phi.amplitudes() - phi.amplitudes()).norm();
  if (!(leak <= tol.norm)) {
    throw NotInEigenspace("bayes_check: phi leaves eigenspace " + std::to_string(outcome) + " by " + std::to_string(leak));
  }

  const double lhs = std::norm(inner(psi, phi));
  const CVector projected = proj * psi.amplitudes();
  const double p = projected.squaredNorm();
  double rhs = 0.0;
  if (p > tol.prob) {
    // Tr(G_i P_phi) with G_i = psi_i psi_i^dagger, psi_i = P_i psi / ||P_i psi||.
    const double conditional = std::norm(inner(phi.amplitudes(), projected)) / p;
    rhs = p * conditional;
  }
  return {lhs, rhs, std::abs(lhs - rhs)};
}

}  // namespace qmeas
