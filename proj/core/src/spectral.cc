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

#include "qmeas/spectral.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "qmeas/errors.h"

namespace qmeas {

bool Observable::nondegenerate() const {
  return std::all_of(projectors_.begin(), projectors_.end(), [](const Projector& p) { return p.rank() == 1; });
}

CMatrix Observable::matrix() const {
  CMatrix a = CMatrix::Zero(dim_, dim_);
  for (std::size_t i = 0; i < size(); ++i) a += eigenvalues_[i] * projectors_[i].matrix();
  return a;
}

Observable spectral_decompose(const CMatrix& matrix, const Tolerances& tol) {
  return spectral_decompose(matrix, tol.eig, tol);
}

Observable spectral_decompose(const CMatrix& matrix, double tol_eig, const Tolerances& tol) {
  if (matrix.rows() != matrix.cols() || matrix.rows() == 0) {
    throw DimMismatch("spectral_decompose: matrix must be square and non-empty");
  }
  if (!(hermiticity_defect(matrix) <= tol.herm)) throw NotHermitian("spectral_decompose: input is not Hermitian");

  const CMatrix h = 0.5 * (matrix + matrix.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h);
  if (solver.info() != Eigen::Success) throw NotHermitian("spectral_decompose: eigensolver did not converge");
  const Eigen::VectorXd& evals = solver.eigenvalues();  // ascending
  const CMatrix& evecs = solver.eigenvectors();
  const Index n = h.rows();

  std::vector<double> levels;
  std::vector<std::vector<CVector>> bases;
  Index start = 0;
  for (Index k = 1; k <= n; ++k) {
    if (k < n) {
      const double gap = evals[k] - evals[k - 1];
      if (gap > tol_eig && gap <= 2.0 * tol_eig) {
        throw GroupingAmbiguous("spectral_decompose: eigenvalue gap " + std::to_string(gap) +
                                " lies between tol_eig and 2*tol_eig");
      }
      if (gap <= tol_eig) continue;
    }
    std::vector<CVector> group;
    double sum = 0.0;
    for (Index j = start; j < k; ++j) {
      group.push_back(evecs.col(j));
      sum += evals[j];
    }
    levels.push_back(sum / static_cast<double>(k - start));
    bases.push_back(orthonormalize(group));
    start = k;
  }
  return make_observable(std::move(levels), std::move(bases), tol);
}

Observable make_observable(std::vector<double> eigenvalues, std::vector<std::vector<CVector>> eigenbases,
                           const Tolerances& tol) {
  if (eigenvalues.size() != eigenbases.size() || eigenvalues.empty()) {
    throw InvalidArgument("make_observable: need one non-empty basis per eigenvalue");
  }
  std::vector<std::size_t> order(eigenvalues.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return eigenvalues[a] < eigenvalues[b]; });

  Observable obs;
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const std::size_t k = order[pos];
    if (!std::isfinite(eigenvalues[k])) throw InvalidArgument("make_observable: eigenvalue is not finite");
    if (pos > 0 && std::abs(eigenvalues[k] - obs.eigenvalues_.back()) <= tol.eig) {
      throw DuplicateEigenvalue("make_observable: eigenvalue " + std::to_string(eigenvalues[k]) + " repeated");
    }
    if (eigenbases[k].empty()) throw InvalidArgument("make_observable: empty eigenbasis");
    obs.eigenvalues_.push_back(eigenvalues[k]);
    obs.eigenbases_.push_back(std::move(eigenbases[k]));
  }

  const Index dim = obs.eigenbases_.front().front().size();
  std::vector<CVector> all;
  for (const auto& basis : obs.eigenbases_) all.insert(all.end(), basis.begin(), basis.end());
  for (const auto& v : all) {
    if (v.size() != dim) throw DimMismatch("make_observable: eigenvectors have different dimensions");
  }
  const double defect = orthonormality_defect(all);
  if (!(defect <= tol.norm)) throw NotOrthonormal("make_observable: eigenbases are not jointly orthonormal");
  if (static_cast<Index>(all.size()) != dim) {
    throw SpanMismatch("make_observable: eigenbases hold " + std::to_string(all.size()) +
                       " vectors but the space has dimension " + std::to_string(dim));
  }

  obs.dim_ = dim;
  for (const auto& basis : obs.eigenbases_) obs.projectors_.push_back(projector_onto(basis, dim, tol));
  return obs;
}

Observable function_of(const Observable& obs, const std::function<double(double)>& f, const Tolerances& tol) {
  struct Level {
    double value;
    std::vector<CVector> basis;
  };
  std::vector<Level> levels;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const double v = f(obs.eigenvalue(i));
    auto hit = std::find_if(levels.begin(), levels.end(), [&](const Level& l) { return std::abs(l.value - v) <= tol.eig; });
    if (hit == levels.end()) {
      levels.push_back({v, obs.eigenbasis(i)});
    } else {
      hit->basis.insert(hit->basis.end(), obs.eigenbasis(i).begin(), obs.eigenbasis(i).end());
    }
  }
  std::vector<double> values;
  std::vector<std::vector<CVector>> bases;
  for (auto& l : levels) {
    values.push_back(l.value);
    bases.push_back(std::move(l.basis));
  }
  return make_observable(std::move(values), std::move(bases), tol);
}

}  // namespace qmeas
