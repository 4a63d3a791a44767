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

#include <functional>
#include <vector>

#include "qmeas/hilbert.h"

namespace qmeas {

/// A self-adjoint operator in spectral form A = sum_i alpha_i P_i.
///
/// Eigenvalues are distinct and ascending; P_i projects onto the eigenspace
/// H_i, and eigenbasis(i) is an orthonormal basis of H_i. Parent outcome
/// indices throughout the library refer to positions in this order.
class Observable {
 public:
  Index dim() const { return dim_; }
  std::size_t size() const { return eigenvalues_.size(); }

  const std::vector<double>& eigenvalues() const { return eigenvalues_; }
  double eigenvalue(std::size_t i) const { return eigenvalues_.at(i); }
  const Projector& projector(std::size_t i) const { return projectors_.at(i); }
  const std::vector<Projector>& projectors() const { return projectors_; }
  const std::vector<CVector>& eigenbasis(std::size_t i) const { return eigenbases_.at(i); }
  const std::vector<std::vector<CVector>>& eigenbases() const { return eigenbases_; }
  Index rank(std::size_t i) const { return projectors_.at(i).rank(); }

  /// True iff every eigenspace is one-dimensional.
  bool nondegenerate() const;

  /// sum_i alpha_i P_i.
  CMatrix matrix() const;

 private:
  friend Observable make_observable(std::vector<double>, std::vector<std::vector<CVector>>, const Tolerances&);

  Index dim_ = 0;
  std::vector<double> eigenvalues_;
  std::vector<Projector> projectors_;
  std::vector<std::vector<CVector>> eigenbases_;
};

/// Diagonalises a Hermitian matrix and groups eigenvalues whose neighbour gap
/// is at most tol_eig into a single degenerate level (level value = mean of the
/// group). Each group's eigenvectors are re-orthonormalised.
///
/// Throws NotHermitian, or GroupingAmbiguous when some gap lies in
/// (tol_eig, 2 tol_eig] and the grouping would hinge on rounding.
Observable spectral_decompose(const CMatrix& matrix, double tol_eig, const Tolerances& tol = {});
Observable spectral_decompose(const CMatrix& matrix, const Tolerances& tol = {});

/// Builds an observable from eigenvalues and one orthonormal basis per
/// eigenspace. Inputs are sorted into ascending eigenvalue order.
/// Throws NotOrthonormal, DuplicateEigenvalue, or SpanMismatch when the bases
/// do not jointly span the space.
Observable make_observable(std::vector<double> eigenvalues, std::vector<std::vector<CVector>> eigenbases,
                           const Tolerances& tol = {});

/// f(A) = sum_i f(alpha_i) P_i, merging eigenspaces whose images collide
/// (within tol.eig).
Observable function_of(const Observable& obs, const std::function<double(double)>& f,
                       const Tolerances& tol = {});

}  // namespace qmeas
