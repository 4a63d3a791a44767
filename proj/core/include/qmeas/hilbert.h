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

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qmeas/tolerances.h"

namespace qmeas {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using Index = Eigen::Index;

/// A unit-norm vector of amplitudes in a fixed computational basis.
class StateVector {
 public:
  /// Throws NormError if | ||amps|| - 1 | exceeds tol.norm, DimMismatch if empty.
  explicit StateVector(CVector amplitudes, const Tolerances& tol = {});

  /// Rescales v to unit norm. Throws NormError for the zero vector.
  static StateVector Normalized(const CVector& v);

  /// Computational basis vector |index> in dimension dim.
  static StateVector Basis(Index dim, Index index);

  Index dim() const { return amps_.size(); }
  const CVector& amplitudes() const { return amps_; }
  Complex operator[](Index k) const { return amps_[k]; }

 private:
  CVector amps_;
};

/// Hermitian, positive semidefinite, unit-trace matrix.
class DensityOperator {
 public:
  /// Validates all three invariants; throws NotHermitian, NormError or
  /// NotPositive. The stored matrix is symmetrised to be exactly Hermitian.
  explicit DensityOperator(CMatrix matrix, const Tolerances& tol = {});

  Index dim() const { return m_.rows(); }
  const CMatrix& matrix() const { return m_; }
  Complex operator()(Index r, Index c) const { return m_(r, c); }

 private:
  CMatrix m_;
};

/// Orthogonal projector together with its rank.
class Projector {
 public:
  /// Throws NotHermitian if the matrix is not a Hermitian idempotent.
  explicit Projector(CMatrix matrix, const Tolerances& tol = {});

  Index dim() const { return m_.rows(); }
  Index rank() const { return rank_; }
  const CMatrix& matrix() const { return m_; }

 private:
  CMatrix m_;
  Index rank_;
};

// ---------------------------------------------------------------------------
// Inner products follow the physics convention: conjugate-linear in the FIRST
// argument, <phi, psi> = sum_k conj(phi_k) psi_k. Born weights are always
// |<.,.>|^2 and do not depend on this choice.
// ---------------------------------------------------------------------------

Complex inner(const CVector& phi, const CVector& psi);
Complex inner(const StateVector& phi, const StateVector& psi);

/// Matrix-vector product; never normalises.
CVector apply(const CMatrix& op, const CVector& psi);
CVector apply(const CMatrix& op, const StateVector& psi);

/// rho = psi psi^dagger.
DensityOperator pure_to_density(const StateVector& psi, const Tolerances& tol = {});

/// Kronecker product, left factor most significant:
/// (a (x) b)[i * dim(b) + j] = a[i] b[j].
CMatrix tensor(const CMatrix& a, const CMatrix& b);
CVector tensor(const CVector& a, const CVector& b);
StateVector tensor(const StateVector& a, const StateVector& b);
DensityOperator tensor(const DensityOperator& a, const DensityOperator& b);

/// Reduced operator on factor `keep` of a big-endian product space.
CMatrix partial_trace(const CMatrix& m, std::span<const Index> dims, std::size_t keep);
DensityOperator partial_trace(const DensityOperator& rho, std::span<const Index> dims,
                              std::size_t keep, const Tolerances& tol = {});

/// sum_k v_k v_k^dagger for an orthonormal family. An empty family gives the
/// zero projector in dimension `dim`. Throws NotOrthonormal.
Projector projector_onto(std::span<const CVector> vectors, Index dim, const Tolerances& tol = {});

/// Max |<v_j, v_k> - delta_jk| over the family.
double orthonormality_defect(std::span<const CVector> vectors);

/// Max |M(j,k) - conj(M(k,j))|.
double hermiticity_defect(const CMatrix& m);

/// Largest absolute entry of a - b.
double max_abs_diff(const CMatrix& a, const CMatrix& b);

/// (1/2) ||a - b||_1 for Hermitian a, b.
double trace_distance(const CMatrix& a, const CMatrix& b);

/// <psi| rho |psi>, real part.
double fidelity(const StateVector& psi, const CMatrix& rho);

/// Eigenvalues of a Hermitian matrix, ascending.
Eigen::VectorXd hermitian_eigenvalues(const CMatrix& m);

/// Gram-Schmidt with reorthogonalisation. Vectors whose residual norm falls
/// below `drop_below` are skipped; the survivors are returned normalised.
std::vector<CVector> orthonormalize(std::span<const CVector> vectors, double drop_below = 1e-8);

/// Stacks vectors as the columns of a matrix.
CMatrix as_columns(std::span<const CVector> vectors, Index dim);

}  // namespace qmeas
