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

#include "qmeas/hilbert.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "qmeas/errors.h"

namespace qmeas {

namespace {

std::string fmt_double(double x) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << x;
  return os.str();
}

void require_square(const CMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw DimMismatch(std::string(what) + ": matrix must be square and non-empty");
  }
}

}  // namespace

StateVector::StateVector(CVector amplitudes, const Tolerances& tol) : amps_(std::move(amplitudes)) {
  if (amps_.size() == 0) throw DimMismatch("StateVector: dimension must be at least 1");
  const double n2 = amps_.squaredNorm();
  if (!std::isfinite(n2) || std::abs(n2 - 1.0) > tol.norm) {
    throw NormError("StateVector: squared norm " + std::to_string(n2) + " deviates from 1 by more than " +
                    fmt_double(tol.norm));
  }
}

StateVector StateVector::Normalized(const CVector& v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw NormError("StateVector::Normalized: zero or non-finite vector");
  return StateVector(v / n);
}

StateVector StateVector::Basis(Index dim, Index index) {
  if (dim < 1 || index < 0 || index >= dim) throw DimMismatch("StateVector::Basis: index out of range");
  CVector v = CVector::Zero(dim);
  v[index] = 1.0;
  return StateVector(std::move(v));
}

DensityOperator::DensityOperator(CMatrix matrix, const Tolerances& tol) : m_(std::move(matrix)) {
  require_square(m_, "DensityOperator");
  const double herm = hermiticity_defect(m_);
  if (!(herm <= tol.herm)) throw NotHermitian("DensityOperator: Hermiticity defect " + fmt_double(herm));
  m_ = (0.5 * (m_ + m_.adjoint())).eval();
  const double tr = m_.trace().real();
  if (!(std::abs(tr - 1.0) <= tol.norm)) {
    throw NormError("DensityOperator: trace " + std::to_string(tr) + " is not 1");
  }
  const double lo = hermitian_eigenvalues(m_).minCoeff();
  if (lo < -tol.psd) throw NotPositive("DensityOperator: smallest eigenvalue " + fmt_double(lo));
}

Projector::Projector(CMatrix matrix, const Tolerances& tol) : m_(std::move(matrix)) {
  require_square(m_, "Projector");
  const double herm = hermiticity_defect(m_);
  if (!(herm <= tol.herm)) throw NotHermitian("Projector: Hermiticity defect " + fmt_double(herm));
  const double idem = max_abs_diff(m_ * m_, m_);
  if (!(idem <= tol.herm)) throw NotHermitian("Projector: idempotence defect " + fmt_double(idem));
  rank_ = static_cast<Index>(std::llround(m_.trace().real()));
}

Complex inner(const CVector& phi, const CVector& psi) {
  if (phi.size() != psi.size()) throw DimMismatch("inner: dimensions differ");
  return phi.dot(psi);  // Eigen's dot conjugates the left operand.
}

Complex inner(const StateVector& phi, const StateVector& psi) {
  return inner(phi.amplitudes(), psi.amplitudes());
}

CVector apply(const CMatrix& op, const CVector& psi) {
  if (op.cols() != psi.size()) throw DimMismatch("apply: operator and vector dimensions differ");
  return op * psi;
}

CVector apply(const CMatrix& op, const StateVector& psi) { return apply(op, psi.amplitudes()); }

DensityOperator pure_to_density(const StateVector& psi, const Tolerances& tol) {
  const CVector& v = psi.amplitudes();
  return DensityOperator(v * v.adjoint(), tol);
}

CMatrix tensor(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

CVector tensor(const CVector& a, const CVector& b) {
  CVector out(a.size() * b.size());
  for (Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a[i] * b;
  return out;
}

StateVector tensor(const StateVector& a, const StateVector& b) {
  return StateVector(tensor(a.amplitudes(), b.amplitudes()));
}

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
  return DensityOperator(tensor(a.matrix(), b.matrix()));
}

CMatrix partial_trace(const CMatrix& m, std::span<const Index> dims, std::size_t keep) {
  require_square(m, "partial_trace");
  if (dims.empty() || keep >= dims.size()) throw DimMismatch("partial_trace: invalid subsystem index");
  Index total = 1;
  for (Index d : dims) {
    if (d < 1) throw DimMismatch("partial_trace: factor dimensions must be positive");
    total *= d;
  }
  if (total != m.rows()) throw DimMismatch("partial_trace: factor dimensions do not multiply to the matrix size");

  // Index = (outer, k, inner) with k the kept factor.
  Index outer = 1;
  for (std::size_t s = 0; s < keep; ++s) outer *= dims[s];
  const Index dk = dims[keep];
  const Index inner_dim = total / (outer * dk);

  CMatrix out = CMatrix::Zero(dk, dk);
  for (Index a = 0; a < dk; ++a) {
    for (Index b = 0; b < dk; ++b) {
      Complex acc = 0.0;
      for (Index o = 0; o < outer; ++o) {
        for (Index i = 0; i < inner_dim; ++i) {
          acc += m((o * dk + a) * inner_dim + i, (o * dk + b) * inner_dim + i);
        }
      }
      out(a, b) = acc;
    }
  }
  return out;
}

DensityOperator partial_trace(const DensityOperator& rho, std::span<const Index> dims, std::size_t keep,
                              const Tolerances& tol) {
  return DensityOperator(partial_trace(rho.matrix(), dims, keep), tol);
}

double orthonormality_defect(std::span<const CVector> vectors) {
  double worst = 0.0;
  for (std::size_t j = 0; j < vectors.size(); ++j) {
    for (std::size_t k = j; k < vectors.size(); ++k) {
      if (vectors[j].size() != vectors[k].size()) return std::numeric_limits<double>::infinity();
      const Complex g = vectors[j].dot(vectors[k]);
      const double target = j == k ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(g - target));
    }
  }
  return worst;
}

Projector projector_onto(std::span<const CVector> vectors, Index dim, const Tolerances& tol) {
  for (const auto& v : vectors) {
    if (v.size() != dim) throw DimMismatch("projector_onto: vector dimension differs from dim");
  }
  const double defect = orthonormality_defect(vectors);
  if (!(defect <= tol.norm)) throw NotOrthonormal("projector_onto: orthonormality defect " + fmt_double(defect));
  CMatrix p = CMatrix::Zero(dim, dim);
  for (const auto& v : vectors) p.noalias() += v * v.adjoint();
  return Projector(std::move(p), tol);
}

double hermiticity_defect(const CMatrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimMismatch("max_abs_diff: shapes differ");
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

Eigen::VectorXd hermitian_eigenvalues(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

double trace_distance(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimMismatch("trace_distance: shapes differ");
  const CMatrix diff = a - b;
  return 0.5 * hermitian_eigenvalues(0.5 * (diff + diff.adjoint())).cwiseAbs().sum();
}

double fidelity(const StateVector& psi, const CMatrix& rho) {
  if (rho.rows() != psi.dim()) throw DimMismatch("fidelity: dimensions differ");
  return psi.amplitudes().dot(rho * psi.amplitudes()).real();
}

std::vector<CVector> orthonormalize(std::span<const CVector> vectors, double drop_below) {
  std::vector<CVector> out;
  out.reserve(vectors.size());
  for (const auto& v : vectors) {
    CVector r = v;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : out) r -= q.dot(r) * q;
    }
    const double n = r.norm();
    if (n > drop_below) out.push_back(r / n);
  }
  return out;
}

CMatrix as_columns(std::span<const CVector> vectors, Index dim) {
  CMatrix out(dim, static_cast<Index>(vectors.size()));
  for (std::size_t k = 0; k < vectors.size(); ++k) {
    if (vectors[k].size() != dim) throw DimMismatch("as_columns: vector dimension differs");
    out.col(static_cast<Index>(k)) = vectors[k];
  }
  return out;
}

}  // namespace qmeas
