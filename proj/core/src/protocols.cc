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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qmeas/errors.h"
#include "qmeas/random.h"

namespace qmeas {

namespace {

const Complex kI(0.0, 1.0);

CMatrix pauli_x() {
  CMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

CMatrix pauli_z() {
  CMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

CMatrix hadamard() {
  CMatrix m(2, 2);
  m << 1, 1, 1, -1;
  return m / std::sqrt(2.0);
}

CMatrix dft(Index r) {
  CMatrix w(r, r);
  for (Index j = 0; j < r; ++j) {
    for (Index k = 0; k < r; ++k) {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(j * k) / static_cast<double>(r);
      w(j, k) = std::polar(1.0 / std::sqrt(static_cast<double>(r)), angle);
    }
  }
  return w;
}

CMatrix aligned_rotation(const CMatrix& block_basis, const CMatrix& rho) {
  const Index r = block_basis.cols();
  const CMatrix m = block_basis.adjoint() * rho * block_basis;
  if (m.cwiseAbs().maxCoeff() == 0.0) return CMatrix::Identity(r, r);
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(0.5 * (m + m.adjoint()));
  return solver.eigenvectors().rowwise().reverse();  // descending weight
}

CVector plus_state() { return CVector::Constant(2, Complex(1.0 / std::sqrt(2.0), 0.0)); }

CVector measurement_vector(double theta, int s) {
  CVector v(2);
  v << 1.0, (s == 0 ? 1.0 : -1.0) * std::polar(1.0, theta);
  return v / std::sqrt(2.0);
}

}  // namespace

std::string_view to_string(RefinementChoice c) {
  switch (c) {
    case RefinementChoice::kComputational:
      return "computational";
    case RefinementChoice::kRotated:
      return "rotated";
    case RefinementChoice::kAligned:
      return "aligned";
    case RefinementChoice::kRandom:
      return "random";
    case RefinementChoice::kCustom:
      return "custom";
  }
  return "unknown";
}

std::vector<std::vector<CVector>> refinement_bases(const Observable& obs, const DensityOperator& rho,
                                                   const ChannelConfig& config, std::uint64_t stream) {
  if (rho.dim() != obs.dim()) throw DimMismatch("refinement_bases: state and observable dimensions differ");
  if (config.refinement == RefinementChoice::kCustom && config.custom.size() != obs.size()) {
    throw InvalidArgument("refinement_bases: custom refinement needs one rotation per eigenspace");
  }
  std::vector<std::vector<CVector>> out;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const CMatrix b = as_columns(obs.eigenbasis(i), obs.dim());
    const Index r = b.cols();
    CMatrix w;
    switch (config.refinement) {
      case RefinementChoice::kComputational:
        w = CMatrix::Identity(r, r);
        break;
      case RefinementChoice::kRotated:
        w = dft(r);
        break;
      case RefinementChoice::kAligned:
        w = aligned_rotation(b, rho.matrix());
        break;
      case RefinementChoice::kRandom: {
        Rng rng(mix_seed(config.seed, stream, i));
        w = haar_unitary(r, rng);
        break;
      }
      case RefinementChoice::kCustom:
        w = config.custom[i];
        if (w.rows() != r || w.cols() != r) throw DimMismatch("refinement_bases: custom rotation has the wrong size");
        break;
    }
    const CMatrix rotated = b * w;
    std::vector<CVector> basis;
    for (Index c = 0; c < r; ++c) basis.push_back(rotated.col(c));
    out.push_back(std::move(basis));
  }
  return out;
}

MeasurementRecord measure_selective(const Observable& obs, const DensityOperator& rho, std::size_t outcome,
                                    const ChannelConfig& config, std::uint64_t stream, const Tolerances& tol) {
  switch (config.postulate) {
    case Postulate::kPpNondegenerate:
      if (!obs.nondegenerate()) throw DegenerateSpectrum("measure_selective: observable is degenerate");
      [[fallthrough]];
    case Postulate::kLuders:
      return luders_selective(obs, rho, outcome, tol);
    case Postulate::kVonNeumannRefined: {
      const auto d = build_refinement(obs, refinement_bases(obs, rho, config, stream), default_gamma, tol);
      return vn_refined_selective(d, rho, outcome, tol);
    }
  }
  throw InvalidArgument("measure_selective: unknown postulate");
}

DensityOperator measure_nonselective(const Observable& obs, const DensityOperator& rho, const ChannelConfig& config,
                                     std::uint64_t stream, const Tolerances& tol) {
  if (config.postulate == Postulate::kVonNeumannRefined) {
    const auto d = build_refinement(obs, refinement_bases(obs, rho, config, stream), default_gamma, tol);
    return vn_refined_nonselective(d, rho, tol);
  }
  if (config.postulate == Postulate::kPpNondegenerate && !obs.nondegenerate()) {
    throw DegenerateSpectrum("measure_nonselective: observable is degenerate");
  }
  return luders_nonselective(obs, rho, tol);
}

CVector bell_state(std::size_t k) {
  const double h = 1.0 / std::sqrt(2.0);
  CVector v = CVector::Zero(4);
  switch (k) {
    case 0:  // Phi+
      v << h, 0, 0, h;
      break;
    case 1:  // Psi+
      v << 0, h, h, 0;
      break;
    case 2:  // Phi-
      v << h, 0, 0, -h;
      break;
    case 3:  // Psi-
      v << 0, h, -h, 0;
      break;
    default:
      throw InvalidArgument("bell_state: index must be 0..3");
  }
  return v;
}

Observable bell_observable() {
  std::vector<double> values;
  std::vector<std::vector<CVector>> bases;
  for (std::size_t k = 0; k < 4; ++k) {
    values.push_back(static_cast<double>(k));
    bases.push_back({tensor(bell_state(k), CVector(StateVector::Basis(2, 0).amplitudes())),
                     tensor(bell_state(k), CVector(StateVector::Basis(2, 1).amplitudes()))});
  }
  return make_observable(std::move(values), std::move(bases));
}

CMatrix teleport_correction(std::size_t k) {
  switch (k) {
    case 0:
      return CMatrix::Identity(2, 2);
    case 1:
      return pauli_x();
    case 2:
      return pauli_z();
    case 3:
      return pauli_z() * pauli_x();
    default:
      throw InvalidArgument("teleport_correction: index must be 0..3");
  }
}

namespace {

DensityOperator bob_after(const CMatrix& post, std::size_t k, const Tolerances& tol) {
  static constexpr std::array<Index, 3> kDims{2, 2, 2};
  const CMatrix bob = partial_trace(post, kDims, 2);
  const CMatrix c = teleport_correction(k);
  return DensityOperator(c * bob * c.adjoint(), tol);
}

DensityOperator teleport_initial(const StateVector& psi_in, const Tolerances& tol) {
  if (psi_in.dim() != 2) throw DimMismatch("teleport: input must be a single qubit");
  return pure_to_density(tensor(psi_in, StateVector(bell_state(0))), tol);
}

}  // namespace

TeleportationRun teleport(const StateVector& psi_in, const ChannelConfig& config, std::size_t outcome,
                          const Tolerances& tol) {
  if (outcome > 3) throw InvalidArgument("teleport: outcome must be 0..3");
  const DensityOperator rho = teleport_initial(psi_in, tol);
  const Observable a = bell_observable();
  const MeasurementRecord rec = measure_selective(a, rho, outcome, config, 0, tol);
  const DensityOperator bob = bob_after(rec.post_state.matrix(), outcome, tol);

  std::vector<RefinedBranch> refined;
  if (config.postulate == Postulate::kVonNeumannRefined) {
    const auto d = build_refinement(a, refinement_bases(a, rho, config, 0), default_gamma, tol);
    for (std::size_t n = 0; n < d.eigenvectors(outcome).size(); ++n) {
      const CVector& e = d.eigenvectors(outcome)[n];
      const double p = e.dot(rho.matrix() * e).real();
      if (p <= tol.prob) continue;
      const auto fine = vn_refined_fine(d, rho, outcome, n, tol);
      const DensityOperator b = bob_after(fine.post_state.matrix(), outcome, tol);
      refined.push_back({n, p / rec.probability, fidelity(psi_in, b.matrix())});
    }
  }
  const double f = fidelity(psi_in, bob.matrix());
  return {psi_in, config, outcome, rec.probability, bob, f, std::move(refined)};
}

std::vector<TeleportationRun> teleport_all(const StateVector& psi_in, const ChannelConfig& config,
                                           const Tolerances& tol) {
  std::vector<TeleportationRun> runs;
  for (std::size_t k = 0; k < 4; ++k) runs.push_back(teleport(psi_in, config, k, tol));
  return runs;
}

DensityOperator bob_marginal(const StateVector& psi_in, const ChannelConfig& config, const Tolerances& tol) {
  static constexpr std::array<Index, 3> kDims{2, 2, 2};
  const DensityOperator rho = teleport_initial(psi_in, tol);
  const DensityOperator after = measure_nonselective(bell_observable(), rho, config, 0, tol);
  return partial_trace(after, kDims, 2, tol);
}

std::vector<SweepRow> refinement_sweep(const StateVector& psi_in, std::size_t n_bases, std::uint64_t seed,
                                       const Tolerances& tol) {
  if (n_bases == 0) throw InvalidArgument("refinement_sweep: n_bases must be at least 1");
  std::vector<SweepRow> rows;
  for (std::size_t id = 0; id < n_bases; ++id) {
    const ChannelConfig config = id == 0 ? ChannelConfig::VonNeumann(RefinementChoice::kAligned)
                                         : ChannelConfig::VonNeumann(RefinementChoice::kRandom, mix_seed(seed, id));
    for (const auto& run : teleport_all(psi_in, config, tol)) {
      rows.push_back({id, run.outcome, run.probability, run.fidelity});
    }
  }
  return rows;
}

CMatrix j_gate(double theta) {
  CMatrix phase = CMatrix::Zero(2, 2);
  phase(0, 0) = 1.0;
  phase(1, 1) = std::polar(1.0, -theta);
  return hadamard() * phase;
}

ClusterRun one_way_run(std::span<const double> angles, std::span<const int> outcomes, const ChannelConfig& config,
                       const Tolerances& tol) {
  const std::size_t n = angles.size() + 1;
  if (n < 3 || n > 5) throw InvalidArgument("one_way_run: cluster size must be 3..5");
  if (outcomes.size() != angles.size()) throw InvalidArgument("one_way_run: need one outcome per measured qubit");

  // |+>^n followed by CZ on every neighbouring pair: amplitude of basis index
  // b is 2^{-n/2} (-1)^{sum_k b_k b_{k+1}}.
  const Index dim = Index{1} << n;
  CVector cluster(dim);
  for (Index b = 0; b < dim; ++b) {
    int parity = 0;
    for (std::size_t q = 0; q + 1 < n; ++q) {
      const int bq = static_cast<int>((b >> (n - 1 - q)) & 1);
      const int bn = static_cast<int>((b >> (n - 2 - q)) & 1);
      parity ^= bq & bn;
    }
    cluster[b] = (parity ? -1.0 : 1.0) / std::sqrt(static_cast<double>(dim));
  }
  DensityOperator rho = pure_to_density(StateVector(cluster), tol);

  ClusterRun run{n, std::vector<double>(angles.begin(), angles.end()), {}, {}, 0, 0, 1.0, rho, {}, StateVector::Basis(2, 0), 0.0};
  int x = 0;
  int z = 0;
  for (std::size_t k = 0; k < angles.size(); ++k) {
    const int s = outcomes[k];
    if (s != 0 && s != 1) throw InvalidArgument("one_way_run: outcomes must be bits");
    const double theta = x ? -angles[k] : angles[k];
    run.adapted_angles.push_back(theta);

    const Index rest = rho.dim() / 2;
    std::vector<std::vector<CVector>> bases(2);
    for (int sv = 0; sv < 2; ++sv) {
      for (Index c = 0; c < rest; ++c) {
        bases[sv].push_back(tensor(measurement_vector(theta, sv), CVector(StateVector::Basis(rest, c).amplitudes())));
      }
    }
    const Observable obs = make_observable({0.0, 1.0}, std::move(bases), tol);
    const MeasurementRecord rec = measure_selective(obs, rho, static_cast<std::size_t>(s), config, k, tol);
    run.probability *= rec.probability;
    run.outcomes.push_back(s);

    const std::array<Index, 2> dims{2, rest};
    rho = partial_trace(rec.post_state, dims, 1, tol);
    const int new_x = s ^ z;
    z = x;
    x = new_x;
  }
  run.byproduct_x = x;
  run.byproduct_z = z;

  CMatrix correction = CMatrix::Identity(2, 2);
  if (x) correction = pauli_x() * correction;
  if (z) correction = pauli_z() * correction;
  run.output_state = DensityOperator(correction * rho.matrix() * correction.adjoint(), tol);

  CMatrix u = CMatrix::Identity(2, 2);
  for (double a : angles) u = j_gate(a) * u;
  run.target_unitary = u;
  run.target_state = StateVector::Normalized(u * plus_state());
  run.fidelity = fidelity(run.target_state, run.output_state.matrix());
  return run;
}

std::vector<ClusterRun> one_way_all_branches(std::span<const double> angles, const ChannelConfig& config,
                                             const Tolerances& tol) {
  std::vector<ClusterRun> runs;
  const std::size_t m = angles.size();
  for (std::size_t bits = 0; bits < (std::size_t{1} << m); ++bits) {
    std::vector<int> outcomes(m);
    for (std::size_t k = 0; k < m; ++k) outcomes[k] = static_cast<int>((bits >> (m - 1 - k)) & 1);
    runs.push_back(one_way_run(angles, outcomes, config, tol));
  }
  return runs;
}

std::vector<ClusterRun> one_way_rotation(double beta, const ChannelConfig& config, const Tolerances& tol) {
  const std::array<double, 2> angles{beta, 0.0};
  return one_way_all_branches(angles, config, tol);
}

}  // namespace qmeas
