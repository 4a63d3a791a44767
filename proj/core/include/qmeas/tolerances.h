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

namespace qmeas {

/// Numerical tolerances shared by every module.
///
/// One record is threaded through the API so that a run can tighten or relax
/// all checks from a single place (the CLI reads overrides into this struct).
struct Tolerances {
  double norm = 1e-10;   ///< unit norm, unit trace, orthonormality
  double herm = 1e-10;   ///< Hermiticity, idempotence, commutators
  double psd = 1e-9;     ///< smallest admissible eigenvalue is -psd
  double eig = 1e-8;     ///< eigenvalues closer than this are one level
  double prob = 1e-12;   ///< outcomes at or below this are impossible
  double recon = 1e-9;   ///< sum_i alpha_i P_i versus the input matrix
};

}  // namespace qmeas
