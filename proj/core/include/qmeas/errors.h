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

#include <stdexcept>
#include <string>

namespace qmeas {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define QMEAS_DEFINE_ERROR(Name)            \
  class Name : public Error {               \
   public:                                  \
    using Error::Error;                     \
  }

QMEAS_DEFINE_ERROR(NormError);
QMEAS_DEFINE_ERROR(DimMismatch);
QMEAS_DEFINE_ERROR(NotOrthonormal);
QMEAS_DEFINE_ERROR(NotHermitian);
QMEAS_DEFINE_ERROR(NotPositive);
QMEAS_DEFINE_ERROR(GroupingAmbiguous);
QMEAS_DEFINE_ERROR(DuplicateEigenvalue);
QMEAS_DEFINE_ERROR(ZeroProbabilityOutcome);
QMEAS_DEFINE_ERROR(DegenerateSpectrum);
QMEAS_DEFINE_ERROR(SpanMismatch);
QMEAS_DEFINE_ERROR(NotInEigenspace);
QMEAS_DEFINE_ERROR(OracleRangeError);
QMEAS_DEFINE_ERROR(BlockMissing);
QMEAS_DEFINE_ERROR(InvalidArgument);

#undef QMEAS_DEFINE_ERROR

}  // namespace qmeas
