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

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qmeas/errors.h"
#include "qmeas/hilbert.h"
#include "qmeas/measurement.h"
#include "qmeas/protocols.h"
#include "qmeas/tolerances.h"

namespace qmeas::cli {

using Json = nlohmann::ordered_json;

/// Bad command line; the message carries the help text.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// `--help` was given; the message is the help text.
class HelpRequested : public Error {
 public:
  using Error::Error;
};

/// Malformed input file; the message names the offending field or position.
class ParseError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

enum class Command { kVerifyTheorem, kBayesCheck, kTeleport, kSweep, kMbqc, kDemo };

std::string to_string(Command c);

struct RunConfig {
  Command command = Command::kDemo;
  Index dim = 8;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> shots;  ///< set => SAMPLED oracle mode
  std::size_t trials = 100;
  Index max_rank = 8;
  Tolerances tolerances;
  std::map<std::string, double> tolerance_overrides;
  std::string input_path;
  std::string output_path;

  Postulate postulate = Postulate::kLuders;
  RefinementChoice refinement = RefinementChoice::kRotated;
  std::size_t n_bases = 50;
  std::vector<double> angles;  ///< mbqc; empty => {beta, 0}
  double beta = 0.0;

  bool sampled() const { return shots.has_value(); }
};

/// Parses and validates a command line. Tolerances start from the defaults,
/// then the JSON file named by QMEAS_TOLERANCE_FILE (if set), then
/// `--tol name=value` flags.
/// Throws UsageError or HelpRequested.
RunConfig parse_args(int argc, const char* const* argv);
RunConfig parse_args(const std::vector<std::string>& args);

/// Applies {"norm": .., "herm": .., ...} entries. Throws ParseError on an
/// unknown name or a non-positive value.
void apply_tolerance_overrides(Tolerances& tol, const std::map<std::string, double>& overrides);

// State and operator files: {"dim": n, "re": [...], "im": [...]} with flat
// arrays of length n (vectors) or n*n (row-major matrices).

Json state_to_json(const StateVector& psi);
Json matrix_to_json(const CMatrix& m);

/// Throws ParseError naming the field, NormError for a non-unit vector.
StateVector state_from_json(const Json& j, const Tolerances& tol = {});
CMatrix matrix_from_json(const Json& j);

/// Throws IoError, ParseError or NormError.
StateVector load_state(const std::string& path, const Tolerances& tol = {});
CMatrix load_matrix(const std::string& path);
void save_state(const std::string& path, const StateVector& psi);

/// Writes the report; throws IoError, or Error if it holds a non-finite number.
void save_report(const std::string& path, const Json& report);

/// Serialised report text, as written by save_report.
std::string dump_report(const Json& report);

struct RunResult {
  int exit_code = 0;  ///< 0 all checks passed, 1 tolerance failure
  Json report;
};

/// Executes a command. The summary table goes to `out`; the report is
/// returned and, if config.output_path is set, written there.
RunResult execute(const RunConfig& config, std::ostream& out);

/// parse_args + execute with the 0/1/2 exit-status contract.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qmeas::cli
