// Copyright 2026 The gcnhmc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GCNHMC_ERROR_HPP
#define GCNHMC_ERROR_HPP

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gcnhmc {

enum class ErrorCode {
  // input validation
  kIoError,
  kMalformedLine,
  kDuplicateEdge,
  kSelfLoop,
  kSubThresholdWeight,
  kDuplicatePair,
  kCycleDetected,
  kUnknownKey,
  kInvalidValue,
  kUnknownTerm,
  kUnknownGene,
  kClosureViolation,
  kInfeasibleSpec,
  kGeneSetMismatch,
  kGeneOrderMismatch,
  kFeatureMismatch,
  kInvalidCounts,
  kTooFewSamples,
  // runtime / numeric
  kDegenerateWeights,
  kEigensolverFailure,
  kZeroAncestorGenes,
  kNoSubHierarchies,
  kNoPositives,
  kNoPositivesForTerm,
  kInternal,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kMalformedLine: return "MalformedLine";
    case ErrorCode::kDuplicateEdge: return "DuplicateEdge";
    case ErrorCode::kSelfLoop: return "SelfLoop";
    case ErrorCode::kSubThresholdWeight: return "SubThresholdWeight";
    case ErrorCode::kDuplicatePair: return "DuplicatePair";
    case ErrorCode::kCycleDetected: return "CycleDetected";
    case ErrorCode::kUnknownKey: return "UnknownKey";
    case ErrorCode::kInvalidValue: return "InvalidValue";
    case ErrorCode::kUnknownTerm: return "UnknownTerm";
    case ErrorCode::kUnknownGene: return "UnknownGene";
    case ErrorCode::kClosureViolation: return "ClosureViolation";
    case ErrorCode::kInfeasibleSpec: return "InfeasibleSpec";
    case ErrorCode::kGeneSetMismatch: return "GeneSetMismatch";
    case ErrorCode::kGeneOrderMismatch: return "GeneOrderMismatch";
    case ErrorCode::kFeatureMismatch: return "FeatureMismatch";
    case ErrorCode::kInvalidCounts: return "InvalidCounts";
    case ErrorCode::kTooFewSamples: return "TooFewSamples";
    case ErrorCode::kDegenerateWeights: return "DegenerateWeights";
    case ErrorCode::kEigensolverFailure: return "EigensolverFailure";
    case ErrorCode::kZeroAncestorGenes: return "ZeroAncestorGenes";
    case ErrorCode::kNoSubHierarchies: return "NoSubHierarchies";
    case ErrorCode::kNoPositives: return "NoPositives";
    case ErrorCode::kNoPositivesForTerm: return "NoPositivesForTerm";
    case ErrorCode::kInternal: return "Internal";
  }
  return "Unknown";
}

/// True for errors caused by bad input files or configuration (CLI exit
/// code 1); everything else is a runtime or numeric failure (exit code 2).
inline bool is_validation_error(ErrorCode code) {
  return code <= ErrorCode::kTooFewSamples;
}

/// The single exception type thrown by the library. Parse errors carry the
/// 1-based line number of the offending row.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> line = std::nullopt)
      : std::runtime_error(format(code, message, line)),
        code_(code),
        line_(line) {}

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> line() const noexcept { return line_; }

 private:
  static std::string format(ErrorCode code, const std::string& message,
                            std::optional<std::size_t> line) {
    std::string out(to_string(code));
    if (line) out += " (line " + std::to_string(*line) + ")";
    out += ": ";
    out += message;
    return out;
  }

  ErrorCode code_;
  std::optional<std::size_t> line_;
};

}  // namespace gcnhmc

#endif  // GCNHMC_ERROR_HPP
