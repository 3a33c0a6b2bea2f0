// Copyright 2026 the dgtqc authors
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

#ifndef DGTQC_ERROR_HPP_
#define DGTQC_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace dgtqc {

// Every failure the library reports carries one of these categories, so
// callers (and the CLI exit-code mapping) can react without string matching.
enum class ErrorKind {
  kParse,             // malformed input text (XML/JSON/CSV)
  kField,             // a required field is missing
  kGeometry,          // a bounding box violates xmin<xmax / ymin<ymax
  kValue,             // a field holds an out-of-domain value
  kIndex,             // an index is out of range
  kReference,         // a record references an unknown entity
  kConflict,          // duplicate/contradictory records
  kArgument,          // a function argument violates its precondition
  kDegenerate,        // input is statistically degenerate (constant, zero total)
  kSingular,          // linear system is rank deficient
  kUndefined,         // quantity undefined for this input (e.g. 0/0)
  kInsufficientTail,  // too few points above every power-law cutoff
  kInstability,       // stochastic procedure failed too often to trust
  kIo,                // filesystem failure
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kField: return "field";
    case ErrorKind::kGeometry: return "geometry";
    case ErrorKind::kValue: return "value";
    case ErrorKind::kIndex: return "index";
    case ErrorKind::kReference: return "reference";
    case ErrorKind::kConflict: return "conflict";
    case ErrorKind::kArgument: return "argument";
    case ErrorKind::kDegenerate: return "degenerate";
    case ErrorKind::kSingular: return "singular";
    case ErrorKind::kUndefined: return "undefined";
    case ErrorKind::kInsufficientTail: return "insufficient-tail";
    case ErrorKind::kInstability: return "instability";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + " error: " + message),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) throw Error(kind, message);
}

}  // namespace dgtqc

#endif  // DGTQC_ERROR_HPP_
