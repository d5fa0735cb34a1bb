/*
 * Copyright 2026 The atrisk Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef ATRISK_COMMON_HPP_
#define ATRISK_COMMON_HPP_

#include <chrono>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace atrisk {

// Error categories. The CLI maps each one to a stable exit code and a
// machine-parseable prefix.
enum class ErrorCode {
  kInvalidArgument,
  kNotFound,
  kParse,
  kEmptyInput,
  kOutOfRange,
  kLayoutMismatch,
  kNumerical,
  kConfig,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// UTC instant at second resolution.
using Timestamp = std::chrono::sys_seconds;

// Parses an RFC 3339 date-time ("2021-04-12T09:30:00Z", "...+09:00", an
// optional fractional second is truncated). Returns false on malformed input.
bool parse_rfc3339(std::string_view text, Timestamp* out);

// Formats as "YYYY-MM-DDTHH:MM:SSZ".
std::string format_rfc3339(Timestamp t);

// SplitMix64 finalizer; used to derive independent stream seeds from a run
// seed so that per-client streams do not depend on iteration order.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// 64-bit FNV-1a, rendered as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

// Shortest round-trip decimal representation of a double.
std::string format_double(double value);

}  // namespace atrisk

#endif  // ATRISK_COMMON_HPP_
