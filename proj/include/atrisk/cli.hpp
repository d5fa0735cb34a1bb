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
#ifndef ATRISK_CLI_HPP_
#define ATRISK_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace atrisk::cli {

// Exit codes. Every failure also prints one line "error[CODE]: message" on
// the error stream.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitNotFound = 2;
inline constexpr int kExitInvalid = 3;
inline constexpr int kExitLayoutMismatch = 4;
inline constexpr int kExitNumerical = 5;

// Default output directory when neither --out nor the config names one.
inline constexpr const char* kOutputDirEnv = "ATRISK_OUTPUT_DIR";

// Runs one subcommand: generate, train, predict, evaluate, early-sweep.
// args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace atrisk::cli

#endif  // ATRISK_CLI_HPP_
