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
#ifndef ATRISK_MODEL_IO_HPP_
#define ATRISK_MODEL_IO_HPP_

#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <string>

#include "atrisk/featurizer.hpp"
#include "atrisk/neuralnet.hpp"

namespace atrisk {

// A trained regressor plus what is needed to feed it: the feature layout it
// was trained on and whether it scores differential pairs.
struct SavedModel {
  ModelParams<double> params;
  // Set when features come from the built-in featurizer; empty when they
  // were imported from a feature CSV.
  std::optional<FeatureSpec> feature_spec;
  bool differential = true;
  std::string training_mode = "federated";

  std::string feature_descriptor() const;
  std::string feature_hash() const { return fnv1a_hex(feature_descriptor()); }

  // Throws kLayoutMismatch, citing both feature hashes, when features of
  // the given descriptor cannot be fed to this model.
  void check_compatible(const std::string& input_descriptor) const;
};

// Text format: "key,value" header lines, a "values" line, then one
// parameter per line in shortest round-trip decimal form.
void write_model(std::ostream& out, const SavedModel& model);
SavedModel read_model(std::istream& in, std::string_view source);

void save_model(const std::filesystem::path& path, const SavedModel& model);
SavedModel load_model(const std::filesystem::path& path);

}  // namespace atrisk

#endif  // ATRISK_MODEL_IO_HPP_
