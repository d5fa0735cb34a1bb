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
#include "atrisk/model_io.hpp"

#include <charconv>
#include <fstream>
#include <map>

#include "atrisk/csv.hpp"

namespace atrisk {

namespace {

constexpr std::string_view kMagic = "atrisk-model";

double parse_number(const std::string& text, std::string_view where) {
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw Error(ErrorCode::kParse,
                std::string(where) + ": bad number '" + text + "'");
  }
  return value;
}

Eigen::Index parse_index(const std::string& text, std::string_view where) {
  long long value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || value < 0) {
    throw Error(ErrorCode::kParse,
                std::string(where) + ": bad integer '" + text + "'");
  }
  return static_cast<Eigen::Index>(value);
}

}  // namespace

std::string SavedModel::feature_descriptor() const {
  return feature_spec ? feature_spec->descriptor()
                      : external_feature_descriptor(params.layout().input_dim);
}

void SavedModel::check_compatible(const std::string& input_descriptor) const {
  if (input_descriptor == feature_descriptor()) return;
  throw Error(ErrorCode::kLayoutMismatch,
              "model expects features '" + feature_descriptor() + "' (hash " +
                  feature_hash() + ") but input has '" + input_descriptor +
                  "' (hash " + fnv1a_hex(input_descriptor) + ")");
}

void write_model(std::ostream& out, const SavedModel& model) {
  const MlpLayout& l = model.params.layout();
  out << kMagic << ",1\n";
  out << "input_dim," << l.input_dim << '\n';
  out << "hidden," << l.hidden1 << ',' << l.hidden2 << '\n';
  out << "dropout_rate," << format_double(l.dropout_rate) << '\n';
  if (model.feature_spec) {
    out << "feature_kind,histogram\n";
    out << "vocab,";
    for (std::size_t i = 0; i < model.feature_spec->vocab.size(); ++i) {
      out << (i ? "|" : "") << model.feature_spec->vocab[i];
    }
    out << '\n';
    out << "n_buckets," << model.feature_spec->n_buckets << '\n';
    out << "event_weight," << format_double(model.feature_spec->event_weight) << '\n';
  } else {
    out << "feature_kind,external\n";
  }
  out << "feature_hash," << model.feature_hash() << '\n';
  out << "training_mode," << model.training_mode << '\n';
  out << "differential," << (model.differential ? 1 : 0) << '\n';
  out << "parameter_count," << model.params.size() << '\n';
  out << "values\n";
  for (Eigen::Index i = 0; i < model.params.size(); ++i) {
    out << format_double(model.params.values()(i)) << '\n';
  }
}

SavedModel read_model(std::istream& in, std::string_view source) {
  const std::string src(source);
  std::string line;
  std::map<std::string, std::vector<std::string>> header;
  bool magic = false;
  bool have_values = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line == "values") {
      have_values = true;
      break;
    }
    std::vector<std::string> fields = split_csv_line(line);
    if (!magic) {
      if (fields.size() != 2 || fields[0] != kMagic || fields[1] != "1") {
        throw Error(ErrorCode::kParse, src + ": not an atrisk model file");
      }
      magic = true;
      continue;
    }
    const std::string key = fields.front();
    fields.erase(fields.begin());
    header[key] = std::move(fields);
  }
  if (!magic) throw Error(ErrorCode::kEmptyInput, src + ": empty model file");
  if (!have_values) throw Error(ErrorCode::kParse, src + ": missing 'values' section");

  auto field = [&](const std::string& key, std::size_t count) -> const std::vector<std::string>& {
    const auto it = header.find(key);
    if (it == header.end() || it->second.size() != count) {
      throw Error(ErrorCode::kParse, src + ": missing or malformed '" + key + "'");
    }
    return it->second;
  };

  MlpLayout layout;
  layout.input_dim = parse_index(field("input_dim", 1)[0], src);
  layout.hidden1 = parse_index(field("hidden", 2)[0], src);
  layout.hidden2 = parse_index(field("hidden", 2)[1], src);
  layout.dropout_rate = parse_number(field("dropout_rate", 1)[0], src);

  SavedModel model;
  const std::string& kind = field("feature_kind", 1)[0];
  if (kind == "histogram") {
    FeatureSpec spec;
    const std::string& vocab = field("vocab", 1)[0];
    std::size_t start = 0;
    while (start <= vocab.size()) {
      const std::size_t bar = vocab.find('|', start);
      spec.vocab.push_back(vocab.substr(start, bar == std::string::npos ? bar : bar - start));
      if (bar == std::string::npos) break;
      start = bar + 1;
    }
    spec.n_buckets = static_cast<std::size_t>(parse_index(field("n_buckets", 1)[0], src));
    spec.event_weight = parse_number(field("event_weight", 1)[0], src);
    model.feature_spec = std::move(spec);
  } else if (kind != "external") {
    throw Error(ErrorCode::kParse, src + ": unknown feature_kind '" + kind + "'");
  }
  model.training_mode = field("training_mode", 1)[0];
  model.differential = field("differential", 1)[0] == "1";

  const Eigen::Index count = parse_index(field("parameter_count", 1)[0], src);
  Eigen::VectorXd values(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    if (!std::getline(in, line)) {
      throw Error(ErrorCode::kParse, src + ": truncated parameter list");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    values(i) = parse_number(line, src);
  }
  if (!values.allFinite()) {
    throw Error(ErrorCode::kNumerical, src + ": non-finite parameter");
  }
  model.params = ModelParams<double>(layout, std::move(values));

  const std::string& stored_hash = field("feature_hash", 1)[0];
  if (stored_hash != model.feature_hash()) {
    throw Error(ErrorCode::kParse, src + ": feature_hash " + stored_hash +
                                       " does not match header (" +
                                       model.feature_hash() + ")");
  }
  if (model.feature_spec && model.feature_spec->dimension() != layout.input_dim) {
    throw Error(ErrorCode::kLayoutMismatch,
                src + ": featurizer dimension disagrees with input_dim");
  }
  return model;
}

void save_model(const std::filesystem::path& path, const SavedModel& model) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kNotFound, "cannot write '" + path.string() + "'");
  write_model(out, model);
}

SavedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot open '" + path.string() + "'");
  return read_model(in, path.string());
}

}  // namespace atrisk
