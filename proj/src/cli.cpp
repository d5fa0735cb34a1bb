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
#include "atrisk/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "atrisk/common.hpp"
#include "atrisk/domain_data.hpp"
#include "atrisk/featurizer.hpp"
#include "atrisk/federation.hpp"
#include "atrisk/model_io.hpp"
#include "atrisk/pipeline.hpp"
#include "atrisk/ranking_eval.hpp"
#include "atrisk/synthgen.hpp"

namespace atrisk::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

[[noreturn]] void config_error(const std::string& message) {
  throw Error(ErrorCode::kConfig, message);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kNotFound, "cannot write '" + path.string() + "'");
  out << text;
}

json parse_json_file(const fs::path& path) {
  const std::string text = read_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    config_error(path.string() + ": " + e.what());
  }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    config_error(std::string("config key '") + key + "' has the wrong type");
  }
}

const json& section(const json& obj, const char* key) {
  static const json kEmpty = json::object();
  if (!obj.contains(key)) return kEmpty;
  if (!obj.at(key).is_object()) config_error(std::string("'") + key + "' must be an object");
  return obj.at(key);
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

fs::path output_dir(const std::string& flag, const json& config, const fs::path& base) {
  if (!flag.empty()) return flag;
  if (config.contains("output_dir")) return resolve(base, get_or<std::string>(config, "output_dir", "."));
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  return ".";
}

bool parse_bool_flag(const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  config_error("expected true/false, got '" + text + "'");
}

// ---------------------------------------------------------------------------
// Data sources

struct ClientSource {
  std::string id;
  std::string role = "train";
  std::optional<fs::path> features;
  std::optional<fs::path> events;
  std::optional<fs::path> schedule;
  fs::path grades;
  std::size_t lectures = 1;
};

ClientSource parse_client_source(const json& j, const fs::path& base) {
  if (!j.is_object()) config_error("each client entry must be an object");
  ClientSource s;
  s.id = get_or<std::string>(j, "id", "");
  if (s.id.empty()) config_error("client entry without 'id'");
  s.role = get_or<std::string>(j, "role", "train");
  if (j.contains("features")) s.features = resolve(base, get_or<std::string>(j, "features", ""));
  if (j.contains("events")) s.events = resolve(base, get_or<std::string>(j, "events", ""));
  if (j.contains("schedule")) s.schedule = resolve(base, get_or<std::string>(j, "schedule", ""));
  if (!j.contains("grades")) config_error("client '" + s.id + "' has no 'grades'");
  s.grades = resolve(base, get_or<std::string>(j, "grades", ""));
  s.lectures = get_or<std::size_t>(j, "lectures", 1);
  if (s.features.has_value() == s.events.has_value()) {
    config_error("client '" + s.id + "' needs exactly one of 'features' or 'events'");
  }
  if (s.events && !s.schedule) config_error("client '" + s.id + "' has events but no 'schedule'");
  return s;
}

std::vector<ClientSource> load_sources(const json& data, const fs::path& base) {
  std::vector<ClientSource> sources;
  if (data.contains("manifest")) {
    const fs::path manifest = resolve(base, get_or<std::string>(data, "manifest", ""));
    const json m = parse_json_file(manifest);
    if (!m.contains("clients") || !m.at("clients").is_array()) {
      config_error(manifest.string() + ": manifest without 'clients' array");
    }
    for (const json& c : m.at("clients")) {
      sources.push_back(parse_client_source(c, manifest.parent_path()));
    }
  }
  if (data.contains("clients")) {
    if (!data.at("clients").is_array()) config_error("'data.clients' must be an array");
    for (const json& c : data.at("clients")) sources.push_back(parse_client_source(c, base));
  }
  return sources;
}

FeatureSpec parse_feature_spec(const json& config) {
  const json& f = section(config, "featurizer");
  FeatureSpec spec;
  spec.vocab = get_or<std::vector<std::string>>(f, "vocab", OperationVocab::standard().names);
  spec.n_buckets = get_or<std::size_t>(f, "n_buckets", 4);
  spec.event_weight = get_or<double>(f, "event_weight", 1.0);
  if (spec.vocab.empty()) config_error("featurizer vocabulary is empty");
  if (spec.n_buckets < 1) config_error("featurizer n_buckets must be >= 1");
  if (!(spec.event_weight > 0.0)) config_error("featurizer event_weight must be positive");
  return spec;
}

struct LoadedClient {
  ClientDataset data;
  std::string descriptor;  // feature descriptor
  std::vector<std::string> inactive;
  std::size_t unknown_operations = 0;
};

LoadedClient load_client(const ClientSource& s, const FeatureSpec& spec, double max_score,
                         std::size_t k = 0) {
  const std::vector<GradeRecord> grades = read_grades(s.grades);
  LoadedClient out;
  if (s.features) {
    const FeatureMap features = read_feature_csv(*s.features);
    out.data = make_client(s.id, features, grades, s.lectures, max_score);
    out.descriptor = external_feature_descriptor(out.data.dimension());
  } else {
    const EventLog log = ingest_events(*s.events, OperationVocab{spec.vocab});
    const LectureSchedule schedule = read_schedule(*s.schedule);
    out.data = client_from_events(s.id, log.records, schedule, grades, spec, k, max_score);
    out.descriptor = spec.descriptor();
    out.inactive = inactive_students(log.records, grades);
    out.unknown_operations = log.unknown_operation_count;
  }
  return out;
}

std::string hash_inputs(const std::string& config_text, const std::vector<ClientSource>& sources) {
  std::string all = config_text;
  for (const ClientSource& s : sources) {
    all += '\0' + s.id;
    for (const auto& p : {s.features, s.events, s.schedule, std::optional<fs::path>(s.grades)}) {
      if (p) all += '\0' + read_file(*p);
    }
  }
  return fnv1a_hex(all);
}

// ---------------------------------------------------------------------------
// Config -> training settings

struct Experiment {
  TrainingMode mode = TrainingMode::kFederated;
  bool differential = true;
};

FederationConfig parse_federation(const json& config) {
  const json& t = section(config, "training");
  const json& m = section(t, "mlp");
  FederationConfig fc;
  fc.rounds = get_or<std::size_t>(t, "rounds", 100);
  fc.max_pairs_per_client = get_or<std::size_t>(t, "max_pairs_per_client", 0);
  fc.threads = get_or<std::size_t>(t, "threads", 1);
  fc.seed = get_or<std::uint64_t>(config, "seed", 0);
  const auto hidden = get_or<std::vector<Eigen::Index>>(m, "hidden", {50, 10});
  if (hidden.size() != 2) config_error("'mlp.hidden' must list two layer sizes");
  fc.mlp.hidden = {hidden[0], hidden[1]};
  fc.mlp.dropout_rate = get_or<double>(m, "dropout_rate", 0.2);
  fc.mlp.learning_rate = get_or<double>(m, "learning_rate", 0.01);
  fc.mlp.batch_size = get_or<Eigen::Index>(m, "batch_size", 64);
  fc.mlp.local_epochs_per_round = get_or<int>(m, "local_epochs_per_round", 1);
  if (t.contains("client_overrides")) {
    for (const auto& [id, o] : section(t, "client_overrides").items()) {
      MlpOverrides ov;
      if (o.contains("learning_rate")) ov.learning_rate = get_or<double>(o, "learning_rate", 0);
      if (o.contains("batch_size")) ov.batch_size = get_or<Eigen::Index>(o, "batch_size", 0);
      if (o.contains("local_epochs_per_round")) {
        ov.local_epochs_per_round = get_or<int>(o, "local_epochs_per_round", 0);
      }
      if (o.contains("seed")) ov.seed = get_or<std::uint64_t>(o, "seed", 0);
      fc.client_overrides[id] = ov;
    }
  }
  try {
    fc.validate();
  } catch (const Error& e) {
    config_error(e.what());
  }
  return fc;
}

std::vector<Experiment> parse_experiments(const json& config) {
  const json& t = section(config, "training");
  std::vector<Experiment> out;
  if (t.contains("experiments")) {
    if (!t.at("experiments").is_array()) config_error("'training.experiments' must be an array");
    for (const json& e : t.at("experiments")) {
      Experiment x;
      if (!parse_training_mode(get_or<std::string>(e, "mode", "federated"), &x.mode)) {
        config_error("experiment mode must be 'federated' or 'centralized'");
      }
      x.differential = get_or<bool>(e, "differential", true);
      out.push_back(x);
    }
  } else {
    Experiment x;
    if (!parse_training_mode(get_or<std::string>(t, "mode", "federated"), &x.mode)) {
      config_error("training mode must be 'federated' or 'centralized'");
    }
    x.differential = get_or<bool>(t, "use_differential", true);
    out.push_back(x);
  }
  if (out.empty()) config_error("no experiments configured");
  return out;
}

ordered_json config_echo(const FederationConfig& fc, const Experiment& x) {
  ordered_json j;
  j["mode"] = std::string(training_mode_name(x.mode));
  j["use_differential"] = x.differential;
  j["rounds"] = fc.rounds;
  j["seed"] = fc.seed;
  j["max_pairs_per_client"] = fc.max_pairs_per_client;
  j["mlp"] = {{"input_dim", fc.mlp.input_dim},
              {"hidden", {fc.mlp.hidden[0], fc.mlp.hidden[1]}},
              {"dropout_rate", fc.mlp.dropout_rate},
              {"learning_rate", fc.mlp.learning_rate},
              {"batch_size", fc.mlp.batch_size},
              {"local_epochs_per_round", fc.mlp.local_epochs_per_round}};
  return j;
}

std::string model_stem(const Experiment& x, std::size_t run) {
  return std::string(training_mode_name(x.mode)) + (x.differential ? "-diff" : "-plain") +
         "-run" + std::to_string(run);
}

std::uint64_t run_seed(std::uint64_t seed, std::size_t run) {
  return run == 0 ? seed : derive_seed(seed, 0x52554e00ULL + run);
}

// ---------------------------------------------------------------------------
// Subcommands

struct GenerateArgs {
  std::string config;
  std::string out;
};

int cmd_generate(const GenerateArgs& args, std::ostream& out) {
  const fs::path config_path(args.config);
  const json config = parse_json_file(config_path);
  const fs::path dir = output_dir(args.out, config, config_path.parent_path());
  const json& s = section(config, "synth");

  SynthSpec spec;
  const std::size_t test_clients = get_or<std::size_t>(s, "test_clients", 1);
  spec.n_clients = get_or<std::size_t>(s, "train_clients", 12) + test_clients;
  spec.client_sizes = get_or<std::vector<std::size_t>>(s, "client_sizes", {});
  spec.students_min = get_or<std::size_t>(s, "students_min", 35);
  spec.students_max = get_or<std::size_t>(s, "students_max", 175);
  spec.feature_dim = get_or<Eigen::Index>(s, "feature_dim", 100);
  spec.grade_probs = get_or<std::vector<std::array<double, 5>>>(s, "grade_probs", {});
  spec.signal_strength = get_or<double>(s, "signal_strength", 1.0);
  spec.client_shift = get_or<double>(s, "client_shift", 0.0);
  spec.noise_std = get_or<double>(s, "noise_std", 0.1);
  spec.seed = get_or<std::uint64_t>(s, "seed", get_or<std::uint64_t>(config, "seed", 0));
  spec.lecture_count = get_or<std::size_t>(s, "lecture_count", 15);
  const std::string emit = get_or<std::string>(s, "emit", "features");
  try {
    spec.validate();
  } catch (const Error& e) {
    config_error(e.what());
  }

  ordered_json manifest;
  manifest["generator"] = {{"seed", spec.seed}, {"emit", emit}};
  manifest["clients"] = json::array();
  auto role_of = [&](std::size_t k) {
    return k + test_clients >= spec.n_clients ? "test" : "train";
  };
  if (emit == "features") {
    const std::vector<ClientDataset> clients = generate(spec);
    for (std::size_t k = 0; k < clients.size(); ++k) {
      const ClientDataset& c = clients[k];
      FeatureMap features;
      for (std::size_t i = 0; i < c.size(); ++i) {
        features[c.students[i]] = c.features.row(static_cast<Eigen::Index>(i)).transpose();
      }
      std::ostringstream fcsv, gcsv;
      write_feature_csv(fcsv, features);
      const auto records = c.grade_records();
      write_grades(gcsv, records);
      write_file(dir / (c.client_id + "_features.csv"), fcsv.str());
      write_file(dir / (c.client_id + "_grades.csv"), gcsv.str());
      manifest["clients"].push_back({{"id", c.client_id},
                                     {"role", role_of(k)},
                                     {"features", c.client_id + "_features.csv"},
                                     {"grades", c.client_id + "_grades.csv"},
                                     {"lectures", c.lecture_count}});
    }
  } else if (emit == "events") {
    SynthLogOptions options;
    options.vocab.names = parse_feature_spec(config).vocab;
    options.base_rate = get_or<double>(s, "base_rate", options.base_rate);
    const std::vector<SyntheticCourse> courses = generate_event_logs(spec, options);
    for (std::size_t k = 0; k < courses.size(); ++k) {
      const SyntheticCourse& c = courses[k];
      std::ostringstream ecsv, gcsv, scsv;
      write_events(ecsv, c.events);
      write_grades(gcsv, c.grades);
      write_schedule(scsv, c.schedule);
      write_file(dir / (c.client_id + "_events.csv"), ecsv.str());
      write_file(dir / (c.client_id + "_grades.csv"), gcsv.str());
      write_file(dir / (c.client_id + "_schedule.csv"), scsv.str());
      manifest["clients"].push_back({{"id", c.client_id},
                                     {"role", role_of(k)},
                                     {"events", c.client_id + "_events.csv"},
                                     {"schedule", c.client_id + "_schedule.csv"},
                                     {"grades", c.client_id + "_grades.csv"},
                                     {"lectures", c.schedule.size()}});
    }
  } else {
    config_error("'synth.emit' must be 'features' or 'events'");
  }
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  out << "wrote " << manifest["clients"].size() << " clients to " << dir.string() << "\n";
  return kExitOk;
}

struct TrainArgs {
  std::string config;
  std::string mode;
  std::string differential;
  std::optional<std::size_t> runs;
  std::string out;
};

int cmd_train(const TrainArgs& args, std::ostream& out) {
  const fs::path config_path(args.config);
  const std::string config_text = read_file(config_path);
  json config;
  try {
    config = json::parse(config_text);
  } catch (const json::parse_error& e) {
    config_error(config_path.string() + ": " + e.what());
  }
  const fs::path base = config_path.parent_path();
  const fs::path dir = output_dir(args.out, config, base);
  const double max_score = get_or<double>(config, "max_score", kDefaultMaxScore);
  const FeatureSpec spec = parse_feature_spec(config);
  FederationConfig fc = parse_federation(config);

  std::vector<Experiment> experiments = parse_experiments(config);
  if (!args.mode.empty() || !args.differential.empty()) {
    Experiment x = experiments.front();
    if (!args.mode.empty() && !parse_training_mode(args.mode, &x.mode)) {
      config_error("--mode must be 'federated' or 'centralized'");
    }
    if (!args.differential.empty()) x.differential = parse_bool_flag(args.differential);
    experiments = {x};
  }
  const std::size_t runs =
      args.runs.value_or(get_or<std::size_t>(section(config, "training"), "runs", 1));
  if (runs < 1) config_error("runs must be >= 1");

  std::vector<ClientSource> sources;
  for (ClientSource& s : load_sources(section(config, "data"), base)) {
    if (s.role == "train") sources.push_back(std::move(s));
  }
  if (sources.empty()) config_error("no training clients configured");

  std::vector<ClientDataset> clients;
  std::optional<std::string> descriptor;
  ordered_json data_report = ordered_json::array();
  for (const ClientSource& s : sources) {
    LoadedClient c = load_client(s, spec, max_score);
    if (descriptor && *descriptor != c.descriptor) {
      throw Error(ErrorCode::kLayoutMismatch,
                  "client '" + s.id + "' features '" + c.descriptor +
                      "' differ from '" + *descriptor + "'");
    }
    descriptor = c.descriptor;
    data_report.push_back({{"client", s.id},
                           {"students", c.data.size()},
                           {"inactive_students", c.inactive},
                           {"unknown_operations", c.unknown_operations}});
    clients.push_back(std::move(c.data));
  }
  const bool from_events = sources.front().events.has_value();
  const std::string input_hash = hash_inputs(config_text, sources);

  ordered_json summary;
  summary["input_hash"] = input_hash;
  summary["data"] = data_report;
  summary["runs"] = ordered_json::array();
  for (const Experiment& x : experiments) {
    for (std::size_t r = 0; r < runs; ++r) {
      FederationConfig run_cfg = fc;
      run_cfg.mode = x.mode;
      run_cfg.use_differential = x.differential;
      run_cfg.seed = run_seed(fc.seed, r);
      const TrainingRunReport report = run_training(clients, run_cfg);

      SavedModel model;
      model.params = report.final_params;
      if (from_events) model.feature_spec = spec;
      model.differential = x.differential;
      model.training_mode = std::string(training_mode_name(x.mode));
      const std::string stem = model_stem(x, r);
      fs::create_directories(dir);
      save_model(dir / (stem + ".model"), model);

      ordered_json j;
      j["mode"] = std::string(training_mode_name(report.mode));
      j["differential"] = report.use_differential;
      j["run"] = r;
      j["model_file"] = stem + ".model";
      j["feature_hash"] = model.feature_hash();
      j["input_hash"] = input_hash;
      j["config"] = config_echo(report.config, x);
      j["client_sample_counts"] = ordered_json::object();
      for (const auto& [id, n] : report.client_sample_counts) j["client_sample_counts"][id] = n;
      j["round_losses"] = report.round_losses;
      j["metadata"] = {{"wall_clock_seconds", report.wall_clock_seconds}};
      write_file(dir / (stem + ".report.json"), j.dump(2) + "\n");
      summary["runs"].push_back({{"mode", j["mode"]},
                                 {"differential", x.differential},
                                 {"run", r},
                                 {"model", stem + ".model"},
                                 {"report", stem + ".report.json"},
                                 {"final_loss", report.round_losses.back()}});
      out << stem << ": final loss " << format_double(report.round_losses.back()) << "\n";
    }
  }
  write_file(dir / "train_summary.json", summary.dump(2) + "\n");
  return kExitOk;
}

// Input features for scoring: either a feature CSV or logs + schedule.
struct InputArgs {
  std::string features;
  std::string events;
  std::string schedule;
  std::string grades;
  std::string course = "course";
};

ClientSource source_from_args(const InputArgs& in) {
  ClientSource s;
  s.id = in.course;
  s.role = "test";
  if (!in.features.empty() == !in.events.empty()) {
    config_error("give exactly one of --features or --events");
  }
  if (!in.features.empty()) s.features = in.features;
  if (!in.events.empty()) {
    if (in.schedule.empty()) config_error("--events requires --schedule");
    s.events = in.events;
    s.schedule = in.schedule;
  }
  s.grades = in.grades;
  return s;
}

FeatureSpec model_spec_or_default(const SavedModel& model) {
  return model.feature_spec.value_or(FeatureSpec{OperationVocab::standard().names, 4});
}

LoadedClient load_for_model(const ClientSource& s, const SavedModel& model, std::size_t k = 0) {
  if (s.events && !model.feature_spec) {
    throw Error(ErrorCode::kLayoutMismatch,
                "model was trained on imported features (hash " + model.feature_hash() +
                    ") and cannot featurize event logs");
  }
  LoadedClient c = load_client(s, model_spec_or_default(model), kDefaultMaxScore, k);
  model.check_compatible(c.descriptor);
  return c;
}

struct PredictArgs {
  std::string model;
  InputArgs input;
  std::string out;
};

int cmd_predict(const PredictArgs& args, std::ostream& out) {
  const SavedModel model = load_model(args.model);
  ClientDataset client;
  if (!args.input.grades.empty()) {
    client = load_for_model(source_from_args(args.input), model).data;
  } else {
    // No ground truth: score the roster found in the inputs.
    FeatureMap features;
    std::string descriptor;
    if (!args.input.features.empty()) {
      features = read_feature_csv(args.input.features);
      descriptor = external_feature_descriptor(features.begin()->second.size());
    } else {
      if (!model.feature_spec) {
        throw Error(ErrorCode::kLayoutMismatch,
                    "model was trained on imported features (hash " + model.feature_hash() +
                        ") and cannot featurize event logs");
      }
      if (args.input.schedule.empty()) config_error("--events requires --schedule");
      const EventLog log = ingest_events(args.input.events, OperationVocab{model.feature_spec->vocab});
      const LectureSchedule schedule = read_schedule(args.input.schedule);
      const auto in_course = truncate_events(log.records, schedule, schedule.size());
      features = featurize(in_course, *model.feature_spec, course_span(in_course, schedule));
      descriptor = model.feature_spec->descriptor();
    }
    model.check_compatible(descriptor);
    std::vector<GradeRecord> placeholder;
    for (const auto& [id, v] : features) placeholder.push_back({id, Grade::kA});
    client = make_client(args.input.course, features, placeholder, 1);
  }
  const auto scores = predict_individual_scores(model.params, client, model.differential);
  std::vector<std::pair<std::string, double>> ordered(scores.begin(), scores.end());
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const auto& a, const auto& b) { return a.second < b.second; });
  std::ostringstream csv;
  csv << "student_id,score,rank\n";
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    csv << ordered[i].first << ',' << format_double(ordered[i].second) << ',' << (i + 1) << '\n';
  }
  if (args.out.empty() || args.out == "-") {
    out << csv.str();
  } else {
    write_file(args.out, csv.str());
  }
  return kExitOk;
}

struct EvaluateArgs {
  std::vector<std::string> models;
  InputArgs input;
  std::string manifest;
  std::size_t threshold_rank = kDefaultThresholdRank;
  std::string out;
};

int cmd_evaluate(const EvaluateArgs& args, std::ostream& out) {
  if (args.models.empty()) config_error("at least one --model is required");
  std::vector<SavedModel> models;
  for (const std::string& m : args.models) models.push_back(load_model(m));
  for (const SavedModel& m : models) {
    if (m.differential != models.front().differential ||
        m.training_mode != models.front().training_mode ||
        m.feature_descriptor() != models.front().feature_descriptor()) {
      config_error("models passed to one evaluate call must share mode, "
                   "differential flag and feature layout");
    }
  }

  std::vector<ClientSource> sources;
  if (!args.manifest.empty()) {
    json data;
    data["manifest"] = args.manifest;
    for (ClientSource& s : load_sources(data, ".")) {
      if (s.role == "test") sources.push_back(std::move(s));
    }
    if (sources.empty()) config_error(args.manifest + ": no clients with role 'test'");
  } else {
    if (args.input.grades.empty()) config_error("--grades is required");
    sources.push_back(source_from_args(args.input));
  }

  const fs::path dir = output_dir(args.out, json::object(), ".");
  std::ostringstream csv;
  csv << "course,mode,differential,models," << metrics_csv_columns() << '\n';
  ordered_json report;
  report["averaging"] = "per-metric mean over models";
  report["threshold_rank"] = args.threshold_rank;
  report["courses"] = ordered_json::array();
  for (const ClientSource& s : sources) {
    const LoadedClient c = load_for_model(s, models.front());
    std::vector<MetricsReport> per_model;
    for (std::size_t m = 0; m < models.size(); ++m) {
      const auto scores = predict_individual_scores(models[m].params, c.data, models[m].differential);
      const RiskRanking ranking = rank_client(scores, c.data, args.threshold_rank);
      per_model.push_back(evaluate(ranking));
      if (m == 0) {
        std::ostringstream curve;
        write_pr_curve_csv(curve, ranking);
        write_file(dir / ("pr_curve_" + s.id + ".csv"), curve.str());
      }
    }
    const MetricsReport mean = mean_report(per_model);
    csv << s.id << ',' << models.front().training_mode << ','
        << (models.front().differential ? 1 : 0) << ',' << models.size() << ','
        << metrics_csv_values(mean) << '\n';
    ordered_json row;
    row["course"] = s.id;
    row["mode"] = models.front().training_mode;
    row["differential"] = models.front().differential;
    row["models"] = models.size();
    row["top_n_precision"] = {{"5", mean.top_n[0]},
                              {"10", mean.top_n[1]},
                              {"15", mean.top_n[2]},
                              {"at_risk", mean.top_at_risk}};
    row["ndcg"] = mean.ndcg;
    row["pr_auc"] = mean.pr_auc;
    row["at_risk_count"] = mean.at_risk_count;
    row["students"] = mean.student_count;
    row["warnings"] = mean.warnings;
    report["courses"].push_back(row);
  }
  write_file(dir / "metrics.csv", csv.str());
  write_file(dir / "metrics.json", report.dump(2) + "\n");
  out << csv.str();
  return kExitOk;
}

struct SweepArgs {
  std::string model;
  InputArgs input;
  std::size_t k_min = 1;
  std::size_t k_max = 0;
  std::size_t shuffles = 1000;
  std::uint64_t seed = 0;
  std::size_t threshold_rank = kDefaultThresholdRank;
  std::string out;
};

int cmd_early_sweep(const SweepArgs& args, std::ostream& out) {
  const SavedModel model = load_model(args.model);
  if (args.input.events.empty() || args.input.schedule.empty() || args.input.grades.empty()) {
    config_error("early-sweep needs --events, --schedule and --grades");
  }
  const ClientSource source = source_from_args(args.input);
  const LectureSchedule schedule = read_schedule(*source.schedule);
  const std::size_t k_max = args.k_max == 0 ? schedule.size() : args.k_max;
  if (args.k_min < 1 || args.k_min > k_max || k_max > schedule.size()) {
    throw Error(ErrorCode::kOutOfRange,
                "k range " + std::to_string(args.k_min) + ".." + std::to_string(k_max) +
                    " not within schedule 1.." + std::to_string(schedule.size()));
  }
  std::ostringstream csv;
  csv << "k,kind," << metrics_csv_columns() << '\n';
  for (std::size_t k = args.k_min; k <= k_max; ++k) {
    const LoadedClient c = load_for_model(source, model, k);
    const auto scores = predict_individual_scores(model.params, c.data, model.differential);
    const RiskRanking ranking = rank_client(scores, c.data, args.threshold_rank);
    csv << k << ",model," << metrics_csv_values(evaluate(ranking)) << '\n';
    csv << k << ",random,"
        << metrics_csv_values(random_baseline(ranking, args.shuffles, derive_seed(args.seed, k)))
        << '\n';
  }
  if (args.out.empty() || args.out == "-") {
    out << csv.str();
  } else {
    write_file(args.out, csv.str());
  }
  return kExitOk;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound: return kExitNotFound;
    case ErrorCode::kLayoutMismatch: return kExitLayoutMismatch;
    case ErrorCode::kNumerical: return kExitNumerical;
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kParse:
    case ErrorCode::kEmptyInput:
    case ErrorCode::kOutOfRange:
    case ErrorCode::kConfig: return kExitInvalid;
  }
  return kExitFailure;
}

std::string one_line(std::string text) {
  for (char& c : text) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return text;
}

void add_input_options(CLI::App* cmd, InputArgs* in) {
  cmd->add_option("--features", in->features, "feature CSV (student_id,f_0,...)");
  cmd->add_option("--events", in->events, "events CSV");
  cmd->add_option("--schedule", in->schedule, "lecture schedule CSV");
  cmd->add_option("--grades", in->grades, "grades CSV");
  cmd->add_option("--course", in->course, "course name used in outputs");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"At-risk student ranking with federated training"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate_cmd = app.add_subcommand("generate", "write a synthetic cohort");
  generate_cmd->add_option("--config", gen.config, "config JSON")->required();
  generate_cmd->add_option("--out", gen.out, "output directory");

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "train models as configured");
  train_cmd->add_option("--config", train.config, "config JSON")->required();
  train_cmd->add_option("--mode", train.mode, "federated | centralized");
  train_cmd->add_option("--differential", train.differential, "true | false");
  train_cmd->add_option("--runs", train.runs, "independent runs per experiment");
  train_cmd->add_option("--out", train.out, "output directory");

  PredictArgs predict;
  auto* predict_cmd = app.add_subcommand("predict", "rank one course's students");
  predict_cmd->add_option("--model", predict.model, "model file")->required();
  add_input_options(predict_cmd, &predict.input);
  predict_cmd->add_option("--out", predict.out, "output CSV ('-' for stdout)");

  EvaluateArgs eval;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "ranking metrics on held-out courses");
  evaluate_cmd->add_option("--model", eval.models, "model file (repeat to average runs)")->required();
  add_input_options(evaluate_cmd, &eval.input);
  evaluate_cmd->add_option("--manifest", eval.manifest, "evaluate every test client of a manifest");
  evaluate_cmd->add_option("--threshold-rank", eval.threshold_rank, "at-risk threshold rank");
  evaluate_cmd->add_option("--out", eval.out, "output directory");

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("early-sweep", "metrics on logs truncated at lecture k");
  sweep_cmd->add_option("--model", sweep.model, "model file")->required();
  add_input_options(sweep_cmd, &sweep.input);
  sweep_cmd->add_option("--k-min", sweep.k_min, "first lecture");
  sweep_cmd->add_option("--k-max", sweep.k_max, "last lecture (default: all)");
  sweep_cmd->add_option("--shuffles", sweep.shuffles, "random-baseline shuffles");
  sweep_cmd->add_option("--seed", sweep.seed, "random-baseline seed");
  sweep_cmd->add_option("--threshold-rank", sweep.threshold_rank, "at-risk threshold rank");
  sweep_cmd->add_option("--out", sweep.out, "output CSV ('-' for stdout)");

  std::vector<std::string> reversed(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(reversed.begin(), reversed.end());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error[USAGE]: " << one_line(e.what()) << "\n";
    return kExitInvalid;
  }

  try {
    if (*generate_cmd) return cmd_generate(gen, out);
    if (*train_cmd) return cmd_train(train, out);
    if (*predict_cmd) return cmd_predict(predict, out);
    if (*evaluate_cmd) return cmd_evaluate(eval, out);
    if (*sweep_cmd) return cmd_early_sweep(sweep, out);
  } catch (const Error& e) {
    err << "error[" << error_code_name(e.code()) << "]: " << one_line(e.what()) << "\n";
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    err << "error[IO]: " << one_line(e.what()) << "\n";
    return kExitNotFound;
  } catch (const std::exception& e) {
    err << "error[INTERNAL]: " << one_line(e.what()) << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace atrisk::cli
