#include "atrisk/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "atrisk/model_io.hpp"
#include "doctest.h"
#include "json.hpp"
#include "test_util.hpp"

namespace atrisk {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "atrisk");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string f; std::getline(in, f, ',');) out.push_back(f);
  return out;
}

std::string drop_fields(const std::string& line, std::size_t n) {
  std::size_t at = 0;
  for (std::size_t i = 0; i < n; ++i) at = line.find(',', at) + 1;
  return line.substr(at);
}

// A small synthetic cohort written by `generate` plus a training config
// pointing at its manifest.
fs::path make_project(const std::string& name, const std::string& emit, int feature_dim = 10) {
  const fs::path dir = testing::scratch_dir(name);
  nlohmann::json config = {
      {"seed", 7},
      {"synth",
       {{"train_clients", 3},
        {"test_clients", 1},
        {"client_sizes", {20, 24, 18, 30}},
        {"feature_dim", feature_dim},
        {"client_shift", 0.5},
        {"lecture_count", 8},
        {"emit", emit}}},
      {"featurizer", {{"vocab", {"OPEN", "NEXT", "PREV", "ADD_MARKER"}}, {"n_buckets", 2}}},
      {"data", {{"manifest", "data/manifest.json"}}},
      {"training", {{"rounds", 3}, {"max_pairs_per_client", 150}, {"mlp", {{"hidden", {8, 4}}}}}}};
  spit(dir / "run.json", config.dump(2));
  const Result g = run_cli({"generate", "--config", (dir / "run.json").string(), "--out",
                            (dir / "data").string()});
  REQUIRE(g.code == 0);
  return dir;
}

TEST_CASE("train and evaluate on generated features") {
  const fs::path dir = make_project("cli_features", "features");
  CHECK(fs::exists(dir / "data" / "C04_features.csv"));
  const Result t = run_cli({"train", "--config", (dir / "run.json").string(), "--mode", "federated",
                            "--differential", "true", "--out", (dir / "out").string()});
  REQUIRE_MESSAGE(t.code == 0, t.err);
  const fs::path model = dir / "out" / "federated-diff-run0.model";
  CHECK(fs::exists(model));
  const auto report = nlohmann::json::parse(slurp(dir / "out" / "federated-diff-run0.report.json"));
  CHECK(report["mode"] == "federated");
  CHECK(report["round_losses"].size() == 3);
  CHECK(report["client_sample_counts"]["C01"] == 150);
  CHECK(report.contains("input_hash"));

  const Result c = run_cli({"train", "--config", (dir / "run.json").string(), "--mode",
                            "centralized", "--out", (dir / "out").string()});
  REQUIRE(c.code == 0);
  const auto central =
      nlohmann::json::parse(slurp(dir / "out" / "centralized-diff-run0.report.json"));
  CHECK(central["mode"] == "centralized");

  const Result e = run_cli({"evaluate", "--model", model.string(), "--features",
                            (dir / "data" / "C04_features.csv").string(), "--grades",
                            (dir / "data" / "C04_grades.csv").string(), "--course", "C04",
                            "--out", (dir / "eval").string()});
  REQUIRE_MESSAGE(e.code == 0, e.err);
  const auto rows = lines(slurp(dir / "eval" / "metrics.csv"));
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == "course,mode,differential,models,top5,top10,top15,top_at_risk,ndcg,pr_auc,"
                   "at_risk,students");
  CHECK(fields(rows[1])[0] == "C04");
  CHECK(fields(rows[1])[3] == "1");
  CHECK(fs::exists(dir / "eval" / "pr_curve_C04.csv"));
  CHECK(fs::exists(dir / "eval" / "metrics.json"));

  const Result m = run_cli({"evaluate", "--model", model.string(), "--manifest",
                            (dir / "data" / "manifest.json").string(), "--out",
                            (dir / "eval_manifest").string()});
  REQUIRE(m.code == 0);
  CHECK(slurp(dir / "eval_manifest" / "metrics.csv") == slurp(dir / "eval" / "metrics.csv"));

  const Result p = run_cli({"predict", "--model", model.string(), "--features",
                            (dir / "data" / "C04_features.csv").string()});
  REQUIRE(p.code == 0);
  const auto ranked = lines(p.out);
  CHECK(ranked.front() == "student_id,score,rank");
  CHECK(ranked.size() == 31);
  CHECK(fields(ranked[1])[2] == "1");
}

TEST_CASE("errors map to exit codes with one-line messages") {
  const fs::path dir = make_project("cli_errors", "features");
  nlohmann::json config = nlohmann::json::parse(slurp(dir / "run.json"));
  config["data"] = {{"clients",
                     {{{"id", "X"}, {"features", "nowhere.csv"}, {"grades", "data/C01_grades.csv"}}}}};
  spit(dir / "missing.json", config.dump());
  const Result missing = run_cli({"train", "--config", (dir / "missing.json").string()});
  CHECK(missing.code == cli::kExitNotFound);
  CHECK(missing.err.rfind("error[NOT_FOUND]: ", 0) == 0);
  CHECK(missing.err.find("nowhere.csv") != std::string::npos);
  CHECK(lines(missing.err).size() == 1);

  spit(dir / "broken.json", "{\"training\": ");
  CHECK(run_cli({"train", "--config", (dir / "broken.json").string()}).code == cli::kExitInvalid);
  const Result usage = run_cli({"frobnicate"});
  CHECK(usage.code == cli::kExitInvalid);
  CHECK(usage.err.rfind("error[USAGE]: ", 0) == 0);
  CHECK(run_cli({"train", "--config", (dir / "run.json").string(), "--mode", "sideways"}).code ==
        cli::kExitInvalid);
  CHECK(run_cli({"evaluate", "--model", (dir / "none.model").string(), "--features", "x",
                 "--grades", "y"})
            .code == cli::kExitNotFound);
}

TEST_CASE("feature dimension mismatch is refused with the stored hash") {
  const fs::path wide = make_project("cli_wide", "features", 10);
  const fs::path narrow = make_project("cli_narrow", "features", 8);
  REQUIRE(run_cli({"train", "--config", (wide / "run.json").string(), "--out",
                   (wide / "out").string()})
              .code == 0);
  const fs::path model = wide / "out" / "federated-diff-run0.model";
  const SavedModel saved = load_model(model);
  const Result r = run_cli({"evaluate", "--model", model.string(), "--features",
                            (narrow / "data" / "C04_features.csv").string(), "--grades",
                            (narrow / "data" / "C04_grades.csv").string(), "--out",
                            (narrow / "eval").string()});
  CHECK(r.code == cli::kExitLayoutMismatch);
  CHECK(r.err.find(saved.feature_hash()) != std::string::npos);
}

TEST_CASE("evaluate averages metrics over repeated runs") {
  const fs::path dir = make_project("cli_runs", "features");
  REQUIRE(run_cli({"train", "--config", (dir / "run.json").string(), "--runs", "10", "--out",
                   (dir / "out").string()})
              .code == 0);
  std::vector<std::string> args{"evaluate"};
  std::vector<std::vector<double>> singles;
  for (int r = 0; r < 10; ++r) {
    const std::string model = (dir / "out" / ("federated-diff-run" + std::to_string(r) + ".model")).string();
    args.insert(args.end(), {"--model", model});
    const fs::path out = dir / ("single" + std::to_string(r));
    REQUIRE(run_cli({"evaluate", "--model", model, "--manifest",
                     (dir / "data" / "manifest.json").string(), "--out", out.string()})
                .code == 0);
    const auto f = fields(lines(slurp(out / "metrics.csv"))[1]);
    std::vector<double> v;
    for (std::size_t i = 4; i < 10; ++i) v.push_back(std::stod(f[i]));
    singles.push_back(v);
  }
  args.insert(args.end(), {"--manifest", (dir / "data" / "manifest.json").string(), "--out",
                           (dir / "mean").string()});
  REQUIRE(run_cli(args).code == 0);
  const auto f = fields(lines(slurp(dir / "mean" / "metrics.csv"))[1]);
  CHECK(f[3] == "10");
  for (std::size_t i = 0; i < 6; ++i) {
    double sum = 0.0;
    for (const auto& s : singles) sum += s[i];
    CHECK(std::stod(f[4 + i]) == doctest::Approx(sum / 10.0).epsilon(1e-12));
  }
  // Distinct seeds per run give distinct models.
  CHECK(slurp(dir / "out" / "federated-diff-run0.model") !=
        slurp(dir / "out" / "federated-diff-run1.model"));
}

TEST_CASE("a perfect oracle model scores ones") {
  const fs::path dir = testing::scratch_dir("cli_oracle");
  // One feature holding the student's own grade score; the network is the
  // identity map x -> relu(x) - relu(-x).
  const auto records = testing::cohort_from_counts({5, 5, 5, 5, 20});
  const auto scored = score_grades(records);
  std::ostringstream features, grades;
  features << "student_id,f_0\n";
  for (const auto& [id, g] : scored) features << id << ',' << format_double(g) << '\n';
  write_grades(grades, records);
  spit(dir / "features.csv", features.str());
  spit(dir / "grades.csv", grades.str());

  SavedModel model;
  model.params = ModelParams<double>(MlpLayout{1, 2, 2, 0.0});
  auto v = model.params.layers();
  v.w1(0, 0) = 1.0;
  v.w1(1, 0) = -1.0;
  v.w2(0, 0) = 1.0;
  v.w2(1, 1) = 1.0;
  v.w3(0, 0) = 1.0;
  v.w3(0, 1) = -1.0;
  for (bool diff : {true, false}) {
    model.differential = diff;
    save_model(dir / "oracle.model", model);
    const Result r = run_cli({"evaluate", "--model", (dir / "oracle.model").string(), "--features",
                              (dir / "features.csv").string(), "--grades",
                              (dir / "grades.csv").string(), "--out", (dir / "eval").string()});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto f = fields(lines(slurp(dir / "eval" / "metrics.csv"))[1]);
    for (std::size_t i = 4; i < 10; ++i) CHECK(std::stod(f[i]) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("early sweep over event logs") {
  const fs::path dir = make_project("cli_sweep", "events");
  REQUIRE(run_cli({"train", "--config", (dir / "run.json").string(), "--out",
                   (dir / "out").string()})
              .code == 0);
  const std::string model = (dir / "out" / "federated-diff-run0.model").string();
  const std::string events = (dir / "data" / "C04_events.csv").string();
  const std::string schedule = (dir / "data" / "C04_schedule.csv").string();
  const std::string grades = (dir / "data" / "C04_grades.csv").string();
  const Result s = run_cli({"early-sweep", "--model", model, "--events", events, "--schedule",
                            schedule, "--grades", grades, "--k-min", "3", "--k-max", "8",
                            "--shuffles", "1000"});
  REQUIRE_MESSAGE(s.code == 0, s.err);
  const auto rows = lines(s.out);
  REQUIRE(rows.size() == 1 + 2 * 6);
  std::size_t model_rows = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) model_rows += fields(rows[i])[1] == "model";
  CHECK(model_rows == 6);

  const Result e = run_cli({"evaluate", "--model", model, "--events", events, "--schedule",
                            schedule, "--grades", grades, "--out", (dir / "eval").string()});
  REQUIRE(e.code == 0);
  const std::string full_eval = lines(slurp(dir / "eval" / "metrics.csv"))[1];
  const std::string full_sweep = rows[rows.size() - 2];
  CHECK(drop_fields(full_sweep, 2) == drop_fields(full_eval, 4));

  // Random baseline near the at-risk fraction.
  const auto random = fields(rows.back());
  const double at_risk = std::stod(random[8]);
  const double students = std::stod(random[9]);
  CHECK(std::abs(std::stod(random[7]) - at_risk / students) <= 0.03);

  CHECK(run_cli({"early-sweep", "--model", model, "--events", events, "--schedule", schedule,
                 "--grades", grades, "--k-min", "0"})
            .code == cli::kExitInvalid);
}

TEST_CASE("identical runs write identical metric files") {
  const fs::path dir = make_project("cli_determinism", "features");
  std::string first;
  for (int attempt = 0; attempt < 2; ++attempt) {
    const fs::path out = dir / ("out" + std::to_string(attempt));
    REQUIRE(run_cli({"train", "--config", (dir / "run.json").string(), "--out", out.string()}).code == 0);
    REQUIRE(run_cli({"evaluate", "--model", (out / "federated-diff-run0.model").string(),
                     "--manifest", (dir / "data" / "manifest.json").string(), "--out",
                     out.string()})
                .code == 0);
    const std::string metrics = slurp(out / "metrics.csv");
    if (attempt == 0) {
      first = metrics;
    } else {
      CHECK(metrics == first);
    }
  }
}

TEST_CASE("output directory from the environment") {
  const fs::path dir = make_project("cli_env", "features");
  const fs::path env_out = dir / "env_out";
  ::setenv(cli::kOutputDirEnv, env_out.c_str(), 1);
  const Result r = run_cli({"train", "--config", (dir / "run.json").string()});
  ::unsetenv(cli::kOutputDirEnv);
  REQUIRE(r.code == 0);
  CHECK(fs::exists(env_out / "federated-diff-run0.model"));
}

}  // namespace
}  // namespace atrisk
