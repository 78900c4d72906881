#include "support.hpp"

#include "cli.hpp"
#include "dhogm/manifest.hpp"

#include <doctest.h>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace dhogm;
namespace fs = std::filesystem;

namespace {

/// Runs the CLI with stdout captured.
int run(std::vector<std::string> args, std::string *out = nullptr) {
  std::ostringstream sink;
  auto *old = std::cout.rdbuf(sink.rdbuf());
  int code = 0;
  try {
    code = cli::run_cli(args);
  } catch (...) {
    std::cout.rdbuf(old);
    throw;
  }
  std::cout.rdbuf(old);
  if (out != nullptr) {
    *out = sink.str();
  }
  return code;
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path &p, const std::string &text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

nlohmann::json small_config(std::size_t n_bins = 100) {
  return {{"feature_config",
           {{"n_bins", n_bins},
            {"slice_window", 20},
            {"cuboid", {24, 32, 32}},
            {"target_shape", {48, 64, 64}}}},
          {"mlp", {{"epochs", 300}}}};
}

/// Simulated cohort of 3 clean and 3 moved phantoms with a small config.
struct Cohort {
  test::TempDir dir;
  fs::path config;
  fs::path sim;

  Cohort() {
    config = dir / "config.json";
    spit(config, small_config().dump());
    sim = dir / "sim";
    REQUIRE(run({"simulate", "--clean", "3", "--corrupt", "3", "--kind", "motion",
                 "--severity", "6", "--shape", "48", "64", "64", "--seed", "5", "--out",
                 sim.string()}) == cli::kExitSuccess);
  }
};

} // namespace

TEST_CASE("usage errors") {
  test::TempDir dir;
  CHECK(run({}) == cli::kExitUsage);
  CHECK(run({"nonsense"}) == cli::kExitUsage);
  CHECK(run({"train", "--manifest", "m.csv"}) == cli::kExitUsage);
  std::string out;
  CHECK(run({"--version"}, &out) == cli::kExitSuccess);
  CHECK(out.find("0.1.0") != std::string::npos);

  spit(dir / "empty.csv", "subject_id,volume_path,mask_path,label\n");
  CHECK(run({"preprocess", "--manifest", (dir / "empty.csv").string(), "--out",
             (dir / "o").string()}) == cli::kExitUsage);

  spit(dir / "bad.json", R"({"feature_config": {"n_bins": 3}})");
  spit(dir / "m.csv", "subject_id,volume_path,mask_path,label\na,a.nii,,1\n");
  CHECK(run({"features", "--manifest", (dir / "m.csv").string(), "--config",
             (dir / "bad.json").string(), "--out", (dir / "o").string()}) == cli::kExitUsage);
}

TEST_CASE("batch robustness") {
  Cohort c;
  auto records = read_manifest(c.sim / "manifest.csv");
  REQUIRE(records.size() == 6);
  records.resize(3);
  spit(c.dir / "broken.nii.gz", "this is not a NIfTI file");
  records[1].volume_path = c.dir / "broken.nii.gz";
  records[1].mask_path.reset();
  write_manifest(c.dir / "three.csv", records);

  const fs::path out = c.dir / "pre";
  CHECK(run({"preprocess", "--manifest", (c.dir / "three.csv").string(), "--config",
             c.config.string(), "--out", out.string()}) == cli::kExitSuccess);
  const auto report = nlohmann::json::parse(slurp(out / "preprocess_report.json"));
  CHECK(report["subjects"].size() == 2);
  REQUIRE(report["failures"].size() == 1);
  CHECK(report["failures"][0]["subject_id"] == records[1].subject_id);
  CHECK(read_manifest(out / "manifest.csv").size() == 2);
  CHECK(fs::exists(out / (records[0].subject_id + ".nii.gz")));

  for (auto &r : records) {
    r.volume_path = c.dir / "broken.nii.gz";
  }
  write_manifest(c.dir / "all_bad.csv", records);
  CHECK(run({"preprocess", "--manifest", (c.dir / "all_bad.csv").string(), "--config",
             c.config.string(), "--out", (c.dir / "pre2").string()}) == cli::kExitFailure);
}

TEST_CASE("features, train, predict and evaluate") {
  Cohort c;
  const auto manifest = (c.sim / "manifest.csv").string();

  const auto pipeline = [&](const fs::path &out) {
    REQUIRE(run({"features", "--manifest", manifest, "--config", c.config.string(), "--out",
                 out.string()}) == cli::kExitSuccess);
    REQUIRE(run({"train", "--features", (out / "features.csv").string(), "--manifest", manifest,
                 "--out", out.string()}) == cli::kExitSuccess);
    REQUIRE(run({"predict", "--model", (out / "model.json").string(), "--features",
                 (out / "features.csv").string(), "--out", out.string()}) == cli::kExitSuccess);
  };
  const fs::path a = c.dir / "a";
  const fs::path b = c.dir / "b";
  pipeline(a);
  pipeline(b);

  SUBCASE("feature CSV layout") {
    std::istringstream csv(slurp(a / "features.csv"));
    std::string meta, header, row;
    std::getline(csv, meta);
    std::getline(csv, header);
    CHECK(meta.rfind("# mriqc-dhogm", 0) == 0);
    CHECK(std::count(header.begin(), header.end(), ',') + 1 == 1 + 1 + 27 + 3 * 20 + 2);
    std::size_t rows = 0;
    while (std::getline(csv, row)) {
      ++rows;
    }
    CHECK(rows == 6);
  }
  SUBCASE("reruns are byte-identical") {
    for (const char *name : {"features.csv", "model.json", "decisions.jsonl", "decisions.meta.json"}) {
      CHECK_MESSAGE(slurp(a / name) == slurp(b / name), name);
    }
  }
  SUBCASE("thread count does not change the output") {
    const fs::path t = c.dir / "t";
    REQUIRE(run({"features", "--manifest", manifest, "--config", c.config.string(), "--jobs",
                 "3", "--out", t.string()}) == cli::kExitSuccess);
    CHECK(slurp(t / "features.csv") == slurp(a / "features.csv"));
  }
  SUBCASE("evaluate is order independent and rejects unknown subjects") {
    REQUIRE(run({"evaluate", "--decisions", (a / "decisions.jsonl").string(), "--manifest",
                 manifest, "--out", (c.dir / "e1").string()}) == cli::kExitSuccess);
    std::vector<std::string> lines;
    std::istringstream in(slurp(a / "decisions.jsonl"));
    for (std::string l; std::getline(in, l);) {
      lines.push_back(l);
    }
    REQUIRE(lines.size() == 6);
    std::reverse(lines.begin(), lines.end());
    std::string shuffled;
    for (const auto &l : lines) {
      shuffled += l + "\n";
    }
    spit(c.dir / "shuffled.jsonl", shuffled);
    REQUIRE(run({"evaluate", "--decisions", (c.dir / "shuffled.jsonl").string(), "--manifest",
                 manifest, "--out", (c.dir / "e2").string()}) == cli::kExitSuccess);
    const auto report = nlohmann::json::parse(slurp(c.dir / "e1" / "report.json"));
    const auto reordered = nlohmann::json::parse(slurp(c.dir / "e2" / "report.json"));
    CHECK(report["result"] == reordered["result"]);
    // the sidecar next to the original decisions supplies the small config
    CHECK(report["config"]["feature_config"]["slice_window"] == 20);
    CHECK(report["result"]["confusion_matrix"]["tp"].get<int>() +
              report["result"]["confusion_matrix"]["fn"].get<int>() ==
          3);

    auto j = nlohmann::json::parse(lines[0]);
    j["subject_id"] = "ghost";
    spit(c.dir / "unknown.jsonl", shuffled + j.dump() + "\n");
    CHECK(run({"evaluate", "--decisions", (c.dir / "unknown.jsonl").string(), "--manifest",
               manifest, "--out", (c.dir / "e3").string()}) == cli::kExitFailure);
  }
  SUBCASE("training needs labels") {
    auto records = read_manifest(c.sim / "manifest.csv");
    records[2].label.reset();
    write_manifest(c.dir / "unlabeled.csv", records);
    CHECK(run({"train", "--features", (a / "features.csv").string(), "--manifest",
               (c.dir / "unlabeled.csv").string(), "--out", (c.dir / "u").string()}) ==
          cli::kExitUsage);
  }
  SUBCASE("model and features must share a feature config") {
    spit(c.dir / "bins64.json", small_config(64).dump());
    const fs::path f64 = c.dir / "f64";
    REQUIRE(run({"features", "--manifest", manifest, "--config", (c.dir / "bins64.json").string(),
                 "--out", f64.string()}) == cli::kExitSuccess);
    CHECK(run({"predict", "--model", (a / "model.json").string(), "--features",
               (f64 / "features.csv").string(), "--out", (c.dir / "p").string()}) ==
          cli::kExitFailure);
    CHECK_FALSE(fs::exists(c.dir / "p" / "decisions.jsonl"));
  }
  SUBCASE("predict from volumes matches predict from features") {
    const fs::path v = c.dir / "v";
    REQUIRE(run({"predict", "--model", (a / "model.json").string(), "--manifest", manifest,
                 "--config", c.config.string(), "--out", v.string()}) == cli::kExitSuccess);
    CHECK(slurp(v / "decisions.jsonl") == slurp(a / "decisions.jsonl"));
  }
  SUBCASE("experiment protocols") {
    const auto feats = (a / "features.csv").string();
    const auto protocol_of = [&](const std::string &dir) {
      return nlohmann::json::parse(slurp(c.dir / dir / "experiment_report.json"))["protocol"];
    };
    REQUIRE(run({"experiment", "--features", feats, "--manifest", manifest, "--out",
                 (c.dir / "x1").string()}) == cli::kExitSuccess);
    CHECK(protocol_of("x1") == "seen_site");
    REQUIRE(run({"experiment", "--features", feats, "--manifest", manifest, "--folds", "3",
                 "--out", (c.dir / "x2").string()}) == cli::kExitSuccess);
    CHECK(protocol_of("x2") == "cross_validation");
    REQUIRE(run({"experiment", "--features", feats, "--manifest", manifest, "--test-manifest",
                 manifest, "--out", (c.dir / "x3").string()}) == cli::kExitSuccess);
    CHECK(protocol_of("x3") == "unseen_site");
    CHECK(run({"experiment", "--features", feats, "--manifest", manifest, "--folds", "3",
               "--test-manifest", manifest, "--out", (c.dir / "x4").string()}) ==
          cli::kExitUsage);
    CHECK(run({"experiment", "--features", feats, "--manifest", manifest, "--folds", "4",
               "--out", (c.dir / "x5").string()}) == cli::kExitFailure);
  }
  SUBCASE("single path modes") {
    const fs::path p = c.dir / "p2d";
    REQUIRE(run({"predict", "--model", (a / "model.json").string(), "--features",
                 (a / "features.csv").string(), "--path", "2d", "--out", p.string()}) ==
            cli::kExitSuccess);
    const auto first = nlohmann::json::parse(slurp(p / "decisions.jsonl").substr(
        0, slurp(p / "decisions.jsonl").find('\n')));
    CHECK(first["c_3d"].is_null());
    CHECK_FALSE(first["c_2d"].is_null());
    CHECK(run({"predict", "--model", (a / "model.json").string(), "--features",
               (a / "features.csv").string(), "--path", "4d", "--out", p.string()}) ==
          cli::kExitUsage);
  }
}
