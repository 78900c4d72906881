/**
 * @file cli.cpp
 * @brief Subcommands: preprocess, features, train, predict, evaluate,
 *        simulate, experiment
 */

#include "cli.hpp"

#include "dhogm/classifier.hpp"
#include "dhogm/config.hpp"
#include "dhogm/error.hpp"
#include "dhogm/eval.hpp"
#include "dhogm/feature_io.hpp"
#include "dhogm/log.hpp"
#include "dhogm/manifest.hpp"
#include "dhogm/model_io.hpp"
#include "dhogm/nifti.hpp"
#include "dhogm/parallel.hpp"
#include "dhogm/pipeline.hpp"
#include "dhogm/synth.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

namespace dhogm::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Raised for problems the user can fix by changing the invocation.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string config_path;
  std::string out_dir;
  unsigned jobs = 0;
  std::optional<std::uint64_t> seed;
  std::string path_mode;
};

PipelineConfig resolve_config(const Common &c) {
  PipelineConfig cfg = c.config_path.empty() ? PipelineConfig{}
                                             : load_pipeline_config(c.config_path);
  if (c.seed) {
    cfg.mlp.seed = *c.seed;
  }
  if (!c.path_mode.empty()) {
    cfg.path_mode = path_mode_from_string(c.path_mode);
  }
  return cfg;
}

fs::path out_dir(const Common &c) {
  fs::path p = c.out_dir.empty() ? fs::path(".") : fs::path(c.out_dir);
  fs::create_directories(p);
  return p;
}

void write_text(const fs::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::UnreadableFile, "cannot write " + path.string());
  }
  out << text;
}

void write_json(const fs::path &path, const json &j) { write_text(path, j.dump(2) + "\n"); }

json read_json(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::UnreadableFile, "cannot read " + path.string());
  }
  try {
    return json::parse(in);
  } catch (const json::exception &e) {
    throw Error(ErrorCode::InvalidArgument, path.string() + ": " + e.what());
  }
}

std::vector<SubjectRecord> load_manifest_nonempty(const std::string &path) {
  auto records = read_manifest(path);
  if (records.empty()) {
    throw UsageError("manifest " + path + " lists no subjects");
  }
  std::sort(records.begin(), records.end(),
            [](const auto &a, const auto &b) { return a.subject_id < b.subject_id; });
  return records;
}

struct Failure {
  std::string subject_id;
  std::string code;
  std::string message;
};

json failures_json(const std::vector<Failure> &failures) {
  json arr = json::array();
  for (const auto &f : failures) {
    arr.push_back(json{{"subject_id", f.subject_id}, {"error", f.code}, {"message", f.message}});
  }
  return arr;
}

Failure make_failure(const std::string &id, const std::exception &e) {
  const auto *err = dynamic_cast<const Error *>(&e);
  return {id, err ? std::string(to_string(err->code())) : "Exception", e.what()};
}

/// Runs fn for every record with subject-level parallelism. Slot i of the
/// result holds either a value or a failure, so output order is fixed.
template <typename T, typename Fn>
std::vector<std::optional<T>> for_each_subject(const std::vector<SubjectRecord> &records,
                                               unsigned jobs, std::vector<Failure> &failures,
                                               Fn &&fn) {
  std::vector<std::optional<T>> results(records.size());
  std::vector<std::optional<Failure>> errs(records.size());
  const unsigned workers = resolve_threads(jobs);
  const unsigned inner = records.size() < workers
                             ? std::max(1u, workers / static_cast<unsigned>(records.size()))
                             : 1u;
  parallel_for(records.size(), workers, [&](std::size_t i) {
    try {
      results[i] = fn(records[i], inner);
    } catch (const std::exception &e) {
      errs[i] = make_failure(records[i].subject_id, e);
    }
  });
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (errs[i]) {
      log::warn(errs[i]->subject_id + ": " + errs[i]->message);
      failures.push_back(*errs[i]);
    }
  }
  return results;
}

int batch_exit(std::size_t ok, std::size_t failed) {
  if (ok == 0 && failed > 0) {
    log::error("every subject failed");
    return kExitFailure;
  }
  if (failed > 0) {
    log::warn(std::to_string(failed) + " subject(s) failed; see the report");
  }
  return kExitSuccess;
}

json stamp(const PipelineConfig &cfg) {
  json j = provenance();
  j["config"] = to_json(cfg);
  return j;
}

// ---------------------------------------------------------------------------

int cmd_preprocess(const Common &c, const std::string &manifest_path) {
  const PipelineConfig cfg = resolve_config(c);
  const auto records = load_manifest_nonempty(manifest_path);
  const fs::path out = out_dir(c);
  std::vector<Failure> failures;
  struct Done {
    SubjectRecord record;
    bool fallback;
  };
  const auto done = for_each_subject<Done>(
      records, c.jobs, failures, [&](const SubjectRecord &r, unsigned) {
        const PreparedVolume p = prepare_subject(r, cfg);
        SubjectRecord o{r.subject_id, r.subject_id + ".nii.gz",
                        fs::path(r.subject_id + "_mask.nii.gz"), r.label};
        nifti::save_volume(out / o.volume_path, p.volume);
        nifti::save_mask(out / *o.mask_path, p.mask, p.volume.voxel_size());
        return Done{o, p.mask_fallback};
      });

  std::vector<SubjectRecord> written;
  json subjects = json::array();
  for (const auto &d : done) {
    if (d) {
      written.push_back(d->record);
      subjects.push_back(json{{"subject_id", d->record.subject_id},
                              {"mask_source", d->fallback ? "fallback" : "provided"}});
    }
  }
  write_manifest(out / "manifest.csv", written);
  json report = stamp(cfg);
  report["subjects"] = subjects;
  report["failures"] = failures_json(failures);
  write_json(out / "preprocess_report.json", report);
  log::info("preprocessed " + std::to_string(written.size()) + " of " +
            std::to_string(records.size()) + " subjects");
  return batch_exit(written.size(), failures.size());
}

int cmd_features(const Common &c, const std::string &manifest_path, bool preprocess) {
  const PipelineConfig cfg = resolve_config(c);
  const auto records = load_manifest_nonempty(manifest_path);
  const fs::path out = out_dir(c);
  std::vector<Failure> failures;
  const auto rows = for_each_subject<SubjectFeatures>(
      records, c.jobs, failures, [&](const SubjectRecord &r, unsigned threads) {
        const Volume v =
            preprocess ? prepare_subject(r, cfg).volume : nifti::load_volume(r.volume_path);
        return extract_features(r.subject_id, v, cfg.features, threads);
      });

  FeatureTable table{cfg, {}};
  for (const auto &r : rows) {
    if (r) {
      table.rows.push_back(*r);
    }
  }
  write_features(out / "features.csv", table);
  json report = stamp(cfg);
  report["n_subjects"] = records.size();
  report["n_written"] = table.rows.size();
  report["failures"] = failures_json(failures);
  write_json(out / "features_report.json", report);
  log::info("wrote features for " + std::to_string(table.rows.size()) + " of " +
            std::to_string(records.size()) + " subjects");
  return batch_exit(table.rows.size(), failures.size());
}

LabeledCohort labeled_cohort(const FeatureTable &table, const std::vector<SubjectRecord> &records) {
  for (const auto &r : records) {
    if (!r.label) {
      throw UsageError("manifest has no label for subject '" + r.subject_id + "'");
    }
  }
  std::map<std::string, bool> listed;
  for (const auto &r : records) {
    listed[r.subject_id] = true;
  }
  std::vector<SubjectFeatures> rows;
  for (const auto &row : table.rows) {
    if (listed.contains(row.subject_id)) {
      rows.push_back(row);
    }
  }
  return label_features(std::move(rows), records);
}

int cmd_train(const Common &c, const std::string &features_path,
              const std::string &manifest_path) {
  const FeatureTable table = read_features(features_path);
  PipelineConfig cfg = c.config_path.empty() ? table.config : resolve_config(c);
  if (c.seed) {
    cfg.mlp.seed = *c.seed;
  }
  if (cfg.features != table.config.features) {
    throw Error(ErrorCode::FeatureConfigMismatch,
                "config feature settings differ from those embedded in " + features_path);
  }
  const auto cohort = labeled_cohort(table, load_manifest_nonempty(manifest_path));
  const TrainedModel model = train_model(cohort.features, cohort.labels, cfg);
  const fs::path out = out_dir(c);
  save_model(out / "model.json", model);

  std::vector<double> d;
  std::vector<QualityLabel> y;
  for (std::size_t i = 0; i < cohort.size(); ++i) {
    if (std::isfinite(cohort.features[i].cuboids.d_final)) {
      d.push_back(cohort.features[i].cuboids.d_final);
      y.push_back(cohort.labels[i]);
    }
  }
  write_text(out / "d_final_histogram.svg", dfinal_histogram_svg(d, y, model.threshold.t_star));

  std::cout << "youden_j " << format_double(model.threshold.youden_j) << "\nt_star "
            << format_double(model.threshold.t_star) << "\nfinal_loss "
            << format_double(model.mlp.final_loss) << '\n';
  return kExitSuccess;
}

int cmd_predict(const Common &c, const std::string &model_path, const std::string &features_path,
                const std::string &manifest_path, bool preprocess) {
  if (features_path.empty() == manifest_path.empty()) {
    throw UsageError("predict needs exactly one of --features or --manifest");
  }
  const TrainedModel model = load_model(model_path);
  PipelineConfig cfg = model.config;
  cfg.path_mode = c.path_mode.empty() ? model.config.path_mode
                                      : path_mode_from_string(c.path_mode);

  std::vector<Failure> failures;
  std::vector<SubjectFeatures> rows;
  std::size_t n_subjects = 0;
  if (!features_path.empty()) {
    FeatureTable table = read_features(features_path);
    require_compatible(model, table.config.features);
    rows = std::move(table.rows);
    n_subjects = rows.size();
  } else {
    const auto records = load_manifest_nonempty(manifest_path);
    n_subjects = records.size();
    const auto extracted = for_each_subject<SubjectFeatures>(
        records, c.jobs, failures, [&](const SubjectRecord &r, unsigned threads) {
          const Volume v =
              preprocess ? prepare_subject(r, cfg).volume : nifti::load_volume(r.volume_path);
          return extract_features(r.subject_id, v, cfg.features, threads);
        });
    for (const auto &e : extracted) {
      if (e) {
        rows.push_back(*e);
      }
    }
  }
  std::sort(rows.begin(), rows.end(),
            [](const auto &a, const auto &b) { return a.subject_id < b.subject_id; });

  std::vector<QualityDecision> decisions;
  for (const auto &f : rows) {
    try {
      decisions.push_back(decide(model, f, cfg.path_mode));
    } catch (const Error &e) {
      failures.push_back(make_failure(f.subject_id, e));
      log::warn(f.subject_id + ": " + e.what());
    }
  }
  std::sort(failures.begin(), failures.end(),
            [](const auto &a, const auto &b) { return a.subject_id < b.subject_id; });

  const fs::path out = out_dir(c);
  write_decisions(out / "decisions.jsonl", decisions);
  json meta = stamp(cfg);
  meta["model"] = fs::path(model_path).filename().string();
  meta["n_subjects"] = n_subjects;
  meta["n_decisions"] = decisions.size();
  meta["failures"] = failures_json(failures);
  write_json(out / "decisions.meta.json", meta);
  log::info("decided " + std::to_string(decisions.size()) + " of " +
            std::to_string(n_subjects) + " subjects");
  return batch_exit(decisions.size(), failures.size());
}

int cmd_evaluate(const Common &c, const std::string &decisions_path,
                 const std::string &manifest_path) {
  const auto records = load_manifest_nonempty(manifest_path);
  std::map<std::string, QualityLabel> truth;
  for (const auto &r : records) {
    if (!r.label) {
      throw UsageError("manifest has no label for subject '" + r.subject_id + "'");
    }
    truth[r.subject_id] = *r.label;
  }
  auto decisions = read_decisions(decisions_path);
  PathMode mode = c.path_mode.empty() ? PathMode::Fused : path_mode_from_string(c.path_mode);
  if (c.path_mode.empty() && !decisions.empty()) {
    const auto &d = decisions.front();
    if (!d.c_2d) {
      mode = PathMode::ThreeD;
    } else if (!d.c_3d) {
      mode = PathMode::TwoD;
    }
  }
  const ModeResult result = score_decisions(mode, std::move(decisions), truth);
  // the config that produced the decisions, when its sidecar is alongside
  json report = stamp(resolve_config(c));
  fs::path meta_path(decisions_path);
  meta_path.replace_extension(".meta.json");
  if (c.config_path.empty() && fs::exists(meta_path)) {
    const json meta = read_json(meta_path);
    if (meta.contains("config")) {
      report["config"] = meta["config"];
    }
  }
  report["result"] = to_json(result);
  write_json(out_dir(c) / "report.json", report);
  std::cout << "accuracy " << format_double(result.metrics.accuracy)
            << "\nbalanced_accuracy " << format_double(result.metrics.balanced_accuracy.value)
            << '\n';
  return kExitSuccess;
}

struct SimulateOptions {
  std::size_t n_clean = 2;
  std::size_t n_corrupt = 2;
  std::string kind = "motion";
  double severity = 8.0;
  double poor_above = 0.0;
  std::vector<std::size_t> shape{kCanonicalShape.nx, kCanonicalShape.ny, kCanonicalShape.nz};
};

synth::CorruptionKind corruption_from_string(const std::string &s) {
  if (s == "motion") {
    return synth::CorruptionKind::GhostMotion;
  }
  if (s == "noise") {
    return synth::CorruptionKind::GaussianNoise;
  }
  if (s == "blur") {
    return synth::CorruptionKind::GaussianBlur;
  }
  throw UsageError("corruption kind must be motion, noise or blur");
}

int cmd_simulate(const Common &c, const SimulateOptions &o) {
  if (o.shape.size() != 3) {
    throw UsageError("--shape takes three sizes");
  }
  if (o.n_clean + o.n_corrupt == 0) {
    throw UsageError("nothing to simulate");
  }
  const auto kind = corruption_from_string(o.kind);
  const std::uint64_t base = c.seed.value_or(0);
  const fs::path out = out_dir(c);
  const std::size_t n = o.n_clean + o.n_corrupt;

  std::vector<SubjectRecord> records(n);
  std::vector<json> entries(n);
  parallel_for(n, c.jobs, [&](std::size_t i) {
    const bool corrupted = i >= o.n_clean;
    synth::PhantomSpec spec;
    spec.shape = {o.shape[0], o.shape[1], o.shape[2]};
    spec.seed = base + i;
    const auto phantom = synth::make_phantom(spec);
    const synth::CorruptionSpec cs{kind, corrupted ? o.severity : 0.0, base + 1000003 + i};
    const Volume v = synth::corrupt(phantom.volume, cs);
    const BrainMask m = synth::corrupt_mask(phantom.mask, cs);

    char id[32];
    std::snprintf(id, sizeof id, "sim_%03zu", i);
    SubjectRecord r{id, std::string(id) + ".nii.gz", fs::path(std::string(id) + "_mask.nii.gz"),
                    corrupted && cs.severity > o.poor_above ? QualityLabel::Poor
                                                            : QualityLabel::Good};
    nifti::save_volume(out / r.volume_path, v);
    nifti::save_mask(out / *r.mask_path, m);
    json e{{"subject_id", r.subject_id},
           {"phantom_seed", spec.seed},
           {"corruption", corrupted ? o.kind : "none"},
           {"severity", cs.severity},
           {"label", to_int(*r.label)}};
    if (corrupted && kind == synth::CorruptionKind::GaussianNoise) {
      const double psnr_clipped = synth::psnr(phantom.volume, v);
      const double psnr_raw =
          synth::psnr(phantom.volume, synth::corrupt_noise(phantom.volume, cs.severity, cs.seed,
                                                           false));
      e["psnr_db"] = std::isfinite(psnr_raw) ? json(psnr_raw) : json("inf");
      e["psnr_clipped_db"] = std::isfinite(psnr_clipped) ? json(psnr_clipped) : json("inf");
    }
    records[i] = r;
    entries[i] = e;
  });
  write_manifest(out / "manifest.csv", records);
  json report = stamp(resolve_config(c));
  report["simulation"] = {{"n_clean", o.n_clean},
                          {"n_corrupt", o.n_corrupt},
                          {"kind", o.kind},
                          {"severity", o.severity},
                          {"poor_above", o.poor_above},
                          {"shape", o.shape},
                          {"seed", base}};
  report["subjects"] = entries;
  write_json(out / "simulate_report.json", report);
  log::info("simulated " + std::to_string(n) + " phantoms");
  return kExitSuccess;
}

struct ExperimentOptions {
  std::string features;
  std::string manifest;
  std::string test_manifest;
  std::optional<double> train_fraction;
  std::size_t folds = 0;
  std::uint64_t split_seed = 0;
};

int cmd_experiment(const Common &c, const ExperimentOptions &o) {
  const FeatureTable table = read_features(o.features);
  PipelineConfig cfg = c.config_path.empty() ? table.config : resolve_config(c);
  if (c.seed) {
    cfg.mlp.seed = *c.seed;
  }
  if (cfg.features != table.config.features) {
    throw Error(ErrorCode::FeatureConfigMismatch,
                "config feature settings differ from those embedded in " + o.features);
  }
  const auto cohort = labeled_cohort(table, load_manifest_nonempty(o.manifest));
  if (!o.test_manifest.empty() && (o.folds > 0 || o.train_fraction)) {
    throw UsageError("--test-manifest cannot be combined with --folds or --train-fraction");
  }
  const auto split = [&] {
    const auto mask = stratified_split(cohort.labels, o.train_fraction.value_or(0.5), o.split_seed);
    std::pair<std::vector<std::size_t>, std::vector<std::size_t>> idx;
    for (std::size_t i = 0; i < cohort.size(); ++i) {
      (mask[i] ? idx.first : idx.second).push_back(i);
    }
    return idx;
  };
  json report;
  if (o.folds > 0 && o.train_fraction) {
    // k-fold inside the training part, then the held-out part once
    const auto [tr, te] = split();
    const auto train = cohort.subset(tr);
    report = to_json(cross_validate(train, o.folds, o.split_seed, cfg));
    report["held_out"] = to_json(run_experiment(train, cohort.subset(te), cfg));
    report["protocol"] = "cross_validation_within_train";
    report["train_fraction"] = *o.train_fraction;
  } else if (o.folds > 0) {
    report = to_json(cross_validate(cohort, o.folds, o.split_seed, cfg));
    report["protocol"] = "cross_validation";
  } else if (!o.test_manifest.empty()) {
    const auto test = labeled_cohort(table, load_manifest_nonempty(o.test_manifest));
    report = to_json(run_experiment(cohort, test, cfg));
    report["protocol"] = "unseen_site";
  } else {
    const auto [tr, te] = split();
    report = to_json(run_experiment(cohort.subset(tr), cohort.subset(te), cfg));
    report["protocol"] = "seen_site";
    report["train_fraction"] = o.train_fraction.value_or(0.5);
  }
  report["split_seed"] = o.split_seed;
  write_json(out_dir(c) / "experiment_report.json", report);
  for (const auto &row : report["ablation"]) {
    std::cout << std::left << std::setw(6) << row["mode"].get<std::string>() << " accuracy "
              << format_double(row["accuracy"].get<double>()) << " recall "
              << format_double(row["recall"].get<double>()) << '\n';
  }
  return kExitSuccess;
}

void add_common(CLI::App *sub, Common &c, bool with_path, bool with_seed) {
  sub->add_option("--config", c.config_path, "Pipeline config JSON")->check(CLI::ExistingFile);
  sub->add_option("--out", c.out_dir, "Output directory");
  sub->add_option("--jobs", c.jobs, "Worker threads (0 = all cores)");
  if (with_path) {
    sub->add_option("--path", c.path_mode, "Decision path")
        ->check(CLI::IsMember({"2d", "3d", "fused"}));
  }
  if (with_seed) {
    sub->add_option("--seed", c.seed, "Seed override");
  }
}

} // namespace

int run_cli(const std::vector<std::string> &args) {
  CLI::App app{"Structural MRI quality control from gradient-magnitude histograms",
               std::string(kToolName)};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  Common c;
  std::string manifest;
  std::string features;
  std::string model;
  std::string decisions;
  bool preprocess = false;
  SimulateOptions sim;
  ExperimentOptions exp;

  auto *pre = app.add_subcommand("preprocess", "Mask, normalize and standardize volumes");
  pre->add_option("--manifest", manifest, "Cohort manifest CSV")->required();
  add_common(pre, c, false, false);

  auto *feat = app.add_subcommand("features", "Extract 2D and 3D features to CSV");
  feat->add_option("--manifest", manifest, "Manifest of standardized volumes")->required();
  feat->add_flag("--preprocess", preprocess, "Preprocess raw volumes first");
  add_common(feat, c, false, false);

  auto *train = app.add_subcommand("train", "Fit the MLP and the D_final threshold");
  train->add_option("--features", features, "Feature CSV")->required()->check(CLI::ExistingFile);
  train->add_option("--manifest", manifest, "Labeled manifest")->required();
  add_common(train, c, false, true);

  auto *pred = app.add_subcommand("predict", "Write per-subject decisions as JSON lines");
  pred->add_option("--model", model, "Model JSON")->required()->check(CLI::ExistingFile);
  pred->add_option("--features", features, "Feature CSV");
  pred->add_option("--manifest", manifest, "Manifest of volumes");
  pred->add_flag("--preprocess", preprocess, "Preprocess raw volumes first");
  add_common(pred, c, true, false);

  auto *eval = app.add_subcommand("evaluate", "Score decisions against manifest labels");
  eval->add_option("--decisions", decisions, "Decisions JSONL")->required()->check(CLI::ExistingFile);
  eval->add_option("--manifest", manifest, "Labeled manifest")->required();
  add_common(eval, c, true, false);

  auto *simc = app.add_subcommand("simulate", "Write synthetic phantoms and a manifest");
  simc->add_option("--clean", sim.n_clean, "Number of clean phantoms");
  simc->add_option("--corrupt", sim.n_corrupt, "Number of corrupted phantoms");
  simc->add_option("--kind", sim.kind, "motion, noise or blur");
  simc->add_option("--severity", sim.severity, "Corruption severity");
  simc->add_option("--poor-above", sim.poor_above, "Label corrupted phantoms Poor above this severity");
  simc->add_option("--shape", sim.shape, "Volume shape x y z")->expected(3);
  add_common(simc, c, false, true);

  auto *expc = app.add_subcommand("experiment", "Train/test or cross-validation report");
  expc->add_option("--features", exp.features, "Feature CSV")->required()->check(CLI::ExistingFile);
  expc->add_option("--manifest", exp.manifest, "Labeled manifest (training cohort)")->required();
  expc->add_option("--test-manifest", exp.test_manifest, "Held-out manifest (unseen site)");
  expc->add_option("--train-fraction", exp.train_fraction, "Stratified split fraction (default 0.5); with --folds, cross-validate inside the training part");
  expc->add_option("--folds", exp.folds, "Stratified k-fold cross-validation");
  expc->add_option("--split-seed", exp.split_seed, "Seed for splits and folds");
  add_common(expc, c, false, true);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? kExitSuccess : kExitUsage;
  }
  log::set_level(verbose ? log::Level::Debug : log::Level::Info);

  try {
    if (pre->parsed()) {
      return cmd_preprocess(c, manifest);
    }
    if (feat->parsed()) {
      return cmd_features(c, manifest, preprocess);
    }
    if (train->parsed()) {
      return cmd_train(c, features, manifest);
    }
    if (pred->parsed()) {
      return cmd_predict(c, model, features, manifest, preprocess);
    }
    if (eval->parsed()) {
      return cmd_evaluate(c, decisions, manifest);
    }
    if (simc->parsed()) {
      return cmd_simulate(c, sim);
    }
    if (expc->parsed()) {
      return cmd_experiment(c, exp);
    }
  } catch (const UsageError &e) {
    log::error(e.what());
    return kExitUsage;
  } catch (const Error &e) {
    log::error(e.what());
    return e.code() == ErrorCode::InvalidArgument ? kExitUsage : kExitFailure;
  } catch (const std::exception &e) {
    log::error(e.what());
    return kExitFailure;
  }
  return kExitUsage;
}

int run_cli(int argc, const char *const *argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) {
    args.emplace_back(argv[i]);
  }
  return run_cli(args);
}

} // namespace dhogm::cli
