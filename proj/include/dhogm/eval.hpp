/**
 * @file eval.hpp
 * @brief Metrics, stratified folds and train/test experiments
 *
 * PoorQuality is the positive class throughout.
 */
#pragma once

#include "dhogm/classifier.hpp"
#include "dhogm/manifest.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace dhogm {

struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  void add(QualityLabel truth, QualityLabel predicted);
  ConfusionMatrix &operator+=(const ConfusionMatrix &o);
  bool operator==(const ConfusionMatrix &) const = default;
};

/// Ratios with a zero denominator are reported as 0 with `undefined` set.
struct Metric {
  double value = 0.0;
  bool undefined = false;
};

struct Metrics {
  double accuracy = 0.0;
  Metric precision;
  Metric recall;
  Metric specificity;
  Metric f1;
  /// Mean of recall and specificity.
  Metric balanced_accuracy;
};

/// Throws EmptyMatrix when total() == 0.
Metrics compute_metrics(const ConfusionMatrix &cm);

struct FoldPlan {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  /// Fold index per subject, aligned with the input order.
  std::vector<std::size_t> assignments;
};

/// Each class is shuffled with the seed and dealt round-robin, the dealer
/// continuing across classes, so per-class and total fold sizes differ by at
/// most one. Throws TooFewPerClass when a class has fewer than k members.
FoldPlan stratified_folds(std::span<const QualityLabel> labels, std::size_t k,
                          std::uint64_t seed);

/// True for training subjects. Each class contributes round(n_c * fraction)
/// training subjects, chosen by a seeded shuffle.
std::vector<bool> stratified_split(std::span<const QualityLabel> labels, double train_fraction,
                                   std::uint64_t seed);

struct LabeledCohort {
  std::vector<SubjectFeatures> features;
  std::vector<QualityLabel> labels;

  std::size_t size() const { return labels.size(); }
  LabeledCohort subset(std::span<const std::size_t> indices) const;
};

/// Pairs feature rows with manifest labels by subject_id. Rows without a
/// manifest entry raise IdMismatch; unlabeled subjects raise InvalidArgument.
LabeledCohort label_features(std::vector<SubjectFeatures> rows,
                             const std::vector<SubjectRecord> &manifest);

struct ModeResult {
  PathMode mode = PathMode::Fused;
  /// Sorted by subject_id.
  std::vector<QualityDecision> decisions;
  /// Subjects the mode could not score.
  std::vector<std::string> unscored;
  ConfusionMatrix cm;
  Metrics metrics;
  /// compute_metrics agrees with a recount from the raw decisions.
  bool recount_consistent = true;
};

/// Scores decisions against ground truth. Throws IdMismatch for a decision
/// whose subject has no label; labeled subjects without a decision are
/// listed in `unscored`.
ModeResult score_decisions(PathMode mode, std::vector<QualityDecision> decisions,
                           const std::map<std::string, QualityLabel> &truth);

inline constexpr std::array<PathMode, 3> kAllModes{PathMode::TwoD, PathMode::ThreeD,
                                                   PathMode::Fused};

struct ExperimentReport {
  TrainedModel model;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::vector<ModeResult> modes;
  /// Fused Poor set contains each single path's Poor set on subjects scored
  /// by all modes; only computed when all three modes ran.
  bool and_superset_holds = true;

  const ModeResult &mode(PathMode m) const;
};

/// Trains both paths on `train` and evaluates each requested mode on `test`.
ExperimentReport run_experiment(const LabeledCohort &train, const LabeledCohort &test,
                                const PipelineConfig &cfg,
                                std::span<const PathMode> modes = kAllModes);

struct CrossValidationReport {
  FoldPlan plan;
  std::vector<ExperimentReport> folds;
  /// Confusion matrices summed over folds, per mode.
  std::vector<ModeResult> pooled;
};

CrossValidationReport cross_validate(const LabeledCohort &cohort, std::size_t k,
                                     std::uint64_t seed, const PipelineConfig &cfg,
                                     std::span<const PathMode> modes = kAllModes);

nlohmann::json to_json(const Metrics &m);
nlohmann::json to_json(const ConfusionMatrix &cm);
nlohmann::json to_json(const ModeResult &r, bool with_decisions = true);
nlohmann::json to_json(const ExperimentReport &r);
nlohmann::json to_json(const CrossValidationReport &r);

/// Histogram of training d_final values by class with t* drawn as a line.
std::string dfinal_histogram_svg(std::span<const double> d_finals,
                                 std::span<const QualityLabel> labels, double t_star,
                                 std::size_t n_bins = 20);

} // namespace dhogm
