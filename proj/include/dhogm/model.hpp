/**
 * @file model.hpp
 * @brief The two per-path classifiers
 *
 * 2D path: a small ReLU MLP scores every slice triplet, slices vote, and the
 * mean per-slice probabilities become the path confidence.
 * 3D path: a single threshold on D_final chosen by Youden's index.
 */
#pragma once

#include "dhogm/hogm.hpp"
#include "dhogm/quality.hpp"

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace dhogm {

/// Label plus class probabilities for one path. An unset label means the path
/// could not score the subject.
struct PathDecision {
  std::optional<QualityLabel> label;
  double p_c1 = std::numeric_limits<double>::quiet_NaN();
  double p_c2 = std::numeric_limits<double>::quiet_NaN();

  bool scorable() const { return label.has_value(); }
  double probability_of(QualityLabel c) const {
    return c == QualityLabel::Good ? p_c1 : p_c2;
  }
  static PathDecision unscorable() { return {}; }
};

// ---------------------------------------------------------------------------
// MLP

struct MlpTrainConfig {
  double learning_rate = 0.05;
  std::size_t epochs = 2000;
  /// Weights and biases start uniform in [-init_range, init_range].
  double init_range = 0.5;
  std::uint64_t seed = 42;

  bool operator==(const MlpTrainConfig &) const = default;
};

using MlpInput = std::array<double, 3>;

inline const std::vector<std::size_t> kDefaultLayers{3, 10, 14, 1};

/// Parameters are stored layer by layer: the fan_out x fan_in weight matrix
/// (row-major) followed by fan_out biases. Hidden layers use ReLU; the single
/// output unit is a sigmoid giving P(PoorQuality).
struct MlpModel {
  std::vector<std::size_t> layer_sizes = kDefaultLayers;
  std::vector<double> params;
  MlpTrainConfig train_config;
  double final_loss = std::numeric_limits<double>::quiet_NaN();

  std::size_t n_params() const { return params.size(); }
};

/// Sum over layers of (fan_in + 1) * fan_out. Throws InvalidArgument unless
/// the layout is 3 -> ... -> 1 with every layer non-empty.
std::size_t parameter_count(std::span<const std::size_t> layer_sizes);

MlpModel make_mlp(std::span<const std::size_t> layer_sizes, const MlpTrainConfig &cfg);
MlpModel zero_mlp(std::span<const std::size_t> layer_sizes = kDefaultLayers);

/// P(PoorQuality) for one input. Throws NonFiniteInput on NaN/Inf.
double mlp_forward(const MlpModel &m, const MlpInput &x);
double mlp_forward(const MlpModel &m, const SliceTriplet &t);

struct LossAndGradient {
  double loss = 0.0;
  std::vector<double> gradient;
};

/// Mean binary cross-entropy over the batch and its gradient with respect to
/// every parameter. targets are 1 for PoorQuality, 0 for GoodQuality.
LossAndGradient mlp_loss_gradient(const MlpModel &m, std::span<const MlpInput> inputs,
                                  std::span<const double> targets);

struct MlpTrainResult {
  MlpModel model;
  /// Loss before each epoch's update, then the final loss.
  std::vector<double> loss_history;
};

/// Full-batch gradient descent from a seeded initialisation.
MlpTrainResult mlp_train_samples(std::span<const MlpInput> inputs,
                                 std::span<const double> targets,
                                 const MlpTrainConfig &cfg,
                                 std::span<const std::size_t> layer_sizes = kDefaultLayers);

/// Every non-degenerate triplet of a subject inherits the subject's label.
/// Throws ClassMissing if a class is absent, InsufficientData with fewer than
/// two subjects in a class.
MlpTrainResult mlp_train(std::span<const SliceFeatureSeries> features,
                         std::span<const QualityLabel> labels,
                         const MlpTrainConfig &cfg,
                         std::span<const std::size_t> layer_sizes = kDefaultLayers);

/// Majority vote over non-degenerate slices (ties go to PoorQuality); the
/// probabilities are the mean per-slice probabilities, so they can disagree
/// with the vote. Unscorable when more than half of the slices are degenerate.
PathDecision predict_2d(const MlpModel &m, const SliceFeatureSeries &s);

// ---------------------------------------------------------------------------
// Threshold

struct ClassSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double sd = 0.0;
};

struct ThresholdModel {
  double t_star = 0.0;
  double scale = 1.0;
  /// Youden's J on the training set at t_star.
  double youden_j = 0.0;
  ClassSummary good;
  ClassSummary poor;
};

/// Youden's J = sensitivity + specificity - 1 for the rule "Good iff d < t",
/// with PoorQuality as the positive class.
double youden_index(std::span<const double> d_finals,
                    std::span<const QualityLabel> labels, double t);

/// Scans midpoints between consecutive distinct values plus two outer
/// candidates (min value: everything Poor; next float above max: everything
/// Good). Ties in J prefer the candidate farthest from its nearest training
/// value; outer candidates count as zero distance. scale is half the pooled
/// interquartile range, floored at 1e-6.
ThresholdModel fit_threshold(std::span<const double> d_finals,
                             std::span<const QualityLabel> labels);

/// Label by d_final < t_star; p_c2 = logistic((d_final - t_star) / scale).
PathDecision predict_3d(const ThresholdModel &t, double d_final);

double logistic(double x);

} // namespace dhogm
