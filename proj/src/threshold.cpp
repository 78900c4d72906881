/**
 * @file threshold.cpp
 * @brief Youden-index threshold on D_final
 */

#include "dhogm/error.hpp"
#include "dhogm/model.hpp"
#include "dhogm/volume_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dhogm {

namespace {

ClassSummary summarize(std::span<const double> d, std::span<const QualityLabel> labels,
                       QualityLabel which) {
  ClassSummary s;
  double sum = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (labels[i] == which) {
      sum += d[i];
      ++s.count;
    }
  }
  if (s.count == 0) {
    return s;
  }
  s.mean = sum / static_cast<double>(s.count);
  double ss = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (labels[i] == which) {
      ss += (d[i] - s.mean) * (d[i] - s.mean);
    }
  }
  s.sd = s.count > 1 ? std::sqrt(ss / static_cast<double>(s.count - 1)) : 0.0;
  return s;
}

void validate(std::span<const double> d, std::span<const QualityLabel> labels) {
  if (d.size() != labels.size()) {
    throw Error(ErrorCode::InvalidArgument, "features and labels differ in length");
  }
  for (double v : d) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::NonFiniteFeature, "D_final must be finite");
    }
  }
}

} // namespace

double youden_index(std::span<const double> d, std::span<const QualityLabel> labels,
                    double t) {
  validate(d, labels);
  std::size_t pos = 0;
  std::size_t neg = 0;
  std::size_t tp = 0;
  std::size_t tn = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const bool predicted_good = d[i] < t;
    if (labels[i] == QualityLabel::Poor) {
      ++pos;
      tp += predicted_good ? 0 : 1;
    } else {
      ++neg;
      tn += predicted_good ? 1 : 0;
    }
  }
  if (pos == 0 || neg == 0) {
    throw Error(ErrorCode::ClassMissing, "Youden's index needs both classes");
  }
  return static_cast<double>(tp) / static_cast<double>(pos) +
         static_cast<double>(tn) / static_cast<double>(neg) - 1.0;
}

ThresholdModel fit_threshold(std::span<const double> d,
                             std::span<const QualityLabel> labels) {
  validate(d, labels);
  ThresholdModel model;
  model.good = summarize(d, labels, QualityLabel::Good);
  model.poor = summarize(d, labels, QualityLabel::Poor);
  if (model.good.count == 0 || model.poor.count == 0) {
    throw Error(ErrorCode::ClassMissing, "threshold fit needs both quality classes");
  }

  std::vector<double> sorted(d.begin(), d.end());
  std::sort(sorted.begin(), sorted.end());
  const std::vector<double> unique(sorted.begin(),
                                   std::unique(sorted.begin(), sorted.end()));

  struct Candidate {
    double t;
    double margin;
  };
  std::vector<Candidate> candidates;
  candidates.push_back({unique.front(), 0.0});
  for (std::size_t i = 0; i + 1 < unique.size(); ++i) {
    candidates.push_back({0.5 * (unique[i] + unique[i + 1]),
                          0.5 * (unique[i + 1] - unique[i])});
  }
  candidates.push_back(
      {std::nextafter(unique.back(), std::numeric_limits<double>::infinity()), 0.0});

  constexpr double kTie = 1e-12;
  double best_j = -std::numeric_limits<double>::infinity();
  const Candidate *best = nullptr;
  for (const auto &c : candidates) {
    const double j = youden_index(d, labels, c.t);
    if (j > best_j + kTie || (j >= best_j - kTie && best != nullptr && c.margin > best->margin)) {
      best_j = std::max(j, best_j);
      best = &c;
    }
  }
  model.t_star = best->t;
  model.youden_j = youden_index(d, labels, best->t);

  const double q1 = percentile(sorted, 25.0);
  const double q3 = percentile(sorted, 75.0);
  model.scale = std::max(0.5 * (q3 - q1), 1e-6);
  return model;
}

PathDecision predict_3d(const ThresholdModel &t, double d_final) {
  if (!std::isfinite(d_final)) {
    throw Error(ErrorCode::NonFiniteFeature, "D_final must be finite");
  }
  if (!(t.scale > 0.0)) {
    throw Error(ErrorCode::MalformedModel, "threshold scale must be positive");
  }
  PathDecision p;
  p.label = d_final < t.t_star ? QualityLabel::Good : QualityLabel::Poor;
  p.p_c2 = logistic((d_final - t.t_star) / t.scale);
  p.p_c1 = 1.0 - p.p_c2;
  return p;
}

} // namespace dhogm
