/**
 * @file eval.cpp
 */

#include "dhogm/eval.hpp"

#include "dhogm/error.hpp"
#include "dhogm/manifest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace dhogm {

using nlohmann::json;

void ConfusionMatrix::add(QualityLabel truth, QualityLabel predicted) {
  const bool pos = truth == QualityLabel::Poor;
  const bool pred_pos = predicted == QualityLabel::Poor;
  if (pos) {
    (pred_pos ? tp : fn) += 1;
  } else {
    (pred_pos ? fp : tn) += 1;
  }
}

ConfusionMatrix &ConfusionMatrix::operator+=(const ConfusionMatrix &o) {
  tp += o.tp;
  fp += o.fp;
  tn += o.tn;
  fn += o.fn;
  return *this;
}

namespace {

Metric ratio(std::size_t num, std::size_t den) {
  if (den == 0) {
    return {0.0, true};
  }
  return {static_cast<double>(num) / static_cast<double>(den), false};
}

} // namespace

Metrics compute_metrics(const ConfusionMatrix &cm) {
  if (cm.total() == 0) {
    throw Error(ErrorCode::EmptyMatrix, "confusion matrix is empty");
  }
  Metrics m;
  m.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
  m.precision = ratio(cm.tp, cm.tp + cm.fp);
  m.recall = ratio(cm.tp, cm.tp + cm.fn);
  m.specificity = ratio(cm.tn, cm.tn + cm.fp);
  if (m.precision.undefined || m.recall.undefined ||
      m.precision.value + m.recall.value == 0.0) {
    m.f1 = {0.0, true};
  } else {
    m.f1.value = 2.0 * m.precision.value * m.recall.value /
                 (m.precision.value + m.recall.value);
  }
  if (m.recall.undefined || m.specificity.undefined) {
    m.balanced_accuracy = {0.0, true};
  } else {
    m.balanced_accuracy.value = 0.5 * (m.recall.value + m.specificity.value);
  }
  return m;
}

FoldPlan stratified_folds(std::span<const QualityLabel> labels, std::size_t k,
                          std::uint64_t seed) {
  if (k < 2) {
    throw Error(ErrorCode::InvalidArgument, "fold count must be at least 2");
  }
  FoldPlan plan{k, seed, std::vector<std::size_t>(labels.size(), 0)};
  std::mt19937_64 rng(seed);
  std::size_t dealer = 0;
  for (QualityLabel c : {QualityLabel::Good, QualityLabel::Poor}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == c) {
        members.push_back(i);
      }
    }
    if (members.size() < k) {
      throw Error(ErrorCode::TooFewPerClass,
                  "class " + std::to_string(to_int(c)) + " has " +
                      std::to_string(members.size()) + " subjects for " +
                      std::to_string(k) + " folds");
    }
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t i : members) {
      plan.assignments[i] = dealer++ % k;
    }
  }
  return plan;
}

std::vector<bool> stratified_split(std::span<const QualityLabel> labels, double train_fraction,
                                   std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "train fraction must lie in (0, 1)");
  }
  std::vector<bool> train(labels.size(), false);
  std::mt19937_64 rng(seed);
  for (QualityLabel c : {QualityLabel::Good, QualityLabel::Poor}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == c) {
        members.push_back(i);
      }
    }
    std::shuffle(members.begin(), members.end(), rng);
    const auto n = static_cast<std::size_t>(
        std::lround(static_cast<double>(members.size()) * train_fraction));
    for (std::size_t i = 0; i < n; ++i) {
      train[members[i]] = true;
    }
  }
  return train;
}

LabeledCohort LabeledCohort::subset(std::span<const std::size_t> indices) const {
  LabeledCohort out;
  for (std::size_t i : indices) {
    out.features.push_back(features.at(i));
    out.labels.push_back(labels.at(i));
  }
  return out;
}

LabeledCohort label_features(std::vector<SubjectFeatures> rows,
                             const std::vector<SubjectRecord> &manifest) {
  std::map<std::string, const SubjectRecord *> by_id;
  for (const auto &r : manifest) {
    by_id[r.subject_id] = &r;
  }
  LabeledCohort out;
  for (auto &row : rows) {
    const auto it = by_id.find(row.subject_id);
    if (it == by_id.end()) {
      throw Error(ErrorCode::IdMismatch,
                  "subject '" + row.subject_id + "' is not in the manifest");
    }
    if (!it->second->label) {
      throw Error(ErrorCode::InvalidArgument,
                  "subject '" + row.subject_id + "' has no label");
    }
    out.labels.push_back(*it->second->label);
    out.features.push_back(std::move(row));
  }
  return out;
}

ModeResult score_decisions(PathMode mode, std::vector<QualityDecision> decisions,
                           const std::map<std::string, QualityLabel> &truth) {
  std::sort(decisions.begin(), decisions.end(),
            [](const auto &a, const auto &b) { return a.subject_id < b.subject_id; });
  ModeResult r;
  r.mode = mode;
  std::set<std::string> seen;
  for (const auto &d : decisions) {
    const auto it = truth.find(d.subject_id);
    if (it == truth.end()) {
      throw Error(ErrorCode::IdMismatch,
                  "decision for unknown subject '" + d.subject_id + "'");
    }
    if (!seen.insert(d.subject_id).second) {
      throw Error(ErrorCode::DuplicateSubject, "two decisions for '" + d.subject_id + "'");
    }
    r.cm.add(it->second, d.c_final);
  }
  for (const auto &[id, _] : truth) {
    if (!seen.contains(id)) {
      r.unscored.push_back(id);
    }
  }
  r.metrics = compute_metrics(r.cm);

  // Independent recount straight from the decisions.
  std::size_t correct = 0;
  std::size_t poor_hits = 0;
  std::size_t poor_truth = 0;
  for (const auto &d : decisions) {
    const QualityLabel t = truth.at(d.subject_id);
    correct += d.c_final == t ? 1 : 0;
    poor_truth += t == QualityLabel::Poor ? 1 : 0;
    poor_hits += (t == QualityLabel::Poor && d.c_final == QualityLabel::Poor) ? 1 : 0;
  }
  const double acc = static_cast<double>(correct) / static_cast<double>(decisions.size());
  const double rec = poor_truth ? static_cast<double>(poor_hits) / static_cast<double>(poor_truth)
                                : 0.0;
  r.recount_consistent = acc == r.metrics.accuracy && rec == r.metrics.recall.value &&
                         decisions.size() == r.cm.total();
  r.decisions = std::move(decisions);
  return r;
}

const ModeResult &ExperimentReport::mode(PathMode m) const {
  for (const auto &r : modes) {
    if (r.mode == m) {
      return r;
    }
  }
  throw Error(ErrorCode::InvalidArgument,
              "experiment did not run mode " + std::string(to_string(m)));
}

namespace {

std::map<std::string, QualityLabel> truth_of(const LabeledCohort &c) {
  std::map<std::string, QualityLabel> t;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!t.emplace(c.features[i].subject_id, c.labels[i]).second) {
      throw Error(ErrorCode::DuplicateSubject, "duplicate subject " + c.features[i].subject_id);
    }
  }
  return t;
}

std::set<std::string> poor_set(const ModeResult &r) {
  std::set<std::string> s;
  for (const auto &d : r.decisions) {
    if (d.c_final == QualityLabel::Poor) {
      s.insert(d.subject_id);
    }
  }
  return s;
}

std::set<std::string> scored_set(const ModeResult &r) {
  std::set<std::string> s;
  for (const auto &d : r.decisions) {
    s.insert(d.subject_id);
  }
  return s;
}

bool and_superset(const std::vector<ModeResult> &modes) {
  const ModeResult *fused = nullptr;
  for (const auto &r : modes) {
    if (r.mode == PathMode::Fused) {
      fused = &r;
    }
  }
  if (fused == nullptr) {
    return true;
  }
  const auto fused_poor = poor_set(*fused);
  const auto fused_scored = scored_set(*fused);
  for (const auto &r : modes) {
    if (r.mode == PathMode::Fused) {
      continue;
    }
    for (const auto &id : poor_set(r)) {
      if (fused_scored.contains(id) && !fused_poor.contains(id)) {
        return false;
      }
    }
  }
  return true;
}

} // namespace

ExperimentReport run_experiment(const LabeledCohort &train, const LabeledCohort &test,
                                const PipelineConfig &cfg, std::span<const PathMode> modes) {
  ExperimentReport rep;
  rep.model = train_model(train.features, train.labels, cfg);
  rep.n_train = train.size();
  rep.n_test = test.size();
  const auto truth = truth_of(test);
  for (PathMode mode : modes) {
    std::vector<QualityDecision> decisions;
    for (const auto &f : test.features) {
      try {
        decisions.push_back(decide(rep.model, f, mode));
      } catch (const Error &e) {
        if (e.code() != ErrorCode::BothUnscorable) {
          throw;
        }
      }
    }
    rep.modes.push_back(score_decisions(mode, std::move(decisions), truth));
  }
  rep.and_superset_holds = and_superset(rep.modes);
  return rep;
}

CrossValidationReport cross_validate(const LabeledCohort &cohort, std::size_t k,
                                     std::uint64_t seed, const PipelineConfig &cfg,
                                     std::span<const PathMode> modes) {
  CrossValidationReport rep;
  rep.plan = stratified_folds(cohort.labels, k, seed);
  std::vector<std::vector<QualityDecision>> pooled(modes.size());
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<std::size_t> tr;
    std::vector<std::size_t> te;
    for (std::size_t i = 0; i < cohort.size(); ++i) {
      (rep.plan.assignments[i] == f ? te : tr).push_back(i);
    }
    rep.folds.push_back(run_experiment(cohort.subset(tr), cohort.subset(te), cfg, modes));
    for (std::size_t m = 0; m < modes.size(); ++m) {
      const auto &d = rep.folds.back().modes[m].decisions;
      pooled[m].insert(pooled[m].end(), d.begin(), d.end());
    }
  }
  const auto truth = truth_of(cohort);
  for (std::size_t m = 0; m < modes.size(); ++m) {
    rep.pooled.push_back(score_decisions(modes[m], std::move(pooled[m]), truth));
  }
  return rep;
}

json to_json(const Metrics &m) {
  json undefined = json::array();
  const std::pair<const char *, const Metric *> named[] = {
      {"precision", &m.precision},       {"recall", &m.recall},
      {"specificity", &m.specificity},   {"f1", &m.f1},
      {"balanced_accuracy", &m.balanced_accuracy}};
  json j{{"accuracy", m.accuracy}};
  for (const auto &[name, metric] : named) {
    j[name] = metric->value;
    if (metric->undefined) {
      undefined.push_back(name);
    }
  }
  j["undefined"] = undefined;
  return j;
}

json to_json(const ConfusionMatrix &cm) {
  return json{{"tp", cm.tp}, {"fp", cm.fp}, {"tn", cm.tn}, {"fn", cm.fn}};
}

json to_json(const ModeResult &r, bool with_decisions) {
  json j{{"mode", std::string(to_string(r.mode))},
         {"confusion_matrix", to_json(r.cm)},
         {"metrics", to_json(r.metrics)},
         {"recount_consistent", r.recount_consistent},
         {"unscored", r.unscored}};
  if (with_decisions) {
    json d = json::array();
    for (const auto &q : r.decisions) {
      d.push_back(decision_to_json(q));
    }
    j["decisions"] = d;
  }
  return j;
}

namespace {

json ablation_table(const std::vector<ModeResult> &modes) {
  json rows = json::array();
  for (const auto &r : modes) {
    rows.push_back(json{{"mode", std::string(to_string(r.mode))},
                        {"accuracy", r.metrics.accuracy},
                        {"balanced_accuracy", r.metrics.balanced_accuracy.value},
                        {"precision", r.metrics.precision.value},
                        {"recall", r.metrics.recall.value},
                        {"f1", r.metrics.f1.value}});
  }
  return rows;
}

json training_summary(const TrainedModel &m) {
  return json{{"t_star", m.threshold.t_star},
              {"scale", m.threshold.scale},
              {"youden_j", m.threshold.youden_j},
              {"mlp_n_params", m.mlp.n_params()},
              {"mlp_final_loss", m.mlp.final_loss}};
}

} // namespace

json to_json(const ExperimentReport &r) {
  json j = provenance();
  j["config"] = to_json(r.model.config);
  j["n_train"] = r.n_train;
  j["n_test"] = r.n_test;
  j["training"] = training_summary(r.model);
  json modes = json::array();
  for (const auto &m : r.modes) {
    modes.push_back(to_json(m));
  }
  j["modes"] = modes;
  j["ablation"] = ablation_table(r.modes);
  j["and_superset_holds"] = r.and_superset_holds;
  return j;
}

json to_json(const CrossValidationReport &r) {
  json j = provenance();
  if (!r.folds.empty()) {
    j["config"] = to_json(r.folds.front().model.config);
  }
  j["k"] = r.plan.k;
  j["seed"] = r.plan.seed;
  json folds = json::array();
  for (std::size_t f = 0; f < r.folds.size(); ++f) {
    const auto &fold = r.folds[f];
    json modes = json::array();
    for (const auto &m : fold.modes) {
      modes.push_back(to_json(m, false));
    }
    folds.push_back(json{{"fold", f},
                         {"n_train", fold.n_train},
                         {"n_test", fold.n_test},
                         {"training", training_summary(fold.model)},
                         {"modes", modes},
                         {"and_superset_holds", fold.and_superset_holds}});
  }
  j["folds"] = folds;
  json pooled = json::array();
  for (const auto &m : r.pooled) {
    pooled.push_back(to_json(m));
  }
  j["aggregate"] = pooled;
  j["ablation"] = ablation_table(r.pooled);
  return j;
}

namespace {

__attribute__((format(printf, 2, 3))) void appendf(std::string &out, const char *fmt, ...) {
  char buf[256];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, ap);
  va_end(ap);
  out += buf;
}

} // namespace

std::string dfinal_histogram_svg(std::span<const double> d, std::span<const QualityLabel> labels,
                                 double t_star, std::size_t n_bins) {
  if (d.size() != labels.size() || d.empty() || n_bins == 0) {
    throw Error(ErrorCode::InvalidArgument, "histogram needs aligned, non-empty inputs");
  }
  double lo = t_star;
  double hi = t_star;
  for (double v : d) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi == lo) {
    hi = lo + 1.0;
  }
  const double width = (hi - lo) / static_cast<double>(n_bins);
  std::vector<std::size_t> good(n_bins, 0);
  std::vector<std::size_t> poor(n_bins, 0);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto b = std::min(n_bins - 1, static_cast<std::size_t>((d[i] - lo) / width));
    (labels[i] == QualityLabel::Good ? good : poor)[b] += 1;
  }
  const std::size_t peak = std::max(*std::max_element(good.begin(), good.end()),
                                    *std::max_element(poor.begin(), poor.end()));

  constexpr double W = 640;
  constexpr double H = 360;
  constexpr double M = 40;
  const double plot_w = W - 2 * M;
  const double plot_h = H - 2 * M;
  const double bar = plot_w / static_cast<double>(n_bins);
  const auto x_of = [&](double v) { return M + (v - lo) / (hi - lo) * plot_w; };

  std::string s;
  appendf(s, "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\">\n", W, H);
  appendf(s, "<rect width=\"100%%\" height=\"100%%\" fill=\"white\"/>\n");
  for (std::size_t b = 0; b < n_bins; ++b) {
    const double x = M + static_cast<double>(b) * bar;
    for (int cls = 0; cls < 2; ++cls) {
      const std::size_t count = cls == 0 ? good[b] : poor[b];
      if (count == 0) {
        continue;
      }
      const double h = static_cast<double>(count) / static_cast<double>(peak) * plot_h;
      appendf(s, "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"%s\" "
           "fill-opacity=\"0.6\"/>\n",
           x + (cls == 0 ? 0.0 : bar / 2), H - M - h, bar / 2, h,
           cls == 0 ? "#2b7bba" : "#d7301f");
    }
  }
  appendf(s, "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"black\" "
       "stroke-dasharray=\"4 3\"/>\n",
       x_of(t_star), M, x_of(t_star), H - M);
  appendf(s, "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"black\"/>\n", M, H - M,
       W - M, H - M);
  appendf(s, "<text x=\"%.2f\" y=\"%.2f\" font-size=\"12\">t* = %.4f</text>\n", x_of(t_star) + 4,
       M + 12, t_star);
  appendf(s, "<text x=\"%.2f\" y=\"%.2f\" font-size=\"12\">%.4f</text>\n", M, H - M + 16, lo);
  appendf(s, "<text x=\"%.2f\" y=\"%.2f\" font-size=\"12\" text-anchor=\"end\">%.4f</text>\n",
       W - M, H - M + 16, hi);
  appendf(s, "<text x=\"%.2f\" y=\"20\" font-size=\"13\">D_final by class "
       "(blue: good, red: poor)</text>\n",
       M);
  s += "</svg>\n";
  return s;
}

} // namespace dhogm
