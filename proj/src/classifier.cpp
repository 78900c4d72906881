/**
 * @file classifier.cpp
 */

#include "dhogm/classifier.hpp"

#include "dhogm/error.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace dhogm {

using nlohmann::json;

namespace {

bool scorable_3d(const SubjectFeatures &f) {
  const auto &c = f.cuboids;
  return !c.d3d_values.empty() && std::isfinite(c.d_final) &&
         !majority_degenerate(c.n_degenerate(), c.d3d_values.size());
}

json path_json(const std::optional<PathDecision> &p) {
  if (!p) {
    return nullptr;
  }
  if (!p->scorable()) {
    return json{{"label", "unscorable"}, {"p_c1", nullptr}, {"p_c2", nullptr}};
  }
  return json{{"label", to_int(*p->label)}, {"p_c1", p->p_c1}, {"p_c2", p->p_c2}};
}

std::optional<PathDecision> path_from_json(const json &j) {
  if (j.is_null()) {
    return std::nullopt;
  }
  const auto &label = j.at("label");
  if (label.is_string()) {
    if (label.get<std::string>() != "unscorable") {
      throw Error(ErrorCode::InvalidArgument, "unknown path label " + label.dump());
    }
    return PathDecision::unscorable();
  }
  PathDecision p;
  p.label = label_from_int(label.get<int>());
  if (!p.label) {
    throw Error(ErrorCode::InvalidArgument, "path label must be 1 or 2");
  }
  p.p_c1 = j.at("p_c1").get<double>();
  p.p_c2 = j.at("p_c2").get<double>();
  return p;
}

} // namespace

TrainedModel train_model(std::span<const SubjectFeatures> features,
                         std::span<const QualityLabel> labels, const PipelineConfig &cfg) {
  if (features.size() != labels.size()) {
    throw Error(ErrorCode::InvalidArgument, "features and labels differ in length");
  }
  TrainedModel m;
  m.config = cfg;

  std::vector<SliceFeatureSeries> slices;
  slices.reserve(features.size());
  for (const auto &f : features) {
    slices.push_back(f.slices);
  }
  m.mlp = mlp_train(slices, labels, cfg.mlp, cfg.mlp_layers).model;

  std::vector<double> d;
  std::vector<QualityLabel> y;
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (scorable_3d(features[i])) {
      d.push_back(features[i].cuboids.d_final);
      y.push_back(labels[i]);
    }
  }
  m.threshold = fit_threshold(d, y);
  return m;
}

PathDecision path_2d(const TrainedModel &m, const SubjectFeatures &f) {
  return predict_2d(m.mlp, f.slices);
}

PathDecision path_3d(const TrainedModel &m, const SubjectFeatures &f) {
  if (!scorable_3d(f)) {
    return PathDecision::unscorable();
  }
  return predict_3d(m.threshold, f.cuboids.d_final);
}

QualityDecision decide(const TrainedModel &m, const SubjectFeatures &f, PathMode mode) {
  switch (mode) {
  case PathMode::TwoD: return decide_single(mode, path_2d(m, f), f.subject_id);
  case PathMode::ThreeD: return decide_single(mode, path_3d(m, f), f.subject_id);
  case PathMode::Fused: break;
  }
  return fuse(path_2d(m, f), path_3d(m, f), f.subject_id);
}

json decision_to_json(const QualityDecision &d) {
  return json{{"subject_id", d.subject_id},
              {"c_2d", path_json(d.c_2d)},
              {"c_3d", path_json(d.c_3d)},
              {"c_final", to_int(d.c_final)},
              {"confidence", d.confidence},
              {"confidence_kind", d.confidence_kind == ConfidenceKind::P1 ? "P1" : "P2"},
              {"degraded_evidence", d.degraded_evidence}};
}

QualityDecision decision_from_json(const json &j) {
  QualityDecision d;
  try {
    d.subject_id = j.at("subject_id").get<std::string>();
    d.c_2d = path_from_json(j.at("c_2d"));
    d.c_3d = path_from_json(j.at("c_3d"));
    const auto label = label_from_int(j.at("c_final").get<int>());
    if (!label) {
      throw Error(ErrorCode::InvalidArgument, "c_final must be 1 or 2");
    }
    d.c_final = *label;
    d.confidence = j.at("confidence").get<double>();
    const auto kind = j.at("confidence_kind").get<std::string>();
    if (kind != "P1" && kind != "P2") {
      throw Error(ErrorCode::InvalidArgument, "confidence_kind must be P1 or P2");
    }
    d.confidence_kind = kind == "P1" ? ConfidenceKind::P1 : ConfidenceKind::P2;
    d.degraded_evidence = j.at("degraded_evidence").get<bool>();
  } catch (const json::exception &e) {
    throw Error(ErrorCode::InvalidArgument, std::string("decision: ") + e.what());
  }
  return d;
}

std::string format_decisions(std::span<const QualityDecision> decisions) {
  std::string out;
  for (const auto &d : decisions) {
    out += decision_to_json(d).dump();
    out += '\n';
  }
  return out;
}

void write_decisions(const std::filesystem::path &path,
                     std::span<const QualityDecision> decisions) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::UnreadableFile, "cannot write " + path.string());
  }
  out << format_decisions(decisions);
}

std::vector<QualityDecision> read_decisions(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::UnreadableFile, "cannot open " + path.string());
  }
  std::vector<QualityDecision> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    try {
      out.push_back(decision_from_json(json::parse(line)));
    } catch (const json::exception &e) {
      throw Error(ErrorCode::InvalidArgument,
                  path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

} // namespace dhogm
