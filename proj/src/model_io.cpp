/**
 * @file model_io.cpp
 */

#include "dhogm/model_io.hpp"

#include "dhogm/error.hpp"

#include <cmath>
#include <fstream>

namespace dhogm {

using nlohmann::json;

namespace {

json summary_json(const ClassSummary &s) {
  return json{{"count", s.count}, {"mean", s.mean}, {"sd", s.sd}};
}

ClassSummary summary_from_json(const json &j) {
  return {j.at("count").get<std::size_t>(), j.at("mean").get<double>(),
          j.at("sd").get<double>()};
}

// JSON has no NaN; an absent loss is stored as null.
json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

} // namespace

json model_to_json(const TrainedModel &m) {
  json j = provenance();
  j["mlp"] = json{{"layer_sizes", m.mlp.layer_sizes},
                  {"n_params", m.mlp.n_params()},
                  {"params", m.mlp.params},
                  {"train_config", to_json(m.mlp.train_config)},
                  {"seed", m.mlp.train_config.seed},
                  {"final_loss", nullable(m.mlp.final_loss)}};
  j["threshold"] = json{{"t_star", m.threshold.t_star},
                        {"scale", m.threshold.scale},
                        {"youden_j", m.threshold.youden_j},
                        {"good", summary_json(m.threshold.good)},
                        {"poor", summary_json(m.threshold.poor)}};
  j["feature_config"] = to_json(m.config.features);
  j["pipeline_config"] = to_json(m.config);
  return j;
}

TrainedModel model_from_json(const json &j) {
  TrainedModel m;
  try {
    if (j.at("format_version").get<int>() != kFormatVersion) {
      throw Error(ErrorCode::MalformedModel, "unsupported model format_version");
    }
    const auto &mlp = j.at("mlp");
    m.mlp.layer_sizes = mlp.at("layer_sizes").get<std::vector<std::size_t>>();
    m.mlp.params = mlp.at("params").get<std::vector<double>>();
    m.mlp.train_config = mlp_config_from_json(mlp.at("train_config"));
    const auto &loss = mlp.at("final_loss");
    if (!loss.is_null()) {
      m.mlp.final_loss = loss.get<double>();
    }
    if (m.mlp.params.size() != parameter_count(m.mlp.layer_sizes)) {
      throw Error(ErrorCode::MalformedModel, "parameter vector does not match layer sizes");
    }

    const auto &t = j.at("threshold");
    m.threshold.t_star = t.at("t_star").get<double>();
    m.threshold.scale = t.at("scale").get<double>();
    m.threshold.youden_j = t.at("youden_j").get<double>();
    m.threshold.good = summary_from_json(t.at("good"));
    m.threshold.poor = summary_from_json(t.at("poor"));
    if (!(m.threshold.scale > 0.0)) {
      throw Error(ErrorCode::MalformedModel, "threshold scale must be positive");
    }

    m.config = pipeline_config_from_json(j.at("pipeline_config"));
    if (feature_config_from_json(j.at("feature_config")) != m.config.features) {
      throw Error(ErrorCode::MalformedModel, "feature_config disagrees with pipeline_config");
    }
  } catch (const json::exception &e) {
    throw Error(ErrorCode::MalformedModel, std::string("model: ") + e.what());
  } catch (const Error &e) {
    if (e.code() == ErrorCode::MalformedModel) {
      throw;
    }
    throw Error(ErrorCode::MalformedModel, std::string("model: ") + e.what());
  }
  return m;
}

void save_model(const std::filesystem::path &path, const TrainedModel &m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::UnreadableFile, "cannot write " + path.string());
  }
  out << model_to_json(m).dump(2) << '\n';
}

TrainedModel load_model(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::UnreadableFile, "cannot open model " + path.string());
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception &e) {
    throw Error(ErrorCode::MalformedModel, path.string() + ": " + e.what());
  }
  return model_from_json(j);
}

void require_compatible(const TrainedModel &m, const FeatureConfig &extraction) {
  if (m.config.features != extraction) {
    throw Error(ErrorCode::FeatureConfigMismatch,
                "model expects features " + to_json(m.config.features).dump() +
                    " but got " + to_json(extraction).dump());
  }
}

} // namespace dhogm
