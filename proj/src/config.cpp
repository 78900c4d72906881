/**
 * @file config.cpp
 */

#include "dhogm/config.hpp"

#include "dhogm/error.hpp"

#include <fstream>
#include <set>

namespace dhogm {

using nlohmann::json;

namespace {

json shape_json(const Shape3 &s) { return json::array({s.nx, s.ny, s.nz}); }

Shape3 shape_from_json(const json &j) {
  if (!j.is_array() || j.size() != 3) {
    throw Error(ErrorCode::InvalidArgument, "shape must be an array of 3 integers");
  }
  return {j[0].get<std::size_t>(), j[1].get<std::size_t>(), j[2].get<std::size_t>()};
}

void reject_unknown(const json &j, const std::set<std::string> &known,
                    std::string_view where) {
  for (const auto &[key, _] : j.items()) {
    if (!known.contains(key)) {
      throw Error(ErrorCode::InvalidArgument,
                  "unknown key '" + key + "' in " + std::string(where));
    }
  }
}

} // namespace

json to_json(const FeatureConfig &cfg) {
  return json{{"n_bins", cfg.n_bins},
              {"slice_window", cfg.slice_window},
              {"cuboid", shape_json(cfg.cuboid)},
              {"target_shape", shape_json(cfg.target_shape)}};
}

FeatureConfig feature_config_from_json(const json &j) {
  reject_unknown(j, {"n_bins", "slice_window", "cuboid", "target_shape"},
                 "feature_config");
  FeatureConfig cfg;
  if (j.contains("n_bins")) {
    cfg.n_bins = j.at("n_bins").get<std::size_t>();
  }
  if (j.contains("slice_window")) {
    cfg.slice_window = j.at("slice_window").get<std::size_t>();
  }
  if (j.contains("cuboid")) {
    cfg.cuboid = shape_from_json(j.at("cuboid"));
  }
  if (j.contains("target_shape")) {
    cfg.target_shape = shape_from_json(j.at("target_shape"));
  }
  if (cfg.n_bins < 6) {
    throw Error(ErrorCode::InvalidArgument, "n_bins must be at least 6");
  }
  return cfg;
}

json to_json(const MlpTrainConfig &cfg) {
  return json{{"learning_rate", cfg.learning_rate},
              {"epochs", cfg.epochs},
              {"init_range", cfg.init_range},
              {"seed", cfg.seed}};
}

MlpTrainConfig mlp_config_from_json(const json &j) {
  reject_unknown(j, {"learning_rate", "epochs", "init_range", "seed"}, "mlp");
  MlpTrainConfig cfg;
  cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
  cfg.epochs = j.value("epochs", cfg.epochs);
  cfg.init_range = j.value("init_range", cfg.init_range);
  cfg.seed = j.value("seed", cfg.seed);
  return cfg;
}

json to_json(const PipelineConfig &cfg) {
  return json{{"feature_config", to_json(cfg.features)},
              {"percentiles", json::array({cfg.p_low, cfg.p_high})},
              {"mlp_layers", cfg.mlp_layers},
              {"mlp", to_json(cfg.mlp)},
              {"path_mode", std::string(to_string(cfg.path_mode))}};
}

PipelineConfig pipeline_config_from_json(const json &j) {
  reject_unknown(j, {"feature_config", "percentiles", "mlp_layers", "mlp", "path_mode"},
                 "pipeline config");
  PipelineConfig cfg;
  try {
    if (j.contains("feature_config")) {
      cfg.features = feature_config_from_json(j.at("feature_config"));
    }
    if (j.contains("percentiles")) {
      const auto &p = j.at("percentiles");
      if (!p.is_array() || p.size() != 2) {
        throw Error(ErrorCode::InvalidArgument, "percentiles must be [low, high]");
      }
      cfg.p_low = p[0].get<double>();
      cfg.p_high = p[1].get<double>();
    }
    if (j.contains("mlp_layers")) {
      cfg.mlp_layers = j.at("mlp_layers").get<std::vector<std::size_t>>();
      (void)parameter_count(cfg.mlp_layers);
    }
    if (j.contains("mlp")) {
      cfg.mlp = mlp_config_from_json(j.at("mlp"));
    }
    if (j.contains("path_mode")) {
      cfg.path_mode = path_mode_from_string(j.at("path_mode").get<std::string>());
    }
  } catch (const json::exception &e) {
    throw Error(ErrorCode::InvalidArgument, std::string("config: ") + e.what());
  }
  if (!(cfg.p_low >= 0.0 && cfg.p_low < cfg.p_high && cfg.p_high <= 100.0)) {
    throw Error(ErrorCode::InvalidArgument, "percentiles must satisfy 0 <= low < high <= 100");
  }
  return cfg;
}

PipelineConfig load_pipeline_config(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::UnreadableFile, "cannot open config " + path.string());
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception &e) {
    throw Error(ErrorCode::InvalidArgument, path.string() + ": " + e.what());
  }
  return pipeline_config_from_json(j);
}

json provenance() {
  return json{{"format_version", kFormatVersion},
              {"tool", std::string(kToolName)},
              {"tool_version", std::string(kToolVersion)}};
}

} // namespace dhogm
