/**
 * @file feature_io.hpp
 * @brief Per-cohort feature CSV
 *
 * Layout: one comment line `# mriqc-dhogm <version> format_version=1
 * config=<json>` carrying the resolved pipeline config, then the header
 * `subject_id,d_final,d3d_01..d3d_27,dax_01..,dcor_01..,dsag_01..,
 * n_degenerate_cuboids,n_degenerate_slices` and one row per subject.
 * Degenerate units are written as `nan`.
 */
#pragma once

#include "dhogm/config.hpp"
#include "dhogm/hogm.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace dhogm {

struct SubjectFeatures {
  std::string subject_id;
  SliceFeatureSeries slices;
  CuboidFeatureSet cuboids;
};

struct FeatureTable {
  PipelineConfig config;
  std::vector<SubjectFeatures> rows;
};

std::vector<std::string> feature_csv_header(const FeatureConfig &cfg);

/// Rows are written in the given order; callers sort by subject_id.
void write_features(const std::filesystem::path &path, const FeatureTable &table);
std::string format_features(const FeatureTable &table);

/// Throws MalformedCsv on a missing metadata line, wrong header or bad row.
FeatureTable read_features(const std::filesystem::path &path);
FeatureTable parse_features(const std::string &text);

/// Shortest decimal text that reads back to the same double; `nan`, `inf`
/// and `-inf` for non-finite values.
std::string format_double(double v);

} // namespace dhogm
