/**
 * @file manifest.hpp
 * @brief Cohort manifests: `subject_id,volume_path,mask_path,label`
 */
#pragma once

#include "dhogm/quality.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace dhogm {

struct SubjectRecord {
  std::string subject_id;
  std::filesystem::path volume_path;
  std::optional<std::filesystem::path> mask_path;
  std::optional<QualityLabel> label;
};

/// Relative paths are resolved against the manifest's directory. Throws
/// MalformedCsv on a bad header or row and DuplicateSubject on repeated ids.
std::vector<SubjectRecord> read_manifest(const std::filesystem::path &path);

/// Paths are written as given.
void write_manifest(const std::filesystem::path &path,
                    const std::vector<SubjectRecord> &records);

/// Split a CSV line on commas and trim surrounding whitespace of each field.
std::vector<std::string> split_csv_line(const std::string &line);

} // namespace dhogm
