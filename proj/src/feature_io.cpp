/**
 * @file feature_io.cpp
 */

#include "dhogm/feature_io.hpp"

#include "dhogm/error.hpp"
#include "dhogm/manifest.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace dhogm {

using nlohmann::json;

namespace {

constexpr std::size_t kCuboidCount = 27;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string numbered(std::string_view prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*s_%02zu", static_cast<int>(prefix.size()),
                prefix.data(), i);
  return buf;
}

double parse_double(const std::string &field, std::size_t line_no) {
  if (field == "nan") {
    return kNaN;
  }
  if (field == "inf") {
    return std::numeric_limits<double>::infinity();
  }
  if (field == "-inf") {
    return -std::numeric_limits<double>::infinity();
  }
  double v = 0.0;
  const auto *end = field.data() + field.size();
  const auto res = std::from_chars(field.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw Error(ErrorCode::MalformedCsv, "line " + std::to_string(line_no) +
                                             ": not a number: '" + field + "'");
  }
  return v;
}

std::size_t parse_count(const std::string &field, std::size_t line_no) {
  std::size_t v = 0;
  const auto *end = field.data() + field.size();
  const auto res = std::from_chars(field.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw Error(ErrorCode::MalformedCsv, "line " + std::to_string(line_no) +
                                             ": not a count: '" + field + "'");
  }
  return v;
}

constexpr std::string_view kMetaPrefix = "# ";
constexpr std::string_view kConfigKey = " config=";

} // namespace

std::string format_double(double v) {
  if (std::isnan(v)) {
    return "nan";
  }
  if (std::isinf(v)) {
    return v > 0 ? "inf" : "-inf";
  }
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> feature_csv_header(const FeatureConfig &cfg) {
  std::vector<std::string> h{"subject_id", "d_final"};
  for (std::size_t i = 1; i <= kCuboidCount; ++i) {
    h.push_back(numbered("d3d", i));
  }
  for (std::string_view p : {"dax", "dcor", "dsag"}) {
    for (std::size_t i = 1; i <= cfg.slice_window; ++i) {
      h.push_back(numbered(p, i));
    }
  }
  h.emplace_back("n_degenerate_cuboids");
  h.emplace_back("n_degenerate_slices");
  return h;
}

std::string format_features(const FeatureTable &table) {
  const auto &cfg = table.config.features;
  std::ostringstream out;
  out << kMetaPrefix << kToolName << ' ' << kToolVersion
      << " format_version=" << kFormatVersion << kConfigKey
      << to_json(table.config).dump() << '\n';
  const auto header = feature_csv_header(cfg);
  for (std::size_t i = 0; i < header.size(); ++i) {
    out << (i ? "," : "") << header[i];
  }
  out << '\n';
  for (const auto &row : table.rows) {
    if (row.cuboids.d3d_values.size() != kCuboidCount ||
        row.slices.size() != cfg.slice_window) {
      throw Error(ErrorCode::InvalidArgument,
                  "feature row for " + row.subject_id + " does not match the config");
    }
    if (row.subject_id.find_first_of(",\n\r") != std::string::npos) {
      throw Error(ErrorCode::InvalidArgument, "subject_id must not contain commas or newlines");
    }
    out << row.subject_id << ',' << format_double(row.cuboids.d_final);
    for (double v : row.cuboids.d3d_values) {
      out << ',' << format_double(v);
    }
    for (const auto &t : row.slices.triplets) {
      out << ',' << format_double(t.axial);
    }
    for (const auto &t : row.slices.triplets) {
      out << ',' << format_double(t.coronal);
    }
    for (const auto &t : row.slices.triplets) {
      out << ',' << format_double(t.sagittal);
    }
    out << ',' << row.cuboids.n_degenerate() << ',' << row.slices.n_degenerate() << '\n';
  }
  return out.str();
}

void write_features(const std::filesystem::path &path, const FeatureTable &table) {
  const std::string text = format_features(table);
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::UnreadableFile, "cannot write " + path.string());
  }
  out << text;
}

FeatureTable parse_features(const std::string &text) {
  std::istringstream in(text);
  std::string line;
  FeatureTable table;

  if (!std::getline(in, line) || !line.starts_with(kMetaPrefix)) {
    throw Error(ErrorCode::MalformedCsv, "feature file lacks its metadata line");
  }
  const auto pos = line.find(kConfigKey);
  if (pos == std::string::npos) {
    throw Error(ErrorCode::MalformedCsv, "feature metadata has no config");
  }
  try {
    table.config = pipeline_config_from_json(json::parse(line.substr(pos + kConfigKey.size())));
  } catch (const json::exception &e) {
    throw Error(ErrorCode::MalformedCsv, std::string("feature metadata: ") + e.what());
  }
  const auto &cfg = table.config.features;

  const auto expected = feature_csv_header(cfg);
  if (!std::getline(in, line) || split_csv_line(line) != expected) {
    throw Error(ErrorCode::MalformedCsv, "feature header does not match the embedded config");
  }

  const auto windows = select_slices(cfg.target_shape, cfg.slice_window);
  const auto origins = cuboid_grid(cfg.target_shape, cfg);
  const std::size_t w = cfg.slice_window;
  std::set<std::string> seen;
  std::size_t line_no = 2;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    const auto f = split_csv_line(line);
    if (f.size() != expected.size()) {
      throw Error(ErrorCode::MalformedCsv, "line " + std::to_string(line_no) + ": expected " +
                                               std::to_string(expected.size()) + " fields");
    }
    SubjectFeatures row;
    row.subject_id = f[0];
    if (!seen.insert(row.subject_id).second) {
      throw Error(ErrorCode::DuplicateSubject, "duplicate subject " + row.subject_id);
    }
    row.cuboids.d_final = parse_double(f[1], line_no);
    row.cuboids.cuboid_origins = origins;
    for (std::size_t i = 0; i < kCuboidCount; ++i) {
      const double v = parse_double(f[2 + i], line_no);
      row.cuboids.d3d_values.push_back(v);
      row.cuboids.degenerate.push_back(std::isnan(v));
    }
    const std::size_t base = 2 + kCuboidCount;
    row.slices.slice_indices = windows;
    for (std::size_t i = 0; i < w; ++i) {
      SliceTriplet t{parse_double(f[base + i], line_no),
                     parse_double(f[base + w + i], line_no),
                     parse_double(f[base + 2 * w + i], line_no)};
      row.slices.degenerate.push_back(std::isnan(t.axial) || std::isnan(t.coronal) ||
                                      std::isnan(t.sagittal));
      row.slices.triplets.push_back(t);
    }
    if (parse_count(f[base + 3 * w], line_no) != row.cuboids.n_degenerate() ||
        parse_count(f[base + 3 * w + 1], line_no) != row.slices.n_degenerate()) {
      throw Error(ErrorCode::MalformedCsv, "line " + std::to_string(line_no) +
                                               ": degenerate counts disagree with the values");
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

FeatureTable read_features(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::UnreadableFile, "cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_features(ss.str());
}

} // namespace dhogm
