/**
 * @file manifest.cpp
 */

#include "dhogm/manifest.hpp"

#include "dhogm/error.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace dhogm {

std::optional<QualityLabel> label_from_int(int value) {
  if (value == 1) {
    return QualityLabel::Good;
  }
  if (value == 2) {
    return QualityLabel::Poor;
  }
  return std::nullopt;
}

std::vector<std::string> split_csv_line(const std::string &line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    fields.push_back(b == std::string::npos ? std::string{}
                                            : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') {
    fields.emplace_back();
  }
  return fields;
}

std::vector<SubjectRecord> read_manifest(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::UnreadableFile, "cannot open manifest " + path.string());
  }
  const auto base = path.parent_path();
  auto resolve = [&base](const std::string &p) {
    std::filesystem::path fp(p);
    return fp.is_absolute() || base.empty() ? fp : base / fp;
  };

  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::MalformedCsv, path.string() + ": missing header");
  }
  const auto header = split_csv_line(line);
  const std::vector<std::string> expected{"subject_id", "volume_path",
                                          "mask_path", "label"};
  if (header != expected) {
    throw Error(ErrorCode::MalformedCsv,
                path.string() +
                    ": header must be subject_id,volume_path,mask_path,label");
  }

  std::vector<SubjectRecord> records;
  std::set<std::string> seen;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    const auto f = split_csv_line(line);
    if (f.size() != 4 || f[0].empty() || f[1].empty()) {
      throw Error(ErrorCode::MalformedCsv,
                  path.string() + ":" + std::to_string(line_no) +
                      ": expected 4 fields with subject_id and volume_path");
    }
    SubjectRecord r;
    r.subject_id = f[0];
    r.volume_path = resolve(f[1]);
    if (!f[2].empty()) {
      r.mask_path = resolve(f[2]);
    }
    if (!f[3].empty()) {
      int value = 0;
      try {
        std::size_t used = 0;
        value = std::stoi(f[3], &used);
        if (used != f[3].size()) {
          value = 0;
        }
      } catch (const std::exception &) {
        value = 0;
      }
      r.label = label_from_int(value);
      if (!r.label) {
        throw Error(ErrorCode::MalformedCsv,
                    path.string() + ":" + std::to_string(line_no) +
                        ": label must be 1, 2 or empty");
      }
    }
    if (!seen.insert(r.subject_id).second) {
      throw Error(ErrorCode::DuplicateSubject, r.subject_id);
    }
    records.push_back(std::move(r));
  }
  return records;
}

void write_manifest(const std::filesystem::path &path,
                    const std::vector<SubjectRecord> &records) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::UnreadableFile, "cannot create " + path.string());
  }
  out << "subject_id,volume_path,mask_path,label\n";
  for (const auto &r : records) {
    out << r.subject_id << ',' << r.volume_path.string() << ','
        << (r.mask_path ? r.mask_path->string() : std::string{}) << ','
        << (r.label ? std::to_string(to_int(*r.label)) : std::string{}) << '\n';
  }
}

} // namespace dhogm
