#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fsc/simulation.hpp"

namespace fsc {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  /// 1-based source line of each row.
  std::vector<std::size_t> lines;
};

/// RFC-4180 style: quoted fields, doubled quotes, CRLF or LF endings.
/// Errors are InputError prefixed with "source:line:".
CsvTable parse_csv(std::string_view text, std::string_view source = "<input>");
CsvTable read_csv(const std::filesystem::path& path);

/// Numeric features plus an optional class label per row. An empty or "NA"
/// label marks an unlabelled row.
struct LabelledTable {
  Matrix x;
  std::vector<std::optional<int>> labels;
  std::vector<std::string> feature_names;
  /// Distinct class names in order of first appearance; labels index this.
  std::vector<std::string> class_names;
};

/// `label_col` is a header name or a 1-based column number; empty means no
/// label column (every row unlabelled).
LabelledTable read_labelled_csv(const std::filesystem::path& path, std::string_view label_col);
LabelledTable parse_labelled_csv(std::string_view text, std::string_view label_col,
                                 std::string_view source = "<input>");

/// Labelled rows first; `source_rows` receives the table row of each DataSet row.
DataSet to_dataset(const LabelledTable& t, std::vector<Eigen::Index>* source_rows = nullptr);

/// Requires every row to be labelled.
LabelledSample to_sample(const LabelledTable& t);

/// Shortest round-trip decimal form, locale independent; "NA" for NaN.
std::string format_double(double v);
double parse_double(std::string_view s);

std::string csv_escape(std::string_view field);
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

/// Schema "fsc-model/1".
nlohmann::json model_to_json(const MixtureModel& model, const WeightConfig& weight);
MixtureModel model_from_json(const nlohmann::json& j, WeightConfig* weight = nullptr);

/// One 1-based group per row, header "group".
void write_partition_csv(const std::filesystem::path& path, const Partition& partition);
/// Accepts a single column or uses the column named "group"; returns 0-based groups.
Partition read_partition_csv(const std::filesystem::path& path);

/// 64-bit FNV-1a of the file contents as 16 hex digits.
std::string fnv1a_digest(const std::filesystem::path& path);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace fsc
