#include "fsc/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fsc {

namespace {

std::string where(std::string_view source, std::size_t line) {
  return std::string(source) + ":" + std::to_string(line) + ": ";
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

bool is_missing_label(std::string_view s) { return s.empty() || s == "NA"; }

}  // namespace

CsvTable parse_csv(std::string_view text, std::string_view source) {
  CsvTable table;
  std::vector<std::string> record;
  std::string field;
  std::size_t line = 1;
  std::size_t record_line = 1;
  bool in_quotes = false;
  bool field_started = false;

  auto end_record = [&] {
    record.push_back(std::move(field));
    field.clear();
    const bool blank = record.size() == 1 && record.front().empty();
    if (!blank) {
      if (table.header.empty()) {
        table.header = std::move(record);
      } else {
        if (record.size() != table.header.size()) {
          throw InputError(where(source, record_line) + "expected " + std::to_string(table.header.size()) +
                           " fields, found " + std::to_string(record.size()));
        }
        table.rows.push_back(std::move(record));
        table.lines.push_back(record_line);
      }
    }
    record.clear();
    field_started = false;
  };

  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty()) throw InputError(where(source, line) + "quote inside an unquoted field");
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        record.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        ++line;
        record_line = line;
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) throw InputError(where(source, record_line) + "unterminated quoted field");
  if (field_started || !record.empty()) end_record();
  if (table.header.empty()) throw InputError(std::string(source) + ": empty file");
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) { return parse_csv(slurp(path), path.string()); }

std::string format_double(double v) {
  if (std::isnan(v)) return "NA";
  if (std::isinf(v)) return v > 0 ? "Inf" : "-Inf";
  std::array<char, 32> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

double parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || end != s.data() + s.size()) {
    throw InputError("not a number: '" + std::string(s) + "'");
  }
  return v;
}

LabelledTable parse_labelled_csv(std::string_view text, std::string_view label_col, std::string_view source) {
  const CsvTable t = parse_csv(text, source);
  std::optional<std::size_t> label_index;
  if (!label_col.empty()) {
    for (std::size_t c = 0; c < t.header.size(); ++c) {
      if (trim(t.header[c]) == label_col) label_index = c;
    }
    if (!label_index) {
      std::size_t k = 0;
      const auto [end, ec] = std::from_chars(label_col.data(), label_col.data() + label_col.size(), k);
      if (ec == std::errc() && end == label_col.data() + label_col.size() && k >= 1 && k <= t.header.size()) {
        label_index = k - 1;
      }
    }
    if (!label_index) {
      throw InputError(std::string(source) + ": label column '" + std::string(label_col) + "' not found");
    }
  }

  LabelledTable out;
  std::vector<std::size_t> features;
  for (std::size_t c = 0; c < t.header.size(); ++c) {
    if (label_index && c == *label_index) continue;
    features.push_back(c);
    out.feature_names.emplace_back(trim(t.header[c]));
  }
  if (features.empty()) throw InputError(std::string(source) + ": no feature columns");
  if (t.rows.empty()) throw InputError(std::string(source) + ": no data rows");

  out.x.resize(static_cast<Eigen::Index>(t.rows.size()), static_cast<Eigen::Index>(features.size()));
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    for (std::size_t k = 0; k < features.size(); ++k) {
      const std::string& cell = t.rows[r][features[k]];
      double v;
      try {
        v = parse_double(cell);
      } catch (const InputError&) {
        throw InputError(where(source, t.lines[r]) + "column '" + out.feature_names[k] +
                         "': not a number: '" + cell + "'");
      }
      if (!std::isfinite(v)) {
        throw InputError(where(source, t.lines[r]) + "column '" + out.feature_names[k] + "': non-finite value");
      }
      out.x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = v;
    }
    if (!label_index) {
      out.labels.emplace_back();
      continue;
    }
    const std::string name(trim(t.rows[r][*label_index]));
    if (is_missing_label(name)) {
      out.labels.emplace_back();
      continue;
    }
    std::size_t cls = 0;
    while (cls < out.class_names.size() && out.class_names[cls] != name) ++cls;
    if (cls == out.class_names.size()) out.class_names.push_back(name);
    out.labels.emplace_back(static_cast<int>(cls));
  }
  return out;
}

LabelledTable read_labelled_csv(const std::filesystem::path& path, std::string_view label_col) {
  return parse_labelled_csv(slurp(path), label_col, path.string());
}

DataSet to_dataset(const LabelledTable& t, std::vector<Eigen::Index>* source_rows) {
  std::vector<Eigen::Index> lab, unl;
  for (std::size_t r = 0; r < t.labels.size(); ++r) {
    (t.labels[r] ? lab : unl).push_back(static_cast<Eigen::Index>(r));
  }
  Matrix lx(static_cast<Eigen::Index>(lab.size()), t.x.cols());
  Matrix ux(static_cast<Eigen::Index>(unl.size()), t.x.cols());
  std::vector<int> labels;
  for (std::size_t i = 0; i < lab.size(); ++i) {
    lx.row(static_cast<Eigen::Index>(i)) = t.x.row(lab[i]);
    labels.push_back(*t.labels[static_cast<std::size_t>(lab[i])]);
  }
  for (std::size_t i = 0; i < unl.size(); ++i) ux.row(static_cast<Eigen::Index>(i)) = t.x.row(unl[i]);
  if (source_rows) {
    *source_rows = lab;
    source_rows->insert(source_rows->end(), unl.begin(), unl.end());
  }
  const int groups = std::max<int>(1, static_cast<int>(t.class_names.size()));
  return DataSet::from_labels(lx, labels, groups, ux);
}

LabelledSample to_sample(const LabelledTable& t) {
  LabelledSample s;
  s.x = t.x;
  s.groups = static_cast<int>(t.class_names.size());
  for (std::size_t r = 0; r < t.labels.size(); ++r) {
    if (!t.labels[r]) throw InputError("row " + std::to_string(r + 1) + " has no label; every row needs one here");
    s.truth.push_back(*t.labels[r]);
  }
  return s;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  auto line = [&out](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out << ',';
      out << csv_escape(fields[i]);
    }
    out << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  if (!out) throw InputError("error writing " + path.string());
}

namespace {

nlohmann::json vector_json(const Vector& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Vector json_vector(const nlohmann::json& a) {
  Vector v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<Eigen::Index>(i)) = a.at(i).get<double>();
  return v;
}

}  // namespace

nlohmann::json model_to_json(const MixtureModel& model, const WeightConfig& weight) {
  nlohmann::json j;
  j["version"] = "fsc-model/1";
  j["family"] = model.family == Family::Gaussian ? "gaussian" : "t";
  j["structure"] = model.structure.code();
  j["groups"] = model.groups();
  j["dim"] = model.dim();
  j["alpha"] = weight.alpha;
  j["variant"] = weight.variant == LikelihoodVariant::Original ? "original" : "alt";
  j["pi"] = vector_json(model.weights);
  j["mu"] = nlohmann::json::array();
  j["sigma"] = nlohmann::json::array();
  for (int g = 0; g < model.groups(); ++g) {
    j["mu"].push_back(vector_json(model.locations[static_cast<std::size_t>(g)]));
    const Matrix& s = model.scales[static_cast<std::size_t>(g)];
    nlohmann::json flat = nlohmann::json::array();
    for (Eigen::Index r = 0; r < s.rows(); ++r) {
      for (Eigen::Index c = 0; c < s.cols(); ++c) flat.push_back(s(r, c));
    }
    j["sigma"].push_back(flat);
  }
  j["nu"] = model.family == Family::StudentT ? vector_json(model.dof) : nlohmann::json::array();
  return j;
}

MixtureModel model_from_json(const nlohmann::json& j, WeightConfig* weight) {
  try {
    if (j.at("version").get<std::string>() != "fsc-model/1") throw InputError("unsupported model version");
    MixtureModel m;
    const std::string family = j.at("family").get<std::string>();
    if (family != "gaussian" && family != "t") throw InputError("unknown family '" + family + "'");
    m.family = family == "t" ? Family::StudentT : Family::Gaussian;
    m.structure = CovarianceStructure::parse(j.at("structure").get<std::string>());
    m.weights = json_vector(j.at("pi"));
    const auto p = j.at("dim").get<Eigen::Index>();
    for (const auto& mu : j.at("mu")) m.locations.push_back(json_vector(mu));
    for (const auto& flat : j.at("sigma")) {
      if (static_cast<Eigen::Index>(flat.size()) != p * p) throw InputError("sigma has the wrong size");
      Matrix s(p, p);
      for (Eigen::Index r = 0; r < p; ++r) {
        for (Eigen::Index c = 0; c < p; ++c) s(r, c) = flat.at(static_cast<std::size_t>(r * p + c)).get<double>();
      }
      m.scales.push_back(s);
    }
    if (m.family == Family::StudentT) m.dof = json_vector(j.at("nu"));
    if (weight) {
      weight->alpha = j.at("alpha").get<double>();
      weight->variant = j.at("variant").get<std::string>() == "alt" ? LikelihoodVariant::Alternative
                                                                     : LikelihoodVariant::Original;
    }
    m.validate();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed model JSON: ") + e.what());
  }
}

void write_partition_csv(const std::filesystem::path& path, const Partition& partition) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(partition.size());
  for (int g : partition) rows.push_back({std::to_string(g + 1)});
  write_csv(path, {"group"}, rows);
}

Partition read_partition_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  std::size_t col = 0;
  if (t.header.size() > 1) {
    bool found = false;
    for (std::size_t c = 0; c < t.header.size(); ++c) {
      if (trim(t.header[c]) == "group") {
        col = c;
        found = true;
      }
    }
    if (!found) throw InputError(path.string() + ": no 'group' column");
  }
  Partition out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const std::string_view cell = trim(t.rows[r][col]);
    int g = 0;
    const auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), g);
    if (ec != std::errc() || end != cell.data() + cell.size() || g < 1) {
      throw InputError(where(path.string(), t.lines[r]) + "group must be a positive integer, got '" +
                       std::string(cell) + "'");
    }
    out.push_back(g - 1);
  }
  return out;
}

std::string fnv1a_digest(const std::filesystem::path& path) {
  const std::string data = slurp(path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kHex[h & 0xF];
    h >>= 4;
  }
  return out;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace fsc
