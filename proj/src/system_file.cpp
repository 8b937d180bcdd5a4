#include "riccati_spectra/system_file.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace riccati_spectra {

namespace {

using nlohmann::ordered_json;

std::pair<std::size_t, std::size_t> line_and_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

RealMatrix read_matrix(const ordered_json& doc, const char* name, const std::string& source) {
  const std::string where = source + ": field '" + name + "'";
  if (!doc.contains(name)) throw InputError(where + " is missing");
  const ordered_json& rows = doc.at(name);
  if (!rows.is_array() || rows.empty()) throw InputError(where + " must be a non-empty array of rows");
  std::size_t cols = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const ordered_json& row = rows[i];
    const std::string at_row = where + " row " + std::to_string(i);
    if (!row.is_array() || row.empty()) throw InputError(at_row + " must be a non-empty array of numbers");
    if (i == 0) cols = row.size();
    if (row.size() != cols) {
      throw InputError(at_row + " has " + std::to_string(row.size()) + " entries, expected " + std::to_string(cols));
    }
  }
  RealMatrix M(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const ordered_json& v = rows[i][j];
      if (!v.is_number()) {
        throw InputError(where + " entry [" + std::to_string(i) + "][" + std::to_string(j) + "] is not a number");
      }
      const double x = v.get<double>();
      if (!std::isfinite(x)) {
        throw InputError(where + " entry [" + std::to_string(i) + "][" + std::to_string(j) + "] is not finite");
      }
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = x;
    }
  }
  return M;
}

std::string shape(const RealMatrix& M) { return std::to_string(M.rows()) + "x" + std::to_string(M.cols()); }

ordered_json matrix_json(const RealMatrix& M) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

SystemFile parse_system_file(const std::string& text, const std::string& source) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    const auto [line, column] = line_and_column(text, e.byte > 0 ? e.byte - 1 : 0);
    throw InputError(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": invalid JSON (" +
                     e.what() + ")");
  }
  if (!doc.is_object()) throw InputError(source + ": top level must be a JSON object");

  SystemFile file;
  if (!doc.contains("schema_version")) throw InputError(source + ": field 'schema_version' is missing");
  if (!doc.at("schema_version").is_string()) throw InputError(source + ": field 'schema_version' must be a string");
  file.schema_version = doc.at("schema_version").get<std::string>();
  if (file.schema_version != "1") {
    throw InputError(source + ": unsupported schema_version '" + file.schema_version + "' (expected \"1\")");
  }
  if (doc.contains("label")) {
    if (!doc.at("label").is_string()) throw InputError(source + ": field 'label' must be a string");
    file.label = doc.at("label").get<std::string>();
  }
  file.A = read_matrix(doc, "A", source);
  file.C = read_matrix(doc, "C", source);
  file.W = read_matrix(doc, "W", source);
  file.V = read_matrix(doc, "V", source);

  const auto m = file.A.rows();
  const auto l = file.C.rows();
  if (file.A.cols() != m) throw InputError(source + ": field 'A' must be square, got " + shape(file.A));
  if (file.C.cols() != m) {
    throw InputError(source + ": field 'C' must have " + std::to_string(m) + " columns, got " + shape(file.C));
  }
  if (file.W.rows() != m || file.W.cols() != m) {
    throw InputError(source + ": field 'W' must be " + std::to_string(m) + "x" + std::to_string(m) + ", got " +
                     shape(file.W));
  }
  if (file.V.rows() != l || file.V.cols() != l) {
    throw InputError(source + ": field 'V' must be " + std::to_string(l) + "x" + std::to_string(l) + ", got " +
                     shape(file.V));
  }
  return file;
}

SystemFile load_system_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_system_file(buffer.str(), path);
}

std::string to_json_text(const SystemFile& file) {
  ordered_json doc;
  doc["schema_version"] = file.schema_version;
  if (file.label) doc["label"] = *file.label;
  doc["A"] = matrix_json(file.A);
  doc["C"] = matrix_json(file.C);
  doc["W"] = matrix_json(file.W);
  doc["V"] = matrix_json(file.V);
  return doc.dump(2) + "\n";
}

}  // namespace riccati_spectra
