#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "riccati_spectra/matrix_core.hpp"

namespace riccati_spectra {

/// Malformed or unreadable system file. The message names the line or field.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// On-disk description of a plant: JSON with schema_version "1" and the four
/// matrices as row-major nested arrays.
struct SystemFile {
  std::string schema_version = "1";
  std::optional<std::string> label;
  RealMatrix A, C, W, V;
};

/// Parses the JSON text. `source` only decorates diagnostics. Throws
/// InputError for syntax errors (with line and column), missing or mistyped
/// fields, ragged rows, non-finite numbers and inconsistent dimensions.
SystemFile parse_system_file(const std::string& text, const std::string& source = "<input>");
SystemFile load_system_file(const std::string& path);

std::string to_json_text(const SystemFile& file);

}  // namespace riccati_spectra
