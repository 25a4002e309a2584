#pragma once

// File formats shared by the command-line tool: CSV (canonical; '#' lines
// carry metadata as key=value) and a JSON object form for machine readers.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "dipolefield/compare.hpp"
#include "dipolefield/limit_dist.hpp"
#include "dipolefield/montecarlo.hpp"

namespace dipolefield::io {

enum class FileFormat { kCsv, kJson };

FileFormat parse_file_format(std::string_view text);
std::string_view to_string(FileFormat format) noexcept;

/// Malformed or schema-incompatible input; the message names the column,
/// field or metadata key at fault.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string format_curve(const DistributionCurve& curve, FileFormat format);
std::string format_histogram(const FieldHistogram& histogram, FileFormat format);
std::string format_report(const ComparisonReport& report, FileFormat format);

/// Both parsers accept either format (a leading '{' selects JSON).
DistributionCurve parse_curve(std::string_view text);
FieldHistogram parse_histogram(std::string_view text);

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace dipolefield::io
