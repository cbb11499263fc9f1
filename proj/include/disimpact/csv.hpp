#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace disimpact::csv {

using Row = std::vector<std::string>;

struct Table {
  Row header;
  std::vector<Row> rows;
  /// 1-based source line number for each row, for diagnostics.
  std::vector<std::size_t> line_numbers;
};

/// Splits one CSV record. Supports double-quoted fields with "" escapes; no
/// embedded newlines.
Row split_line(std::string_view line);

/// Reads a headed CSV file. Blank lines are skipped; a trailing '\r' is
/// stripped. Throws Error(FileNotFound) or Error(MalformedCsv) when a row's
/// width differs from the header's.
Table read_file(const std::filesystem::path& path);

/// Throws Error(MalformedCsv) unless `table.header` equals `expected`.
void require_header(const Table& table, const std::vector<std::string_view>& expected,
                    std::string_view what);

/// Quotes a field if it contains a comma, quote or leading/trailing space.
std::string escape(std::string_view field);

std::string join(const Row& fields);

/// Fixed 9-decimal rendering used for every exported real. Negative zero
/// prints as "0.000000000".
std::string format_real(double x);

}  // namespace disimpact::csv
