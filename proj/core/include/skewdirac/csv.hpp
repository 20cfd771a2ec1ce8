#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace skewdirac::csv {

/// 17 significant digits, '.' decimal point, independent of the C++ locale.
std::string format(double value);

/// Joins already-formatted fields with ','.
std::string join(const std::vector<std::string>& fields);

struct Table {
  std::vector<std::string> header;  // empty when the file had no header line
  std::vector<std::vector<double>> rows;
};

/// Reads a numeric CSV. Blank lines and lines starting with '#' are skipped;
/// a first line that does not parse as numbers is taken as the header.
Table read(const std::filesystem::path& path);
Table parse(std::string_view text);

void write(const std::filesystem::path& path, const std::vector<std::string>& header,
           const std::vector<std::vector<double>>& rows);
void write(std::ostream& out, const std::vector<std::string>& header,
           const std::vector<std::vector<double>>& rows);

}  // namespace skewdirac::csv
