#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

namespace ccpwf::io {

using NumericTable = std::vector<std::vector<double>>;

// Comma-separated numbers, one row per line. Blank lines and lines starting
// with '#' are skipped. Throws ConfigError naming the line on malformed
// fields or ragged rows.
NumericTable parse_numeric_csv(std::istream& in, const std::string& source = "<stream>");
NumericTable read_numeric_csv(const std::filesystem::path& path);

// Shortest round-trip representation.
std::string format_double(double v);

}  // namespace ccpwf::io
