#include "ccpwf/io/csv.hpp"

#include <charconv>
#include <fstream>

#include "ccpwf/errors.hpp"

namespace ccpwf::io {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

NumericTable parse_numeric_csv(std::istream& in, const std::string& source) {
  NumericTable table;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::vector<double> row;
    std::size_t pos = 0;
    while (true) {
      const auto comma = t.find(',', pos);
      const std::string field = trim(std::string_view(t).substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
      double v = 0.0;
      const auto* first = field.data();
      const auto* last = field.data() + field.size();
      if (!field.empty() && *first == '+') ++first;
      const auto [ptr, ec] = std::from_chars(first, last, v);
      if (field.empty() || ec != std::errc() || ptr != last)
        throw ConfigError(source + ":" + std::to_string(line_no) + ": not a number: '" + field + "'");
      row.push_back(v);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (!table.empty() && row.size() != table.front().size())
      throw ConfigError(source + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(table.front().size()) + " fields, got " + std::to_string(row.size()));
    table.push_back(std::move(row));
  }
  if (table.empty()) throw ConfigError(source + ": no data rows");
  return table;
}

NumericTable read_numeric_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  return parse_numeric_csv(in, path.string());
}

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace ccpwf::io
