#include "ccpwf/migration/matrix_io.hpp"

#include "ccpwf/errors.hpp"
#include "ccpwf/io/csv.hpp"

namespace ccpwf::migration {
namespace {

RatingTransitionMatrix from_rows(const std::vector<std::vector<double>>& rows, const std::string& source) {
  const std::size_t k = rows.size();
  std::vector<double> flat;
  flat.reserve(k * k);
  for (const auto& r : rows) {
    if (r.size() != k)
      throw ConfigError(source + ": transition matrix must be square, got a row of " +
                        std::to_string(r.size()) + " entries for " + std::to_string(k) + " rows");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  try {
    return RatingTransitionMatrix(static_cast<int>(k), std::move(flat));
  } catch (const std::domain_error& e) {
    throw ConfigError(source + ": " + e.what());
  }
}

}  // namespace

RatingTransitionMatrix read_matrix_csv(const std::filesystem::path& path) {
  return from_rows(io::read_numeric_csv(path), path.string());
}

void write_matrix_csv(std::ostream& out, const RatingTransitionMatrix& m) {
  for (int x = 1; x <= m.size(); ++x) {
    for (int y = 1; y <= m.size(); ++y) {
      if (y > 1) out << ',';
      out << io::format_double(m(x, y));
    }
    out << '\n';
  }
}

RatingTransitionMatrix matrix_from_json(const nlohmann::json& j) {
  if (j.is_object() && j.contains("family")) {
    const auto& f = j.at("family");
    RatingFamily fam;
    fam.rating_count = f.value("rating_count", fam.rating_count);
    fam.up = f.value("up", fam.up);
    fam.down = f.value("down", fam.down);
    if (f.contains("default_rate")) fam.default_rate = f.at("default_rate").get<std::vector<double>>();
    try {
      return fam.annual_matrix();
    } catch (const std::domain_error& e) {
      throw ConfigError(std::string("matrix family: ") + e.what());
    }
  }
  if (!j.is_array()) throw ConfigError("transition matrix must be an array of rows or a family object");
  return from_rows(j.get<std::vector<std::vector<double>>>(), "transition matrix");
}

nlohmann::json to_json(const RatingTransitionMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int x = 1; x <= m.size(); ++x) {
    const auto r = m.row(x);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  return rows;
}

}  // namespace ccpwf::migration
