#include "ccpwf/io/report.hpp"

#include <algorithm>
#include <cmath>

#include "ccpwf/io/csv.hpp"

namespace ccpwf::io {

using nlohmann::json;

namespace {

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json nums(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

std::string csv_num(double v) { return std::isfinite(v) ? format_double(v) : std::string(); }

}  // namespace

json to_json(const sim::ImStudyResult& r) {
  json j;
  j["contract_laws"] = json::array();
  for (const auto& l : r.contract_laws)
    j["contract_laws"].push_back({{"survival_value", l.survival_value},
                                  {"survival_prob", l.survival_prob},
                                  {"default_value", l.default_value},
                                  {"default_prob", l.default_prob}});
  j["portfolios"] = json::array();
  for (const auto& p : r.portfolios) {
    json steps = json::array();
    for (const auto& s : p.var_plateaus) steps.push_back({{"alpha_from", s.alpha_from}, {"alpha_to", s.alpha_to}, {"var", s.value}});
    j["portfolios"].push_back({{"name", p.name},
                               {"positions", p.positions},
                               {"exposure_law", prob::to_json(p.exposure_law)},
                               {"loss_law", prob::to_json(p.loss_law)},
                               {"var_plateaus", steps}});
  }
  j["rows"] = json::array();
  for (const auto& row : r.rows)
    j["rows"].push_back({{"portfolio", row.portfolio},
                         {"alpha", row.alpha},
                         {"measure", prob::to_string(row.measure)},
                         {"method", waterfall::to_string(row.method)},
                         {"im", num(row.im)}});
  return j;
}

json to_json(const sim::DfScenario& s) {
  json cells = json::array();
  for (const auto& c : s.cells) {
    cells.push_back({{"alpha", c.alpha},
                     {"beta", c.beta},
                     {"im", nums(c.im)},
                     {"im_total", num(c.im_total)},
                     {"df_total", num(c.df_total)},
                     {"df_se", num(c.df_se)},
                     {"df_im_ratio", num(c.ratio)},
                     {"df_im_ratio_se", num(c.ratio_se)},
                     {"df_allocation", nums(c.df_allocation)},
                     {"covers",
                      {{"cover1", c.covers.cover1},
                       {"cover2", c.covers.cover2},
                       {"cover_all", c.covers.cover_all},
                       {"self_cover1", c.covers.self_cover1},
                       {"self_cover2", c.covers.self_cover2}}},
                     {"c1", num(c.c1)},
                     {"c2", num(c.c2)},
                     {"c1_im_ratio", num(c.c1_ratio)},
                     {"c2_im_ratio", num(c.c2_ratio)},
                     {"mean_effective_loss", num(c.mean_effective_loss)},
                     {"prob_effective_loss", num(c.prob_effective_loss)},
                     {"mean_udf", nums(c.mean_udf)},
                     {"diagnostics",
                      {{"allocation_error", num(c.allocation_error)},
                       {"udf_error", num(c.udf_error)},
                       {"exposed_fraction", num(c.exposed_fraction)}}}});
  }
  return {{"dependence", migration::to_string(s.dependence)},
          {"initial", s.initial},
          {"members", s.members},
          {"samples", s.samples},
          {"member_default_fraction", num(s.member_default_fraction)},
          {"matched_book_error", num(s.matched_book_error)},
          {"ratio_nonincreasing_in_beta", s.ratio_nonincreasing_in_beta},
          {"cells", cells}};
}

json to_json(const sim::StudyResult& r) {
  json a = json::array();
  for (const auto& s : r.scenarios) a.push_back(to_json(s));
  return {{"scenarios", a}};
}

json to_json(const std::vector<sim::ScalingRow>& rows) {
  json a = json::array();
  for (const auto& r : rows)
    a.push_back({{"members", r.members},
                 {"im_total", num(r.im_total)},
                 {"df_total", num(r.df_total)},
                 {"df_se", num(r.df_se)},
                 {"df_im_ratio", num(r.ratio)},
                 {"c1", num(r.c1)},
                 {"c2", num(r.c2)},
                 {"c1_im_ratio", num(r.c1_ratio)},
                 {"c2_im_ratio", num(r.c2_ratio)}});
  return a;
}

void write_im_csv(std::ostream& out, const sim::ImStudyResult& r) {
  out << "portfolio,alpha,measure,method,im\n";
  for (const auto& row : r.rows)
    out << row.portfolio << ',' << format_double(row.alpha) << ',' << prob::to_string(row.measure) << ','
        << waterfall::to_string(row.method) << ',' << csv_num(row.im) << '\n';
}

void write_distribution_csv(std::ostream& out, const prob::DiscreteDistribution& d) {
  out << "value,prob\n";
  for (const auto& a : d.atoms()) out << format_double(a.value) << ',' << format_double(a.prob) << '\n';
}

void write_contract_laws_csv(std::ostream& out, const std::vector<cds::ExposureLaw>& laws) {
  out << "contract,survival_value,survival_prob,default_value,default_prob\n";
  for (std::size_t j = 0; j < laws.size(); ++j)
    out << j + 1 << ',' << format_double(laws[j].survival_value) << ',' << format_double(laws[j].survival_prob)
        << ',' << format_double(laws[j].default_value) << ',' << format_double(laws[j].default_prob) << '\n';
}

void write_ratio_grid_csv(std::ostream& out, const sim::DfScenario& s) {
  std::vector<double> alphas, betas;
  for (const auto& c : s.cells) {
    if (std::find(alphas.begin(), alphas.end(), c.alpha) == alphas.end()) alphas.push_back(c.alpha);
    if (std::find(betas.begin(), betas.end(), c.beta) == betas.end()) betas.push_back(c.beta);
  }
  out << "alpha";
  for (double b : betas) out << ",beta=" << format_double(b);
  out << '\n';
  for (double a : alphas) {
    out << format_double(a);
    for (double b : betas) {
      out << ',';
      for (const auto& c : s.cells)
        if (c.alpha == a && c.beta == b) out << csv_num(c.ratio);
    }
    out << '\n';
  }
}

void write_cover_csv(std::ostream& out, const sim::StudyResult& r) {
  out << "dependence,initial,alpha,beta,cover1,cover2,cover_all,self_cover1,self_cover2\n";
  for (const auto& s : r.scenarios)
    for (const auto& c : s.cells)
      out << migration::to_string(s.dependence) << ',' << s.initial << ',' << format_double(c.alpha) << ','
          << format_double(c.beta) << ',' << format_double(c.covers.cover1) << ',' << format_double(c.covers.cover2)
          << ',' << format_double(c.covers.cover_all) << ',' << format_double(c.covers.self_cover1) << ','
          << format_double(c.covers.self_cover2) << '\n';
}

void write_member_csv(std::ostream& out, const sim::StudyResult& r) {
  out << "dependence,initial,alpha,beta,member,im,df,df_im_ratio,mean_udf\n";
  for (const auto& s : r.scenarios)
    for (const auto& c : s.cells)
      for (std::size_t i = 0; i < c.im.size(); ++i)
        out << migration::to_string(s.dependence) << ',' << s.initial << ',' << format_double(c.alpha) << ','
            << format_double(c.beta) << ',' << i + 1 << ',' << csv_num(c.im[i]) << ','
            << csv_num(c.df_allocation[i]) << ','
            << (c.im[i] > 0.0 ? csv_num(c.df_allocation[i] / c.im[i]) : std::string()) << ','
            << csv_num(c.mean_udf[i]) << '\n';
}

void write_scaling_csv(std::ostream& out, const std::vector<sim::ScalingRow>& rows) {
  out << "members,im_total,df_total,df_se,df_im_ratio,c1,c2,c1_im_ratio,c2_im_ratio\n";
  for (const auto& r : rows)
    out << r.members << ',' << csv_num(r.im_total) << ',' << csv_num(r.df_total) << ',' << csv_num(r.df_se) << ','
        << csv_num(r.ratio) << ',' << csv_num(r.c1) << ',' << csv_num(r.c2) << ',' << csv_num(r.c1_ratio) << ','
        << csv_num(r.c2_ratio) << '\n';
}

}  // namespace ccpwf::io
