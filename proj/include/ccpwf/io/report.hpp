#pragma once

#include <ostream>
#include <vector>

#include "ccpwf/migration/transition_matrix.hpp"
#include "ccpwf/prob/discrete_distribution.hpp"
#include "ccpwf/simulation/study.hpp"
#include "json.hpp"

namespace ccpwf::io {

// Non-finite numbers serialize as null.
nlohmann::json to_json(const sim::ImStudyResult& r);
nlohmann::json to_json(const sim::DfScenario& s);
nlohmann::json to_json(const sim::StudyResult& r);
nlohmann::json to_json(const std::vector<sim::ScalingRow>& rows);

// portfolio,alpha,measure,method,im
void write_im_csv(std::ostream& out, const sim::ImStudyResult& r);
// value,prob
void write_distribution_csv(std::ostream& out, const prob::DiscreteDistribution& d);
// contract,survival_value,survival_prob,default_value,default_prob
void write_contract_laws_csv(std::ostream& out, const std::vector<cds::ExposureLaw>& laws);
// DF/IM with one row per alpha and one column per beta.
void write_ratio_grid_csv(std::ostream& out, const sim::DfScenario& s);
// dependence,initial,alpha,beta,cover1,cover2,cover_all,self_cover1,self_cover2
void write_cover_csv(std::ostream& out, const sim::StudyResult& r);
// One row per member per scenario cell.
void write_member_csv(std::ostream& out, const sim::StudyResult& r);
void write_scaling_csv(std::ostream& out, const std::vector<sim::ScalingRow>& rows);

}  // namespace ccpwf::io
