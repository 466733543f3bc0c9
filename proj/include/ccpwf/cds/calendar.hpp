#pragma once

#include <chrono>
#include <string>
#include <vector>

namespace ccpwf::cds {

using Date = std::chrono::sys_days;

Date make_date(int year, unsigned month, unsigned day);
// ISO "YYYY-MM-DD"; throws ConfigError otherwise.
Date parse_date(const std::string& s);
std::string format_date(Date d);

// Weekday calendar: Monday to Friday, no holidays.
bool is_business_day(Date d);
// n-th business day after d (n > 0) or before d (n < 0); d itself for n = 0.
Date add_business_days(Date d, int n);
// Number of business days in (a, b]; negative with the roles swapped if b < a.
int business_days_between(Date a, Date b);

// Quarterly IMM dates: the 20th of March, June, September and December,
// taken as nominal dates even when they fall on a weekend.
bool is_imm_date(Date d);
std::vector<Date> imm_dates(Date from, Date to);  // inclusive range
Date next_imm_after(Date d);                      // strictly after
Date last_imm_on_or_before(Date d);

}  // namespace ccpwf::cds
