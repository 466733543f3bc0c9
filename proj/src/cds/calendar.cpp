#include "ccpwf/cds/calendar.hpp"

#include <cstdio>

#include "ccpwf/errors.hpp"

namespace ccpwf::cds {

using namespace std::chrono;

Date make_date(int year, unsigned month, unsigned day) {
  const year_month_day ymd{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}};
  if (!ymd.ok()) throw std::domain_error("invalid calendar date");
  return sys_days{ymd};
}

Date parse_date(const std::string& s) {
  int y = 0;
  unsigned m = 0, d = 0;
  int consumed = 0;
  if (std::sscanf(s.c_str(), "%4d-%2u-%2u%n", &y, &m, &d, &consumed) != 3 ||
      consumed != static_cast<int>(s.size()))
    throw ConfigError("malformed date '" + s + "' (expected YYYY-MM-DD)");
  const year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!ymd.ok()) throw ConfigError("invalid date '" + s + "'");
  return sys_days{ymd};
}

std::string format_date(Date d) {
  const year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

bool is_business_day(Date d) {
  const weekday w{d};
  return w != Saturday && w != Sunday;
}

Date add_business_days(Date d, int n) {
  const int step = n >= 0 ? 1 : -1;
  for (int left = n >= 0 ? n : -n; left > 0;) {
    d += days{step};
    if (is_business_day(d)) --left;
  }
  return d;
}

int business_days_between(Date a, Date b) {
  if (b < a) return -business_days_between(b, a);
  int n = 0;
  for (Date d = a + days{1}; d <= b; d += days{1})
    if (is_business_day(d)) ++n;
  return n;
}

bool is_imm_date(Date d) {
  const year_month_day ymd{d};
  const unsigned m = static_cast<unsigned>(ymd.month());
  return ymd.day() == std::chrono::day{20} && m % 3 == 0;
}

std::vector<Date> imm_dates(Date from, Date to) {
  std::vector<Date> out;
  for (Date d = is_imm_date(from) ? from : next_imm_after(from); d <= to; d = next_imm_after(d)) out.push_back(d);
  return out;
}

Date next_imm_after(Date d) {
  const year_month_day ymd{d};
  int y = static_cast<int>(ymd.year());
  unsigned m = static_cast<unsigned>(ymd.month());
  unsigned q = (m + 2) / 3 * 3;  // quarter-end month on or after m
  Date cand = make_date(y, q, 20);
  if (cand > d) return cand;
  q += 3;
  if (q > 12) {
    q -= 12;
    ++y;
  }
  return make_date(y, q, 20);
}

Date last_imm_on_or_before(Date d) {
  if (is_imm_date(d)) return d;
  const Date next = next_imm_after(d);
  const year_month_day ymd{next};
  int y = static_cast<int>(ymd.year());
  int m = static_cast<int>(static_cast<unsigned>(ymd.month())) - 3;
  if (m <= 0) {
    m += 12;
    --y;
  }
  return make_date(y, static_cast<unsigned>(m), 20);
}

}  // namespace ccpwf::cds
