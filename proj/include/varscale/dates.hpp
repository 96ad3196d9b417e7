#pragma once

#include <string>
#include <vector>

namespace varscale {

// ISO-8601 calendar date helpers. Dates travel through the engine as
// "YYYY-MM-DD" strings (lexicographic order == chronological order); these
// helpers exist for validation and for synthetic date grids.

bool is_iso_date(const std::string& s);

// Days since 1970-01-01 (civil calendar).
long days_from_civil(int y, int m, int d);
std::string date_from_days(long days);

// n consecutive calendar dates starting at `start` (ISO string).
std::vector<std::string> date_grid(const std::string& start, std::size_t n);

}  // namespace varscale
