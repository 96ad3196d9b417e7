#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace varscale {

// Ordered (date, price) observations at daily frequency. Dates strictly
// increasing, prices strictly positive, length >= 2.
struct PriceSeries {
    std::vector<std::string> dates;
    std::vector<double> prices;

    std::size_t size() const { return prices.size(); }
};

// Log returns at horizon h, daily-stepped (overlapping when h > 1). Entry i
// is the return ending at dates[i].
struct ReturnSeries {
    int horizon = 1;
    std::vector<std::string> dates;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
};

struct StatsSummary {
    std::size_t n = 0;
    double min = 0.0, max = 0.0, mean = 0.0, sd = 0.0;
    double skewness = 0.0;
    double kurtosis = 0.0;  // non-excess; normal ~ 3
};

struct TestResult {
    double statistic = 0.0;
    double df = 0.0;
    double p_value = 0.0;
    bool reject = false;
    double significance = 0.0;
};

// Parse `date,price` delimited text (ISO-8601 dates, decimal-point numerals).
// Rows are sorted by date on output; malformed rows, non-positive prices and
// duplicate dates raise DataError with the offending line number.
PriceSeries load_prices(std::istream& in);
PriceSeries load_prices_file(const std::string& path);

// r_{t,h} = ln(K_t / K_{t-h}); output length = n - h.
ReturnSeries log_returns(const PriceSeries& prices, int h);

// Sample mean/sd (n-1 divisor), skewness m3/m2^1.5 and non-excess kurtosis
// m4/m2^2 with population (n) central moments.
StatsSummary descriptive_stats(std::span<const double> returns);

// JB = n (S^2/6 + (K-3)^2/24), chi-square with 2 df.
double jarque_bera_statistic(std::size_t n, double skewness, double kurtosis);
TestResult jarque_bera(std::span<const double> returns, double significance);

// Two-sided t-test of mean 0, Student-t with n-1 df.
TestResult mean_zero_ttest(std::span<const double> returns, double significance);

}  // namespace varscale
