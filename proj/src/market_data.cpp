#include "varscale/market_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <sstream>

#include "varscale/dates.hpp"
#include "varscale/errors.hpp"
#include "varscale/statfun.hpp"

namespace varscale {

namespace {

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

[[noreturn]] void bad_row(std::size_t line, const std::string& what) {
    throw DataError("line " + std::to_string(line) + ": " + what);
}

double parse_price(const std::string& text, std::size_t line) {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) bad_row(line, "malformed price '" + text + "'");
    return value;
}

double sample_mean(std::span<const double> x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_sd(std::span<const double> x, double mean) {
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / (static_cast<double>(x.size()) - 1.0));
}

}  // namespace

PriceSeries load_prices(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty input");
    if (strip_cr(line) != "date,price") {
        throw DataError("line 1: expected header 'date,price'");
    }

    PriceSeries series;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) bad_row(lineno, "expected 'date,price'");
        std::string date = line.substr(0, comma);
        std::string price_text = line.substr(comma + 1);
        if (!is_iso_date(date)) bad_row(lineno, "malformed date '" + date + "'");
        const double price = parse_price(price_text, lineno);
        if (!(price > 0.0)) bad_row(lineno, "non-positive price " + price_text);
        series.dates.push_back(std::move(date));
        series.prices.push_back(price);
    }
    if (series.size() < 2) throw DataError("price series needs at least 2 observations");

    // Sort by date (ISO strings order lexicographically), then reject duplicates.
    std::vector<std::size_t> idx(series.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return series.dates[a] < series.dates[b];
    });
    PriceSeries sorted;
    sorted.dates.reserve(series.size());
    sorted.prices.reserve(series.size());
    for (std::size_t i : idx) {
        if (!sorted.dates.empty() && sorted.dates.back() == series.dates[i]) {
            throw DataError("duplicate date " + series.dates[i]);
        }
        sorted.dates.push_back(series.dates[i]);
        sorted.prices.push_back(series.prices[i]);
    }
    return sorted;
}

PriceSeries load_prices_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    try {
        return load_prices(in);
    } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
}

ReturnSeries log_returns(const PriceSeries& prices, int h) {
    if (h < 1) throw std::invalid_argument("log_returns: horizon must be >= 1");
    if (prices.size() <= static_cast<std::size_t>(h)) {
        throw DataError("log_returns: horizon >= series length");
    }
    ReturnSeries out;
    out.horizon = h;
    const std::size_t n = prices.size();
    out.dates.assign(prices.dates.begin() + h, prices.dates.end());
    out.values.reserve(n - h);
    for (std::size_t t = h; t < n; ++t) {
        out.values.push_back(std::log(prices.prices[t] / prices.prices[t - h]));
    }
    return out;
}

StatsSummary descriptive_stats(std::span<const double> returns) {
    if (returns.size() < 4) throw DataError("descriptive_stats: need at least 4 observations");
    const double n = static_cast<double>(returns.size());
    StatsSummary s;
    s.n = returns.size();
    s.mean = sample_mean(returns);
    s.min = *std::min_element(returns.begin(), returns.end());
    s.max = *std::max_element(returns.begin(), returns.end());

    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : returns) {
        const double d = v - s.mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    s.sd = std::sqrt(m2 / (n - 1.0));
    m2 /= n;
    m3 /= n;
    m4 /= n;
    // Relative floor so a constant series is caught even when cancellation
    // leaves a nonzero residue.
    if (!(m2 > std::max(1e-300, s.mean * s.mean * 1e-24))) {
        throw DataError("descriptive_stats: constant series, moments undefined");
    }
    s.skewness = m3 / std::pow(m2, 1.5);
    s.kurtosis = m4 / (m2 * m2);
    return s;
}

double jarque_bera_statistic(std::size_t n, double skewness, double kurtosis) {
    const double k3 = kurtosis - 3.0;
    return static_cast<double>(n) * (skewness * skewness / 6.0 + k3 * k3 / 24.0);
}

TestResult jarque_bera(std::span<const double> returns, double significance) {
    if (returns.size() < 8) throw DataError("jarque_bera: need at least 8 observations");
    const StatsSummary s = descriptive_stats(returns);
    TestResult r;
    r.statistic = jarque_bera_statistic(s.n, s.skewness, s.kurtosis);
    r.df = 2.0;
    r.p_value = stat::chisq_sf(r.statistic, 2.0);
    r.significance = significance;
    r.reject = r.p_value < significance;
    return r;
}

TestResult mean_zero_ttest(std::span<const double> returns, double significance) {
    if (returns.size() < 2) throw DataError("mean_zero_ttest: need at least 2 observations");
    const double n = static_cast<double>(returns.size());
    const double mean = sample_mean(returns);
    const double sd = sample_sd(returns, mean);
    if (!(sd > 0.0)) throw DataError("mean_zero_ttest: degenerate (constant) series");
    TestResult r;
    r.statistic = mean / (sd / std::sqrt(n));
    r.df = n - 1.0;
    r.p_value = 2.0 * stat::t_cdf(-std::fabs(r.statistic), r.df);
    r.significance = significance;
    r.reject = r.p_value < significance;
    return r;
}

}  // namespace varscale
