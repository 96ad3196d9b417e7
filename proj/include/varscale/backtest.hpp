#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "varscale/var_engine.hpp"

namespace varscale {

// Bernoulli breach indicators: 1 when the realized return fell below the
// VaR forecast (strict inequality), 0 otherwise.
struct ExceedanceSequence {
    std::vector<std::uint8_t> indicators;
    double alpha = 0.05;  // exceedance probability 1 - p

    std::size_t size() const { return indicators.size(); }
    std::size_t breaches() const;
};

enum class Classification { OverestimatesRisk, UnderestimatesRisk, Matches };
std::string to_string(Classification c);

struct BacktestResult {
    std::size_t x = 0;  // observed breaches
    std::size_t N = 0;
    long expected = 0;
    double lr_uc = 0.0;
    double lr_ind = 0.0;
    double lr_cc = 0.0;
    double crit_uc = 0.0;
    double crit_cc = 0.0;
    bool reject_uc = false;
    bool reject_cc = false;
    Classification classification = Classification::Matches;
};

ExceedanceSequence exceedances(std::span<const BacktestPair> pairs, double alpha);

// round(alpha * N), half away from zero.
long expected_exceedances(std::size_t N, double alpha);

// Kupiec unconditional-coverage likelihood ratio (0 ln 0 = 0).
double kupiec_lr(std::size_t x, std::size_t N, double alpha);

// First-order Markov independence LR from transition counts; degenerate
// transition cells drop their terms.
double christoffersen_ind(const ExceedanceSequence& seq);

// Both coverage tests plus classification at the given test significance
// (chi-square critical values with 1 and 2 df).
BacktestResult run_backtest(const ExceedanceSequence& seq, double test_significance);

struct ReportRow {
    std::string dataset;
    Method method = Method::HS;
    Mode mode = Mode::Direct;
    double confidence = 0.95;
    BacktestResult result;
};

// Full flat table, one row per dataset x method x mode x confidence:
// dataset,method,mode,confidence,N,x,expected,lr_uc,crit_uc,reject_uc,
// lr_ind,lr_cc,crit_cc,reject_cc,classification.
std::string render_summary_csv(const std::vector<ReportRow>& rows);

// Three tables per confidence level (exceedance counts, LR_uc, LR_cc), rows
// keyed by dataset and columns by method/mode. Returned as (name, csv text).
std::vector<std::pair<std::string, std::string>> render_report_tables(
    const std::vector<ReportRow>& rows);

// Structured-object rendering (JSON) of the full collection.
std::string render_report_json(const std::vector<ReportRow>& rows);

}  // namespace varscale
