#include "varscale/backtest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "varscale/errors.hpp"
#include "varscale/format.hpp"
#include "varscale/statfun.hpp"

namespace varscale {

namespace {

double xlogy(double x, double y) {
    return x == 0.0 ? 0.0 : x * std::log(y);
}

}  // namespace

std::size_t ExceedanceSequence::breaches() const {
    return static_cast<std::size_t>(
        std::count(indicators.begin(), indicators.end(), std::uint8_t{1}));
}

std::string to_string(Classification c) {
    switch (c) {
        case Classification::OverestimatesRisk: return "overestimates risk";
        case Classification::UnderestimatesRisk: return "underestimates risk";
        case Classification::Matches: return "matches";
    }
    throw std::logic_error("unknown classification");
}

ExceedanceSequence exceedances(std::span<const BacktestPair> pairs, double alpha) {
    if (pairs.empty()) throw DataError("exceedances: empty pairing");
    ExceedanceSequence seq;
    seq.alpha = alpha;
    seq.indicators.reserve(pairs.size());
    for (const auto& p : pairs) {
        seq.indicators.push_back(p.realized < p.forecast ? 1 : 0);
    }
    return seq;
}

long expected_exceedances(std::size_t N, double alpha) {
    if (N < 1) throw std::invalid_argument("expected_exceedances: N must be >= 1");
    return std::lround(alpha * static_cast<double>(N));
}

double kupiec_lr(std::size_t x, std::size_t N, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("kupiec_lr: alpha must be in (0,1)");
    }
    if (x > N) throw std::invalid_argument("kupiec_lr: x > N");
    const double n = static_cast<double>(N);
    const double xs = static_cast<double>(x);
    const double rate = xs / n;
    const double ll_null = (n - xs) * std::log(1.0 - alpha) + xlogy(xs, alpha);
    const double ll_alt = xlogy(n - xs, 1.0 - rate) + xlogy(xs, rate);
    const double lr = -2.0 * (ll_null - ll_alt);
    return lr < 0.0 ? 0.0 : lr;  // clip roundoff at the optimum
}

double christoffersen_ind(const ExceedanceSequence& seq) {
    const std::size_t N = seq.size();
    if (N < 2) throw DataError("christoffersen_ind: need at least 2 indicators");
    double n00 = 0, n01 = 0, n10 = 0, n11 = 0;
    for (std::size_t t = 1; t < N; ++t) {
        const bool prev = seq.indicators[t - 1] != 0;
        const bool cur = seq.indicators[t] != 0;
        if (!prev && !cur) ++n00;
        else if (!prev && cur) ++n01;
        else if (prev && !cur) ++n10;
        else ++n11;
    }
    const double transitions = static_cast<double>(N - 1);
    const double pi = (n01 + n11) / transitions;

    double ll_null = xlogy(n00 + n10, 1.0 - pi) + xlogy(n01 + n11, pi);
    double ll_alt = 0.0;
    if (n00 + n01 > 0) {
        const double pi01 = n01 / (n00 + n01);
        ll_alt += xlogy(n00, 1.0 - pi01) + xlogy(n01, pi01);
    }
    if (n10 + n11 > 0) {
        const double pi11 = n11 / (n10 + n11);
        ll_alt += xlogy(n10, 1.0 - pi11) + xlogy(n11, pi11);
    }
    const double lr = -2.0 * (ll_null - ll_alt);
    return lr < 0.0 ? 0.0 : lr;
}

BacktestResult run_backtest(const ExceedanceSequence& seq, double test_significance) {
    if (!(test_significance > 0.0 && test_significance < 1.0)) {
        throw std::invalid_argument("run_backtest: test significance must be in (0,1)");
    }
    BacktestResult r;
    r.N = seq.size();
    r.x = seq.breaches();
    r.expected = expected_exceedances(r.N, seq.alpha);
    r.lr_uc = kupiec_lr(r.x, r.N, seq.alpha);
    r.lr_ind = christoffersen_ind(seq);
    r.lr_cc = r.lr_uc + r.lr_ind;
    r.crit_uc = stat::chisq_quantile(1.0 - test_significance, 1.0);
    r.crit_cc = stat::chisq_quantile(1.0 - test_significance, 2.0);
    r.reject_uc = r.lr_uc > r.crit_uc;
    r.reject_cc = r.lr_cc > r.crit_cc;
    const long x = static_cast<long>(r.x);
    r.classification = x > r.expected   ? Classification::UnderestimatesRisk
                       : x < r.expected ? Classification::OverestimatesRisk
                                        : Classification::Matches;
    return r;
}

std::string render_summary_csv(const std::vector<ReportRow>& rows) {
    if (rows.empty()) throw DataError("backtest report: empty collection");
    std::string out =
        "dataset,method,mode,confidence,N,x,expected,lr_uc,crit_uc,reject_uc,"
        "lr_ind,lr_cc,crit_cc,reject_cc,classification\n";
    for (const auto& row : rows) {
        const auto& r = row.result;
        out += row.dataset;
        out += ',';
        out += to_string(row.method);
        out += ',';
        out += to_string(row.mode);
        out += ',';
        out += fmt_shortest(row.confidence);
        out += ',';
        out += std::to_string(r.N);
        out += ',';
        out += std::to_string(r.x);
        out += ',';
        out += std::to_string(r.expected);
        out += ',';
        out += fmt_fixed(r.lr_uc, 3);
        out += ',';
        out += fmt_fixed(r.crit_uc, 3);
        out += ',';
        out += r.reject_uc ? '1' : '0';
        out += ',';
        out += fmt_fixed(r.lr_ind, 3);
        out += ',';
        out += fmt_fixed(r.lr_cc, 3);
        out += ',';
        out += fmt_fixed(r.crit_cc, 3);
        out += ',';
        out += r.reject_cc ? '1' : '0';
        out += ',';
        out += to_string(r.classification);
        out += '\n';
    }
    return out;
}

std::vector<std::pair<std::string, std::string>> render_report_tables(
    const std::vector<ReportRow>& rows) {
    if (rows.empty()) throw DataError("backtest report: empty collection");

    std::set<double> confidences;
    std::set<std::string> datasets;
    std::set<std::pair<std::string, std::string>> columns;  // (method, mode)
    for (const auto& row : rows) {
        confidences.insert(row.confidence);
        datasets.insert(row.dataset);
        columns.insert({to_string(row.method), to_string(row.mode)});
    }

    auto find_row = [&](const std::string& dataset, const std::pair<std::string, std::string>& col,
                        double confidence) -> const ReportRow* {
        for (const auto& row : rows) {
            if (row.dataset == dataset && row.confidence == confidence &&
                to_string(row.method) == col.first && to_string(row.mode) == col.second) {
                return &row;
            }
        }
        return nullptr;
    };

    std::vector<std::pair<std::string, std::string>> tables;
    for (double confidence : confidences) {
        const std::string tag = fmt_shortest(confidence * 100.0);
        std::string header = "dataset";
        for (const auto& col : columns) header += "," + col.first + " " + col.second;
        header += '\n';

        std::string counts = header, uc = header, cc = header;
        double crit_uc = 0.0, crit_cc = 0.0;
        long expected = -1;
        bool uniform_expected = true;
        for (const auto& dataset : datasets) {
            std::string c_line = dataset, u_line = dataset, cc_line = dataset;
            for (const auto& col : columns) {
                const ReportRow* row = find_row(dataset, col, confidence);
                if (row == nullptr) {
                    c_line += ",";
                    u_line += ",";
                    cc_line += ",";
                    continue;
                }
                const auto& r = row->result;
                c_line += "," + std::to_string(r.x);
                u_line += "," + fmt_fixed(r.lr_uc, 3) + (r.reject_uc ? "*" : "");
                cc_line += "," + fmt_fixed(r.lr_cc, 3) + (r.reject_cc ? "*" : "");
                crit_uc = r.crit_uc;
                crit_cc = r.crit_cc;
                if (expected < 0) expected = r.expected;
                else if (expected != r.expected) uniform_expected = false;
            }
            counts += c_line + '\n';
            uc += u_line + '\n';
            cc += cc_line + '\n';
        }
        if (uniform_expected && expected >= 0) {
            counts += "# expected exceedances: " + std::to_string(expected) + '\n';
        }
        uc += "# critical value: " + fmt_fixed(crit_uc, 3) + " (* = null rejected)\n";
        cc += "# critical value: " + fmt_fixed(crit_cc, 3) + " (* = null rejected)\n";

        tables.emplace_back("exceedances_p" + tag + ".csv", counts);
        tables.emplace_back("lr_uc_p" + tag + ".csv", uc);
        tables.emplace_back("lr_cc_p" + tag + ".csv", cc);
    }
    return tables;
}

std::string render_report_json(const std::vector<ReportRow>& rows) {
    if (rows.empty()) throw DataError("backtest report: empty collection");
    nlohmann::json out = nlohmann::json::array();
    for (const auto& row : rows) {
        const auto& r = row.result;
        out.push_back({{"dataset", row.dataset},
                       {"method", to_string(row.method)},
                       {"mode", to_string(row.mode)},
                       {"confidence", row.confidence},
                       {"N", r.N},
                       {"x", r.x},
                       {"expected", r.expected},
                       {"lr_uc", r.lr_uc},
                       {"crit_uc", r.crit_uc},
                       {"reject_uc", r.reject_uc},
                       {"lr_ind", r.lr_ind},
                       {"lr_cc", r.lr_cc},
                       {"crit_cc", r.crit_cc},
                       {"reject_cc", r.reject_cc},
                       {"classification", to_string(r.classification)}});
    }
    return out.dump(2) + "\n";
}

}  // namespace varscale
