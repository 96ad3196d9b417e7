// varscale: univariate market-risk engine comparing direct h-day VaR
// estimation against square-root-of-time scaling of 1-day VaR, with
// unconditional and conditional coverage backtests.

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "varscale/backtest.hpp"
#include "varscale/errors.hpp"
#include "varscale/format.hpp"
#include "varscale/garch.hpp"
#include "varscale/market_data.hpp"
#include "varscale/simgen.hpp"
#include "varscale/statfun.hpp"
#include "varscale/var_engine.hpp"

namespace fs = std::filesystem;
using namespace varscale;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

constexpr int kTradingDaysPerYear = 261;

struct CommonOptions {
    std::vector<std::string> inputs;
    std::string out_dir;
    std::vector<double> confidences{0.95, 0.99};
    int horizon = 10;
    int window = 250;
    std::vector<std::string> methods{"hs", "vc-normal", "vc-t", "garch-normal", "garch-t"};
    std::vector<std::string> modes{"direct", "scaled"};
    int max_ar = 2;
    int max_ma = 2;
    double garch_span_years = 5.0;
    bool t_standardized = false;     // variance-consistent t quantile for vc-t
    bool garch_raw_t = false;        // raw (non-standardized) t quantile for garch-t
    bool hs_interpolate = false;
    double test_significance = 0.0;  // 0 = tie to 1 - confidence
    unsigned workers = 1;
    std::uint64_t seed = 0;
};

std::string dataset_name(const std::string& path) {
    return fs::path(path).stem().string();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << content;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path ensure_out_dir(const std::string& out_dir) {
    if (out_dir.empty()) throw std::invalid_argument("--out directory is required");
    fs::path p(out_dir);
    fs::create_directories(p);
    return p;
}

std::string conf_tag(double confidence) {
    return "p" + fmt_shortest(confidence * 100.0);
}

// ---------------------------------------------------------------- stats ----

int cmd_stats(const CommonOptions& opt, double significance) {
    std::string stats_csv = "dataset,horizon,n,min,max,mean,sd,skewness,kurtosis\n";
    std::string tests_csv = "dataset,horizon,test,statistic,df,p_value,reject\n";
    for (const auto& input : opt.inputs) {
        const std::string name = dataset_name(input);
        const PriceSeries prices = load_prices_file(input);
        for (int h : {1, opt.horizon}) {
            if (h < 1 || prices.size() <= static_cast<std::size_t>(h)) continue;
            const ReturnSeries r = log_returns(prices, h);
            const StatsSummary s = descriptive_stats(r.values);
            stats_csv += name + "," + std::to_string(h) + "," + std::to_string(s.n) + "," +
                         fmt_double(s.min) + "," + fmt_double(s.max) + "," +
                         fmt_double(s.mean) + "," + fmt_double(s.sd) + "," +
                         fmt_double(s.skewness) + "," + fmt_double(s.kurtosis) + "\n";
            const TestResult jb = jarque_bera(r.values, significance);
            const TestResult tt = mean_zero_ttest(r.values, significance);
            tests_csv += name + "," + std::to_string(h) + ",jarque-bera," +
                         fmt_double(jb.statistic) + "," + fmt_double(jb.df) + "," +
                         fmt_double(jb.p_value) + "," + (jb.reject ? "1" : "0") + "\n";
            tests_csv += name + "," + std::to_string(h) + ",mean-zero-t," +
                         fmt_double(tt.statistic) + "," + fmt_double(tt.df) + "," +
                         fmt_double(tt.p_value) + "," + (tt.reject ? "1" : "0") + "\n";
        }
    }
    if (opt.out_dir.empty()) {
        std::cout << stats_csv << "\n" << tests_csv;
    } else {
        const fs::path out = ensure_out_dir(opt.out_dir);
        write_file(out / "stats.csv", stats_csv);
        write_file(out / "stat_tests.csv", tests_csv);
    }
    return kExitOk;
}

// ------------------------------------------------------------------ var ----

struct VarJob {
    std::string dataset;
    Method method;
    Mode mode;
    double confidence;
};

struct VarJobResult {
    bool aborted = false;
    std::string diagnostic;
    VarForecastSeries series;
};

ReturnSeries tail_of(const ReturnSeries& r, std::size_t keep) {
    if (r.size() <= keep) return r;
    ReturnSeries out;
    out.horizon = r.horizon;
    out.dates.assign(r.dates.end() - keep, r.dates.end());
    out.values.assign(r.values.end() - keep, r.values.end());
    return out;
}

bool is_garch(Method m) { return m == Method::GarchNormal || m == Method::GarchT; }

int cmd_var(const CommonOptions& opt) {
    const fs::path out = ensure_out_dir(opt.out_dir);

    struct DatasetData {
        ReturnSeries r1, rh;          // full span
        ReturnSeries r1_garch, rh_garch;  // span-limited for GARCH methods
        garch::ArmaOrder order;
    };
    std::map<std::string, DatasetData> data;
    std::vector<std::string> dataset_order;

    bool any_garch = false;
    for (const auto& m : opt.methods) {
        if (is_garch(method_from_string(m))) any_garch = true;
    }

    for (const auto& input : opt.inputs) {
        const std::string name = dataset_name(input);
        const PriceSeries prices = load_prices_file(input);
        DatasetData d;
        d.r1 = log_returns(prices, 1);
        d.rh = log_returns(prices, opt.horizon);
        const auto span = static_cast<std::size_t>(opt.garch_span_years * kTradingDaysPerYear);
        d.r1_garch = span > 0 ? tail_of(d.r1, span) : d.r1;
        d.rh_garch = span > 0 ? tail_of(d.rh, span) : d.rh;
        if (any_garch) {
            d.order = garch::select_arma_order(d.r1_garch.values, opt.max_ar, opt.max_ma);
        }
        dataset_order.push_back(name);
        data.emplace(name, std::move(d));
    }

    std::vector<VarJob> jobs;
    for (const auto& name : dataset_order) {
        for (const auto& ms : opt.methods) {
            const Method method = method_from_string(ms);
            for (const auto& mos : opt.modes) {
                const Mode mode = mode_from_string(mos);
                for (double confidence : opt.confidences) {
                    jobs.push_back({name, method, mode, confidence});
                }
            }
        }
    }

    std::vector<VarJobResult> results(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) break;
            const VarJob& job = jobs[i];
            const DatasetData& d = data.at(job.dataset);
            RollingConfig cfg;
            cfg.method = job.method;
            cfg.mode = job.mode;
            cfg.confidence = job.confidence;
            cfg.horizon = opt.horizon;
            cfg.window = opt.window;
            cfg.hs_interpolate = opt.hs_interpolate;
            cfg.t_standardized_vc = opt.t_standardized;
            cfg.t_standardized_garch = !opt.garch_raw_t;
            cfg.arma_order = d.order;
            const bool g = is_garch(job.method);
            try {
                results[i].series = rolling_estimate(g ? d.r1_garch : d.r1,
                                                     g ? d.rh_garch : d.rh, cfg);
            } catch (const std::exception& e) {
                results[i].aborted = true;
                results[i].diagnostic = e.what();
            }
        }
    };
    const unsigned nthreads = std::max(1u, opt.workers);
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < nthreads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    // Serialize in fixed job order so output is deterministic.
    std::string summary = "file,dataset,method,mode,confidence,forecasts,carried,status\n";
    std::size_t aborted = 0;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const VarJob& job = jobs[i];
        const std::string base = job.dataset + "__" + to_string(job.method) + "__" +
                                 to_string(job.mode) + "__" + conf_tag(job.confidence);
        if (results[i].aborted) {
            ++aborted;
            summary += base + ".csv," + job.dataset + "," + to_string(job.method) + "," +
                       to_string(job.mode) + "," + fmt_shortest(job.confidence) +
                       ",0,0,aborted: " + results[i].diagnostic + "\n";
            continue;
        }
        const auto& series = results[i].series;
        write_file(out / (base + ".csv"), serialize_forecasts(series));
        std::size_t carried = 0;
        std::string carried_dates;
        for (const auto& f : series.entries) {
            if (f.carried_forward) {
                ++carried;
                carried_dates += (carried_dates.empty() ? "" : ";") + f.as_of_date;
            }
        }
        summary += base + ".csv," + job.dataset + "," + to_string(job.method) + "," +
                   to_string(job.mode) + "," + fmt_shortest(job.confidence) + "," +
                   std::to_string(series.size()) + "," + std::to_string(carried) + ",ok" +
                   (carried ? " carried:" + carried_dates : "") + "\n";
    }
    write_file(out / "var_run_summary.csv", summary);
    if (aborted > 0) {
        std::cerr << "varscale: " << aborted << " of " << jobs.size()
                  << " combinations aborted; see var_run_summary.csv\n";
        return kExitNumerical;
    }
    return kExitOk;
}

// ------------------------------------------------------------- backtest ----

struct LoadedForecasts {
    std::string dataset;
    VarForecastSeries series;
};

std::vector<LoadedForecasts> load_forecast_dir(const std::string& dir) {
    std::vector<fs::path> paths;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        if (name.find("__") == std::string::npos || entry.path().extension() != ".csv") continue;
        paths.push_back(entry.path());
    }
    std::sort(paths.begin(), paths.end());
    std::vector<LoadedForecasts> out;
    for (const auto& p : paths) {
        LoadedForecasts lf;
        lf.dataset = p.filename().string().substr(0, p.filename().string().find("__"));
        lf.series = parse_forecasts(read_file(p));
        out.push_back(std::move(lf));
    }
    if (out.empty()) throw DataError("no forecast files found in '" + dir + "'");
    return out;
}

int cmd_backtest(const CommonOptions& opt, const std::string& forecast_dir) {
    const fs::path out = ensure_out_dir(opt.out_dir);
    std::map<std::string, PriceSeries> prices;
    for (const auto& input : opt.inputs) {
        prices.emplace(dataset_name(input), load_prices_file(input));
    }
    const auto forecasts = load_forecast_dir(forecast_dir);

    std::vector<ReportRow> rows;
    for (const auto& lf : forecasts) {
        const auto it = prices.find(lf.dataset);
        if (it == prices.end()) {
            throw DataError("no price input for dataset '" + lf.dataset + "'");
        }
        const ReturnSeries realized = log_returns(it->second, lf.series.horizon);
        const auto pairs = align_for_backtest(lf.series, realized);
        const double alpha = 1.0 - lf.series.confidence;
        const auto seq = exceedances(pairs, alpha);
        const double ts = opt.test_significance > 0.0 ? opt.test_significance : alpha;
        ReportRow row;
        row.dataset = lf.dataset;
        row.method = lf.series.method;
        row.mode = lf.series.mode;
        row.confidence = lf.series.confidence;
        row.result = run_backtest(seq, ts);
        rows.push_back(std::move(row));
    }

    write_file(out / "backtest_summary.csv", render_summary_csv(rows));
    write_file(out / "backtest_summary.json", render_report_json(rows));
    for (const auto& [name, csv] : render_report_tables(rows)) {
        write_file(out / name, csv);
    }
    return kExitOk;
}

// ------------------------------------------------------------- plotdata ----

int cmd_plotdata(const CommonOptions& opt, const std::string& forecast_dir) {
    const fs::path out = ensure_out_dir(opt.out_dir);
    std::map<std::string, PriceSeries> prices;
    for (const auto& input : opt.inputs) {
        prices.emplace(dataset_name(input), load_prices_file(input));
    }
    const auto forecasts = load_forecast_dir(forecast_dir);

    // Group by dataset/method/confidence; need both modes for one figure.
    std::map<std::string, std::pair<const LoadedForecasts*, const LoadedForecasts*>> groups;
    for (const auto& lf : forecasts) {
        const std::string key = lf.dataset + "__" + to_string(lf.series.method) + "__" +
                                conf_tag(lf.series.confidence);
        auto& slot = groups[key];
        (lf.series.mode == Mode::Direct ? slot.first : slot.second) = &lf;
    }

    bool wrote = false;
    for (const auto& [key, pair] : groups) {
        if (pair.first == nullptr || pair.second == nullptr) continue;
        const auto& direct = *pair.first;
        const auto& scaled = *pair.second;
        const ReturnSeries realized = log_returns(prices.at(direct.dataset),
                                                  direct.series.horizon);
        std::map<std::string, std::size_t> realized_index;
        for (std::size_t i = 0; i < realized.size(); ++i) {
            realized_index.emplace(realized.dates[i], i);
        }
        const std::size_t T = static_cast<std::size_t>(direct.series.horizon);
        // date of realization -> VaR value per mode
        std::map<std::string, double> direct_at, scaled_at;
        for (const auto& f : direct.series.entries) {
            auto it = realized_index.find(f.as_of_date);
            if (it == realized_index.end() || it->second + T >= realized.size()) continue;
            direct_at[realized.dates[it->second + T]] = f.value;
        }
        for (const auto& f : scaled.series.entries) {
            auto it = realized_index.find(f.as_of_date);
            if (it == realized_index.end() || it->second + T >= realized.size()) continue;
            scaled_at[realized.dates[it->second + T]] = f.value;
        }

        std::string csv = "date,realized,var_direct,var_scaled\n";
        for (const auto& [date, dvalue] : direct_at) {
            const auto sit = scaled_at.find(date);
            if (sit == scaled_at.end()) continue;
            csv += date + "," + fmt_shortest(realized.values[realized_index.at(date)]) + "," +
                   fmt_shortest(dvalue) + "," + fmt_shortest(sit->second) + "\n";
        }
        write_file(out / ("plot_" + key + ".csv"), csv);
        wrote = true;
    }
    if (!wrote) throw DataError("plotdata: no dataset/method/confidence group has both modes");
    return kExitOk;
}

// ------------------------------------------------------------- simulate ----

int cmd_simulate(const sim::SimSpec& spec, const std::string& out_path, bool as_prices,
                 double k0) {
    std::string csv;
    if (spec.kind == sim::SimKind::GbmPrices) {
        const PriceSeries p = sim::generate_prices(spec);
        csv = "date,price\n";
        for (std::size_t i = 0; i < p.size(); ++i) {
            csv += p.dates[i] + "," + fmt_shortest(p.prices[i]) + "\n";
        }
    } else {
        const ReturnSeries r = sim::generate_returns(spec);
        if (as_prices) {
            const PriceSeries p = sim::to_prices(r, k0);
            csv = "date,price\n";
            for (std::size_t i = 0; i < p.size(); ++i) {
                csv += p.dates[i] + "," + fmt_shortest(p.prices[i]) + "\n";
            }
        } else {
            csv = "date,return\n";
            for (std::size_t i = 0; i < r.size(); ++i) {
                csv += r.dates[i] + "," + fmt_shortest(r.values[i]) + "\n";
            }
        }
    }
    if (out_path.empty()) {
        std::cout << csv;
    } else {
        fs::create_directories(fs::path(out_path).parent_path().empty()
                                   ? fs::path(".")
                                   : fs::path(out_path).parent_path());
        write_file(out_path, csv);
    }
    return kExitOk;
}

void add_common_flags(CLI::App* cmd, CommonOptions& opt, bool needs_input) {
    auto* in = cmd->add_option("--input,-i", opt.inputs, "price CSV file(s), header date,price");
    if (needs_input) in->required();
    cmd->add_option("--out,-o", opt.out_dir, "output directory");
    cmd->add_option("--confidence", opt.confidences, "VaR confidence level(s)")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--horizon", opt.horizon, "holding period T in days")->check(CLI::PositiveNumber);
    cmd->add_option("--window", opt.window, "rolling estimation window")->check(CLI::PositiveNumber);
    cmd->add_option("--methods", opt.methods,
                    "estimators: hs, vc-normal, vc-t, garch-normal, garch-t");
    cmd->add_option("--modes", opt.modes, "direct, scaled");
    cmd->add_option("--max-ar", opt.max_ar, "ARMA selection grid AR bound");
    cmd->add_option("--max-ma", opt.max_ma, "ARMA selection grid MA bound");
    cmd->add_option("--garch-span-years", opt.garch_span_years,
                    "restrict GARCH methods to the most recent span (0 = full)");
    cmd->add_flag("--t-standardized", opt.t_standardized,
                  "variance-consistent t quantile for vc-t");
    cmd->add_flag("--garch-raw-t", opt.garch_raw_t,
                  "raw (non-standardized) t quantile for garch-t");
    cmd->add_flag("--hs-interpolate", opt.hs_interpolate,
                  "interpolated empirical quantile for historical simulation");
    cmd->add_option("--test-significance", opt.test_significance,
                    "backtest size (default: 1 - confidence)");
    cmd->add_option("--workers", opt.workers, "parallel worker count");
    cmd->add_option("--seed", opt.seed, "random seed (simulation)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"univariate VaR engine: direct vs square-root-of-time scaling"};
    app.require_subcommand(1);
    app.set_config("--config");

    CommonOptions opt;
    double stats_significance = 0.05;

    auto* stats = app.add_subcommand("stats", "descriptive statistics and diagnostic tests");
    add_common_flags(stats, opt, true);
    stats->add_option("--significance", stats_significance, "test significance level");

    auto* var = app.add_subcommand("var", "rolling VaR forecasts (direct and scaled)");
    add_common_flags(var, opt, true);

    std::string forecast_dir;
    auto* backtest = app.add_subcommand("backtest", "coverage backtests over forecast files");
    add_common_flags(backtest, opt, true);
    backtest->add_option("--forecasts", forecast_dir, "directory of forecast CSVs")->required();

    auto* plotdata = app.add_subcommand("plotdata", "per-figure data export");
    add_common_flags(plotdata, opt, true);
    plotdata->add_option("--forecasts", forecast_dir, "directory of forecast CSVs")->required();

    auto* simulate = app.add_subcommand("simulate", "seeded synthetic data generation");
    sim::SimSpec spec;
    std::string kind_str = "iid-normal";
    std::string sim_out;
    bool as_prices = false;
    double k0 = 100.0;
    simulate->add_option("--kind", kind_str,
                         "iid-normal, iid-t, garch-normal, garch-t, gbm-prices");
    simulate->add_option("--n", spec.n, "number of observations")->required();
    simulate->add_option("--seed", spec.seed, "random seed");
    simulate->add_option("--mu", spec.mu, "mean / drift");
    simulate->add_option("--sigma", spec.sigma, "standard deviation / volatility");
    simulate->add_option("--dof", spec.dof, "t degrees of freedom");
    simulate->add_option("--scale", spec.scale, "t scale");
    simulate->add_option("--omega", spec.omega, "garch omega");
    simulate->add_option("--alpha", spec.alpha, "garch alpha");
    simulate->add_option("--beta", spec.beta, "garch beta");
    simulate->add_option("--k0", k0, "initial price level");
    simulate->add_flag("--as-prices", as_prices, "emit a price path built from the returns");
    simulate->add_option("--out", sim_out, "output file (stdout if omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (stats->parsed()) return cmd_stats(opt, stats_significance);
        if (var->parsed()) return cmd_var(opt);
        if (backtest->parsed()) return cmd_backtest(opt, forecast_dir);
        if (plotdata->parsed()) return cmd_plotdata(opt, forecast_dir);
        if (simulate->parsed()) {
            spec.kind = sim::sim_kind_from_string(kind_str);
            spec.k0 = k0;
            return cmd_simulate(spec, sim_out, as_prices, k0);
        }
    } catch (const DataError& e) {
        std::cerr << "varscale: data error: " << e.what() << "\n";
        return kExitData;
    } catch (const EstimationFailure& e) {
        std::cerr << "varscale: numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "varscale: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "varscale: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitUsage;
}
