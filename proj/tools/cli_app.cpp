#include "cli_app.hpp"

#include <algorithm>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "config.hpp"
#include "hlppl/backtest.hpp"
#include "hlppl/error.hpp"
#include "hlppl/forecast.hpp"
#include "hlppl/ingestion.hpp"
#include "hlppl/io.hpp"
#include "hlppl/lppl.hpp"
#include "hlppl/pipeline.hpp"
#include "hlppl/signals.hpp"
#include "hlppl/synth.hpp"

namespace hlppl::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::io: return kIoError;
        case ErrorKind::parse:
        case ErrorKind::validation:
        case ErrorKind::insufficient_data:
        case ErrorKind::contract:
        case ErrorKind::feature_unavailable: return kValidationError;
        case ErrorKind::domain:
        case ErrorKind::degenerate:
        case ErrorKind::fit_failure: return kNumericalError;
    }
    return kValidationError;
}

/// Flags that override config-file values only when given on the command line.
class Overrides {
public:
    template <class T>
    void add(CLI::App* app, const std::string& name, const std::string& help, std::function<void(RunConfig&, const T&)> set) {
        auto value = std::make_shared<T>();
        CLI::Option* opt = app->add_option(name, *value, help);
        appliers_.push_back([opt, value, set](RunConfig& c) {
            if (opt->count() > 0) set(c, *value);
        });
    }

    void apply(RunConfig& c) const {
        for (const auto& f : appliers_) f(c);
    }

private:
    std::vector<std::function<void(RunConfig&)>> appliers_;
};

void add_input_flags(CLI::App* app, Overrides& o) {
    o.add<std::string>(app, "--prices", "prices CSV (date,close[,volume])", [](RunConfig& c, const std::string& v) { c.inputs.prices = v; });
    o.add<std::string>(app, "--symbol", "symbol name", [](RunConfig& c, const std::string& v) { c.inputs.symbol = v; });
    o.add<std::string>(app, "--out", "output directory (a per-symbol subdirectory is used)", [](RunConfig& c, const std::string& v) { c.output_dir = v; });
    o.add<std::uint64_t>(app, "--seed", "random seed", [](RunConfig& c, const std::uint64_t& v) { c.rng_seed = v; });
}

void add_fit_flags(CLI::App* app, Overrides& o) {
    o.add<int>(app, "--restarts", "multi-start count", [](RunConfig& c, const int& v) { c.fit.restarts = v; });
    o.add<int>(app, "--max-iterations", "local search iteration cap", [](RunConfig& c, const int& v) { c.fit.max_iterations = v; });
    o.add<std::size_t>(app, "--rolling-window", "rolling fit window length (0 = full sample only)", [](RunConfig& c, const std::size_t& v) { c.rolling_window = v; });
    o.add<std::size_t>(app, "--rolling-step", "rolling fit step", [](RunConfig& c, const std::size_t& v) { c.rolling_step = v; });
    o.add<std::size_t>(app, "--min-window", "minimum observations for a fit", [](RunConfig& c, const std::size_t& v) { c.fit.min_window = v; });
}

void add_score_flags(CLI::App* app, Overrides& o) {
    o.add<std::string>(app, "--news", "pre-scored news CSV", [](RunConfig& c, const std::string& v) { c.inputs.news = v; });
    o.add<std::string>(app, "--features", "coverage / market cap CSV", [](RunConfig& c, const std::string& v) { c.inputs.features = v; });
    o.add<std::string>(app, "--fit", "fit JSON (default: <out>/<symbol>/fit.json)", [](RunConfig& c, const std::string& v) { c.inputs.fit = v; });
    o.add<double>(app, "--alpha1", "hype weight", [](RunConfig& c, const double& v) { c.score.alpha1 = v; });
    o.add<double>(app, "--alpha2", "sentiment weight", [](RunConfig& c, const double& v) { c.score.alpha2 = v; });
    o.add<std::string>(app, "--normalization", "global or running", [](RunConfig& c, const std::string& v) { c.normalization = parse_normalization_mode(v); });
}

void add_label_flags(CLI::App* app, Overrides& o) {
    o.add<double>(app, "--tau", "episode threshold", [](RunConfig& c, const double& v) { c.labels.tau = v; });
    o.add<std::size_t>(app, "--d-min", "minimum episode length in trading days", [](RunConfig& c, const std::size_t& v) { c.labels.d_min = v; });
}

void add_strategy_flags(CLI::App* app, Overrides& o) {
    o.add<std::string>(app, "--scores", "scores CSV (default: <out>/<symbol>/scores.csv)", [](RunConfig& c, const std::string& v) { c.inputs.scores = v; });
    o.add<std::string>(app, "--forecasts", "forecasts CSV (date,h1..h5)", [](RunConfig& c, const std::string& v) { c.inputs.forecasts = v; });
    o.add<std::string>(app, "--horizon-mode", "score, baseline or forecasts", [](RunConfig& c, const std::string& v) { c.horizon_mode = parse_horizon_mode(v); });
    o.add<int>(app, "--horizon", "single forecast horizon 1..5 (0 = all five)", [](RunConfig& c, const int& v) { c.strategy.horizon = v; });
    o.add<double>(app, "--theta1", "entry threshold", [](RunConfig& c, const double& v) { c.strategy.theta1 = v; });
    o.add<double>(app, "--theta2", "exit threshold", [](RunConfig& c, const double& v) { c.strategy.theta2 = v; });
    o.add<double>(app, "--stop-loss", "stop-loss fraction", [](RunConfig& c, const double& v) { c.strategy.stop_loss = v; });
    o.add<double>(app, "--max-position", "position size as a fraction of equity", [](RunConfig& c, const double& v) { c.strategy.max_position = v; });
    o.add<double>(app, "--cost", "transaction cost per side", [](RunConfig& c, const double& v) { c.strategy.transaction_cost = v; });
    o.add<double>(app, "--discount", "continuous annual discount rate", [](RunConfig& c, const double& v) { c.strategy.discount_rate = v; });
    o.add<std::string>(app, "--execution", "same_close or next_close", [](RunConfig& c, const std::string& v) { c.strategy.execution = parse_execution(v); });
}

template <class Writer>
void write_file(const fs::path& path, Writer&& writer) {
    std::ostringstream ss;
    writer(ss);
    write_text_file(path, ss.str());
}

PriceSeries require_prices(const RunConfig& c) {
    if (c.inputs.prices.empty()) fail(ErrorKind::contract, "no prices file given (--prices or [inputs] prices)");
    return load_prices(c.inputs.prices, c.inputs.symbol);
}

fs::path input_or_default(const std::string& given, const fs::path& fallback) {
    return given.empty() ? fallback : fs::path(given);
}

void echo_config(const RunConfig& c) { write_text_file(c.symbol_dir() / "effective_config.toml", to_toml(c)); }

// ---------------------------------------------------------------- commands

void cmd_fit(const RunConfig& c, std::ostream& out) {
    const auto prices = require_prices(c);
    FitConfig fc = c.fit;
    fc.rng_seed = c.rng_seed;
    const auto fit = fit_lppl(prices, fc);
    const auto dir = c.symbol_dir();
    write_file(dir / "fit.json", [&](std::ostream& s) { write_fit_json(s, fit); });

    auto residuals = compute_residuals(prices, fit);
    try {
        residuals = normalize_residuals(residuals, c.normalization);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::degenerate) throw;
        out << "warning: residuals are identically zero; epsilon_norm left empty\n";
    }
    write_file(dir / "residuals.csv", [&](std::ostream& s) { write_residuals_csv(s, residuals); });

    if (c.rolling_window > 0) {
        const auto fits = fit_lppl_rolling(prices, c.rolling_window, c.rolling_step, fc);
        write_file(dir / "rolling_fits.csv", [&](std::ostream& s) {
            s << "window_start,window_end,A,B,C,t_c,m,omega,phi,sse,rmse\n";
            for (const auto& f : fits) {
                s << f.window_start.iso() << ',' << f.window_end.iso() << ',' << format_number(f.params.A) << ','
                  << format_number(f.params.B) << ',' << format_number(f.params.C) << ',' << format_number(f.params.tc)
                  << ',' << format_number(f.params.m) << ',' << format_number(f.params.omega) << ','
                  << format_number(f.params.phi) << ',' << format_number(f.sse) << ',' << format_number(f.rmse) << '\n';
            }
        });
    }
    echo_config(c);
    out << "fit " << c.inputs.symbol << ": t_c=" << format_number(fit.params.tc) << " m=" << format_number(fit.params.m)
        << " omega=" << format_number(fit.params.omega) << " rmse=" << format_number(fit.rmse) << '\n';
}

void cmd_score(const RunConfig& c, bool fit_inline, std::ostream& out) {
    const auto prices = require_prices(c);
    const auto dir = c.symbol_dir();

    LpplFit fit;
    if (fit_inline) {
        FitConfig fc = c.fit;
        fc.rng_seed = c.rng_seed;
        fit = fit_lppl(prices, fc);
        write_file(dir / "fit.json", [&](std::ostream& s) { write_fit_json(s, fit); });
    } else {
        const auto fit_path = input_or_default(c.inputs.fit, dir / "fit.json");
        std::istringstream in(read_text_file(fit_path));
        fit = read_fit_json(in);
    }
    const auto window = fit_window(prices, fit);

    std::vector<NewsArticleRecord> news;
    std::vector<MarketFeatureRow> features;
    if (c.inputs.news.empty()) {
        out << "warning: no news file; sentiment is 0 on every date\n";
    } else {
        news = load_news(c.inputs.news);
    }
    if (c.inputs.features.empty()) {
        out << "warning: no features file; hype is 0 on every date\n";
    } else {
        features = load_features(c.inputs.features);
    }
    const auto bundle = align_daily(prices, news, features);
    if (!bundle.rejected.empty()) {
        out << "note: " << bundle.rejected.size() << " news/feature records fall outside the price calendar\n";
    }
    const auto signals = compute_signals(bundle, c.sentiment_source);
    const auto scored = score_window(window, fit, &signals, c.score, c.normalization, c.labels);

    write_file(dir / "residuals.csv", [&](std::ostream& s) { write_residuals_csv(s, scored.residuals); });
    write_file(dir / "signals.csv", [&](std::ostream& s) { write_signals_csv(s, signals); });
    write_file(dir / "scores.csv", [&](std::ostream& s) { write_scores_csv(s, scored.scores); });
    write_file(dir / "episodes.csv", [&](std::ostream& s) { write_episodes_csv(s, scored.episodes); });
    write_file(dir / "plot_data.csv", [&](std::ostream& s) { write_plot_data_csv(s, prices, fit, scored.scores, scored.episodes); });
    echo_config(c);
    out << "score " << c.inputs.symbol << ": " << scored.scores.size() << " dates, " << scored.episodes.size()
        << " episodes\n";
}

ScoreSeries load_scores(const RunConfig& c) {
    const auto path = input_or_default(c.inputs.scores, c.symbol_dir() / "scores.csv");
    std::istringstream in(read_text_file(path));
    return read_scores_csv(in, path.string());
}

void cmd_label(const RunConfig& c, std::ostream& out) {
    const auto scores = load_scores(c);
    const auto episodes = label_episodes(scores, c.labels);
    write_file(c.symbol_dir() / "episodes.csv", [&](std::ostream& s) { write_episodes_csv(s, episodes); });
    echo_config(c);
    out << "label " << c.inputs.symbol << ": " << episodes.size() << " episodes\n";
}

void write_report(const fs::path& dir, const std::string& stem, const BacktestReport& r, const StrategyConfig& cfg) {
    write_file(dir / (stem + "_report.json"), [&](std::ostream& s) { write_report_json(s, r, cfg); });
    write_file(dir / (stem + "_equity.csv"), [&](std::ostream& s) { write_equity_csv(s, r); });
}

void cmd_backtest(const RunConfig& c, std::ostream& out) {
    const auto prices = require_prices(c);
    const auto dir = c.symbol_dir();
    const auto benchmark = buy_and_hold_benchmark(prices, c.strategy);
    write_report(dir, "benchmark", benchmark, c.strategy);

    if (c.horizon_mode == HorizonMode::score) {
        const auto scores = load_scores(c);
        StrategyConfig cfg = c.strategy;
        cfg.horizon = 0;
        const auto report = run_backtest(prices, {scores.dates, scores.score, std::nullopt}, cfg);
        write_report(dir, "strategy", report, cfg);
        out << "backtest " << c.inputs.symbol << ": strategy annualized " << format_number(report.metrics.annualized_return)
            << ", buy-and-hold " << format_number(benchmark.metrics.annualized_return) << '\n';
        echo_config(c);
        return;
    }

    ForecastSet forecasts;
    if (c.horizon_mode == HorizonMode::baseline) {
        BaselineOptions opts;
        opts.strict_range = c.strict_range;
        forecasts = BaselineForecaster(opts).forecast(load_scores(c));
        write_file(dir / "forecasts.csv", [&](std::ostream& s) { write_forecasts_csv(s, forecasts); });
    } else {
        if (c.inputs.forecasts.empty()) fail(ErrorKind::contract, "horizon_mode = forecasts needs a forecasts file");
        std::istringstream in(read_text_file(c.inputs.forecasts));
        forecasts = read_forecasts_csv(in, c.inputs.forecasts);
    }
    forecasts.validate();

    if (c.strategy.horizon != 0) {
        const int h = c.strategy.horizon;
        SignalInput input{forecasts.dates, {}, std::nullopt};
        const auto col = forecasts.horizon(h);
        input.values.assign(col.begin(), col.end());
        if (h < kMaxHorizon) {
            const auto next = forecasts.horizon(h + 1);
            input.next_horizon.emplace(next.begin(), next.end());
        }
        const auto report = run_backtest(prices, input, c.strategy);
        write_report(dir, "strategy", report, c.strategy);
        out << "backtest " << c.inputs.symbol << " h=" << h << ": annualized " << format_number(report.metrics.annualized_return) << '\n';
        echo_config(c);
        return;
    }

    const auto multi = multi_horizon_backtest(prices, forecasts, c.strategy);
    ojson best;
    best["best_horizon"] = multi.best_horizon;
    ojson per = ojson::array();
    for (int h = 1; h <= kMaxHorizon; ++h) {
        const auto& r = multi.reports[static_cast<std::size_t>(h - 1)];
        StrategyConfig cfg = c.strategy;
        cfg.horizon = h;
        write_report(dir, "h" + std::to_string(h), r, cfg);
        per.push_back({{"horizon", h},
                       {"annualized_return", round_significant(r.metrics.annualized_return)},
                       {"trade_count", r.metrics.trade_count}});
    }
    best["horizons"] = std::move(per);
    write_text_file(dir / "best_horizon.json", best.dump(2) + "\n");
    echo_config(c);
    out << "backtest " << c.inputs.symbol << ": best horizon h=" << multi.best_horizon << '\n';
}

void cmd_report(const RunConfig& c, std::ostream& out) {
    const auto dir = c.symbol_dir();
    if (!fs::is_directory(dir)) fail(ErrorKind::io, "no output directory " + dir.string());

    std::vector<fs::path> reports;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        if (name.size() > 12 && name.substr(name.size() - 12) == "_report.json") reports.push_back(entry.path());
    }
    std::sort(reports.begin(), reports.end());

    ojson summary = ojson::object();
    char line[160];
    std::snprintf(line, sizeof line, "%-14s %12s %12s %10s %10s %9s %7s\n", "run", "annualized", "cumulative",
                  "sharpe", "max_dd", "win_rate", "trades");
    out << line;
    for (const auto& path : reports) {
        const auto j = ojson::parse(read_text_file(path));
        const auto& m = j.at("metrics");
        const auto stem = path.filename().string().substr(0, path.filename().string().size() - 12);
        char sharpe[32] = "n/a";
        if (!m.at("sharpe_ratio").is_null()) std::snprintf(sharpe, sizeof sharpe, "%.4f", m.at("sharpe_ratio").get<double>());
        std::snprintf(line, sizeof line, "%-14s %12.4f %12.4f %10s %10.4f %9.3f %7d\n", stem.c_str(),
                      m.at("annualized_return").get<double>(), m.at("cumulative_return").get<double>(), sharpe,
                      m.at("max_drawdown").get<double>(), m.at("win_rate").get<double>(),
                      m.at("trade_count").get<int>());
        out << line;
        summary[stem] = m;
    }

    // Forecast quality: prediction for horizon h made at t against the score at t + h.
    const auto forecast_path = input_or_default(c.inputs.forecasts, dir / "forecasts.csv");
    const auto scores_path = input_or_default(c.inputs.scores, dir / "scores.csv");
    if (fs::exists(forecast_path) && fs::exists(scores_path)) {
        std::istringstream fin(read_text_file(forecast_path));
        const auto forecasts = read_forecasts_csv(fin, forecast_path.string());
        const auto scores = load_scores(c);
        std::map<Date, std::size_t> score_index;
        for (std::size_t i = 0; i < scores.size(); ++i) score_index[scores.dates[i]] = i;
        ojson metrics = ojson::object();
        for (int h = 1; h <= kMaxHorizon; ++h) {
            std::vector<double> predicted;
            std::vector<double> actual;
            for (std::size_t i = 0; i < forecasts.size(); ++i) {
                const auto it = score_index.find(forecasts.dates[i]);
                if (it == score_index.end() || it->second + static_cast<std::size_t>(h) >= scores.size()) continue;
                predicted.push_back(forecasts.horizon(h)[i]);
                actual.push_back(scores.score[it->second + static_cast<std::size_t>(h)]);
            }
            if (predicted.size() < 2) continue;
            const auto e = eval_metrics(predicted, actual);
            metrics["h" + std::to_string(h)] = {
                {"correlation", e.correlation ? ojson(round_significant(*e.correlation)) : ojson(nullptr)},
                {"mse", round_significant(e.mse)},
                {"mae", round_significant(e.mae)},
                {"rmse", round_significant(e.rmse)},
                {"n", predicted.size()}};
            out << "forecast h" << h << ": rmse " << format_number(e.rmse) << ", correlation "
                << (e.correlation ? format_number(*e.correlation) : std::string("n/a")) << '\n';
        }
        summary["forecast_metrics"] = std::move(metrics);
    }
    write_text_file(dir / "summary.json", summary.dump(2) + "\n");
}

struct SynthOptions {
    std::string out = "synth";
    std::string symbol = "SYN";
    std::uint64_t seed = 7;
    std::size_t length = 300;
    std::string noise = "ar1";
    double sigma = 0.01;
    double alpha = 0.1;
    bool no_news = false;
};

void cmd_synth(const SynthOptions& o, std::ostream& out) {
    SynthConfig sc;
    sc.symbol = o.symbol;
    sc.seed = o.seed;
    sc.length = o.length;
    sc.noise_sigma = o.sigma;
    sc.ar1_alpha = o.alpha;
    sc.with_news = !o.no_news;
    if (o.noise == "none") sc.noise = SynthNoise::none;
    else if (o.noise == "iid") sc.noise = SynthNoise::iid;
    else if (o.noise == "ar1") sc.noise = SynthNoise::ar1;
    else fail(ErrorKind::contract, "synth: --noise must be none, iid or ar1");

    const auto r = synthesize(sc);
    const fs::path dir = o.out;
    write_file(dir / "prices.csv", [&](std::ostream& s) { write_prices(s, r.prices); });
    if (sc.with_news) {
        write_file(dir / "news.csv", [&](std::ostream& s) { write_news(s, r.news); });
        write_file(dir / "features.csv", [&](std::ostream& s) { write_features(s, r.features); });
    }
    ojson truth;
    truth["symbol"] = o.symbol;
    truth["seed"] = o.seed;
    truth["length"] = o.length;
    truth["noise"] = o.noise;
    truth["noise_sigma"] = round_significant(o.sigma);
    truth["ar1_alpha"] = round_significant(o.alpha);
    truth["A"] = round_significant(r.truth.A);
    truth["B"] = round_significant(r.truth.B);
    truth["C"] = round_significant(r.truth.C);
    truth["t_c"] = round_significant(r.truth.tc);
    truth["m"] = round_significant(r.truth.m);
    truth["omega"] = round_significant(r.truth.omega);
    truth["phi"] = round_significant(r.truth.phi);
    truth["window_start"] = r.prices.dates.front().iso();
    truth["window_end"] = r.prices.dates.back().iso();
    write_text_file(dir / "truth.json", truth.dump(2) + "\n");
    out << "synth " << o.symbol << ": " << o.length << " days, t_c=" << format_number(r.truth.tc) << " m="
        << format_number(r.truth.m) << " omega=" << format_number(r.truth.omega) << '\n';
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Bubble detection toolkit: LPPL fitting, behavioral Bubble Score, episode labeling and backtests",
                 "hlppl"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "TOML-style run configuration");

    Overrides overrides;
    auto* fit = app.add_subcommand("fit", "fit the LPPL model and write fit.json + residuals.csv");
    auto* score = app.add_subcommand("score", "compose Bubble Scores and label episodes");
    auto* label = app.add_subcommand("label", "relabel episodes from a scores CSV");
    auto* backtest = app.add_subcommand("backtest", "run the threshold strategy and buy-and-hold benchmark");
    auto* report = app.add_subcommand("report", "summarize reports and forecast accuracy in an output directory");
    auto* synth = app.add_subcommand("synth", "generate an LPPL + AR(1) fixture with known ground truth");

    for (auto* sub : {fit, score, label, backtest, report}) {
        sub->add_option("--config", config_path, "TOML-style run configuration");
        add_input_flags(sub, overrides);
    }
    add_fit_flags(fit, overrides);
    add_fit_flags(score, overrides);
    add_score_flags(score, overrides);
    add_label_flags(score, overrides);
    add_label_flags(label, overrides);
    add_strategy_flags(backtest, overrides);
    add_strategy_flags(report, overrides);
    overrides.add<std::string>(label, "--scores", "scores CSV", [](RunConfig& c, const std::string& v) { c.inputs.scores = v; });

    bool fit_inline = false;
    score->add_flag("--fit-inline", fit_inline, "fit the model instead of reading fit.json");

    SynthOptions so;
    synth->add_option("--out", so.out, "output directory");
    synth->add_option("--symbol", so.symbol, "symbol name");
    synth->add_option("--seed", so.seed, "random seed");
    synth->add_option("--length", so.length, "number of trading days");
    synth->add_option("--noise", so.noise, "none, iid or ar1");
    synth->add_option("--sigma", so.sigma, "noise standard deviation");
    synth->add_option("--alpha", so.alpha, "AR(1) mean-reversion rate");
    synth->add_flag("--no-news", so.no_news, "skip news and feature files");

    std::vector<std::string> argv_rest(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
    std::reverse(argv_rest.begin(), argv_rest.end());  // CLI11 takes a reversed vector
    try {
        app.parse(argv_rest);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kValidationError;
    }

    try {
        if (synth->parsed()) {
            cmd_synth(so, out);
            return kSuccess;
        }
        RunConfig config;
        if (!config_path.empty()) config = load_config(config_path);
        overrides.apply(config);
        config.fit.rng_seed = config.rng_seed;
        config.validate();

        if (fit->parsed()) cmd_fit(config, out);
        else if (score->parsed()) cmd_score(config, fit_inline, out);
        else if (label->parsed()) cmd_label(config, out);
        else if (backtest->parsed()) cmd_backtest(config, out);
        else if (report->parsed()) cmd_report(config, out);
        return kSuccess;
    } catch (const Error& e) {
        err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kValidationError;
    }
}

}  // namespace hlppl::cli
