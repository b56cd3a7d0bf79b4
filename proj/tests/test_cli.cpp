#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli_app.hpp"
#include "config.hpp"
#include "hlppl/error.hpp"
#include "hlppl/io.hpp"
#include "oracles.hpp"

using namespace hlppl;
using namespace hlppl::cli;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = HLPPL_FIXTURE_DIR;

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("hlppl_test_" + name)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "hlppl");
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

void write(const fs::path& p, const std::string& text) {
    fs::create_directories(p.parent_path());
    std::ofstream(p) << text;
}

std::string read(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string price_csv(const std::vector<double>& close) {
    const auto p = oracle::prices(close);
    std::ostringstream s;
    write_prices(s, p);
    return s.str();
}

std::string score_csv(const std::vector<double>& score) {
    const auto p = oracle::prices(std::vector<double>(score.size(), 1.0));
    std::ostringstream s;
    s << "date,epsilon_norm,hype,sentiment,bubble_score\n";
    for (std::size_t i = 0; i < score.size(); ++i) {
        s << p.dates[i].iso() << ',' << format_number(score[i]) << ",0,0," << format_number(score[i]) << '\n';
    }
    return s.str();
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("number formatting") {
    CHECK(format_number(0.0) == "0");
    CHECK(format_number(-0.0) == "0");
    CHECK(format_number(1.04895) == "1.04895");
    CHECK(format_number(1.0 / 3.0) == "0.333333333333");
    CHECK(round_significant(1.0 / 3.0) == 0.333333333333);
}

TEST_CASE("fit JSON round-trip") {
    LpplFit fit;
    fit.params = {4.5, -0.25, 0.0125, 320.5, 0.45, 8.25, -1.5};
    fit.sse = 0.0125;
    fit.rmse = 0.005;
    fit.window_start = Date::parse("2020-01-02");
    fit.window_end = Date::parse("2021-02-24");
    fit.n_obs = 300;
    fit.restarts_used = 32;
    std::ostringstream out;
    write_fit_json(out, fit);
    const auto j = nlohmann::json::parse(out.str());
    CHECK(j.at("t_c").get<double>() == 320.5);
    std::istringstream in(out.str());
    const auto back = read_fit_json(in);
    CHECK(back.params.tc == fit.params.tc);
    CHECK(back.params.phi == fit.params.phi);
    CHECK(back.window_end == fit.window_end);
    CHECK(back.n_obs == 300);
}

TEST_CASE("scores, episodes and forecasts round-trip") {
    ScoreSeries s;
    for (int i = 0; i < 4; ++i) {
        s.dates.push_back(Date::parse("2020-01-06") + i);
        s.score.push_back(0.25 * i - 0.5);
        s.epsilon_norm.push_back(0.125 * i);
        s.hype.push_back(0.5);
        s.sentiment.push_back(-0.25);
    }
    std::ostringstream out;
    write_scores_csv(out, s);
    std::istringstream in(out.str());
    const auto back = read_scores_csv(in);
    CHECK(back.score == s.score);
    CHECK(back.dates == s.dates);
    CHECK(back.sentiment == s.sentiment);

    std::vector<Episode> eps{{2, 13, s.dates[0], s.dates[3], EpisodeType::negative, 0.95, 12}};
    std::ostringstream eo;
    write_episodes_csv(eo, eps);
    std::istringstream ei(eo.str());
    const auto eb = read_episodes_csv(ei);
    REQUIRE(eb.size() == 1);
    CHECK(eb[0].type == EpisodeType::negative);
    CHECK(eb[0].duration == 12);
    CHECK(eb[0].intensity == 0.95);

    ForecastSet f;
    f.dates = s.dates;
    for (auto& c : f.predictions) c = s.score;
    std::ostringstream fo;
    write_forecasts_csv(fo, f);
    std::istringstream fi(fo.str());
    CHECK(read_forecasts_csv(fi).predictions == f.predictions);
    std::istringstream missing("date,h1,h2,h3,h4\n2020-01-06,0,0,0,0\n");
    CHECK_THROWS_AS(read_forecasts_csv(missing), Error);
}

}

TEST_SUITE("config") {

TEST_CASE("defaults, file values and echo") {
    const auto c = parse_config(
        "# comment\n[inputs]\nprices = \"p.csv\"\nsymbol = \"ABC\"\n\n[fit]\nrestarts = 8\ntc_min_offset = 2\n"
        "tc_max_offset = 40\n[score]\nalpha1 = 0.5\nnormalization = \"running\"\n[strategy]\ntheta1 = 0.9\n"
        "execution = \"next_close\"\nhorizon_mode = \"baseline\"\n[output]\ndir = \"results\"\n");
    CHECK(c.inputs.prices == "p.csv");
    CHECK(c.fit.restarts == 8);
    REQUIRE(c.fit.tc_search.has_value());
    CHECK(c.fit.tc_search->second == 40.0);
    CHECK(c.score.alpha1 == 0.5);
    CHECK(c.score.alpha2 == 0.2);
    CHECK(c.normalization == NormalizationMode::running);
    CHECK(c.strategy.theta1 == 0.9);
    CHECK(c.strategy.execution == Execution::next_close);
    CHECK(c.horizon_mode == HorizonMode::baseline);
    CHECK(c.symbol_dir() == fs::path("results") / "ABC");

    const auto echoed = to_toml(c);
    const auto again = parse_config(echoed);
    CHECK(to_toml(again) == echoed);
    CHECK(again.fit.tc_search == c.fit.tc_search);
    CHECK(again.strategy.execution == c.strategy.execution);
}

TEST_CASE("bad configuration text") {
    CHECK_THROWS_AS(parse_config("[fit]\nrestartz = 3\n"), Error);
    CHECK_THROWS_AS(parse_config("[fit]\nrestarts = \"many\"\n"), Error);
    CHECK_THROWS_AS(parse_config("[strategy]\ntheta1 = 0.2\ntheta2 = 0.3\n").validate(), Error);
}

}

TEST_SUITE("cli") {

TEST_CASE("help and usage errors") {
    CHECK(run({"--help"}).code == 0);
    CHECK(run({}).code == kValidationError);
    CHECK(run({"fit", "--no-such-flag"}).code == kValidationError);
}

TEST_CASE("missing input file names the path") {
    TempDir dir("missing");
    const auto missing = (dir.path / "nope.csv").string();
    const auto r = run({"fit", "--prices", missing, "--out", dir.path.string()});
    CHECK(r.code == kIoError);
    CHECK(r.err.find(missing) != std::string::npos);
}

TEST_CASE("short windows are rejected as insufficient data") {
    TempDir dir("short");
    std::vector<double> close(60);
    for (std::size_t i = 0; i < close.size(); ++i) close[i] = 10.0 + static_cast<double>(i);
    write(dir.path / "p.csv", price_csv(close));
    const auto r = run({"fit", "--prices", (dir.path / "p.csv").string(), "--out", dir.path.string()});
    CHECK(r.code == kValidationError);
    CHECK(r.err.find("insufficient") != std::string::npos);
}

TEST_CASE("malformed prices and bad config keys") {
    TempDir dir("malformed");
    write(dir.path / "p.csv", "date,close\n2020-01-02,1\n2020-01-02,2\n");
    CHECK(run({"fit", "--prices", (dir.path / "p.csv").string(), "--out", dir.path.string()}).code == kValidationError);
    write(dir.path / "c.toml", "[fit]\nbogus = 1\n");
    CHECK(run({"fit", "--config", (dir.path / "c.toml").string()}).code == kValidationError);
}

TEST_CASE("fit on the bundled synthetic fixture") {
    TempDir dir("fixture_fit");
    const auto r = run({"fit", "--prices", (kFixtures / "synth" / "prices.csv").string(), "--symbol", "SYN", "--out",
                        dir.path.string()});
    REQUIRE(r.code == 0);
    const auto fit = nlohmann::json::parse(read(dir.path / "SYN" / "fit.json"));
    const auto truth = nlohmann::json::parse(read(kFixtures / "synth" / "truth.json"));
    CHECK(std::fabs(fit.at("t_c").get<double>() - truth.at("t_c").get<double>()) <= 5.0);
    CHECK(fs::exists(dir.path / "SYN" / "residuals.csv"));
    CHECK(fs::exists(dir.path / "SYN" / "effective_config.toml"));
}

TEST_CASE("score with and without news") {
    TempDir dir("score");
    const auto prices = (kFixtures / "synth" / "prices.csv").string();
    const auto out = dir.path.string();
    REQUIRE(run({"fit", "--prices", prices, "--symbol", "SYN", "--out", out, "--restarts", "4"}).code == 0);

    const auto plain = run({"score", "--prices", prices, "--symbol", "SYN", "--out", out, "--alpha1", "0", "--alpha2", "0"});
    REQUIRE(plain.code == 0);
    CHECK(plain.out.find("warning") != std::string::npos);
    std::istringstream in(read(dir.path / "SYN" / "scores.csv"));
    const auto scores = read_scores_csv(in);
    CHECK(scores.score == scores.epsilon_norm);

    const auto full = run({"score", "--prices", prices, "--symbol", "SYN", "--out", out, "--news",
                           (kFixtures / "synth" / "news.csv").string(), "--features",
                           (kFixtures / "synth" / "features.csv").string()});
    REQUIRE(full.code == 0);
    for (const char* f : {"scores.csv", "signals.csv", "episodes.csv", "plot_data.csv", "residuals.csv"}) {
        CHECK(fs::exists(dir.path / "SYN" / f));
    }
    std::istringstream in2(read(dir.path / "SYN" / "scores.csv"));
    const auto with_news = read_scores_csv(in2);
    CHECK(with_news.score != with_news.epsilon_norm);
}

TEST_CASE("residuals that vanish are a numerical failure") {
    TempDir dir("degenerate");
    // Unit prices against a flat model: every residual is exactly zero.
    const LpplParams params{0.0, 0.0, 0.0, 140.0, 0.6, 7.0, 0.3};
    const std::vector<double> close(120, 1.0);
    const auto prices = oracle::prices(close);
    write(dir.path / "p.csv", price_csv(close));
    LpplFit fit;
    fit.params = params;
    fit.n_obs = close.size();
    fit.window_start = prices.dates.front();
    fit.window_end = prices.dates.back();
    fit.restarts_used = 1;
    std::ostringstream json;
    write_fit_json(json, fit);
    write(dir.path / "fit.json", json.str());
    const auto r = run({"score", "--prices", (dir.path / "p.csv").string(), "--fit", (dir.path / "fit.json").string(),
                        "--out", dir.path.string()});
    CHECK(r.code == kNumericalError);
    CHECK(r.err.find("degenerate") != std::string::npos);
}

TEST_CASE("scores that share no dates with prices are rejected") {
    TempDir dir("misaligned");
    write(dir.path / "p.csv", price_csv({100.0, 101.0, 102.0}));
    const auto later = oracle::prices({1.0, 1.0, 1.0}, Date::from_ymd(2030, 1, 1));
    std::ostringstream s;
    s << "date,epsilon_norm,hype,sentiment,bubble_score\n";
    for (const auto& d : later.dates) s << d.iso() << ",0,0,0,0\n";
    write(dir.path / "s.csv", s.str());
    const auto r = run({"backtest", "--prices", (dir.path / "p.csv").string(), "--scores", (dir.path / "s.csv").string(),
                        "--out", dir.path.string()});
    CHECK(r.code == kValidationError);
}

TEST_CASE("label a twelve-day run") {
    TempDir dir("label");
    std::vector<double> s(40, 0.0);
    for (std::size_t i = 10; i < 22; ++i) s[i] = 0.9;
    write(dir.path / "scores.csv", score_csv(s));
    const auto r = run({"label", "--scores", (dir.path / "scores.csv").string(), "--out", dir.path.string()});
    REQUIRE(r.code == 0);
    std::istringstream in(read(dir.path / "SYM" / "episodes.csv"));
    const auto eps = read_episodes_csv(in);
    REQUIRE(eps.size() == 1);
    CHECK(eps[0].duration == 12);
    CHECK(eps[0].type == EpisodeType::normal);
}

TEST_CASE("backtest reproduces the worked ledger") {
    TempDir dir("ledger");
    write(dir.path / "p.csv", price_csv({100.0, 105.0, 110.0}));
    write(dir.path / "s.csv", score_csv({-0.8, -0.5, -0.2}));
    const auto r = run({"backtest", "--prices", (dir.path / "p.csv").string(), "--scores",
                        (dir.path / "s.csv").string(), "--out", dir.path.string()});
    REQUIRE(r.code == 0);
    const auto report = nlohmann::json::parse(read(dir.path / "SYM" / "strategy_report.json"));
    CHECK(std::fabs(report.at("metrics").at("final_equity").get<double>() - 1.04895) <= 1e-10);
    REQUIRE(report.at("trades").size() == 1);
    CHECK(fs::exists(dir.path / "SYM" / "benchmark_report.json"));
}

TEST_CASE("flat prices lose only costs") {
    TempDir dir("flat");
    write(dir.path / "p.csv", price_csv(std::vector<double>(50, 10.0)));
    std::vector<double> s(50, 0.0);
    for (std::size_t i = 5; i < 15; ++i) s[i] = -0.9;
    write(dir.path / "s.csv", score_csv(s));
    REQUIRE(run({"backtest", "--prices", (dir.path / "p.csv").string(), "--scores", (dir.path / "s.csv").string(),
                 "--out", dir.path.string()})
                .code == 0);
    const auto strat = nlohmann::json::parse(read(dir.path / "SYM" / "strategy_report.json"));
    const auto bench = nlohmann::json::parse(read(dir.path / "SYM" / "benchmark_report.json"));
    CHECK(strat.at("metrics").at("cumulative_return").get<double>() == doctest::Approx(-0.001).epsilon(1e-9));
    CHECK(bench.at("metrics").at("cumulative_return").get<double>() == doctest::Approx(-0.002).epsilon(1e-9));
}

TEST_CASE("multi-horizon backtest writes five reports") {
    TempDir dir("multi");
    std::vector<double> close(80), s(80);
    for (std::size_t i = 0; i < close.size(); ++i) {
        close[i] = 50.0 + 5.0 * std::sin(0.2 * static_cast<double>(i));
        s[i] = std::sin(0.2 * static_cast<double>(i) + 1.0);
    }
    write(dir.path / "p.csv", price_csv(close));
    write(dir.path / "s.csv", score_csv(s));
    const auto r = run({"backtest", "--prices", (dir.path / "p.csv").string(), "--scores",
                        (dir.path / "s.csv").string(), "--out", dir.path.string(), "--horizon-mode", "baseline"});
    REQUIRE(r.code == 0);
    for (int h = 1; h <= 5; ++h) CHECK(fs::exists(dir.path / "SYM" / ("h" + std::to_string(h) + "_equity.csv")));
    CHECK(fs::exists(dir.path / "SYM" / "best_horizon.json"));
    CHECK(fs::exists(dir.path / "SYM" / "forecasts.csv"));

    const auto single = run({"backtest", "--prices", (dir.path / "p.csv").string(), "--scores",
                             (dir.path / "s.csv").string(), "--out", dir.path.string(), "--horizon-mode",
                             "forecasts", "--forecasts", (dir.path / "SYM" / "forecasts.csv").string(), "--horizon", "3"});
    CHECK(single.code == 0);

    const auto rep = run({"report", "--out", dir.path.string(), "--scores", (dir.path / "s.csv").string()});
    REQUIRE(rep.code == 0);
    CHECK(rep.out.find("h5") != std::string::npos);
    const auto summary = nlohmann::json::parse(read(dir.path / "SYM" / "summary.json"));
    CHECK(summary.contains("forecast_metrics"));
}

TEST_CASE("flags override the config file") {
    TempDir dir("override");
    write(dir.path / "p.csv", price_csv({100.0, 105.0, 110.0}));
    write(dir.path / "s.csv", score_csv({-0.8, -0.5, -0.2}));
    write(dir.path / "c.toml", "[strategy]\nmax_position = 1.0\ntransaction_cost = 0.0\n[output]\ndir = \"" +
                                   dir.path.generic_string() + "\"\n");
    REQUIRE(run({"backtest", "--config", (dir.path / "c.toml").string(), "--prices", (dir.path / "p.csv").string(),
                 "--scores", (dir.path / "s.csv").string(), "--max-position", "0.5"})
                .code == 0);
    const auto report = nlohmann::json::parse(read(dir.path / "SYM" / "strategy_report.json"));
    CHECK(report.at("metrics").at("final_equity").get<double>() == doctest::Approx(1.05));
    const auto echoed = parse_config(read(dir.path / "SYM" / "effective_config.toml"));
    CHECK(echoed.strategy.max_position == 0.5);
    CHECK(echoed.strategy.transaction_cost == 0.0);
}

TEST_CASE("synth writes a reproducible dataset") {
    TempDir dir("synth");
    REQUIRE(run({"synth", "--out", (dir.path / "a").string(), "--seed", "4", "--length", "150"}).code == 0);
    REQUIRE(run({"synth", "--out", (dir.path / "b").string(), "--seed", "4", "--length", "150"}).code == 0);
    for (const char* f : {"prices.csv", "news.csv", "features.csv", "truth.json"}) {
        CHECK(read(dir.path / "a" / f) == read(dir.path / "b" / f));
    }
    CHECK(run({"synth", "--out", (dir.path / "c").string(), "--noise", "pink"}).code == kValidationError);
}

}
