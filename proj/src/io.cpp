#include "hlppl/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "csv.hpp"
#include "hlppl/error.hpp"

namespace hlppl {

using ojson = nlohmann::ordered_json;

std::string format_number(double x) {
    if (x == 0.0) return "0";  // no "-0"
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

double round_significant(double x) {
    bool ok = false;
    return csv::parse_double(format_number(x), ok);
}

namespace {

ojson number(double x) { return std::isfinite(x) ? ojson(round_significant(x)) : ojson(nullptr); }

double get_number(const ojson& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number()) fail(ErrorKind::parse, std::string("fit JSON: missing numeric field '") + key + "'");
    return j[key].get<double>();
}

}  // namespace

void write_fit_json(std::ostream& out, const LpplFit& fit) {
    ojson j;
    j["A"] = number(fit.params.A);
    j["B"] = number(fit.params.B);
    j["C"] = number(fit.params.C);
    j["t_c"] = number(fit.params.tc);
    j["m"] = number(fit.params.m);
    j["omega"] = number(fit.params.omega);
    j["phi"] = number(fit.params.phi);
    j["sse"] = number(fit.sse);
    j["rmse"] = number(fit.rmse);
    j["window_start"] = fit.window_start.iso();
    j["window_end"] = fit.window_end.iso();
    j["n_obs"] = fit.n_obs;
    j["restarts_used"] = fit.restarts_used;
    out << j.dump(2) << '\n';
}

LpplFit read_fit_json(std::istream& in) {
    ojson j;
    try {
        j = ojson::parse(in);
    } catch (const std::exception& e) {
        fail(ErrorKind::parse, std::string("fit JSON: ") + e.what());
    }
    LpplFit fit;
    fit.params.A = get_number(j, "A");
    fit.params.B = get_number(j, "B");
    fit.params.C = get_number(j, "C");
    fit.params.tc = get_number(j, "t_c");
    fit.params.m = get_number(j, "m");
    fit.params.omega = get_number(j, "omega");
    fit.params.phi = get_number(j, "phi");
    fit.sse = get_number(j, "sse");
    fit.rmse = get_number(j, "rmse");
    if (!j.contains("window_start") || !j.contains("window_end")) fail(ErrorKind::parse, "fit JSON: missing window");
    fit.window_start = Date::parse(j["window_start"].get<std::string>());
    fit.window_end = Date::parse(j["window_end"].get<std::string>());
    fit.n_obs = j.value("n_obs", std::size_t{0});
    fit.restarts_used = j.value("restarts_used", 0);
    return fit;
}

void write_residuals_csv(std::ostream& out, const ResidualSeries& r) {
    out << "date,epsilon,epsilon_norm\n";
    for (std::size_t i = 0; i < r.size(); ++i) {
        out << r.dates[i].iso() << ',' << format_number(r.epsilon[i]) << ','
            << (i < r.epsilon_norm.size() ? format_number(r.epsilon_norm[i]) : std::string()) << '\n';
    }
}

void write_signals_csv(std::ostream& out, const SignalSeries& s) {
    out << "date,hype,cap_hype,sentiment,s_pos,s_neu,s_neg\n";
    for (const auto& r : s.rows) {
        out << r.date.iso() << ',' << format_number(r.hype) << ','
            << (r.cap_hype ? format_number(*r.cap_hype) : std::string()) << ',' << format_number(r.sentiment) << ','
            << format_number(r.shares.positive) << ',' << format_number(r.shares.neutral) << ','
            << format_number(r.shares.negative) << '\n';
    }
}

void write_scores_csv(std::ostream& out, const ScoreSeries& s) {
    out << "date,epsilon_norm,hype,sentiment,bubble_score\n";
    for (std::size_t i = 0; i < s.size(); ++i) {
        out << s.dates[i].iso() << ',' << format_number(s.epsilon_norm[i]) << ',' << format_number(s.hype[i]) << ','
            << format_number(s.sentiment[i]) << ',' << format_number(s.score[i]) << '\n';
    }
}

ScoreSeries read_scores_csv(std::istream& in, const std::string& source) {
    csv::Table t(in, source);
    t.require({"date", "epsilon_norm", "hype", "sentiment", "bubble_score"});
    ScoreSeries s;
    while (t.next()) {
        try {
            s.dates.push_back(Date::parse(t.text("date")));
        } catch (const Error& e) {
            t.error(e.what());
        }
        s.epsilon_norm.push_back(t.number("epsilon_norm"));
        s.hype.push_back(t.number("hype"));
        s.sentiment.push_back(t.number("sentiment"));
        s.score.push_back(t.number("bubble_score"));
    }
    return s;
}

void write_episodes_csv(std::ostream& out, const std::vector<Episode>& episodes) {
    out << "start,end,type,duration,intensity\n";
    for (const auto& e : episodes) {
        out << e.start_date.iso() << ',' << e.end_date.iso() << ',' << to_string(e.type) << ',' << e.duration << ','
            << format_number(e.intensity) << '\n';
    }
}

std::vector<Episode> read_episodes_csv(std::istream& in, const std::string& source) {
    csv::Table t(in, source);
    t.require({"start", "end", "type", "duration", "intensity"});
    std::vector<Episode> out;
    while (t.next()) {
        Episode e;
        try {
            e.start_date = Date::parse(t.text("start"));
            e.end_date = Date::parse(t.text("end"));
            e.type = parse_episode_type(t.text("type"));
        } catch (const Error& err) {
            t.error(err.what());
        }
        e.duration = static_cast<std::size_t>(t.integer("duration"));
        e.intensity = t.number("intensity");
        out.push_back(e);
    }
    return out;
}

void write_plot_data_csv(std::ostream& out, const PriceSeries& prices, const LpplFit& fit, const ScoreSeries& scores,
                         const std::vector<Episode>& episodes) {
    std::map<Date, std::size_t> price_index;
    for (std::size_t i = 0; i < prices.size(); ++i) price_index[prices.dates[i]] = i;
    const auto first = price_index.find(fit.window_start);

    out << "date,close,log_price,lppl_fit,epsilon_norm,bubble_score,normal_episode,negative_episode\n";
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const Date d = scores.dates[i];
        const auto it = price_index.find(d);
        out << d.iso() << ',';
        if (it != price_index.end()) {
            const double close = prices.close[it->second];
            out << format_number(close) << ',' << format_number(std::log(close)) << ',';
            if (first != price_index.end() && it->second >= first->second) {
                const auto t = static_cast<double>(it->second - first->second);
                out << (t < fit.params.tc ? format_number(lppl_eval(fit.params, t)) : std::string());
            }
        } else {
            out << ",,";
        }
        int normal = 0;
        int negative = 0;
        for (const auto& e : episodes) {
            if (d >= e.start_date && d <= e.end_date) (e.type == EpisodeType::normal ? normal : negative) = 1;
        }
        out << ',' << format_number(scores.epsilon_norm[i]) << ',' << format_number(scores.score[i]) << ',' << normal
            << ',' << negative << '\n';
    }
}

void write_equity_csv(std::ostream& out, const BacktestReport& report) {
    out << "date,equity\n";
    for (std::size_t i = 0; i < report.equity.size(); ++i) {
        out << report.dates[i].iso() << ',' << format_number(report.equity[i]) << '\n';
    }
}

void write_report_json(std::ostream& out, const BacktestReport& report, const StrategyConfig& config) {
    ojson j;
    j["label"] = report.label;
    j["config"] = {{"theta1", number(config.theta1)},
                   {"theta2", number(config.theta2)},
                   {"stop_loss", number(config.stop_loss)},
                   {"max_position", number(config.max_position)},
                   {"transaction_cost", number(config.transaction_cost)},
                   {"discount_rate", number(config.discount_rate)},
                   {"horizon", config.horizon},
                   {"execution", to_string(config.execution)}};
    const auto& m = report.metrics;
    j["metrics"] = {{"cumulative_return", number(m.cumulative_return)},
                    {"annualized_return", number(m.annualized_return)},
                    {"sharpe_ratio", m.sharpe_ratio ? number(*m.sharpe_ratio) : ojson(nullptr)},
                    {"max_drawdown", number(m.max_drawdown)},
                    {"win_rate", number(m.win_rate)},
                    {"trade_count", m.trade_count},
                    {"n_days", m.n_days},
                    {"final_equity", report.equity.empty() ? ojson(nullptr) : number(report.equity.back())}};
    ojson trades = ojson::array();
    for (const auto& t : report.trades) {
        trades.push_back({{"direction", to_string(t.direction)},
                          {"entry_date", t.entry_date.iso()},
                          {"entry_price", number(t.entry_price)},
                          {"exit_date", t.exit_date.iso()},
                          {"exit_price", number(t.exit_price)},
                          {"exit_reason", to_string(t.exit_reason)},
                          {"notional", number(t.notional)},
                          {"return_net", number(t.return_net)}});
    }
    j["trades"] = std::move(trades);
    out << j.dump(2) << '\n';
}

void write_forecasts_csv(std::ostream& out, const ForecastSet& f) {
    out << "date,h1,h2,h3,h4,h5\n";
    for (std::size_t i = 0; i < f.size(); ++i) {
        out << f.dates[i].iso();
        for (const auto& col : f.predictions) out << ',' << format_number(col[i]);
        out << '\n';
    }
}

ForecastSet read_forecasts_csv(std::istream& in, const std::string& source) {
    csv::Table t(in, source);
    t.require({"date"});
    for (int h = 1; h <= kMaxHorizon; ++h) {
        if (!t.has("h" + std::to_string(h))) {
            fail(ErrorKind::contract, source + ": missing horizon column h" + std::to_string(h));
        }
    }
    ForecastSet f;
    f.source = source;
    while (t.next()) {
        try {
            f.dates.push_back(Date::parse(t.text("date")));
        } catch (const Error& e) {
            t.error(e.what());
        }
        for (int h = 1; h <= kMaxHorizon; ++h) {
            f.predictions[static_cast<std::size_t>(h - 1)].push_back(t.number("h" + std::to_string(h)));
        }
    }
    return f;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) fail(ErrorKind::io, "cannot create directory " + path.parent_path().string());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::io, "cannot write " + path.string());
    out << content;
    if (!out) fail(ErrorKind::io, "write failed for " + path.string());
}

}  // namespace hlppl
