#include <optional>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hlppl/backtest.hpp"
#include "hlppl/error.hpp"
#include "hlppl/forecast.hpp"
#include "hlppl/ingestion.hpp"
#include "hlppl/lppl.hpp"
#include "hlppl/residual.hpp"
#include "hlppl/score.hpp"
#include "hlppl/signals.hpp"
#include "hlppl/synth.hpp"

namespace py = pybind11;
using namespace hlppl;

namespace {

std::vector<Date> parse_dates(const std::vector<std::string>& iso) {
    std::vector<Date> out;
    out.reserve(iso.size());
    for (const auto& s : iso) out.push_back(Date::parse(s));
    return out;
}

std::vector<std::string> iso_dates(const std::vector<Date>& dates) {
    std::vector<std::string> out;
    out.reserve(dates.size());
    for (const auto& d : dates) out.push_back(d.iso());
    return out;
}

PriceSeries make_prices(const std::vector<std::string>& dates, const std::vector<double>& close) {
    PriceSeries p;
    p.symbol = "PY";
    p.dates = parse_dates(dates);
    p.close = close;
    p.validate();
    return p;
}

py::dict metrics_dict(const PerformanceMetrics& m) {
    py::dict d;
    d["cumulative_return"] = m.cumulative_return;
    d["annualized_return"] = m.annualized_return;
    d["sharpe_ratio"] = m.sharpe_ratio ? py::cast(*m.sharpe_ratio) : py::none();
    d["max_drawdown"] = m.max_drawdown;
    d["win_rate"] = m.win_rate;
    d["trade_count"] = m.trade_count;
    d["n_days"] = m.n_days;
    return d;
}

py::dict report_dict(const BacktestReport& r) {
    py::dict d;
    d["label"] = r.label;
    d["dates"] = iso_dates(r.dates);
    d["equity"] = r.equity;
    py::list trades;
    for (const auto& t : r.trades) {
        py::dict row;
        row["direction"] = to_string(t.direction);
        row["entry_date"] = t.entry_date.iso();
        row["exit_date"] = t.exit_date.iso();
        row["entry_price"] = t.entry_price;
        row["exit_price"] = t.exit_price;
        row["exit_reason"] = to_string(t.exit_reason);
        row["return_net"] = t.return_net;
        trades.append(row);
    }
    d["trades"] = trades;
    d["metrics"] = metrics_dict(r.metrics);
    return d;
}

}  // namespace

PYBIND11_MODULE(hlppl, m) {
    m.doc() = "LPPL bubble fitting, behavioral Bubble Scores and threshold backtests";

    static py::exception<Error> error(m, "Error", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::set_error(error, (std::string(to_string(e.kind())) + ": " + e.what()).c_str());
        }
    });

    py::class_<LpplParams>(m, "LpplParams")
        .def(py::init<>())
        .def(py::init([](double A, double B, double C, double tc, double m_, double omega, double phi) {
                 return LpplParams{A, B, C, tc, m_, omega, phi};
             }),
             py::arg("A"), py::arg("B"), py::arg("C"), py::arg("tc"), py::arg("m"), py::arg("omega"), py::arg("phi"))
        .def_readwrite("A", &LpplParams::A)
        .def_readwrite("B", &LpplParams::B)
        .def_readwrite("C", &LpplParams::C)
        .def_readwrite("tc", &LpplParams::tc)
        .def_readwrite("m", &LpplParams::m)
        .def_readwrite("omega", &LpplParams::omega)
        .def_readwrite("phi", &LpplParams::phi)
        .def("__repr__", [](const LpplParams& p) {
            return "LpplParams(tc=" + std::to_string(p.tc) + ", m=" + std::to_string(p.m) +
                   ", omega=" + std::to_string(p.omega) + ")";
        });

    py::class_<FitConfig>(m, "FitConfig")
        .def(py::init<>())
        .def_readwrite("restarts", &FitConfig::restarts)
        .def_readwrite("tc_search", &FitConfig::tc_search)
        .def_readwrite("m_bounds", &FitConfig::m_bounds)
        .def_readwrite("omega_bounds", &FitConfig::omega_bounds)
        .def_readwrite("max_iterations", &FitConfig::max_iterations)
        .def_readwrite("convergence_tolerance", &FitConfig::convergence_tolerance)
        .def_readwrite("rng_seed", &FitConfig::rng_seed)
        .def_readwrite("min_window", &FitConfig::min_window);

    py::class_<LpplFit>(m, "LpplFit")
        .def_readonly("params", &LpplFit::params)
        .def_readonly("sse", &LpplFit::sse)
        .def_readonly("rmse", &LpplFit::rmse)
        .def_readonly("n_obs", &LpplFit::n_obs)
        .def_readonly("restarts_used", &LpplFit::restarts_used)
        .def_property_readonly("window_start", [](const LpplFit& f) { return f.window_start.iso(); })
        .def_property_readonly("window_end", [](const LpplFit& f) { return f.window_end.iso(); });

    m.def("lppl_eval", &lppl_eval, py::arg("params"), py::arg("t"));
    m.def(
        "linear_subfit",
        [](double tc, double m_, double omega, const std::vector<double>& log_prices) {
            const auto s = linear_subfit(tc, m_, omega, log_prices);
            py::dict d;
            d["A"] = s.A;
            d["B"] = s.B;
            d["C1"] = s.C1;
            d["C2"] = s.C2;
            d["C"] = s.C;
            d["phi"] = s.phi;
            d["sse"] = s.sse;
            return d;
        },
        py::arg("tc"), py::arg("m"), py::arg("omega"), py::arg("log_prices"));
    m.def(
        "fit_lppl_log", [](const std::vector<double>& y, const FitConfig& c) { return fit_lppl_log(y, c); },
        py::arg("log_prices"), py::arg("config") = FitConfig{});
    m.def(
        "fit_lppl",
        [](const std::vector<std::string>& dates, const std::vector<double>& close, const FitConfig& c) {
            return fit_lppl(make_prices(dates, close), c);
        },
        py::arg("dates"), py::arg("close"), py::arg("config") = FitConfig{});

    py::class_<Ar1Estimate>(m, "Ar1Estimate")
        .def_readonly("alpha", &Ar1Estimate::alpha)
        .def_readonly("noise_std", &Ar1Estimate::noise_std)
        .def_readonly("half_life", &Ar1Estimate::half_life)
        .def_readonly("r_squared", &Ar1Estimate::r_squared)
        .def_readonly("n_obs", &Ar1Estimate::n_obs);
    m.def(
        "fit_ar1", [](const std::vector<double>& eps, std::size_t min_obs) { return fit_ar1(eps, min_obs); },
        py::arg("epsilon"), py::arg("min_observations") = kMinAr1Observations);
    m.def(
        "normalize_residuals",
        [](const std::vector<double>& eps, const std::string& mode) {
            return normalize_residuals(eps, parse_normalization_mode(mode));
        },
        py::arg("epsilon"), py::arg("mode") = "global");

    m.def(
        "hype_index",
        [](const std::map<std::string, long long>& counts, const std::string& symbol) {
            return hype_index(counts, symbol).value;
        },
        py::arg("counts"), py::arg("symbol"));
    m.def(
        "cap_adjusted_hype",
        [](double hype, const std::map<std::string, double>& caps, const std::string& symbol) {
            return cap_adjusted_hype(hype, caps, symbol).value;
        },
        py::arg("hype"), py::arg("market_caps"), py::arg("symbol"));
    m.def(
        "sentiment_score",
        [](const std::vector<std::pair<double, double>>& polarity_weight) {
            std::vector<NewsArticleRecord> news;
            for (const auto& [p, w] : polarity_weight) {
                NewsArticleRecord a;
                a.polarity = p;
                a.weight = w;
                news.push_back(a);
            }
            return sentiment_score(news).value;
        },
        py::arg("articles"), "Weighted mean polarity of (polarity, weight) pairs.");

    m.def(
        "compose_score",
        [](double eps, double hype, double sentiment, double alpha1, double alpha2) {
            return compose_score(eps, hype, sentiment, ScoreParams{alpha1, alpha2});
        },
        py::arg("epsilon_norm"), py::arg("hype"), py::arg("sentiment"), py::arg("alpha1") = 0.2,
        py::arg("alpha2") = 0.2);
    m.def(
        "label_episodes",
        [](const std::vector<double>& score, double tau, std::size_t d_min) {
            std::vector<Date> dates(score.size());
            for (std::size_t i = 0; i < dates.size(); ++i) dates[i] = Date(static_cast<std::int32_t>(i));
            py::list out;
            for (const auto& e : label_episodes(score, dates, LabelConfig{tau, d_min})) {
                py::dict d;
                d["start"] = e.start_index;
                d["end"] = e.end_index;
                d["type"] = to_string(e.type);
                d["duration"] = e.duration;
                d["intensity"] = e.intensity;
                out.append(d);
            }
            return out;
        },
        py::arg("score"), py::arg("tau") = 0.8, py::arg("d_min") = 10);

    py::class_<StrategyConfig>(m, "StrategyConfig")
        .def(py::init<>())
        .def_readwrite("theta1", &StrategyConfig::theta1)
        .def_readwrite("theta2", &StrategyConfig::theta2)
        .def_readwrite("stop_loss", &StrategyConfig::stop_loss)
        .def_readwrite("max_position", &StrategyConfig::max_position)
        .def_readwrite("transaction_cost", &StrategyConfig::transaction_cost)
        .def_readwrite("discount_rate", &StrategyConfig::discount_rate)
        .def_property(
            "execution", [](const StrategyConfig& c) { return std::string(to_string(c.execution)); },
            [](StrategyConfig& c, const std::string& v) { c.execution = parse_execution(v); });

    m.def(
        "run_backtest",
        [](const std::vector<std::string>& dates, const std::vector<double>& close, const std::vector<double>& signal,
           const StrategyConfig& config, std::optional<std::vector<double>> next_horizon) {
            const auto prices = make_prices(dates, close);
            return report_dict(run_backtest(prices, {prices.dates, signal, std::move(next_horizon)}, config));
        },
        py::arg("dates"), py::arg("close"), py::arg("signal"), py::arg("config") = StrategyConfig{},
        py::arg("next_horizon") = std::nullopt);
    m.def(
        "buy_and_hold",
        [](const std::vector<std::string>& dates, const std::vector<double>& close, const StrategyConfig& config) {
            return report_dict(buy_and_hold_benchmark(make_prices(dates, close), config));
        },
        py::arg("dates"), py::arg("close"), py::arg("config") = StrategyConfig{});
    m.def(
        "max_drawdown", [](const std::vector<double>& equity) { return max_drawdown(equity); }, py::arg("equity"));
    m.def(
        "performance_metrics",
        [](const std::vector<double>& equity, double discount_rate) {
            StrategyConfig c;
            c.discount_rate = discount_rate;
            return metrics_dict(performance_metrics(equity, {}, c));
        },
        py::arg("equity"), py::arg("discount_rate") = 0.02);

    m.def(
        "baseline_forecast",
        [](const std::vector<double>& score, int h, std::optional<double> alpha) {
            return baseline_forecast(score, h, alpha ? *alpha : estimate_baseline_alpha(score));
        },
        py::arg("score"), py::arg("horizon"), py::arg("alpha") = std::nullopt);

    py::class_<LossWeights>(m, "LossWeights")
        .def(py::init<>())
        .def_readwrite("lambda1", &LossWeights::lambda1)
        .def_readwrite("lambda2", &LossWeights::lambda2)
        .def_readwrite("lambda3", &LossWeights::lambda3)
        .def_readwrite("lambda4", &LossWeights::lambda4)
        .def_readwrite("lambda5", &LossWeights::lambda5)
        .def_readwrite("huber_delta", &LossWeights::huber_delta);
    m.def(
        "eval_metrics",
        [](const std::vector<double>& p, const std::vector<double>& a) {
            const auto e = eval_metrics(p, a);
            py::dict d;
            d["correlation"] = e.correlation ? py::cast(*e.correlation) : py::none();
            d["mse"] = e.mse;
            d["mae"] = e.mae;
            d["rmse"] = e.rmse;
            return d;
        },
        py::arg("predicted"), py::arg("actual"));
    m.def(
        "combined_loss",
        [](const std::vector<double>& p, const std::vector<double>& a, const LossWeights& w) {
            return combined_loss(p, a, w).total;
        },
        py::arg("predicted"), py::arg("actual"), py::arg("weights") = LossWeights{});
    m.def(
        "loss_gradient",
        [](const std::vector<double>& p, const std::vector<double>& a, const LossWeights& w) {
            return loss_gradient(p, a, w).gradient;
        },
        py::arg("predicted"), py::arg("actual"), py::arg("weights") = LossWeights{});

    m.def(
        "synthesize",
        [](std::uint64_t seed, std::size_t length, const std::string& noise, double sigma, double alpha) {
            SynthConfig c;
            c.seed = seed;
            c.length = length;
            c.noise_sigma = sigma;
            c.ar1_alpha = alpha;
            c.with_news = false;
            if (noise == "none") c.noise = SynthNoise::none;
            else if (noise == "iid") c.noise = SynthNoise::iid;
            else if (noise == "ar1") c.noise = SynthNoise::ar1;
            else fail(ErrorKind::contract, "noise must be none, iid or ar1");
            const auto r = synthesize(c);
            py::dict d;
            d["dates"] = iso_dates(r.prices.dates);
            d["close"] = r.prices.close;
            d["truth"] = r.truth;
            d["residual"] = r.residual;
            return d;
        },
        py::arg("seed") = 7, py::arg("length") = 300, py::arg("noise") = "ar1", py::arg("sigma") = 0.01,
        py::arg("alpha") = 0.1);
}
