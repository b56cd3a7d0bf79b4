#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "hlppl/backtest.hpp"
#include "hlppl/error.hpp"
#include "hlppl/rng.hpp"
#include "oracles.hpp"

using namespace hlppl;

namespace {

SignalInput signal_for(const PriceSeries& p, std::vector<double> values) {
    return {p.dates, std::move(values), std::nullopt};
}

// Random walk prices with regime-like scores.
struct RandomFixture {
    PriceSeries prices;
    std::vector<double> scores;
};

RandomFixture random_fixture(std::uint64_t seed, std::size_t n) {
    Rng rng(seed);
    std::vector<double> close(n);
    close[0] = 100.0;
    for (std::size_t t = 1; t < n; ++t) close[t] = close[t - 1] * std::exp(rng.normal(0.0, 0.03));
    RandomFixture f{oracle::prices(close), std::vector<double>(n)};
    double level = 0.0;
    for (auto& s : f.scores) {
        if (rng.uniform() < 0.15) level = rng.uniform(-1.2, 1.2);
        s = std::clamp(level + rng.normal(0.0, 0.2), -2.0, 2.0);
    }
    return f;
}

ForecastSet forecasts_from(const PriceSeries& p, const std::array<std::vector<double>, kMaxHorizon>& cols) {
    ForecastSet f;
    f.dates = p.dates;
    f.predictions = cols;
    return f;
}

}  // namespace

TEST_SUITE("backtest") {

TEST_CASE("threshold state machine") {
    const StrategyConfig cfg;
    const std::vector<double> down{-0.8, -0.5, -0.2};
    CHECK(generate_signals(down, cfg) ==
          std::vector<SignalEvent>{{0, SignalKind::long_entry}, {2, SignalKind::long_exit}});
    const std::vector<double> up{0.75, 0.4, 0.2};
    CHECK(generate_signals(up, cfg) ==
          std::vector<SignalEvent>{{0, SignalKind::short_entry}, {2, SignalKind::short_exit}});
    const std::vector<double> quiet{0.69, -0.69, 0.0, 0.5};
    CHECK(generate_signals(quiet, cfg).empty());
    // No re-entry on the exit bar.
    const std::vector<double> flip{-0.8, 0.9, 0.9};
    CHECK(generate_signals(flip, cfg) ==
          std::vector<SignalEvent>{{0, SignalKind::long_entry}, {1, SignalKind::long_exit}, {2, SignalKind::short_entry}});
}

TEST_CASE("reversal exit on sign flips") {
    const std::vector<double> flip{0.5, -0.1};
    CHECK(apply_reversal_exit(flip, 1, true));
    CHECK_FALSE(apply_reversal_exit(flip, 1, false));
    const std::vector<double> same{0.5, 0.4};
    CHECK_FALSE(apply_reversal_exit(same, 1, true));
    const std::vector<double> zero{0.0, -0.5};
    CHECK_FALSE(apply_reversal_exit(zero, 1, true));
    const std::vector<double> five{0.1, 0.2, 0.3, 0.4, -0.5};
    CHECK(apply_reversal_exit(five, 4, true));
    CHECK_FALSE(apply_reversal_exit(five, 5, true));
}

TEST_CASE("flat prices without signals") {
    const auto p = oracle::prices(std::vector<double>(20, 50.0));
    const auto r = run_backtest(p, signal_for(p, std::vector<double>(20, 0.1)), {});
    CHECK(r.trades.empty());
    for (double e : r.equity) CHECK(e == 1.0);
    CHECK(r.metrics.cumulative_return == 0.0);
    CHECK_FALSE(r.metrics.sharpe_ratio.has_value());
    CHECK(r.metrics.win_rate == 0.0);
}

TEST_CASE("worked one-trade ledger") {
    const auto p = oracle::prices({100.0, 105.0, 110.0});
    const auto r = run_backtest(p, signal_for(p, {-0.8, -0.5, -0.2}), {});
    const auto expected = oracle::one_long_trade(100.0, 110.0, 0.5, 0.001);
    REQUIRE(r.trades.size() == 1);
    const auto& t = r.trades[0];
    CHECK(t.direction == Direction::long_position);
    CHECK(t.entry_price == 100.0);
    CHECK(t.exit_price == 110.0);
    CHECK(t.exit_reason == ExitReason::threshold);
    CHECK(std::fabs(r.equity.back() - expected.final_equity) <= 1e-10);
    CHECK(std::fabs(r.equity.back() - 1.04895) <= 1e-10);
    CHECK(std::fabs(t.return_net - expected.return_net) <= 1e-10);
    CHECK(std::fabs(r.equity[0] - (1.0 - 0.0005)) <= 1e-12);
    CHECK(std::fabs(r.equity[1] - (1.0 - 0.0005 + 0.025)) <= 1e-12);
}

TEST_CASE("short trade profits from a fall") {
    const auto p = oracle::prices({100.0, 95.0, 90.0});
    StrategyConfig cfg;
    cfg.transaction_cost = 0.0;
    const auto r = run_backtest(p, signal_for(p, {0.9, 0.5, 0.1}), cfg);
    REQUIRE(r.trades.size() == 1);
    CHECK(r.trades[0].direction == Direction::short_position);
    CHECK(r.equity.back() == doctest::Approx(1.05).epsilon(1e-14));
}

TEST_CASE("stop-loss on a 16 percent drop") {
    const auto p = oracle::prices({100.0, 95.0, 90.0, 84.0, 80.0, 79.0});
    const auto r = run_backtest(p, signal_for(p, std::vector<double>(6, -0.8)), {});
    REQUIRE(r.trades.size() == 2);
    CHECK(r.trades[0].exit_reason == ExitReason::stop_loss);
    CHECK(r.trades[0].exit_index == 3);
    CHECK(r.trades[0].exit_price == 84.0);
    CHECK(r.trades[0].return_net < 0.0);
    // No re-entry on the stop bar; the score still asks for a long on the next one.
    CHECK(r.trades[1].entry_index == 4);
    CHECK(r.trades[1].exit_reason == ExitReason::end_of_data);
}

TEST_CASE("stop-loss at exactly the threshold") {
    const auto p = oracle::prices({100.0, 85.0, 85.0});
    const auto r = run_backtest(p, signal_for(p, std::vector<double>(3, -0.8)), {});
    REQUIRE(!r.trades.empty());
    CHECK(r.trades[0].exit_reason == ExitReason::stop_loss);
    CHECK(r.trades[0].exit_index == 1);
}

TEST_CASE("open positions close on the last bar") {
    const auto p = oracle::prices({100.0, 101.0, 102.0, 103.0});
    StrategyConfig cfg;
    cfg.transaction_cost = 0.0;
    const auto r = run_backtest(p, signal_for(p, std::vector<double>(4, -0.9)), cfg);
    REQUIRE(r.trades.size() == 1);
    CHECK(r.trades[0].exit_reason == ExitReason::end_of_data);
    CHECK(r.equity.back() == doctest::Approx(1.015).epsilon(1e-14));
    // No entry on the last bar.
    const auto late = run_backtest(p, signal_for(p, {0.0, 0.0, 0.0, -0.9}), cfg);
    CHECK(late.trades.empty());
}

TEST_CASE("next-close execution fills a bar later") {
    const auto p = oracle::prices({100.0, 104.0, 108.0, 112.0, 116.0});
    StrategyConfig cfg;
    cfg.execution = Execution::next_close;
    cfg.transaction_cost = 0.0;
    const auto r = run_backtest(p, signal_for(p, {-0.8, -0.5, -0.2, 0.0, 0.0}), cfg);
    REQUIRE(r.trades.size() == 1);
    CHECK(r.trades[0].entry_index == 1);
    CHECK(r.trades[0].exit_index == 3);
    CHECK(r.trades[0].exit_price == 112.0);
    CHECK(parse_execution("next_close") == Execution::next_close);
}

TEST_CASE("reversal exit inside the backtest") {
    const auto p = oracle::prices({100.0, 101.0, 102.0, 103.0, 104.0});
    SignalInput in = signal_for(p, {-0.8, -0.8, -0.8, -0.8, -0.8});
    in.next_horizon = std::vector<double>{-0.5, -0.5, 0.2, -0.5, -0.5};
    const auto r = run_backtest(p, in, {});
    REQUIRE(r.trades.size() == 2);
    CHECK(r.trades[0].exit_reason == ExitReason::reversal);
    CHECK(r.trades[0].exit_index == 2);
    CHECK(r.trades[1].entry_index == 3);
}

TEST_CASE("signals and prices are joined on dates") {
    auto p = oracle::prices({100.0, 101.0, 102.0, 103.0});
    SignalInput in{{p.dates[1], p.dates[2], p.dates[3] + 5}, {0.0, 0.0, 0.0}, std::nullopt};
    const auto r = run_backtest(p, in, {});
    CHECK(r.dates.size() == 2);
    SignalInput none{{p.dates[0] + 100}, {0.0}, std::nullopt};
    CHECK_THROWS_AS(run_backtest(p, none, {}), Error);
}

TEST_CASE("strategy configuration contracts") {
    StrategyConfig cfg;
    cfg.theta2 = 0.8;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = {};
    cfg.stop_loss = 1.5;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = {};
    cfg.max_position = 0.0;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = {};
    cfg.horizon = 6;
    CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("annualized return identities") {
    std::vector<double> equity(253);
    for (std::size_t i = 0; i < equity.size(); ++i) equity[i] = 1.0 + 0.1 * static_cast<double>(i) / 252.0;
    StrategyConfig cfg;
    cfg.discount_rate = 0.0;
    const auto plain = performance_metrics(equity, {}, cfg);
    CHECK(plain.n_days == 252);
    CHECK(std::fabs(plain.annualized_return - 0.1) <= 1e-15);
    cfg.discount_rate = 0.02;
    const auto discounted = performance_metrics(equity, {}, cfg);
    CHECK(std::fabs(discounted.annualized_return - (1.1 * 0.98019867330675527 - 1.0)) <= 1e-12);
    CHECK(discounted.annualized_return == doctest::Approx(0.0782).epsilon(1e-3));
}

TEST_CASE("max drawdown") {
    const std::vector<double> e{1.0, 1.2, 0.9, 1.1};
    CHECK(max_drawdown(e) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(max_drawdown(std::vector<double>{1.0, 1.1, 1.2}) == 0.0);
    Rng rng(44);
    for (int trial = 0; trial < 200; ++trial) {
        const auto n = static_cast<std::size_t>(rng.integer(1, 300));
        std::vector<double> eq(n);
        double v = 1.0;
        for (auto& x : eq) {
            v *= std::exp(rng.normal(0.0, 0.05));
            x = v;
        }
        CHECK(max_drawdown(eq) == doctest::Approx(oracle::max_drawdown(eq)).epsilon(1e-14));
    }
}

TEST_CASE("Sharpe uses the sample deviation of daily returns") {
    const std::vector<double> e{1.0, 1.01, 1.0, 1.02};
    const double r[] = {0.01, 1.0 / 1.01 - 1.0, 0.02};
    const double mean = (r[0] + r[1] + r[2]) / 3.0;
    double ss = 0.0;
    for (double x : r) ss += (x - mean) * (x - mean);
    const auto m = performance_metrics(e, {}, {});
    REQUIRE(m.sharpe_ratio.has_value());
    CHECK(*m.sharpe_ratio == doctest::Approx(mean / std::sqrt(ss / 2.0) * std::sqrt(252.0)).epsilon(1e-12));
}

TEST_CASE("buy and hold") {
    std::vector<double> up(30);
    for (std::size_t i = 0; i < up.size(); ++i) up[i] = 50.0 * (1.0 + static_cast<double>(i) / 29.0);
    StrategyConfig free;
    free.transaction_cost = 0.0;
    CHECK(buy_and_hold_benchmark(oracle::prices(up), free).metrics.cumulative_return == doctest::Approx(1.0).epsilon(1e-14));

    std::vector<double> down(30);
    for (std::size_t i = 0; i < down.size(); ++i) down[i] = 100.0 - 2.0 * static_cast<double>(i);
    const auto fall = buy_and_hold_benchmark(oracle::prices(down), free);
    CHECK(fall.metrics.cumulative_return < 0.0);
    CHECK(fall.metrics.max_drawdown == doctest::Approx(1.0 - down.back() / down.front()).epsilon(1e-14));

    const auto flat = buy_and_hold_benchmark(oracle::prices(std::vector<double>(30, 10.0)), {});
    CHECK(flat.metrics.cumulative_return == doctest::Approx(-0.002).epsilon(1e-12));
    REQUIRE(flat.trades.size() == 1);
}

TEST_CASE("trade returns compound to the final equity") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto f = random_fixture(seed, 250);
        const auto r = run_backtest(f.prices, signal_for(f.prices, f.scores), {});
        double product = 1.0;
        for (const auto& t : r.trades) product *= 1.0 + t.return_net;
        CHECK(r.equity.back() == doctest::Approx(product).epsilon(1e-12));
        for (std::size_t i = 1; i < r.trades.size(); ++i) CHECK(r.trades[i].entry_index >= r.trades[i - 1].exit_index);
    }
}

TEST_CASE("higher costs never help") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto f = random_fixture(100 + seed, 200);
        double last = std::numeric_limits<double>::infinity();
        for (double cost : {0.0, 0.0005, 0.001, 0.005, 0.02}) {
            StrategyConfig cfg;
            cfg.transaction_cost = cost;
            const double final_equity = run_backtest(f.prices, signal_for(f.prices, f.scores), cfg).equity.back();
            CHECK(final_equity <= last);
            last = final_equity;
        }
    }
}

TEST_CASE("truncating the future does not change the past") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto f = random_fixture(500 + seed, 120);
        StrategyConfig cfg;
        cfg.execution = seed % 2 ? Execution::next_close : Execution::same_close;
        const auto full = run_backtest(f.prices, signal_for(f.prices, f.scores), cfg);
        Rng rng(seed);
        const auto k = static_cast<std::size_t>(rng.integer(3, 119));
        const auto cut = f.prices.slice(0, k);
        const std::vector<double> head(f.scores.begin(), f.scores.begin() + static_cast<std::ptrdiff_t>(k));
        const auto part = run_backtest(cut, signal_for(cut, head), cfg);
        for (std::size_t i = 0; i + 1 < k; ++i) CHECK(part.equity[i] == full.equity[i]);
        std::size_t closed = 0;
        for (const auto& t : full.trades) {
            if (t.exit_index + 1 >= k) break;
            REQUIRE(closed < part.trades.size());
            CHECK(part.trades[closed].exit_index == t.exit_index);
            CHECK(part.trades[closed].return_net == t.return_net);
            ++closed;
        }
    }
}

TEST_CASE("identical forecasts across horizons") {
    const auto f = random_fixture(9, 150);
    std::array<std::vector<double>, kMaxHorizon> cols;
    cols.fill(f.scores);
    const auto multi = multi_horizon_backtest(f.prices, forecasts_from(f.prices, cols), {});
    CHECK(multi.best_horizon == 1);
    for (const auto& r : multi.reports) {
        CHECK(r.equity == multi.reports[0].equity);
        CHECK(r.trades.size() == multi.reports[0].trades.size());
    }
}

TEST_CASE("only the fourth horizon trades") {
    const auto p = oracle::prices(std::vector<double>(40, 20.0));
    std::array<std::vector<double>, kMaxHorizon> cols;
    cols.fill(std::vector<double>(40, 0.1));
    for (std::size_t t = 10; t < 20; ++t) cols[3][t] = -0.9;
    const auto multi = multi_horizon_backtest(p, forecasts_from(p, cols), {});
    for (int h = 1; h <= 5; ++h) {
        CHECK((multi.reports[static_cast<std::size_t>(h - 1)].trades.empty()) == (h != 4));
    }
}

TEST_CASE("best horizon matches independent re-simulation") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto f = random_fixture(900 + seed, 200);
        Rng rng(seed);
        std::array<std::vector<double>, kMaxHorizon> cols;
        for (auto& c : cols) {
            c = f.scores;
            for (auto& v : c) v = std::clamp(v + rng.normal(0.0, 0.3), -2.0, 2.0);
        }
        const auto multi = multi_horizon_backtest(f.prices, forecasts_from(f.prices, cols), {});
        int best = 0;
        double best_ann = -std::numeric_limits<double>::infinity();
        for (int h = 1; h <= 5; ++h) {
            SignalInput in = signal_for(f.prices, cols[static_cast<std::size_t>(h - 1)]);
            if (h < 5) in.next_horizon = cols[static_cast<std::size_t>(h)];
            const double ann = run_backtest(f.prices, in, {}).metrics.annualized_return;
            if (ann > best_ann) {
                best_ann = ann;
                best = h;
            }
        }
        CHECK(multi.best_horizon == best);
    }
}

}
