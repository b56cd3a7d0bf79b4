#include "hlppl/backtest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hlppl/error.hpp"

namespace hlppl {

const char* to_string(Execution e) noexcept { return e == Execution::same_close ? "same_close" : "next_close"; }

Execution parse_execution(const std::string& text) {
    if (text == "same_close") return Execution::same_close;
    if (text == "next_close") return Execution::next_close;
    fail(ErrorKind::contract, "unknown execution mode '" + text + "'");
}

void StrategyConfig::validate() const {
    if (!(theta2 > 0.0 && theta2 < theta1)) fail(ErrorKind::contract, "strategy: need 0 < theta2 < theta1");
    if (!(stop_loss > 0.0 && stop_loss < 1.0)) fail(ErrorKind::contract, "strategy: need 0 < stop_loss < 1");
    if (!(max_position > 0.0 && max_position <= 1.0)) {
        fail(ErrorKind::contract, "strategy: need 0 < max_position <= 1");
    }
    if (!(transaction_cost >= 0.0)) fail(ErrorKind::contract, "strategy: transaction_cost must be >= 0");
    if (!std::isfinite(discount_rate)) fail(ErrorKind::contract, "strategy: discount_rate must be finite");
    if (horizon < 0 || horizon > kMaxHorizon) fail(ErrorKind::contract, "strategy: horizon must be in 0..5");
}

const char* to_string(SignalKind kind) noexcept {
    switch (kind) {
        case SignalKind::long_entry: return "long_entry";
        case SignalKind::short_entry: return "short_entry";
        case SignalKind::long_exit: return "long_exit";
        case SignalKind::short_exit: return "short_exit";
    }
    return "long_entry";
}

const char* to_string(Direction d) noexcept { return d == Direction::long_position ? "long" : "short"; }

const char* to_string(ExitReason r) noexcept {
    switch (r) {
        case ExitReason::threshold: return "threshold";
        case ExitReason::stop_loss: return "stop_loss";
        case ExitReason::reversal: return "reversal";
        case ExitReason::end_of_data: return "end_of_data";
    }
    return "threshold";
}

namespace {

std::optional<Direction> entry_side(double b, const StrategyConfig& c) {
    if (b <= -c.theta1) return Direction::long_position;
    if (b >= c.theta1) return Direction::short_position;
    return std::nullopt;
}

bool threshold_exit(Direction d, double b, const StrategyConfig& c) {
    return d == Direction::long_position ? b >= -c.theta2 : b <= c.theta2;
}

double sign_of(Direction d) { return d == Direction::long_position ? 1.0 : -1.0; }

// Closes within this distance of the stop are treated as hitting it.
constexpr double kStopSlack = 1e-12;

/// Cash plus at most one open position.
class Ledger {
public:
    explicit Ledger(double cost) : cost_(cost) {}

    bool open() const noexcept { return position_.has_value(); }
    const Trade& position() const { return *position_; }

    void enter(Direction d, std::size_t index, Date date, double price, double fraction) {
        Trade t;
        t.direction = d;
        t.entry_index = index;
        t.entry_date = date;
        t.entry_price = price;
        t.entry_equity = cash_;
        t.notional = fraction * cash_;
        cash_ -= cost_ * t.notional;
        position_ = t;
    }

    void exit(std::size_t index, Date date, double price, ExitReason reason) {
        Trade t = *position_;
        const double value = t.notional * price / t.entry_price;
        cash_ += sign_of(t.direction) * (value - t.notional) - cost_ * value;
        t.exit_index = index;
        t.exit_date = date;
        t.exit_price = price;
        t.exit_reason = reason;
        t.return_net = (cash_ - t.entry_equity) / t.entry_equity;
        trades_.push_back(t);
        position_.reset();
    }

    double mark(double price) const {
        if (!position_) return cash_;
        const auto& t = *position_;
        return cash_ + sign_of(t.direction) * t.notional * (price / t.entry_price - 1.0);
    }

    std::vector<Trade> take_trades() { return std::move(trades_); }

private:
    double cost_;
    double cash_ = 1.0;
    std::optional<Trade> position_;
    std::vector<Trade> trades_;
};

struct Joined {
    std::vector<Date> dates;
    std::vector<double> price;
    std::vector<double> value;
    std::vector<double> next;
};

Joined join_on_dates(const PriceSeries& prices, const SignalInput& signal) {
    if (signal.values.size() != signal.dates.size()) {
        fail(ErrorKind::contract, "run_backtest: signal dates and values differ in length");
    }
    if (signal.next_horizon && signal.next_horizon->size() != signal.dates.size()) {
        fail(ErrorKind::contract, "run_backtest: next-horizon series is not aligned");
    }
    for (std::size_t i = 1; i < signal.dates.size(); ++i) {
        if (!(signal.dates[i - 1] < signal.dates[i])) fail(ErrorKind::contract, "run_backtest: signal dates not increasing");
    }
    Joined j;
    std::size_t p = 0;
    for (std::size_t s = 0; s < signal.dates.size(); ++s) {
        while (p < prices.size() && prices.dates[p] < signal.dates[s]) ++p;
        if (p == prices.size()) break;
        if (prices.dates[p] != signal.dates[s]) continue;
        j.dates.push_back(prices.dates[p]);
        j.price.push_back(prices.close[p]);
        j.value.push_back(signal.values[s]);
        if (signal.next_horizon) j.next.push_back((*signal.next_horizon)[s]);
    }
    if (j.dates.empty()) fail(ErrorKind::contract, "run_backtest: prices and signal share no dates");
    if (j.dates.size() < 2) fail(ErrorKind::contract, "run_backtest: fewer than two overlapping dates");
    return j;
}

}  // namespace

std::vector<SignalEvent> generate_signals(std::span<const double> scores, const StrategyConfig& config) {
    config.validate();
    std::vector<SignalEvent> events;
    std::optional<Direction> held;
    for (std::size_t t = 0; t < scores.size(); ++t) {
        const double b = scores[t];
        if (held) {
            if (threshold_exit(*held, b, config)) {
                events.push_back({t, *held == Direction::long_position ? SignalKind::long_exit : SignalKind::short_exit});
                held.reset();
            }
            continue;
        }
        if (const auto side = entry_side(b, config)) {
            events.push_back({t, *side == Direction::long_position ? SignalKind::long_entry : SignalKind::short_entry});
            held = side;
        }
    }
    return events;
}

bool apply_reversal_exit(std::span<const double> horizon_forecasts, int horizon, bool position_open) {
    if (!position_open || horizon < 1) return false;
    const auto h = static_cast<std::size_t>(horizon);
    if (h >= horizon_forecasts.size()) return false;
    return horizon_forecasts[h - 1] * horizon_forecasts[h] < 0.0;
}

double max_drawdown(std::span<const double> equity) {
    double peak = 0.0;
    double worst = 0.0;
    for (double e : equity) {
        peak = std::max(peak, e);
        if (peak > 0.0) worst = std::max(worst, (peak - e) / peak);
    }
    return worst;
}

PerformanceMetrics performance_metrics(std::span<const double> equity, std::span<const Trade> trades,
                                       const StrategyConfig& config, double initial_capital) {
    if (equity.empty()) fail(ErrorKind::contract, "performance_metrics: empty equity curve");
    if (!(initial_capital > 0.0)) fail(ErrorKind::contract, "performance_metrics: initial capital must be positive");
    PerformanceMetrics m;
    m.n_days = equity.size() - 1;
    const double growth = equity.back() / initial_capital;
    m.cumulative_return = growth - 1.0;
    if (m.n_days > 0) {
        const double years = static_cast<double>(m.n_days) / kTradingDaysPerYear;
        const double present = growth * std::exp(-config.discount_rate * years);
        m.annualized_return = std::pow(present, 1.0 / years) - 1.0;
    }

    if (m.n_days >= 2) {
        std::vector<double> r(m.n_days);
        for (std::size_t i = 1; i < equity.size(); ++i) r[i - 1] = equity[i] / equity[i - 1] - 1.0;
        const double mean = std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(r.size());
        double ss = 0.0;
        for (double x : r) ss += (x - mean) * (x - mean);
        const double sd = std::sqrt(ss / static_cast<double>(r.size() - 1));
        if (sd > 1e-15) m.sharpe_ratio = mean / sd * std::sqrt(kTradingDaysPerYear);
    }

    std::vector<double> path{initial_capital};
    path.insert(path.end(), equity.begin(), equity.end());
    m.max_drawdown = max_drawdown(path);
    m.trade_count = trades.size();
    if (!trades.empty()) {
        const auto wins = std::count_if(trades.begin(), trades.end(), [](const Trade& t) { return t.return_net > 0.0; });
        m.win_rate = static_cast<double>(wins) / static_cast<double>(trades.size());
    }
    return m;
}

BacktestReport run_backtest(const PriceSeries& prices, const SignalInput& signal, const StrategyConfig& config) {
    config.validate();
    const Joined j = join_on_dates(prices, signal);
    const std::size_t n = j.dates.size();
    const bool reversal_enabled = !j.next.empty();

    struct Pending {
        bool enter = false;
        Direction side = Direction::long_position;
        ExitReason reason = ExitReason::threshold;
    };
    std::optional<Pending> pending;

    Ledger ledger(config.transaction_cost);
    BacktestReport report;
    report.dates = j.dates;
    report.equity.resize(n);

    for (std::size_t k = 0; k < n; ++k) {
        const double price = j.price[k];
        bool exited_now = false;

        if (pending) {
            if (pending->enter) {
                ledger.enter(pending->side, k, j.dates[k], price, config.max_position);
            } else if (ledger.open()) {
                ledger.exit(k, j.dates[k], price, pending->reason);
                exited_now = true;
            }
            pending.reset();
        }

        if (ledger.open() && k > ledger.position().entry_index) {
            const auto& pos = ledger.position();
            const double adverse = -sign_of(pos.direction) * (price / pos.entry_price - 1.0);
            if (adverse >= config.stop_loss - kStopSlack) {
                ledger.exit(k, j.dates[k], price, ExitReason::stop_loss);
                exited_now = true;
            }
        }

        if (ledger.open() && k > ledger.position().entry_index) {
            std::optional<ExitReason> reason;
            const double b = j.value[k];
            if (reversal_enabled && b * j.next[k] < 0.0) {
                reason = ExitReason::reversal;
            } else if (threshold_exit(ledger.position().direction, b, config)) {
                reason = ExitReason::threshold;
            }
            if (reason) {
                if (config.execution == Execution::same_close) {
                    ledger.exit(k, j.dates[k], price, *reason);
                    exited_now = true;
                } else if (k + 1 < n) {
                    pending = Pending{false, Direction::long_position, *reason};
                }
            }
        } else if (!ledger.open() && !exited_now && !pending) {
            // An entry must leave at least one later bar for the exit.
            const std::size_t fill = config.execution == Execution::same_close ? k : k + 1;
            if (fill + 1 < n) {
                if (const auto side = entry_side(j.value[k], config)) {
                    if (fill == k) {
                        ledger.enter(*side, k, j.dates[k], price, config.max_position);
                    } else {
                        pending = Pending{true, *side, ExitReason::threshold};
                    }
                }
            }
        }

        if (k + 1 == n && ledger.open()) ledger.exit(k, j.dates[k], price, ExitReason::end_of_data);
        report.equity[k] = ledger.mark(price);
    }

    report.trades = ledger.take_trades();
    report.metrics = performance_metrics(report.equity, report.trades, config);
    report.label = config.horizon == 0 ? "score" : "h" + std::to_string(config.horizon);
    return report;
}

BacktestReport buy_and_hold_benchmark(const PriceSeries& prices, const StrategyConfig& config) {
    config.validate();
    if (prices.size() < 2) fail(ErrorKind::insufficient_data, "buy_and_hold_benchmark: need at least two prices");
    Ledger ledger(config.transaction_cost);
    BacktestReport report;
    report.label = "buy_and_hold";
    report.dates = prices.dates;
    report.equity.resize(prices.size());
    ledger.enter(Direction::long_position, 0, prices.dates[0], prices.close[0], 1.0);
    for (std::size_t k = 0; k < prices.size(); ++k) {
        if (k + 1 == prices.size()) ledger.exit(k, prices.dates[k], prices.close[k], ExitReason::end_of_data);
        report.equity[k] = ledger.mark(prices.close[k]);
    }
    report.trades = ledger.take_trades();
    report.metrics = performance_metrics(report.equity, report.trades, config);
    return report;
}

MultiHorizonResult multi_horizon_backtest(const PriceSeries& prices, const ForecastSet& forecasts,
                                          const StrategyConfig& config) {
    forecasts.validate({-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()});
    MultiHorizonResult out;
    for (int h = 1; h <= kMaxHorizon; ++h) {
        SignalInput input;
        input.dates = forecasts.dates;
        const auto col = forecasts.horizon(h);
        input.values.assign(col.begin(), col.end());
        if (h < kMaxHorizon) {
            const auto next = forecasts.horizon(h + 1);
            input.next_horizon.emplace(next.begin(), next.end());
        }
        StrategyConfig cfg = config;
        cfg.horizon = h;
        out.reports[static_cast<std::size_t>(h - 1)] = run_backtest(prices, input, cfg);
    }
    double best = -std::numeric_limits<double>::infinity();
    for (int h = 1; h <= kMaxHorizon; ++h) {
        const double ann = out.reports[static_cast<std::size_t>(h - 1)].metrics.annualized_return;
        if (ann > best) {
            best = ann;
            out.best_horizon = h;
        }
    }
    return out;
}

}  // namespace hlppl
