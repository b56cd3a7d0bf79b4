#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hlppl/date.hpp"
#include "hlppl/forecast.hpp"
#include "hlppl/ingestion.hpp"

namespace hlppl {

enum class Execution {
    same_close,  // fill at the close of the signal date
    next_close,  // fill at the following close
};

const char* to_string(Execution e) noexcept;
Execution parse_execution(const std::string& text);

struct StrategyConfig {
    double theta1 = 0.7;  // entry
    double theta2 = 0.3;  // exit
    double stop_loss = 0.15;
    double max_position = 0.5;
    double transaction_cost = 0.001;  // fraction of traded notional, each side
    double discount_rate = 0.02;      // continuously compounded, annual
    int horizon = 0;                  // 0 = current score, 1..5 = forecast horizon
    Execution execution = Execution::same_close;

    void validate() const;
};

/// Annualization constant used by every metric.
inline constexpr double kTradingDaysPerYear = 252.0;

enum class SignalKind { long_entry, short_entry, long_exit, short_exit };

const char* to_string(SignalKind kind) noexcept;

struct SignalEvent {
    std::size_t index = 0;
    SignalKind kind = SignalKind::long_entry;

    bool operator==(const SignalEvent&) const = default;
};

/// Threshold state machine: enter long at B <= -theta1 and short at B >= theta1
/// when flat; leave a long at B >= -theta2 and a short at B <= theta2. An exit
/// bar never re-enters.
std::vector<SignalEvent> generate_signals(std::span<const double> scores, const StrategyConfig& config);

/// Forecast sign flip between horizon h and h + 1. `horizon_forecasts[k]` is the
/// horizon k + 1 prediction made at t. False when flat or h + 1 is unavailable.
bool apply_reversal_exit(std::span<const double> horizon_forecasts, int horizon, bool position_open);

enum class Direction { long_position, short_position };
enum class ExitReason { threshold, stop_loss, reversal, end_of_data };

const char* to_string(Direction d) noexcept;
const char* to_string(ExitReason r) noexcept;

struct Trade {
    Direction direction = Direction::long_position;
    std::size_t entry_index = 0;
    std::size_t exit_index = 0;
    Date entry_date;
    double entry_price = 0.0;
    Date exit_date;
    double exit_price = 0.0;
    ExitReason exit_reason = ExitReason::threshold;
    double entry_equity = 0.0;  // equity before the entry cost
    double notional = 0.0;      // max_position * entry_equity
    double return_net = 0.0;    // change in equity over the trade / entry_equity
};

struct PerformanceMetrics {
    double cumulative_return = 0.0;
    double annualized_return = 0.0;  // after continuous discounting
    std::optional<double> sharpe_ratio;
    double max_drawdown = 0.0;
    double win_rate = 0.0;
    std::size_t trade_count = 0;
    std::size_t n_days = 0;  // number of daily return periods
};

struct BacktestReport {
    std::string label;
    std::vector<Date> dates;
    std::vector<double> equity;  // starts at 1.0
    std::vector<Trade> trades;
    PerformanceMetrics metrics;
};

double max_drawdown(std::span<const double> equity);

/// Returns and drawdown are measured from `initial_capital`, so an entry cost
/// already booked in equity[0] still counts against the strategy.
PerformanceMetrics performance_metrics(std::span<const double> equity, std::span<const Trade> trades,
                                       const StrategyConfig& config, double initial_capital = 1.0);

/// Dated input values for a backtest. `next_horizon`, when present, enables the
/// reversal exit and must be aligned with `values`.
struct SignalInput {
    std::vector<Date> dates;
    std::vector<double> values;
    std::optional<std::vector<double>> next_horizon;
};

/// Daily simulation on the dates shared by `prices` and `signal`. Positions are
/// sized at max_position of current equity; costs are charged on traded notional
/// at entry and exit; stop-loss is checked on closes; any open position is closed
/// on the last date. Throws Error(contract) when fewer than two dates overlap.
BacktestReport run_backtest(const PriceSeries& prices, const SignalInput& signal, const StrategyConfig& config);

/// Full-capital long from first to last date with one entry and one exit cost.
BacktestReport buy_and_hold_benchmark(const PriceSeries& prices, const StrategyConfig& config);

struct MultiHorizonResult {
    std::array<BacktestReport, kMaxHorizon> reports;
    int best_horizon = 1;  // highest annualized return, lowest h on ties
};

MultiHorizonResult multi_horizon_backtest(const PriceSeries& prices, const ForecastSet& forecasts,
                                          const StrategyConfig& config);

}  // namespace hlppl
