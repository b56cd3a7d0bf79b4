#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hlppl/backtest.hpp"
#include "hlppl/forecast.hpp"
#include "hlppl/lppl.hpp"
#include "hlppl/residual.hpp"
#include "hlppl/score.hpp"
#include "hlppl/signals.hpp"

namespace hlppl {

/// Every float written by this module goes through here: 12 significant digits.
std::string format_number(double x);

/// Rounds to the value format_number would print.
double round_significant(double x);

void write_fit_json(std::ostream& out, const LpplFit& fit);
LpplFit read_fit_json(std::istream& in);

void write_residuals_csv(std::ostream& out, const ResidualSeries& residuals);
void write_signals_csv(std::ostream& out, const SignalSeries& signals);

void write_scores_csv(std::ostream& out, const ScoreSeries& scores);
ScoreSeries read_scores_csv(std::istream& in, const std::string& source = "<stream>");

void write_episodes_csv(std::ostream& out, const std::vector<Episode>& episodes);
std::vector<Episode> read_episodes_csv(std::istream& in, const std::string& source = "<stream>");

/// Per-date rows for plotting: price, model path, score and episode shading flags.
void write_plot_data_csv(std::ostream& out, const PriceSeries& prices, const LpplFit& fit,
                         const ScoreSeries& scores, const std::vector<Episode>& episodes);

void write_equity_csv(std::ostream& out, const BacktestReport& report);
void write_report_json(std::ostream& out, const BacktestReport& report, const StrategyConfig& config);

void write_forecasts_csv(std::ostream& out, const ForecastSet& forecasts);
ForecastSet read_forecasts_csv(std::istream& in, const std::string& source = "<stream>");

/// File helpers that raise Error(io) with the offending path.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace hlppl
