#include "hlppl/pipeline.hpp"

#include <algorithm>
#include <map>

#include "hlppl/error.hpp"

namespace hlppl {

PriceSeries fit_window(const PriceSeries& prices, const LpplFit& fit) {
    const auto first = std::lower_bound(prices.dates.begin(), prices.dates.end(), fit.window_start);
    const auto last = std::upper_bound(prices.dates.begin(), prices.dates.end(), fit.window_end);
    if (first == prices.dates.end() || *first != fit.window_start || last == prices.dates.begin() ||
        *(last - 1) != fit.window_end) {
        fail(ErrorKind::contract, "price series does not contain the fitted window " + fit.window_start.iso() + ".." +
                                      fit.window_end.iso());
    }
    const auto start = static_cast<std::size_t>(first - prices.dates.begin());
    const auto count = static_cast<std::size_t>(last - first);
    if (fit.n_obs != 0 && count != fit.n_obs) {
        fail(ErrorKind::contract, "fitted window has " + std::to_string(fit.n_obs) + " rows, prices have " +
                                      std::to_string(count));
    }
    return prices.slice(start, count);
}

ScoredWindow score_window(const PriceSeries& window, const LpplFit& fit, const SignalSeries* signals,
                          const ScoreParams& params, NormalizationMode mode, const LabelConfig& labels) {
    LpplFit aligned = fit;
    if (aligned.n_obs == 0) aligned.n_obs = window.size();
    ScoredWindow out;
    out.residuals = normalize_residuals(compute_residuals(window, aligned), mode);

    const std::size_t n = window.size();
    std::vector<double> hype(n, 0.0);
    std::vector<double> sentiment(n, 0.0);
    if (signals) {
        std::map<Date, const SignalRow*> by_date;
        for (const auto& r : signals->rows) by_date[r.date] = &r;
        for (std::size_t i = 0; i < n; ++i) {
            if (const auto it = by_date.find(window.dates[i]); it != by_date.end()) {
                hype[i] = it->second->hype;
                sentiment[i] = it->second->sentiment;
            }
        }
    }
    out.scores = compose_score_series(window.dates, out.residuals.epsilon_norm, hype, sentiment, params);
    out.episodes = label_episodes(out.scores, labels);
    return out;
}

}  // namespace hlppl
