#pragma once

#include <optional>
#include <vector>

#include "hlppl/ingestion.hpp"
#include "hlppl/lppl.hpp"
#include "hlppl/residual.hpp"
#include "hlppl/score.hpp"
#include "hlppl/signals.hpp"

namespace hlppl {

/// The rows of `prices` that fall inside the fit's window.
PriceSeries fit_window(const PriceSeries& prices, const LpplFit& fit);

struct ScoredWindow {
    ResidualSeries residuals;
    ScoreSeries scores;
    std::vector<Episode> episodes;
};

/// Residuals, normalization, score composition and labeling for one fitted
/// window. Without signals, hype and sentiment are zero on every date.
ScoredWindow score_window(const PriceSeries& window, const LpplFit& fit, const SignalSeries* signals,
                          const ScoreParams& params, NormalizationMode mode, const LabelConfig& labels);

}  // namespace hlppl
