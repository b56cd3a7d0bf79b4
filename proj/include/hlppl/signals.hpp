#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hlppl/ingestion.hpp"

namespace hlppl {

struct HypeValue {
    double value = 0.0;
    bool no_coverage = false;  // market-wide count was zero
};

/// Share of the day's article count that mentions `symbol`. Symbols absent from
/// `counts` have zero coverage.
HypeValue hype_index(const std::map<std::string, long long>& counts, const std::string& symbol);

enum class HypeRegime { excessive, neutral, under };

const char* to_string(HypeRegime regime) noexcept;

struct CapHypeValue {
    double value = 0.0;
    double cap_weight = 0.0;
    HypeRegime regime = HypeRegime::neutral;
};

/// Hype divided by the symbol's capitalization weight within `market_caps`.
/// Throws Error(feature_unavailable) when the symbol has no cap.
CapHypeValue cap_adjusted_hype(double hype, const std::map<std::string, double>& market_caps,
                               const std::string& symbol);

struct SentimentValue {
    double value = 0.0;
    bool no_news = false;
};

/// Weighted mean polarity of the given articles.
SentimentValue sentiment_score(std::span<const NewsArticleRecord> articles);

/// Confidence-weighted class shares (positive, neutral, negative), summing to 1.
struct ClassShares {
    double positive = 0.0;
    double neutral = 0.0;
    double negative = 0.0;

    /// Alternative single-number sentiment.
    double net() const noexcept { return positive - negative; }
};

/// Throws Error(degenerate) if no article has positive confidence.
ClassShares finbert_daily_aggregate(std::span<const NewsArticleRecord> articles);

/// One row of behavioral inputs for a single symbol and trading date.
struct SignalRow {
    Date date;
    double hype = 0.0;
    std::optional<double> cap_hype;
    double sentiment = 0.0;
    ClassShares shares;
    bool no_news = true;
    bool no_coverage = true;
};

struct SignalSeries {
    std::string symbol;
    std::vector<SignalRow> rows;
    bool hype_available = false;
    bool cap_hype_available = false;

    std::vector<double> hype() const;
    std::vector<double> sentiment() const;
};

enum class SentimentSource { polarity, class_net };

/// Per-date hype and sentiment for `bundle.symbol`. Sentiment uses articles tagged
/// with the symbol; the class shares also include market-wide articles. Dates with
/// no news or no coverage contribute 0.
SignalSeries compute_signals(const AlignedBundle& bundle,
                             SentimentSource source = SentimentSource::polarity);

}  // namespace hlppl
