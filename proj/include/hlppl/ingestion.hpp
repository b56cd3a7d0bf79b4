#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hlppl/date.hpp"

namespace hlppl {

/// Daily closing prices for one symbol.
struct PriceSeries {
    std::string symbol;
    std::vector<Date> dates;
    std::vector<double> close;
    std::optional<std::vector<double>> volume;

    std::size_t size() const noexcept { return dates.size(); }
    bool empty() const noexcept { return dates.empty(); }

    /// Checks strictly increasing dates, positive closes, non-negative volume and
    /// matching column lengths. Throws Error(validation).
    void validate() const;

    /// Rows [first, first + count).
    PriceSeries slice(std::size_t first, std::size_t count) const;
};

enum class SentimentClass { positive, neutral, negative };

const char* to_string(SentimentClass c) noexcept;
SentimentClass parse_sentiment_class(const std::string& text);

/// Symbol value used by news rows that concern the whole market rather than one issuer.
inline constexpr const char* kMarketWideSymbol = "*";

/// One pre-scored news article.
struct NewsArticleRecord {
    Date date;
    std::string symbol;
    double polarity = 0.0;    // [-1, 1]
    double weight = 1.0;      // > 0
    SentimentClass sentiment_class = SentimentClass::neutral;
    double confidence = 0.0;  // [0, 1]

    void validate() const;
};

/// Cross-sectional media coverage and capitalization on one date.
struct MarketFeatureRow {
    Date date;
    std::map<std::string, long long> article_count_by_symbol;
    std::map<std::string, double> market_cap_by_symbol;

    void validate() const;
};

PriceSeries parse_prices(std::istream& in, const std::string& symbol,
                         const std::string& source = "<stream>");
PriceSeries load_prices(const std::filesystem::path& path, const std::string& symbol);
void write_prices(std::ostream& out, const PriceSeries& series);

std::vector<NewsArticleRecord> parse_news(std::istream& in, const std::string& source = "<stream>");
std::vector<NewsArticleRecord> load_news(const std::filesystem::path& path);
void write_news(std::ostream& out, const std::vector<NewsArticleRecord>& news);

/// Long-format features (`date,symbol,article_count[,market_cap]`) grouped by date.
std::vector<MarketFeatureRow> parse_features(std::istream& in, const std::string& source = "<stream>");
std::vector<MarketFeatureRow> load_features(const std::filesystem::path& path);
void write_features(std::ostream& out, const std::vector<MarketFeatureRow>& rows);

struct RejectedRecord {
    enum class Kind { article, feature };
    Kind kind;
    std::size_t index;  // position in the caller's input sequence
    Date date;
    std::string reason;
};

struct AlignedRow {
    Date date;
    double close = 0.0;
    std::vector<NewsArticleRecord> articles;
    std::optional<MarketFeatureRow> features;
};

/// Prices, news and features on the trading calendar of `prices`.
struct AlignedBundle {
    std::string symbol;
    std::vector<AlignedRow> rows;
    bool has_features = false;
    bool has_market_caps = false;
    std::vector<RejectedRecord> rejected;
};

/// Attributes each article and feature row to the first trading date on or after
/// its own date. Records dated before the first or after the last trading date
/// are returned in `rejected`. Feature rows rolled onto the same trading date
/// have their counts summed; the latest market cap wins.
AlignedBundle align_daily(const PriceSeries& prices, const std::vector<NewsArticleRecord>& news,
                          const std::vector<MarketFeatureRow>& features);

}  // namespace hlppl
