#include "hlppl/signals.hpp"

#include <algorithm>
#include <numeric>

#include "hlppl/error.hpp"

namespace hlppl {

HypeValue hype_index(const std::map<std::string, long long>& counts, const std::string& symbol) {
    long long market = 0;
    for (const auto& [sym, n] : counts) {
        if (n < 0) fail(ErrorKind::validation, "hype_index: negative article count for " + sym);
        market += n;
    }
    if (market == 0) return {0.0, true};
    const auto it = counts.find(symbol);
    const long long own = it == counts.end() ? 0 : it->second;
    return {static_cast<double>(own) / static_cast<double>(market), false};
}

const char* to_string(HypeRegime regime) noexcept {
    switch (regime) {
        case HypeRegime::excessive: return "excessive";
        case HypeRegime::neutral: return "neutral";
        case HypeRegime::under: return "under";
    }
    return "neutral";
}

CapHypeValue cap_adjusted_hype(double hype, const std::map<std::string, double>& market_caps,
                               const std::string& symbol) {
    const auto it = market_caps.find(symbol);
    if (it == market_caps.end()) fail(ErrorKind::feature_unavailable, "no market cap for " + symbol);
    double total = 0.0;
    for (const auto& [sym, cap] : market_caps) {
        if (!(cap > 0.0)) fail(ErrorKind::validation, "cap_adjusted_hype: non-positive cap for " + sym);
        total += cap;
    }
    CapHypeValue out;
    out.cap_weight = it->second / total;
    out.value = hype / out.cap_weight;
    out.regime = out.value > 1.0 ? HypeRegime::excessive : out.value < 1.0 ? HypeRegime::under : HypeRegime::neutral;
    return out;
}

SentimentValue sentiment_score(std::span<const NewsArticleRecord> articles) {
    if (articles.empty()) return {0.0, true};
    double num = 0.0;
    double den = 0.0;
    for (const auto& a : articles) {
        if (!(a.weight > 0.0)) fail(ErrorKind::validation, "sentiment_score: article weight must be positive");
        num += a.weight * a.polarity;
        den += a.weight;
    }
    return {std::clamp(num / den, -1.0, 1.0), false};
}

ClassShares finbert_daily_aggregate(std::span<const NewsArticleRecord> articles) {
    ClassShares out;
    double total = 0.0;
    for (const auto& a : articles) {
        switch (a.sentiment_class) {
            case SentimentClass::positive: out.positive += a.confidence; break;
            case SentimentClass::neutral: out.neutral += a.confidence; break;
            case SentimentClass::negative: out.negative += a.confidence; break;
        }
        total += a.confidence;
    }
    if (!(total > 0.0)) fail(ErrorKind::degenerate, "finbert_daily_aggregate: no article has positive confidence");
    out.positive /= total;
    out.neutral /= total;
    out.negative /= total;
    return out;
}

std::vector<double> SignalSeries::hype() const {
    std::vector<double> out(rows.size());
    std::transform(rows.begin(), rows.end(), out.begin(), [](const SignalRow& r) { return r.hype; });
    return out;
}

std::vector<double> SignalSeries::sentiment() const {
    std::vector<double> out(rows.size());
    std::transform(rows.begin(), rows.end(), out.begin(), [](const SignalRow& r) { return r.sentiment; });
    return out;
}

SignalSeries compute_signals(const AlignedBundle& bundle, SentimentSource source) {
    SignalSeries out;
    out.symbol = bundle.symbol;
    out.hype_available = bundle.has_features;
    out.cap_hype_available = bundle.has_market_caps;
    out.rows.reserve(bundle.rows.size());

    std::vector<NewsArticleRecord> own;
    std::vector<NewsArticleRecord> relevant;
    for (const auto& row : bundle.rows) {
        SignalRow sig;
        sig.date = row.date;

        if (row.features) {
            const auto h = hype_index(row.features->article_count_by_symbol, bundle.symbol);
            sig.hype = h.value;
            sig.no_coverage = h.no_coverage;
            if (!h.no_coverage && row.features->market_cap_by_symbol.count(bundle.symbol)) {
                sig.cap_hype = cap_adjusted_hype(h.value, row.features->market_cap_by_symbol, bundle.symbol).value;
            }
        }

        own.clear();
        relevant.clear();
        for (const auto& a : row.articles) {
            if (a.symbol == bundle.symbol) own.push_back(a);
            if ((a.symbol == bundle.symbol || a.symbol == kMarketWideSymbol) && a.confidence > 0.0) {
                relevant.push_back(a);
            }
        }
        if (!relevant.empty()) sig.shares = finbert_daily_aggregate(relevant);
        if (!own.empty()) {
            sig.no_news = false;
            if (source == SentimentSource::polarity) {
                sig.sentiment = sentiment_score(own).value;
            } else {
                std::vector<NewsArticleRecord> confident;
                std::copy_if(own.begin(), own.end(), std::back_inserter(confident),
                             [](const NewsArticleRecord& a) { return a.confidence > 0.0; });
                sig.sentiment = confident.empty() ? 0.0 : finbert_daily_aggregate(confident).net();
            }
        }
        out.rows.push_back(sig);
    }
    return out;
}

}  // namespace hlppl
