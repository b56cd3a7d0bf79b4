#include "hlppl/ingestion.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numeric>
#include <ostream>
#include <set>

#include "csv.hpp"
#include "hlppl/error.hpp"
#include "hlppl/io.hpp"

namespace hlppl {

void PriceSeries::validate() const {
    if (close.size() != dates.size()) fail(ErrorKind::validation, symbol + ": close/date length mismatch");
    if (volume && volume->size() != dates.size()) {
        fail(ErrorKind::validation, symbol + ": volume/date length mismatch");
    }
    for (std::size_t i = 0; i < dates.size(); ++i) {
        if (i > 0 && !(dates[i - 1] < dates[i])) {
            fail(ErrorKind::validation, symbol + ": dates not strictly increasing at " + dates[i].iso());
        }
        if (!(close[i] > 0.0)) {
            fail(ErrorKind::validation, symbol + ": non-positive close on " + dates[i].iso());
        }
        if (volume && !((*volume)[i] >= 0.0)) {
            fail(ErrorKind::validation, symbol + ": negative volume on " + dates[i].iso());
        }
    }
}

PriceSeries PriceSeries::slice(std::size_t first, std::size_t count) const {
    if (first + count > size()) fail(ErrorKind::contract, "slice beyond end of price series");
    PriceSeries out;
    out.symbol = symbol;
    const auto b = static_cast<std::ptrdiff_t>(first);
    const auto e = static_cast<std::ptrdiff_t>(first + count);
    out.dates.assign(dates.begin() + b, dates.begin() + e);
    out.close.assign(close.begin() + b, close.begin() + e);
    if (volume) out.volume.emplace(volume->begin() + b, volume->begin() + e);
    return out;
}

const char* to_string(SentimentClass c) noexcept {
    switch (c) {
        case SentimentClass::positive: return "positive";
        case SentimentClass::neutral: return "neutral";
        case SentimentClass::negative: return "negative";
    }
    return "neutral";
}

SentimentClass parse_sentiment_class(const std::string& text) {
    std::string t;
    for (char c : text) t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (t == "positive" || t == "pos") return SentimentClass::positive;
    if (t == "neutral" || t == "neu") return SentimentClass::neutral;
    if (t == "negative" || t == "neg") return SentimentClass::negative;
    fail(ErrorKind::parse, "unknown sentiment class '" + text + "'");
}

void NewsArticleRecord::validate() const {
    if (!(polarity >= -1.0 && polarity <= 1.0)) fail(ErrorKind::validation, "polarity outside [-1, 1]");
    if (!(confidence >= 0.0 && confidence <= 1.0)) fail(ErrorKind::validation, "confidence outside [0, 1]");
    if (!(weight > 0.0)) fail(ErrorKind::validation, "article weight must be positive");
    if (symbol.empty()) fail(ErrorKind::validation, "article symbol is empty");
}

void MarketFeatureRow::validate() const {
    for (const auto& [sym, n] : article_count_by_symbol) {
        if (n < 0) fail(ErrorKind::validation, "negative article count for " + sym + " on " + date.iso());
    }
    for (const auto& [sym, cap] : market_cap_by_symbol) {
        if (!(cap > 0.0)) fail(ErrorKind::validation, "non-positive market cap for " + sym + " on " + date.iso());
    }
}

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::io, "cannot open " + path.string());
    return in;
}

Date row_date(const csv::Table& table) {
    try {
        return Date::parse(table.text("date"));
    } catch (const Error& e) {
        table.error(e.what());
    }
}

}  // namespace

PriceSeries parse_prices(std::istream& in, const std::string& symbol, const std::string& source) {
    csv::Table table(in, source);
    table.require({"date", "close"});
    const bool volume_column = table.has("volume");

    struct Row {
        Date date;
        double close;
        std::optional<double> volume;
    };
    std::vector<Row> rows;
    while (table.next()) {
        Row r{row_date(table), table.number("close"), std::nullopt};
        if (!(r.close > 0.0)) {
            fail(ErrorKind::validation, source + ":" + std::to_string(table.line()) + ": non-positive close");
        }
        if (volume_column) {
            r.volume = table.optional_number("volume");
            if (r.volume && *r.volume < 0.0) {
                fail(ErrorKind::validation, source + ":" + std::to_string(table.line()) + ": negative volume");
            }
        }
        rows.push_back(r);
    }
    if (rows.size() < 2) {
        fail(ErrorKind::insufficient_data, source + ": need at least 2 price rows, found " + std::to_string(rows.size()));
    }
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.date < b.date; });
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].date == rows[i - 1].date) {
            fail(ErrorKind::validation, source + ": duplicate date " + rows[i].date.iso());
        }
    }

    PriceSeries out;
    out.symbol = symbol;
    const bool all_volume =
        volume_column && std::all_of(rows.begin(), rows.end(), [](const Row& r) { return r.volume.has_value(); });
    if (all_volume) out.volume.emplace();
    for (const auto& r : rows) {
        out.dates.push_back(r.date);
        out.close.push_back(r.close);
        if (all_volume) out.volume->push_back(*r.volume);
    }
    out.validate();
    return out;
}

PriceSeries load_prices(const std::filesystem::path& path, const std::string& symbol) {
    auto in = open_input(path);
    return parse_prices(in, symbol, path.string());
}

void write_prices(std::ostream& out, const PriceSeries& series) {
    out << (series.volume ? "date,close,volume\n" : "date,close\n");
    for (std::size_t i = 0; i < series.size(); ++i) {
        out << series.dates[i].iso() << ',' << format_number(series.close[i]);
        if (series.volume) out << ',' << format_number((*series.volume)[i]);
        out << '\n';
    }
}

std::vector<NewsArticleRecord> parse_news(std::istream& in, const std::string& source) {
    csv::Table table(in, source);
    table.require({"date", "symbol", "polarity", "sentiment_class", "confidence"});
    std::vector<NewsArticleRecord> out;
    while (table.next()) {
        NewsArticleRecord a;
        a.date = row_date(table);
        a.symbol = table.text("symbol");
        a.polarity = table.number("polarity");
        a.weight = table.optional_number("weight").value_or(1.0);
        try {
            a.sentiment_class = parse_sentiment_class(table.text("sentiment_class"));
            a.confidence = table.number("confidence");
            a.validate();
        } catch (const Error& e) {
            fail(e.kind(), source + ":" + std::to_string(table.line()) + ": " + e.what());
        }
        out.push_back(std::move(a));
    }
    return out;
}

std::vector<NewsArticleRecord> load_news(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_news(in, path.string());
}

void write_news(std::ostream& out, const std::vector<NewsArticleRecord>& news) {
    out << "date,symbol,polarity,weight,sentiment_class,confidence\n";
    for (const auto& a : news) {
        out << a.date.iso() << ',' << a.symbol << ',' << format_number(a.polarity) << ','
            << format_number(a.weight) << ',' << to_string(a.sentiment_class) << ','
            << format_number(a.confidence) << '\n';
    }
}

std::vector<MarketFeatureRow> parse_features(std::istream& in, const std::string& source) {
    csv::Table table(in, source);
    table.require({"date", "symbol", "article_count"});
    std::map<Date, MarketFeatureRow> by_date;
    while (table.next()) {
        const Date d = row_date(table);
        auto& row = by_date[d];
        row.date = d;
        const auto& sym = table.text("symbol");
        const long long count = table.integer("article_count");
        if (count < 0) table.error("negative article_count");
        if (!row.article_count_by_symbol.emplace(sym, count).second) {
            table.error("duplicate symbol " + sym + " on " + d.iso());
        }
        if (const auto cap = table.optional_number("market_cap")) {
            if (!(*cap > 0.0)) table.error("non-positive market_cap");
            row.market_cap_by_symbol[sym] = *cap;
        }
    }
    std::vector<MarketFeatureRow> out;
    out.reserve(by_date.size());
    for (auto& [d, row] : by_date) out.push_back(std::move(row));
    return out;
}

std::vector<MarketFeatureRow> load_features(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_features(in, path.string());
}

void write_features(std::ostream& out, const std::vector<MarketFeatureRow>& rows) {
    out << "date,symbol,article_count,market_cap\n";
    for (const auto& row : rows) {
        for (const auto& [sym, n] : row.article_count_by_symbol) {
            out << row.date.iso() << ',' << sym << ',' << n << ',';
            if (const auto it = row.market_cap_by_symbol.find(sym); it != row.market_cap_by_symbol.end()) {
                out << format_number(it->second);
            }
            out << '\n';
        }
    }
}

namespace {

/// Index of the first trading date >= d, or nullopt if d is outside the calendar.
std::optional<std::size_t> roll_forward(const std::vector<Date>& calendar, Date d) {
    if (calendar.empty() || d < calendar.front()) return std::nullopt;
    const auto it = std::lower_bound(calendar.begin(), calendar.end(), d);
    if (it == calendar.end()) return std::nullopt;
    return static_cast<std::size_t>(it - calendar.begin());
}

}  // namespace

AlignedBundle align_daily(const PriceSeries& prices, const std::vector<NewsArticleRecord>& news,
                          const std::vector<MarketFeatureRow>& features) {
    if (prices.empty()) fail(ErrorKind::insufficient_data, "align_daily: empty price series");
    prices.validate();

    AlignedBundle bundle;
    bundle.symbol = prices.symbol;
    bundle.rows.resize(prices.size());
    for (std::size_t i = 0; i < prices.size(); ++i) {
        bundle.rows[i].date = prices.dates[i];
        bundle.rows[i].close = prices.close[i];
    }

    for (std::size_t k = 0; k < news.size(); ++k) {
        const auto& a = news[k];
        const auto idx = roll_forward(prices.dates, a.date);
        if (!idx) {
            bundle.rejected.push_back({RejectedRecord::Kind::article, k, a.date,
                                       a.date < prices.dates.front() ? "before first trading date"
                                                                     : "after last trading date"});
            continue;
        }
        bundle.rows[*idx].articles.push_back(a);
    }

    // Features arrive sorted by date from the loader; sort a copy of the order
    // anyway so "latest cap wins" holds for arbitrary callers.
    std::vector<std::size_t> order(features.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return features[a].date < features[b].date; });
    for (std::size_t k : order) {
        const auto& f = features[k];
        const auto idx = roll_forward(prices.dates, f.date);
        if (!idx) {
            bundle.rejected.push_back({RejectedRecord::Kind::feature, k, f.date,
                                       f.date < prices.dates.front() ? "before first trading date"
                                                                     : "after last trading date"});
            continue;
        }
        auto& slot = bundle.rows[*idx].features;
        if (!slot) {
            slot = f;
            slot->date = prices.dates[*idx];
        } else {
            for (const auto& [sym, n] : f.article_count_by_symbol) slot->article_count_by_symbol[sym] += n;
            for (const auto& [sym, cap] : f.market_cap_by_symbol) slot->market_cap_by_symbol[sym] = cap;
        }
        bundle.has_features = true;
        if (!f.market_cap_by_symbol.empty()) bundle.has_market_caps = true;
    }
    return bundle;
}

}  // namespace hlppl
