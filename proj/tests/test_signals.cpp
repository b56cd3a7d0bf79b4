#include <doctest.h>

#include <cmath>
#include <vector>

#include "hlppl/error.hpp"
#include "hlppl/rng.hpp"
#include "hlppl/signals.hpp"
#include "oracles.hpp"

using namespace hlppl;

namespace {

NewsArticleRecord art(double polarity, double weight, SentimentClass cls = SentimentClass::neutral,
                      double confidence = 0.0, const std::string& symbol = "TST") {
    NewsArticleRecord a;
    a.date = Date::from_ymd(2021, 1, 4);
    a.symbol = symbol;
    a.polarity = polarity;
    a.weight = weight;
    a.sentiment_class = cls;
    a.confidence = confidence;
    return a;
}

}  // namespace

TEST_SUITE("signals") {

TEST_CASE("hype index ratios") {
    CHECK(hype_index({{"TST", 10}, {"X", 90}}, "TST").value == doctest::Approx(0.1));
    CHECK(hype_index({{"TST", 40}}, "TST").value == 1.0);
    CHECK(hype_index({{"X", 40}}, "TST").value == 0.0);
    const auto none = hype_index({{"TST", 0}, {"X", 0}}, "TST");
    CHECK(none.no_coverage);
    CHECK(none.value == 0.0);
    CHECK_THROWS_AS(hype_index({{"TST", -1}}, "TST"), Error);
}

TEST_CASE("hype sums to one across the universe") {
    Rng rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        std::map<std::string, long long> counts;
        const auto m = rng.integer(1, 30);
        for (long long i = 0; i < m; ++i) counts["S" + std::to_string(i)] = rng.integer(0, 50);
        counts["S0"] += 1;
        double total = 0.0;
        for (const auto& [sym, n] : counts) total += hype_index(counts, sym).value;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("hype rises with own coverage") {
    double last = -1.0;
    for (long long own = 0; own <= 50; ++own) {
        const double h = hype_index({{"TST", own}, {"X", 25}}, "TST").value;
        CHECK(h > last);
        last = h;
    }
}

TEST_CASE("cap-adjusted hype") {
    const std::map<std::string, double> caps{{"TST", 5.0}, {"X", 95.0}};
    const auto over = cap_adjusted_hype(0.1, caps, "TST");
    CHECK(over.cap_weight == doctest::Approx(0.05));
    CHECK(over.value == doctest::Approx(2.0));
    CHECK(over.regime == HypeRegime::excessive);
    const auto even = cap_adjusted_hype(0.05, caps, "TST");
    CHECK(even.value == doctest::Approx(1.0));
    CHECK(even.regime == HypeRegime::neutral);
    const auto under = cap_adjusted_hype(0.01, caps, "TST");
    CHECK(under.value == doctest::Approx(0.2));
    CHECK(under.regime == HypeRegime::under);
    try {
        cap_adjusted_hype(0.1, caps, "MISSING");
        FAIL("expected feature_unavailable");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::feature_unavailable);
    }
}

TEST_CASE("weighted polarity") {
    std::vector<NewsArticleRecord> balanced{art(1.0, 1.0), art(-1.0, 1.0)};
    CHECK(sentiment_score(balanced).value == 0.0);
    std::vector<NewsArticleRecord> single{art(0.6, 3.0)};
    CHECK(sentiment_score(single).value == doctest::Approx(0.6));
    std::vector<NewsArticleRecord> tilted{art(1.0, 3.0), art(-1.0, 1.0)};
    CHECK(sentiment_score(tilted).value == doctest::Approx(0.5));
    const auto empty = sentiment_score({});
    CHECK(empty.no_news);
    CHECK(empty.value == 0.0);
}

TEST_CASE("class shares") {
    std::vector<NewsArticleRecord> mixed{art(0, 1, SentimentClass::positive, 0.8), art(0, 1, SentimentClass::negative, 0.4)};
    const auto s = finbert_daily_aggregate(mixed);
    CHECK(s.positive == doctest::Approx(2.0 / 3.0));
    CHECK(s.neutral == 0.0);
    CHECK(s.negative == doctest::Approx(1.0 / 3.0));
    CHECK(s.net() == doctest::Approx(1.0 / 3.0));

    std::vector<NewsArticleRecord> neutral{art(0, 1, SentimentClass::neutral, 0.9)};
    const auto n = finbert_daily_aggregate(neutral);
    CHECK(n.positive == 0.0);
    CHECK(n.neutral == 1.0);
    CHECK(n.negative == 0.0);

    for (double p : {0.01, 0.5, 1.0}) {
        std::vector<NewsArticleRecord> three(3, art(0, 1, SentimentClass::positive, p));
        const auto t = finbert_daily_aggregate(three);
        CHECK(t.positive == doctest::Approx(1.0));
        CHECK(t.negative == 0.0);
    }
    std::vector<NewsArticleRecord> unsure{art(0, 1, SentimentClass::positive, 0.0)};
    CHECK_THROWS_AS(finbert_daily_aggregate(unsure), Error);
}

TEST_CASE("compute_signals per trading date") {
    auto prices = oracle::prices({10, 11, 12});
    std::vector<NewsArticleRecord> news{art(0.4, 1.0, SentimentClass::positive, 0.9),
                                        art(-0.8, 1.0, SentimentClass::negative, 0.5, "X"),
                                        art(0.0, 1.0, SentimentClass::negative, 0.3, kMarketWideSymbol)};
    for (auto& a : news) a.date = prices.dates[1];
    MarketFeatureRow f;
    f.date = prices.dates[1];
    f.article_count_by_symbol = {{"TST", 1}, {"X", 3}};
    f.market_cap_by_symbol = {{"TST", 1.0}, {"X", 1.0}};
    auto bundle = align_daily(prices, news, {f});
    bundle.symbol = "TST";
    const auto sig = compute_signals(bundle);
    REQUIRE(sig.rows.size() == 3);
    CHECK(sig.rows[0].no_news);
    CHECK(sig.rows[0].sentiment == 0.0);
    CHECK(sig.rows[0].hype == 0.0);
    CHECK(sig.rows[1].sentiment == doctest::Approx(0.4));
    CHECK(sig.rows[1].hype == doctest::Approx(0.25));
    REQUIRE(sig.rows[1].cap_hype.has_value());
    CHECK(*sig.rows[1].cap_hype == doctest::Approx(0.5));
    // The symbol's own article plus the market-wide one.
    CHECK(sig.rows[1].shares.positive == doctest::Approx(0.75));
    CHECK(sig.rows[1].shares.negative == doctest::Approx(0.25));

    const auto net = compute_signals(bundle, SentimentSource::class_net);
    CHECK(net.rows[1].sentiment == doctest::Approx(1.0));
    CHECK(sig.hype() == std::vector<double>{0.0, 0.25, 0.0});
}

}
