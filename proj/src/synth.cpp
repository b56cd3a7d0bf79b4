#include "hlppl/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "hlppl/error.hpp"
#include "hlppl/rng.hpp"

namespace hlppl {

std::vector<Date> business_days(Date start, std::size_t count) {
    std::vector<Date> out;
    out.reserve(count);
    Date d = start;
    while (out.size() < count) {
        const unsigned wd = d.weekday();
        if (wd != 0 && wd != 6) out.push_back(d);
        d = d + 1;
    }
    return out;
}

LpplParams draw_lppl_params(Rng& rng, std::size_t length, const SynthBounds& bounds) {
    if (length < 2) fail(ErrorKind::contract, "draw_lppl_params: length must be >= 2");
    const double last = static_cast<double>(length - 1);
    LpplParams p;
    const double offset = rng.uniform(bounds.tc_offset.first, bounds.tc_offset.second);
    p.tc = last + offset;
    p.m = rng.uniform(bounds.m.first, bounds.m.second);
    p.omega = rng.uniform(bounds.omega.first, bounds.omega.second);
    p.phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double swing = rng.uniform(bounds.swing.first, bounds.swing.second);
    const double far = std::pow(p.tc, p.m);
    const double near = std::pow(offset, p.m);
    p.B = -swing / (far - near);
    p.C = rng.uniform(bounds.c_ratio.first, bounds.c_ratio.second) * std::abs(p.B);
    p.A = bounds.log_level - p.B * far;
    return p;
}

SynthResult synthesize(const SynthConfig& config) {
    if (config.length < 2) fail(ErrorKind::contract, "synthesize: length must be >= 2");
    if (config.noise == SynthNoise::ar1 && !(config.ar1_alpha > 0.0 && config.ar1_alpha < 2.0)) {
        fail(ErrorKind::contract, "synthesize: ar1 alpha must lie in (0, 2)");
    }
    Rng rng(mix_seed(config.seed, 0));
    Rng noise_rng(mix_seed(config.seed, 1));
    Rng news_rng(mix_seed(config.seed, 2));

    SynthResult out;
    const std::size_t n = config.length;
    out.truth = config.params ? *config.params : draw_lppl_params(rng, n, config.bounds);

    out.lppl_log_path.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.lppl_log_path[i] = lppl_eval(out.truth, static_cast<double>(i));

    out.residual.assign(n, 0.0);
    switch (config.noise) {
        case SynthNoise::none: break;
        case SynthNoise::iid:
            for (auto& e : out.residual) e = noise_rng.normal(0.0, config.noise_sigma);
            break;
        case SynthNoise::ar1: {
            const double phi = 1.0 - config.ar1_alpha;
            const double stationary_sd = config.noise_sigma / std::sqrt(1.0 - phi * phi);
            out.residual[0] = noise_rng.normal(0.0, stationary_sd);
            for (std::size_t i = 0; i + 1 < n; ++i) {
                out.residual[i + 1] = phi * out.residual[i] + noise_rng.normal(0.0, config.noise_sigma);
            }
            break;
        }
    }

    out.prices.symbol = config.symbol;
    out.prices.dates = business_days(config.start, n);
    out.prices.close.resize(n);
    out.prices.volume.emplace(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.prices.close[i] = std::exp(out.lppl_log_path[i] + out.residual[i]);
        (*out.prices.volume)[i] = static_cast<double>(100000 + rng.integer(0, 50000));
    }

    if (!config.with_news) return out;

    double max_abs = 0.0;
    for (double e : out.residual) max_abs = std::max(max_abs, std::abs(e));
    const double scale = max_abs > 0.0 ? max_abs : 1.0;

    std::vector<std::string> peers;
    for (std::size_t k = 1; k <= config.peer_count; ++k) peers.push_back("PEER" + std::to_string(k));

    for (std::size_t i = 0; i < n; ++i) {
        const Date d = out.prices.dates[i];
        const double tilt = out.residual[i] / scale;  // [-1, 1]
        const auto target_count = static_cast<long long>(news_rng.integer(0, 2) + std::lround(8.0 * std::abs(tilt)));

        MarketFeatureRow row;
        row.date = d;
        row.article_count_by_symbol[config.symbol] = target_count;
        row.market_cap_by_symbol[config.symbol] = 50.0 * out.prices.close[i] / out.prices.close[0];
        for (std::size_t k = 0; k < peers.size(); ++k) {
            row.article_count_by_symbol[peers[k]] = news_rng.integer(2, 6);
            row.market_cap_by_symbol[peers[k]] = 100.0 * static_cast<double>(k + 1);
        }
        out.features.push_back(std::move(row));

        for (long long a = 0; a < target_count; ++a) {
            NewsArticleRecord art;
            art.date = d;
            art.symbol = config.symbol;
            art.polarity = std::clamp(std::tanh(2.0 * tilt) + news_rng.normal(0.0, 0.25), -1.0, 1.0);
            art.weight = 1.0;
            art.sentiment_class = art.polarity > 0.2    ? SentimentClass::positive
                                  : art.polarity < -0.2 ? SentimentClass::negative
                                                        : SentimentClass::neutral;
            art.confidence = news_rng.uniform(0.5, 1.0);
            out.news.push_back(art);
        }
        // Weekly market-wide story on the Saturday after each Friday.
        if (d.weekday() == 5) {
            NewsArticleRecord art;
            art.date = d + 1;
            art.symbol = kMarketWideSymbol;
            art.polarity = std::clamp(news_rng.normal(0.0, 0.4), -1.0, 1.0);
            art.sentiment_class = art.polarity > 0.2    ? SentimentClass::positive
                                  : art.polarity < -0.2 ? SentimentClass::negative
                                                        : SentimentClass::neutral;
            art.confidence = news_rng.uniform(0.5, 1.0);
            if (art.date <= out.prices.dates.back()) out.news.push_back(art);
        }
    }
    return out;
}

}  // namespace hlppl
