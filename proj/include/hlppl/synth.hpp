#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "hlppl/ingestion.hpp"
#include "hlppl/lppl.hpp"

namespace hlppl {

class Rng;

/// Ranges used when ground-truth LPPL parameters are drawn at random.
///
/// tc lies `tc_offset` days past the last index; B is chosen so that the
/// power-law part moves the log-price by `swing` across the window, and
/// |C| = c_ratio * |B|.
struct SynthBounds {
    std::pair<double, double> tc_offset{10.0, 60.0};
    std::pair<double, double> m{0.2, 0.8};
    std::pair<double, double> omega{5.0, 15.0};
    std::pair<double, double> swing{0.5, 1.5};
    std::pair<double, double> c_ratio{0.05, 0.2};
    double log_level = 4.6;  // ln(~100)
};

LpplParams draw_lppl_params(Rng& rng, std::size_t length, const SynthBounds& bounds = {});

enum class SynthNoise { none, iid, ar1 };

struct SynthConfig {
    std::string symbol = "SYN";
    std::size_t length = 300;
    Date start = Date::from_ymd(2020, 1, 2);
    std::optional<LpplParams> params;  // unset: drawn from `bounds`
    SynthBounds bounds;
    SynthNoise noise = SynthNoise::ar1;
    double noise_sigma = 0.01;
    double ar1_alpha = 0.1;
    std::uint64_t seed = 7;
    std::size_t peer_count = 4;  // extra symbols in the news universe
    bool with_news = true;
};

struct SynthResult {
    PriceSeries prices;
    LpplParams truth;
    std::vector<double> lppl_log_path;
    std::vector<double> residual;
    std::vector<NewsArticleRecord> news;
    std::vector<MarketFeatureRow> features;
};

/// Weekday calendar starting at `start` (first date rolled to a weekday).
std::vector<Date> business_days(Date start, std::size_t count);

/// LPPL path plus noise. With SynthNoise::ar1 the log-price follows
/// ln p(t+1) = ln p(t) + d lppl(t) - alpha (ln p(t) - lppl(t)) + u(t).
/// News and coverage are drawn so that attention and tone track the residual.
SynthResult synthesize(const SynthConfig& config);

}  // namespace hlppl
