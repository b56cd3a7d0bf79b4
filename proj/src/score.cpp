#include "hlppl/score.hpp"

#include <cmath>
#include <string>

#include "hlppl/error.hpp"

namespace hlppl {

void ScoreParams::validate() const {
    if (!(alpha1 >= 0.0) || !(alpha2 >= 0.0)) fail(ErrorKind::contract, "score weights must be non-negative");
}

double compose_score(double epsilon_norm, double hype, double sentiment, const ScoreParams& params) {
    params.validate();
    if (!(epsilon_norm >= -1.0 && epsilon_norm <= 1.0)) {
        fail(ErrorKind::contract, "compose_score: epsilon_norm outside [-1, 1]");
    }
    if (!(hype >= 0.0 && hype <= 1.0)) fail(ErrorKind::contract, "compose_score: hype outside [0, 1]");
    if (!(sentiment >= -1.0 && sentiment <= 1.0)) fail(ErrorKind::contract, "compose_score: sentiment outside [-1, 1]");

    if (epsilon_norm > 0.0) return epsilon_norm + params.alpha1 * hype + params.alpha2 * sentiment;
    if (epsilon_norm < 0.0) return epsilon_norm - params.alpha1 * hype + params.alpha2 * sentiment;
    return params.alpha2 * sentiment;
}

ScoreSeries compose_score_series(std::span<const Date> dates, std::span<const double> epsilon_norm,
                                 std::span<const double> hype, std::span<const double> sentiment,
                                 const ScoreParams& params) {
    const auto n = dates.size();
    if (epsilon_norm.size() != n || hype.size() != n || sentiment.size() != n) {
        fail(ErrorKind::contract, "compose_score_series: component lengths differ");
    }
    ScoreSeries out;
    out.dates.assign(dates.begin(), dates.end());
    out.epsilon_norm.assign(epsilon_norm.begin(), epsilon_norm.end());
    out.hype.assign(hype.begin(), hype.end());
    out.sentiment.assign(sentiment.begin(), sentiment.end());
    out.score.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.score[i] = compose_score(epsilon_norm[i], hype[i], sentiment[i], params);
    return out;
}

const char* to_string(EpisodeType type) noexcept { return type == EpisodeType::normal ? "normal" : "negative"; }

EpisodeType parse_episode_type(const std::string& text) {
    if (text == "normal") return EpisodeType::normal;
    if (text == "negative") return EpisodeType::negative;
    fail(ErrorKind::parse, "unknown episode type '" + text + "'");
}

std::vector<Episode> label_episodes(std::span<const double> score, std::span<const Date> dates,
                                    const LabelConfig& config) {
    if (!(config.tau > 0.0)) fail(ErrorKind::contract, "label_episodes: tau must be positive");
    if (config.d_min < 1) fail(ErrorKind::contract, "label_episodes: d_min must be >= 1");
    if (!dates.empty() && dates.size() != score.size()) {
        fail(ErrorKind::contract, "label_episodes: dates and scores differ in length");
    }

    // +1 above tau, -1 below -tau, 0 otherwise
    auto side = [&](double s) { return s > config.tau ? 1 : (s < -config.tau ? -1 : 0); };

    std::vector<Episode> out;
    std::size_t i = 0;
    while (i < score.size()) {
        const int sign = side(score[i]);
        if (sign == 0) {
            ++i;
            continue;
        }
        std::size_t j = i;
        double intensity = 0.0;
        while (j < score.size() && side(score[j]) == sign) {
            intensity = std::max(intensity, std::abs(score[j]));
            ++j;
        }
        const std::size_t length = j - i;
        if (length >= config.d_min) {
            Episode e;
            e.start_index = i;
            e.end_index = j - 1;
            if (!dates.empty()) {
                e.start_date = dates[i];
                e.end_date = dates[j - 1];
            }
            e.type = sign > 0 ? EpisodeType::normal : EpisodeType::negative;
            e.intensity = intensity;
            e.duration = length;
            out.push_back(e);
        }
        i = j;
    }
    return out;
}

std::vector<Episode> label_episodes(const ScoreSeries& scores, const LabelConfig& config) {
    return label_episodes(scores.score, scores.dates, config);
}

}  // namespace hlppl
