#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hlppl/date.hpp"

namespace hlppl {

struct ScoreParams {
    double alpha1 = 0.2;  // hype weight
    double alpha2 = 0.2;  // sentiment weight

    void validate() const;
};

/// Positive residual: eps + a1 H + a2 S. Negative residual: eps - a1 H + a2 S.
/// A zero residual keeps only the sentiment term. Throws Error(contract) when
/// eps or S leave [-1, 1] or H leaves [0, 1].
double compose_score(double epsilon_norm, double hype, double sentiment, const ScoreParams& params);

struct ScoreSeries {
    std::vector<Date> dates;
    std::vector<double> score;
    std::vector<double> epsilon_norm;
    std::vector<double> hype;
    std::vector<double> sentiment;

    std::size_t size() const noexcept { return score.size(); }
};

ScoreSeries compose_score_series(std::span<const Date> dates, std::span<const double> epsilon_norm,
                                 std::span<const double> hype, std::span<const double> sentiment,
                                 const ScoreParams& params);

enum class EpisodeType { normal, negative };

const char* to_string(EpisodeType type) noexcept;
EpisodeType parse_episode_type(const std::string& text);

struct Episode {
    std::size_t start_index = 0;
    std::size_t end_index = 0;  // inclusive
    Date start_date;
    Date end_date;
    EpisodeType type = EpisodeType::normal;
    double intensity = 0.0;
    std::size_t duration = 0;  // trading days

    bool operator==(const Episode&) const = default;
};

struct LabelConfig {
    double tau = 0.8;
    std::size_t d_min = 10;
};

/// Maximal same-sign runs with |score| > tau lasting at least d_min days.
std::vector<Episode> label_episodes(std::span<const double> score, std::span<const Date> dates,
                                    const LabelConfig& config = {});
std::vector<Episode> label_episodes(const ScoreSeries& scores, const LabelConfig& config = {});

}  // namespace hlppl
