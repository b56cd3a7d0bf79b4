#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hlppl/date.hpp"
#include "hlppl/score.hpp"

namespace hlppl {

inline constexpr int kMaxHorizon = 5;

/// Predicted Bubble Scores for horizons 1..5, one row per forecast origin date.
struct ForecastSet {
    std::vector<Date> dates;
    std::array<std::vector<double>, kMaxHorizon> predictions;  // [h - 1][row]
    std::string source;

    std::size_t size() const noexcept { return dates.size(); }
    std::span<const double> horizon(int h) const;

    /// Throws Error(contract) on ragged columns or values outside `range`.
    void validate(std::pair<double, double> range = {-2.0, 2.0}) const;
};

/// Minimal interface for anything that can produce multi-horizon forecasts.
class Forecaster {
public:
    virtual ~Forecaster() = default;
    virtual std::string name() const = 0;
    virtual ForecastSet forecast(const ScoreSeries& scores) const = 0;
};

/// Persistence with AR(1) decay: prediction(t + h) = score(t) * (1 - alpha)^h, alpha in [0, 1].
struct BaselineOptions {
    std::optional<double> alpha;  // unset: estimated from the score history
    bool strict_range = false;    // clamp to [-1, 1] like a tanh head
};

std::vector<double> baseline_forecast(std::span<const double> scores, int h, double alpha,
                                      bool strict_range = false);
std::vector<double> baseline_forecast(const ScoreSeries& scores, int h, const BaselineOptions& options = {});

/// Least-squares mean-reversion rate of the score series, clamped to [0, 1].
double estimate_baseline_alpha(std::span<const double> scores);

class BaselineForecaster final : public Forecaster {
public:
    explicit BaselineForecaster(BaselineOptions options = {}) : options_(options) {}
    std::string name() const override { return "baseline_ar1_decay"; }
    ForecastSet forecast(const ScoreSeries& scores) const override;

private:
    BaselineOptions options_;
};

struct EvalMetrics {
    std::optional<double> correlation;  // unset when either series is constant
    double mse = 0.0;
    double mae = 0.0;
    double rmse = 0.0;
};

EvalMetrics eval_metrics(std::span<const double> predicted, std::span<const double> actual);

struct LossWeights {
    double lambda1 = 1.0;  // Huber
    double lambda2 = 0.5;  // 1 - correlation
    double lambda3 = 0.5;  // 1 - R^2
    double lambda4 = 0.5;  // temporal consistency of first differences
    double lambda5 = 0.1;  // smoothness of predictions (second differences)
    double huber_delta = 1.0;

    void validate() const;
};

struct LossBreakdown {
    double total = 0.0;
    double huber = 0.0;
    double correlation = 0.0;
    double r_squared = 0.0;
    double consistency = 0.0;
    double smoothness = 0.0;
    bool correlation_degenerate = false;
    bool r_squared_degenerate = false;
};

/// Unweighted terms are reported individually; `total` is the weighted sum.
LossBreakdown combined_loss(std::span<const double> predicted, std::span<const double> actual,
                            const LossWeights& weights = {});

struct LossGradient {
    std::vector<double> gradient;
    bool correlation_degenerate = false;
    bool r_squared_degenerate = false;
};

/// d combined_loss / d predicted.
LossGradient loss_gradient(std::span<const double> predicted, std::span<const double> actual,
                           const LossWeights& weights = {});

double huber(double residual, double delta);

}  // namespace hlppl
