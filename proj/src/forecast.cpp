#include "hlppl/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hlppl/error.hpp"
#include "hlppl/residual.hpp"

namespace hlppl {

std::span<const double> ForecastSet::horizon(int h) const {
    if (h < 1 || h > kMaxHorizon) fail(ErrorKind::contract, "forecast horizon must be in 1..5");
    return predictions[static_cast<std::size_t>(h - 1)];
}

void ForecastSet::validate(std::pair<double, double> range) const {
    for (std::size_t i = 1; i < dates.size(); ++i) {
        if (!(dates[i - 1] < dates[i])) fail(ErrorKind::contract, "forecasts: dates not strictly increasing");
    }
    for (int h = 1; h <= kMaxHorizon; ++h) {
        const auto& col = predictions[static_cast<std::size_t>(h - 1)];
        if (col.size() != dates.size()) {
            fail(ErrorKind::contract, "forecasts: horizon " + std::to_string(h) + " series is missing or misaligned");
        }
        for (double v : col) {
            if (std::isnan(v) || v < range.first || v > range.second) {
                fail(ErrorKind::contract, "forecasts: horizon " + std::to_string(h) + " value outside allowed range");
            }
        }
    }
}

std::vector<double> baseline_forecast(std::span<const double> scores, int h, double alpha, bool strict_range) {
    if (h < 1 || h > kMaxHorizon) fail(ErrorKind::contract, "baseline_forecast: horizon must be in 1..5");
    if (scores.size() < 2) fail(ErrorKind::insufficient_data, "baseline_forecast: need at least 2 observations");
    const double decay = std::pow(1.0 - std::clamp(alpha, 0.0, 1.0), h);
    std::vector<double> out(scores.size());
    for (std::size_t t = 0; t < scores.size(); ++t) {
        out[t] = scores[t] * decay;
        if (strict_range) out[t] = std::clamp(out[t], -1.0, 1.0);
    }
    return out;
}

double estimate_baseline_alpha(std::span<const double> scores) {
    if (scores.size() < 2) fail(ErrorKind::insufficient_data, "estimate_baseline_alpha: need at least 2 observations");
    try {
        return std::clamp(fit_ar1(scores, 2).alpha, 0.0, 1.0);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::degenerate) throw;
        return 0.0;
    }
}

std::vector<double> baseline_forecast(const ScoreSeries& scores, int h, const BaselineOptions& options) {
    const double alpha = options.alpha ? *options.alpha : estimate_baseline_alpha(scores.score);
    return baseline_forecast(scores.score, h, alpha, options.strict_range);
}

ForecastSet BaselineForecaster::forecast(const ScoreSeries& scores) const {
    BaselineOptions opts = options_;
    if (!opts.alpha) opts.alpha = estimate_baseline_alpha(scores.score);
    ForecastSet out;
    out.dates = scores.dates;
    out.source = name();
    for (int h = 1; h <= kMaxHorizon; ++h) {
        out.predictions[static_cast<std::size_t>(h - 1)] = baseline_forecast(scores, h, opts);
    }
    return out;
}

namespace {

void check_pair(std::span<const double> predicted, std::span<const double> actual, std::size_t min_len,
                const char* who) {
    if (predicted.size() != actual.size()) fail(ErrorKind::contract, std::string(who) + ": series lengths differ");
    if (predicted.size() < min_len) {
        fail(ErrorKind::insufficient_data,
             std::string(who) + ": need at least " + std::to_string(min_len) + " observations");
    }
}

double mean(std::span<const double> x) { return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size()); }

struct Moments {
    double mean_p = 0.0;
    double mean_a = 0.0;
    double spp = 0.0;  // sum (p - mean)^2
    double saa = 0.0;
    double spa = 0.0;
};

Moments moments(std::span<const double> p, std::span<const double> a) {
    Moments m;
    m.mean_p = mean(p);
    m.mean_a = mean(a);
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double dp = p[i] - m.mean_p;
        const double da = a[i] - m.mean_a;
        m.spp += dp * dp;
        m.saa += da * da;
        m.spa += dp * da;
    }
    return m;
}

// Treat a centered sum of squares this small (relative to the raw scale) as zero.
bool vanishing(double centered_ss, std::span<const double> x) {
    double raw = 0.0;
    for (double v : x) raw += v * v;
    return !(centered_ss > 1e-24 * std::max(raw, 1.0));
}

double huber_slope(double r, double delta) { return std::abs(r) <= delta ? r : delta * (r > 0 ? 1.0 : -1.0); }

}  // namespace

double huber(double r, double delta) {
    const double a = std::abs(r);
    return a <= delta ? 0.5 * r * r : delta * (a - 0.5 * delta);
}

EvalMetrics eval_metrics(std::span<const double> predicted, std::span<const double> actual) {
    check_pair(predicted, actual, 2, "eval_metrics");
    EvalMetrics out;
    const auto n = static_cast<double>(predicted.size());
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const double e = predicted[i] - actual[i];
        out.mse += e * e;
        out.mae += std::abs(e);
    }
    out.mse /= n;
    out.mae /= n;
    out.rmse = std::sqrt(out.mse);
    const auto m = moments(predicted, actual);
    if (!vanishing(m.spp, predicted) && !vanishing(m.saa, actual)) {
        out.correlation = m.spa / std::sqrt(m.spp * m.saa);
    }
    return out;
}

void LossWeights::validate() const {
    const double l[] = {lambda1, lambda2, lambda3, lambda4, lambda5};
    bool any = false;
    for (double v : l) {
        if (!(v >= 0.0)) fail(ErrorKind::contract, "loss weights must be non-negative");
        any = any || v > 0.0;
    }
    if (!any) fail(ErrorKind::contract, "at least one loss weight must be positive");
    if (!(huber_delta > 0.0)) fail(ErrorKind::contract, "huber_delta must be positive");
}

LossBreakdown combined_loss(std::span<const double> p, std::span<const double> a, const LossWeights& w) {
    check_pair(p, a, 3, "combined_loss");
    w.validate();
    const std::size_t n = p.size();
    LossBreakdown out;

    for (std::size_t i = 0; i < n; ++i) out.huber += huber(p[i] - a[i], w.huber_delta);
    out.huber /= static_cast<double>(n);

    const auto m = moments(p, a);
    if (vanishing(m.spp, p) || vanishing(m.saa, a)) {
        out.correlation_degenerate = true;
    } else {
        out.correlation = 1.0 - m.spa / std::sqrt(m.spp * m.saa);
    }
    if (vanishing(m.saa, a)) {
        out.r_squared_degenerate = true;
    } else {
        double sse = 0.0;
        for (std::size_t i = 0; i < n; ++i) sse += (p[i] - a[i]) * (p[i] - a[i]);
        out.r_squared = sse / m.saa;  // 1 - R^2
    }

    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double d = (p[i + 1] - p[i]) - (a[i + 1] - a[i]);
        out.consistency += d * d;
    }
    out.consistency /= static_cast<double>(n - 1);

    for (std::size_t i = 0; i + 2 < n; ++i) {
        const double s = p[i + 2] - 2.0 * p[i + 1] + p[i];
        out.smoothness += s * s;
    }
    out.smoothness /= static_cast<double>(n - 2);

    out.total = w.lambda1 * out.huber + w.lambda2 * out.correlation + w.lambda3 * out.r_squared +
                w.lambda4 * out.consistency + w.lambda5 * out.smoothness;
    return out;
}

LossGradient loss_gradient(std::span<const double> p, std::span<const double> a, const LossWeights& w) {
    check_pair(p, a, 3, "loss_gradient");
    w.validate();
    const std::size_t n = p.size();
    const auto nd = static_cast<double>(n);
    LossGradient out;
    auto& g = out.gradient;
    g.assign(n, 0.0);

    for (std::size_t i = 0; i < n; ++i) g[i] += w.lambda1 * huber_slope(p[i] - a[i], w.huber_delta) / nd;

    const auto m = moments(p, a);
    if (vanishing(m.spp, p) || vanishing(m.saa, a)) {
        out.correlation_degenerate = true;
    } else {
        const double denom = std::sqrt(m.spp * m.saa);
        const double rho = m.spa / denom;
        for (std::size_t i = 0; i < n; ++i) {
            const double drho = (a[i] - m.mean_a) / denom - rho * (p[i] - m.mean_p) / m.spp;
            g[i] -= w.lambda2 * drho;
        }
    }
    if (vanishing(m.saa, a)) {
        out.r_squared_degenerate = true;
    } else {
        for (std::size_t i = 0; i < n; ++i) g[i] += w.lambda3 * 2.0 * (p[i] - a[i]) / m.saa;
    }

    const double cons_scale = w.lambda4 * 2.0 / static_cast<double>(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double d = (p[i + 1] - p[i]) - (a[i + 1] - a[i]);
        g[i + 1] += cons_scale * d;
        g[i] -= cons_scale * d;
    }

    const double smooth_scale = w.lambda5 * 2.0 / static_cast<double>(n - 2);
    for (std::size_t i = 0; i + 2 < n; ++i) {
        const double s = p[i + 2] - 2.0 * p[i + 1] + p[i];
        g[i] += smooth_scale * s;
        g[i + 1] -= 2.0 * smooth_scale * s;
        g[i + 2] += smooth_scale * s;
    }
    return out;
}

}  // namespace hlppl
