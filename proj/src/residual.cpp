#include "hlppl/residual.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hlppl/error.hpp"

namespace hlppl {

const char* to_string(NormalizationMode mode) noexcept {
    return mode == NormalizationMode::global ? "global" : "running";
}

NormalizationMode parse_normalization_mode(const std::string& text) {
    if (text == "global") return NormalizationMode::global;
    if (text == "running") return NormalizationMode::running;
    fail(ErrorKind::contract, "unknown normalization mode '" + text + "'");
}

ResidualSeries compute_residuals(const PriceSeries& window, const LpplFit& fit) {
    if (window.empty() || window.size() != fit.n_obs || window.dates.front() != fit.window_start ||
        window.dates.back() != fit.window_end) {
        fail(ErrorKind::contract, "compute_residuals: series window does not match the fitted window");
    }
    ResidualSeries out;
    out.dates = window.dates;
    out.epsilon.resize(window.size());
    for (std::size_t i = 0; i < window.size(); ++i) {
        out.epsilon[i] = std::log(window.close[i]) - lppl_eval(fit.params, static_cast<double>(i));
    }
    return out;
}

Ar1Estimate fit_ar1(std::span<const double> eps, std::size_t min_observations) {
    if (eps.size() < std::max<std::size_t>(min_observations, 2)) {
        fail(ErrorKind::insufficient_data, "fit_ar1: need at least " + std::to_string(min_observations) +
                                               " residuals, got " + std::to_string(eps.size()));
    }
    const auto [lo, hi] = std::minmax_element(eps.begin(), eps.end());
    if (*lo == *hi) fail(ErrorKind::degenerate, "fit_ar1: constant residual series");

    // delta(t) = -alpha * eps(t) + u(t), t = 0 .. n-2
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t t = 0; t + 1 < eps.size(); ++t) {
        const double x = -eps[t];
        const double y = eps[t + 1] - eps[t];
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    if (!(sxx > 0.0)) fail(ErrorKind::degenerate, "fit_ar1: regressor is identically zero");

    Ar1Estimate est;
    est.n_obs = eps.size() - 1;
    est.alpha = sxy / sxx;
    double ssr = 0.0;
    for (std::size_t t = 0; t + 1 < eps.size(); ++t) {
        const double u = (eps[t + 1] - eps[t]) + est.alpha * eps[t];
        ssr += u * u;
    }
    const double dof = static_cast<double>(est.n_obs > 1 ? est.n_obs - 1 : 1);
    est.noise_std = std::sqrt(ssr / dof);
    est.r_squared = syy > 0.0 ? 1.0 - ssr / syy : 0.0;
    if (est.alpha > 0.0) est.half_life = std::numbers::ln2 / est.alpha;
    return est;
}

Ar1Estimate fit_ar1(const ResidualSeries& residuals) { return fit_ar1(residuals.epsilon); }

std::vector<double> normalize_residuals(std::span<const double> eps, NormalizationMode mode) {
    double peak = 0.0;
    for (double e : eps) peak = std::max(peak, std::abs(e));
    if (!(peak >= kNormalizationFloor)) {
        fail(ErrorKind::degenerate, "normalize_residuals: residuals are identically zero");
    }
    std::vector<double> out(eps.size());
    if (mode == NormalizationMode::global) {
        for (std::size_t i = 0; i < eps.size(); ++i) out[i] = eps[i] / peak;
        return out;
    }
    double running = 0.0;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        running = std::max(running, std::abs(eps[i]));
        // Leading residuals too small to normalize are reported as 0.
        out[i] = running >= kNormalizationFloor ? eps[i] / running : 0.0;
    }
    return out;
}

ResidualSeries normalize_residuals(const ResidualSeries& residuals, NormalizationMode mode) {
    ResidualSeries out = residuals;
    out.epsilon_norm = normalize_residuals(residuals.epsilon, mode);
    out.normalization_mode = mode;
    return out;
}

}  // namespace hlppl
