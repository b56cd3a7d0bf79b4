#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "hlppl/date.hpp"
#include "hlppl/ingestion.hpp"

namespace hlppl {

/// Parameters of ln p(t) = A + B (tc - t)^m + C (tc - t)^m cos(omega ln(tc - t) + phi).
/// Time is the trading-day index inside the fitted window (first day = 0).
struct LpplParams {
    double A = 0.0;
    double B = 0.0;
    double C = 0.0;
    double tc = 0.0;
    double m = 0.5;
    double omega = 1.0;
    double phi = 0.0;
};

/// Log-price of the model at day index t. Throws Error(domain) when t >= tc.
double lppl_eval(const LpplParams& params, double t);

/// Solution of the linear part of the model for fixed (tc, m, omega).
///
/// With C cos(omega ln(tc - t) + phi) = C1 cos(omega ln(tc - t)) + C2 sin(omega ln(tc - t)),
/// the log-price is linear in (A, B, C1, C2) and is solved by least squares.
struct LinearSubfit {
    double A = 0.0;
    double B = 0.0;
    double C1 = 0.0;
    double C2 = 0.0;
    double C = 0.0;    // sqrt(C1^2 + C2^2)
    double phi = 0.0;  // atan2(-C2, C1)
    double sse = 0.0;
};

/// `log_prices[i]` is observed at day index i. Throws Error(contract) if tc is not
/// beyond the last index and Error(degenerate) if the design matrix is rank deficient.
LinearSubfit linear_subfit(double tc, double m, double omega, std::span<const double> log_prices);
LinearSubfit linear_subfit(double tc, double m, double omega, const PriceSeries& window);

struct FitConfig {
    int restarts = 32;
    /// Search range for tc as offsets (days) past the last index of the window.
    /// Unset means (1, 0.5 * window length).
    std::optional<std::pair<double, double>> tc_search;
    std::pair<double, double> m_bounds{0.01, 0.99};
    std::pair<double, double> omega_bounds{2.0, 25.0};
    int max_iterations = 500;
    double convergence_tolerance = 1e-9;
    std::uint64_t rng_seed = 42;
    std::size_t min_window = 100;

    /// Throws Error(contract) on unordered bounds or restarts < 1.
    void validate() const;
    std::pair<double, double> tc_offsets(std::size_t window_length) const;
};

/// Per-restart diagnostics: the random start and what local search made of it.
struct RestartTrace {
    double tc0 = 0.0;
    double m0 = 0.0;
    double omega0 = 0.0;
    double initial_sse = 0.0;
    double final_sse = 0.0;
    int iterations = 0;
    bool ok = false;
};

struct LpplFit {
    LpplParams params;
    double sse = 0.0;
    double rmse = 0.0;
    Date window_start;
    Date window_end;
    std::size_t n_obs = 0;
    int restarts_used = 0;
    std::vector<RestartTrace> restarts;
};

/// Multi-start fit: each restart draws (tc, m, omega) uniformly within bounds,
/// solves the linear sub-problem and refines (tc, m, omega) with a bounded
/// Nelder-Mead search on the sum of squared log-price residuals. The best restart
/// (lowest sse, then lowest tc) wins. Deterministic for a given rng_seed.
LpplFit fit_lppl(const PriceSeries& window, const FitConfig& config = {});

/// Same as fit_lppl on raw log-prices; window dates are left default.
LpplFit fit_lppl_log(std::span<const double> log_prices, const FitConfig& config = {});

/// Fits consecutive windows of `window_length` rows advanced by `step` rows.
std::vector<LpplFit> fit_lppl_rolling(const PriceSeries& series, std::size_t window_length,
                                      std::size_t step, const FitConfig& config = {});

}  // namespace hlppl
