#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hlppl/ingestion.hpp"
#include "hlppl/lppl.hpp"

namespace hlppl {

enum class NormalizationMode { global, running };

const char* to_string(NormalizationMode mode) noexcept;
NormalizationMode parse_normalization_mode(const std::string& text);

/// Log-price deviations from a fitted LPPL path. `epsilon_norm` stays empty until
/// normalize_residuals is applied.
struct ResidualSeries {
    std::vector<Date> dates;
    std::vector<double> epsilon;
    std::vector<double> epsilon_norm;
    std::optional<NormalizationMode> normalization_mode;

    std::size_t size() const noexcept { return epsilon.size(); }
};

/// epsilon(t) = ln p(t) - lppl(t). The fit must have been produced on exactly this window.
ResidualSeries compute_residuals(const PriceSeries& window, const LpplFit& fit);

/// Discrete mean reversion: delta eps(t) = -alpha eps(t) + u(t), fitted without intercept.
struct Ar1Estimate {
    double alpha = 0.0;
    double noise_std = 0.0;
    std::optional<double> half_life;  // ln 2 / alpha, only when alpha > 0
    double r_squared = 0.0;           // uncentered, as is usual without an intercept
    std::size_t n_obs = 0;
};

inline constexpr std::size_t kMinAr1Observations = 30;

Ar1Estimate fit_ar1(std::span<const double> epsilon, std::size_t min_observations = kMinAr1Observations);
Ar1Estimate fit_ar1(const ResidualSeries& residuals);

/// Residuals below this magnitude everywhere are treated as degenerate.
inline constexpr double kNormalizationFloor = 1e-12;

/// global: divide by max |eps| over the window. running: divide eps(t) by max |eps(s)|, s <= t.
std::vector<double> normalize_residuals(std::span<const double> epsilon, NormalizationMode mode);
ResidualSeries normalize_residuals(const ResidualSeries& residuals, NormalizationMode mode);

}  // namespace hlppl
