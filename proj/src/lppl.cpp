#include "hlppl/lppl.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "hlppl/error.hpp"
#include "hlppl/rng.hpp"

namespace hlppl {

double lppl_eval(const LpplParams& p, double t) {
    const double dt = p.tc - t;
    if (!(dt > 0.0)) {
        fail(ErrorKind::domain, "lppl_eval: t = " + std::to_string(t) + " is not before tc = " + std::to_string(p.tc));
    }
    const double power = std::pow(dt, p.m);
    return p.A + p.B * power + p.C * power * std::cos(p.omega * std::log(dt) + p.phi);
}

namespace {

constexpr double kRankTolerance = 1e-10;
constexpr double kInf = std::numeric_limits<double>::infinity();
// Unit-cube simplex size below which further search cannot move the parameters.
constexpr double kSimplexFloor = 1e-11;

/// Least-squares solver for the four linear coefficients, with buffers reused
/// across the thousands of evaluations made by one restart.
class SubfitSolver {
public:
    explicit SubfitSolver(std::span<const double> y) : y_(y), n_(y.size()), design_(n_, 4), rhs_(n_) {
        for (std::size_t i = 0; i < n_; ++i) rhs_(static_cast<Eigen::Index>(i)) = y_[i];
    }

    /// False when the design matrix is rank deficient or non-finite.
    bool solve(double tc, double m, double omega, LinearSubfit& out) {
        const auto n = static_cast<Eigen::Index>(n_);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double dt = tc - static_cast<double>(i);
            const double log_dt = std::log(dt);
            const double power = std::exp(m * log_dt);
            design_(i, 0) = 1.0;
            design_(i, 1) = power;
            design_(i, 2) = power * std::cos(omega * log_dt);
            design_(i, 3) = power * std::sin(omega * log_dt);
        }
        // Unit-norm columns make the rank threshold on diag(R) scale free.
        Eigen::Vector4d scale;
        for (int j = 0; j < 4; ++j) {
            const double norm = design_.col(j).norm();
            if (!(norm > 0.0) || !std::isfinite(norm)) return false;
            scale(j) = norm;
            design_.col(j) /= norm;
        }
        qr_.compute(design_);
        const auto& packed = qr_.matrixQR();
        for (int j = 0; j < 4; ++j) {
            if (!(std::abs(packed(j, j)) > kRankTolerance)) return false;
        }
        const Eigen::Vector4d scaled = qr_.solve(rhs_);
        const Eigen::Vector4d coef = scaled.cwiseQuotient(scale);
        if (!coef.allFinite()) return false;

        double sse = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double fitted = design_.row(i).dot(scaled);
            const double r = rhs_(i) - fitted;
            sse += r * r;
        }
        out.A = coef(0);
        out.B = coef(1);
        out.C1 = coef(2);
        out.C2 = coef(3);
        out.C = std::hypot(out.C1, out.C2);
        out.phi = std::atan2(-out.C2, out.C1);
        out.sse = sse;
        return true;
    }

    std::size_t size() const noexcept { return n_; }

private:
    std::span<const double> y_;
    std::size_t n_;
    Eigen::Matrix<double, Eigen::Dynamic, 4> design_;
    Eigen::VectorXd rhs_;
    Eigen::HouseholderQR<Eigen::Matrix<double, Eigen::Dynamic, 4>> qr_;
};

void check_tc(double tc, std::size_t n) {
    if (n == 0) fail(ErrorKind::insufficient_data, "linear_subfit: empty window");
    if (!(tc > static_cast<double>(n - 1))) {
        fail(ErrorKind::contract, "linear_subfit: tc must lie beyond the last day index");
    }
}

/// Box-constrained search space for (tc, m, omega), handled in unit-cube coordinates.
struct SearchBox {
    std::array<double, 3> lo;
    std::array<double, 3> hi;

    std::array<double, 3> to_params(const std::array<double, 3>& u) const {
        std::array<double, 3> x{};
        for (int k = 0; k < 3; ++k) x[k] = lo[k] + (hi[k] - lo[k]) * std::clamp(u[k], 0.0, 1.0);
        return x;
    }
};

struct LocalResult {
    std::array<double, 3> u;
    double f = kInf;
    int iterations = 0;
};

/// Nelder-Mead on the unit cube; trial points are projected back into the box.
template <class Objective>
LocalResult nelder_mead(Objective&& objective, std::array<double, 3> start, double f_start, int max_iterations,
                        double tolerance) {
    constexpr int dim = 3;
    constexpr double step = 0.05;
    auto project = [](std::array<double, 3> u) {
        for (auto& v : u) v = std::clamp(v, 0.0, 1.0);
        return u;
    };

    std::array<std::array<double, 3>, dim + 1> pts{};
    std::array<double, dim + 1> vals{};
    pts[0] = start;
    vals[0] = f_start;
    for (int k = 0; k < dim; ++k) {
        auto p = start;
        p[k] += (p[k] + step <= 1.0) ? step : -step;
        pts[k + 1] = project(p);
        vals[k + 1] = objective(pts[k + 1]);
    }

    int iter = 0;
    std::array<int, dim + 1> order{};
    for (; iter < max_iterations; ++iter) {
        for (int k = 0; k <= dim; ++k) order[k] = k;
        std::sort(order.begin(), order.end(), [&](int a, int b) { return vals[a] < vals[b]; });
        const int best = order[0];
        const int worst = order[dim];
        const int second_worst = order[dim - 1];

        const double spread = vals[worst] - vals[best];
        if (std::isfinite(spread) && spread <= tolerance * std::abs(vals[best]) + 1e-300) break;
        double diameter = 0.0;
        for (int k = 0; k <= dim; ++k) {
            for (int d = 0; d < dim; ++d) diameter = std::max(diameter, std::abs(pts[k][d] - pts[best][d]));
        }
        if (diameter < kSimplexFloor) break;

        std::array<double, 3> centroid{};
        for (int k = 0; k <= dim; ++k) {
            if (k == worst) continue;
            for (int d = 0; d < dim; ++d) centroid[d] += pts[k][d] / dim;
        }
        auto along = [&](double coef) {
            std::array<double, 3> p{};
            for (int d = 0; d < dim; ++d) p[d] = centroid[d] + coef * (pts[worst][d] - centroid[d]);
            return project(p);
        };

        const auto reflected = along(-1.0);
        const double f_reflected = objective(reflected);
        if (f_reflected < vals[best]) {
            const auto expanded = along(-2.0);
            const double f_expanded = objective(expanded);
            if (f_expanded < f_reflected) {
                pts[worst] = expanded;
                vals[worst] = f_expanded;
            } else {
                pts[worst] = reflected;
                vals[worst] = f_reflected;
            }
            continue;
        }
        if (f_reflected < vals[second_worst]) {
            pts[worst] = reflected;
            vals[worst] = f_reflected;
            continue;
        }
        const bool outside = f_reflected < vals[worst];
        const auto contracted = along(outside ? -0.5 : 0.5);
        const double f_contracted = objective(contracted);
        if (f_contracted < (outside ? f_reflected : vals[worst])) {
            pts[worst] = contracted;
            vals[worst] = f_contracted;
            continue;
        }
        for (int k = 0; k <= dim; ++k) {
            if (k == best) continue;
            for (int d = 0; d < dim; ++d) pts[k][d] = pts[best][d] + 0.5 * (pts[k][d] - pts[best][d]);
            vals[k] = objective(pts[k]);
        }
    }

    const auto best_it = std::min_element(vals.begin(), vals.end());
    const auto best_idx = static_cast<std::size_t>(best_it - vals.begin());
    return {pts[best_idx], *best_it, iter};
}

}  // namespace

LinearSubfit linear_subfit(double tc, double m, double omega, std::span<const double> log_prices) {
    check_tc(tc, log_prices.size());
    if (log_prices.size() < 4) fail(ErrorKind::degenerate, "linear_subfit: fewer than 4 observations");
    SubfitSolver solver(log_prices);
    LinearSubfit out;
    if (!solver.solve(tc, m, omega, out)) {
        fail(ErrorKind::degenerate, "linear_subfit: rank-deficient design matrix");
    }
    return out;
}

LinearSubfit linear_subfit(double tc, double m, double omega, const PriceSeries& window) {
    std::vector<double> y(window.close.size());
    std::transform(window.close.begin(), window.close.end(), y.begin(), [](double p) { return std::log(p); });
    return linear_subfit(tc, m, omega, y);
}

void FitConfig::validate() const {
    if (restarts < 1) fail(ErrorKind::contract, "FitConfig: restarts must be >= 1");
    if (!(m_bounds.first > 0.0 && m_bounds.first < m_bounds.second && m_bounds.second < 1.0)) {
        fail(ErrorKind::contract, "FitConfig: m bounds must satisfy 0 < lo < hi < 1");
    }
    if (!(omega_bounds.first > 0.0 && omega_bounds.first < omega_bounds.second)) {
        fail(ErrorKind::contract, "FitConfig: omega bounds must satisfy 0 < lo < hi");
    }
    if (tc_search && !(tc_search->first > 0.0 && tc_search->first < tc_search->second)) {
        fail(ErrorKind::contract, "FitConfig: tc offsets must satisfy 0 < lo < hi");
    }
    if (max_iterations < 1) fail(ErrorKind::contract, "FitConfig: max_iterations must be >= 1");
    if (!(convergence_tolerance >= 0.0)) fail(ErrorKind::contract, "FitConfig: negative tolerance");
}

std::pair<double, double> FitConfig::tc_offsets(std::size_t window_length) const {
    if (tc_search) return *tc_search;
    return {1.0, 0.5 * static_cast<double>(window_length)};
}

LpplFit fit_lppl_log(std::span<const double> log_prices, const FitConfig& config) {
    config.validate();
    const std::size_t n = log_prices.size();
    if (n < config.min_window || n < 4) {
        fail(ErrorKind::insufficient_data, "fit_lppl: window has " + std::to_string(n) + " observations, need " +
                                               std::to_string(std::max<std::size_t>(config.min_window, 4)));
    }
    const double last = static_cast<double>(n - 1);
    const auto [tc_lo, tc_hi] = config.tc_offsets(n);
    const SearchBox box{{last + tc_lo, config.m_bounds.first, config.omega_bounds.first},
                        {last + tc_hi, config.m_bounds.second, config.omega_bounds.second}};

    SubfitSolver solver(log_prices);
    LinearSubfit scratch;
    auto objective = [&](const std::array<double, 3>& u) {
        const auto x = box.to_params(u);
        return solver.solve(x[0], x[1], x[2], scratch) ? scratch.sse : kInf;
    };

    LpplFit fit;
    fit.n_obs = n;
    fit.restarts.reserve(static_cast<std::size_t>(config.restarts));
    std::array<double, 3> best_u{};
    double best_f = kInf;
    double best_tc = kInf;

    for (int r = 0; r < config.restarts; ++r) {
        Rng rng(mix_seed(config.rng_seed, static_cast<std::uint64_t>(r)));
        std::array<double, 3> u0{rng.uniform(), rng.uniform(), rng.uniform()};
        const auto x0 = box.to_params(u0);

        RestartTrace trace;
        trace.tc0 = x0[0];
        trace.m0 = x0[1];
        trace.omega0 = x0[2];
        trace.initial_sse = objective(u0);

        // Re-seed the simplex at the incumbent until a pass stops improving;
        // a collapsed simplex otherwise stalls short of the minimum.
        LocalResult local{u0, trace.initial_sse, 0};
        int budget = config.max_iterations;
        while (budget > 0) {
            const auto pass = nelder_mead(objective, local.u, local.f, budget, config.convergence_tolerance);
            budget -= std::max(pass.iterations, 1);
            const bool improved = pass.f < local.f - config.convergence_tolerance * std::abs(local.f);
            trace.iterations += pass.iterations;
            if (pass.f <= local.f) {
                local.u = pass.u;
                local.f = pass.f;
            }
            if (!improved) break;
        }
        trace.final_sse = local.f;
        trace.ok = std::isfinite(local.f);
        fit.restarts.push_back(trace);
        if (!trace.ok) continue;

        const double tc = box.to_params(local.u)[0];
        if (local.f < best_f || (local.f == best_f && tc < best_tc)) {
            best_f = local.f;
            best_tc = tc;
            best_u = local.u;
        }
    }
    fit.restarts_used = config.restarts;
    if (!std::isfinite(best_f)) fail(ErrorKind::fit_failure, "fit_lppl: every restart failed");

    const auto x = box.to_params(best_u);
    LinearSubfit lin;
    solver.solve(x[0], x[1], x[2], lin);
    fit.params = {lin.A, lin.B, lin.C, x[0], x[1], x[2], lin.phi};
    fit.sse = lin.sse;
    fit.rmse = std::sqrt(lin.sse / static_cast<double>(n));
    return fit;
}

LpplFit fit_lppl(const PriceSeries& window, const FitConfig& config) {
    if (window.size() < config.min_window) {
        fail(ErrorKind::insufficient_data, "fit_lppl: window has " + std::to_string(window.size()) +
                                               " observations, need " + std::to_string(config.min_window));
    }
    std::vector<double> y(window.size());
    std::transform(window.close.begin(), window.close.end(), y.begin(), [](double p) { return std::log(p); });
    auto fit = fit_lppl_log(y, config);
    fit.window_start = window.dates.front();
    fit.window_end = window.dates.back();
    return fit;
}

std::vector<LpplFit> fit_lppl_rolling(const PriceSeries& series, std::size_t window_length, std::size_t step,
                                      const FitConfig& config) {
    if (step == 0) fail(ErrorKind::contract, "fit_lppl_rolling: step must be positive");
    if (window_length > series.size()) {
        fail(ErrorKind::insufficient_data, "fit_lppl_rolling: window longer than the series");
    }
    std::vector<LpplFit> fits;
    for (std::size_t first = 0; first + window_length <= series.size(); first += step) {
        fits.push_back(fit_lppl(series.slice(first, window_length), config));
    }
    return fits;
}

}  // namespace hlppl
