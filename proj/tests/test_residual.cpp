#include <doctest.h>

#include <cmath>
#include <vector>

#include "hlppl/error.hpp"
#include "hlppl/residual.hpp"
#include "hlppl/rng.hpp"
#include "oracles.hpp"

using namespace hlppl;

namespace {

struct Fixture {
    LpplFit fit;
    PriceSeries prices;
};

Fixture exact_window(std::size_t n, double offset = 0.0) {
    Fixture f;
    f.fit.params = {4.0, -0.2, 0.01, static_cast<double>(n) + 20.0, 0.6, 7.0, 0.3};
    std::vector<double> close(n);
    for (std::size_t t = 0; t < n; ++t) close[t] = std::exp(lppl_eval(f.fit.params, static_cast<double>(t)) + offset);
    f.prices = oracle::prices(close);
    f.fit.n_obs = n;
    f.fit.window_start = f.prices.dates.front();
    f.fit.window_end = f.prices.dates.back();
    return f;
}

}  // namespace

TEST_SUITE("residual") {

TEST_CASE("residuals of the generating path vanish") {
    const auto f = exact_window(120);
    const auto r = compute_residuals(f.prices, f.fit);
    REQUIRE(r.size() == 120);
    for (double e : r.epsilon) CHECK(std::fabs(e) < 1e-12);
    CHECK(r.epsilon_norm.empty());
}

TEST_CASE("a constant offset shows up everywhere") {
    const auto f = exact_window(120, 0.1);
    const auto r = compute_residuals(f.prices, f.fit);
    for (double e : r.epsilon) CHECK(e == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("a single spike stays local") {
    auto f = exact_window(120);
    f.prices.close[37] *= std::exp(0.3);
    const auto r = compute_residuals(f.prices, f.fit);
    for (std::size_t t = 0; t < r.size(); ++t) {
        if (t == 37) CHECK(r.epsilon[t] == doctest::Approx(0.3).epsilon(1e-12));
        else CHECK(std::fabs(r.epsilon[t]) < 1e-12);
    }
}

TEST_CASE("residuals require the fitted window") {
    auto f = exact_window(120);
    f.fit.n_obs = 119;
    CHECK_THROWS_AS(compute_residuals(f.prices, f.fit), Error);
}

TEST_CASE("AR(1) recovery on a long simulated path") {
    const auto eps = oracle::ar1_path(2024, 2000, 0.10, 0.02);
    const auto est = fit_ar1(eps);
    CHECK(est.alpha >= 0.07);
    CHECK(est.alpha <= 0.13);
    CHECK(est.alpha == doctest::Approx(oracle::ar1_alpha(eps)).epsilon(1e-12));
    CHECK(est.noise_std == doctest::Approx(0.02).epsilon(0.1));
    REQUIRE(est.half_life.has_value());
    CHECK(*est.half_life == doctest::Approx(std::log(2.0) / est.alpha));
    CHECK(est.n_obs == 1999);
}

TEST_CASE("alternating residuals give alpha = 2") {
    std::vector<double> eps(40);
    for (std::size_t t = 0; t < eps.size(); ++t) eps[t] = t % 2 == 0 ? 0.3 : -0.3;
    const auto est = fit_ar1(eps);
    CHECK(est.alpha == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(est.noise_std == doctest::Approx(0.0));
    CHECK(est.r_squared == doctest::Approx(1.0));
}

TEST_CASE("white noise gives alpha near 1 and R^2 near 1/2") {
    Rng rng(77);
    std::vector<double> eps(20000);
    for (auto& e : eps) e = rng.normal();
    const auto est = fit_ar1(eps);
    CHECK(est.alpha == doctest::Approx(1.0).epsilon(0.03));
    CHECK(est.r_squared == doctest::Approx(0.5).epsilon(0.03));
}

TEST_CASE("AR(1) error paths") {
    CHECK_THROWS_AS(fit_ar1(std::vector<double>(10, 0.1)), Error);
    try {
        fit_ar1(std::vector<double>(50, 0.1));
        FAIL("expected degenerate");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::degenerate);
    }
}

TEST_CASE("normalization examples") {
    const std::vector<double> eps{0.5, -1.0, 0.25};
    CHECK(normalize_residuals(eps, NormalizationMode::global) == std::vector<double>{0.5, -1.0, 0.25});
    CHECK(normalize_residuals(eps, NormalizationMode::running) == std::vector<double>{1.0, -1.0, 0.25});
    const std::vector<double> one{-0.2};
    CHECK(normalize_residuals(one, NormalizationMode::global) == std::vector<double>{-1.0});
    CHECK(normalize_residuals(one, NormalizationMode::running) == std::vector<double>{-1.0});
    CHECK_THROWS_AS(normalize_residuals(std::vector<double>(5, 0.0), NormalizationMode::global), Error);
    const std::vector<double> late{0.0, 0.0, 0.4, -0.2};
    CHECK(normalize_residuals(late, NormalizationMode::running) == std::vector<double>{0.0, 0.0, 1.0, -0.5});
}

TEST_CASE("normalization properties on random series") {
    Rng rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        const auto n = static_cast<std::size_t>(rng.integer(1, 200));
        std::vector<double> eps(n);
        for (auto& e : eps) e = rng.normal(0.0, rng.uniform(1e-6, 10.0));
        const double c = rng.uniform(0.01, 100.0);
        std::vector<double> scaled(n);
        for (std::size_t i = 0; i < n; ++i) scaled[i] = c * eps[i];
        for (auto mode : {NormalizationMode::global, NormalizationMode::running}) {
            const auto a = normalize_residuals(eps, mode);
            const auto b = normalize_residuals(scaled, mode);
            for (std::size_t i = 0; i < n; ++i) {
                CHECK(std::fabs(a[i]) <= 1.0);
                CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
                CHECK((eps[i] > 0) == (a[i] > 0));
                CHECK((eps[i] < 0) == (a[i] < 0));
            }
        }
    }
}

TEST_CASE("normalization mode names") {
    CHECK(parse_normalization_mode("running") == NormalizationMode::running);
    CHECK(std::string(to_string(NormalizationMode::global)) == "global");
    CHECK_THROWS_AS(parse_normalization_mode("rolling"), Error);
}

}
