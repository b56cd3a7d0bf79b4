import math

import pytest

import hlppl


def test_lppl_eval_and_subfit():
    p = hlppl.LpplParams(A=0.0, B=1.0, C=0.0, tc=100.0, m=0.5, omega=3.0, phi=0.0)
    assert hlppl.lppl_eval(p, 96.0) == pytest.approx(2.0)
    s = hlppl.linear_subfit(200.0, 0.5, 6.0, [3.7] * 150)
    assert s["A"] == pytest.approx(3.7)
    with pytest.raises(hlppl.Error):
        hlppl.lppl_eval(p, 100.0)


def test_fit_recovers_synthetic_bubble():
    data = hlppl.synthesize(seed=3, length=300, noise="none")
    cfg = hlppl.FitConfig()
    cfg.restarts = 16
    fit = hlppl.fit_lppl(data["dates"], data["close"], cfg)
    assert abs(fit.params.tc - data["truth"].tc) <= 2.0
    assert fit.window_start == data["dates"][0]


def test_residual_helpers():
    assert hlppl.normalize_residuals([0.5, -1.0, 0.25], "running") == [1.0, -1.0, 0.25]
    eps = [0.3 if i % 2 == 0 else -0.3 for i in range(40)]
    assert hlppl.fit_ar1(eps).alpha == pytest.approx(2.0)


def test_signals_and_score():
    assert hlppl.hype_index({"A": 10, "B": 90}, "A") == pytest.approx(0.1)
    assert hlppl.cap_adjusted_hype(0.1, {"A": 5.0, "B": 95.0}, "A") == pytest.approx(2.0)
    assert hlppl.sentiment_score([(1.0, 3.0), (-1.0, 1.0)]) == pytest.approx(0.5)
    assert hlppl.compose_score(-0.5, 0.2, -0.1, 1.0, 1.0) == pytest.approx(-0.8)
    episodes = hlppl.label_episodes([0.0] * 5 + [0.9] * 12 + [0.0] * 5)
    assert len(episodes) == 1 and episodes[0]["duration"] == 12


def test_backtest_worked_example():
    dates = ["2021-01-04", "2021-01-05", "2021-01-06"]
    report = hlppl.run_backtest(dates, [100.0, 105.0, 110.0], [-0.8, -0.5, -0.2])
    assert report["equity"][-1] == pytest.approx(1.04895, abs=1e-10)
    assert report["trades"][0]["exit_reason"] == "threshold"
    flat = hlppl.buy_and_hold(dates, [10.0, 10.0, 10.0])
    assert flat["metrics"]["cumulative_return"] == pytest.approx(-0.002)
    assert hlppl.max_drawdown([1.0, 1.2, 0.9, 1.1]) == pytest.approx(0.25)


def test_forecast_and_loss():
    assert hlppl.baseline_forecast([0.8, 0.8], 2, alpha=0.5)[0] == pytest.approx(0.2)
    line = [0.0, 0.1, 0.2, 0.3]
    assert hlppl.combined_loss(line, line) == pytest.approx(0.0, abs=1e-15)
    m = hlppl.eval_metrics([0.0, 0.0], [1.0, 3.0])
    assert m["mse"] == 5.0 and m["correlation"] is None
    g = hlppl.loss_gradient([0.1, 0.5, 0.2], [0.0, 0.3, 0.9])
    assert len(g) == 3 and all(math.isfinite(x) for x in g)
