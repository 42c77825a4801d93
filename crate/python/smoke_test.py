"""Smoke test for the memesim Python bindings.

Build and install first:

    pip install --no-build-isolation -e crates/python
"""

import math
import random

import memesim


def check_simulation():
    cfg = memesim.SimConfig(population=800, recruits=12, horizon_ticks=120,
                            world_width=50.0, world_height=50.0, seed=3)
    a = memesim.run(cfg)
    b = memesim.run(cfg)
    assert a.event_log() == b.event_log(), "same seed must give the same log"
    assert len(a.series) == 120
    cumulative = [c for _, _, c in a.series]
    assert all(x <= y for x, y in zip(cumulative, cumulative[1:]))
    assert len(a.hits) == 24
    assert sum(a.hits) == a.final_cumulative_exposures
    assert a.check_transitions() == []

    summary = memesim.aggregate_hits(a.event_log().splitlines(), bin_width=10)
    assert [summary["per_meme"][m] for m in range(len(a.hits))] == a.hits

    try:
        memesim.SimConfig(population=10, recruits=11).validate()
    except memesim.ConfigError as e:
        assert "recruits" in str(e)
    else:
        raise AssertionError("invalid config accepted")


def check_decision_model():
    p = memesim.share_probability(1.0, 1.0, 1.0, intercept=0.0, w_humor=1.0,
                                  w_relevance=1.0, w_selfref=0.0)
    assert abs(p - 1.0 / (1.0 + math.exp(-2.0))) < 1e-12
    assert 0.0 < memesim.share_probability(0.0, 0.0, 0.0) < 0.01


def check_fits():
    xs = [[float(i)] for i in range(10)]
    fit = memesim.ols_fit(xs, [2.0 * x[0] + 1.0 for x in xs], names=["x"])
    assert fit["terms"] == ["intercept", "x"]
    assert abs(fit["coefficients"][0] - 1.0) < 1e-8
    assert abs(fit["coefficients"][1] - 2.0) < 1e-8

    rng = random.Random(5)
    x = [rng.gauss(0.0, 1.0) for _ in range(4000)]
    y = [1.0 if rng.random() < 1.0 / (1.0 + math.exp(1.0 - 2.0 * v)) else 0.0 for v in x]
    fit = memesim.logistic_fit([[v] for v in x], y)
    b0, b1 = fit["coefficients"]
    assert fit["converged"] and abs(b0 + 1.0) < 0.2 and abs(b1 - 2.0) < 0.2, fit

    try:
        memesim.logistic_fit([[0.0], [1.0], [2.0]], [1.0, 1.0, 1.0])
    except memesim.StatsError as e:
        assert str(e).startswith("degenerate-response")
    else:
        raise AssertionError("single-class response accepted")


def check_log_lines():
    line = memesim.emit_line(7, 12, "EXPOSE", 3)
    assert line == '7 12 "GET /m/3" EXPOSE'
    assert memesim.parse_line(line) == (7, 12, 3, "EXPOSE")
    assert memesim.parse_line(memesim.emit_line(0, 5, "RECRUIT")) == (0, 5, None, "RECRUIT")
    try:
        memesim.parse_line('7 12 "GET /m/3" VIEW')
    except memesim.LogParseError:
        pass
    else:
        raise AssertionError("bad kind accepted")


if __name__ == "__main__":
    check_simulation()
    check_decision_model()
    check_fits()
    check_log_lines()
    print("python smoke test passed")
