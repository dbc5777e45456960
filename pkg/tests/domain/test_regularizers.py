import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.append(str(Path(__file__).resolve().parents[2]))
sys.path.append(str(Path(__file__).resolve().parents[1]))

from core.exceptions import InputError  # noqa: E402
from modules.sbl import TVRegularizer, linear_tv, log_tv, log_tv_reweights  # noqa: E402


def test_linear_tv_examples():
    assert linear_tv([1.0, 1.0, 1.0]) == 0.0
    assert linear_tv([0.0, 2.0, 0.0]) == 4.0
    assert linear_tv([3.5]) == 0.0

    rng = np.random.default_rng(0)
    g = rng.standard_normal(20)
    assert linear_tv(g) == pytest.approx(sum(abs(g[i] - g[i - 1]) for i in range(1, 20)), abs=1e-12)


def test_log_tv_examples():
    assert log_tv([5.0, 5.0], 1.0) == 0.0
    assert log_tv([0.0, 1.0], 1.0) == pytest.approx(np.log(2.0))

    rng = np.random.default_rng(1)
    g = rng.uniform(0.0, 3.0, 15)
    naive = sum(np.log(abs(g[i] - g[i - 1]) + 0.01) for i in range(1, 15))
    assert log_tv(g, 0.01) == pytest.approx(naive, abs=1e-12)


def test_log_tv_reweights_examples():
    assert np.allclose(log_tv_reweights(np.full(6, 2.0), 0.1), 10.0)
    assert np.allclose(log_tv_reweights([0.0, 1.0], 1.0), [0.5])

    rng = np.random.default_rng(2)
    g = rng.uniform(0.0, 3.0, 12)
    weights = log_tv_reweights(g, 0.05)
    assert weights.shape == (11,)
    assert np.allclose(weights, [1.0 / (abs(g[i + 1] - g[i]) + 0.05) for i in range(11)])
    assert np.all((weights > 0.0) & (weights <= 1.0 / 0.05))


def test_log_tv_majorizer_is_tangent_upper_bound():
    rng = np.random.default_rng(3)
    for _ in range(1000):
        n = int(rng.integers(2, 12))
        eps = float(10 ** rng.uniform(-3, 0))
        g0 = rng.uniform(0.0, 2.0, n)
        g = rng.uniform(0.0, 2.0, n)
        w = log_tv_reweights(g0, eps)
        bound = log_tv(g0, eps) + np.dot(w, np.abs(np.diff(g)) - np.abs(np.diff(g0)))
        assert log_tv(g, eps) <= bound + 1e-12
        at_g0 = log_tv(g0, eps) + np.dot(w, np.zeros(n - 1))
        assert abs(log_tv(g0, eps) - at_g0) <= 1e-12


def test_linear_tv_is_a_seminorm():
    rng = np.random.default_rng(4)
    for _ in range(200):
        x = rng.standard_normal(8)
        y = rng.standard_normal(8)
        s = float(rng.uniform(-3, 3))
        assert linear_tv(x) >= 0.0
        assert linear_tv(s * x) == pytest.approx(abs(s) * linear_tv(x), rel=1e-12, abs=1e-12)
        assert linear_tv(x + y) <= linear_tv(x) + linear_tv(y) + 1e-12
    assert linear_tv(np.full(5, -2.0)) == 0.0
    assert linear_tv([0.0, 0.0, 1e-9]) > 0.0


def test_penalties_are_shift_invariant():
    g = np.array([0.0, 0.25, 1.0, 0.5])
    shifted = g + 4.0
    assert linear_tv(shifted) == linear_tv(g)
    assert log_tv(shifted, 0.1) == log_tv(g, 0.1)


def test_regularizer_tags_and_penalty():
    g = np.array([0.0, 2.0, 0.0])
    assert TVRegularizer.from_tag("none").penalty(g) == 0.0
    assert TVRegularizer.from_tag("linear-tv", beta=0.5).penalty(g) == pytest.approx(2.0)
    log = TVRegularizer.from_tag("LOG-TV", beta=2.0, epsilon=1.0)
    assert log.kind == "log-tv"
    assert log.penalty(g) == pytest.approx(2.0 * 2.0 * np.log(3.0))
    assert TVRegularizer.from_tag("none", beta=5.0).effective_beta == 0.0

    with pytest.raises(InputError):
        TVRegularizer.from_tag("group-lasso")
    with pytest.raises(InputError):
        TVRegularizer("linear-tv", beta=-1.0)
    with pytest.raises(InputError):
        TVRegularizer("log-tv", beta=1.0, epsilon=0.0)


def test_edge_weights_per_kind():
    g = np.array([1.0, 1.0, 3.0])
    assert np.array_equal(TVRegularizer.none().edge_weights(g), np.zeros(2))
    assert np.array_equal(TVRegularizer.linear(1.0).edge_weights(g), np.ones(2))
    assert np.allclose(TVRegularizer.log(1.0, 0.5).edge_weights(g), [2.0, 1.0 / 2.5])
    assert TVRegularizer.linear(1.0).edge_weights([4.0]).shape == (0,)
