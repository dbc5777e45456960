import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.append(str(Path(__file__).resolve().parents[2]))
sys.path.append(str(Path(__file__).resolve().parents[1]))

from modules.sbl import MeasurementSet, SolverOptions, em_update, msbl_em, sbl_cost  # noqa: E402
from modules.signal_gen import gen_dictionary, noise_variance_for  # noqa: E402
from sbl_test_utils import random_instance  # noqa: E402


def test_zero_measurements_decay_harmonically():
    opts = SolverOptions(max_outer_iters=30, outer_tol=0.0, gamma_floor=0.0)
    report = msbl_em(np.eye(3), MeasurementSet(np.zeros((3, 2)), 1.0), opts=opts)

    # gamma <- gamma / (1 + gamma) from gamma = 1
    expected = 1.0
    for _ in range(30):
        expected = expected / (1.0 + expected)
    assert expected == pytest.approx(1.0 / 31.0)
    assert np.allclose(report.gamma_final, expected, rtol=1e-12)
    assert report.outer_iters_used == 30
    assert not report.converged


def test_scalar_fixed_point():
    opts = SolverOptions(max_outer_iters=5000, outer_tol=1e-14)
    report = msbl_em([[1.0]], MeasurementSet([[2.0]], 1.0), opts=opts)
    assert report.gamma_final[0] == pytest.approx(3.0, rel=1e-8)
    assert report.converged

    again = em_update(np.array([[1.0]]), np.array([[2.0]]), np.array([3.0]), 1.0)
    assert again[0] == pytest.approx(3.0, rel=1e-12)


def test_em_cost_is_monotone():
    rng = np.random.default_rng(30)
    for _ in range(10):
        A, Y = random_instance(rng, 8, 20, 3, lam=0.05)
        report = msbl_em(A, MeasurementSet(Y, 0.05), opts=SolverOptions(max_outer_iters=60, outer_tol=0.0))
        trace = report.cost_trace
        for prev, nxt in zip(trace, trace[1:]):
            assert nxt <= prev + 1e-8 * max(1.0, abs(prev))
        assert trace[-1] == pytest.approx(sbl_cost(A, Y, report.gamma_final, lam=0.05), rel=1e-6)


def test_scale_consistency():
    rng = np.random.default_rng(31)
    A, Y = random_instance(rng, 12, 6, 4, lam=0.1)
    s = 3.0
    base = msbl_em(A, MeasurementSet(Y, 0.1), opts=SolverOptions(max_outer_iters=200, outer_tol=1e-12))
    scaled = msbl_em(
        A,
        MeasurementSet(s * Y, 0.1 * s ** 2),
        opts=SolverOptions(max_outer_iters=200, outer_tol=1e-12, gamma_init=tuple([s ** 2] * 6)),
    )
    assert np.allclose(scaled.gamma_final, s ** 2 * base.gamma_final, rtol=1e-6)


def test_recovers_sparse_support_at_high_snr():
    M, N, K, L = 20, 30, 3, 5
    hits = 0
    for seed in range(100):
        rng = np.random.default_rng(1000 + seed)
        A = gen_dictionary(M, N, seed).entries
        support = sorted(rng.choice(N, size=K, replace=False).tolist())
        X = np.zeros((N, L))
        X[support] = rng.normal(0.0, np.sqrt(1.0 / K), size=(K, L))
        lam = noise_variance_for(A, tuple(support), 30.0)
        Y = A @ X + np.sqrt(lam) * rng.standard_normal((M, L))

        report = msbl_em(A, MeasurementSet(Y, lam))
        top = sorted(np.argsort(-report.gamma_final, kind="stable")[:K].tolist())
        hits += int(top == support)
    assert hits >= 90
