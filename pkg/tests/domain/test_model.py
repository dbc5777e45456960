import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.append(str(Path(__file__).resolve().parents[2]))
sys.path.append(str(Path(__file__).resolve().parents[1]))

from core.exceptions import ContractError, InputError  # noqa: E402
from modules.sbl import (  # noqa: E402
    Dictionary,
    Hyperparameters,
    MeasurementSet,
    TVRegularizer,
    linear_tv,
    measurement_covariance,
    posterior,
    sbl_cost,
)


def _random(rng, M, N, L):
    A = rng.standard_normal((M, N))
    Y = rng.standard_normal((M, L))
    gamma = rng.uniform(0.1, 2.0, N)
    return A, Y, gamma


def test_measurement_covariance_scalar_and_zero_gamma():
    assert np.allclose(measurement_covariance([[1.0]], [1.0], 1.0), [[2.0]])

    A = np.arange(12, dtype=float).reshape(3, 4)
    assert np.allclose(measurement_covariance(A, np.zeros(4), 0.7), 0.7 * np.eye(3))


def test_measurement_covariance_matches_loop():
    rng = np.random.default_rng(1)
    A = rng.standard_normal((3, 4))
    gamma = rng.uniform(0.0, 2.0, 4)
    sigma = measurement_covariance(A, gamma, 0.5)

    expected = np.zeros((3, 3))
    for r in range(3):
        for s in range(3):
            expected[r, s] = (0.5 if r == s else 0.0) + sum(A[r, i] * gamma[i] * A[s, i] for i in range(4))
    assert np.allclose(sigma, expected, atol=1e-12)


def test_posterior_scalar_wiener():
    post = posterior(Dictionary([[1.0]]), MeasurementSet([[2.0]], 1.0), Hyperparameters([1.0]))
    assert np.allclose(post.covariance, [[0.5]])
    assert np.allclose(post.means, [[1.0]])


def test_posterior_zero_gamma_is_exact_zero():
    rng = np.random.default_rng(2)
    A, Y, _ = _random(rng, 4, 6, 3)
    post = posterior(A, Y, np.zeros(6), lam=0.3)
    assert np.all(post.means == 0.0)
    assert np.all(post.covariance == 0.0)


def test_posterior_partial_zero_rows():
    rng = np.random.default_rng(3)
    A, Y, gamma = _random(rng, 4, 6, 2)
    gamma[[1, 4]] = 0.0
    post = posterior(A, Y, gamma, lam=0.2)
    assert np.all(post.means[[1, 4]] == 0.0)
    assert np.all(post.covariance[[1, 4], :] == 0.0)
    assert np.all(post.covariance[:, [1, 4]] == 0.0)


def test_posterior_matches_information_form():
    rng = np.random.default_rng(4)
    for _ in range(100):
        M = int(rng.integers(1, 7))
        N = int(rng.integers(1, 11))
        A, Y, gamma = _random(rng, M, N, 3)
        lam = float(rng.uniform(0.1, 1.0))
        post = posterior(A, Y, gamma, lam=lam)

        info = np.linalg.inv(A.T @ A / lam + np.diag(1.0 / gamma))
        assert np.linalg.norm(post.covariance - info) <= 1e-9 * np.linalg.norm(info)
        means = info @ A.T @ Y / lam
        assert np.linalg.norm(post.means - means) <= 1e-9 * max(np.linalg.norm(means), 1e-12)


def test_posterior_covariance_is_symmetric_psd():
    rng = np.random.default_rng(5)
    A, Y, gamma = _random(rng, 4, 6, 3)
    post = posterior(A, Y, gamma, lam=0.5)
    assert np.allclose(post.covariance, post.covariance.T, atol=1e-10)
    eig = np.linalg.eigvalsh(post.covariance)
    assert eig.min() >= -1e-10 * eig.max()


def test_sbl_cost_scalar():
    cost = sbl_cost([[1.0]], MeasurementSet([[2.0]], 1.0), [1.0])
    assert cost == pytest.approx(np.log(2.0) + 2.0, abs=1e-12)


@pytest.mark.parametrize("lam", [0.3, 2.5])
def test_sbl_cost_at_zero_gamma(lam):
    rng = np.random.default_rng(6)
    A, Y, _ = _random(rng, 4, 7, 3)
    expected = 3 * 4 * np.log(lam) + np.sum(Y ** 2) / lam
    assert sbl_cost(A, Y, np.zeros(7), lam=lam) == pytest.approx(expected, rel=1e-12)


def test_sbl_cost_linear_tv_is_compositional():
    rng = np.random.default_rng(7)
    A, Y, gamma = _random(rng, 5, 8, 2)
    plain = sbl_cost(A, Y, gamma, lam=0.4)
    regularized = sbl_cost(A, Y, gamma, TVRegularizer("linear-tv", 0.1), lam=0.4)
    assert regularized == pytest.approx(plain + 0.1 * linear_tv(gamma), abs=1e-12)


def test_sbl_cost_permutation_invariance():
    rng = np.random.default_rng(8)
    A, Y, gamma = _random(rng, 5, 9, 3)
    perm = rng.permutation(9)
    assert sbl_cost(A[:, perm], Y, gamma[perm], lam=0.6) == pytest.approx(sbl_cost(A, Y, gamma, lam=0.6), abs=1e-12)


def test_dimension_mismatch_is_contract_error():
    with pytest.raises(ContractError):
        measurement_covariance(np.ones((3, 4)), np.ones(5), 1.0)
    with pytest.raises(ContractError):
        posterior(np.ones((3, 4)), np.ones((2, 1)), np.ones(4), lam=1.0)


def test_invalid_inputs_are_input_errors():
    with pytest.raises(InputError):
        Dictionary([[1.0, np.nan]])
    with pytest.raises(InputError):
        MeasurementSet([[1.0]], 0.0)
    with pytest.raises(InputError):
        Hyperparameters([1.0, -0.5])
    with pytest.raises(InputError):
        measurement_covariance([[1.0]], [1.0], -1.0)
    with pytest.raises(InputError):
        posterior([[1.0]], [[1.0]], [1.0])


def test_dictionary_file_round_trip(tmp_path):
    rng = np.random.default_rng(9)
    A = Dictionary(rng.standard_normal((3, 5)))
    path = A.to_file(tmp_path / "A.csv")
    assert np.array_equal(Dictionary.from_file(path).entries, A.entries)
