import numpy as np


def random_instance(rng: np.random.Generator, M: int, N: int, L: int, lam: float = 0.1):
    """Unit-norm dictionary plus measurements of a dense random signal."""
    A = rng.standard_normal((M, N))
    A /= np.linalg.norm(A, axis=0)
    X = rng.standard_normal((N, L))
    Y = A @ X + np.sqrt(lam) * rng.standard_normal((M, L))
    return A, Y


def block_instance(rng: np.random.Generator, M: int, N: int, L: int, start: int, length: int, lam: float = 0.01):
    A = rng.standard_normal((M, N))
    A /= np.linalg.norm(A, axis=0)
    X = np.zeros((N, L))
    X[start:start + length] = rng.standard_normal((length, L))
    Y = A @ X + np.sqrt(lam) * rng.standard_normal((M, L))
    return A, X, Y


def tiny_config_values(tmp_path, **overrides) -> dict:
    """Small experiment config that finishes in seconds."""
    values = {
        "N": 20,
        "M": 8,
        "L": 2,
        "snr_grid_db": [10, 20],
        "classes": ["homogeneous"],
        "trials": 2,
        "master_seed": 7,
        "workers": 1,
        "executor": "thread",
        "output_path": str(tmp_path / "records.csv"),
        "algorithms": [
            {"name": "M-SBL", "regularizer": "msbl", "max_outer_iters": 5},
            {"name": "TV-SBL-Log", "regularizer": "log-tv", "beta": 0.5, "epsilon": 0.01, "max_outer_iters": 3},
        ],
    }
    values.update(overrides)
    return values
