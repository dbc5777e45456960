"""
Data-generating process of the block-sparse MMV experiments.

Every generator is a pure function of its parameters and an integer seed.
Trial seeds come from ``numpy.random.SeedSequence`` keyed by
(master seed, class, trial), so a trial's data never depends on which other
trials run or in which order.
"""
from __future__ import annotations

import logging
import math
import zlib
from typing import Optional

import numpy as np

from core.exceptions import InputError
from modules.sbl.types import Dictionary, MeasurementSet

from .types import (
    CLASS_BLOCK_LENGTHS,
    CLASS_SUPPORT_SIZE,
    MIN_SIGNAL_LENGTH,
    SPARSITY_CLASSES,
    GroundTruth,
    SparsityPattern,
    TrialData,
    check_class,
)

logger = logging.getLogger(__name__)

MAX_PLACEMENT_ATTEMPTS = 10_000

# SeedSequence stream ids
_DICTIONARY_STREAM = 0
_PATTERN_STREAM = 1
_SIGNAL_STREAM = 2
_NOISE_STREAM = 3


def _positive(value: int, name: str) -> int:
    number = int(value)
    if number < 1:
        raise InputError(f"{name} must be >= 1, got {value}")
    return number


def gen_dictionary(M: int, N: int, seed: int) -> Dictionary:
    """i.i.d. standard normal M x N matrix with unit-norm columns."""
    M = _positive(M, "M")
    N = _positive(N, "N")
    rng = np.random.default_rng(seed)
    entries = rng.standard_normal((M, N))
    norms = np.linalg.norm(entries, axis=0)
    # a zero column has probability 0 but would break normalization
    while np.any(norms == 0.0):
        bad = norms == 0.0
        entries[:, bad] = rng.standard_normal((M, int(bad.sum())))
        norms = np.linalg.norm(entries, axis=0)
    return Dictionary(entries / norms[None, :])


def _admissible(starts: np.ndarray, lengths: tuple[int, ...], gap: int) -> bool:
    order = np.argsort(starts, kind="stable")
    end = -1 - gap
    for idx in order:
        if starts[idx] <= end + gap:
            return False
        end = starts[idx] + lengths[idx] - 1
    return True


def gen_pattern(sparsity_class: str, N: int, seed: int) -> SparsityPattern:
    """
    Block layout for a sparsity class. Homogeneous and hybrid blocks are
    mutually non-adjacent; random places 10 distinct singletons.
    """
    tag = check_class(sparsity_class)
    N = int(N)
    if N < MIN_SIGNAL_LENGTH:
        raise InputError(f"N must be >= {MIN_SIGNAL_LENGTH}, got {N}")
    rng = np.random.default_rng(seed)

    if tag == "random":
        indices = rng.choice(N, size=CLASS_SUPPORT_SIZE, replace=False)
        return SparsityPattern(blocks=tuple((int(i), 1) for i in indices), N=N)

    lengths = CLASS_BLOCK_LENGTHS[tag]
    highs = np.array([N - length + 1 for length in lengths])
    for _ in range(MAX_PLACEMENT_ATTEMPTS):
        starts = rng.integers(0, highs)
        if _admissible(starts, lengths, gap=1):
            return SparsityPattern(blocks=tuple(zip(starts.tolist(), lengths)), N=N)
    raise InputError(
        f"could not place {tag} blocks in N={N} after {MAX_PLACEMENT_ATTEMPTS} attempts",
        payload={"class": tag, "N": N},
    )


def gen_signals(pattern: SparsityPattern, L: int, K: int, seed: int) -> GroundTruth:
    """Row-sparse N x L ensemble; support entries are N(0, 1/K)."""
    L = _positive(L, "L")
    K = int(K)
    if K != pattern.K:
        raise InputError(f"K={K} does not match the pattern's support size {pattern.K}")
    rng = np.random.default_rng(seed)
    support = pattern.support()
    X = np.zeros((pattern.N, L))
    X[list(support), :] = rng.normal(0.0, math.sqrt(1.0 / K), size=(K, L))
    X.setflags(write=False)
    return GroundTruth(X=X, support=support, pattern=pattern)


def noise_variance_for(A: np.ndarray, support: tuple[int, ...], snr_db: float) -> float:
    """lam = E||Ax||^2 / (M 10^(snr/10)) with E||Ax||^2 = sum_{i in supp} ||a_i||^2 / K."""
    K = len(support)
    if K == 0:
        raise InputError("signal has an empty support")
    energy = float(np.sum(np.linalg.norm(A[:, list(support)], axis=0) ** 2)) / K
    return energy / (A.shape[0] * 10.0 ** (float(snr_db) / 10.0))


def add_noise(A: Dictionary, X: np.ndarray, snr_db: float, seed: int) -> MeasurementSet:
    """
    Y = A X + E with E ~ N(0, lam) and lam set from the nominal SNR.

    The SNR is measured against the rows of X that are nonzero, so X needs at
    least one nonzero row; an all-zero X has no defined noise level and is
    rejected with InputError.
    """
    snr = float(snr_db)
    if not math.isfinite(snr):
        raise InputError(f"snr_db must be finite, got {snr_db}")
    entries = A.entries if isinstance(A, Dictionary) else Dictionary(A).entries
    signal = np.asarray(X, dtype=np.float64)
    if signal.ndim != 2 or signal.shape[0] != entries.shape[1]:
        raise InputError(f"X must be N x L with N={entries.shape[1]}, got {signal.shape}")
    support = tuple(int(i) for i in np.flatnonzero(np.any(signal != 0.0, axis=1)))
    if not support:
        raise InputError("X is all zero, so no noise level follows from snr_db", payload={"snr_db": snr})
    lam = noise_variance_for(entries, support, snr)
    rng = np.random.default_rng(seed)
    Y = entries @ signal + math.sqrt(lam) * rng.standard_normal((entries.shape[0], signal.shape[1]))
    return MeasurementSet(Y=Y, noise_variance=lam)


# ==================== seed derivation ====================

def _stream(entropy: int, *key: int) -> int:
    sequence = np.random.SeedSequence(entropy=int(entropy), spawn_key=tuple(int(k) for k in key))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def snr_key(snr_db: float) -> int:
    return zlib.crc32(f"{float(snr_db):.9g}".encode("utf-8"))


def trial_seed(master_seed: int, sparsity_class: str, trial: int) -> int:
    """Seed shared by every algorithm and SNR value of one (class, trial) cell."""
    class_index = SPARSITY_CLASSES.index(check_class(sparsity_class))
    return _stream(master_seed, class_index, int(trial))


def dictionary_seed(master_seed: int, sparsity_class: str, seed: int, fix_dictionary: bool) -> int:
    if fix_dictionary:
        class_index = SPARSITY_CLASSES.index(check_class(sparsity_class))
        return _stream(master_seed, class_index, _DICTIONARY_STREAM)
    return _stream(seed, _DICTIONARY_STREAM)


def generate_trial(
    sparsity_class: str,
    snr_db: float,
    N: int,
    M: int,
    L: int,
    K: int,
    seed: int,
    dictionary_seed_value: Optional[int] = None,
) -> TrialData:
    """
    Generate (A, pattern, X, Y) for one trial seed. A, pattern and X depend on
    the seed only; the noise stream also depends on ``snr_db``.
    """
    tag = check_class(sparsity_class)
    A = gen_dictionary(M, N, _stream(seed, _DICTIONARY_STREAM) if dictionary_seed_value is None else dictionary_seed_value)
    pattern = gen_pattern(tag, N, _stream(seed, _PATTERN_STREAM))
    truth = gen_signals(pattern, L, K, _stream(seed, _SIGNAL_STREAM))
    measurements = add_noise(A, truth.X, snr_db, _stream(seed, _NOISE_STREAM, snr_key(snr_db)))
    logger.debug("trial %s snr=%g seed=%d blocks=%s lam=%.4g", tag, snr_db, seed, pattern.blocks, measurements.noise_variance)
    return TrialData(
        sparsity_class=tag,
        snr_db=float(snr_db),
        seed=int(seed),
        dictionary=A,
        truth=truth,
        measurements=measurements,
    )
