import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.append(str(Path(__file__).resolve().parents[2]))
sys.path.append(str(Path(__file__).resolve().parents[1]))

from core.exceptions import InputError  # noqa: E402
from core.matrix_io import read_matrix  # noqa: E402
from modules.signal_gen import (  # noqa: E402
    DUMP_FILES,
    SparsityPattern,
    add_noise,
    dictionary_seed,
    dump_trial,
    gen_dictionary,
    gen_pattern,
    gen_signals,
    generate_trial,
    load_metadata,
    noise_variance_for,
    trial_seed,
)


def test_dictionary_columns_have_unit_norm():
    for M, N, seed in [(20, 150, 0), (3, 7, 11), (1, 5, 2)]:
        A = gen_dictionary(M, N, seed)
        assert A.entries.shape == (M, N)
        assert np.allclose(A.column_norms(), 1.0, atol=1e-12)


def test_dictionary_is_deterministic_and_centred():
    a = gen_dictionary(20, 150, 42).entries
    b = gen_dictionary(20, 150, 42).entries
    assert np.array_equal(a, b)
    assert not np.array_equal(a, gen_dictionary(20, 150, 43).entries)
    assert abs(a.mean()) <= 4.0 / np.sqrt(20 * 150)


def test_dictionary_rejects_empty_shapes():
    with pytest.raises(InputError):
        gen_dictionary(0, 5, 1)


@pytest.mark.parametrize(
    "sparsity_class,lengths",
    [("homogeneous", [5, 5]), ("random", [1] * 10), ("hybrid", [1, 1, 1, 3, 4])],
)
def test_pattern_classes(sparsity_class, lengths):
    for seed in range(200):
        pattern = gen_pattern(sparsity_class, 150, seed)
        assert sorted(pattern.lengths) == lengths
        assert pattern.K == 10
        assert len(set(pattern.support())) == 10
        starts = [start for start, _ in pattern.blocks]
        assert starts == sorted(starts)
        if sparsity_class != "random":
            # a gap of at least one zero row between consecutive blocks
            for (s0, n0), (s1, _) in zip(pattern.blocks, pattern.blocks[1:]):
                assert s1 >= s0 + n0 + 1


def test_pattern_is_deterministic():
    assert gen_pattern("hybrid", 150, 5) == gen_pattern("hybrid", 150, 5)


def test_pattern_input_errors():
    with pytest.raises(InputError):
        gen_pattern("homogeneous", 19, 0)
    with pytest.raises(InputError):
        gen_pattern("clustered", 150, 0)
    with pytest.raises(InputError):
        SparsityPattern(blocks=((0, 5), (4, 5)), N=20)
    with pytest.raises(InputError):
        SparsityPattern(blocks=((18, 5),), N=20)


def test_signals_are_row_sparse():
    pattern = gen_pattern("homogeneous", 150, 3)
    truth = gen_signals(pattern, 5, 10, 9)
    nonzero_rows = np.flatnonzero(np.any(truth.X != 0.0, axis=1))
    assert nonzero_rows.tolist() == list(pattern.support())
    assert np.all(truth.X[list(pattern.support())] != 0.0)
    with pytest.raises(InputError):
        gen_signals(pattern, 5, 9, 9)


def test_signal_variance_is_one_over_k():
    pattern = gen_pattern("random", 150, 4)
    truth = gen_signals(pattern, 1000, 10, 12)
    values = truth.X[list(truth.support)].ravel()
    assert values.size == 10_000
    assert 0.9 / 10 <= values.var() <= 1.1 / 10


def test_noise_variance_formula():
    A = gen_dictionary(20, 150, 1).entries
    support = tuple(range(10))
    assert noise_variance_for(A, support, 0.0) == pytest.approx(0.05)
    assert noise_variance_for(A, support, 20.0) == pytest.approx(10 ** -2 / 20)
    with pytest.raises(InputError):
        noise_variance_for(A, (), 10.0)


def test_add_noise_rejects_an_all_zero_signal():
    A = gen_dictionary(6, 10, 3)
    with pytest.raises(InputError) as excinfo:
        add_noise(A, np.zeros((10, 2)), 10.0, 4)
    assert excinfo.value.payload == {"snr_db": 10.0}

    X = np.zeros((10, 2))
    X[4] = 1.0
    Y = add_noise(A, X, 10.0, 4)
    assert Y.noise_variance == pytest.approx(noise_variance_for(A.entries, (4,), 10.0))


def test_empirical_snr_matches_nominal():
    M, N, L = 20, 150, 5
    A = gen_dictionary(M, N, 8)
    pattern = gen_pattern("homogeneous", N, 8)
    signal_energy = 0.0
    noise_energy = 0.0
    for draw in range(10_000):
        truth = gen_signals(pattern, L, 10, 10_000 + draw)
        clean = A.entries @ truth.X
        Y = add_noise(A, truth.X, 10.0, 50_000 + draw)
        signal_energy += float(np.sum(clean ** 2))
        noise_energy += float(np.sum((Y.Y - clean) ** 2))
    snr = 10.0 * np.log10(signal_energy / noise_energy)
    assert abs(snr - 10.0) <= 0.2


def test_snr_grid_shares_dictionary_and_signal():
    seed = trial_seed(0, "hybrid", 3)
    low = generate_trial("hybrid", 0.0, 150, 20, 5, 10, seed)
    high = generate_trial("hybrid", 20.0, 150, 20, 5, 10, seed)
    assert np.array_equal(low.dictionary.entries, high.dictionary.entries)
    assert np.array_equal(low.truth.X, high.truth.X)
    assert low.truth.pattern == high.truth.pattern
    assert low.noise_variance == pytest.approx(100.0 * high.noise_variance)
    assert not np.array_equal(low.measurements.Y, high.measurements.Y)


def test_trial_seeds_are_distinct_and_stable():
    seeds = {trial_seed(0, cls, t) for cls in ("homogeneous", "random", "hybrid") for t in range(50)}
    assert len(seeds) == 150
    assert trial_seed(0, "random", 7) == trial_seed(0, "random", 7)
    assert trial_seed(1, "random", 7) != trial_seed(0, "random", 7)


def test_fixed_dictionary_is_shared_across_trials():
    s0 = trial_seed(5, "homogeneous", 0)
    s1 = trial_seed(5, "homogeneous", 1)
    assert dictionary_seed(5, "homogeneous", s0, True) == dictionary_seed(5, "homogeneous", s1, True)
    assert dictionary_seed(5, "homogeneous", s0, False) != dictionary_seed(5, "homogeneous", s1, False)

    a = generate_trial("homogeneous", 10.0, 40, 10, 2, 10, s0, dictionary_seed(5, "homogeneous", s0, True))
    b = generate_trial("homogeneous", 10.0, 40, 10, 2, 10, s1, dictionary_seed(5, "homogeneous", s1, True))
    assert np.array_equal(a.dictionary.entries, b.dictionary.entries)
    assert not np.array_equal(a.truth.X, b.truth.X)


def test_dump_trial_writes_matrices_and_metadata(tmp_path):
    data = generate_trial("random", 15.0, 30, 8, 3, 10, trial_seed(2, "random", 0))
    written = dump_trial(data, tmp_path / "trial")
    assert [p.name for p in written] == list(DUMP_FILES)

    assert np.array_equal(read_matrix(tmp_path / "trial" / "A.csv"), data.dictionary.entries)
    assert np.array_equal(read_matrix(tmp_path / "trial" / "X.csv"), data.truth.X)
    assert np.array_equal(read_matrix(tmp_path / "trial" / "Y.csv"), data.measurements.Y)

    meta = load_metadata(tmp_path / "trial")
    assert meta["sparsity_class"] == "random"
    assert meta["noise_variance"] == data.noise_variance
    assert meta["K"] == 10
    assert meta["blocks"] == [[s, n] for s, n in data.truth.pattern.blocks]


def test_load_metadata_missing_file(tmp_path):
    with pytest.raises(InputError):
        load_metadata(tmp_path)
