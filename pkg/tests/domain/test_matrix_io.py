import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.append(str(Path(__file__).resolve().parents[2]))

from core.exceptions import InputError  # noqa: E402
from core.matrix_io import read_matrix, write_matrix  # noqa: E402
from modules.sbl import MeasurementSet  # noqa: E402


def test_write_matrix_format(tmp_path):
    path = write_matrix(tmp_path / "m.csv", np.array([[1.0, 0.5], [-2.0, 3.25]]))
    assert path.read_text(encoding="utf-8") == "2 2\n1.0,0.5\n-2.0,3.25\n"


def test_matrix_reads_back_exactly(tmp_path):
    rng = np.random.default_rng(50)
    values = rng.standard_normal((4, 3)) * 1e-7
    assert np.array_equal(read_matrix(write_matrix(tmp_path / "m.csv", values)), values)


def test_measurements_from_file(tmp_path):
    write_matrix(tmp_path / "Y.csv", np.ones((3, 2)))
    Y = MeasurementSet.from_file(tmp_path / "Y.csv", 0.5)
    assert (Y.M, Y.L, Y.noise_variance) == (3, 2, 0.5)


@pytest.mark.parametrize(
    "text",
    [
        "",
        "two 2\n1,2\n",
        "2 2\n1,2\n",
        "1 2\n1,2,3\n",
        "1 2\n1,x\n",
        "1 2\n1,nan\n",
        "0 2\n",
    ],
)
def test_malformed_files_raise_input_error(tmp_path, text):
    path = tmp_path / "bad.csv"
    path.write_text(text, encoding="utf-8")
    with pytest.raises(InputError) as excinfo:
        read_matrix(path)
    assert excinfo.value.payload["path"] == str(path)


def test_missing_file(tmp_path):
    with pytest.raises(InputError):
        read_matrix(tmp_path / "absent.csv")
