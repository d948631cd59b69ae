# tests/test_curve_file.py
import math
from pathlib import Path

import numpy as np
import pytest
from pydantic import ValidationError

from kerrpairs import __version__
from kerrpairs.core.errors import InvalidConfig
from kerrpairs.io.curve_file import (
    CurveFile,
    CurveFileStore,
    read_curve_file,
    render_curve,
    write_curve_file,
)
from kerrpairs.models.schemas import OutputFormat

AWKWARD = [0.1, 1.0 / 3.0, 1e-300, -2.5e10, math.pi, math.nan, math.inf]


def _curve() -> CurveFile:
    x = np.array(AWKWARD)
    return CurveFile.from_arrays(["x [1]", "y [length]"], [x, 2.0 * x],
                                 metadata={"command": "test", "xi": 0.5})


@pytest.mark.parametrize("fmt", list(OutputFormat))
def test_round_trip_is_exact(tmp_path, fmt):
    curve = _curve()
    path = write_curve_file(tmp_path / f"c.{fmt.value}", curve, fmt)
    back = read_curve_file(path)
    assert back.columns == curve.columns
    assert back.metadata == curve.metadata
    assert np.array_equal(back.column("x [1]"), np.array(AWKWARD), equal_nan=True)
    assert np.array_equal(back.column("y [length]"), 2.0 * np.array(AWKWARD), equal_nan=True)


def test_csv_layout():
    text = render_curve(_curve())
    lines = text.splitlines()
    assert lines[0] == '# command: "test"'
    assert lines[1] == "# xi: 0.5"
    assert lines[2] == "x [1],y [length]"
    assert lines[3] == "0.10000000000000001,0.20000000000000001"
    assert lines[-1] == "inf,inf"
    assert text.endswith("\n")


def test_metadata_serialises_library_types(tmp_path):
    curve = CurveFile(columns=["a"], rows=[[1.0]], metadata={
        "format": OutputFormat.JSON, "count": np.int64(3), "where": Path("out"),
        "values": np.array([1.0, 2.0]),
    })
    back = read_curve_file(write_curve_file(tmp_path / "m.csv", curve))
    assert back.metadata == {"format": "json", "count": 3, "where": "out", "values": [1.0, 2.0]}


def test_rejects_comma_in_column_name():
    with pytest.raises(ValidationError):
        CurveFile(columns=["a,b"], rows=[[1.0]])


def test_rejects_ragged_rows():
    with pytest.raises(ValidationError):
        CurveFile(columns=["a", "b"], rows=[[1.0, 2.0], [3.0]])


def test_rejects_empty_header():
    with pytest.raises(ValidationError):
        CurveFile(columns=[])


def test_malformed_metadata(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("# no separator here\na\n1\n", encoding="utf-8")
    with pytest.raises(InvalidConfig):
        read_curve_file(path)


def test_missing_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text('# command: "x"\n', encoding="utf-8")
    with pytest.raises(InvalidConfig):
        read_curve_file(path)


class TestStore:
    def test_reproducible_files_are_identical(self, tmp_path):
        store = CurveFileStore(tmp_path, reproducible=True)
        first = store.write("run", _curve()).read_bytes()
        second = store.write("run", _curve()).read_bytes()
        assert first == second
        meta = read_curve_file(tmp_path / "run.csv").metadata
        assert meta["code_version"] == __version__
        assert "created" not in meta
        assert store.written == [tmp_path / "run.csv"] * 2

    def test_timestamp_when_not_reproducible(self, tmp_path):
        store = CurveFileStore(tmp_path)
        meta = read_curve_file(store.write("run", _curve())).metadata
        assert "created" in meta

    def test_paths(self, tmp_path):
        store = CurveFileStore(tmp_path, fmt=OutputFormat.JSON)
        assert store.path_for("lattice_gap") == tmp_path / "lattice_gap.json"
        explicit = store.write("ignored", _curve(), tmp_path / "sub" / "x.json")
        assert explicit.exists()

    def test_default_directory_from_environment(self, tmp_path):
        store = CurveFileStore()
        assert store.base == (tmp_path / "out").resolve()
