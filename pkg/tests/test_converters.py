import csv
import json
import struct

import numpy as np
import pytest

from src.constants import SNAPSHOT_HEADER_SIZE
from src.converters.metadata import generate_metadata, read_metadata
from src.converters.record import residual_rows, write_json, write_residual_csv
from src.converters.snapshot import read_snapshot, write_snapshot
from src.errors import ArgumentError


def test_snapshot_write_and_read(tmp_path, rng):
    values = rng.normal(size=(8,) * 4)
    path = write_snapshot(values, tmp_path / "u.bin", 2, "u", "flat", "monge-ampere(n=2, k=2)", {"b": "0.5"})
    assert path.stat().st_size == SNAPSHOT_HEADER_SIZE + 8 * values.size
    np.testing.assert_array_equal(read_snapshot(path), values)

    meta = read_metadata(tmp_path / "u.meta")
    assert meta["field"] == "u"
    assert meta["N"] == "8"
    assert meta["axes"] == "x1,y1,x2,y2"
    assert meta["b"] == "0.5"
    assert meta["problem"] == "flat"


def test_snapshot_rejects_non_grid_shape(tmp_path):
    with pytest.raises(ArgumentError):
        write_snapshot(np.zeros((8, 4)), tmp_path / "u.bin", 1)
    with pytest.raises(ArgumentError):
        write_snapshot(np.zeros((8, 8)), tmp_path / "u.bin", 2)


def test_snapshot_rejects_bad_files(tmp_path):
    wrong_magic = tmp_path / "wrong.bin"
    wrong_magic.write_bytes(struct.pack("<8sqqq", b"NOTFIELD", 1, 8, 64) + bytes(8 * 64))
    with pytest.raises(ArgumentError, match="not a field snapshot"):
        read_snapshot(wrong_magic)

    path = write_snapshot(np.zeros((8, 8)), tmp_path / "u.bin", 1)
    path.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(ArgumentError, match="does not match"):
        read_snapshot(path)

    short = tmp_path / "short.bin"
    short.write_bytes(b"BS")
    with pytest.raises(ArgumentError, match="too short"):
        read_snapshot(short)


def test_metadata_lists_optional_entries_only_when_given():
    text = generate_metadata("psi", 1, 16, 256)
    assert "field = psi\n" in text
    assert "problem" not in text
    assert text.splitlines()[-2].startswith("writer = ")


def test_write_json_makes_non_finite_values_readable(tmp_path):
    path = write_json({"margin": float("inf"), "values": [1.0, float("nan")], "count": np.int64(3)},
                      tmp_path / "nested" / "record.json")
    data = json.loads(path.read_text())
    assert data == {"margin": "inf", "values": [1.0, "nan"], "count": 3}


class _Point:
    def __init__(self, t, history):
        self.t = t
        self.residual_history = history


class _Run:
    path = [_Point(0.5, [1e-2, 1e-5]), _Point(1.0, [3e-3])]


def test_residual_rows_and_csv(tmp_path):
    rows = residual_rows(_Run())
    assert rows == [(0.5, 0, 1e-2), (0.5, 1, 1e-5), (1.0, 0, 3e-3)]

    path = write_residual_csv(rows, tmp_path / "residuals.csv")
    with open(path, newline="") as f:
        lines = list(csv.reader(f))
    assert lines[0] == ["t", "iteration", "residual"]
    assert [float(x) for x in lines[2]] == [0.5, 1.0, 1e-5]
