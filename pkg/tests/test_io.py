import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from mwfzp.io import (atomic_write, csv_text, encode_field, export_field, export_profile,
                      flatten, import_field, report_text, write_report)


@settings(max_examples=25, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 12), st.integers(1, 12)),
              elements=st.floats(allow_nan=False, width=64)))
def test_real_field_round_trip_bit_identical(tmp_path_factory, a):
    path = tmp_path_factory.mktemp("f") / "a.grid"
    export_field(a, path, dx=0.5)
    b, dx = import_field(path)
    assert dx == 0.5 and b.dtype == np.float64
    assert a.tobytes() == b.tobytes()


def test_complex_field_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    a = rng.standard_normal((7, 5)) + 1j * rng.standard_normal((7, 5))
    export_field(a, tmp_path / "c.grid", dx=1.0)
    b, _ = import_field(tmp_path / "c.grid")
    assert b.dtype == np.complex128 and a.tobytes() == b.tobytes()


def test_field_header():
    blob = encode_field(np.zeros((3, 4)), 1.0)
    header, payload = blob.split(b"\n", 1)
    assert header == b"MWFZP 1 3 4 1.0 real"
    assert len(payload) == 3 * 4 * 8


def test_import_rejects_bad_files(tmp_path):
    (tmp_path / "x.grid").write_bytes(b"hello 1 2 3\n")
    with pytest.raises(ValueError):
        import_field(tmp_path / "x.grid")
    blob = encode_field(np.zeros((3, 4)), 1.0)
    (tmp_path / "t.grid").write_bytes(blob[:-8])
    with pytest.raises(ValueError, match="expected 12"):
        import_field(tmp_path / "t.grid")
    with pytest.raises(ValueError):
        encode_field(np.zeros(3), 1.0)


def test_profile_csv_lines(tmp_path):
    x = np.linspace(-3, 3, 7)
    export_profile(x, x ** 2, tmp_path / "p.csv")
    lines = (tmp_path / "p.csv").read_text().splitlines()
    assert len(lines) == x.size + 1
    assert lines[0] == "X,intensity"
    assert [float(v) for v in lines[4].split(",")] == [0.0, 0.0]
    with pytest.raises(ValueError):
        export_profile(x, x[:-1], tmp_path / "q.csv")


def test_unwritable_path_raises_oserror(tmp_path):
    with pytest.raises(OSError):
        export_profile([1.0], [2.0], tmp_path / "missing" / "p.csv")
    with pytest.raises(OSError):
        export_field(np.zeros((2, 2)), tmp_path / "missing" / "f.grid")
    with pytest.raises(OSError):
        atomic_write(tmp_path / "missing" / "a.txt", "x")


def test_atomic_write_leaves_no_temp(tmp_path):
    atomic_write(tmp_path / "a.txt", "one")
    atomic_write(tmp_path / "a.txt", b"two")
    assert (tmp_path / "a.txt").read_text() == "two"
    assert [p.name for p in tmp_path.iterdir()] == ["a.txt"]


def test_csv_float_format_is_stable():
    text = csv_text(("a", "b", "c"), [(0.1 + 0.2, 3, "x"), (math.nan, 1e-20, "")])
    assert text == "a,b,c\n0.3,3,x\nnan,1e-20,\n"


def test_flatten_and_reports(tmp_path):
    rec = {"Tc": 0.25, "nested": {"a": 1, "b": {"c": math.nan}},
           "points": [{"order": 1, "x": 2.0}], "tags": ["w1", "w2"]}
    flat = flatten(rec)
    assert flat["nested.b.c"] is rec["nested"]["b"]["c"]
    assert flat["points.0.order"] == 1 and flat["tags"] == ["w1", "w2"]
    text = report_text(rec)
    assert "Tc = 0.25\n" in text and "tags = w1,w2\n" in text
    write_report(rec, tmp_path)
    loaded = json.loads((tmp_path / "report.json").read_text())
    assert loaded["nested"]["b"]["c"] is None and loaded["Tc"] == 0.25
    assert (tmp_path / "report.txt").read_text() == text
