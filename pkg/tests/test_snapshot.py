import struct

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra import numpy as hnp

from qfield.cli import main
from qfield.grid import Grid
from qfield.snapshot import MAGIC, Snapshot, SnapshotError, decode, encode, read_snapshot, write_snapshot
from qfield.state import FieldState, Sources


def _snap(rng, shape=(4, 3, 2), names=("T", "E", "B")):
    s = Snapshot(shape)
    for n in names:
        s.add(n, rng.normal(size=shape if n in ("T", "rho", "U") else (3, *shape)))
    return s


def test_round_trip(tmp_path, rng):
    s = _snap(rng, names=("T", "E", "B", "rho", "J", "U", "A"))
    write_snapshot(tmp_path / "a.qmx", s)
    assert read_snapshot(tmp_path / "a.qmx") == s


def test_layout_is_x_fastest(rng):
    s = Snapshot((3, 2, 1))
    T = np.arange(6.0).reshape(3, 2, 1)
    s.add("T", T)
    raw = encode(s)
    head = struct.calcsize("<4sIIIII")
    assert raw[:4] == MAGIC
    assert raw[head:head + 1] == b"T"
    vals = np.frombuffer(raw[head + 1:], dtype="<f8")
    # x varies fastest: T[0,0], T[1,0], T[2,0], T[0,1], ...
    assert vals.tolist() == [0.0, 2.0, 4.0, 1.0, 3.0, 5.0]


dims = st.tuples(st.integers(1, 4), st.integers(1, 4), st.integers(1, 4))


@settings(max_examples=50)
@given(dims.flatmap(lambda d: st.tuples(
    st.just(d),
    hnp.arrays(np.float64, d, elements=st.floats(allow_nan=True, allow_infinity=True)),
    hnp.arrays(np.float64, (3, *d), elements=st.floats(width=64)),
)))
def test_round_trip_property(case):
    shape, T, B = case
    s = Snapshot(shape)
    s.add("T", T)
    s.add("B", B)
    assert decode(encode(s)) == s


def test_truncated_file_reports_sizes(tmp_path, rng):
    raw = encode(_snap(rng))
    with pytest.raises(SnapshotError, match=rf"expected {len(raw)} bytes, got {len(raw) - 8}"):
        decode(raw[:-8])
    with pytest.raises(SnapshotError, match="payload size mismatch"):
        decode(raw + b"\0")
    with pytest.raises(SnapshotError, match="too short"):
        decode(raw[:10])


def test_malformed_headers(rng):
    raw = encode(_snap(rng))
    with pytest.raises(SnapshotError, match="bad magic"):
        decode(b"QMX2" + raw[4:])
    head = struct.calcsize("<4sIIIII")
    with pytest.raises(SnapshotError, match="unknown field tag"):
        decode(raw[:head] + b"Z" + raw[head + 1:])
    with pytest.raises(SnapshotError, match="duplicate"):
        decode(raw[:head] + b"TTB" + raw[head + 3:])


def test_shape_checks():
    s = Snapshot((2, 2, 2))
    with pytest.raises(SnapshotError):
        s.add("E", np.zeros((2, 2, 2)))
    with pytest.raises(SnapshotError):
        s.add("Q", np.zeros((2, 2, 2)))


def test_from_state_and_sources():
    g = Grid.cube(4)
    F = FieldState.zeros(g)
    assert list(Snapshot.from_state(F).fields) == ["T", "E", "B"]
    S = Sources.explicit(g, rho=np.ones(g.shape))
    assert list(Snapshot.from_state(F, S).fields) == ["T", "E", "B", "rho", "J"]


def test_inspect_zero_state(tmp_path, capsys):
    p = tmp_path / "z.qmx"
    write_snapshot(p, Snapshot.from_state(FieldState.zeros(Grid(5, 4, 1, 0.2, 0.25, 1.0))))
    assert main(["inspect", str(p)]) == 0
    out = capsys.readouterr().out
    assert "dims 5 x 4 x 1" in out
    assert "fields T E B" in out
    assert out.count("min                        0  max                        0  l2                        0") == 7


def test_inspect_bad_file_exits_1(tmp_path, rng):
    p = tmp_path / "bad.qmx"
    p.write_bytes(encode(_snap(rng))[:-1])
    assert main(["--quiet", "inspect", str(p)]) == 1
    assert main(["--quiet", "inspect", str(tmp_path / "missing.qmx")]) == 1
