from __future__ import annotations

import io
import struct

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hdcbench.errors import DataError
from hdcbench.serialization import (
    decode_hvec,
    encode_hvec,
    read_container,
    read_hvec,
    read_matrix_csv,
    read_vsad,
    write_container,
    write_matrix_csv,
    write_vsad,
)
from hdcbench.spaces import Hypervector, SeededRng, VsaKind, random_vector

from conftest import make_cfg


@given(st.sampled_from(list(VsaKind)), st.integers(0, 2**32), st.integers(1, 70))
def test_hvec_round_trip(kind, seed, dim):
    cfg = make_cfg(kind, dim)
    if kind is VsaKind.BSDC_SEG and cfg.n_segments < 1:
        return
    v = random_vector(cfg, SeededRng(seed))
    assert decode_hvec(encode_hvec(v)) == v


def test_hvec_layout():
    v = Hypervector(VsaKind.BSDC_S, [1, 5], dim=10)
    raw = encode_hvec(v)
    assert raw[:4] == b"HVEC"
    tag, dim = struct.unpack("<BI", raw[4:9])
    assert VsaKind.from_tag(tag) is VsaKind.BSDC_S and dim == 10
    assert struct.unpack("<I", raw[9:13])[0] == 2
    assert struct.unpack("<2I", raw[13:21]) == (1, 5)
    dense = encode_hvec(Hypervector(VsaKind.HRR, [0.5, -2.0]))
    assert struct.unpack("<2d", dense[9:]) == (0.5, -2.0)
    bits = encode_hvec(Hypervector(VsaKind.BSC, [1, 0, 0, 0, 0, 0, 0, 0, 1]))
    assert len(bits) == 9 + 2


def test_hvec_rejects_garbage():
    with pytest.raises(DataError):
        decode_hvec(b"NOPE\x00\x00\x00\x00\x00")
    good = encode_hvec(Hypervector(VsaKind.HRR, [1.0, 2.0]))
    with pytest.raises(DataError):
        decode_hvec(good[:-3])
    with pytest.raises(DataError):
        decode_hvec(good + b"x")
    with pytest.raises(DataError):
        read_hvec(io.BytesIO(b"HVEC\xff\x01\x00\x00\x00"))


def test_container_round_trip(tmp_path):
    cfg = make_cfg(VsaKind.FHRR, 16)
    a = random_vector(cfg, SeededRng(0))
    b = random_vector(cfg, SeededRng(1))
    write_container(tmp_path / "c.hvm", {"x": [("a", a)], "y": [("b", b), ("a", a)]}, {"note": 3})
    sections, meta = read_container(tmp_path / "c.hvm")
    assert meta == {"note": 3}
    assert [lab for lab, _ in sections["y"]] == ["b", "a"]
    assert sections["x"][0][1] == a


def test_container_rejects_truncation(tmp_path):
    cfg = make_cfg(VsaKind.HRR, 8)
    write_container(tmp_path / "c.hvm", {"x": [("a", random_vector(cfg, SeededRng(0)))]}, {})
    raw = (tmp_path / "c.hvm").read_bytes()
    (tmp_path / "bad.hvm").write_bytes(raw[:-5])
    with pytest.raises(DataError):
        read_container(tmp_path / "bad.hvm")


def test_vsad_and_csv_round_trip(tmp_path):
    data = np.random.default_rng(0).standard_normal((3, 4))
    write_vsad(tmp_path / "d.vsad", data)
    write_matrix_csv(tmp_path / "d.csv", data)
    v = read_vsad(tmp_path / "d.vsad")
    c = read_matrix_csv(tmp_path / "d.csv")
    assert v.shape == c.shape == (3, 4)
    np.testing.assert_allclose(v, c, atol=1e-6)


def test_vsad_header_validation(tmp_path):
    (tmp_path / "x.vsad").write_bytes(b"VSAD" + struct.pack("<II", 2, 2) + b"\x00" * 4)
    with pytest.raises(DataError):
        read_vsad(tmp_path / "x.vsad")


def test_csv_errors_name_the_row(tmp_path):
    (tmp_path / "e.csv").write_text("")
    with pytest.raises(DataError):
        read_matrix_csv(tmp_path / "e.csv")
    (tmp_path / "r.csv").write_text("1,2\n3,x\n")
    with pytest.raises(DataError, match="row 1|row 2"):
        read_matrix_csv(tmp_path / "r.csv")
    (tmp_path / "w.csv").write_text("1,2\n3\n")
    with pytest.raises(DataError):
        read_matrix_csv(tmp_path / "w.csv")
