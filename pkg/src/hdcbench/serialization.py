"""Binary formats: single hypervectors (HVEC), labeled containers (HVMC),
descriptor matrices (VSAD) and 0/1 ground-truth CSV files.

All integers are little-endian.  HVEC payloads:

* BSC and MAP-B are bit-packed (MAP-B stores +1 as 1 and -1 as 0),
* sparse kinds store a u32 count followed by u32 on-bit indices,
* MAP-I stores int64 values, all other kinds float64 values.
"""

from __future__ import annotations

import csv
import io
import json
import struct
from pathlib import Path
from typing import BinaryIO, Iterable

import numpy as np

from .errors import ConfigError, DataError, VectorTypeError
from .spaces import SPACE_OF, Hypervector, Space, VsaKind

HVEC_MAGIC = b"HVEC"
CONTAINER_MAGIC = b"HVMC"
CONTAINER_VERSION = 1
VSAD_MAGIC = b"VSAD"


def encode_hvec(hv: Hypervector) -> bytes:
    """Serialize one hypervector."""
    head = HVEC_MAGIC + struct.pack("<BI", hv.kind.tag, hv.dim)
    space = hv.space
    if space is Space.SPARSE_BINARY:
        body = struct.pack("<I", hv.data.size) + hv.data.astype("<u4").tobytes()
    elif space is Space.DENSE_BINARY:
        body = np.packbits(hv.data, bitorder="little").tobytes()
    elif space is Space.BIPOLAR:
        body = np.packbits(hv.data > 0, bitorder="little").tobytes()
    elif space is Space.INTEGER:
        body = hv.data.astype("<i8").tobytes()
    else:
        body = hv.data.astype("<f8").tobytes()
    return head + body


def _read(buf: BinaryIO, n: int, what: str) -> bytes:
    data = buf.read(n)
    if len(data) != n:
        raise DataError(f"truncated {what}: expected {n} bytes, got {len(data)}")
    return data


def read_hvec(buf: BinaryIO) -> Hypervector:
    """Read one HVEC record from a binary stream."""
    if _read(buf, 4, "HVEC magic") != HVEC_MAGIC:
        raise DataError("not an HVEC record (bad magic)")
    tag, dim = struct.unpack("<BI", _read(buf, 5, "HVEC header"))
    try:
        kind = VsaKind.from_tag(tag)
    except ConfigError:
        raise DataError(f"HVEC record has unknown kind tag {tag}") from None
    try:
        return _read_payload(buf, kind, dim)
    except VectorTypeError as exc:
        raise DataError(f"invalid HVEC payload: {exc}") from exc


def _read_payload(buf: BinaryIO, kind: VsaKind, dim: int) -> Hypervector:
    space = SPACE_OF[kind]
    if space is Space.SPARSE_BINARY:
        (count,) = struct.unpack("<I", _read(buf, 4, "sparse count"))
        idx = np.frombuffer(_read(buf, 4 * count, "sparse indices"), dtype="<u4").astype(np.int64)
        return Hypervector(kind, idx, dim=dim)
    if space in (Space.DENSE_BINARY, Space.BIPOLAR):
        raw = np.frombuffer(_read(buf, (dim + 7) // 8, "packed bits"), dtype=np.uint8)
        bits = np.unpackbits(raw, bitorder="little")[:dim]
        if space is Space.BIPOLAR:
            return Hypervector(kind, bits.astype(np.int8) * 2 - 1)
        return Hypervector(kind, bits)
    if space is Space.INTEGER:
        return Hypervector(kind, np.frombuffer(_read(buf, 8 * dim, "int payload"), dtype="<i8"))
    return Hypervector(kind, np.frombuffer(_read(buf, 8 * dim, "float payload"), dtype="<f8"))


def decode_hvec(data: bytes) -> Hypervector:
    buf = io.BytesIO(data)
    hv = read_hvec(buf)
    if buf.read(1):
        raise DataError("trailing bytes after HVEC record")
    return hv


# --------------------------------------------------------------------------
# labeled container


def write_container(
    path: str | Path,
    sections: dict[str, list[tuple[str, Hypervector]]],
    metadata: dict | None = None,
) -> None:
    """Write named sections of labeled hypervectors plus JSON metadata."""
    header = {
        "metadata": metadata or {},
        "sections": [
            {"name": name, "labels": [label for label, _ in entries]}
            for name, entries in sections.items()
        ],
    }
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(CONTAINER_MAGIC + struct.pack("<II", CONTAINER_VERSION, len(blob)))
        fh.write(blob)
        for entries in sections.values():
            for _, hv in entries:
                rec = encode_hvec(hv)
                fh.write(struct.pack("<I", len(rec)) + rec)


def read_container(path: str | Path) -> tuple[dict[str, list[tuple[str, Hypervector]]], dict]:
    """Inverse of :func:`write_container`; returns ``(sections, metadata)``."""
    try:
        fh = open(path, "rb")
    except OSError as exc:
        raise DataError(f"cannot open container {path}: {exc}") from exc
    with fh:
        if _read(fh, 4, "container magic") != CONTAINER_MAGIC:
            raise DataError(f"{path} is not an hypervector container")
        version, n = struct.unpack("<II", _read(fh, 8, "container header"))
        if version != CONTAINER_VERSION:
            raise DataError(f"unsupported container version {version}")
        try:
            header = json.loads(_read(fh, n, "container metadata").decode("utf-8"))
        except ValueError as exc:
            raise DataError(f"corrupt container metadata: {exc}") from exc
        sections: dict[str, list[tuple[str, Hypervector]]] = {}
        for sec in header["sections"]:
            entries = []
            for label in sec["labels"]:
                (size,) = struct.unpack("<I", _read(fh, 4, "record length"))
                entries.append((label, decode_hvec(_read(fh, size, "record"))))
            sections[sec["name"]] = entries
        if fh.read(1):
            raise DataError("trailing bytes after container records")
    return sections, header.get("metadata", {})


# --------------------------------------------------------------------------
# descriptor matrices


def write_vsad(path: str | Path, data: np.ndarray) -> None:
    data = np.asarray(data, dtype="<f4")
    if data.ndim != 2:
        raise ValueError("descriptor matrix must be two-dimensional")
    with open(path, "wb") as fh:
        fh.write(VSAD_MAGIC + struct.pack("<II", *data.shape))
        fh.write(np.ascontiguousarray(data).tobytes())


def read_vsad(path: str | Path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) < 12 or raw[:4] != VSAD_MAGIC:
        raise DataError(f"{path}: malformed VSAD header")
    rows, cols = struct.unpack("<II", raw[4:12])
    expected = 12 + 4 * rows * cols
    if len(raw) != expected:
        raise DataError(f"{path}: expected {expected} bytes for {rows}x{cols}, got {len(raw)}")
    return np.frombuffer(raw[12:], dtype="<f4").reshape(rows, cols).astype(np.float32)


def read_matrix_csv(path: str | Path) -> np.ndarray:
    """Numeric CSV without header; every row must have the same width."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    rows = []
    for lineno, rec in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not rec or all(not c.strip() for c in rec):
            continue
        try:
            rows.append([float(c) for c in rec])
        except ValueError as exc:
            raise DataError(f"{path}, row {lineno}: {exc}") from exc
        if len(rows[-1]) != len(rows[0]):
            raise DataError(f"{path}, row {lineno}: expected {len(rows[0])} columns")
    if not rows:
        raise DataError(f"{path}: empty matrix file")
    return np.array(rows, dtype=np.float64)


def write_matrix_csv(path: str | Path, data: np.ndarray, fmt: str = "%.9g") -> None:
    np.savetxt(path, np.atleast_2d(data), delimiter=",", fmt=fmt)


def write_rows_csv(path: str | Path, header: Iterable[str], rows: Iterable[Iterable]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(header))
        for r in rows:
            w.writerow(list(r))
