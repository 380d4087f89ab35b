"""Tensor file formats.

Binary ``.t3b``: a 16 byte header (4 byte magic ``T3B\\0``, u32 version,
u32 CRC-32, u32 reserved), then little-endian u64 dimensions (l, p, n),
one u8 reality flag, and l*p*n complex entries as little-endian f64
(re, im) pairs, face major and row major within a face. The checksum
covers everything after the header.

The JSON sidecar carries the same payload base64 encoded, for small
fixtures that want to live in version control.
"""

from __future__ import annotations

import base64
import json
import struct
import zlib
from pathlib import Path

import numpy as np

from .errors import MalformedFile
from .tensors import Tensor3

MAGIC = b"T3B\x00"
VERSION = 1

#: Refuse to allocate tensors beyond this many entries when reading.
MAX_ENTRIES = 10**9

_HEADER = struct.Struct("<4sIII")
_DIMS = struct.Struct("<QQQB")


def _payload(t):
    """Dims, flag, and entry bytes in the on-disk order."""
    entries = np.ascontiguousarray(np.moveaxis(t.data, 2, 0))  # (n, l, p)
    interleaved = np.empty(entries.shape + (2,), dtype="<f8")
    interleaved[..., 0] = entries.real
    interleaved[..., 1] = entries.imag
    body = _DIMS.pack(t.l, t.p, t.n, 1 if t.is_real else 0) + interleaved.tobytes()
    return body


def _parse(body):
    if len(body) < _DIMS.size:
        raise MalformedFile("truncated tensor body")
    l, p, n, flag = _DIMS.unpack_from(body)
    if min(l, p, n) < 1 or l * p * n > MAX_ENTRIES:
        raise MalformedFile(f"dimension overflow: {(l, p, n)}")
    expect = _DIMS.size + l * p * n * 16
    if len(body) != expect:
        raise MalformedFile(
            f"payload size {len(body)} does not match dimensions {(l, p, n)}"
        )
    raw = np.frombuffer(body, dtype="<f8", offset=_DIMS.size)
    raw = raw.reshape(n, l, p, 2)
    data = np.moveaxis(raw[..., 0] + 1j * raw[..., 1], 0, 2)
    if flag not in (0, 1):
        raise MalformedFile(f"unknown reality flag {flag}")
    if flag == 1 and np.any(data.imag):
        raise MalformedFile("reality flag set but entries carry imaginary parts")
    return Tensor3(data.real if flag == 1 else data, real=bool(flag))


def write_t3b(t, path):
    body = _payload(t)
    header = _HEADER.pack(MAGIC, VERSION, zlib.crc32(body) & 0xFFFFFFFF, 0)
    Path(path).write_bytes(header + body)


def read_t3b(path):
    blob = Path(path).read_bytes()
    if len(blob) < _HEADER.size:
        raise MalformedFile("file shorter than the header")
    magic, version, crc, _ = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise MalformedFile(f"bad magic {magic!r}")
    if version != VERSION:
        raise MalformedFile(f"unsupported version {version}")
    body = blob[_HEADER.size :]
    if zlib.crc32(body) & 0xFFFFFFFF != crc:
        raise MalformedFile("checksum mismatch")
    return _parse(body)


def write_json(t, path):
    doc = {
        "format": "t3b-json",
        "version": VERSION,
        "dims": [t.l, t.p, t.n],
        "real": t.is_real,
        "data": base64.b64encode(_payload(t)).decode("ascii"),
    }
    Path(path).write_text(json.dumps(doc))


def read_json(path):
    try:
        doc = json.loads(Path(path).read_text())
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise MalformedFile(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != "t3b-json":
        raise MalformedFile("missing t3b-json format marker")
    if doc.get("version") != VERSION:
        raise MalformedFile(f"unsupported version {doc.get('version')}")
    try:
        body = base64.b64decode(doc["data"], validate=True)
    except (KeyError, ValueError) as exc:
        raise MalformedFile("bad base64 payload") from exc
    t = _parse(body)
    if list(doc.get("dims", [])) != [t.l, t.p, t.n]:
        raise MalformedFile("dims field disagrees with the payload")
    return t


def write_tensor(t, path):
    """Write by file suffix: ``.t3b`` binary, ``.json`` sidecar."""
    path = Path(path)
    if path.suffix == ".t3b":
        write_t3b(t, path)
    elif path.suffix == ".json":
        write_json(t, path)
    else:
        raise ValueError(f"unknown tensor format {path.suffix!r}")


def read_tensor(path):
    path = Path(path)
    if path.suffix == ".t3b":
        return read_t3b(path)
    if path.suffix == ".json":
        return read_json(path)
    raise ValueError(f"unknown tensor format {path.suffix!r}")
