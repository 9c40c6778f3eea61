"""Field2D and TimeSignal serialization.

Binary layout of a Field2D (all little-endian)::

    offset  type        field
    0       8 bytes     magic b"HLUTMF2D"
    8       int64 x 4   version, n_t, n_x, domain code (0 = half_line, 1 = full_line)
    40      float64 x 4 t0, dt, x0, dx
    72      float64     body: n_t * n_x complex values, t-major, re/im interleaved

CSV layouts:

* field:  ``t,x,re,im`` one row per grid node, t-major
* signal: ``t,re,im``
"""

from __future__ import annotations

import csv
import io
import os
from typing import Union

import numpy as np

from .signals import ContractError, Field2D, Grid, TimeSignal

MAGIC = b"HLUTMF2D"
VERSION = 1
DOMAIN_CODES = {"half_line": 0, "full_line": 1}
_HEADER_INTS = np.dtype("<i8")
_HEADER_FLOATS = np.dtype("<f8")
_BODY = np.dtype("<c16")
HEADER_SIZE = len(MAGIC) + 4 * 8 + 4 * 8

PathLike = Union[str, os.PathLike]


def field_to_bytes(u: Field2D) -> bytes:
    ints = np.array([VERSION, u.t_grid.n, u.x_grid.n, DOMAIN_CODES[u.domain]], _HEADER_INTS)
    floats = np.array([u.t_grid.start, u.t_grid.step, u.x_grid.start, u.x_grid.step],
                      _HEADER_FLOATS)
    body = np.ascontiguousarray(u.values, dtype=_BODY)
    return MAGIC + ints.tobytes() + floats.tobytes() + body.tobytes()


def field_from_bytes(data: bytes) -> Field2D:
    if len(data) < HEADER_SIZE or data[:len(MAGIC)] != MAGIC:
        raise ContractError("not a Field2D binary (bad magic)")
    off = len(MAGIC)
    version, n_t, n_x, code = np.frombuffer(data, _HEADER_INTS, 4, off)
    if version != VERSION:
        raise ContractError(f"unsupported Field2D binary version {version}")
    t0, dt, x0, dx = np.frombuffer(data, _HEADER_FLOATS, 4, off + 32)
    domains = {v: k for k, v in DOMAIN_CODES.items()}
    if code not in domains:
        raise ContractError(f"unknown domain code {code}")
    n = int(n_t) * int(n_x)
    if len(data) != HEADER_SIZE + 16 * n:
        raise ContractError("Field2D body length does not match the header")
    values = np.frombuffer(data, _BODY, n, HEADER_SIZE).reshape(int(n_t), int(n_x))
    return Field2D(values.astype(complex), Grid(float(t0), float(dt), int(n_t)),
                   Grid(float(x0), float(dx), int(n_x)), domains[int(code)])


def write_field(path: PathLike, u: Field2D):
    with open(path, "wb") as fh:
        fh.write(field_to_bytes(u))


def read_field(path: PathLike) -> Field2D:
    with open(path, "rb") as fh:
        return field_from_bytes(fh.read())


def field_to_csv(u: Field2D) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "x", "re", "im"])
    xs = u.x
    for t, row in zip(u.t, u.values):
        for x, v in zip(xs, row):
            w.writerow([repr(float(t)), repr(float(x)), repr(float(v.real)), repr(float(v.imag))])
    return buf.getvalue()


def write_field_csv(path: PathLike, u: Field2D):
    with open(path, "w", newline="") as fh:
        fh.write(field_to_csv(u))


def _uniform(values, name):
    values = np.asarray(values, float)
    if values.size < 2:
        return (float(values[0]) if values.size else 0.0), 1.0
    d = np.diff(values)
    step = float(np.mean(d))
    if step <= 0 or np.max(np.abs(d - step)) > 1e-9 * max(1.0, abs(step)):
        raise ContractError(f"{name} column is not a uniform increasing grid")
    return float(values[0]), step


def field_from_csv(text: str, domain: str = "half_line") -> Field2D:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or [c.strip() for c in rows[0]] != ["t", "x", "re", "im"]:
        raise ContractError("field CSV must start with the header t,x,re,im")
    data = np.array([[float(c) for c in r] for r in rows[1:] if r], float).reshape(-1, 4)
    ts = np.unique(data[:, 0])
    xs = np.unique(data[:, 1])
    if ts.size * xs.size != data.shape[0]:
        raise ContractError("field CSV is not a full t-major grid")
    t0, dt = _uniform(ts, "t")
    x0, dx = _uniform(xs, "x")
    values = (data[:, 2] + 1j * data[:, 3]).reshape(ts.size, xs.size)
    return Field2D(values, Grid(t0, dt, ts.size), Grid(x0, dx, xs.size), domain)


def read_field_csv(path: PathLike, domain: str = "half_line") -> Field2D:
    with open(path, newline="") as fh:
        return field_from_csv(fh.read(), domain)


def signal_to_csv(h: TimeSignal) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "re", "im"])
    for t, v in zip(h.t, h.samples):
        w.writerow([repr(float(t)), repr(float(v.real)), repr(float(v.imag))])
    return buf.getvalue()


def signal_from_csv(text: str) -> TimeSignal:
    """Accepts ``t,re,im`` or ``t,value`` (real) columns on a uniform t grid."""
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    if not rows or rows[0][0].strip() != "t":
        raise ContractError("signal CSV must start with a header whose first column is t")
    data = np.array([[float(c) for c in r] for r in rows[1:]], float)
    if data.ndim != 2 or data.shape[1] not in (2, 3):
        raise ContractError("signal CSV needs columns t,re,im or t,value")
    t0, dt = _uniform(data[:, 0], "t")
    vals = data[:, 1] + (1j * data[:, 2] if data.shape[1] == 3 else 0)
    return TimeSignal(vals.astype(complex), t0, dt)


def write_signal_csv(path: PathLike, h: TimeSignal):
    with open(path, "w", newline="") as fh:
        fh.write(signal_to_csv(h))


def read_signal_csv(path: PathLike) -> TimeSignal:
    with open(path, newline="") as fh:
        return signal_from_csv(fh.read())
