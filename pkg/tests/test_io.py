import struct

import numpy as np
import pytest

from halfline_utm.io import (HEADER_SIZE, field_from_bytes, field_from_csv, field_to_bytes,
                             field_to_csv, read_field, signal_from_csv, signal_to_csv, write_field)
from halfline_utm.signals import ContractError, Field2D, Grid, TimeSignal


def _field(domain="half_line"):
    rng = np.random.default_rng(0)
    v = rng.normal(size=(4, 5)) + 1j * rng.normal(size=(4, 5))
    return Field2D(v, Grid(0.0, 0.25, 4), Grid(-1.0 if domain == "full_line" else 0.0, 0.1, 5),
                   domain)


def test_binary_layout_documented_header():
    u = _field("full_line")
    data = field_to_bytes(u)
    assert data[:8] == b"HLUTMF2D"
    assert struct.unpack("<4q", data[8:40]) == (1, 4, 5, 1)
    assert struct.unpack("<4d", data[40:72]) == (0.0, 0.25, -1.0, 0.1)
    re, im = struct.unpack("<2d", data[HEADER_SIZE:HEADER_SIZE + 16])
    assert complex(re, im) == u.values[0, 0]
    # t-major body
    re, im = struct.unpack("<2d", data[HEADER_SIZE + 16 * 5:HEADER_SIZE + 16 * 6])
    assert complex(re, im) == u.values[1, 0]


def test_binary_round_trip(tmp_path):
    u = _field()
    write_field(tmp_path / "u.bin", u)
    v = read_field(tmp_path / "u.bin")
    assert np.array_equal(u.values, v.values)
    assert v.t_grid == u.t_grid and v.x_grid == u.x_grid and v.domain == u.domain


def test_binary_rejects_corrupt_data():
    data = field_to_bytes(_field())
    with pytest.raises(ContractError):
        field_from_bytes(b"XXXXXXXX" + data[8:])
    with pytest.raises(ContractError):
        field_from_bytes(data[:-16])
    bad = bytearray(data)
    bad[8:16] = struct.pack("<q", 99)
    with pytest.raises(ContractError):
        field_from_bytes(bytes(bad))


def test_csv_round_trip_exact():
    u = _field()
    v = field_from_csv(field_to_csv(u))
    assert np.array_equal(u.values, v.values)
    assert np.allclose(v.x, u.x) and np.allclose(v.t, u.t)
    assert field_to_csv(u).splitlines()[0] == "t,x,re,im"


def test_csv_rejects_ragged_grid():
    text = "t,x,re,im\n0,0,1,0\n0,0.1,1,0\n0.5,0,1,0\n"
    with pytest.raises(ContractError):
        field_from_csv(text)


def test_signal_csv():
    h = TimeSignal(np.array([0, 1 + 2j, 3j, 0]), 0.0, 0.5)
    g = signal_from_csv(signal_to_csv(h))
    assert np.array_equal(g.samples, h.samples) and g.dt == 0.5
    real = signal_from_csv("t,value\n0,0\n0.1,2\n0.2,0\n")
    assert np.array_equal(real.samples, [0, 2, 0])
    with pytest.raises(ContractError):
        signal_from_csv("t,value\n0,0\n0.1,2\n0.3,0\n")
