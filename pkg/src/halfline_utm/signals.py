"""Sampled data containers: time signals, spectra, spatial profiles, fields."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np


class ResolutionError(ValueError):
    """Grid too coarse (or too short) for the requested operation."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class ContractError(ValueError):
    """Input violates a precondition the caller is responsible for."""


class NumericalWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Grid:
    """Uniform 1-D grid ``start + step * arange(n)``."""

    start: float
    step: float
    n: int

    def __post_init__(self):
        if not self.step > 0:
            raise DomainError(f"grid step must be positive, got {self.step}")
        if self.n < 1:
            raise DomainError("grid needs at least one point")

    @classmethod
    def from_range(cls, start, stop, step):
        n = int(round((stop - start) / step)) + 1
        return cls(float(start), float(step), n)

    @property
    def points(self) -> np.ndarray:
        return self.start + self.step * np.arange(self.n)

    @property
    def stop(self) -> float:
        return self.start + self.step * (self.n - 1)

    def index_of(self, value, tol=1e-9):
        j = (value - self.start) / self.step
        jr = int(round(j))
        if abs(j - jr) > tol or not 0 <= jr < self.n:
            raise DomainError(f"{value} is not a node of {self}")
        return jr

    def refined(self, factor=2):
        return Grid(self.start, self.step / factor, (self.n - 1) * factor + 1)


def _last_support(samples, t0, dt):
    nz = np.flatnonzero(samples)
    if nz.size == 0:
        return t0
    return t0 + (nz[-1] + 1) * dt


@dataclass(frozen=True, eq=False)
class TimeSignal:
    """Function of t sampled at ``t0 + j*dt``.

    ``support_end`` is the smallest S with the signal identically zero for
    t >= S; it defaults to one step past the last nonzero sample.
    """

    samples: np.ndarray
    t0: float
    dt: float
    support_end: Optional[float] = None

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=complex)
        object.__setattr__(self, "samples", samples)
        if not self.dt > 0:
            raise DomainError("dt must be positive")
        if samples.ndim != 1 or samples.size < 2:
            raise DomainError("a TimeSignal needs at least two samples")
        if self.support_end is None:
            object.__setattr__(self, "support_end", _last_support(samples, self.t0, self.dt))
        beyond = self.t >= self.support_end - 1e-9 * self.dt
        if np.any(samples[beyond] != 0):
            raise ContractError("samples beyond support_end must be exactly zero")

    @property
    def t(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.samples.size)

    @property
    def grid(self) -> Grid:
        return Grid(self.t0, self.dt, self.samples.size)

    def __len__(self):
        return self.samples.size

    def with_samples(self, samples, support_end=None):
        return TimeSignal(samples, self.t0, self.dt, support_end)

    def padded_to(self, t_end):
        """Append zeros so the grid reaches at least ``t_end``."""
        n = int(math.ceil((t_end - self.t0) / self.dt - 1e-9)) + 1
        if n <= self.samples.size:
            return self
        out = np.zeros(n, dtype=complex)
        out[: self.samples.size] = self.samples
        return TimeSignal(out, self.t0, self.dt, self.support_end)

    def __add__(self, other):
        if not isinstance(other, TimeSignal):
            return NotImplemented
        _check_same_grid(self, other)
        return self.with_samples(self.samples + other.samples,
                                 max(self.support_end, other.support_end))

    def __mul__(self, alpha):
        return self.with_samples(self.samples * alpha,
                                 self.support_end if alpha != 0 else None)

    __rmul__ = __mul__


def _check_same_grid(a, b):
    if len(a) != len(b) or abs(a.t0 - b.t0) > 1e-12 or abs(a.dt - b.dt) > 1e-15:
        raise DomainError("signals live on different grids")


@dataclass(frozen=True, eq=False)
class SpectralDensity:
    """Fourier transform sampled at ``k_min + j*dk``.

    ``sampler`` optionally evaluates the same density at arbitrary k (used
    where quadrature needs off-grid values); ``one_sided`` declares that the
    density vanishes for k < 0.
    """

    values: np.ndarray
    k_min: float
    dk: float
    one_sided: bool = False
    sampler: Optional[Callable[[np.ndarray], np.ndarray]] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=complex))
        if not self.dk > 0:
            raise DomainError("dk must be positive")
        if not self.one_sided:
            k_max = self.k_min + self.dk * (self.values.size - 1)
            if abs(k_max + self.k_min) > 1e-9 * max(1.0, abs(k_max)):
                raise DomainError("two-sided spectral grid must be symmetric about 0")

    @property
    def k(self) -> np.ndarray:
        return self.k_min + self.dk * np.arange(self.values.size)

    def __call__(self, k):
        if self.sampler is not None:
            return self.sampler(np.asarray(k, dtype=float))
        k = np.asarray(k, dtype=float)
        re = np.interp(k, self.k, self.values.real, left=0.0, right=0.0)
        im = np.interp(k, self.k, self.values.imag, left=0.0, right=0.0)
        return re + 1j * im


@dataclass(frozen=True, eq=False)
class SpaceProfile:
    samples: np.ndarray
    x0: float
    dx: float
    domain: str = "full_line"

    def __post_init__(self):
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=complex))
        if not self.dx > 0:
            raise DomainError("dx must be positive")
        if self.domain not in ("full_line", "half_line"):
            raise DomainError(f"unknown domain {self.domain!r}")
        if self.domain == "half_line" and self.x0 < -1e-12:
            raise DomainError("half-line profiles start at x >= 0")

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.samples.size)

    @property
    def grid(self) -> Grid:
        return Grid(self.x0, self.dx, self.samples.size)


@dataclass(frozen=True, eq=False)
class Field2D:
    """Space-time array indexed ``values[i_t, i_x]``."""

    values: np.ndarray
    t_grid: Grid
    x_grid: Grid
    domain: str = "half_line"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        object.__setattr__(self, "values", v)
        if v.shape != (self.t_grid.n, self.x_grid.n):
            raise DomainError(
                f"values shape {v.shape} does not match grids ({self.t_grid.n}, {self.x_grid.n})")
        if self.domain not in ("full_line", "half_line"):
            raise DomainError(f"unknown domain {self.domain!r}")

    @property
    def t(self):
        return self.t_grid.points

    @property
    def x(self):
        return self.x_grid.points

    def slice_at(self, i_t) -> SpaceProfile:
        return SpaceProfile(self.values[i_t], self.x_grid.start, self.x_grid.step, self.domain)

    def restrict_half_line(self) -> "Field2D":
        i0 = self.x_grid.index_of(0.0) if self.x_grid.start < 0 else 0
        xg = Grid(self.x_grid.start + i0 * self.x_grid.step, self.x_grid.step, self.x_grid.n - i0)
        return Field2D(self.values[:, i0:], self.t_grid, xg, "half_line", dict(self.meta))

    def with_values(self, values, **meta):
        return Field2D(values, self.t_grid, self.x_grid, self.domain, {**self.meta, **meta})

    def __add__(self, other):
        if not isinstance(other, Field2D):
            return NotImplemented
        if self.values.shape != other.values.shape or self.x_grid != other.x_grid \
                or self.t_grid != other.t_grid:
            raise DomainError("fields live on different grids")
        return self.with_values(self.values + other.values)

    def __mul__(self, alpha):
        return self.with_values(self.values * alpha)

    __rmul__ = __mul__


def _as_exponent(v):
    if isinstance(v, str):
        v = v.strip().lower()
        if v in ("inf", "infinity", "oo"):
            return math.inf
        return Fraction(v)
    if isinstance(v, float) and math.isinf(v):
        return math.inf
    if isinstance(v, (int, Fraction)):
        return Fraction(v)
    return Fraction(str(v))


def _reciprocal(v):
    return Fraction(0) if v == math.inf else 1 / Fraction(v)


def is_admissible(lam, r) -> bool:
    """Exact check of 1/lam + 1/(2r) = 1/4 with 2 <= lam, r <= inf."""
    lam, r = _as_exponent(lam), _as_exponent(r)
    for v in (lam, r):
        if v != math.inf and v < 2:
            return False
    return _reciprocal(lam) + _reciprocal(r) / 2 == Fraction(1, 4)


@dataclass(frozen=True)
class NormSpec:
    """Sobolev index ``s``, time exponent ``lam`` and space exponent ``r``."""

    s: float
    lam: object
    r: object

    def __post_init__(self):
        object.__setattr__(self, "lam", _as_exponent(self.lam))
        object.__setattr__(self, "r", _as_exponent(self.r))
        if self.s < 0:
            raise DomainError("negative Sobolev index is not supported")
        for v in (self.lam, self.r):
            if v != math.inf and v < 2:
                raise DomainError("exponents must lie in [2, inf]")

    @property
    def admissible(self) -> bool:
        return is_admissible(self.lam, self.r)

    @staticmethod
    def exponent_as_float(v) -> float:
        return math.inf if v == math.inf else float(v)

    @property
    def lam_float(self):
        return self.exponent_as_float(self.lam)

    @property
    def r_float(self):
        return self.exponent_as_float(self.r)

    def dual(self) -> "NormSpec":
        """Hoelder conjugate exponents (lam', r'); may fall below 2."""
        def conj(v):
            if v == math.inf:
                return Fraction(1)
            return Fraction(v) / (Fraction(v) - 1)
        obj = object.__new__(NormSpec)
        object.__setattr__(obj, "s", self.s)
        object.__setattr__(obj, "lam", conj(self.lam))
        object.__setattr__(obj, "r", conj(self.r))
        return obj

    def label(self) -> str:
        def f(v):
            return "inf" if v == math.inf else str(v)
        return f"lam={f(self.lam)},r={f(self.r)},s={self.s:g}"
