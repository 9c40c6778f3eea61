"""Crank-Nicolson finite differences on a truncated half line (cross-check only).

Solves ``y_t = i y_xx - W(x) y + f`` on [0, X_max] with a quartic complex
absorbing potential W on the last part of the domain and y = 0 at X_max.
Dirichlet data are imposed strongly at x = 0; Neumann data through a ghost
point ``y_{-1} = y_1 - 2 dx g``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .signals import DomainError, Field2D, Grid, SpaceProfile, TimeSignal
from .utm import BoundaryKind


class DomainTooSmallError(DomainError):
    """Waves reflected by the truncation come back into the domain."""


REFLECTION_LIMIT = 1e-4


@dataclass(frozen=True)
class FdScheme:
    X_max: float
    dx: float
    dt: float
    kind: BoundaryKind = BoundaryKind.DIRICHLET
    layer_fraction: float = 0.2
    layer_strength: float = 20.0
    corner_smoothing: bool = False

    def __post_init__(self):
        object.__setattr__(self, "kind", BoundaryKind.parse(self.kind))
        if not (self.dx > 0 and self.dt > 0 and self.X_max > 0):
            raise DomainError("X_max, dx and dt must be positive")
        if not 0 < self.layer_fraction < 1:
            raise DomainError("layer fraction must be in (0, 1)")

    @property
    def x_grid(self) -> Grid:
        return Grid.from_range(0.0, self.X_max, self.dx)

    @property
    def courant(self) -> float:
        """dt/dx^2; recorded only, the scheme is unconditionally stable."""
        return self.dt / self.dx ** 2

    def potential(self, x):
        start = (1 - self.layer_fraction) * self.X_max
        s = np.clip((x - start) / (self.X_max - start), 0.0, None)
        return self.layer_strength * s ** 4

    def halved(self) -> "FdScheme":
        return FdScheme(self.X_max, self.dx / 2, self.dt / 2, self.kind, self.layer_fraction,
                        self.layer_strength, self.corner_smoothing)


Source = Union[None, Field2D, Callable[[float, np.ndarray], np.ndarray]]
Boundary = Union[None, TimeSignal, Callable[[float], complex]]


def _boundary_fn(g: Boundary):
    if g is None:
        return lambda t: 0.0
    if isinstance(g, TimeSignal):
        tt, vv = g.t, g.samples
        return lambda t: complex(np.interp(t, tt, vv.real) + 1j * np.interp(t, tt, vv.imag))
    return g


def _source_fn(f: Source, x):
    if f is None:
        return None
    if isinstance(f, Field2D):
        tt = f.t
        if f.x_grid.n > x.size or abs(f.x_grid.start) > 1e-12:
            raise DomainError("forcing grid must start at 0 and fit in the scheme grid")

        def fn(t):
            j = np.clip(np.searchsorted(tt, t) - 1, 0, tt.size - 2)
            w = np.clip((t - tt[j]) / (tt[j + 1] - tt[j]), 0.0, 1.0)
            row = (1 - w) * f.values[j] + w * f.values[j + 1]
            out = np.zeros(x.size, dtype=complex)
            step = int(round(f.x_grid.step / (x[1] - x[0])))
            if step != 1:
                raise DomainError("forcing must share the scheme's dx")
            out[: row.size] = row
            return out
        return fn
    return lambda t: np.asarray(f(t, x), dtype=complex)


def crank_nicolson_solve(y0: Optional[SpaceProfile], f: Source, g: Boundary, kind,
                         scheme: FdScheme, T: float, save_every: int = 1,
                         check_reflection: bool = True) -> Field2D:
    """March from 0 to T; returns y on the scheme's x-grid every ``save_every`` steps."""
    kind = BoundaryKind.parse(kind)
    xg = scheme.x_grid
    x = xg.points
    dx, dt = scheme.dx, scheme.dt
    n_steps = int(round(T / dt))
    if abs(n_steps * dt - T) > 1e-9 * T:
        raise DomainError("T must be a multiple of dt")
    y = np.zeros(x.size, dtype=complex)
    if y0 is not None:
        if abs(y0.dx - dx) > 1e-12 * dx or abs(y0.x0) > 1e-12:
            raise DomainError("y0 must be sampled on the scheme grid from x = 0")
        n = min(y0.samples.size, x.size)
        y[:n] = y0.samples[:n]
    gfn = _boundary_fn(g)
    if scheme.corner_smoothing:
        raw, ramp_end = gfn, 5 * dt
        gfn = lambda t: raw(t) * min(1.0, t / ramp_end) if ramp_end > 0 else raw(t)
    ffn = _source_fn(f, x)

    # unknowns: j = 1..N-1 (Dirichlet) or j = 0..N-1 (Neumann); y_N = 0
    lo = 1 if kind is BoundaryKind.DIRICHLET else 0
    idx = np.arange(lo, x.size - 1)
    m = idx.size
    r = 1j / dx ** 2
    main = -2 * r - scheme.potential(x[idx])
    off = np.full(m - 1, r, dtype=complex)
    upper = off.copy()
    if kind is BoundaryKind.NEUMANN:
        upper[0] = 2 * r          # ghost point doubles the coupling to y_1
    L = sp.diags([off, main, upper], [-1, 0, 1], format="csc")
    I = sp.identity(m, dtype=complex, format="csc")
    A = (I - 0.5 * dt * L).tocsc()
    B = (I + 0.5 * dt * L).tocsr()
    lu = splu(A)

    def bc_vector(t):
        b = np.zeros(m, dtype=complex)
        if kind is BoundaryKind.DIRICHLET:
            b[0] = r * gfn(t)
        else:
            b[0] = -2 * dx * r * gfn(t)
        return b

    probe = int(round(0.5 * scheme.X_max / dx))
    n_save = n_steps // save_every + 1
    out = np.zeros((n_save, x.size), dtype=complex)
    if kind is BoundaryKind.DIRICHLET:
        y[0] = gfn(0.0)
    out[0] = y
    f_prev = ffn(0.0)[idx] if ffn else None
    b_prev = bc_vector(0.0)
    mass0 = float(np.sum(np.abs(y) ** 2) * dx)
    outgoing = reflected = 0.0
    for n in range(1, n_steps + 1):
        t = n * dt
        b_now = bc_vector(t)
        rhs = B @ y[idx] + 0.5 * dt * (b_prev + b_now)
        if ffn:
            f_now = ffn(t)[idx]
            rhs += 0.5 * dt * (f_prev + f_now)
            f_prev = f_now
        y[idx] = lu.solve(rhs)
        if kind is BoundaryKind.DIRICHLET:
            y[0] = gfn(t)
        b_prev = b_now
        if check_reflection:
            J = 2 * np.imag(np.conj(y[probe]) * (y[probe + 1] - y[probe - 1]) / (2 * dx))
            outgoing += max(J, 0.0) * dt
            reflected += max(-J, 0.0) * dt
        if n % save_every == 0:
            out[n // save_every] = y
    meta = {"courant": scheme.courant, "dx": dx, "dt": dt, "reflected": reflected,
            "outgoing": outgoing, "initial_mass": mass0, "kind": kind.value}
    ref = max(mass0, outgoing)
    if check_reflection and ref > 0 and reflected > REFLECTION_LIMIT * ref:
        raise DomainTooSmallError(
            f"reflected flux {reflected:.3e} at x = {x[probe]:g} exceeds "
            f"{REFLECTION_LIMIT:g} of {ref:.3e}; enlarge X_max or the absorbing layer")
    tg = Grid(0.0, dt * save_every, n_save)
    return Field2D(out, tg, xg, "half_line", meta)
