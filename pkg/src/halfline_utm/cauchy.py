"""Whole-line free propagator exp(-tP) and the Duhamel integral."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import fft as sfft

from .conventions import phase_rows
from .signals import (DomainError, Field2D, Grid, NumericalWarning, ResolutionError,
                      SpaceProfile, TimeSignal)
from .spectral import _one_sided_weights, odd_fft_size

# energy fraction that counts as "significant" when estimating the aliasing horizon
# (wrapped content below it is < 1e-5 relative in L2)
_SIGNIFICANT = 1e-10
_BLOCK = 64


def _box_size(n, pad):
    if pad < 1:
        raise DomainError("padding factor must be >= 1")
    return n if pad == 1 else odd_fft_size(int(math.ceil(pad * n)))


@dataclass(frozen=True, eq=False)
class PropagatorPlan:
    """Periodic box of ``n_box`` points of spacing ``dx`` and the times to evolve to.

    ``pad == 1`` makes the data grid itself the periodic box (exact for
    periodic data); otherwise the data are zero padded to ``pad`` times their length.
    """

    x_grid: Grid
    t_grid: Grid
    pad: float = 2.0
    n_box: int = field(init=False)
    k: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        n_box = _box_size(self.x_grid.n, self.pad)
        object.__setattr__(self, "n_box", n_box)
        object.__setattr__(self, "k", 2 * np.pi * sfft.fftfreq(n_box, self.x_grid.step))

    def phases(self, rows=slice(None)) -> np.ndarray:
        """Multipliers exp(-i k^2 t) for the selected time rows, shape (m, n_box)."""
        t = self.t_grid.points[rows]
        return phase_rows(t, -self.k * self.k)

    def forward(self, rows: np.ndarray) -> np.ndarray:
        return sfft.fft(rows, self.n_box, axis=-1)

    def backward(self, spec: np.ndarray) -> np.ndarray:
        return sfft.ifft(spec, axis=-1)[..., : self.x_grid.n]

    def aliasing_horizon(self, samples: np.ndarray) -> float:
        """Time after which significant content may wrap around the periodic box."""
        spec = np.abs(self.forward(samples)) ** 2
        total = spec.sum()
        if total == 0:
            return math.inf
        order = np.argsort(np.abs(self.k))
        cum = np.cumsum(spec[order])
        idx = min(int(np.searchsorted(cum, (1 - _SIGNIFICANT) * total)), order.size - 1)
        k_sig = abs(self.k[order[idx]])
        mag = np.abs(samples)
        nz = np.flatnonzero(mag > math.sqrt(_SIGNIFICANT) * mag.max())
        width = (nz[-1] - nz[0]) * self.x_grid.step
        room = self.n_box * self.x_grid.step - width
        if k_sig == 0:
            return math.inf
        return max(room, 0.0) / (2 * k_sig)


def _check_full_line(y):
    if y.domain != "full_line":
        raise DomainError("the Cauchy solver works on the whole line")


def _alias_check(plan, samples, meta):
    horizon = plan.aliasing_horizon(samples)
    meta["aliasing_horizon"] = horizon
    if plan.t_grid.stop > horizon:
        msg = (f"t up to {plan.t_grid.stop:g} exceeds the aliasing-safe horizon "
               f"{horizon:.3g} for this box; enlarge the x-grid or the padding")
        meta.setdefault("warnings", []).append(msg)
        warnings.warn(msg, NumericalWarning, stacklevel=3)


def _kept_grid(xg, keep):
    if keep is None:
        return xg, np.arange(xg.n)
    idx = np.arange(xg.n)[keep]
    if idx.size == 0:
        raise DomainError("empty output window")
    step = xg.step * (idx[1] - idx[0]) if idx.size > 1 else xg.step
    return Grid(xg.start + idx[0] * xg.step, step, idx.size), idx


def free_evolution(y0_star: SpaceProfile, t_grid: Grid, pad: float = 2.0,
                   x_derivative: int = 0, keep: slice = None,
                   check_aliasing: bool = True) -> Field2D:
    """``v(., t) = exp(-tP) y0*``: multiply the transform by exp(-i k^2 t) and invert.

    Output lives on the x-grid of ``y0_star`` (or the sub-grid selected by
    ``keep``); the box is padded by ``pad``. ``x_derivative`` returns
    ``d^j/dx^j v`` through the multiplier ``(ik)^j``.
    """
    _check_full_line(y0_star)
    xg = y0_star.grid
    plan = PropagatorPlan(xg, t_grid, pad)
    out_grid, idx = _kept_grid(xg, keep)
    meta = {"n_box": plan.n_box}
    out = np.zeros((t_grid.n, idx.size), dtype=complex)
    if not np.any(y0_star.samples):
        return Field2D(out, t_grid, out_grid, "full_line", meta)
    if check_aliasing:
        _alias_check(plan, y0_star.samples, meta)
    spec0 = plan.forward(y0_star.samples) * (1j * plan.k) ** x_derivative
    for a in range(0, t_grid.n, _BLOCK):
        rows = slice(a, min(a + _BLOCK, t_grid.n))
        out[rows] = plan.backward(plan.phases(rows) * spec0)[:, idx]
    return Field2D(out, t_grid, out_grid, "full_line", meta)


def duhamel(f_star: Field2D, t_grid: Grid = None, pad: float = 2.0,
            x_derivative: int = 0) -> Field2D:
    """``z(t) = int_0^t exp(-(t-s)P) f*(s) ds`` by the trapezoid rule in s.

    Uses the recursion ``Z_n = E (Z_{n-1} + dt/2 F_{n-1}) + dt/2 F_n`` with the
    exact one-step propagator E, which is the composite trapezoid rule
    applied to the integrand in multiplier space. ``z(., t0) = 0`` exactly.
    """
    _check_full_line(f_star)
    tg = f_star.t_grid if t_grid is None else t_grid
    if tg != f_star.t_grid:
        raise DomainError("f* must be sampled on the output t-grid")
    xg = f_star.x_grid
    plan = PropagatorPlan(xg, tg, pad)
    meta = {"n_box": plan.n_box, "quadrature": "trapezoid"}
    out = np.zeros((tg.n, xg.n), dtype=complex)
    if not np.any(f_star.values):
        return Field2D(out, tg, xg, "full_line", meta)
    dt = tg.step
    step = np.exp(-1j * plan.k * plan.k * dt)
    deriv = (1j * plan.k) ** x_derivative
    F_prev = plan.forward(f_star.values[0])
    Z = np.zeros(plan.n_box, dtype=complex)
    for n in range(1, tg.n):
        F = plan.forward(f_star.values[n])
        Z = step * (Z + 0.5 * dt * F_prev) + 0.5 * dt * F
        out[n] = plan.backward(Z * deriv) if x_derivative else plan.backward(Z)
        F_prev = F
    return Field2D(out, tg, xg, "full_line", meta)


def boundary_traces(u: Field2D):
    """Value and x-derivative of ``u`` at x = 0 as TimeSignals.

    The derivative uses the fourth-order one-sided stencil on x = 0..4dx.
    """
    xg = u.x_grid
    try:
        i0 = xg.index_of(0.0)
    except DomainError:
        raise ResolutionError("x-grid does not contain x = 0") from None
    if xg.n - i0 < 5:
        raise ResolutionError("need at least 5 grid points at x >= 0 for the derivative trace")
    cols = u.values[:, i0:i0 + 5]
    value = cols[:, 0].copy()
    deriv = cols @ _one_sided_weights(0) / xg.step
    tg = u.t_grid
    if tg.n < 2:
        raise ResolutionError("need at least two time samples")
    return (TimeSignal(value, tg.start, tg.step, _open_support(value, tg)),
            TimeSignal(deriv, tg.start, tg.step, _open_support(deriv, tg)))


def _open_support(samples, tg):
    # traces are generic functions; declare support to the end of the grid unless all zero
    return tg.start if not np.any(samples) else tg.stop + tg.step
