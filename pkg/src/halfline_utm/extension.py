"""Extensions of data: half-line profiles to the line, boundary signals to mean zero."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .profiles import bump, smooth_step_down
from .signals import (ContractError, DomainError, Field2D, Grid, SpaceProfile, TimeSignal)
from .spectral import fd_derivative, fourier_transform, sobolev_norm, w_sr_rows

# Reflection y*(-x) = chi(x) * sum_j c_j y(x * a_j), with c solving
# sum_j c_j (-a_j)^m = 1 for m = 0..3 so the extension is C^3 across 0.
REFLECTION_SCALES = np.array([1.0, 1.0 / 2, 1.0 / 3, 1.0 / 4])
REFLECTION_COEFFS = np.linalg.solve(
    np.array([(-REFLECTION_SCALES) ** m for m in range(4)]), np.ones(4))
MAX_ORDER = 3.0


class UnsupportedOrderError(DomainError):
    pass


@dataclass(frozen=True)
class ExtensionReport:
    norm_in: float
    norm_out: float

    @property
    def bound_constant(self) -> float:
        if self.norm_in == 0:
            return 0.0 if self.norm_out == 0 else math.inf
        return self.norm_out / self.norm_in


def _reflect_rows(rows, dx, cutoff):
    """Values at x = -dx, -2dx, ..., -(n-1)dx of the reflected extension."""
    rows = np.atleast_2d(rows)
    n = rows.shape[-1]
    x = dx * np.arange(n)
    xl = x[1:]
    chi = np.ones(xl.size) if cutoff is None else smooth_step_down(xl, cutoff, 2 * cutoff)
    active = chi > 0
    out = np.zeros(rows.shape[:-1] + (n - 1,), dtype=complex)
    if not np.any(active) or not np.any(rows):
        return out
    spline_re = CubicSpline(x, rows.real, axis=-1)
    spline_im = CubicSpline(x, rows.imag, axis=-1)
    xa = xl[active]
    acc = np.zeros(rows.shape[:-1] + (xa.size,), dtype=complex)
    for c, a in zip(REFLECTION_COEFFS, REFLECTION_SCALES):
        acc += c * (spline_re(a * xa) + 1j * spline_im(a * xa))
    out[..., active] = acc * chi[active]
    return out


def _check_order(s):
    if s < 0:
        raise DomainError("negative Sobolev order")
    if s > MAX_ORDER:
        raise UnsupportedOrderError(f"reflection extension supports 0 <= s <= 3, got {s}")


def extend_initial(y0: SpaceProfile, s: float = 1.0, cutoff: float = 0.5) -> SpaceProfile:
    """Extend a half-line profile (grid starting at x = 0) to the whole line.

    The returned profile lives on ``[-X, X]`` with the same spacing and agrees
    with ``y0`` sample-for-sample on ``x >= 0``. ``s`` only selects the
    admissible range (the reflection matches derivatives up to order 3).
    """
    _check_order(s)
    if y0.domain != "half_line" or abs(y0.x0) > 1e-12 * y0.dx:
        raise DomainError("extend_initial expects a half-line profile starting at x = 0")
    left = _reflect_rows(y0.samples, y0.dx, cutoff)[0]
    full = np.concatenate([left[::-1], y0.samples])
    n = y0.samples.size
    return SpaceProfile(full, -(n - 1) * y0.dx, y0.dx, "full_line")


def extend_field(f: Field2D, s: float = 1.0, cutoff: float = 0.5) -> Field2D:
    """Apply :func:`extend_initial` to every time slice of a half-line field."""
    _check_order(s)
    if f.domain != "half_line" or abs(f.x_grid.start) > 1e-12 * f.x_grid.step:
        raise DomainError("extend_field expects a half-line field starting at x = 0")
    left = _reflect_rows(f.values, f.x_grid.step, cutoff)
    vals = np.concatenate([left[:, ::-1], f.values], axis=1)
    n = f.x_grid.n
    xg = Grid(-(n - 1) * f.x_grid.step, f.x_grid.step, 2 * n - 1)
    return Field2D(vals, f.t_grid, xg, "full_line", dict(f.meta))


def half_line_sobolev_norm(y: SpaceProfile, s: float) -> float:
    return float(w_sr_rows(y.samples, y.x0, y.dx, "half_line", s, 2)[0])


def extension_report(y0: SpaceProfile, y0_star: SpaceProfile, s: float) -> ExtensionReport:
    """H^s(R_+) norm in, H^s(R) norm out."""
    return ExtensionReport(half_line_sobolev_norm(y0, s), sobolev_norm(y0_star, s))


# ------------------------------------------------------------ time direction

def reflect_past_end(h: TimeSignal, t_end: float, n_extra: int) -> np.ndarray:
    """C^3 continuation of the samples on [t0, t_end] for ``n_extra`` steps.

    Uses the spatial reflection mirrored about ``t_end``; since every scale is
    at most 1 it only reads samples in [t_end - n_extra dt, t_end].
    """
    i_end = int(round((t_end - h.t0) / h.dt))
    if i_end < n_extra:
        raise DomainError("continuation longer than the available history")
    past = h.samples[i_end - n_extra: i_end + 1][::-1]   # past[j] = h(t_end - j dt)
    return _reflect_rows(past, h.dt, None)[0]


CANCELLATION_MARGIN = 0.25


def mean_zero_extension(h: TimeSignal, T_prime: float) -> TimeSignal:
    """Extend ``h`` (supported in [0, T')) to a mean-zero signal supported in [0, 2T'+1).

    A mollifier bump on [T'+1/4, 2T'+3/4] is appended, scaled so that the
    discrete integral of the result vanishes.
    """
    if not T_prime > 0:
        raise DomainError("T' must be positive")
    if h.support_end > T_prime + 1e-9 * h.dt:
        raise ContractError(f"signal support ends at {h.support_end} > T' = {T_prime}")
    if h.t0 > 1e-12:
        raise DomainError("boundary signals start at t = 0")
    t_end = 2 * T_prime + 1
    he = h.padded_to(t_end)
    t = he.t
    a, b = T_prime + CANCELLATION_MARGIN, t_end - CANCELLATION_MARGIN
    cancel = bump(t, a, b)
    mass = np.sum(he.samples)
    alpha = -mass / np.sum(cancel) if mass != 0 else 0.0
    samples = he.samples + alpha * cancel
    return TimeSignal(samples, he.t0, he.dt)


def antiderivative(h_e: TimeSignal, rtol: float = 1e-10) -> TimeSignal:
    """``H(t) = int_{-inf}^t h_e``: cumulative trapezoid with Euler-Maclaurin end correction."""
    g = h_e.samples
    total = np.sum(g) * h_e.dt
    scale = np.sum(np.abs(g)) * h_e.dt
    if abs(total) > rtol * scale:
        raise ContractError(f"antiderivative needs a mean-zero input (integral = {total:.3e})")
    if scale == 0:
        return h_e.with_samples(np.zeros_like(g))
    dt = h_e.dt
    trap = np.concatenate([[0.0], np.cumsum(0.5 * (g[:-1] + g[1:]) * dt)])
    dg = fd_derivative(g, dt)
    H = trap - dt * dt / 12.0 * (dg - dg[0])
    H[h_e.t >= h_e.support_end - 1e-9 * dt] = 0.0
    return TimeSignal(H, h_e.t0, dt, h_e.support_end)


def antiderivative_identity_defect(h_e: TimeSignal, H: TimeSignal, floor: float = 1e-3,
                                   pad: float = 8) -> float:
    """Max relative defect of ``|tau| |H_hat(tau)| = |h_e_hat(tau)|`` where h_e_hat is significant."""
    A = fourier_transform(h_e, pad)
    B = fourier_transform(H, pad)
    mag = np.abs(A.values)
    sel = (mag > floor * mag.max()) & (np.abs(A.k) > 0)
    if not np.any(sel):
        return 0.0
    lhs = np.abs(B.k[sel]) * np.abs(B.values[sel])
    return float(np.max(np.abs(lhs - mag[sel]) / mag[sel]))
