"""Fourier transforms and the norm machinery (H^s, homogeneous H^s, W^{s,r}, mixed norms)."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import fft as sfft
from scipy.integrate import trapezoid

from .conventions import bessel_weight
from .signals import (DomainError, Field2D, NormSpec, NumericalWarning, ResolutionError,
                      SpaceProfile, SpectralDensity, TimeSignal, is_admissible)

DEFAULT_PAD = 4

__all__ = [
    "fourier_transform", "inverse_fourier_transform", "sobolev_norm",
    "homogeneous_sobolev_norm", "w_sr_norm", "mixed_norm", "is_admissible",
    "odd_fft_size", "lebesgue_norm_t",
]


def odd_fft_size(n: int) -> int:
    """Smallest odd 3-5-7-smooth integer >= n (odd sizes give a k-grid symmetric about 0)."""
    m = max(int(n), 1)
    if m % 2 == 0:
        m += 1
    while True:
        q = m
        for p in (3, 5, 7):
            while q % p == 0:
                q //= p
        if q == 1:
            return m
        m += 2


def _grid_of(f):
    if isinstance(f, TimeSignal):
        return f.samples, f.t0, f.dt
    if isinstance(f, SpaceProfile):
        return f.samples, f.x0, f.dx
    raise TypeError(f"cannot transform {type(f).__name__}")


def _transform(samples, start, step, pad):
    if pad < 1:
        raise DomainError("padding factor must be >= 1")
    n = odd_fft_size(int(math.ceil(pad * samples.shape[-1])))
    dk = 2 * np.pi / (n * step)
    k = dk * (np.arange(n) - (n - 1) // 2)
    F = sfft.fftshift(step * sfft.fft(samples, n, axis=-1), axes=-1)
    return k, F * np.exp(-1j * k * start)


def fourier_transform(f: Union[TimeSignal, SpaceProfile], pad: float = DEFAULT_PAD) -> SpectralDensity:
    """Transform ``f_hat(k) = int exp(-ikt) f(t) dt`` on a zero-padded grid.

    The padded length is the smallest odd fast size >= pad * len(f), so the
    returned k-grid is exactly symmetric about zero.
    """
    samples, start, step = _grid_of(f)
    if isinstance(f, TimeSignal):
        n_support = int(round((f.support_end - f.t0) / f.dt))
        if 0 < n_support < 4:
            raise ResolutionError(
                f"declared support [{f.t0}, {f.support_end}) holds only {n_support} samples")
    k, F = _transform(samples, start, step, pad)
    dk = 2 * np.pi / (k.size * step)
    return SpectralDensity(F, -dk * ((k.size - 1) // 2), dk)


def inverse_fourier_transform(F: SpectralDensity, t0: float = 0.0, n: int = None) -> TimeSignal:
    """Invert on the grid dual to ``F``'s k-grid (``dt = 2 pi / (N dk)``).

    Only valid for two-sided densities with an odd number of nodes, which is
    what :func:`fourier_transform` produces.
    """
    N = F.values.size
    if N % 2 == 0:
        raise DomainError("inverse transform expects an odd, symmetric k-grid")
    dt = 2 * np.pi / (N * F.dk)
    G = sfft.ifftshift(F.values * np.exp(1j * F.k * t0))
    f = sfft.ifft(G) * N * F.dk / (2 * np.pi)
    n = N if n is None else n
    samples = f[:n].copy()
    return TimeSignal(_flush_small(samples), t0, dt)


def _flush_small(samples, rel=0.0):
    # TimeSignal needs an exact-zero tail; leave values alone unless asked.
    if rel > 0:
        scale = np.max(np.abs(samples)) if samples.size else 0.0
        samples = np.where(np.abs(samples) <= rel * scale, 0, samples)
    return samples


def _spectral_energy(f, weight_fn, pad):
    if isinstance(f, SpectralDensity):
        w = weight_fn(f.k, f.dk)
        return trapezoid(w * np.abs(f.values) ** 2, dx=f.dk) / (2 * np.pi)
    samples, start, step = _grid_of(f)
    k, F = _transform(samples, start, step, pad)
    dk = 2 * np.pi / (k.size * step)
    return float(np.sum(weight_fn(k, dk) * np.abs(F) ** 2) * dk / (2 * np.pi))


def sobolev_norm(f, s: float, pad: float = DEFAULT_PAD) -> float:
    """Bessel-weighted L2 norm ``((1/2pi) int (1+k^2)^s |f_hat|^2 dk)^(1/2)``.

    Accepts a TimeSignal, SpaceProfile or an already transformed SpectralDensity.
    """
    return math.sqrt(max(_spectral_energy(f, lambda k, dk: bessel_weight(k, s), pad), 0.0))


def _homogeneous_weight(s):
    def weight(k, dk):
        w = np.zeros_like(k)
        nz = k != 0
        w[nz] = np.abs(k[nz]) ** (2 * s)
        z = ~nz
        if np.any(z):
            # exact cell average of |k|^{2s} over [-dk/2, dk/2]
            w[z] = (dk / 2) ** (2 * s) / (2 * s + 1) if 2 * s > -1 else np.inf
        return w
    return weight


@dataclass
class HomogeneousNormDiagnostic:
    value: float
    previous: float
    rel_change: float
    pad: float
    converged: bool
    divergent: bool


def homogeneous_sobolev_norm(f, s: float, pad: float = DEFAULT_PAD, rtol: float = 1e-8,
                             max_doublings: int = 6, full_output: bool = False):
    """``((1/2pi) int |k|^{2s} |f_hat|^2 dk)^(1/2)`` with spectral-grid refinement.

    The spectral grid is refined (padding doubled) until two successive
    values agree to ``rtol``. A singular weight (2s <= -1 with f_hat(0) != 0)
    or a sequence that keeps growing is flagged as divergent; the value is
    then ``inf`` and a NumericalWarning is emitted.
    """
    if s == 0:
        v = sobolev_norm(f, 0.0, pad)
        diag = HomogeneousNormDiagnostic(v, v, 0.0, pad, True, False)
        return (v, diag) if full_output else v
    if isinstance(f, SpectralDensity):
        with np.errstate(divide="ignore", invalid="ignore"):
            e = _spectral_energy(f, _homogeneous_weight(s), pad)
        v = math.sqrt(e) if np.isfinite(e) else math.inf
        diag = HomogeneousNormDiagnostic(v, v, 0.0, pad, np.isfinite(v), not np.isfinite(v))
        return (v, diag) if full_output else v

    weight = _homogeneous_weight(s)
    prev, prev_change = None, None
    value, change, p = math.nan, math.inf, pad
    divergent = False
    for i in range(max_doublings + 1):
        p = pad * 2 ** i
        with np.errstate(divide="ignore", invalid="ignore"):
            e = _spectral_energy(f, weight, p)
        value = math.sqrt(e) if np.isfinite(e) and e >= 0 else math.inf
        if not np.isfinite(value):
            divergent = True
            break
        if prev is not None:
            change = abs(value - prev) / max(abs(value), 1e-300)
            if value == 0.0 or change < rtol:
                break
            if prev_change is not None and change > 0.9 * prev_change and value > prev:
                divergent = True
                break
            prev_change = change
        prev = value
    converged = (not divergent) and (change < rtol or value == 0.0)
    if divergent:
        warnings.warn(f"homogeneous H^{s} norm diverges under spectral refinement",
                      NumericalWarning, stacklevel=2)
        value = math.inf
    diag = HomogeneousNormDiagnostic(value, prev if prev is not None else value,
                                     change, p, converged, divergent)
    return (value, diag) if full_output else value


# ---------------------------------------------------------------- W^{s,r}

_FD4 = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0


def fd_derivative(y, dx, axis=-1):
    """Fourth-order first derivative: central inside, one-sided at both ends."""
    y = np.moveaxis(np.asarray(y), axis, -1)
    n = y.shape[-1]
    if n < 5:
        raise ResolutionError("need at least 5 points for a 4th-order derivative")
    d = np.empty_like(y)
    d[..., 2:-2] = (y[..., :-4] - 8 * y[..., 1:-3] + 8 * y[..., 3:-1] - y[..., 4:]) / (12 * dx)
    for j in (0, 1):
        w = _one_sided_weights(j)
        d[..., j] = y[..., :5] @ w / dx
        d[..., n - 1 - j] = -(y[..., ::-1][..., :5] @ w) / dx
    return np.moveaxis(d, -1, axis)


def _one_sided_weights(j):
    # 4th-order weights for f'(x_j) from samples x_0..x_4
    if j == 0:
        return _FD4
    return np.array([-3.0, -10.0, 18.0, -6.0, 1.0]) / 12.0


def _exponent(r):
    if isinstance(r, str):
        return math.inf if r.strip().lower() in ("inf", "infinity") else float(r)
    return math.inf if r == math.inf else float(r)


def _lr_rows(rows, dx, r):
    a = np.abs(rows)
    if r == math.inf:
        return a.max(axis=-1) if a.shape[-1] else np.zeros(a.shape[:-1])
    return trapezoid(a ** r, dx=dx, axis=-1) ** (1.0 / r)


def _is_integer(s):
    return float(s).is_integer()


def w_sr_rows(rows, x0, dx, domain, s, r, homogeneous=False, pad=DEFAULT_PAD):
    """Row-wise W^{s,r} norms of a (m, n) array sampled on ``x0 + j*dx``.

    ``r`` may be any exponent >= 1 here; the public :func:`w_sr_norm`
    enforces r >= 2.
    """
    rows = np.atleast_2d(np.asarray(rows, dtype=complex))
    r = _exponent(r)
    if s < 0:
        raise DomainError("negative Sobolev index is not supported")
    if s == 0:
        return _lr_rows(rows, dx, r)
    if domain == "half_line" and _is_integer(s):
        m = int(s)
        derivs = [rows]
        for _ in range(m):
            derivs.append(fd_derivative(derivs[-1], dx))
        if homogeneous:
            return _lr_rows(derivs[-1], dx, r)
        parts = np.stack([_lr_rows(d, dx, r) for d in derivs])
        if r == math.inf:
            return parts.max(axis=0)
        return (parts ** r).sum(axis=0) ** (1.0 / r)
    # Fourier multiplier on the zero extension, then restriction.
    n = rows.shape[-1]
    n_tot = odd_fft_size(int(math.ceil(pad * n)))
    left = (n_tot - n) // 2
    buf = np.zeros(rows.shape[:-1] + (n_tot,), dtype=complex)
    buf[..., left:left + n] = rows
    k = 2 * np.pi * sfft.fftfreq(n_tot, dx)
    mult = np.abs(k) ** s if homogeneous else bessel_weight(k, s / 2.0)
    g = sfft.ifft(sfft.fft(buf, axis=-1) * mult, axis=-1)
    if domain == "half_line":
        x = x0 + dx * (np.arange(n_tot) - left)
        g = g[..., x >= -1e-12 * dx]
    return _lr_rows(g, dx, r)


def w_sr_norm(f: SpaceProfile, s: float, r, homogeneous: bool = False,
              pad: float = DEFAULT_PAD) -> float:
    """``|(1 - d_x^2)^{s/2} f|_{L^r}`` (or ``| |D|^s f |_{L^r}`` if homogeneous).

    Half-line profiles with non-integer ``s`` are zero-extended to the line,
    multiplied in Fourier space and restricted back to x >= 0. For integer
    ``s`` on the half line the norm is the restriction norm built from
    derivatives, ``(sum_j |d^j f|_r^r)^{1/r}``.
    """
    r = _exponent(r)
    if r < 2:
        raise DomainError("space exponent r must be >= 2")
    return float(w_sr_rows(f.samples, f.x0, f.dx, f.domain, s, r, homogeneous, pad)[0])


def lebesgue_norm_t(values, dt, lam):
    """L^lam norm of per-slice values over a uniform time grid (lam = inf -> max)."""
    values = np.asarray(values, dtype=float)
    if lam == math.inf:
        return float(values.max())
    return float(trapezoid(values ** lam, dx=dt) ** (1.0 / lam))


def _window_rows(u: Field2D, t_window):
    t = u.t
    a, b = (t[0], t[-1]) if t_window is None else t_window
    tol = 1e-9 * u.t_grid.step
    if a < t[0] - tol or b > t[-1] + tol:
        raise DomainError(f"window [{a}, {b}] exceeds the field's time grid")
    sel = np.flatnonzero((t >= a - tol) & (t <= b + tol))
    if sel.size == 0 or b < a:
        raise DomainError("empty time window")
    return sel


def slice_norms(u: Field2D, s, r, t_window=None, homogeneous=False, pad=DEFAULT_PAD):
    sel = _window_rows(u, t_window)
    return sel, w_sr_rows(u.values[sel], u.x_grid.start, u.x_grid.step, u.domain,
                          s, r, homogeneous, pad)


def mixed_norm(u: Field2D, spec: NormSpec, t_window=None, homogeneous: bool = False,
               pad: float = DEFAULT_PAD) -> float:
    """``|u|_{L^lam_t(a, b; W^{s,r}_x)}``; lam = inf is the max over time slices."""
    lam = spec.lam_float
    sel, norms = slice_norms(u, spec.s, spec.r_float, t_window, homogeneous, pad)
    if lam != math.inf and sel.size < 2:
        raise DomainError("time window holds a single slice; L^lam needs at least two")
    return lebesgue_norm_t(norms, u.t_grid.step, lam)
