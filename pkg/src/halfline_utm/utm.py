"""Half-line boundary solutions from the contour representation.

For boundary data h supported in [0, T') the solution of the pure boundary
problem (zero initial datum, zero forcing) is::

    u(x, t) = (1/2pi) int_{dD+} exp(ikx - ik^2 t) m(k) h_tilde(k^2) dk

with m(k) = 2k (Dirichlet) or -2i (Neumann). The imaginary-axis leg is the
damped piece ``u1(x,t) = int_0^inf exp(-kx + ik^2 t) H1_hat(k) dk`` and the
real-axis leg is the free whole-line evolution of ``H2`` restricted to x >= 0.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np
from scipy import fft as sfft
from scipy.integrate import cumulative_trapezoid
from scipy.interpolate import CubicSpline

from .cauchy import duhamel, free_evolution
from .conventions import phase_rows
from .extension import (antiderivative, extend_field, extend_initial, mean_zero_extension,
                        reflect_past_end)
from .profiles import smooth_step_down
from .quadrature import oscillatory_nodes
from .signals import (ContractError, DomainError, Field2D, Grid, NumericalWarning,
                      ResolutionError, SpaceProfile, SpectralDensity, TimeSignal)
from .spectral import fourier_transform, odd_fft_size
from .special import gauss_laplace

SPECTRUM_PAD = 32
TAIL_TOL = 1e-16          # target energy fraction beyond K_max when the band allows it
TAIL_WARN = 1e-10         # documented tolerance; more than this at the band edge warns
TAIL_WEIGHT_S = 1.0       # tail measured with (1 + k^2)^s, s = 1 the largest index checked
NYQUIST_FRACTION = 0.9    # usable part of the time-sampling band
DAMPED_CUTOFF = 40.0
BOX_FLOOR = 800.0
_X_BLOCK = 64
_T_BLOCK = 256

# Gregory end weights: sum_j (1 + c_j) f(j dk) dk matches int_0^inf f for the
# Euler-Maclaurin terms f(0), f'(0), ..., f^(5)(0) (unit weights elsewhere)
_GREGORY_RHS = np.array([-0.5, 1 / 12, 0.0, -1 / 120, 0.0, 1 / 252])
_GREGORY = np.linalg.solve(np.vander(np.arange(6.0), increasing=True).T, _GREGORY_RHS)


class BoundaryKind(str, Enum):
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"

    @classmethod
    def parse(cls, value) -> "BoundaryKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise DomainError(f"unknown boundary kind {value!r}") from None


class BoundarySpectrum:
    """``h_hat(tau)`` at arbitrary real tau for a sampled boundary signal.

    One zero-padded FFT, then a cubic spline through the samples after
    removing the linear phase of the support centre (which leaves a slowly
    varying function of tau). The signal is the sampled function, so its
    transform is ``dt * sum_j h_j exp(-i tau t_j)``.
    """

    def __init__(self, h: TimeSignal, pad: float = SPECTRUM_PAD, support_end: float = None):
        self.h = h
        self.dt = h.dt
        if support_end is not None and support_end < h.support_end - 1e-9 * h.dt:
            raise ContractError("support_end lies inside the support of h")
        self.support_end = h.support_end if support_end is None else float(support_end)
        self.tau_max = math.pi / h.dt
        self.zero = not np.any(h.samples)
        self.centre = 0.5 * (h.t0 + self.support_end)
        t = h.t
        self.hat0 = complex(np.sum(h.samples) * h.dt)
        self.hat1 = complex(-1j * np.sum(t * h.samples) * h.dt)   # d/dtau at 0
        if self.zero:
            return
        F = fourier_transform(h, pad)
        k = F.k
        G = F.values * np.exp(1j * k * self.centre)
        self._re = CubicSpline(k, G.real)
        self._im = CubicSpline(k, G.imag)

    def __call__(self, tau):
        tau = np.asarray(tau, dtype=float)
        if self.zero:
            return np.zeros(tau.shape, dtype=complex)
        val = (self._re(tau) + 1j * self._im(tau)) * np.exp(-1j * tau * self.centre)
        return np.where(np.abs(tau) <= self.tau_max, val, 0.0)

    @property
    def k_cap(self) -> float:
        return math.sqrt(NYQUIST_FRACTION * self.tau_max)


def _multiplier(kind: BoundaryKind, part: int):
    """H_hat_part(k) = factor(k) * h_hat(sign * k^2) for k >= 0."""
    if kind is BoundaryKind.DIRICHLET:
        if part == 1:
            return 1.0, lambda k: k / np.pi
        return -1.0, lambda k: 2.0 * k
    if part == 1:
        return 1.0, lambda k: -np.ones_like(k) / np.pi
    return -1.0, lambda k: -2j * np.ones_like(k)


def _choose_kmax(values_fn, k_cap, tail_tol, n=20001):
    k = np.linspace(0.0, k_cap, n)
    e = (1 + k * k) ** TAIL_WEIGHT_S * np.abs(values_fn(k)) ** 2
    cum = cumulative_trapezoid(e, k, initial=0.0)
    total = cum[-1]
    if total == 0:
        return 0.0, 0.0, False
    tail = (total - cum) / total
    # energy in the last 5% of the usable band estimates what lies beyond the cap
    edge = tail[int(0.95 * (n - 1))]
    ok = np.flatnonzero(tail <= tail_tol)
    K = float(k[ok[0]]) if ok.size else k_cap
    K = min(k_cap, 1.05 * K + 2 * (k[1] - k[0]))
    truncated = edge > TAIL_WARN
    # neglected inside the band plus the edge energy as a proxy for what lies beyond it
    return K, float(np.interp(K, k, tail) + edge), truncated


def _build(h: TimeSignal, kind, part: int, K_max=None, dk=None, spectrum=None,
           tail_tol=TAIL_TOL, support=None) -> SpectralDensity:
    kind = BoundaryKind.parse(kind)
    spec = spectrum if spectrum is not None else BoundarySpectrum(h)
    sign, factor = _multiplier(kind, part)

    def raw(k):
        k = np.asarray(k, dtype=float)
        return factor(k) * spec(sign * k * k)

    truncated, tail = False, 0.0
    if K_max is None:
        K_max, tail, truncated = _choose_kmax(raw, spec.k_cap, tail_tol)
        if truncated:
            warnings.warn(
                f"H{part}: spectrum not resolved by the time sampling (tail mass ~{tail:.2e} "
                f"near k = {spec.k_cap:.3g}); refine dt", NumericalWarning, stacklevel=3)
    elif K_max > spec.k_cap / math.sqrt(NYQUIST_FRACTION):
        raise ResolutionError(f"K_max = {K_max} exceeds the band sqrt(pi/dt) of the data")
    K = float(K_max)
    T_sup = float(spec.support_end - h.t0) if support is None else float(support)
    if dk is None:
        dk = min(0.02, math.pi / (8 * max(K, 1.0) * max(T_sup, 1e-3)))
    n = max(2, int(math.ceil(K / dk)) + 1)
    kg = np.linspace(0.0, K, n) if K > 0 else np.array([0.0, 1.0])
    vals = raw(kg) if K > 0 else np.zeros(2, complex)

    def sampler(k):
        k = np.asarray(k, dtype=float)
        out = np.zeros(k.shape, dtype=complex)
        m = (k >= 0) & (k <= K)
        if np.any(m) and K > 0:
            out[m] = raw(k[m])
        return out

    meta = {"kind": kind.value, "part": part, "K_max": K, "tail_mass": tail,
            "tail_tol": tail_tol, "truncated": truncated, "T_support": T_sup,
            "hat0": spec.hat0, "hat1": spec.hat1}
    return SpectralDensity(vals, 0.0, kg[1] - kg[0], one_sided=True, sampler=sampler, meta=meta)


def build_H1(h: TimeSignal, kind, K_max: float = None, **kw) -> SpectralDensity:
    """One-sided ``H1_hat``: ``k h_hat(k^2)/pi`` (Dirichlet) or ``-h_hat(k^2)/pi`` (Neumann)."""
    return _build(h, kind, 1, K_max, **kw)


def build_H2(h: TimeSignal, kind, K_max: float = None, **kw) -> SpectralDensity:
    """One-sided ``H2_hat``: ``2k h_hat(-k^2)`` (Dirichlet) or ``-2i h_hat(-k^2)`` (Neumann)."""
    return _build(h, kind, 2, K_max, **kw)


# ------------------------------------------------------------------ u1

def _half_line_x(x_grid: Grid):
    if x_grid.start < -1e-12:
        raise DomainError("u1/u2 are evaluated on x >= 0")
    return x_grid.points


def evaluate_u1(H1: SpectralDensity, x_grid: Grid, t_grid: Grid, x_derivative: int = 0,
                error_estimate: bool = False) -> Field2D:
    """``d^j/dx^j int_0^K exp(-kx + ik^2 t) H1_hat(k) dk`` by composite Gauss-Legendre panels.

    Panel widths follow ``pi / (4 max(2 (t_max + T_h) k, x, 1))``; blocks of
    large x stop at k = 40/x where exp(-kx) is below double precision. With
    ``error_estimate`` the integral is repeated with halved panels and the
    per-node difference is stored in ``meta['quad_error']``.
    """
    xs = _half_line_x(x_grid)
    ts = t_grid.points
    out = np.zeros((ts.size, xs.size), dtype=complex)
    meta = {"part": "u1"}
    K = float(H1.meta.get("K_max", H1.k[-1]))
    if K <= 0 or not np.any(H1.values):
        if error_estimate:
            meta["quad_error"] = np.zeros(out.shape)
        return Field2D(out, t_grid, x_grid, "half_line", meta)
    rate = 2 * (float(np.max(np.abs(ts))) + H1.meta.get("T_support", 0.0))
    sampler = H1.sampler or H1

    def run(shrink):
        res = np.zeros_like(out)
        n_nodes = 0
        for a in range(0, xs.size, _X_BLOCK):
            xb = xs[a:a + _X_BLOCK]
            top = K if xb[0] <= 0 else min(K, DAMPED_CUTOFF / xb[0])
            nodes, w = oscillatory_nodes(0.0, top, rate, float(xb[-1]), shrink)
            n_nodes += nodes.size
            amp = w * sampler(nodes) * (-nodes) ** x_derivative
            E = np.exp(-np.multiply.outer(nodes, xb))
            k2 = nodes * nodes
            for b in range(0, ts.size, _T_BLOCK):
                A = phase_rows(ts[b:b + _T_BLOCK], k2) * amp
                # contiguous copies keep the products on the BLAS path
                res[b:b + _T_BLOCK, a:a + _X_BLOCK] = (np.ascontiguousarray(A.real) @ E
                                                       + 1j * (np.ascontiguousarray(A.imag) @ E))
        return res, n_nodes

    out, n_nodes = run(1.0)
    meta["n_nodes"] = n_nodes
    if error_estimate:
        fine, _ = run(2.0)
        meta["quad_error"] = np.abs(fine - out)
    return Field2D(out, t_grid, x_grid, "half_line", meta)


# ------------------------------------------------------------------ u2

def _singular_part(H2: SpectralDensity):
    """Coefficients (a, c0, c1) with H2_hat(k) ~ (c0 + c1 k) exp(-a k^2) as k -> 0+.

    Removing this term leaves a remainder whose inverse transform decays fast
    enough for a moderate periodic box.
    """
    kind = BoundaryKind.parse(H2.meta["kind"])
    K = H2.meta["K_max"]
    a = max(1.0, DAMPED_CUTOFF / max(K, 1e-9) ** 2)
    hat0 = H2.meta["hat0"]
    if kind is BoundaryKind.DIRICHLET:
        return a, 0j, 2 * hat0
    return a, -2j * hat0, 0j


def _singular_field(a, c0, c1, xs, ts, x_derivative):
    """``(1/2pi) d^j/dx^j int_0^inf exp(ikx - ik^2 t - a k^2) (c0 + c1 k) dk`` in closed form."""
    beta = -1j * xs[None, :]
    gamma = a + 1j * ts[:, None]
    beta, gamma = np.broadcast_arrays(beta, gamma)
    J = [gauss_laplace(beta, gamma)]
    J.append((1 - beta * J[0]) / (2 * gamma))
    J.append((J[0] - beta * J[1]) / (2 * gamma))
    d = x_derivative
    if d > 1:
        raise DomainError("singular part supports x_derivative <= 1")
    out = (1j) ** d * (c0 * J[d] + c1 * J[d + 1])
    return out / (2 * np.pi)


def h2_profile(H2: SpectralDensity, x_grid: Grid) -> SpaceProfile:
    """``H2(x) = (1/2pi) int_0^K exp(ikx) H2_hat(k) dk`` on ``x_grid`` (any sign of x)."""
    xs = x_grid.points
    a, c0, c1 = _singular_part(H2)
    sing = _singular_field(a, c0, c1, xs, np.zeros(1), 0)[0]
    K = H2.meta["K_max"]
    rate = 2 * H2.meta.get("T_support", 0.0)
    # halved panels: the spline sampler is only piecewise smooth
    nodes, w = oscillatory_nodes(0.0, K, rate, float(np.max(np.abs(xs))) if xs.size else 1.0, 2.0)
    reg = H2.sampler(nodes) - (c0 + c1 * nodes) * np.exp(-a * nodes * nodes)
    vals = sing + np.exp(1j * np.multiply.outer(xs, nodes)) @ (w * reg) / (2 * np.pi)
    return SpaceProfile(vals, x_grid.start, x_grid.step, "full_line")


def one_sided_inverse(fn, K: float, step: float, length: float) -> SpaceProfile:
    """``(1/2pi) int_0^K exp(ikx) fn(k) dk`` on a centred periodic box of about ``length``.

    One inverse FFT of the samples ``fn(j dk)``, ``dk = 2pi / (N step)``, with
    Gregory end weights at k = 0; content that decays slower than the box
    length wraps around.
    """
    N = odd_fft_size(int(math.ceil(length / step)))
    half = (N - 1) // 2
    dk = 2 * np.pi / (N * step)
    km = dk * np.arange(half + 1)
    km = km[km <= K]
    w = np.full(km.size, dk)
    n_end = min(_GREGORY.size, km.size)
    w[:n_end] += dk * _GREGORY[:n_end]
    coeffs = np.zeros(N, dtype=complex)
    coeffs[: km.size] = w * fn(km) * np.exp(-1j * km * half * step)
    samples = sfft.ifft(coeffs) * N / (2 * np.pi)
    return SpaceProfile(samples, -half * step, step, "full_line")


def evaluate_u2(H2: SpectralDensity, x_grid: Grid, t_grid: Grid, x_derivative: int = 0,
                box_length: float = None) -> Field2D:
    """Real-axis piece as a whole-line Cauchy problem with datum H2, restricted to x >= 0.

    H2 is split into a closed-form part ``(c0 + c1 k) exp(-a k^2)`` carrying the
    jump/kink of the one-sided spectrum at k = 0 (evolved exactly) and a
    remainder that decays quickly in x; the remainder is sampled on a periodic
    box and evolved with :func:`cauchy.free_evolution`.
    """
    xs = _half_line_x(x_grid)
    ts = t_grid.points
    meta = {"part": "u2"}
    K = float(H2.meta.get("K_max", 0.0))
    if K <= 0 or not np.any(H2.values):
        return Field2D(np.zeros((ts.size, xs.size)), t_grid, x_grid, "half_line", meta)
    a, c0, c1 = _singular_part(H2)
    sing = _singular_field(a, c0, c1, xs, ts, x_derivative)

    # box sampling: spacing fine enough for K, length well beyond the travel distance
    dx = x_grid.step
    m = max(1, int(math.ceil(1.05 * K * dx / math.pi)))
    t_abs = float(np.max(np.abs(ts)))
    # the remainder decays algebraically in x; its wrap-around falls like 1/L^4
    L = box_length or max(8 * (float(xs[-1]) + 2 * K * t_abs), BOX_FLOOR)

    def regular(k):
        return H2.sampler(k) - (c0 + c1 * k) * np.exp(-a * k * k)

    box = one_sided_inverse(regular, K, dx / m, L)
    half = (box.samples.size - 1) // 2
    dxi = box.dx
    keep = slice(half, half + m * (xs.size - 1) + 1, m)
    v = free_evolution(box, t_grid, pad=1, x_derivative=x_derivative, keep=keep,
                       check_aliasing=False)
    N = box.samples.size
    meta.update({"box_length": N * dxi, "box_points": N, "oversample": m,
                 "singular": {"a": a, "c0": c0, "c1": c1}})
    return Field2D(v.values + sing, t_grid, x_grid, "half_line", meta)


# ------------------------------------------------------------ direct path

@dataclass
class ContourDiagnostic:
    K: float
    imag_leg_error: float
    real_leg_error: float
    refinements: int
    converged: bool
    imag_leg: np.ndarray = None
    real_leg: np.ndarray = None


def _h_tilde(h: TimeSignal, k2: np.ndarray) -> np.ndarray:
    """``int_0^T' exp(i k^2 s) h(s) ds`` by the sampled sum ``dt sum_j h_j exp(i k^2 s_j)``.

    Horner's rule in ``z = exp(i k^2 dt)`` (|z| = 1, so the recursion is stable
    for real k^2; for imaginary k, |z| < 1 and it is still forward stable).
    """
    m = h.t < h.support_end
    s, v = h.t[m], h.samples[m] * h.dt
    k2 = np.asarray(k2, dtype=complex)
    z = np.exp(1j * k2 * h.dt)
    acc = np.zeros(k2.shape, dtype=complex)
    for c in v[::-1]:
        acc = acc * z + c
    return acc * np.exp(1j * k2 * s[0]) if s.size else acc


def _contour_weight(kind, k):
    return 2 * k if kind is BoundaryKind.DIRICHLET else -2j * np.ones_like(k)


def direct_contour_eval(h: TimeSignal, kind, x, t, tol: float = 1e-10, max_refine: int = 3,
                        K: float = None, full_output: bool = False):
    """Evaluate the contour integral literally at probe points (x, t).

    The contour is traversed as k = i kappa (kappa from infinity to 0), then
    k real from 0 to infinity, with ``h_tilde(k^2)`` computed per node by
    time quadrature; no spectral interpolation is involved. Panels are
    halved until both legs change by less than ``tol`` (relative).
    """
    kind = BoundaryKind.parse(kind)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    t = np.atleast_1d(np.asarray(t, dtype=float))
    x, t = np.broadcast_arrays(x, t)
    scalar = x.size == 1 and np.ndim(x) <= 1
    if np.any(x < 0):
        raise DomainError("probe points need x >= 0")
    if not np.any(h.samples):
        val = np.zeros(x.shape, dtype=complex)
        diag = ContourDiagnostic(0.0, 0.0, 0.0, 0, True)
        res = complex(val[0]) if scalar else val
        return (res, diag) if full_output else res
    T_sup = h.support_end - h.t0
    k_cap = math.sqrt(NYQUIST_FRACTION * math.pi / h.dt)
    if K is None:
        # envelope of |m(k) h_tilde(+-k^2)| on a coarse scan, cut below 1e-14 of its max
        kk = np.linspace(0, k_cap, 801)
        env = np.maximum(np.abs(_h_tilde(h, kk ** 2)), np.abs(_h_tilde(h, -kk ** 2)))
        env = env * np.abs(_contour_weight(kind, kk))
        above = np.flatnonzero(env > 1e-13 * env.max())
        K = min(k_cap, float(kk[min(above[-1] + 2, kk.size - 1)]))
    rate = 2 * (float(np.max(np.abs(t))) + T_sup)
    damping = float(np.max(x))

    def legs(shrink):
        nodes, w = oscillatory_nodes(0.0, K, rate, damping, shrink)
        # imaginary leg: k = i kappa, dk = i dkappa, kappa from inf to 0
        kz = 1j * nodes
        f_im = np.exp(1j * np.multiply.outer(x, kz) - 1j * np.multiply.outer(t, kz * kz))
        im_leg = -(f_im @ (w * 1j * _contour_weight(kind, kz) * _h_tilde(h, -(nodes ** 2))))
        f_re = np.exp(1j * np.multiply.outer(x, nodes) - 1j * np.multiply.outer(t, nodes ** 2))
        re_leg = f_re @ (w * _contour_weight(kind, nodes) * _h_tilde(h, nodes ** 2))
        return im_leg / (2 * np.pi), re_leg / (2 * np.pi)

    im0, re0 = legs(1.0)
    err_im = err_re = math.inf
    n = 0
    for n in range(1, max_refine + 1):
        im1, re1 = legs(2.0 ** n)
        scale = max(np.max(np.abs(im1 + re1)), 1e-300)
        err_im = float(np.max(np.abs(im1 - im0)) / scale)
        err_re = float(np.max(np.abs(re1 - re0)) / scale)
        im0, re0 = im1, re1
        if err_im < tol and err_re < tol:
            break
    converged = err_im < tol and err_re < tol
    if not converged:
        warnings.warn(f"direct contour quadrature not converged (imag {err_im:.2e}, "
                      f"real {err_re:.2e})", NumericalWarning, stacklevel=2)
    val = im0 + re0
    diag = ContourDiagnostic(K, err_im, err_re, n, converged, im0.reshape(x.shape),
                             re0.reshape(x.shape))
    res = complex(val[0]) if scalar else val.reshape(x.shape)
    return (res, diag) if full_output else res


# ----------------------------------------------------------- full solves

@dataclass
class UtmDecomposition:
    u1: Field2D
    u2: Field2D
    H1: SpectralDensity
    H2: SpectralDensity
    kind: BoundaryKind
    meta: dict = field(default_factory=dict)

    @property
    def u(self) -> Field2D:
        return Field2D(self.u1.values + self.u2.values, self.u1.t_grid, self.u1.x_grid,
                       "half_line", dict(self.meta))

    def boundary_trace(self, derivative: bool = False, t_grid: Grid = None) -> TimeSignal:
        """``u(0, t)`` or ``u_x(0, t)`` evaluated through the representation (spectrally exact in x)."""
        tg = t_grid or self.u1.t_grid
        xg = Grid(0.0, 1.0, 1)
        d = int(derivative)
        vals = (evaluate_u1(self.H1, xg, tg, d).values + evaluate_u2(self.H2, xg, tg, d).values)[:, 0]
        end = tg.start if not np.any(vals) else tg.stop + tg.step
        return TimeSignal(vals, tg.start, tg.step, end)


def utm_solve(h: TimeSignal, kind, x_grid: Grid, t_grid: Grid, K_max: float = None,
              error_estimate: bool = False, support_end: float = None) -> UtmDecomposition:
    """Build H1_hat, H2_hat and evaluate both pieces on the (x, t) grid.

    The spectral layout (k-grid, panels, interpolation centre) depends on
    ``K_max`` and the support window; fixing both (``support_end`` at least the
    support of every h involved) makes several solves exactly linear in h.
    """
    kind = BoundaryKind.parse(kind)
    if h.t0 < -1e-12:
        raise ContractError("boundary data must vanish for t < 0")
    spec = BoundarySpectrum(h, support_end=support_end)
    H1 = build_H1(h, kind, K_max, spectrum=spec)
    H2 = build_H2(h, kind, K_max, spectrum=spec)
    u1 = evaluate_u1(H1, x_grid, t_grid, error_estimate=error_estimate)
    u2 = evaluate_u2(H2, x_grid, t_grid)
    meta = {"kind": kind.value, "K_max_H1": H1.meta["K_max"], "K_max_H2": H2.meta["K_max"],
            "tail_mass_H1": H1.meta["tail_mass"], "tail_mass_H2": H2.meta["tail_mass"],
            "truncated": bool(H1.meta["truncated"] or H2.meta["truncated"])}
    if error_estimate:
        meta["u1_quad_error_max"] = float(np.max(u1.meta["quad_error"]))
    return UtmDecomposition(u1, u2, H1, H2, kind, meta)


def neumann_inhomogeneous_solve(h: TimeSignal, T_prime: float, x_grid: Grid, t_grid: Grid,
                                K_max: float = None) -> UtmDecomposition:
    """Neumann solve through the mean-zero extension h_e on [0, 2T'+1).

    Returns the decomposition on ``t_grid`` (expected inside [0, T']); the
    meta records ||h_e||, ||H|| and the (1 + T') factor for the norm bounds.
    """
    he = mean_zero_extension(h, T_prime)
    dec = utm_solve(he, BoundaryKind.NEUMANN, x_grid, t_grid, K_max)
    dec.meta.update({"T_prime": T_prime, "window_end": 2 * T_prime + 1,
                     "one_plus_T_prime": 1 + T_prime,
                     "cancel_amplitude": complex(np.max(np.abs(he.samples[he.t > T_prime]))
                                                 if np.any(he.t > T_prime) else 0)})
    dec.meta["h_e"] = he
    dec.meta["H"] = antiderivative(he)
    return dec


# --------------------------------------------------------- reunification

def reunify_solve(y0: SpaceProfile, f: Optional[Field2D], g: TimeSignal, kind, t_grid: Grid,
                  T_prime_factor: float = 1.25, K_max: float = None,
                  x_pad: float = None) -> Field2D:
    """Inhomogeneous half-line problem by decompose-and-reunify.

    ``y = v|_+ + z|_+ + u`` with v the free evolution of the extended initial
    datum, z the Duhamel term of the extended forcing and u the pure boundary
    solution for ``h = g - B v(0,.) - B z(0,.)`` continued past T and cut off
    smoothly on (T, T') with T' = 1.25 T. ``g`` must be sampled on ``t_grid``.
    Output is on the x-grid of ``y0`` and on ``t_grid``.

    By default the periodic box for v and z is long enough that no
    wavenumber below the grid Nyquist limit wraps around before T (the
    reflected extension is only C^3 at x = 0, so it carries such content).
    """
    kind = BoundaryKind.parse(kind)
    if y0.domain != "half_line" or abs(y0.x0) > 1e-12:
        raise DomainError("y0 must be a half-line profile starting at x = 0")
    if abs(g.dt - t_grid.step) > 1e-12 * t_grid.step or abs(g.t0 - t_grid.start) > 1e-12:
        raise DomainError("g must be sampled on t_grid")
    if len(g) < t_grid.n:
        raise DomainError("g is shorter than t_grid")
    if abs(t_grid.start) > 1e-12:
        raise DomainError("t_grid must start at 0")
    T = t_grid.stop
    T_prime = T_prime_factor * T
    d = 1 if kind is BoundaryKind.NEUMANN else 0
    xg = y0.grid
    n_x = xg.n
    if x_pad is None:
        span = 2 * xg.stop
        x_pad = max(2.0, (span + 2.2 * (math.pi / xg.step) * T) / span)

    y0s = extend_initial(y0)
    keep = slice(n_x - 1, 2 * n_x - 1)
    v = free_evolution(y0s, t_grid, pad=x_pad, keep=keep)
    v_tr = free_evolution(y0s, t_grid, pad=x_pad, x_derivative=d,
                          keep=slice(n_x - 1, n_x)).values[:, 0]
    warns = list(v.meta.get("warnings", []))
    total = v.values.copy()
    tr = v_tr.copy()
    if f is not None and np.any(f.values):
        if f.t_grid != t_grid or f.x_grid != xg:
            raise DomainError("f must live on (t_grid, y0's x-grid)")
        fs = extend_field(f)
        z = duhamel(fs, pad=x_pad)
        total += z.values[:, n_x - 1:]
        tr += duhamel(fs, pad=x_pad, x_derivative=d).values[:, n_x - 1] if d else \
            z.values[:, n_x - 1]

    h_vals = g.samples[: t_grid.n] - tr
    scale = max(np.max(np.abs(h_vals)), np.max(np.abs(g.samples)), 1e-300)
    if abs(h_vals[0]) > 1e-6 * scale:
        msg = f"corner data incompatible: h(0) = {abs(h_vals[0]):.3e}"
        warns.append(msg)
        warnings.warn(msg, NumericalWarning, stacklevel=2)

    # continue past T and cut off smoothly on (T, T')
    dt = t_grid.step
    n_ext = int(math.ceil((T_prime - T) / dt)) + 1
    hs = TimeSignal(h_vals, 0.0, dt, T + dt) if np.any(h_vals) else TimeSignal(h_vals, 0.0, dt)
    ext = reflect_past_end(hs, T, n_ext)
    full = np.concatenate([h_vals, ext])
    tt = dt * np.arange(full.size)
    full = full * smooth_step_down(tt, T, T_prime)
    full[tt >= T_prime] = 0.0
    h = TimeSignal(full, 0.0, dt)

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", NumericalWarning)
        dec = utm_solve(h, kind, xg, t_grid, K_max)
    for w in caught:
        warns.append(str(w.message))
        warnings.warn(w.message, w.category, stacklevel=2)
    y = total + dec.u1.values + dec.u2.values
    meta = {"T": T, "T_prime": T_prime, "kind": kind.value, "warnings": warns,
            "K_max_H1": dec.meta["K_max_H1"], "K_max_H2": dec.meta["K_max_H2"],
            "tail_mass_H1": dec.meta["tail_mass_H1"], "tail_mass_H2": dec.meta["tail_mass_H2"]}
    out = Field2D(y, t_grid, xg, "half_line", meta)
    out.meta["h"] = h
    return out
