"""Oscillatory kernels of the half-line representation and their decay scans.

* ``I(tau, t, k) = int_0^k exp(i (t k'^2 - k' tau)) dk'``   (Fresnel partial integral)
* ``l(tau; x, t, b) = int_0^b exp(-k x + i k^2 t - i k tau) dk``
* ``L(x, y, t, s; b) = 2 pi int_0^b exp(-k (x + y) - i k^2 (t - s)) dk``

All three are evaluated in closed form through the scaled complementary
error function; composite Gauss-Legendre quadrature is kept as an
independent cross-check.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from .quadrature import oscillatory_nodes
from .signals import DomainError
from .special import damped_fresnel

# exp(-DAMPED_CUTOFF) is below double precision relative to the k = 0 end
DAMPED_CUTOFF = 40.0


def kernel_ell(tau, x, t, b):
    """``l(tau; x, t, b)``; vectorised over broadcastable arguments, x >= 0, b >= 0."""
    tau, x, t, b = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (tau, x, t, b)))
    if np.any(x < 0):
        raise DomainError("kernel_ell needs x >= 0")
    if np.any(b < 0):
        raise DomainError("kernel_ell needs b >= 0")
    out = np.zeros(tau.shape, dtype=complex)
    m = b > 0
    if np.any(m):
        out[m] = damped_fresnel(x[m] + 1j * tau[m], t[m], b[m])
    return out if out.ndim else complex(out)


def fresnel_partial(k, tau, t):
    """``I(tau, t, k)``; negative k integrates backwards from 0."""
    k, tau, t = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (k, tau, t)))
    sign = np.where(k < 0, -1.0, 1.0)
    # int_0^{-K} f(k') dk' = -int_0^K f(-u) du, and f(-u) has tau -> -tau
    val = kernel_ell(np.where(k < 0, -tau, tau), np.zeros_like(k), t, np.abs(k))
    out = sign * np.asarray(val)
    return out if out.ndim else complex(out)


def double_kernel_L(x, y, t, s, b):
    """``L(x, y, t, s; b) = 2 pi l(0; x + y, -(t - s), b)``."""
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if np.any(x < 0) or np.any(y < 0):
        raise DomainError("double_kernel_L needs x, y >= 0")
    t, s = np.asarray(t, dtype=float), np.asarray(s, dtype=float)
    return 2 * np.pi * kernel_ell(0.0, x + y, -(t - s), b)


# ------------------------------------------------------------ quadrature oracles

def kernel_ell_quad(tau: float, x: float, t: float, b: float, shrink: float = 1.0) -> complex:
    """Composite Gauss-Legendre evaluation of ``l``; the damped tail is cut where
    exp(-k x) falls below double precision."""
    if b <= 0:
        return 0j
    top = min(b, DAMPED_CUTOFF / x) if x > 0 else b
    nodes, w = oscillatory_nodes(0.0, top, 2 * abs(t), max(abs(tau), x), shrink)
    return complex(np.sum(w * np.exp(-nodes * x + 1j * (t * nodes - tau) * nodes)))


def fresnel_partial_quad(k: float, tau: float, t: float, shrink: float = 1.0) -> complex:
    if k < 0:
        return -kernel_ell_quad(-tau, 0.0, t, -k, shrink)
    return kernel_ell_quad(tau, 0.0, t, k, shrink)


# ------------------------------------------------------------------ scans

@dataclass
class ScanConfig:
    tau_max: float = 50.0
    tau_n: int = 101
    t_min: float = 1e-2
    t_max: float = 10.0
    t_n: int = 25
    x_values: Sequence[float] = (0.0, 0.1, 1.0, 10.0)
    b_values: Sequence[float] = (1e2, 1e3, 1e4)
    k_max: float = 100.0
    k_n: int = 201
    lemmas: Sequence[str] = ("4.1", "4.2", "4.3")

    def refined(self, factor: int = 2) -> "ScanConfig":
        """Double (by default) every continuous scan grid; node sets stay nested."""
        def more(n):
            return (n - 1) * factor + 1 if n > 1 else n
        return ScanConfig(self.tau_max, more(self.tau_n), self.t_min, self.t_max,
                          more(self.t_n), tuple(self.x_values), tuple(self.b_values),
                          self.k_max, more(self.k_n), tuple(self.lemmas))

    @property
    def taus(self):
        return np.linspace(-self.tau_max, self.tau_max, self.tau_n) if self.tau_n else np.zeros(0)

    @property
    def ts(self):
        if self.t_n == 0:
            return np.zeros(0)
        return np.geomspace(self.t_min, self.t_max, self.t_n)

    @property
    def ks(self):
        return np.linspace(0.0, self.k_max, self.k_n) if self.k_n else np.zeros(0)


@dataclass
class DecayReport:
    """Measured sup of sqrt|t| * |kernel| for one lemma.

    ``sup_constant`` is the sup on the base grid, ``refined_constant`` on the
    refined grid; ``b_constants`` the sup per truncation b and
    ``b_doubling_change`` the largest relative change when every b is doubled.
    """

    lemma: str
    sup_constant: Optional[float] = None
    refined_constant: Optional[float] = None
    b_constants: Dict[float, float] = field(default_factory=dict)
    b_doubling_change: Optional[float] = None
    grid: dict = field(default_factory=dict)
    trace: List[tuple] = field(default_factory=list)   # (t, sup over the other axes)

    @property
    def refinement_ratio(self) -> Optional[float]:
        if self.sup_constant in (None, 0) or self.refined_constant is None:
            return None
        return self.refined_constant / self.sup_constant

    @property
    def converged(self) -> bool:
        r = self.refinement_ratio
        return r is not None and 0.5 <= r <= 2.0

    def summary(self) -> str:
        if self.sup_constant is None:
            return f"lemma {self.lemma}: empty scan"
        parts = [f"lemma {self.lemma}: sup={self.sup_constant:.6g}"]
        if self.refinement_ratio is not None:
            parts.append(f"refinement_ratio={self.refinement_ratio:.6f}")
        if self.b_doubling_change is not None:
            parts.append(f"b_doubling_change={self.b_doubling_change:.3e}")
        return " ".join(parts)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["lemma", "t", "sup_sqrt_t_abs"])
        for t, v in self.trace:
            w.writerow([self.lemma, repr(float(t)), repr(float(v))])
        return buf.getvalue()


def _sup_41(cfg: ScanConfig):
    taus, ts, ks = cfg.taus, cfg.ts, cfg.ks
    per_t = np.zeros(ts.size)
    for i, t in enumerate(ts):
        K, TAU = np.meshgrid(ks, taus, indexing="ij")
        per_t[i] = math.sqrt(t) * np.max(np.abs(fresnel_partial(K, TAU, t)))
    return per_t


def _sup_42(cfg: ScanConfig, b_values):
    taus, ts = cfg.taus, cfg.ts
    per_b = {}
    for b in b_values:
        per_t = np.zeros(ts.size)
        for i, t in enumerate(ts):
            X, TAU = np.meshgrid(np.asarray(cfg.x_values, float), taus, indexing="ij")
            per_t[i] = math.sqrt(t) * np.max(np.abs(kernel_ell(TAU, X, t, b)))
        per_b[b] = per_t
    return per_b


def _sup_43(cfg: ScanConfig, b_values):
    # L depends on x + y and t - s only; scan x, y over the x set and both signs of t - s
    xs = np.asarray(cfg.x_values, float)
    sums = np.unique(np.add.outer(xs, xs).ravel())
    per_b = {}
    for b in b_values:
        per_t = np.zeros(cfg.ts.size)
        for i, d in enumerate(cfg.ts):
            vals = np.abs(double_kernel_L(sums, 0.0, np.array([[d], [-d]]), 0.0, b))
            per_t[i] = math.sqrt(d) * np.max(vals)
        per_b[b] = per_t
    return per_b


def _lemma_report(lemma, base_fn, cfg, refined_cfg, b_values):
    if cfg.t_n == 0 or cfg.tau_n == 0 and lemma != "4.3":
        return DecayReport(lemma)
    grid = {"tau_n": cfg.tau_n, "t_n": cfg.t_n, "k_n": cfg.k_n,
            "x_values": list(cfg.x_values), "b_values": list(b_values)}
    if lemma == "4.1":
        coarse = base_fn(cfg)
        fine = base_fn(refined_cfg)
        rep = DecayReport(lemma, float(coarse.max()), float(fine.max()), grid=grid)
        rep.trace = list(zip(refined_cfg.ts, fine))
        return rep
    coarse = base_fn(cfg, b_values)
    fine = base_fn(refined_cfg, b_values)
    doubled = base_fn(cfg, [2 * b for b in b_values])
    sup_c = max(float(v.max()) for v in coarse.values())
    sup_f = max(float(v.max()) for v in fine.values())
    b_consts = {float(b): float(v.max()) for b, v in coarse.items()}
    change = max(abs(float(doubled[2 * b].max()) / b_consts[float(b)] - 1) for b in b_values)
    rep = DecayReport(lemma, sup_c, sup_f, b_consts, change, grid)
    envelope = np.max(np.vstack(list(fine.values())), axis=0)
    rep.trace = list(zip(refined_cfg.ts, envelope))
    return rep


def decay_scan(config: Optional[ScanConfig] = None, refine: int = 2) -> List[DecayReport]:
    """Sup constants for each requested lemma on the base grid and its ``refine``-fold refinement."""
    cfg = config or ScanConfig()
    fine = cfg.refined(refine)
    funcs = {"4.1": _sup_41, "4.2": _sup_42, "4.3": _sup_43}
    reports = []
    for lemma in cfg.lemmas:
        if lemma not in funcs:
            raise DomainError(f"unknown lemma {lemma!r}; choose from {sorted(funcs)}")
        reports.append(_lemma_report(lemma, funcs[lemma], cfg, fine, list(cfg.b_values)))
    return reports


# ------------------------------------------------- dispersive decay of u1

U1_R_VALUES = (2, 4, 8, math.inf)


def _conjugate(r):
    return 1.0 if r == math.inf else r / (r - 1)


def _r_label(r):
    return "inf" if r == math.inf else f"{r:g}"


def _lp(values, step, p):
    a = np.abs(values)
    if p == math.inf:
        return float(a.max()) if a.size else 0.0
    return float((np.sum(a ** p) * step) ** (1 / p))


@dataclass
class U1DecayReport:
    """``t^{1/2 - 1/r} |u1(., t)|_{L^r(R+)} / |H1|_{L^{r'}(R)}`` per member, r and t.

    r = inf is the pointwise dispersive bound against ``|H1|_{L^1}``; r = 2 is
    the Laplace-transform L^2 bound (no t-weight).
    """

    ts: np.ndarray
    r_values: tuple
    members: List[int]
    ratios: Dict[float, np.ndarray]           # r -> (members, ts)
    h1_norms: Dict[float, np.ndarray]         # r -> |H1|_{L^{r'}} per member

    def constant(self, r) -> float:
        return float(self.ratios[r].max()) if self.ratios[r].size else 0.0

    def max_over_median(self, r=math.inf) -> np.ndarray:
        """Per member: max over t divided by median over t."""
        v = self.ratios[r]
        return v.max(axis=1) / np.median(v, axis=1)

    def summary(self) -> str:
        lines = []
        for r in self.r_values:
            mm = self.max_over_median(r)
            lines.append(f"u1 r={_r_label(r)}: C={self.constant(r):.6g} "
                         f"max/median over t: worst={mm.max():.4g} median={np.median(mm):.4g}")
        return "\n".join(lines)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["member", "r", "t", "ratio"])
        for r in self.r_values:
            for i, m in enumerate(self.members):
                for t, v in zip(self.ts, self.ratios[r][i]):
                    w.writerow([m, _r_label(r), repr(float(t)), repr(float(v))])
        return buf.getvalue()


def u1_decay_check(signals, ts=None, r_values: Sequence = U1_R_VALUES,
                   x_near: float = 20.0, dx_near: float = 0.01, x_far: float = 400.0,
                   dx_far: float = 0.5, members: Sequence[int] = None) -> U1DecayReport:
    """Measure the u1 decay bounds for Dirichlet boundary signals.

    u1 is non-oscillatory in x (a Laplace transform), so it is sampled finely on
    [0, x_near] and coarsely on [x_near, x_far]; it decays like x^-2 beyond.
    H1 on the whole line comes from one inverse FFT of its one-sided transform.
    """
    from .signals import Grid
    from .utm import BoundaryKind, build_H1, evaluate_u1, one_sided_inverse

    ts = np.geomspace(1e-2, 10.0, 25) if ts is None else np.asarray(ts, float)
    r_values = tuple(r_values)
    signals = list(signals)
    members = list(range(len(signals))) if members is None else list(members)
    ratios = {r: np.zeros((len(signals), ts.size)) for r in r_values}
    h1n = {r: np.zeros(len(signals)) for r in r_values}
    near = Grid(0.0, dx_near, int(round(x_near / dx_near)) + 1)
    far = Grid(x_near, dx_far, int(round((x_far - x_near) / dx_far)) + 1)
    for i, h in enumerate(signals):
        H1 = build_H1(h, BoundaryKind.DIRICHLET)
        K = H1.meta["K_max"]
        if K <= 0:
            continue
        step = min(0.05, math.pi / (4 * K))
        prof = one_sided_inverse(H1.sampler, K, step, 4000.0)
        rows = []
        for t in ts:
            tg = Grid(float(t), 1.0, 1)
            a = evaluate_u1(H1, near, tg).values[0]
            b = evaluate_u1(H1, far, tg).values[0]
            rows.append((a, b))
        for r in r_values:
            hn = _lp(prof.samples, step, _conjugate(r))
            h1n[r][i] = hn
            for j, t in enumerate(ts):
                a, b = rows[j]
                if r == math.inf:
                    un = max(_lp(a, dx_near, r), _lp(b, dx_far, r))
                else:
                    # trapezoid on both pieces, which share the node x_near
                    wa = np.full(a.size, dx_near)
                    wa[[0, -1]] *= 0.5
                    wb = np.full(b.size, dx_far)
                    wb[[0, -1]] *= 0.5
                    un = float((np.sum(wa * np.abs(a) ** r) + np.sum(wb * np.abs(b) ** r)) ** (1 / r))
                ratios[r][i, j] = t ** (0.5 - (0 if r == math.inf else 1 / r)) * un / hn
    return U1DecayReport(ts, r_values, members, ratios, h1n)
