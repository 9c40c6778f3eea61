"""Ensemble experiments turning the half-line estimates into boundedness reports.

A "≲" statement has no testable constant, so boundedness is operationalised
as stability: the maximum ratio ``numerator / denominator`` over a seeded
ensemble may change by less than ``DRIFT_LIMIT`` under (a) ensemble
enrichment, (b) changing T' and (c) refining every grid by two.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Union

import numpy as np

from .cauchy import duhamel, free_evolution
from .extension import reflect_past_end
from .ensembles import BoundaryMember, boundary_ensemble
from .profiles import smooth_step_down
from .signals import (DomainError, Field2D, Grid, NormSpec, NumericalWarning, SpaceProfile,
                      TimeSignal)
from .spectral import homogeneous_sobolev_norm, mixed_norm, sobolev_norm
from .utm import (BoundaryKind, BoundarySpectrum, neumann_inhomogeneous_solve, utm_solve)

DRIFT_LIMIT = 2.0
T_PRIME_SPREAD = 0.25      # informational: T'-independence within 25%
THEOREMS = ("3.4", "3.5h", "3.5i")
PROBES = (0.0, 0.1, 1.0, 10.0)


@dataclass(frozen=True)
class Resolution:
    """Desk resolution: boundary sampling dt, output slices on [0, T'] and dx."""

    dt: float = 0.0025
    n_t: int = 101
    dx: float = 0.04
    energy_fraction: float = 1e-8   # spectral energy allowed to leave the x-window

    def refined(self, factor: int = 2) -> "Resolution":
        return Resolution(self.dt / factor, (self.n_t - 1) * factor + 1, self.dx / factor,
                          self.energy_fraction)


@dataclass
class Gate:
    """Drift of the max ratio between a base and a variant run.

    One-sided gates only count growth (a shrinking ratio cannot signal an
    unbounded constant); two-sided gates count change in either direction.
    """

    name: str
    base: float
    variant: float
    limit: float = DRIFT_LIMIT
    one_sided: bool = False

    @property
    def drift(self) -> float:
        lo, hi = sorted((self.base, self.variant))
        if self.one_sided:
            lo, hi = self.base, max(self.base, self.variant)
        if lo <= 0:
            return math.inf if hi > 0 else 1.0
        return hi / lo

    @property
    def passed(self) -> bool:
        return self.drift < self.limit


@dataclass
class RatioReport:
    """Per-sample ratios for one estimate, norm spec and T'."""

    theorem: str
    spec: NormSpec
    T_prime: float
    variant: str
    members: List[int]
    families: List[str]
    numerators: np.ndarray
    denominators: np.ndarray
    gates: List[Gate] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @property
    def ensemble_size(self) -> int:
        return len(self.members)

    @property
    def ratios(self) -> np.ndarray:
        num, den = np.asarray(self.numerators), np.asarray(self.denominators)
        out = np.zeros(num.shape)
        nz = den > 0
        out[nz] = num[nz] / den[nz]
        return out

    @property
    def max_ratio(self) -> float:
        return float(np.max(self.ratios)) if self.ensemble_size else 0.0

    @property
    def median_ratio(self) -> float:
        return float(np.median(self.ratios)) if self.ensemble_size else 0.0

    @property
    def finite(self) -> bool:
        r = self.ratios
        return bool(np.all(np.isfinite(r)) and np.all(r[np.asarray(self.denominators) > 0] > 0))

    @property
    def stable(self) -> bool:
        return self.finite and all(g.passed for g in self.gates)

    def summary(self) -> str:
        head = (f"theorem {self.theorem} [{self.variant}] {self.spec.label()} T'={self.T_prime:g} "
                f"n={self.ensemble_size} max={self.max_ratio:.6g} median={self.median_ratio:.6g}")
        parts = [head]
        for g in self.gates:
            kind = "growth" if g.one_sided else "drift"
            parts.append(f"  gate {g.name}: {g.base:.6g} -> {g.variant:.6g} {kind}={g.drift:.4f} "
                         f"{'ok' if g.passed else 'UNSTABLE'}")
        if "t_prime_max" in self.meta:
            spread = self.meta["t_prime_spread"]
            parts.append(f"  T' maxima {self.meta['t_prime_max']} spread={spread:.3f} "
                         f"({'within' if spread < T_PRIME_SPREAD else 'outside'} 25%)")
        parts.append(f"  stable={self.stable}")
        return "\n".join(parts)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["theorem", "variant", "spec", "T_prime", "member", "family",
                    "numerator", "denominator", "ratio"])
        for i, fam, n, d, r in zip(self.members, self.families, self.numerators,
                                   self.denominators, self.ratios):
            w.writerow([self.theorem, self.variant, self.spec.label(), repr(float(self.T_prime)),
                        i, fam, repr(float(n)), repr(float(d)), repr(float(r))])
        return buf.getvalue()


# ------------------------------------------------------------ spec checks

def _check_spec(spec: NormSpec, theorem: str):
    if not spec.admissible:
        raise DomainError(f"({spec.lam}, {spec.r}) is not an admissible pair")
    if theorem == "3.5i" and spec.s < 0.5:
        raise DomainError("the inhomogeneous Neumann estimate needs s >= 1/2")


def _as_specs(spec) -> List[NormSpec]:
    return [spec] if isinstance(spec, NormSpec) else list(spec)


# --------------------------------------------------------------- solving

def _window(h: TimeSignal, T_prime: float, res: Resolution):
    """x-window long enough that the escaping energy fraction is below the tolerance."""
    spec = BoundarySpectrum(h)
    k = np.linspace(0.0, spec.k_cap, 4001)
    e = (1 + k * k) * (np.abs(spec(k * k)) ** 2 + np.abs(spec(-k * k)) ** 2)
    cum = np.cumsum(e)
    if cum[-1] == 0:
        k_eff = 1.0
    else:
        k_eff = float(k[min(np.searchsorted(cum, (1 - res.energy_fraction) * cum[-1]), k.size - 1)])
    X = 5.0 + 2.2 * k_eff * T_prime
    n_x = int(math.ceil(X / res.dx)) + 1
    return Grid(0.0, res.dx, n_x), Grid(0.0, T_prime / (res.n_t - 1), res.n_t)


def _solve(h: TimeSignal, theorem: str, T_prime: float, res: Resolution):
    xg, tg = _window(h, T_prime, res)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", NumericalWarning)
        if theorem == "3.4":
            dec = utm_solve(h, BoundaryKind.DIRICHLET, xg, tg)
        elif theorem == "3.5h":
            dec = utm_solve(h, BoundaryKind.NEUMANN, xg, tg)
        elif theorem == "3.5i":
            dec = neumann_inhomogeneous_solve(h, T_prime, xg, tg)
        else:
            raise DomainError(f"unknown theorem {theorem!r}; choose from {THEOREMS}")
    return dec.u, [str(w.message) for w in caught]


def _numerator(u: Field2D, spec: NormSpec, theorem: str, T_prime: float) -> float:
    if theorem == "3.5h":
        return mixed_norm(u, spec, homogeneous=True)
    val = mixed_norm(u, spec)
    return val / (1 + T_prime) if theorem == "3.5i" else val


def _denominator(h: TimeSignal, spec: NormSpec, theorem: str) -> float:
    if theorem == "3.4":
        return sobolev_norm(h, (2 * spec.s + 1) / 4)
    if theorem == "3.5h":
        return homogeneous_sobolev_norm(h, (2 * spec.s - 1) / 4)
    return sobolev_norm(h, (2 * spec.s - 1) / 4)


def ratio_table(members: Sequence[BoundaryMember], theorem: str, specs: Sequence[NormSpec],
                T_prime: float, resolution: Optional[Resolution] = None) -> List[RatioReport]:
    """One solve per member, every spec measured on it."""
    res = resolution or Resolution()
    specs = list(specs)
    for s in specs:
        _check_spec(s, theorem)
    num = np.zeros((len(specs), len(members)))
    den = np.zeros_like(num)
    warns = []
    for j, m in enumerate(members):
        h = m.sample(T_prime, res.dt)
        u, w = _solve(h, theorem, T_prime, res)
        warns.extend(f"member {m.index}: {msg}" for msg in w)
        for i, s in enumerate(specs):
            num[i, j] = _numerator(u, s, theorem, T_prime)
            den[i, j] = _denominator(h, s, theorem)
    variant = {"3.4": "dirichlet", "3.5h": "neumann-homogeneous",
               "3.5i": "neumann-inhomogeneous"}[theorem]
    out = []
    for i, s in enumerate(specs):
        out.append(RatioReport(theorem, s, T_prime, variant, [m.index for m in members],
                               [m.family for m in members], num[i], den[i],
                               meta={"warnings": list(warns), "resolution": res}))
    return out


def strichartz_ratio_dirichlet(ensemble: Sequence[BoundaryMember],
                               spec: Union[NormSpec, Sequence[NormSpec]], T_prime: float,
                               resolution: Optional[Resolution] = None):
    """``|u|_{L^lam(0,T'; W^{s,r})} / |h|_{H^{(2s+1)/4}}`` per member."""
    reps = ratio_table(ensemble, "3.4", _as_specs(spec), T_prime, resolution)
    return reps[0] if isinstance(spec, NormSpec) else reps


def strichartz_ratio_neumann(ensemble: Sequence[BoundaryMember],
                             spec: Union[NormSpec, Sequence[NormSpec]], T_prime: float,
                             variant: str = "homogeneous",
                             resolution: Optional[Resolution] = None):
    """Homogeneous: ``|u|_{L^lam Wdot^{s,r}} / |h|_{Hdot^{(2s-1)/4}}``;
    inhomogeneous: ``|u|_{L^lam W^{s,r}} / ((1+T') |h|_{H^{(2s-1)/4}})``, s >= 1/2."""
    theorem = {"homogeneous": "3.5h", "inhomogeneous": "3.5i"}.get(variant)
    if theorem is None:
        raise DomainError("variant must be 'homogeneous' or 'inhomogeneous'")
    reps = ratio_table(ensemble, theorem, _as_specs(spec), T_prime, resolution)
    return reps[0] if isinstance(spec, NormSpec) else reps


# ----------------------------------------------------------- stability

@dataclass(frozen=True)
class SuiteConfig:
    seed: int = 0
    base_size: int = 50
    enriched_size: int = 200
    T_primes: Sequence[float] = (1.0, 2.0, 4.0)
    resolution: Resolution = Resolution()


def stability_suite(theorem: str, specs: Sequence[NormSpec],
                    config: Optional[SuiteConfig] = None) -> List[RatioReport]:
    """Base reports (``base_size`` members, first T') with the three gates attached."""
    cfg = config or SuiteConfig()
    specs = list(specs)
    for s in specs:
        _check_spec(s, theorem)
    if not specs:
        return []
    T0 = cfg.T_primes[0]
    full = boundary_ensemble(max(cfg.enriched_size, cfg.base_size), cfg.seed)
    enriched = ratio_table(full, theorem, specs, T0, cfg.resolution)
    nb = cfg.base_size
    base = [replace(r, members=r.members[:nb], families=r.families[:nb],
                    numerators=r.numerators[:nb], denominators=r.denominators[:nb],
                    gates=[], meta=dict(r.meta)) for r in enriched]
    members = full[:nb]
    sweeps = {T0: base}
    for Tp in cfg.T_primes[1:]:
        sweeps[Tp] = ratio_table(members, theorem, specs, Tp, cfg.resolution)
    refined = ratio_table(members, theorem, specs, T0, cfg.resolution.refined())
    for i, rep in enumerate(base):
        rep.gates.append(Gate(f"ensemble {nb}->{len(full)}", rep.max_ratio,
                              enriched[i].max_ratio, one_sided=True))
        maxima = {Tp: sweeps[Tp][i].max_ratio for Tp in cfg.T_primes}
        rep.gates.append(Gate("T' sweep " + ",".join(f"{t:g}" for t in cfg.T_primes),
                              rep.max_ratio, max(maxima.values()), one_sided=True))
        rep.gates.append(Gate("grid x2", rep.max_ratio, refined[i].max_ratio))
        lo, hi = min(maxima.values()), max(maxima.values())
        rep.meta.update({"t_prime_max": {f"{k:g}": round(v, 6) for k, v in maxima.items()},
                         "t_prime_spread": (hi - lo) / hi if hi > 0 else 0.0,
                         "enriched_max": enriched[i].max_ratio,
                         "refined_max": refined[i].max_ratio})
    return base


def scaling_invariance(report_fn, members: Sequence[BoundaryMember], alpha: float = 3.7) -> float:
    """Largest relative change of the ratios when every member is scaled by ``alpha``."""
    scaled = [replace(m, amplitude=m.amplitude * alpha) for m in members]
    a, b = report_fn(members), report_fn(scaled)
    ra, rb = a.ratios, b.ratios
    return float(np.max(np.abs(ra - rb) / np.maximum(np.abs(ra), 1e-300)))


# --------------------------------------------------------- Cauchy checks

@dataclass
class CauchyReport:
    spec: NormSpec
    conservation_defect: float      # max relative change of |v(t)|_{H^s(R)}
    ratios: RatioReport
    meta: dict = field(default_factory=dict)


def cauchy_checks(profiles: Sequence[SpaceProfile], spec: NormSpec, T: float = 1.0,
                  n_t: int = 101, forcing_profiles: Sequence[SpaceProfile] = ()) -> CauchyReport:
    """Free evolution: H^s conservation and ``|v|_{L^lam W^{s,r}(R)} / |y0*|_{H^s}``.

    With ``forcing_profiles`` the Duhamel term of ``f(x,t) = profile(x)`` is
    measured against ``|f|_{L^1(0,T; H^s)}``.
    """
    if not spec.admissible:
        raise DomainError(f"({spec.lam}, {spec.r}) is not an admissible pair")
    tg = Grid(0.0, T / (n_t - 1), n_t)
    nums, dens, defect = [], [], 0.0
    for y in profiles:
        n0 = sobolev_norm(y, spec.s)
        v = free_evolution(y, tg)
        if n0 == 0:
            nums.append(0.0)
            dens.append(0.0)
            continue
        norms = np.array([sobolev_norm(v.slice_at(j), spec.s) for j in range(tg.n)])
        defect = max(defect, float(np.max(np.abs(norms - n0)) / n0))
        nums.append(mixed_norm(v, spec))
        dens.append(n0)
    for f in forcing_profiles:
        F = Field2D(np.repeat(f.samples[None, :], tg.n, axis=0), tg, f.grid, "full_line")
        z = duhamel(F)
        nums.append(mixed_norm(z, spec))
        dens.append(T * sobolev_norm(f, spec.s))
    n = len(nums)
    rep = RatioReport("cauchy", spec, T, "free+duhamel", list(range(n)), ["profile"] * n,
                      np.asarray(nums, float), np.asarray(dens, float))
    return CauchyReport(spec, defect, rep)


# ------------------------------------------------------ trace regularity

@dataclass
class TraceReport:
    s: float
    probes: Sequence[float]
    ratios: np.ndarray          # (members, probes)
    denominators: np.ndarray

    @property
    def sup_ratio(self) -> float:
        return float(np.max(self.ratios)) if self.ratios.size else 0.0

    def per_probe_max(self) -> Dict[float, float]:
        return {p: float(self.ratios[:, j].max()) if self.ratios.size else 0.0
                for j, p in enumerate(self.probes)}


def _restricted_signal(col: np.ndarray, dt: float, T_prime: float,
                      reach: float = 0.25) -> TimeSignal:
    """Samples on [0, T'] continued C^3 past T' and cut off smoothly.

    A zero extension at T' would add a jump (u(x, T') != 0 for x > 0), which is
    not in H^sigma for sigma > 1/2; the smooth continuation is a bounded
    extension operator, so its norm is equivalent to the restriction norm.
    """
    sig = TimeSignal(col, 0.0, dt)
    n_ext = max(4, int(math.ceil(reach * T_prime / dt)))
    ext = reflect_past_end(sig, T_prime, n_ext)
    full = np.concatenate([col, ext, [0.0]])
    tt = dt * np.arange(full.size)
    full = full * smooth_step_down(tt, T_prime, T_prime + n_ext * dt)
    return TimeSignal(full, 0.0, dt)


def trace_regularity_check(members: Sequence[BoundaryMember], s: float, T_prime: float = 1.0,
                           probes: Sequence[float] = PROBES, dt: float = 0.0025,
                           probe_step: float = 0.05) -> TraceReport:
    """``sup_x |u(x, .)|_{H^{(2s+1)/4}(0,T')} / |h|_{H^{(2s+1)/4}}`` over x-probes, Dirichlet.

    Probes must lie on multiples of ``probe_step``; the solution is evaluated
    once per member on that x-grid.
    """
    if s <= 0.5:
        raise DomainError("the trace regularity estimate needs s > 1/2")
    probes = tuple(float(p) for p in probes)
    idx = [int(round(p / probe_step)) for p in probes]
    if any(p < 0 or abs(i * probe_step - p) > 1e-9 for p, i in zip(probes, idx)):
        raise DomainError(f"probes must be non-negative multiples of {probe_step}")
    sigma = (2 * s + 1) / 4
    ratios = np.zeros((len(members), len(probes)))
    dens = np.zeros(len(members))
    n_t = int(round(T_prime / dt)) + 1
    tg = Grid(0.0, dt, n_t)
    xg = Grid(0.0, probe_step, max(idx) + 1 if idx else 1)
    for j, m in enumerate(members):
        h = m.sample(T_prime, dt)
        den = sobolev_norm(h, sigma)
        dens[j] = den
        if den == 0 or not probes:
            continue
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", NumericalWarning)
            u = utm_solve(h, BoundaryKind.DIRICHLET, xg, tg).u.values
        for i, k in enumerate(idx):
            ratios[j, i] = sobolev_norm(_restricted_signal(u[:, k], dt, T_prime), sigma) / den
    return TraceReport(s, probes, ratios, dens)


# -------------------------------------------------------- norm transfer

NORM_TRANSFER = {
    # name: (boundary kind, part, numerator homogeneous, denominator index, denominator homogeneous)
    "dirichlet-H1": ("dirichlet", 1, False, lambda s: (2 * s + 1) / 4, False),
    "dirichlet-H2": ("dirichlet", 2, False, lambda s: (2 * s + 1) / 4, False),
    "neumann-H1": ("neumann", 1, True, lambda s: (2 * s - 1) / 4, True),
    "neumann-extended-H1": ("neumann-extended", 1, False, lambda s: (2 * s - 1) / 4, False),
}
NORM_TRANSFER_SPREAD = 0.25


@dataclass
class NormTransferReport:
    """``|H_i| / |h|`` per member; the extended Neumann path also divides by (1 + T')."""

    relation: str
    s: float
    T_prime: float
    members: List[int]
    numerators: np.ndarray
    denominators: np.ndarray
    normalization: float = 1.0

    @property
    def ratios(self) -> np.ndarray:
        out = np.zeros(self.numerators.shape)
        nz = self.denominators > 0
        out[nz] = self.numerators[nz] / self.denominators[nz] / self.normalization
        return out

    @property
    def constant(self) -> float:
        return float(np.max(self.ratios)) if self.ratios.size else 0.0

    def summary(self) -> str:
        return (f"norm transfer {self.relation} s={self.s:g} T'={self.T_prime:g} "
                f"n={len(self.members)} C={self.constant:.6g}"
                + (f" (divided by 1+T' = {self.normalization:g})" if self.normalization != 1 else ""))


def norm_transfer(members: Sequence[BoundaryMember], relation: str, s: float,
                  T_prime: float = 1.0, dt: float = 0.0025) -> NormTransferReport:
    """Measured ``|H_i|_{H^s}`` (or ``Hdot^s``) against the matching norm of h."""
    from .extension import mean_zero_extension
    from .utm import build_H1, build_H2

    if relation not in NORM_TRANSFER:
        raise DomainError(f"unknown relation {relation!r}; choose from {sorted(NORM_TRANSFER)}")
    kind, part, num_hom, den_index, den_hom = NORM_TRANSFER[relation]
    if relation == "neumann-extended-H1" and s < 0.5:
        raise DomainError("the extended Neumann bound needs s >= 1/2")
    sigma = den_index(s)
    num = np.zeros(len(members))
    den = np.zeros(len(members))
    for j, m in enumerate(members):
        h = m.sample(T_prime, dt)
        src = mean_zero_extension(h, T_prime) if relation == "neumann-extended-H1" else h
        builder = build_H1 if part == 1 else build_H2
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", NumericalWarning)
            H = builder(src, "neumann" if kind.startswith("neumann") else "dirichlet")
        num[j] = homogeneous_sobolev_norm(H, s) if num_hom else sobolev_norm(H, s)
        den[j] = homogeneous_sobolev_norm(h, sigma) if den_hom else sobolev_norm(h, sigma)
    return NormTransferReport(relation, s, T_prime, [m.index for m in members], num, den,
                              1 + T_prime if relation == "neumann-extended-H1" else 1.0)
