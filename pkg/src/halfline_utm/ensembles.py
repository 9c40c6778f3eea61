"""Seeded ensembles of compactly supported boundary signals.

Members are analytic functions of t, so the same member can be sampled on
any grid and placed in any window [0, T'): that is what the refinement and
T'-sweep stability gates compare. Member ``i`` of a seed is drawn from its
own generator, so an ensemble of 50 is the first 50 members of the
ensemble of 200.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np

from .profiles import bump, time_grid
from .signals import DomainError, SpaceProfile, TimeSignal

FAMILIES = ("bump", "chirp", "noise")
MIN_WIDTH, MAX_WIDTH = 0.4, 0.8     # absolute support widths
EDGE_MARGIN = 0.05


@dataclass(frozen=True)
class BoundaryMember:
    """One ensemble member; ``position`` in [0, 1] places it inside [0, T')."""

    family: str
    index: int
    width: float
    position: float
    amplitude: complex
    params: dict = field(default_factory=dict)

    def support(self, T_prime: float):
        room = T_prime - self.width - 2 * EDGE_MARGIN * T_prime
        if room < 0:
            raise DomainError(f"member of width {self.width:.3g} does not fit in [0, {T_prime})")
        a = EDGE_MARGIN * T_prime + self.position * room
        return a, a + self.width

    def __call__(self, t, T_prime: float):
        t = np.asarray(t, dtype=float)
        a, b = self.support(T_prime)
        c = 0.5 * (a + b)
        s = t - c
        p = self.params
        window = bump(t, a, b)
        if self.family == "bump":
            wave = np.exp(1j * p["omega"] * s)
        elif self.family == "chirp":
            wave = np.exp(-s * s / (2 * p["sigma"] ** 2) + 1j * (p["omega"] * s + p["rate"] * s * s))
        elif self.family == "noise":
            wave = np.exp(1j * (np.multiply.outer(s, p["freqs"]) + p["phases"])) @ p["weights"]
        else:
            raise DomainError(f"unknown family {self.family!r}")
        return self.amplitude * window * wave

    def sample(self, T_prime: float, dt: float) -> TimeSignal:
        """Samples on [0, T'] (the last sample lies outside the support)."""
        t = time_grid(T_prime, dt)
        v = self(t, T_prime)
        v[t >= self.support(T_prime)[1]] = 0
        return TimeSignal(v, 0.0, dt)


def _draw(family, index, rng) -> BoundaryMember:
    width = rng.uniform(MIN_WIDTH, MAX_WIDTH)
    position = rng.uniform(0.0, 1.0)
    amplitude = complex(np.exp(1j * rng.uniform(0, 2 * np.pi)) * rng.uniform(0.5, 2.0))
    if family == "bump":
        params = {"omega": rng.uniform(-8.0, 8.0)}
    elif family == "chirp":
        params = {"omega": rng.uniform(-6.0, 6.0), "rate": rng.uniform(-30.0, 30.0),
                  "sigma": rng.uniform(0.15, 0.3) * width}
    elif family == "noise":
        m = 8
        weights = rng.normal(size=m) / math.sqrt(m)
        params = {"freqs": rng.uniform(-15.0, 15.0, m), "phases": rng.uniform(0, 2 * np.pi, m),
                  "weights": weights.astype(complex)}
    else:
        raise DomainError(f"unknown family {family!r}")
    return BoundaryMember(family, index, width, position, amplitude, params)


def boundary_ensemble(size: int, seed: int = 0,
                      families: Sequence[str] = FAMILIES) -> List[BoundaryMember]:
    """``size`` members cycling through ``families``; nested in ``size``."""
    if size < 0:
        raise DomainError("ensemble size must be >= 0")
    for f in families:
        if f not in FAMILIES:
            raise DomainError(f"unknown family {f!r}; choose from {FAMILIES}")
    out = []
    for i in range(size):
        rng = np.random.default_rng([seed, i])
        out.append(_draw(families[i % len(families)], i, rng))
    return out


def initial_ensemble(size: int, x_grid, seed: int = 0) -> List[SpaceProfile]:
    """Smooth, rapidly decaying whole-line data for the Cauchy checks."""
    out = []
    x = x_grid.points
    for i in range(size):
        rng = np.random.default_rng([seed, 10_000 + i])
        c = rng.uniform(-2.0, 2.0)
        w = rng.uniform(0.5, 1.5)
        k0 = rng.uniform(-3.0, 3.0)
        amp = np.exp(1j * rng.uniform(0, 2 * np.pi))
        out.append(SpaceProfile(amp * np.exp(-((x - c) / w) ** 2 / 2 + 1j * k0 * x),
                                x_grid.start, x_grid.step, "full_line"))
    return out
