"""Composite Gauss-Legendre panels with oscillation-aware widths."""

from __future__ import annotations

import math

import numpy as np

GL_ORDER = 6
_GL_X, _GL_W = np.polynomial.legendre.leggauss(GL_ORDER)
MAX_PANELS = 2_000_000


def panel_edges(a: float, b: float, phase_rate: float, damping: float = 0.0,
                shrink: float = 1.0) -> np.ndarray:
    """Edges of panels on [a, b] with width <= pi / (4 max(phase_rate*k, damping, 1)) / shrink.

    ``phase_rate * k`` bounds the derivative of a quadratic phase
    ``phase_rate * k^2 / 2``; ``damping`` the rate of an exponential factor.
    """
    if not b > a:
        return np.array([a, a])
    base = math.pi / 4 / shrink
    floor = max(damping, 1.0)
    edges = [a]
    k = a
    # constant-width stretch first, then the sqrt-spaced oscillatory stretch
    k_switch = floor / phase_rate if phase_rate > 0 else math.inf
    if k < k_switch:
        stop = min(b, k_switch)
        n = max(1, int(math.ceil((stop - k) / (base / floor))))
        edges.extend(np.linspace(k, stop, n + 1)[1:])
        k = stop
    if k < b:
        # k_{j+1} = k_j + base/(phase_rate k_j) ~ sqrt(k_j^2 + 2 base j / phase_rate)
        n_est = (b * b - k * k) * phase_rate / (2 * base)
        if n_est > MAX_PANELS:
            raise ValueError(f"quadrature would need ~{n_est:.3g} panels")
        j = np.arange(1, int(math.ceil(n_est)) + 2)
        ks = np.sqrt(k * k + 2 * base * j / phase_rate)
        ks = ks[ks < b]
        edges.extend(ks)
        edges.append(b)
    return np.asarray(edges, dtype=float)


def gl_nodes(edges: np.ndarray):
    """Nodes and weights of the composite rule on consecutive ``edges``."""
    lo, hi = edges[:-1], edges[1:]
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    nodes = (mid[:, None] + half[:, None] * _GL_X[None, :]).ravel()
    weights = (half[:, None] * _GL_W[None, :]).ravel()
    return nodes, weights


def oscillatory_nodes(a, b, phase_rate, damping=0.0, shrink=1.0):
    return gl_nodes(panel_edges(a, b, phase_rate, damping, shrink))
