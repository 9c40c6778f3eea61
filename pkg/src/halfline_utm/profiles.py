"""Smooth compactly supported building blocks and the named CLI profiles."""

from __future__ import annotations

import numpy as np

from .signals import DomainError, TimeSignal


def mollifier(s):
    """Standard C-infinity bump exp(-1/(1-s^2)) on (-1, 1), normalised to 1 at s = 0."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    m = np.abs(s) < 1
    out[m] = np.exp(1.0 - 1.0 / (1.0 - s[m] ** 2))
    return out


def bump(t, a, b):
    """Mollifier rescaled to the interval (a, b)."""
    c, w = 0.5 * (a + b), 0.5 * (b - a)
    return mollifier((np.asarray(t, dtype=float) - c) / w)


def smooth_step_down(t, a, b):
    """C-infinity step: 1 for t <= a, 0 for t >= b."""
    t = np.asarray(t, dtype=float)
    s = np.clip((t - a) / (b - a), 0.0, 1.0)

    def psi(x):
        out = np.zeros_like(x)
        m = x > 0
        out[m] = np.exp(-1.0 / x[m])
        return out

    up = psi(s)
    down = psi(1.0 - s)
    return down / (up + down)


def time_grid(t_end, dt, t0=0.0):
    n = int(round((t_end - t0) / dt)) + 1
    return t0 + dt * np.arange(n)


def signal_from(values, dt, t0=0.0):
    """Wrap samples as a TimeSignal, flushing sub-denormal dust to exact zero."""
    v = np.asarray(values, dtype=complex)
    v = np.where(np.abs(v) < 1e-300, 0, v)
    return TimeSignal(v, t0, dt)


def named_boundary_profile(name, T, dt, T_prime=None):
    """Built-in boundary signals supported in [0, T_prime)."""
    T_prime = 1.25 * T if T_prime is None else T_prime
    t = time_grid(T_prime + dt, dt)
    if name == "zero":
        v = np.zeros_like(t)
    elif name == "bump":
        v = bump(t, 0.1 * T, 0.9 * T)
    elif name == "chirp":
        v = bump(t, 0.05 * T, 0.95 * T) * np.exp(1j * (4.0 * t + 6.0 * t ** 2))
    elif name == "pulse":
        v = bump(t, 0.2 * T, 0.6 * T) * np.cos(12.0 * t)
    else:
        raise DomainError(f"unknown profile {name!r}")
    return signal_from(v, dt)
