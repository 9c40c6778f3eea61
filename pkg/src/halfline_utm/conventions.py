"""Sign and normalisation conventions shared by every module.

Fourier transform (time or space variable)::

    f_hat(k) = integral exp(-i k t) f(t) dt
    f(t)     = (1 / 2 pi) integral exp(+i k t) f_hat(k) dk

With this choice the time transform of boundary data supported in [0, T')
satisfies ``h_tilde(k^2, T') = integral_0^T' exp(i k^2 s) h(s) ds = h_hat(-k^2)``
with no extra factors.

Evolution operator: ``P = -i d^2/dx^2`` and the equation is ``y_t + P y = 0``,
so a Fourier mode evolves with the multiplier ``exp(-i k^2 t)``.

Contour for the boundary integral: the boundary of the first quadrant
``{Re k > 0, Im k > 0}`` traversed as the positive imaginary axis from
``i*inf`` down to 0, followed by the positive real axis from 0 to ``+inf``.
With this traversal the imaginary-axis leg produces the exponentially damped
piece ``u1`` and the real-axis leg produces ``u2``.

Sobolev norms carry the Plancherel factor so that ``s = 0`` is the plain L2
norm::

    |f|_{H^s}^2 = (1 / 2 pi) integral (1 + k^2)^s |f_hat(k)|^2 dk
"""

from __future__ import annotations

import numpy as np

FOURIER_SIGN = -1
INVERSE_FACTOR = 1.0 / (2.0 * np.pi)


def propagator_phase(k, t):
    """Free Schrodinger multiplier exp(-i k^2 t)."""
    k = np.asarray(k, dtype=float)
    return np.exp(-1j * np.multiply.outer(np.asarray(t, dtype=float), k * k))


def bessel_weight(k, s):
    return (1.0 + np.asarray(k, dtype=float) ** 2) ** s


_RESTART = 64


def phase_rows(t, q):
    """``exp(i * outer(t, q))`` for real t and q.

    On a uniform t-grid the rows follow from one exact row per block of 64
    and repeated multiplication by ``exp(i dt q)`` (complex products are far
    cheaper than exponentials); round-off stays below ~64 ulp.
    """
    t = np.asarray(t, dtype=float)
    q = np.asarray(q, dtype=float)
    n = t.size
    if n < 3 or not np.allclose(np.diff(t), t[1] - t[0], rtol=1e-12, atol=0.0):
        return np.exp(1j * np.multiply.outer(t, q))
    dt = t[1] - t[0]
    step = np.exp(1j * dt * q)
    out = np.empty((n, q.size), dtype=complex)
    for a in range(0, n, _RESTART):
        out[a] = np.exp(1j * t[a] * q)
        for j in range(a + 1, min(a + _RESTART, n)):
            np.multiply(out[j - 1], step, out=out[j])
    return out
