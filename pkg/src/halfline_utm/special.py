"""Closed forms for int_0^b exp(-beta k - gamma k^2) dk via the scaled complementary error function."""

from __future__ import annotations

import numpy as np
from scipy.special import erfcx

SQRT_PI = np.sqrt(np.pi)


def gauss_laplace(beta, gamma, b=np.inf):
    """``int_0^b exp(-beta k - gamma k^2) dk`` for Re(gamma) >= 0, gamma != 0.

    Completing the square with ``c = sqrt(gamma)`` (principal branch) gives::

        sqrt(pi)/(2c) * [erfcx(z0) - exp(-gamma b^2 - beta b) erfcx(z0 + c b)],
        z0 = beta / (2c)

    which stays bounded whenever the integrand does (Re beta >= 0 or Re gamma > 0).
    """
    beta, gamma = np.broadcast_arrays(np.asarray(beta, dtype=complex),
                                      np.asarray(gamma, dtype=complex))
    b = np.broadcast_to(np.asarray(b, dtype=float), beta.shape)
    c = np.sqrt(gamma)
    z0 = beta / (2 * c)
    out = erfcx(z0)
    fin = np.isfinite(b)
    if np.any(fin):
        bf = b[fin]
        tail = np.exp(-gamma[fin] * bf * bf - beta[fin] * bf) * erfcx(z0[fin] + c[fin] * bf)
        out = out.astype(complex)
        out[fin] = out[fin] - tail
    return SQRT_PI / (2 * c) * out


def damped_fresnel(beta, t, b):
    """``int_0^b exp(-beta k + i t k^2) dk`` for Re(beta) >= 0, any real t, b > 0.

    Negative t is handled through the conjugate symmetry, t = 0 by the
    elementary exponential integral.
    """
    beta, t, b = np.broadcast_arrays(np.asarray(beta, dtype=complex),
                                     np.asarray(t, dtype=float), np.asarray(b, dtype=float))
    out = np.empty(beta.shape, dtype=complex)
    pos, neg, zero = t > 0, t < 0, t == 0
    if np.any(pos):
        out[pos] = gauss_laplace(beta[pos], -1j * t[pos], b[pos])
    if np.any(neg):
        out[neg] = np.conj(gauss_laplace(np.conj(beta[neg]), 1j * t[neg], b[neg]))
    if np.any(zero):
        bz, Bz = beta[zero], b[zero]
        small = np.abs(bz * Bz) < 1e-8
        val = np.empty(bz.shape, dtype=complex)
        ns = ~small
        val[ns] = -np.expm1(-bz[ns] * Bz[ns]) / bz[ns]
        # series for tiny beta*b
        val[small] = Bz[small] * (1 - bz[small] * Bz[small] / 2 + (bz[small] * Bz[small]) ** 2 / 6)
        out[zero] = val
    return out
