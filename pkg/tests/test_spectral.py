import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from halfline_utm.profiles import bump, signal_from, time_grid
from halfline_utm.signals import (DomainError, Field2D, Grid, NormSpec, ResolutionError,
                                  SpaceProfile, TimeSignal)
from halfline_utm.spectral import (fourier_transform, homogeneous_sobolev_norm,
                                   inverse_fourier_transform, is_admissible, mixed_norm,
                                   sobolev_norm, w_sr_norm)


def gaussian_signal(dt=0.02, L=20.0):
    t = np.arange(-L, L + dt / 2, dt)
    return TimeSignal(np.exp(-t ** 2 / 2), -L, dt)


def test_transform_of_zero_is_zero():
    F = fourier_transform(TimeSignal(np.zeros(64), 0.0, 0.1))
    assert np.all(F.values == 0)


def test_gaussian_transform_closed_form():
    F = fourier_transform(gaussian_signal())
    exact = np.sqrt(2 * np.pi) * np.exp(-F.k ** 2 / 2)
    assert np.max(np.abs(F.values - exact)) < 1e-10


def test_grid_is_symmetric():
    F = fourier_transform(gaussian_signal())
    assert F.values.size % 2 == 1
    assert F.k[0] == pytest.approx(-F.k[-1], rel=1e-13)


def test_round_trip():
    h = signal_from(bump(time_grid(2.0, 0.01), 0.2, 1.7) * np.exp(3j * time_grid(2.0, 0.01)), 0.01)
    back = inverse_fourier_transform(fourier_transform(h), h.t0, len(h))
    assert back.dt == pytest.approx(h.dt)
    assert np.max(np.abs(back.samples - h.samples)) < 1e-10 * np.max(np.abs(h.samples))


def test_support_identity():
    # h_tilde(k^2, T') computed by direct time quadrature equals h_hat(-k^2)
    dt, Tp = 0.005, 1.5
    t = time_grid(Tp, dt)
    h = signal_from(bump(t, 0.1, 1.3) * (1 + 0.5j * t), dt)
    F = fourier_transform(h)
    neg = F.k <= 0
    tau = F.k[neg]
    k = np.sqrt(-tau)
    tilde = np.array([np.sum(np.exp(1j * kk ** 2 * t) * h.samples) * dt for kk in k])
    norm = sobolev_norm(h, 0.0)
    assert np.max(np.abs(tilde - F.values[neg])) < 1e-8 * norm


def test_support_too_coarse():
    with pytest.raises(ResolutionError):
        fourier_transform(TimeSignal([1.0, 1.0, 0.0, 0.0], 0.0, 0.5))


def test_sobolev_zero_and_plancherel():
    h = gaussian_signal()
    assert sobolev_norm(TimeSignal(np.zeros(10), 0, 1), 2.0) == 0.0
    l2 = math.sqrt(np.sum(np.abs(h.samples) ** 2) * h.dt)
    assert sobolev_norm(h, 0.0) == pytest.approx(l2, rel=1e-10)


def test_sobolev_gaussian_s1_against_quadrature():
    # |f|_{H^1}^2 = (1/2pi) int (1+k^2) 2pi exp(-k^2) dk
    exact = math.sqrt(quad(lambda k: (1 + k * k) * np.exp(-k * k), -np.inf, np.inf,
                           epsabs=0, epsrel=1e-12)[0])
    assert sobolev_norm(gaussian_signal(), 1.0) == pytest.approx(exact, rel=1e-8)


def test_sobolev_of_spectral_density_matches():
    h = gaussian_signal()
    F = fourier_transform(h)
    assert sobolev_norm(F, 0.5) == pytest.approx(sobolev_norm(h, 0.5), rel=1e-10)


@settings(max_examples=25, deadline=None)
@given(s1=st.floats(0, 3), s2=st.floats(0, 3), seed=st.integers(0, 10 ** 6))
def test_sobolev_monotone_in_s(s1, s2, seed):
    rng = np.random.default_rng(seed)
    t = time_grid(2.0, 0.01)
    v = sum(rng.normal() * bump(t, a, a + 0.5) for a in rng.uniform(0, 1.4, 3))
    h = signal_from(v * np.exp(1j * rng.uniform(-10, 10) * t), 0.01)
    lo, hi = sorted((s1, s2))
    assert sobolev_norm(h, lo) <= sobolev_norm(h, hi) * (1 + 1e-12)


def test_homogeneous_norm_basics():
    z = TimeSignal(np.zeros(16), 0, 0.1)
    assert homogeneous_sobolev_norm(z, 0.5) == 0.0
    h = gaussian_signal()
    assert homogeneous_sobolev_norm(h, 0.0) == pytest.approx(sobolev_norm(h, 0.0), rel=1e-10)


def test_homogeneous_norm_mean_zero_bump_is_refinement_stable():
    dt = 0.005
    t = time_grid(2.0, dt)
    b = bump(t, 0.2, 1.8)
    h = signal_from(b * np.cos(2 * np.pi * (t - 1.0)) - 0.0, dt)
    h = signal_from(h.samples - np.sum(h.samples) / np.sum(b) * b, dt)  # exact discrete mean zero
    v, d = homogeneous_sobolev_norm(h, -0.25, full_output=True)
    assert d.converged and not d.divergent
    v_fine = homogeneous_sobolev_norm(h, -0.25, pad=64)
    assert v == pytest.approx(v_fine, rel=1e-6)


def test_homogeneous_norm_flags_divergence():
    t = time_grid(2.0, 0.01)
    h = signal_from(bump(t, 0.2, 1.8), 0.01)   # nonzero mean, weight |k|^{-1.2}
    with pytest.warns(UserWarning):
        v, d = homogeneous_sobolev_norm(h, -0.6, full_output=True)
    assert d.divergent and math.isinf(v)


def smooth_profile(domain="half_line", dx=0.01):
    x = np.arange(0, 10 + dx / 2, dx)
    f = bump(x, 2.0, 7.0) * np.exp(1.5j * x)
    return SpaceProfile(f, 0.0, dx, domain), x


@pytest.mark.parametrize("domain", ["half_line", "full_line"])
def test_w_sr_s1_r2_matches_finite_differences(domain):
    f, _ = smooth_profile(domain, dx=0.002)
    fine, x = smooth_profile(domain, dx=0.0002)
    fp = np.gradient(fine.samples, x, edge_order=2)
    expect = math.sqrt(np.sum(np.abs(fine.samples) ** 2 + np.abs(fp) ** 2) * fine.dx)
    assert w_sr_norm(f, 1.0, 2) == pytest.approx(expect, rel=1e-6)


def test_w_sr_trivial_cases():
    f, _ = smooth_profile()
    assert w_sr_norm(f, 0.0, 2) == pytest.approx(sobolev_norm(f, 0.0), rel=1e-10)
    zero = SpaceProfile(np.zeros(20), 0.0, 0.1, "half_line")
    assert w_sr_norm(zero, 0.25, 4) == 0.0
    with pytest.raises(DomainError):
        w_sr_norm(f, 0.0, 1.5)


def test_w_sr_fractional_r2_is_bessel_l2():
    f, _ = smooth_profile("full_line")
    assert w_sr_norm(f, 0.25, 2) == pytest.approx(sobolev_norm(f, 0.25), rel=1e-9)


def test_mixed_norm_trivial_and_homogeneity():
    tg, xg = Grid(0, 0.1, 11), Grid(0, 0.05, 200)
    rng = np.random.default_rng(1)
    vals = rng.normal(size=(11, 200)) + 1j * rng.normal(size=(11, 200))
    vals *= bump(xg.points, 1, 9)
    u = Field2D(vals, tg, xg)
    spec = NormSpec(0.25, 8, 4)
    assert mixed_norm(u * 0, spec) == 0.0
    assert mixed_norm(u * 2, spec) == 2 * mixed_norm(u, spec)
    sup = max(w_sr_norm(u.slice_at(i), 0, 2) for i in range(11))
    assert mixed_norm(u, NormSpec(0, "inf", 2)) == sup
    with pytest.raises(DomainError):
        mixed_norm(u, spec, (0.53, 0.57))


@pytest.mark.parametrize("lam,r,ok", [("inf", 2, True), (8, 4, True), (6, 6, True),
                                      (6, 3, False), (4, 4, False), (4, "inf", True), (2, "inf", False),
                                      (1, 1, False)])
def test_admissibility(lam, r, ok):
    assert is_admissible(lam, r) is ok
