import numpy as np
import pytest

from halfline_utm.extension import (REFLECTION_COEFFS, REFLECTION_SCALES, UnsupportedOrderError,
                                    antiderivative, antiderivative_identity_defect,
                                    extend_field, extend_initial, extension_report,
                                    mean_zero_extension, reflect_past_end)
from halfline_utm.profiles import bump, signal_from, time_grid
from halfline_utm.signals import (ContractError, DomainError, Field2D, Grid, SpaceProfile,
                                  TimeSignal)
from halfline_utm.spectral import sobolev_norm


def half_profile(f, X=12.0, dx=0.01):
    x = np.arange(0, X + dx / 2, dx)
    return SpaceProfile(f(x), 0.0, dx, "half_line")


def random_smooth_profile(rng, X=20.0, dx=0.01):
    def f(x):
        y = np.zeros_like(x, dtype=complex)
        for _ in range(3):
            c, w = rng.uniform(-1, 4), rng.uniform(0.3, 1.5)
            y += (rng.normal() + 1j * rng.normal()) * np.exp(-(x - c) ** 2 / (2 * w * w))
        return y
    return half_profile(f, X, dx)


def test_reflection_moments():
    for m in range(4):
        assert np.sum(REFLECTION_COEFFS * (-REFLECTION_SCALES) ** m) == pytest.approx(1, abs=1e-10)


def test_zero_extends_to_zero():
    y = extend_initial(half_profile(lambda x: 0 * x))
    assert np.all(y.samples == 0)


def test_restriction_is_identity():
    y0 = half_profile(lambda x: np.exp(-x) * (1 + 1j * x))
    y = extend_initial(y0)
    n = y0.samples.size
    assert np.array_equal(y.samples[n - 1:], y0.samples)
    assert y.x[n - 1] == pytest.approx(0.0, abs=1e-12)


def test_exponential_is_continuous_across_zero():
    y0 = half_profile(lambda x: np.exp(-x), dx=0.001)
    y = extend_initial(y0)
    i0 = y0.samples.size - 1
    # one-sided limits from three samples each side by cubic extrapolation
    left = np.polyval(np.polyfit(y.x[i0 - 4:i0], y.samples[i0 - 4:i0].real, 3), 0.0)
    right = y.samples[i0].real
    assert abs(left - right) < 1e-9
    # the reflected branch reproduces the Taylor data: value, slope
    d_left = (y.samples[i0] - y.samples[i0 - 1]) / y0.dx
    d_right = (y.samples[i0 + 1] - y.samples[i0]) / y0.dx
    assert abs(d_left - d_right) < 1e-2


def test_exact_match_at_origin():
    y0 = half_profile(lambda x: np.exp(-x))
    y = extend_initial(y0)
    i0 = y0.samples.size - 1
    assert abs(y.samples[i0] - 1.0) < 1e-12
    # reflected value at -dx matches exp to spline accuracy O(dx^4)
    dx = y0.dx
    assert abs(y.samples[i0 - 1] - np.exp(dx)) < 5e-8


def test_order_limit():
    with pytest.raises(UnsupportedOrderError):
        extend_initial(half_profile(np.exp), s=3.5)


def test_h1_constant_on_random_ensemble():
    rng = np.random.default_rng(2024)
    consts = []
    for _ in range(50):
        y0 = random_smooth_profile(rng)
        consts.append(extension_report(y0, extend_initial(y0), 1.0).bound_constant)
    assert max(consts) <= 5.0
    assert min(consts) >= 1.0 - 1e-9


def test_extension_constant_stable_under_refinement():
    rng = np.random.default_rng(7)
    coarse, fine = [], []
    for _ in range(10):
        seed = rng.integers(1 << 30)
        for dx, out in ((0.02, coarse), (0.01, fine)):
            y0 = random_smooth_profile(np.random.default_rng(seed), dx=dx)
            out.append(extension_report(y0, extend_initial(y0), 1.0).bound_constant)
    assert max(fine) == pytest.approx(max(coarse), rel=0.2)


def test_extend_field_matches_rowwise():
    xg = Grid(0, 0.02, 300)
    tg = Grid(0, 0.1, 3)
    vals = np.array([np.exp(-(xg.points - 1) ** 2) * (1 + j) for j in range(3)])
    f = Field2D(vals, tg, xg)
    F = extend_field(f)
    for j in range(3):
        row = extend_initial(f.slice_at(j))
        assert np.allclose(F.values[j], row.samples, atol=1e-14)


def test_reflect_past_end_continues_polynomials():
    dt = 0.01
    t = time_grid(1.0, dt)
    p = 1 + 2 * t - t ** 2 + 0.5 * t ** 3
    ext = reflect_past_end(TimeSignal(p, 0, dt), 1.0, 20)
    tt = 1.0 + dt * np.arange(1, 21)
    assert np.allclose(ext, 1 + 2 * tt - tt ** 2 + 0.5 * tt ** 3, atol=1e-10)


# ---------------------------------------------------------------- mean zero

def mollified_indicator(dt=1e-3):
    t = time_grid(1.0, dt)
    eps = 0.1
    v = np.zeros_like(t)
    inner = (t > eps) & (t < 1 - eps)
    v[inner] = 1.0
    v = np.convolve(v, bump(np.arange(-eps, eps + dt / 2, dt), -eps / 2, eps / 2), "same")
    v[(t <= 0.01) | (t >= 0.99)] = 0
    return signal_from(v / v.max(), dt)


def test_mean_zero_extension_zero():
    h = TimeSignal(np.zeros(11), 0, 0.1)
    he = mean_zero_extension(h, 1.0)
    assert np.all(he.samples == 0)


def test_mean_zero_extension_contract():
    h = mollified_indicator()
    he = mean_zero_extension(h, 1.0)
    n = len(h)
    assert np.array_equal(he.samples[:n - 1], h.samples[:n - 1])
    assert abs(np.sum(he.samples) * he.dt) < 1e-12 * np.sum(np.abs(h.samples)) * h.dt
    assert he.support_end <= 2 * 1.0 + 1
    H = antiderivative(he)
    late = H.t >= 3.0
    assert np.all(np.abs(H.samples[late]) < 1e-10)


def test_mean_zero_extension_is_linear():
    h1 = mollified_indicator()
    t = h1.t
    h2 = signal_from(bump(t, 0.2, 0.7) * np.exp(5j * t), h1.dt)
    lhs = mean_zero_extension(h1 + 2.0 * h2, 1.0).samples
    rhs = mean_zero_extension(h1, 1.0).samples + 2.0 * mean_zero_extension(h2, 1.0).samples
    assert np.max(np.abs(lhs - rhs)) < 1e-13


def test_mean_zero_extension_errors():
    with pytest.raises(DomainError):
        mean_zero_extension(mollified_indicator(), 0.0)
    with pytest.raises(ContractError):
        mean_zero_extension(mollified_indicator(), 0.5)


def test_antiderivative_of_bump_derivative():
    dt = 1e-3
    t = time_grid(3.0, dt)
    c, w = 1.5, 1.0
    s = (t - c) / w
    B = bump(t, c - w, c + w)
    dB = np.zeros_like(t)
    m = np.abs(s) < 1
    dB[m] = B[m] * (-2 * s[m] / (1 - s[m] ** 2) ** 2) / w
    H = antiderivative(signal_from(dB, dt))
    assert np.max(np.abs(H.samples - B)) < 1e-8


def test_antiderivative_rejects_nonzero_mean():
    with pytest.raises(ContractError):
        antiderivative(mollified_indicator())


def test_antiderivative_zero():
    H = antiderivative(TimeSignal(np.zeros(8), 0, 0.1))
    assert np.all(H.samples == 0)


def test_spectral_identity_of_antiderivative():
    he = mean_zero_extension(mollified_indicator(), 1.0)
    H = antiderivative(he)
    assert antiderivative_identity_defect(he, H) < 1e-6


def test_antiderivative_norm_bound_grows_at_most_linearly():
    # |H|_{H^{(2s+3)/4}} <= C (1+T') |h|_{H^{(2s-1)/4}}; record C over a small ensemble
    rng = np.random.default_rng(11)
    s = 0.5
    consts = {}
    for Tp in (1.0, 2.0, 4.0):
        cs = []
        for _ in range(10):
            dt = 2e-3
            t = time_grid(Tp, dt)
            a = rng.uniform(0.05, 0.5) * Tp
            b = a + rng.uniform(0.2, 0.45) * Tp
            h = signal_from(bump(t, a, b) * np.exp(1j * rng.uniform(-8, 8) * t), dt)
            H = antiderivative(mean_zero_extension(h, Tp))
            cs.append(sobolev_norm(H, (2 * s + 3) / 4) /
                      ((1 + Tp) * sobolev_norm(h, (2 * s - 1) / 4)))
        consts[Tp] = max(cs)
    assert all(np.isfinite(list(consts.values())))
    assert max(consts.values()) / min(consts.values()) < 2.0
