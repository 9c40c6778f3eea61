import numpy as np
import pytest

from halfline_utm.crank_nicolson import DomainTooSmallError, FdScheme, crank_nicolson_solve
from halfline_utm.profiles import bump
from halfline_utm.signals import DomainError, SpaceProfile


def gaussian(x, t, c=4.0):
    a = 1 + 2j * t
    return a ** -0.5 * np.exp(-(x - c) ** 2 / (2 * a))


def gaussian_dx(x, t, c=4.0):
    return gaussian(x, t, c) * (-(x - c) / (1 + 2j * t))


def profile(scheme, fn):
    x = scheme.x_grid.points
    return SpaceProfile(fn(x), 0.0, scheme.dx, "half_line")


def test_scheme_metadata():
    s = FdScheme(30.0, 0.02, 0.001)
    assert s.courant == pytest.approx(2.5)
    assert s.potential(np.array([0.0, 23.9]))[1] == 0
    assert s.potential(np.array([30.0]))[0] == pytest.approx(s.layer_strength)
    with pytest.raises(DomainError):
        FdScheme(30.0, -0.02, 0.001)


@pytest.mark.parametrize("kind", ["dirichlet", "neumann"])
def test_zero_data(kind):
    s = FdScheme(10.0, 0.05, 0.01, kind)
    y = crank_nicolson_solve(None, None, None, kind, s, 0.5)
    assert not np.any(y.values)


@pytest.mark.parametrize("kind,trace", [("dirichlet", gaussian), ("neumann", gaussian_dx)])
def test_manufactured_gaussian(kind, trace):
    s = FdScheme(30.0, 0.02, 0.001, kind)
    y = crank_nicolson_solve(profile(s, lambda x: gaussian(x, 0)), None,
                             lambda t: trace(0.0, t), kind, s, 1.0, save_every=10)
    x = s.x_grid.points
    ex = gaussian(x[None, :], y.t[:, None])
    sel = x <= 20
    err = np.linalg.norm((y.values - ex)[:, sel]) / np.linalg.norm(ex[:, sel])
    assert err < 1e-3


def test_self_convergence_order():
    g = lambda t: gaussian(0.0, t)
    sols = []
    for dx, dt in [(0.04, 0.004), (0.02, 0.002), (0.01, 0.001)]:
        s = FdScheme(30.0, dx, dt, "dirichlet")
        y = crank_nicolson_solve(profile(s, lambda x: gaussian(x, 0)), None, g, "dirichlet", s,
                                 1.0, save_every=int(round(0.1 / dt)))
        sols.append(y.values[:, :: int(round(0.04 / dx))][:, :501])
    e1 = np.linalg.norm(sols[0] - sols[1])
    e2 = np.linalg.norm(sols[1] - sols[2])
    assert np.log2(e1 / e2) == pytest.approx(2.0, abs=0.2)


def test_l2_non_increasing_homogeneous_dirichlet():
    s = FdScheme(20.0, 0.02, 0.002, "dirichlet")
    y = crank_nicolson_solve(profile(s, lambda x: gaussian(x, 0, 6.0) * np.exp(2j * x)), None,
                             None, "dirichlet", s, 4.0, save_every=5, check_reflection=False)
    mass = np.sum(np.abs(y.values) ** 2, axis=1)
    assert np.all(np.diff(mass) <= 1e-12 * mass[0])
    assert mass[-1] < 0.5 * mass[0]     # the wave packet left through the layer


@pytest.mark.parametrize("kind", ["dirichlet", "neumann"])
def test_linearity(kind):
    s = FdScheme(20.0, 0.05, 0.005, kind)
    y0a = profile(s, lambda x: gaussian(x, 0, 5.0))
    y0b = profile(s, lambda x: np.exp(-(x - 3) ** 2) * 1j)
    fa = lambda t, x: bump(t, 0.1, 0.4) * np.exp(-(x - 2) ** 2)
    ga = lambda t: bump(t, 0.2, 0.6) * (1 + 1j)
    a = crank_nicolson_solve(y0a, fa, None, kind, s, 0.8).values
    b = crank_nicolson_solve(y0b, None, ga, kind, s, 0.8).values
    y0ab = SpaceProfile(y0a.samples + 2 * y0b.samples, 0.0, s.dx, "half_line")
    ab = crank_nicolson_solve(y0ab, fa, lambda t: 2 * ga(t), kind, s, 0.8).values
    assert np.max(np.abs(ab - a - 2 * b)) < 1e-12 * np.max(np.abs(ab))


def test_domain_too_small_is_detected():
    # fast packet, weak layer: the reflection comes back past the probe
    s = FdScheme(8.0, 0.02, 0.002, "dirichlet", layer_strength=0.5)
    y0 = profile(s, lambda x: np.exp(-(x - 2) ** 2) * np.exp(3j * x))
    with pytest.raises(DomainTooSmallError):
        crank_nicolson_solve(y0, None, None, "dirichlet", s, 3.0)


def test_corner_smoothing_option():
    s = FdScheme(10.0, 0.05, 0.01, "dirichlet", corner_smoothing=True)
    y = crank_nicolson_solve(None, None, lambda t: 1.0, "dirichlet", s, 0.1)
    assert y.values[0, 0] == 0 and y.values[5, 0] == pytest.approx(1.0)
    assert 0 < abs(y.values[2, 0]) < 1


def test_t_must_be_a_multiple_of_dt():
    s = FdScheme(10.0, 0.05, 0.01)
    with pytest.raises(DomainError):
        crank_nicolson_solve(None, None, None, "dirichlet", s, 0.105)
