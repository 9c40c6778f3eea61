import numpy as np
import pytest

from halfline_utm.ensembles import boundary_ensemble, initial_ensemble
from halfline_utm.signals import DomainError, Grid, NormSpec
from halfline_utm.verify import (Gate, Resolution, SuiteConfig, cauchy_checks, ratio_table,
                                 scaling_invariance, stability_suite, strichartz_ratio_dirichlet,
                                 strichartz_ratio_neumann, trace_regularity_check)


@pytest.fixture(scope="module")
def members():
    return boundary_ensemble(4, seed=1)


def test_non_admissible_spec_refused(members):
    with pytest.raises(DomainError):
        strichartz_ratio_dirichlet(members, NormSpec(0, 4, 4), 1.0)
    with pytest.raises(DomainError):
        strichartz_ratio_neumann(members, NormSpec(0.25, 8, 4), 1.0, "inhomogeneous")
    with pytest.raises(DomainError):
        strichartz_ratio_neumann(members, NormSpec(0.5, 8, 4), 1.0, "sideways")


def test_single_member_finite_ratio(members):
    for rep in (strichartz_ratio_dirichlet(members[:1], NormSpec(0, 8, 4), 1.0),
                strichartz_ratio_neumann(members[:1], NormSpec(0.5, 8, 4), 1.0),
                strichartz_ratio_neumann(members[:1], NormSpec(1, 8, 4), 1.0, "inhomogeneous")):
        assert rep.ensemble_size == 1
        assert rep.finite and np.isfinite(rep.max_ratio) and rep.max_ratio > 0


def test_fan_out_one_report_per_spec(members):
    specs = [NormSpec(s, lam, r) for lam, r in [("inf", 2), (6, 6)] for s in (0, 1)]
    reps = ratio_table(members[:2], "3.4", specs, 1.0)
    assert [r.spec for r in reps] == specs
    assert reps[0].to_csv().splitlines()[0].startswith("theorem,variant,spec")
    assert len(reps[0].to_csv().splitlines()) == 3


def test_ratios_scale_invariant(members):
    d = scaling_invariance(lambda m: strichartz_ratio_dirichlet(m, NormSpec(0.25, 8, 4), 1.0),
                           members[:2])
    assert d < 1e-10


def test_energy_ratio_consistent_with_continuity_bound(members):
    # (inf, 2), s = 0: sup_t |u(t)|_{L^2} against |h|_{H^{1/4}} stays O(1)
    rep = strichartz_ratio_dirichlet(members, NormSpec(0, "inf", 2), 1.0)
    assert 0.1 < rep.max_ratio < 10


def test_ratio_converges_under_refinement(members):
    spec = NormSpec(0, 6, 6)
    a = strichartz_ratio_dirichlet(members[:2], spec, 1.0)
    b = strichartz_ratio_dirichlet(members[:2], spec, 1.0, Resolution().refined())
    assert np.allclose(a.ratios, b.ratios, rtol=1e-2)


def test_gate_directions():
    assert Gate("g", 1.0, 0.3).drift == pytest.approx(1 / 0.3)
    assert not Gate("g", 1.0, 0.3).passed
    assert Gate("g", 1.0, 0.3, one_sided=True).passed
    assert not Gate("g", 1.0, 2.5, one_sided=True).passed
    assert Gate("g", 0.0, 0.0).drift == 1.0


def test_small_stability_suite():
    cfg = SuiteConfig(seed=2, base_size=3, enriched_size=6, T_primes=(1.0, 2.0))
    reps = stability_suite("3.4", [NormSpec(0, 8, 4)], cfg)
    assert len(reps) == 1
    rep = reps[0]
    assert rep.ensemble_size == 3 and len(rep.gates) == 3
    assert rep.meta["enriched_max"] >= rep.max_ratio
    assert rep.stable
    assert "stable=True" in rep.summary()
    assert stability_suite("3.4", [], cfg) == []


def test_cauchy_conservation_and_ratios():
    xg = Grid(-40.0, 0.05, 1601)
    prof = initial_ensemble(3, xg, seed=4)
    for spec in (NormSpec(0, 6, 6), NormSpec(1, "inf", 2)):
        rep = cauchy_checks(prof, spec, forcing_profiles=prof[:1])
        assert rep.conservation_defect < 1e-8
        assert rep.ratios.finite
    # (inf, 2) at s: the sup over t of the H^s norm is the conserved norm itself
    rep = cauchy_checks(prof, NormSpec(1, "inf", 2))
    assert np.allclose(rep.ratios.ratios, 1.0, atol=1e-8)


def test_cauchy_ratio_grid_doubling():
    spec = NormSpec(0, 6, 6)
    a = cauchy_checks(initial_ensemble(2, Grid(-40.0, 0.05, 1601)), spec).ratios.ratios
    b = cauchy_checks(initial_ensemble(2, Grid(-40.0, 0.025, 3201)), spec).ratios.ratios
    assert np.allclose(a, b, rtol=0.1)


def test_cauchy_zero_profile():
    from halfline_utm.signals import SpaceProfile
    zero = SpaceProfile(np.zeros(401), -10.0, 0.05, "full_line")
    rep = cauchy_checks([zero], NormSpec(0, 8, 4))
    assert rep.ratios.numerators[0] == 0 and rep.conservation_defect == 0


def test_trace_regularity(members):
    with pytest.raises(DomainError):
        trace_regularity_check(members, 0.5)
    with pytest.raises(DomainError):
        trace_regularity_check(members, 1.0, probes=(0.0, 0.33))
    rep = trace_regularity_check(members[:3], 1.0)
    enriched = trace_regularity_check(members[:3], 1.0,
                                      probes=(0, 0.05, 0.1, 0.2, 0.5, 1, 2, 5, 10))
    assert np.isfinite(rep.sup_ratio)
    assert abs(enriched.sup_ratio / rep.sup_ratio - 1) < 0.15
    # at x = 0 the numerator is the norm of h itself (up to the continuation past T')
    central = [m for m in members if m.support(1.0)[1] < 0.75]
    if central:
        r0 = trace_regularity_check(central, 1.0, probes=(0.0,))
        assert np.allclose(r0.ratios[:, 0], 1.0, rtol=1e-3)


def test_trace_regularity_zero_signal():
    from dataclasses import replace
    m = replace(boundary_ensemble(1)[0], amplitude=0j)
    rep = trace_regularity_check([m], 1.0)
    assert rep.sup_ratio == 0
