import dataclasses
import json

import pytest

from specdbl.diagnostics import example_counterexample
from specdbl.fourier import dft, spectrum
from specdbl.groups import FiniteAbelianGroup, random_subset, subgroup_span, sumset
from specdbl.refine import (
    RefineConfig,
    audit_trace,
    final_bound_report,
    refine_theorem1,
    refine_theorem2,
)
from specdbl.regularity import RegularityVerdict


def z2(n):
    return FiniteAbelianGroup((2,) * n)


@pytest.fixture
def plane():
    g = z2(4)
    return g, subgroup_span(g, [(1, 0, 0, 0), (0, 1, 0, 0)])


@pytest.mark.parametrize("run", [refine_theorem1, refine_theorem2])
def test_subgroup_is_a_fixed_point(plane, run):
    _, h = plane
    cfg = RefineConfig(epsilon=0.5, delta=0.3, seed=0)
    result = run(h, cfg)
    assert result.terminated == "finished"
    assert result.certified
    assert len(result.trace) == 1
    step = result.trace[0]
    assert step.index == 0 and step.action == "finish"
    assert step.verdict_status == "regular"
    assert result.a_star == h
    assert result.rho_star == 0.5
    assert result.measured["doubling"] == 1.0
    assert result.measured["spec_size"] == 4
    assert audit_trace(result).ok


def test_example_set_collapses_to_a_subgroup_block():
    ex = example_counterexample(3)
    cfg = RefineConfig(epsilon=0.4, delta=0.3, seed=1)
    result = refine_theorem1(ex.members, cfg)
    assert result.terminated == "finished"
    assert result.certified
    actions = [s.action for s in result.trace]
    assert actions == ["minor", "finish"]
    # the minor lands inside one of the two subgroup halves
    assert result.a_star.size == 7
    assert result.rho_star == 1.0
    assert result.measured["spec_size"] == 8
    assert result.measured["sumset_size"] == 8
    assert result.measured["sumset_size"] < ex.members.group.size
    assert audit_trace(result).ok


def test_example_set_squaring_schedule():
    ex = example_counterexample(3)
    cfg = RefineConfig(epsilon=0.4, delta=0.3, seed=1)
    result = refine_theorem2(ex.members, cfg)
    assert result.terminated == "finished"
    assert result.certified
    assert audit_trace(result).ok
    # squaring schedule reports the K^2-style interim bounds
    assert "k_squared_bound" in result.measured
    assert result.measured["sumset_size"] <= result.measured["k_squared_bound"]


def test_runs_are_deterministic():
    ex = example_counterexample(3)
    cfg = RefineConfig(epsilon=0.4, delta=0.3, seed=7)
    one = refine_theorem1(ex.members, cfg)
    two = refine_theorem1(ex.members, cfg)
    assert one.trace == two.trace
    assert one.a_star == two.a_star
    assert one.measured == two.measured


@pytest.mark.parametrize("orders,size,seed", [
    ((2, 2, 2, 2), 6, 11),
    ((2, 2, 2, 2), 9, 12),
    ((3, 3, 3), 7, 13),
    ((3, 3, 3), 12, 14),
])
@pytest.mark.parametrize("run", [refine_theorem1, refine_theorem2])
def test_trace_invariants_on_random_sets(orders, size, seed, run):
    g = FiniteAbelianGroup(orders)
    a = random_subset(g, size, seed=seed)
    cfg = RefineConfig(epsilon=0.35, delta=0.4, seed=seed)
    result = run(a, cfg)
    assert result.terminated in ("finished", "budget_exhausted", "inconclusive")
    report = audit_trace(result)
    assert report.ok, report.violations
    sizes = [s.a_size for s in result.trace]
    assert sizes == sorted(sizes, reverse=True)
    for s in result.trace:
        if s.action == "minor":
            assert s.rho_next > s.rho
        elif s.action == "growth":
            assert s.rho_next < s.rho
    theorem = result.theorem
    for s in result.trace:
        if s.action == "growth":
            level = cfg.epsilon * s.rho / 2 if theorem == 1 else s.rho**2 / 2
            assert s.rho_next == level


def test_final_spectrum_state_matches_measured():
    ex = example_counterexample(3)
    cfg = RefineConfig(epsilon=0.4, delta=0.3, seed=1)
    result = refine_theorem1(ex.members, cfg)
    table = dft(result.a_star)
    spec = spectrum(table, result.measured["spec_level"])
    assert len(spec) == result.measured["spec_size"]
    plus = sumset(spec.members, spec.members)
    assert len(plus) == result.measured["sumset_size"]


def test_audit_flags_a_tampered_trace(plane):
    _, h = plane
    cfg = RefineConfig(epsilon=0.5, delta=0.3, seed=0)
    result = refine_theorem1(h, cfg)
    assert audit_trace(result).ok

    low = dataclasses.replace(result.trace[0], rho=1e-6, rho_next=1e-6)
    tampered = dataclasses.replace(result, trace=(low,), rho_star=1e-6)
    report = audit_trace(tampered)
    assert not report.ok
    assert any("below the floor" in v for v in report.violations)

    fake_growth = dataclasses.replace(result.trace[0], action="growth")
    tampered = dataclasses.replace(result, trace=(fake_growth,))
    report = audit_trace(tampered)
    assert not report.ok
    assert any("gate held" in v for v in report.violations)

    drifted = dataclasses.replace(result, rho_star=0.25)
    report = audit_trace(drifted)
    assert not report.ok
    assert any("does not match the last step" in v for v in report.violations)

    uncertified = dataclasses.replace(
        result.trace[0], verdict_status="undetermined", certified=False
    )
    tampered = dataclasses.replace(result, trace=(uncertified,))
    report = audit_trace(tampered)
    assert not report.ok
    assert any("certified flag" in v for v in report.violations)


def test_bound_report_round_trips_and_holds(plane):
    _, h = plane
    cfg = RefineConfig(epsilon=0.5, delta=0.3, seed=0)
    result = refine_theorem1(h, cfg)
    report = final_bound_report(result, h)
    assert report.alpha == pytest.approx(0.5)
    assert report.empirical_shrink == 1.0
    assert report.certified_doubling_holds and report.interim_holds
    assert report.certified
    plain = report.to_dict()
    assert json.loads(json.dumps(plain)) == plain


def test_bound_report_requires_a_finished_run():
    ex = example_counterexample(3)
    cfg = RefineConfig(epsilon=0.4, delta=0.3, seed=1, max_iterations=1)
    result = refine_theorem1(ex.members, cfg)
    assert result.terminated == "budget_exhausted"
    with pytest.raises(ValueError, match="finished"):
        final_bound_report(result, ex.members)


def test_undecided_verdict_falls_back_to_the_direct_check(plane, monkeypatch):
    _, h = plane

    def undecided(matrix, lam, budget=(8, 60), seed=0):
        return RegularityVerdict(
            status="undetermined", lam=lam, upper_bound=1.0,
            witness=None, lower_bound=0.0,
        )

    monkeypatch.setattr("specdbl.refine.decide_regularity", undecided)
    cfg = RefineConfig(epsilon=0.5, delta=0.3, seed=0)
    result = refine_theorem1(h, cfg)
    # the subgroup spectrum trivially satisfies the doubling conclusion,
    # so the run finishes without a certificate
    assert result.terminated == "finished"
    assert not result.certified
    assert result.trace[-1].direct_check is True
    assert audit_trace(result).ok


def test_threshold_floor_aborts_honestly(plane):
    _, h = plane
    cfg = RefineConfig(epsilon=1e-9, delta=0.3, seed=0)
    result = refine_theorem1(h, cfg)
    assert result.terminated == "inconclusive"
    assert not result.certified
    assert result.trace[0].action == "abort"
    assert audit_trace(result).ok


def test_config_validation():
    with pytest.raises(ValueError, match="epsilon"):
        RefineConfig(epsilon=0.0, delta=0.3)
    with pytest.raises(ValueError, match="epsilon"):
        RefineConfig(epsilon=1.0, delta=0.3)
    with pytest.raises(ValueError, match="delta"):
        RefineConfig(epsilon=0.4, delta=1.5)
    with pytest.raises(ValueError, match="K"):
        RefineConfig(epsilon=0.4, delta=0.3, k_bound=0.5)
    with pytest.raises(ValueError, match="mode"):
        RefineConfig(epsilon=0.4, delta=0.3, mode="sloppy")
    with pytest.raises(ValueError, match="max_iterations"):
        RefineConfig(epsilon=0.4, delta=0.3, max_iterations=0)


def test_explicit_gate_constant_is_respected(plane):
    _, h = plane
    cfg = RefineConfig(epsilon=0.5, delta=0.3, k_bound=1.0, seed=0)
    result = refine_theorem1(h, cfg)
    assert result.measured["K"] == 1.0
    assert result.terminated == "finished"


def test_empty_set_is_rejected(plane):
    g, _ = plane
    from specdbl.groups import ElementSet

    empty = ElementSet.from_indices(g, [])
    cfg = RefineConfig(epsilon=0.5, delta=0.3)
    with pytest.raises(ValueError, match="nonempty"):
        refine_theorem1(empty, cfg)
