"""Spectrum statistics: doubling probabilities, closure checks, worked sets."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .fourier import dft, spectrum
from .groups import ElementSet, difference_set, make_group, sumset

__all__ = [
    "DoublingReport",
    "ClosureReport",
    "ExampleSetBundle",
    "SumsetStats",
    "statistical_doubling",
    "high_threshold_closure",
    "example_counterexample",
    "sumset_stats",
]


@dataclass(frozen=True)
class DoublingReport:
    """Probability that a random ordered pair of large characters sums large."""

    epsilon: float
    p: float
    lower_bound: float
    total_pairs: int
    hit_pairs: int
    spec_size: int
    small_spec_size: int
    exact: bool
    sample_count: Optional[int]


def statistical_doubling(
    a: ElementSet,
    eps: float,
    seed: int = 0,
    exact_pair_limit: int = 10**7,
    samples: int = 200_000,
) -> DoublingReport:
    """Measure Pr[g1 + g2 lands in the (eps^2/2)-spectrum] over ordered pairs
    g1, g2 drawn from the eps-spectrum.

    Exhaustive when the pair count fits under exact_pair_limit, otherwise a
    seeded sample (flagged; the exact-mode lower bound eps^2/2 is only
    asserted for exhaustive counts).
    """
    group = a.group
    table = dft(a)
    spec = spectrum(table, eps)
    small = spectrum(table, eps * eps / 2.0)
    members = spec.indices()
    m = members.size
    small_mask = small.members.mask
    coords = group.decode_indices(members)
    lower = eps * eps / 2.0

    if m * m <= exact_pair_limit:
        hits = 0
        for row in coords:
            shifted = group.encode_coords(coords + row)
            hits += int(np.count_nonzero(small_mask[shifted]))
        total = m * m
        p = hits / total
        if p < lower:
            raise AssertionError(
                f"exact doubling probability {p} fell below the bound {lower}"
            )
        return DoublingReport(eps, p, lower, total, hits, m, len(small), True, None)

    rng = np.random.default_rng(seed)
    i = rng.integers(0, m, size=samples)
    j = rng.integers(0, m, size=samples)
    sums = group.encode_coords(coords[i] + coords[j])
    hits = int(np.count_nonzero(small_mask[sums]))
    return DoublingReport(
        eps, hits / samples, lower, samples, hits, m, len(small), False, samples
    )


@dataclass(frozen=True)
class ClosureReport:
    """Whether the eps-spectrum is sumset-closed into the (4*eps-3)-spectrum."""

    epsilon: float
    target_level: float
    ok: bool
    spec_size: int
    target_size: int
    violation: Optional[tuple]


def high_threshold_closure(a: ElementSet, eps: float) -> ClosureReport:
    """For eps > 3/4, check Spec_eps + Spec_eps is contained in Spec_{4*eps-3}."""
    if not 0.75 < eps <= 1.0:
        raise ValueError(f"closure check needs a level in (3/4, 1], got {eps}")
    group = a.group
    table = dft(a)
    spec = spectrum(table, eps)
    target = spectrum(table, 4.0 * eps - 3.0)
    sums = sumset(spec.members, spec.members)
    outside = sums.mask & ~target.members.mask
    if not outside.any():
        return ClosureReport(eps, 4.0 * eps - 3.0, True, len(spec), len(target), None)
    bad = int(np.flatnonzero(outside)[0])
    coords = group.decode_indices(spec.indices())
    witness = None
    for row in coords:
        shifted = group.encode_coords(coords + row)
        hit = np.flatnonzero(shifted == bad)
        if hit.size:
            witness = (tuple(int(v) for v in row), group.decode(int(spec.indices()[hit[0]])))
            break
    return ClosureReport(eps, 4.0 * eps - 3.0, False, len(spec), len(target), witness)


@dataclass(frozen=True)
class ExampleSetBundle:
    """Union of two coordinate planes through 0 in Z_2^(2n), with checks."""

    n: int
    members: ElementSet
    size_ok: bool
    sumset_is_group: bool
    coeffs_ok: bool
    spec04_size: int
    spec04_equals_set: bool
    spec_half_size: int
    valid_threshold_bound: float


def example_counterexample(n: int) -> ExampleSetBundle:
    """The set (Z_2^n x {0}) union ({0} x Z_2^n) inside Z_2^(2n).

    Its sumset is the whole group while its nonzero Fourier coefficients on
    the set itself all equal 2^n - 1 (and -1 everywhere else), so the
    0.4-spectrum reproduces the set exactly once 2^n - 1 >= 0.4 * (2^(n+1)-1),
    which holds from n = 2 on.  At level 1/2 the spectrum collapses to {0}.
    """
    if not 1 <= n <= 10:
        raise ValueError(f"n must lie in [1, 10], got {n}")
    group = make_group([2] * (2 * n))
    half = 1 << n
    idx = sorted(set(range(half)) | {v * half for v in range(half)})
    members = ElementSet.from_indices(group, idx)
    size_ok = len(members) == 2 * half - 1

    total = sumset(members, members)
    sumset_is_group = len(total) == group.size

    table = dft(members)
    expected = np.full(group.size, -1.0)
    expected[members.mask] = half - 1
    expected[0] = len(members)
    coeffs_ok = bool(np.max(np.abs(table.coeffs - expected)) < 1e-9)

    spec04 = spectrum(table, 0.4)
    spec_half = spectrum(table, 0.5)
    return ExampleSetBundle(
        n=n,
        members=members,
        size_ok=size_ok,
        sumset_is_group=sumset_is_group,
        coeffs_ok=coeffs_ok,
        spec04_size=len(spec04),
        spec04_equals_set=spec04.members == members,
        spec_half_size=len(spec_half),
        valid_threshold_bound=(half - 1) / (2 * half - 1),
    )


@dataclass(frozen=True)
class SumsetStats:
    plus_size: int
    minus_size: int
    doubling: float


def sumset_stats(s: ElementSet) -> SumsetStats:
    """Exact |S+S|, |S-S| and the doubling constant |S+S|/|S|."""
    if len(s) == 0:
        raise ValueError("sumset statistics need a nonempty set")
    plus = sumset(s, s)
    minus = difference_set(s, s)
    return SumsetStats(len(plus), len(minus), len(plus) / len(s))
