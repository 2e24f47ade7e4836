"""Grid-level properties of the construction and the byte pipeline.

The end-to-end grid reuses one store and cache set per parameter point and
re-runs delivery/decode across seeds and demand vectors; the smallest point
of each grid additionally goes through the one-call verifier.
"""

import itertools
from fractions import Fraction

import pytest

from ptcache.exchange import (
    FileOracle,
    build_caches,
    decode_all,
    generate_delivery,
    split_files,
    total_transmitted_units,
)
from ptcache.scheme import (
    DegenerateSystem,
    IncompatibleLocals,
    InvalidRatio,
    SchemeSpec,
    SystemParams,
    TransmitterSelection,
    UserGrouping,
    derive,
    preset,
)
from ptcache.verify import demand_vector, verify_claims, verify_end_to_end

END_TO_END_GRID = [(t, q) for t in (2, 4) for q in range(t + 1, t + 7)]


@pytest.mark.parametrize("t,q", END_TO_END_GRID)
def test_theorem1_end_to_end_grid(t, q):
    K = 2 * q + 1
    d = derive(preset("theorem1", SystemParams(K=K, t=t, N=K)))
    oracle = FileOracle()
    store = split_files(d, oracle)
    caches = build_caches(d, store)
    L = d.sizing.L
    for kind in ("distinct", "uniform"):
        demands = demand_vector(kind, K, K)
        for seed in (0, 1, 2):
            messages = generate_delivery(d, store, demands, seed=seed)
            assert all(len(m.constituents) == t for m in messages)
            assert Fraction(total_transmitted_units(messages, d), L) == Fraction(K - t, t)
            recon = decode_all(caches, messages, demands)
            for user in range(1, K + 1):
                assert recon[user] == oracle.file_bytes(demands[user - 1], store.bytes_per_file)


@pytest.mark.parametrize("t", [2, 4])
def test_smallest_point_through_verifier(t):
    q = t + 1
    K = 2 * q + 1
    spec = preset("theorem1", SystemParams(K=K, t=t, N=K))
    for kind in ("distinct", "uniform"):
        for seed in (0, 1, 2):
            report = verify_end_to_end(spec, kind, seed=seed)
            assert report.passed, report.failure


@pytest.mark.parametrize("t", [2, 4, 6, 8])
def test_claims_grid(t):
    for q in range(t + 1, t + 21):
        results = verify_claims(t, q)
        failed = {k for k, r in results.items() if not r.passed}
        assert not failed, (t, q, failed)


@pytest.mark.parametrize("t", [2, 4])
def test_aggregate_capped_at_t(t):
    for q in range(t + 1, t + 7):
        d = derive(preset("theorem1", SystemParams(K=2 * q + 1, t=t, N=2 * q + 1)))
        assert all(a <= t for a in d.fs.aggregate)
        assert d.fs.aggregate[0] == 0


def test_every_accepted_plan_pair_executes():
    """Exhaust all selection pairs at K=7, t=2.

    The two mixed group types admit three dagger choices each, so one
    coupled group has 9 possible plans and a two-coupled-group scheme 81.
    Every pair must either fail derivation with a named validation error or
    survive the full byte pipeline.
    """
    p = SystemParams(K=7, t=2, N=7)
    grouping = UserGrouping((4, 3))
    choices = [frozenset({0}), frozenset({1}), frozenset({0, 1})]
    plans = [
        TransmitterSelection((frozenset({1}), d2, d3, frozenset({0})))
        for d2 in choices
        for d3 in choices
    ]
    accepted = 0
    for p1, p2 in itertools.product(plans, plans):
        spec = SchemeSpec(p, grouping, (p1, p2))
        try:
            d = derive(spec)
        except (IncompatibleLocals, DegenerateSystem, InvalidRatio):
            continue
        accepted += 1
        report = verify_end_to_end(d, "distinct", seed=0)
        assert report.passed, (p1, p2, report.failure)
    assert accepted > 1  # at least the named construction plus variants
