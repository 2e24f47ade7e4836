"""Symmetric-splitting baseline scheme and PT-vs-baseline comparison.

The baseline splits every file into C(K,t) subfiles and each subfile into t
packets, with everyone transmitting in every multicast group.  It is routed
through the PT engine as the single-group, all-transmit special case; a tiny
direct enumeration of the two-layer splitting serves as an independent
packet-count oracle.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .combinatorics import binom
from .exchange import FileOracle, build_caches, decode, generate_delivery, split_files, total_transmitted_units
from .scheme import DerivedScheme, SystemParams, derive, preset


def jcm_construct(K: int, t: int, N: int, unit: int = 1) -> DerivedScheme:
    """The baseline as a derived PT scheme: one group, uniform factor t."""
    return derive(preset("jcm", SystemParams(K=K, t=t, N=N, unit=unit)))


def jcm_packet_count(K: int, t: int) -> int:
    """t * C(K, t), the baseline subpacketization."""
    return t * binom(K, t)


def jcm_direct_packet_ids(K: int, t: int) -> list[tuple[tuple[int, ...], int]]:
    """Direct two-layer enumeration: (t-subset, packet index) pairs.

    Independent of the PT engine; used to cross-check packet counts.
    """
    return [
        (support, i)
        for support in itertools.combinations(range(1, K + 1), t)
        for i in range(1, t + 1)
    ]


@dataclass(frozen=True)
class ComparisonRecord:
    """Side-by-side outcome of simulating a PT scheme and the baseline."""

    K: int
    t: int
    pt_packets: int
    jcm_packets: int
    pt_rate: Fraction
    jcm_rate: Fraction
    pt_decodes: bool
    jcm_decodes: bool


def _simulate_rate_and_decode(
    derivation: DerivedScheme, demands: Sequence[int], seed: int
) -> tuple[Fraction, bool]:
    store = split_files(derivation, FileOracle(), files=sorted(set(demands)))
    caches = build_caches(derivation, store)
    messages = generate_delivery(derivation, store, demands, seed=seed)
    rate = Fraction(total_transmitted_units(messages, derivation), derivation.sizing.L)
    ok = True
    for user in range(1, derivation.params.K + 1):
        got = decode(user, caches[user - 1], messages, demands)
        want = store.oracle.file_bytes(demands[user - 1], store.bytes_per_file)
        ok = ok and got == want
    return rate, ok


def compare(
    pt: DerivedScheme, jcm: DerivedScheme, demands: Sequence[int] | None = None, seed: int = 0
) -> ComparisonRecord:
    """Simulate both schemes on the same demands and seed.

    Requires matching (K, t); asserts equal rate, strictly smaller PT
    subpacketization, and decode success on both sides.
    """
    if (pt.params.K, pt.params.t) != (jcm.params.K, jcm.params.t):
        raise ValueError("schemes must share (K, t) to be comparable")
    if demands is None:
        demands = list(range(1, pt.params.K + 1))
    pt_rate, pt_ok = _simulate_rate_and_decode(pt, demands, seed)
    jcm_rate, jcm_ok = _simulate_rate_and_decode(jcm, demands, seed)
    record = ComparisonRecord(
        K=pt.params.K,
        t=pt.params.t,
        pt_packets=pt.packets_per_file,
        jcm_packets=jcm.packets_per_file,
        pt_rate=pt_rate,
        jcm_rate=jcm_rate,
        pt_decodes=pt_ok,
        jcm_decodes=jcm_ok,
    )
    assert record.pt_rate == record.jcm_rate, "rates must match"
    assert record.pt_packets < record.jcm_packets, "PT must strictly reduce packets"
    assert record.pt_decodes and record.jcm_decodes, "both schemes must decode"
    return record
