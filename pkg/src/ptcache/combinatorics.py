"""Exact combinatorics underlying packet-type caching schemes.

Everything here is integer or rational and exact: binomial coefficients via
big integers, subset enumeration classified by projection type, and the
hypergeometric pmf used in the subpacketization-ratio analysis.  No floats.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Iterator, Sequence


class ComponentTooLarge(ValueError):
    """A type-vector component exceeds the size of its user group."""


class OutOfSupport(ValueError):
    """Requested a pmf value outside the distribution's support."""


def binom(n: int, k: int) -> int:
    """C(n, k) as an exact big integer; 0 when k < 0 or k > n."""
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


def vector_lcm(factors: Sequence[int]) -> int:
    """LCM of a set of splitting factors, with lcm(0, x) = 0.

    A zero factor means the subfile type is excluded from the coupled
    group, which annihilates any other contribution.
    """
    if not factors:
        raise ValueError("no factors to merge")
    if any(f < 0 for f in factors):
        raise ValueError(f"factors must be non-negative, got {factors}")
    if 0 in factors:
        return 0
    return math.lcm(*factors)


def compositions_bounded(total: int, bounds: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """All vectors (c_1..c_m) with 0 <= c_i <= bounds[i] and sum == total."""
    if len(bounds) == 1:
        if 0 <= total <= bounds[0]:
            yield (total,)
        return
    for c in range(min(total, bounds[0]) + 1):
        for rest in compositions_bounded(total - c, bounds[1:]):
            yield (c,) + rest


def subsets_by_type(groups: Sequence[Sequence[int]], type_vec: Sequence[int]) -> list[tuple[int, ...]]:
    """Every subset of the user set whose projection sizes match ``type_vec``.

    ``groups`` are the concrete user groups (disjoint, increasing ids within
    each group, all ids in group i below those of group i+1).  The result is
    in lexicographic order over sorted member tuples and has exactly
    prod_i C(|groups[i]|, type_vec[i]) elements.
    """
    if len(groups) != len(type_vec):
        raise ValueError(
            f"type vector length {len(type_vec)} != number of groups {len(groups)}"
        )
    for members, c in zip(groups, type_vec):
        if c < 0:
            raise ComponentTooLarge(f"negative component {c}")
        if c > len(members):
            raise ComponentTooLarge(
                f"component {c} exceeds group size {len(members)}"
            )
    per_group = [itertools.combinations(members, c) for members, c in zip(groups, type_vec)]
    return [tuple(itertools.chain.from_iterable(parts)) for parts in itertools.product(*per_group)]


def count_subsets_of_type(group_sizes: Sequence[int], type_vec: Sequence[int]) -> int:
    """prod_i C(group_sizes[i], type_vec[i]) without enumerating."""
    count = 1
    for size, c in zip(group_sizes, type_vec):
        count *= binom(size, c)
    return count


def hypergeo_pmf(q: int, t: int, j: int) -> Fraction:
    """Pr(J = j) for J ~ Hypergeo(2q+1, q+1, t), exactly.

    J counts how many of t draws (without replacement from a population of
    2q+1 split as q+1 marked / q unmarked) are marked; this is also the
    distribution of the first type component of a uniformly random t-subset
    under the (q+1, q) grouping.
    """
    if q < 1 or t < 1:
        raise ValueError(f"need q >= 1 and t >= 1, got q={q}, t={t}")
    if t > q:
        raise ValueError(f"need t <= q, got t={t}, q={q}")
    if j < 0 or j > t:
        raise OutOfSupport(f"j={j} outside support [0:{t}]")
    return Fraction(binom(q + 1, j) * binom(q, t - j), binom(2 * q + 1, t))
