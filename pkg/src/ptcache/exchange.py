"""Byte-exact execution of a PT scheme: split, place, deliver, decode.

Files come from a deterministic keyed byte oracle, get split into
heterogeneous packets in a canonical order, are cached at the users whose
support sets cover them, and are exchanged through two (or G) rounds of XOR
multicast messages.  Decoding is checked against the oracle bytes.

Packet ids are tuples ``(file, support, coupled_group, index)`` with the
support as a sorted user tuple and 1-based coupled group and index.
Payloads are carried as bytes on messages and as big integers internally.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .combinatorics import subsets_by_type
from .scheme import DerivedScheme

PacketId = tuple[int, tuple[int, ...], int, int]


class DemandOutOfRange(ValueError):
    """A demand vector entry names a file outside 1..N."""


class MemoryMismatch(ValueError):
    """A user's cached byte total differs from the memory budget."""


class UndecodableMessage(ValueError):
    """A message whose unknown constituents at a user are not exactly one."""


class MissingPacket(ValueError):
    """File assembly found a gap: a needed packet was never decoded."""


class DuplicateDelivery(ValueError):
    """The same packet id was decoded twice by one user."""


class FileOracle:
    """Deterministic keyed byte source standing in for real files.

    File ``n`` is the keyed SHAKE-256 stream of its index, so any byte
    ``b(n, offset)`` is reproducible without I/O.  A file-backed source can
    replace this class by providing the same two methods.
    """

    def __init__(self, key: bytes = b"ptcache-file-oracle"):
        self.key = key
        self._cache: dict[tuple[int, int], bytes] = {}

    def file_bytes(self, n: int, length: int) -> bytes:
        got = self._cache.get((n, length))
        if got is None:
            h = hashlib.shake_256()
            h.update(self.key)
            h.update(n.to_bytes(8, "big"))
            got = h.digest(length)
            self._cache[(n, length)] = got
        return got

    def byte(self, n: int, offset: int, length: int) -> int:
        return self.file_bytes(n, length)[offset]


class PacketStore:
    """Per-file packet payloads in canonical order.

    The canonical order is: subfile type ascending, support set
    lexicographic, coupled group ascending, packet index ascending.
    Concatenating one file's packets in this order reproduces the file.
    """

    def __init__(self, derivation: DerivedScheme, oracle: FileOracle):
        self.derivation = derivation
        self.oracle = oracle
        unit = derivation.params.unit
        groups = derivation.grouping.groups
        entries: list[tuple[tuple[int, ...], int, int, int]] = []
        for ti, v in enumerate(derivation.layout.subfile_types):
            for support in subsets_by_type(groups, v):
                for g in range(1, derivation.spec.G + 1):
                    for j in range(1, derivation.fs.intermediate[g - 1][ti] + 1):
                        entries.append((support, g, j, derivation.sizing.ell[g - 1] * unit))
        self.template = tuple(entries)
        self.index = {e[:3]: pos for pos, e in enumerate(entries)}
        self.bytes_per_file = derivation.sizing.L * unit
        assert sum(e[3] for e in entries) == self.bytes_per_file
        assert len(entries) == derivation.packets_per_file
        self._values: dict[int, list[int]] = {}

    @property
    def packets_per_file(self) -> int:
        return len(self.template)

    def materialize(self, files: Iterable[int]) -> None:
        for n in files:
            if n in self._values:
                continue
            if not 1 <= n <= self.derivation.params.N:
                raise DemandOutOfRange(f"file {n} outside 1..{self.derivation.params.N}")
            raw = self.oracle.file_bytes(n, self.bytes_per_file)
            values = []
            offset = 0
            for _, _, _, size in self.template:
                values.append(int.from_bytes(raw[offset : offset + size], "big"))
                offset += size
            self._values[n] = values

    @property
    def files(self) -> tuple[int, ...]:
        return tuple(sorted(self._values))

    def payload(self, pid: PacketId) -> int:
        n, support, g, j = pid
        return self._values[n][self.index[(support, g, j)]]

    def payload_at(self, n: int, pos: int) -> int:
        return self._values[n][pos]

    def file_packet_ids(self, n: int) -> Iterator[PacketId]:
        for support, g, j, _ in self.template:
            yield (n, support, g, j)


def split_files(
    derivation: DerivedScheme,
    oracle: FileOracle | None = None,
    files: Iterable[int] | None = None,
) -> PacketStore:
    """Split files into packets; by default all N files are materialized."""
    store = PacketStore(derivation, oracle or FileOracle())
    store.materialize(range(1, derivation.params.N + 1) if files is None else files)
    return store


@dataclass(frozen=True)
class Cache:
    """One user's cache: every packet whose support set contains the user."""

    user: int
    store: PacketStore

    def contains(self, pid: PacketId) -> bool:
        return self.user in pid[1]

    def packet(self, pid: PacketId) -> int:
        if self.user not in pid[1]:
            raise KeyError(f"user {self.user} does not cache {pid}")
        return self.store.payload(pid)

    @property
    def units_per_file(self) -> int:
        unit = self.store.derivation.params.unit
        return sum(size for support, _, _, size in self.store.template if self.user in support) // unit

    @property
    def total_bytes(self) -> int:
        p = self.store.derivation.params
        return self.units_per_file * p.unit * p.N


def build_caches(derivation: DerivedScheme, store: PacketStore) -> list[Cache]:
    """Caches for all K users, with the exact memory audit.

    Every user must cache (t/K)*N*L*unit bytes; the identity is checked in
    integer arithmetic (K * cached_units == t * L per file).
    """
    p = derivation.params
    caches = [Cache(user, store) for user in range(1, p.K + 1)]
    bad = {
        c.user: c.units_per_file for c in caches if c.units_per_file * p.K != p.t * derivation.sizing.L
    }
    if bad:
        target = Fraction(p.t * derivation.sizing.L, p.K)
        raise MemoryMismatch(
            f"per-file cached units {bad} differ from target {target}"
        )
    return caches


@dataclass(frozen=True)
class CodedMessage:
    """One XOR multicast transmission.

    ``constituents`` records the packet ids XOR-ed into the payload, for
    auditing; the wire content is only ``payload``.
    """

    round: int
    group: tuple[int, ...]
    transmitter: int
    repeat: int
    payload: bytes
    constituents: tuple[PacketId, ...]


def _shuffled_indices(n: int, key: bytes) -> list[int]:
    """Fisher-Yates permutation of 1..n driven by a keyed counter hash."""
    out = list(range(1, n + 1))
    words: list[int] = []
    counter = 0
    while len(words) < n - 1:
        digest = hashlib.blake2b(
            counter.to_bytes(4, "big"), digest_size=64, key=key
        ).digest()
        words.extend(
            int.from_bytes(digest[i : i + 8], "big") for i in range(0, 64, 8)
        )
        counter += 1
    for i in range(n - 1, 0, -1):
        j = words[n - 1 - i] % (i + 1)
        out[i], out[j] = out[j], out[i]
    return out


def _bijection_key(seed: int, round_g: int, group_tag: bytes, receiver: int) -> bytes:
    raw = (
        seed.to_bytes(8, "big", signed=True)
        + round_g.to_bytes(2, "big")
        + group_tag
        + receiver.to_bytes(4, "big")
    )
    return hashlib.blake2b(raw, digest_size=16).digest()


def generate_delivery(
    derivation: DerivedScheme,
    store: PacketStore,
    demands: Sequence[int],
    seed: int = 0,
) -> list[CodedMessage]:
    """All coded messages of the delivery phase, in a fixed canonical order.

    Round g serves coupled group g.  Within a multicast group, each
    transmitter sends one message per repeat; the packet index a transmitter
    carries for a receiver is the receiver's seeded bijection evaluated at
    (transmitter, repeat), so the receiver collects each of its packet
    indices exactly once.  Messages are ordered by (round, group type, group,
    transmitter, repeat); any order decodes identically.
    """
    p = derivation.params
    if len(demands) != p.K:
        raise DemandOutOfRange(f"demand vector has length {len(demands)}, expected {p.K}")
    for d in demands:
        if not 1 <= d <= p.N:
            raise DemandOutOfRange(f"demand {d} outside 1..{p.N}")
    store.materialize(set(demands))

    grouping = derivation.grouping
    layout = derivation.layout
    first_size = grouping.sizes[0]
    comp_of = (lambda u: 0) if grouping.m == 1 else (lambda u: 0 if u <= first_size else 1)
    unit = p.unit
    messages: list[CodedMessage] = []
    for g in range(1, derivation.spec.G + 1):
        entries = derivation.fs.intermediate[g - 1]
        plan = derivation.spec.plans[g - 1]
        size_bytes = derivation.sizing.ell[g - 1] * unit
        for k, s in enumerate(layout.group_types):
            repeat_count = derivation.repeats[g - 1][k]
            if repeat_count == 0:
                continue
            if any(c > size for c, size in zip(s, grouping.sizes)):
                continue  # group type with no instances at this grouping
            involved = dict(layout.involved[k])
            dagger_comps = plan.daggers[k]
            for group in subsets_by_type(grouping.groups, s):
                transmitters = tuple(u for u in group if comp_of(u) in dagger_comps)
                group_tag = b"".join(u.to_bytes(4, "big") for u in group)
                alpha_of = {y: entries[involved[comp_of(y)]] for y in group}
                sub_support = {y: tuple(z for z in group if z != y) for y in group}
                assignment: dict[int, dict[tuple[int, int], int]] = {}
                for y in group:
                    if alpha_of[y] == 0:
                        continue
                    domain = [
                        (x, rep)
                        for x in transmitters
                        if x != y
                        for rep in range(1, repeat_count + 1)
                    ]
                    order = _shuffled_indices(
                        alpha_of[y], _bijection_key(seed, g, group_tag, y)
                    )
                    assert len(domain) == alpha_of[y]
                    assignment[y] = dict(zip(domain, order))
                for x in transmitters:
                    for rep in range(1, repeat_count + 1):
                        constituents = tuple(
                            (demands[y - 1], sub_support[y], g, assignment[y][(x, rep)])
                            for y in group
                            if y != x and alpha_of[y] > 0
                        )
                        payload = 0
                        for pid in constituents:
                            payload ^= store.payload(pid)
                        messages.append(
                            CodedMessage(
                                round=g,
                                group=group,
                                transmitter=x,
                                repeat=rep,
                                payload=payload.to_bytes(size_bytes, "big"),
                                constituents=constituents,
                            )
                        )
    return messages


def total_transmitted_units(messages: Iterable[CodedMessage], derivation: DerivedScheme) -> int:
    unit = derivation.params.unit
    return sum(len(m.payload) // unit for m in messages)


def _assemble(store: PacketStore, user: int, wanted: int, decoded: dict[PacketId, int]) -> bytes:
    """Join cached and decoded packets of file ``wanted`` in canonical order."""
    parts: list[bytes] = []
    leftovers = dict(decoded)
    for pos, (support, g, j, size) in enumerate(store.template):
        pid = (wanted, support, g, j)
        if user in support:
            value = store.payload_at(wanted, pos)
        else:
            if pid not in leftovers:
                raise MissingPacket(f"user {user} never decoded {pid}")
            value = leftovers.pop(pid)
        parts.append(value.to_bytes(size, "big"))
    if leftovers:
        raise DuplicateDelivery(
            f"user {user} decoded {len(leftovers)} packets outside its demand"
        )
    return b"".join(parts)


def decode(
    user: int,
    cache: Cache,
    messages: Iterable[CodedMessage],
    demands: Sequence[int],
) -> bytes:
    """Reconstruct the user's demanded file from its cache plus the messages.

    For each message addressed to the user (exactly one constituent not in
    the cache), the cached constituents are XOR-ed out.  The decoded packets
    plus the cached ones are then assembled in canonical order and must
    reproduce the file byte for byte.
    """
    store = cache.store
    wanted = demands[user - 1]
    decoded: dict[PacketId, int] = {}
    for msg in messages:
        if msg.transmitter == user or user not in msg.group:
            continue
        unknown = [pid for pid in msg.constituents if user not in pid[1]]
        if not unknown:
            continue
        if len(unknown) > 1:
            raise UndecodableMessage(
                f"user {user} misses {len(unknown)} constituents of one message"
            )
        value = int.from_bytes(msg.payload, "big")
        for pid in msg.constituents:
            if user in pid[1]:
                value ^= cache.packet(pid)
        pid = unknown[0]
        if pid in decoded:
            raise DuplicateDelivery(f"user {user} decoded {pid} twice")
        decoded[pid] = value
    return _assemble(store, user, wanted, decoded)


def decode_all(
    caches: Sequence[Cache],
    messages: Iterable[CodedMessage],
    demands: Sequence[int],
) -> dict[int, bytes]:
    """Decode every user in one pass over the messages.

    Equivalent to calling decode() per user: each receiver XORs the
    constituents it caches (here via prefix/suffix XOR sweeps, which touch
    only the other constituents) against the payload.
    """
    if not caches:
        raise ValueError("no caches")
    store = caches[0].store
    decoded: dict[int, dict[PacketId, int]] = {u + 1: {} for u in range(len(caches))}
    for msg in messages:
        pids = msg.constituents
        values = [store.payload(pid) for pid in pids]
        n = len(values)
        pre = [0] * (n + 1)
        for i, v in enumerate(values):
            pre[i + 1] = pre[i] ^ v
        suf = [0] * (n + 1)
        for i in range(n - 1, -1, -1):
            suf[i] = suf[i + 1] ^ values[i]
        payload = int.from_bytes(msg.payload, "big")
        for i, pid in enumerate(pids):
            owner = next(u for u in msg.group if u not in pid[1])
            bucket = decoded[owner]
            if pid in bucket:
                raise DuplicateDelivery(f"user {owner} decoded {pid} twice")
            bucket[pid] = payload ^ pre[i] ^ suf[i + 1]
    return {
        user: _assemble(store, user, demands[user - 1], decoded[user])
        for user in decoded
    }


def transcript_lines(messages: Iterable[CodedMessage]) -> Iterator[str]:
    """JSON-lines transcript: one record per message, payloads as hashes."""
    for m in messages:
        yield json.dumps(
            {
                "round": m.round,
                "group": list(m.group),
                "transmitter": m.transmitter,
                "repeat": m.repeat,
                "constituents": [
                    {"file": n, "support": list(t), "coupled_group": g, "index": j}
                    for n, t, g, j in m.constituents
                ],
                "payload_sha256": hashlib.sha256(m.payload).hexdigest(),
            },
            separators=(",", ":"),
        )


def write_transcript(messages: Iterable[CodedMessage], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for line in transcript_lines(messages):
            fh.write(line + "\n")
