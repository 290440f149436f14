"""Isomorphism classes of small directed subgraphs via canonical adjacency codes.

A size-k induced subgraph is encoded as the k*k row-major adjacency bit
string read as an integer (diagonal always zero, most significant bit
first). The canonical id of its class is the minimum code over all k!
node permutations — exact and convention-explicit at these sizes (6
permutations for k=3, 24 for k=4).

Published triad ids mostly coincide with the minimum code, but not always:
code 164 (mutual dyad plus an incoming edge) canonicalizes to 74. Such
published codes are kept as aliases so reports stay comparable with
existing tables.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import permutations

import numpy as np

from .errors import InvalidMotifIdError

SUPPORTED_SIZES = (3, 4)

# Published ids that do not equal the minimum-code representative of their
# class, keyed by canonical id.
PUBLISHED_ALIASES: dict[int, frozenset[int]] = {74: frozenset({164})}

# Names for the 13 connected triad classes, keyed by canonical id.
TRIAD_NAMES: dict[int, str] = {
    6: "out-fan",
    12: "directed path",
    14: "mutual dyad with outgoing edge",
    36: "in-fan",
    38: "feed-forward loop",
    46: "uplinked mutual dyad",
    74: "mutual dyad with incoming edge",
    78: "double mutual dyad",
    98: "directed cycle",
    102: "mutual dyad in a cycle",
    108: "downlinked mutual dyad",
    110: "near-complete triad",
    238: "fully connected triad",
}


def bit_position(i: int, j: int, k: int) -> int:
    """Bit index of adjacency entry (i, j) in the k*k row-major code."""
    return k * k - 1 - (i * k + j)


def mask_from_edges(edges: list[tuple[int, int]], k: int) -> int:
    code = 0
    for i, j in edges:
        if i == j:
            raise ValueError("self-loops are not representable")
        code |= 1 << bit_position(i, j, k)
    return code


def edges_of_mask(mask: int, k: int) -> list[tuple[int, int]]:
    return [
        (i, j)
        for i in range(k)
        for j in range(k)
        if i != j and mask >> bit_position(i, j, k) & 1
    ]


def _diagonal_mask(k: int) -> int:
    return sum(1 << bit_position(i, i, k) for i in range(k))


def permute_mask(mask: int, perm: tuple[int, ...], k: int) -> int:
    """Relabel nodes of the coded graph: node i becomes perm[i]."""
    out = 0
    for i, j in edges_of_mask(mask, k):
        out |= 1 << bit_position(perm[i], perm[j], k)
    return out


def is_connected_mask(mask: int, k: int) -> bool:
    """Weak connectivity of the coded graph (undirected view)."""
    adj: list[set[int]] = [set() for _ in range(k)]
    for i, j in edges_of_mask(mask, k):
        adj[i].add(j)
        adj[j].add(i)
    seen = {0}
    stack = [0]
    while stack:
        v = stack.pop()
        for u in adj[v]:
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return len(seen) == k


def canonical_code(mask: int, k: int) -> int:
    """Minimum adjacency code over all k! node permutations."""
    if mask & _diagonal_mask(k):
        raise ValueError(f"code {mask} has diagonal (self-loop) bits set")
    return min(permute_mask(mask, p, k) for p in permutations(range(k)))


@dataclass(frozen=True)
class MotifClass:
    """One isomorphism class of size-k loop-free digraphs."""

    canonical_id: int
    k: int
    name: str
    alias_ids: frozenset[int] = field(default_factory=frozenset)
    connected: bool = True

    @property
    def display_id(self) -> int:
        """Published id when one exists, else the canonical id."""
        return min(self.alias_ids) if self.alias_ids else self.canonical_id

    def representative_edges(self) -> list[tuple[int, int]]:
        return edges_of_mask(self.canonical_id, self.k)


class ClassTable:
    """All isomorphism classes for one size, plus a code→class index.

    ``classes`` holds the connected classes sorted by canonical id (this is
    the row order used by census count arrays); ``all_classes`` additionally
    includes the disconnected ones. Built once per size and shared
    read-only.
    """

    def __init__(self, k: int):
        if k not in SUPPORTED_SIZES:
            raise ValueError(f"class table supports k in {SUPPORTED_SIZES}, got {k}")
        self.k = k

        off_diag = [(i, j) for i in range(k) for j in range(k) if i != j]
        members: dict[int, list[int]] = {}
        for bits in range(1 << len(off_diag)):
            mask = 0
            for b, (i, j) in enumerate(off_diag):
                if bits >> b & 1:
                    mask |= 1 << bit_position(i, j, k)
            members.setdefault(canonical_code(mask, k), []).append(mask)

        def make(canon: int) -> MotifClass:
            connected = is_connected_mask(canon, k)
            if k == 3 and canon in TRIAD_NAMES:
                name = TRIAD_NAMES[canon]
            elif connected:
                name = f"size-{k} class {canon}"
            else:
                name = f"size-{k} disconnected class {canon}"
            return MotifClass(
                canonical_id=canon,
                k=k,
                name=name,
                alias_ids=PUBLISHED_ALIASES.get(canon, frozenset()) if k == 3 else frozenset(),
                connected=connected,
            )

        self.all_classes: tuple[MotifClass, ...] = tuple(
            make(c) for c in sorted(members)
        )
        self.classes: tuple[MotifClass, ...] = tuple(
            c for c in self.all_classes if c.connected
        )
        self.by_canonical: dict[int, MotifClass] = {
            c.canonical_id: c for c in self.all_classes
        }

        # Full-code lookup: row index into `classes` for connected codes,
        # -1 otherwise. Size 2^(k*k); unreachable diagonal slots stay -1.
        row = {c.canonical_id: i for i, c in enumerate(self.classes)}
        self.code_to_index = np.full(1 << (k * k), -1, dtype=np.int32)
        for canon, masks in members.items():
            idx = row.get(canon, -1)
            if idx >= 0:
                for m in masks:
                    self.code_to_index[m] = idx

    def __len__(self) -> int:
        return len(self.classes)

    def index_of_code(self, mask: int) -> int:
        """Row of the connected class containing ``mask``, or -1."""
        return int(self.code_to_index[mask])

    def lookup(self, mask: int) -> MotifClass | None:
        """Connected class containing ``mask``, if any."""
        i = self.index_of_code(mask)
        return self.classes[i] if i >= 0 else None


@lru_cache(maxsize=None)
def get_class_table(k: int) -> ClassTable:
    return ClassTable(k)


def build_class_table(k: int) -> ClassTable:
    """Group all 2^(k(k-1)) loop-free digraphs into isomorphism classes."""
    return get_class_table(k)


def resolve_paper_id(code: int, k: int = 3) -> MotifClass:
    """Resolve a published adjacency code to its class by orbit membership.

    Any valid member code of a connected class is accepted, not only the
    canonical representative (e.g. 164 resolves to the class with canonical
    id 74).
    """
    if not 0 <= code < 1 << (k * k):
        raise InvalidMotifIdError(f"code {code} out of range for k={k}")
    if code & _diagonal_mask(k):
        raise InvalidMotifIdError(f"code {code} has self-loop bits set")
    table = get_class_table(k)
    cls = table.lookup(code)
    if cls is None:
        raise InvalidMotifIdError(f"code {code} encodes a disconnected pattern")
    return cls
