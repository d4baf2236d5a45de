"""Exhaustive connected graphs for small n, graph6 ingestion, canonical forms.

Edge-subset indices follow graph6 bit order: the pair ``(i, j)``, ``i < j``,
at position ``p`` of the column-major upper triangle carries weight
``2**(N - 1 - p)`` with ``N = n(n-1)/2``.  With that weighting the smallest
index in an isomorphism class is exactly the lexicographically smallest
graph6 string of the class, so orbit minima double as canonical forms.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, NamedTuple

import numpy as np

from .errors import Graph6Error, GraphError
from .graph_core import Graph, decode_graph6, encode_graph6, is_connected

log = logging.getLogger(__name__)

NATIVE_MAX = 7
CANONICAL_MAX = 10


@dataclass(frozen=True)
class EnumerationChunk:
    n: int
    start: int
    stop: int
    source: str = "native"

    def __post_init__(self):
        total = 1 << (self.n * (self.n - 1) // 2)
        if not 0 <= self.start <= self.stop <= total:
            raise ValueError(f"range [{self.start}, {self.stop}) outside [0, {total})")


def partition(n: int, m: int) -> list[EnumerationChunk]:
    """Split the index space for order n into m contiguous chunks."""
    if m < 1:
        raise ValueError("need at least one chunk")
    total = 1 << (n * (n - 1) // 2)
    cuts = [total * i // m for i in range(m + 1)]
    return [EnumerationChunk(n, a, b) for a, b in zip(cuts, cuts[1:])]


def chunk(n: int, i: int, m: int) -> EnumerationChunk:
    if not 0 <= i < m:
        raise ValueError(f"chunk index {i} not in [0, {m})")
    return partition(n, m)[i]


@lru_cache(maxsize=None)
def pair_positions(n: int) -> dict[tuple[int, int], int]:
    pos = {}
    for j in range(1, n):
        for i in range(j):
            pos[i, j] = len(pos)
    return pos


def _weight(n: int, i: int, j: int) -> int:
    if i > j:
        i, j = j, i
    pos = pair_positions(n)
    return 1 << (len(pos) - 1 - pos[i, j])


def graph_from_index(n: int, index: int) -> Graph:
    pos = pair_positions(n)
    top = len(pos) - 1
    adj = [0] * n
    for (i, j), p in pos.items():
        if index >> (top - p) & 1:
            adj[i] |= 1 << j
            adj[j] |= 1 << i
    return Graph(n, tuple(adj))


def index_of(g: Graph) -> int:
    return sum(_weight(g.n, u, v) for u, v in g.edges())


def _check_native(n: int) -> None:
    if not 2 <= n <= NATIVE_MAX:
        raise ValueError(
            f"native enumeration supports 2 <= n <= {NATIVE_MAX}; "
            "feed larger orders as graph6 (e.g. nauty geng -c output) via ingest_graph6"
        )


@lru_cache(maxsize=None)
def connected_mask(n: int) -> np.ndarray:
    """Boolean array over all edge-subset indices: True where connected.

    Vertex 0's reachable set is grown for every subset at once by OR-ing
    per-vertex neighbourhood bytes.
    """
    _check_native(n)
    pos = pair_positions(n)
    top = len(pos) - 1
    idx = np.arange(1 << len(pos), dtype=np.int64)
    nbr = [np.zeros(idx.shape, dtype=np.uint8) for _ in range(n)]
    for (i, j), p in pos.items():
        bit = ((idx >> (top - p)) & 1).astype(np.uint8)
        nbr[i] |= bit << j
        nbr[j] |= bit << i
    reach = np.ones(idx.shape, dtype=np.uint8)
    for _ in range(n - 1):
        grown = reach.copy()
        for v in range(n):
            hit = ((reach >> v) & 1).astype(bool)
            grown[hit] |= nbr[v][hit]
        reach = grown
    mask = reach == (1 << n) - 1
    mask.setflags(write=False)
    return mask


def enumerate_connected(n: int, rng: EnumerationChunk | tuple[int, int] | None = None
                        ) -> Iterator[Graph]:
    """Every connected labelled graph on n vertices, in index order."""
    _check_native(n)
    mask = connected_mask(n)
    start, stop = (0, len(mask)) if rng is None else (
        (rng.start, rng.stop) if isinstance(rng, EnumerationChunk) else rng)
    for index in np.flatnonzero(mask[start:stop]) + start:
        yield graph_from_index(n, int(index))


@lru_cache(maxsize=None)
def _perm_weights(n: int) -> np.ndarray:
    """``W[p, e]`` = weight of edge position e after applying permutation p."""
    pos = pair_positions(n)
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64)
    w = np.empty((len(perms), len(pos)), dtype=np.int64)
    table = np.zeros((n, n), dtype=np.int64)
    for a in range(n):
        for b in range(n):
            if a != b:
                table[a, b] = _weight(n, a, b)
    for (i, j), p in pos.items():
        w[:, p] = table[perms[:, i], perms[:, j]]
    return w


def _edge_positions(n: int, index: int) -> list[int]:
    top = n * (n - 1) // 2 - 1
    return [p for p in range(top + 1) if index >> (top - p) & 1]


def _orbit(n: int, index: int) -> np.ndarray:
    return _perm_weights(n)[:, _edge_positions(n, index)].sum(axis=1)


def canonical_index(g: Graph) -> int:
    """Smallest edge-subset index over all relabellings (exact).

    graph6 bits run column by column, so placing vertices at labels 0, 1, ...
    fixes one column per step; only prefixes tied for the smallest column
    survive.  States with the same placed set and the same adjacency
    signature for every unplaced vertex have identical futures and merge.
    """
    if g.n > CANONICAL_MAX:
        raise GraphError(f"canonical form limited to n <= {CANONICAL_MAX}")
    n, adj = g.n, g.adj
    # state: placed set -> signature of each vertex (adjacency bits to labels 0..j-1)
    states = {(0, (0,) * n)}
    bits = 0
    for j in range(n):
        best = None
        nxt = set()
        for placed, sig in states:
            for v in range(n):
                if placed >> v & 1:
                    continue
                col = sig[v]
                if best is not None and col > best:
                    continue
                if best is None or col < best:
                    best, nxt = col, set()
                new_sig = tuple((s << 1) | (adj[v] >> u & 1) for u, s in enumerate(sig))
                nxt.add((placed | 1 << v, new_sig))
        bits = (bits << j) | best
        states = {(p, tuple(s if not p >> u & 1 else 0 for u, s in enumerate(sig)))
                  for p, sig in nxt}
    return bits


def canonical_form(g: Graph) -> str:
    """Lexicographically smallest graph6 string over all vertex relabellings."""
    return encode_graph6(graph_from_index(g.n, canonical_index(g)) if g.n > 1 else g)


class ClassRep(NamedTuple):
    index: int
    orbit_size: int


@lru_cache(maxsize=None)
def class_representatives(n: int) -> tuple[ClassRep, ...]:
    """One representative (the orbit minimum) per connected isomorphism class.

    Orbit sizes sum to the number of connected labelled graphs.
    """
    _check_native(n)
    conn = connected_mask(n)
    seen = np.zeros(len(conn), dtype=bool)
    reps = []
    for index in np.flatnonzero(conn):
        if seen[index]:
            continue
        orbit = np.unique(_orbit(n, int(index)))
        seen[orbit] = True
        reps.append(ClassRep(int(index), len(orbit)))
    return tuple(reps)


def connected_classes(n: int, rng: EnumerationChunk | tuple[int, int] | None = None
                      ) -> Iterator[Graph]:
    """Class representatives whose (canonical) index falls in ``rng``."""
    if n == 1:
        if rng is None or (rng.start if isinstance(rng, EnumerationChunk) else rng[0]) == 0:
            yield Graph(1, (0,))
        return
    start, stop = (0, 1 << (n * (n - 1) // 2)) if rng is None else (
        (rng.start, rng.stop) if isinstance(rng, EnumerationChunk) else rng)
    for rep in class_representatives(n):
        if start <= rep.index < stop:
            yield graph_from_index(n, rep.index)


class Ingested(NamedTuple):
    line_no: int
    graph: Graph
    connected: bool


def ingest_graph6(lines: Iterable[str], strict: bool = True, long_form: bool = False,
                  errors: list | None = None) -> Iterator[Ingested]:
    """Decode a graph6 stream, one graph per line.

    Blank lines and a ``>>graph6<<`` header are skipped.  In strict mode the
    first bad line raises ``Graph6Error``; otherwise it is logged, appended to
    ``errors`` (if given) and skipped.
    """
    for line_no, raw in enumerate(lines, start=1):
        s = raw.strip()
        if s.startswith(">>graph6<<"):
            s = s[len(">>graph6<<"):]
        if not s:
            continue
        try:
            g = decode_graph6(s, long_form=long_form)
        except Graph6Error as exc:
            err = Graph6Error(str(exc), line_no)
            if strict:
                raise err from None
            log.warning("%s", err)
            if errors is not None:
                errors.append(err)
            continue
        yield Ingested(line_no, g, is_connected(g))
