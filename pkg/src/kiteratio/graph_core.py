"""Simple undirected graphs stored as per-vertex neighbour bitsets.

Vertices are ``0..n-1``.  ``Graph`` is frozen, hashable and compares by
value, so it can be shared between threads or processes freely.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import Graph6Error, GraphError

MAX_VERTICES = 1 << 16
SHORT_FORM_MAX = 62
LONG_FORM_MAX = 258047


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class Graph:
    n: int
    adj: tuple[int, ...]
    edge_count: int = field(init=False, compare=False)

    def __post_init__(self):
        if not 1 <= self.n <= MAX_VERTICES:
            raise GraphError(f"vertex count {self.n} outside [1, {MAX_VERTICES}]")
        if len(self.adj) != self.n:
            raise GraphError("adjacency length does not match n")
        full = (1 << self.n) - 1
        total = 0
        for v, nbrs in enumerate(self.adj):
            if nbrs & ~full or nbrs < 0:
                raise GraphError(f"vertex {v} has neighbours outside the vertex set")
            if nbrs >> v & 1:
                raise GraphError(f"loop at vertex {v}")
            for u in _bits(nbrs):
                if not self.adj[u] >> v & 1:
                    raise GraphError(f"asymmetric adjacency between {v} and {u}")
            total += nbrs.bit_count()
        object.__setattr__(self, "edge_count", total // 2)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> Graph:
        adj = [0] * n
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise GraphError(f"loop at vertex {u}")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return cls(n, tuple(adj))

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def degrees(self) -> list[int]:
        return [a.bit_count() for a in self.adj]

    def neighbors(self, v: int) -> list[int]:
        return list(_bits(self.adj[v]))

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in _bits(self.adj[u] >> (u + 1) << (u + 1))]

    def non_edges(self) -> list[tuple[int, int]]:
        return [
            (u, v)
            for u in range(self.n)
            for v in range(u + 1, self.n)
            if not self.adj[u] >> v & 1
        ]

    def is_regular(self) -> bool:
        return len(set(self.degrees())) == 1

    def with_edge(self, u: int, v: int) -> Graph:
        self._check_vertex(u)
        self._check_vertex(v)
        if u == v or self.has_edge(u, v):
            raise GraphError(f"cannot add edge ({u}, {v})")
        adj = list(self.adj)
        adj[u] |= 1 << v
        adj[v] |= 1 << u
        return Graph(self.n, tuple(adj))

    def without_edge(self, u: int, v: int) -> Graph:
        self._check_vertex(u)
        self._check_vertex(v)
        if not self.has_edge(u, v):
            raise GraphError(f"({u}, {v}) is not an edge")
        adj = list(self.adj)
        adj[u] &= ~(1 << v)
        adj[v] &= ~(1 << u)
        return Graph(self.n, tuple(adj))

    def relabel(self, perm: Sequence[int]) -> Graph:
        """Vertex ``v`` becomes ``perm[v]``."""
        if sorted(perm) != list(range(self.n)):
            raise GraphError("not a permutation of the vertex set")
        return Graph.from_edges(self.n, ((perm[u], perm[v]) for u, v in self.edges()))

    def _check_vertex(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise GraphError(f"vertex {v} out of range for n={self.n}")


@dataclass(frozen=True)
class KiteParams:
    """Clique ``K_{n-k+1}`` with a path on ``k`` vertices glued at one end."""

    n: int
    k: int

    def __post_init__(self):
        if not 1 <= self.k <= self.n - 1:
            raise GraphError(f"kite needs 1 <= k <= n-1, got n={self.n}, k={self.k}")

    @property
    def clique_size(self) -> int:
        return self.n - self.k + 1

    @property
    def edge_count(self) -> int:
        s = self.clique_size
        return (self.k - 1) + s * (s - 1) // 2


def build_named(family: str, n: int) -> Graph:
    if family == "path":
        if n < 1:
            raise GraphError("path needs n >= 1")
        return Graph.from_edges(n, ((i, i + 1) for i in range(n - 1)))
    if family == "cycle":
        if n < 3:
            raise GraphError("cycle needs n >= 3")
        return Graph.from_edges(n, ((i, (i + 1) % n) for i in range(n)))
    if family == "complete":
        if n < 1:
            raise GraphError("complete graph needs n >= 1")
        return Graph.from_edges(n, ((i, j) for i in range(n) for j in range(i + 1, n)))
    if family == "star":
        if n < 1:
            raise GraphError("star needs n >= 1")
        return Graph.from_edges(n, ((0, i) for i in range(1, n)))
    raise GraphError(f"unknown family {family!r}")


def build_kite(p: KiteParams | tuple[int, int]) -> Graph:
    """Vertices ``0..k-2`` are the pendant path (0 has degree one), ``k-1`` is
    the attachment vertex and ``k-1..n-1`` span the clique."""
    if not isinstance(p, KiteParams):
        p = KiteParams(*p)
    n, k = p.n, p.k
    edges = [(i, i + 1) for i in range(k - 1)]
    edges += [(i, j) for i in range(k - 1, n) for j in range(i + 1, n)]
    return Graph.from_edges(n, edges)


def kite_k_of(g: Graph) -> int | None:
    """Return ``k`` if ``g`` is isomorphic to ``build_kite(n, k)``, else None."""
    n = g.n
    if n < 2 or g.edge_count < n - 1:
        return None
    deg = g.degrees()
    if g.edge_count == n * (n - 1) // 2:
        return 1
    leaves = [v for v in range(n) if deg[v] == 1]
    if not leaves:
        return None
    # walk the pendant path from a leaf until a vertex of degree != 2
    prev, cur = leaves[0], g.neighbors(leaves[0])[0]
    path = [prev, cur]
    while deg[cur] == 2:
        prev, cur = cur, next(u for u in g.neighbors(cur) if u != prev)
        path.append(cur)
    if deg[cur] == 1:
        # reached the other leaf: g is a path, the kite with a K_2 "clique"
        return n - 1 if len(path) == n else None
    k = len(path)
    on_path = set(path)
    clique = [path[-1]] + [v for v in range(n) if v not in on_path]
    if len(clique) != n - k + 1:
        return None
    want = (k - 1) + len(clique) * (len(clique) - 1) // 2
    if g.edge_count != want:
        return None
    for i, u in enumerate(clique):
        for v in clique[i + 1:]:
            if not g.has_edge(u, v):
                return None
    return k


def bfs_distances(g: Graph, source: int) -> list[int]:
    dist = [-1] * g.n
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for w in _bits(g.adj[u]):
            if dist[w] < 0:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def is_connected(g: Graph) -> bool:
    seen = 1
    frontier = 1
    while frontier:
        nxt = 0
        for v in _bits(frontier):
            nxt |= g.adj[v]
        frontier = nxt & ~seen
        seen |= frontier
    return seen == (1 << g.n) - 1


def shortest_path(g: Graph, u: int, v: int) -> list[int]:
    """BFS path from ``u`` to ``v``; neighbours are expanded in increasing
    index order, so the first-discovered parent wins ties."""
    g._check_vertex(u)
    g._check_vertex(v)
    parent = [-1] * g.n
    parent[u] = u
    queue = deque([u])
    while queue and parent[v] < 0:
        a = queue.popleft()
        for w in _bits(g.adj[a]):
            if parent[w] < 0:
                parent[w] = a
                queue.append(w)
    if parent[v] < 0:
        raise GraphError(f"no path between {u} and {v}")
    path = [v]
    while path[-1] != u:
        path.append(parent[path[-1]])
    return path[::-1]


def _check_path(g: Graph, path: Sequence[int]) -> None:
    if not path:
        raise GraphError("empty path")
    for v in path:
        g._check_vertex(v)
    if len(set(path)) != len(path):
        raise GraphError("path repeats a vertex")
    for a, b in zip(path, path[1:]):
        if not g.has_edge(a, b):
            raise GraphError(f"({a}, {b}) is not an edge")


def pendant_prefix_length(g: Graph, path: Sequence[int]) -> int:
    """Largest ``j`` with ``path[0]`` of degree one and ``path[1..j-2]`` of
    degree two, i.e. ``path[:j]`` is a pendant path of ``g``.

    The far end ``path[j-1]`` may have any degree; this is the degree
    pattern that makes the path bound tight.
    """
    _check_path(g, path)
    if g.degree(path[0]) != 1:
        return 0
    j = min(2, len(path))
    while j < len(path) and g.degree(path[j - 1]) == 2:
        j += 1
    return j


# graph6 ------------------------------------------------------------------

def _encode_n(n: int, long_form: bool) -> str:
    if n <= SHORT_FORM_MAX:
        return chr(n + 63)
    if not long_form:
        raise Graph6Error(f"n={n} needs the long graph6 form (long_form=True)")
    if n > LONG_FORM_MAX:
        raise Graph6Error(f"n={n} exceeds the 18-bit graph6 size field")
    return "~" + "".join(chr(((n >> s) & 63) + 63) for s in (12, 6, 0))


def encode_graph6(g: Graph, long_form: bool = False) -> str:
    out = [_encode_n(g.n, long_form)]
    acc = nbits = 0
    for j in range(1, g.n):
        col = g.adj[j]
        for i in range(j):
            acc = (acc << 1) | (col >> i & 1)
            nbits += 1
            if nbits == 6:
                out.append(chr(acc + 63))
                acc = nbits = 0
    if nbits:
        out.append(chr((acc << (6 - nbits)) + 63))
    return "".join(out)


def decode_graph6(s: str, long_form: bool = False) -> Graph:
    s = s.strip()
    if s.startswith(">>graph6<<"):
        s = s[len(">>graph6<<"):]
    if not s:
        raise Graph6Error("empty graph6 string")
    vals = []
    for ch in s:
        c = ord(ch)
        if not 63 <= c <= 126:
            raise Graph6Error(f"character {ch!r} outside graph6 range")
        vals.append(c - 63)
    if vals[0] == 63:
        if not long_form:
            raise Graph6Error("long-form graph6 header but long_form=False")
        if len(vals) < 4 or vals[1] == 63:
            raise Graph6Error("unsupported or truncated graph6 size field")
        n = (vals[1] << 12) | (vals[2] << 6) | vals[3]
        body = vals[4:]
    else:
        n = vals[0]
        body = vals[1:]
    if n < 1:
        raise Graph6Error("graph6 order must be at least 1")
    nbits = n * (n - 1) // 2
    if len(body) != (nbits + 5) // 6:
        raise Graph6Error(f"expected {(nbits + 5) // 6} data characters for n={n}, got {len(body)}")
    pad = 6 * len(body) - nbits
    if pad and body[-1] & ((1 << pad) - 1):
        raise Graph6Error("nonzero padding bits")
    adj = [0] * n
    pos = 0
    for j in range(1, n):
        for i in range(j):
            if body[pos // 6] >> (5 - pos % 6) & 1:
                adj[i] |= 1 << j
                adj[j] |= 1 << i
            pos += 1
    return Graph(n, tuple(adj))
