import hashlib
import io
import itertools

import networkx as nx
import pytest
from hypothesis import given

from kiteratio.enumeration import (EnumerationChunk, _orbit, canonical_form, canonical_index,
                                   chunk, class_representatives, connected_classes, connected_mask,
                                   enumerate_connected, graph_from_index, index_of, ingest_graph6, partition)
from kiteratio.errors import Graph6Error, GraphError
from kiteratio.graph_core import Graph, build_kite, build_named, encode_graph6, is_connected
from kiteratio.spectral import principal_ratio

from conftest import graphs
from oracles import connected_labeled_count

# connected graphs up to isomorphism, orders 1..7
UNLABELED = {1: 1, 2: 1, 3: 2, 4: 6, 5: 21, 6: 112, 7: 853}


def _brute_connected_count(n):
    pairs = list(itertools.combinations(range(n), 2))
    total = 0
    for bits in range(1 << len(pairs)):
        h = nx.Graph()
        h.add_nodes_from(range(n))
        h.add_edges_from(p for i, p in enumerate(pairs) if bits >> i & 1)
        total += nx.is_connected(h)
    return total


@pytest.mark.parametrize("n,want", [(2, 1), (3, 4), (4, 38)])
def test_enumerate_examples(n, want):
    assert len(list(enumerate_connected(n))) == want == _brute_connected_count(n)


def test_enumerate_n3_members():
    got = {frozenset(g.edges()) for g in enumerate_connected(3)}
    assert got == {
        frozenset({(0, 1), (1, 2)}),
        frozenset({(0, 1), (0, 2)}),
        frozenset({(0, 2), (1, 2)}),
        frozenset({(0, 1), (0, 2), (1, 2)}),
    }


@pytest.mark.parametrize("n", range(2, 8))
def test_labeled_counts(n):
    assert int(connected_mask(n).sum()) == connected_labeled_count(n)


@pytest.mark.parametrize("n", range(2, 8))
def test_class_counts_and_orbits(n):
    reps = class_representatives(n)
    assert len(reps) == UNLABELED[n]
    assert sum(r.orbit_size for r in reps) == connected_labeled_count(n)


@pytest.mark.parametrize("n", [0, 1, 8])
def test_native_range(n):
    with pytest.raises(ValueError):
        next(enumerate_connected(n))


def test_index_roundtrip():
    for n in (3, 5, 6):
        for g in itertools.islice(enumerate_connected(n), 200):
            assert graph_from_index(n, index_of(g)) == g


def test_index_order_is_graph6_order():
    # larger index <=> lexicographically larger graph6 string at fixed n
    idx = [int(i) for i in range(0, 1 << 10, 7)]
    strings = [encode_graph6(graph_from_index(5, i)) for i in idx]
    assert strings == sorted(strings)


def test_partition_sound():
    for n in (3, 4, 5):
        full = [index_of(g) for g in enumerate_connected(n)]
        for m in (1, 2, 3, 7):
            parts = partition(n, m)
            assert parts[0].start == 0 and parts[-1].stop == 1 << (n * (n - 1) // 2)
            assert all(a.stop == b.start for a, b in zip(parts, parts[1:]))
            got = [index_of(g) for c in parts for g in enumerate_connected(n, c)]
            assert got == full
            forms = sorted(canonical_form(g) for c in parts for g in enumerate_connected(n, c))
            ref = sorted(canonical_form(g) for g in enumerate_connected(n))
            assert hashlib.sha256("".join(forms).encode()).digest() == \
                hashlib.sha256("".join(ref).encode()).digest()
    with pytest.raises(ValueError):
        chunk(4, 3, 3)
    with pytest.raises(ValueError):
        EnumerationChunk(3, 0, 9)


def test_canonical_form_examples():
    assert canonical_form(build_named("complete", 4)) == "C~"
    p4a = build_named("path", 4)
    p4b = Graph.from_edges(4, [(2, 0), (0, 3), (3, 1)])
    assert canonical_form(p4a) == canonical_form(p4b)
    assert len({canonical_form(g) for g in enumerate_connected(4)}) == 6
    with pytest.raises(GraphError):
        canonical_form(build_named("path", 11))


def test_canonical_form_is_lexicographic_minimum():
    for g in [build_kite((5, 3)), build_named("star", 5), build_named("cycle", 5)]:
        every = {encode_graph6(g.relabel(p)) for p in itertools.permutations(range(g.n))}
        assert canonical_form(g) == min(every)


def test_representatives_are_canonical():
    for n in (3, 4, 5, 6):
        for g in connected_classes(n):
            assert encode_graph6(g) == canonical_form(g)


def test_classes_match_networkx_atlas():
    # the atlas lists every graph on up to 7 vertices exactly once
    by_n = {}
    for h in nx.graph_atlas_g()[1:]:
        if nx.is_connected(h):
            by_n.setdefault(h.number_of_nodes(), []).append(h)
    for n in range(2, 8):
        text = "".join(nx.to_graph6_bytes(h, header=False).decode() for h in by_n[n])
        items = list(ingest_graph6(io.StringIO(text)))
        assert len(items) == UNLABELED[n]
        assert all(i.connected for i in items)
        if n <= 6:
            atlas = {canonical_form(i.graph) for i in items}
            native = {encode_graph6(g) for g in connected_classes(n)}
            assert atlas == native


def test_ingest_examples():
    assert [i.graph for i in ingest_graph6(["C~"])] == [build_named("complete", 4)]
    assert list(ingest_graph6([])) == []
    items = list(ingest_graph6([">>graph6<<C~\n", "\n", "CK\n", "  \n"]))
    assert [i.line_no for i in items] == [1, 3]
    assert not items[1].connected


def test_ingest_strict_and_lenient():
    lines = ["C~", "C~~", "Ch"]
    with pytest.raises(Graph6Error) as info:
        list(ingest_graph6(lines))
    assert info.value.line_no == 2
    errors = []
    got = list(ingest_graph6(lines, strict=False, errors=errors))
    assert [i.line_no for i in got] == [1, 3]
    assert [e.line_no for e in errors] == [2]


def test_gamma_isomorphism_invariant(rng):
    for _ in range(20):
        n = int(rng.integers(4, 10))
        while True:
            edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.45]
            g = Graph.from_edges(n, edges)
            if is_connected(g):
                break
        base = principal_ratio(g).gamma
        for _ in range(100):
            h = g.relabel([int(v) for v in rng.permutation(n)])
            assert principal_ratio(h).gamma == pytest.approx(base, rel=1e-10)


@given(graphs(min_n=2, max_n=8))
def test_canonical_search_matches_orbit_minimum(g):
    assert canonical_index(g) == int(_orbit(g.n, index_of(g)).min())
    h = g.relabel(list(range(g.n))[::-1])
    assert canonical_index(h) == canonical_index(g)
