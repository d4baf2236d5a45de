import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from kiteratio.graph_core import Graph

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@st.composite
def graphs(draw, min_n=1, max_n=9):
    n = draw(st.integers(min_n, max_n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    chosen = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph.from_edges(n, [p for p, keep in zip(pairs, chosen) if keep])


@st.composite
def connected_graphs(draw, min_n=2, max_n=9):
    # a random spanning tree plus random extra edges
    n = draw(st.integers(min_n, max_n))
    edges = {(draw(st.integers(0, v - 1)), v) for v in range(1, n)}
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    extra = draw(st.lists(st.sampled_from(pairs), max_size=len(pairs))) if pairs else []
    edges |= set(extra)
    perm = draw(st.permutations(range(n)))
    return Graph.from_edges(n, edges).relabel(perm)


@pytest.fixture
def rng():
    return np.random.default_rng(20261019)
