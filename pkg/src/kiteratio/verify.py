"""Brute-force checks of the pendant-path bounds and the extremal structure.

Three layers:

* universal checks that must hold for every connected graph (hard pass/fail);
* structure diagnostics for a gamma-maximizer, which are only claimed for
  large n and so are reported, never failed;
* Rayleigh-quotient probes for single-edge additions and removals.
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import kite_math as km
from .enumeration import CANONICAL_MAX, canonical_form, chunk, connected_classes, enumerate_connected
from .errors import DegenerateError, DomainError, GraphError, NotConnectedError
from .graph_core import Graph, build_kite, decode_graph6, encode_graph6, is_connected, kite_k_of
from .spectral import DEFAULT_TOL, PerronResult, RatioReport, perron, principal_ratio

MARGIN_TOL = 1e-9
PROBE_TOL = 1e-10
LOW_Q_TOL = 1e-9

HOLDS, VIOLATED, NOT_APPLICABLE, DIAGNOSTIC = "holds", "violated", "not_applicable", "diagnostic"

# universal checks
PATH_BOUND = "path_bound"
U_SANDWICH = "u_sandwich"
LOW_Q_CLASS = "low_q_classification"
# maximizer structure diagnostics
Q_ABOVE_4 = "q_above_4"
END_DEGREE = "end_degree"
Q_WINDOW = "q_window"
PENDANT_PREFIX = "pendant_prefix"
NORM_WINDOW = "norm_window"
SUBSET_SUMS = "subset_sums"
DEG_THIRD_LAST = "deg_third_last"
Q_REFINED = "q_refined_upper"
DEG_SECOND_LAST = "deg_second_last"
# asymptotic diagnostics and probes
GAP_SCALING = "gap_scaling"
SECOND_LAST_DECAY = "second_last_decay"
RAYLEIGH_ADD = "rayleigh_add"
RAYLEIGH_REMOVE = "rayleigh_remove"


@dataclass(frozen=True)
class LemmaFinding:
    lemma_id: str
    graph_id: str
    status: str
    margin: float
    scale: float = 1.0
    details: str = ""
    satisfied: bool | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["margin"] = _json_float(self.margin)
        d["scale"] = _json_float(self.scale)
        return d


def _json_float(v: float):
    return v if math.isfinite(v) else str(v)


def _judge(lemma_id, graph_id, margin, scale, details, tol=MARGIN_TOL, diagnostic=False):
    ok = bool(margin >= -tol * scale)
    status = DIAGNOSTIC if diagnostic else (HOLDS if ok else VIOLATED)
    return LemmaFinding(lemma_id, graph_id, status, float(margin), float(scale),
                        f"{details}; scale={scale:.6g}", ok)


def _na(lemma_id, graph_id, details):
    return LemmaFinding(lemma_id, graph_id, NOT_APPLICABLE, 0.0, 1.0, details, None)


def graph_id(g: Graph) -> str:
    return canonical_form(g) if g.n <= CANONICAL_MAX else encode_graph6(g, long_form=True)


# ---------------------------------------------------------------------------
# universal checks

def in_low_q_family(g: Graph) -> bool:
    """Paths, cycles and the claw K_{1,3}."""
    deg = g.degrees()
    if not is_connected(g):
        return False
    if g.edge_count == g.n - 1 and max(deg, default=0) <= 2:
        return True
    if g.n >= 3 and all(d == 2 for d in deg):
        return True
    return g.n == 4 and sorted(deg) == [1, 1, 1, 3]


def check_universal(g: Graph, tol: float = DEFAULT_TOL, gid: str | None = None
                    ) -> list[LemmaFinding]:
    gid = gid if gid is not None else graph_id(g)
    pr = perron(g, tol)
    report = principal_ratio(g, tol, pr=pr)
    q = pr.q1
    out = []
    if q > 4:
        k = len(report.path)
        lg = math.log(report.gamma)
        slack = [km.log_gamma_upper_bound(pr, report, j) - lg for j in range(1, k + 1)]
        j_worst = int(np.argmin(slack)) + 1
        # expm1 keeps the relative slack exact near the tight (pendant) cases
        rel = math.expm1(slack[j_worst - 1])
        out.append(_judge(PATH_BOUND, gid, rel * report.gamma, report.gamma,
                          f"min over j=1..{k} of bound-gamma at j={j_worst}; q1={q:.12g}"))
        worst = math.inf
        j_worst = None
        for j in range(2, k + 1):
            lo, hi = km.log_u_sandwich(q, j)
            lu = km.log_u(q, j - 1)
            m = min(math.expm1(lu - lo) * math.exp(lo - lu), -math.expm1(lu - hi))
            if m < worst:
                worst, j_worst = m, j
        if j_worst is None:
            out.append(_na(U_SANDWICH, gid, f"path has {k} vertex; sandwich needs j >= 2"))
        else:
            out.append(_judge(U_SANDWICH, gid, worst, 1.0,
                              f"relative slack min over j=2..{k} at j={j_worst}"))
    else:
        out.append(_na(PATH_BOUND, gid, f"q1={q:.12g} <= 4"))
        out.append(_na(U_SANDWICH, gid, f"q1={q:.12g} <= 4"))
    family = in_low_q_family(g)
    if family:
        margin = 4.0 + LOW_Q_TOL - q
        detail = "path/cycle/claw: q1 <= 4 expected"
    else:
        margin = q - 4.0 - LOW_Q_TOL
        detail = "outside path/cycle/claw: q1 > 4 expected"
    ok = bool(margin >= 0 if family else margin > 0)
    out.append(LemmaFinding(LOW_Q_CLASS, gid, HOLDS if ok else VIOLATED, float(margin), 1.0,
                            f"{detail}; q1={q:.12g}", ok))
    return out


def universal_corpus(n_max: int, n_min: int = 2) -> Iterable[Graph]:
    for n in range(n_min, n_max + 1):
        yield from connected_classes(n)


def run_universal(graphs: Iterable[Graph], tol: float = DEFAULT_TOL) -> list[LemmaFinding]:
    findings = []
    for g in graphs:
        findings.extend(check_universal(g, tol))
    return sort_findings(findings)


def sort_findings(findings: Iterable[LemmaFinding]) -> list[LemmaFinding]:
    return sorted(findings, key=lambda f: (f.graph_id, f.lemma_id))


# ---------------------------------------------------------------------------
# extremal search

@dataclass(frozen=True)
class RankEntry:
    graph6: str
    gamma: float
    q1: float


@dataclass(frozen=True)
class ExtremalRecord:
    n: int
    gamma_max: float
    argmax_graph6: str
    is_kite: bool
    kite_k: int | None
    corpus_size: int
    best_kite_k: int | None = None
    best_kite_gamma: float | None = None
    ranking: tuple[RankEntry, ...] = field(default=(), repr=False)

    def to_dict(self, ranking: bool = True) -> dict:
        d = asdict(self)
        if not ranking:
            del d["ranking"]
        else:
            d["ranking"] = [asdict(r) for r in self.ranking]
        return d


def _rank_key(e: RankEntry):
    return (-e.gamma, e.graph6)


def _evaluate(graphs: Iterable[Graph], canonical: bool, tol: float) -> tuple[dict, int]:
    best: dict[str, RankEntry] = {}
    count = 0
    for g in graphs:
        count += 1
        pr = perron(g, tol)
        rep = principal_ratio(g, tol, pr=pr)
        gid = encode_graph6(g) if canonical else graph_id(g)
        entry = RankEntry(gid, rep.gamma, pr.q1)
        old = best.get(gid)
        if old is None or _rank_key(entry) < _rank_key(old):
            best[gid] = entry
    return best, count


def _finalize(n: int, best: dict, count: int, tol: float, partial: bool = False
              ) -> ExtremalRecord:
    if not best:
        if not partial:
            raise ValueError(f"empty corpus for n={n}")
        # a chunk of the index space may hold no class representative
        return ExtremalRecord(n, 0.0, "", False, None, 0)
    ranking = tuple(sorted(best.values(), key=_rank_key))
    top = ranking[0]
    kk = kite_k_of(decode_graph6(top.graph6, long_form=True))
    bk = bg = None
    if n >= 4:
        bk, lg = km.best_kite_k(n, "log", tol)
        bg = math.exp(lg)
    return ExtremalRecord(n, top.gamma, top.graph6, kk is not None, kk, count, bk, bg, ranking)


def _search_chunk(args):
    n, i, m, labeled, tol = args
    rng = chunk(n, i, m)
    graphs = enumerate_connected(n, rng) if labeled else connected_classes(n, rng)
    return _evaluate(graphs, canonical=not labeled, tol=tol)


def extremal_search(n: int, source: Iterable[Graph] | None = None, *, chunks: int = 1,
                    only_chunk: int | None = None, labeled: bool = False, jobs: int = 1,
                    tol: float = DEFAULT_TOL) -> ExtremalRecord:
    """Exact gamma-maximizer over a corpus of connected graphs of order n.

    ``source=None`` uses the native corpus: one representative per
    isomorphism class, or every labelled graph with ``labeled=True``.  The
    index space can be cut into ``chunks``; ``only_chunk`` restricts the run
    to one of them (merge partial records with :func:`merge_records`).
    Otherwise ``source`` is any iterable of graphs (for instance from
    ``ingest_graph6``); disconnected graphs and other orders are skipped.
    """
    if source is not None:
        graphs = (g for g in source if g.n == n and is_connected(g))
        best, count = _evaluate(graphs, canonical=False, tol=tol)
        return _finalize(n, best, count, tol)
    if n < 2:
        raise ValueError("extremal_search needs n >= 2")
    which = range(chunks) if only_chunk is None else [only_chunk]
    tasks = [(n, i, chunks, labeled, tol) for i in which]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_search_chunk, tasks))
    else:
        parts = [_search_chunk(t) for t in tasks]
    return _merge_parts(n, parts, tol, partial=only_chunk is not None)


def _merge_parts(n, parts, tol, partial=False):
    best: dict[str, RankEntry] = {}
    count = 0
    for part, c in parts:
        count += c
        for gid, e in part.items():
            old = best.get(gid)
            if old is None or _rank_key(e) < _rank_key(old):
                best[gid] = e
    return _finalize(n, best, count, tol, partial)


def merge_records(records: Sequence[ExtremalRecord], tol: float = DEFAULT_TOL) -> ExtremalRecord:
    """Combine partial records (e.g. one per chunk) into one; order-independent."""
    ns = {r.n for r in records}
    if len(ns) != 1:
        raise ValueError("records of different orders")
    parts = [({e.graph6: e for e in r.ranking}, r.corpus_size) for r in records]
    return _merge_parts(ns.pop(), parts, tol)


def default_jobs() -> int:
    return os.cpu_count() or 1


# ---------------------------------------------------------------------------
# maximizer decomposition and structure diagnostics

@dataclass(frozen=True)
class MaximizerDecomposition:
    """Shortest min-to-max path ``v_1..v_k`` (``path[0]..path[k-1]``), the
    remainder ``C``, ``S = C & N(v_{k-1})`` and ``T = N(v_{k-2}) & N(v_k)``."""

    g: Graph
    pr: PerronResult
    report: RatioReport
    k: int
    C: frozenset[int]
    S: frozenset[int]
    T: frozenset[int]

    @property
    def path(self) -> tuple[int, ...]:
        return self.report.path

    def v(self, i: int) -> int:
        """1-based path vertex ``v_i``."""
        return self.report.path[i - 1]


def decompose_maximizer(g: Graph, tol: float = DEFAULT_TOL) -> MaximizerDecomposition:
    pr = perron(g, tol)
    if not pr.q1 > 4:
        raise DomainError(f"decomposition needs q1 > 4, got {pr.q1:.12g}")
    report = principal_ratio(g, tol, pr=pr)
    if report.vmin == report.vmax:
        raise DegenerateError("gamma = 1: minimum and maximum entries coincide")
    path = report.path
    k = len(path)
    C = frozenset(range(g.n)) - frozenset(path)
    S = frozenset(u for u in C if g.has_edge(u, path[k - 2]))
    if k >= 3:
        T = frozenset(u for u in g.neighbors(path[k - 3]) if g.has_edge(u, path[k - 1]))
    else:
        T = frozenset()
    return MaximizerDecomposition(g, pr, report, k, C, S, T)


def subset_sum_margin(xs: Sequence[float]) -> float:
    """min over nonempty U of the slack in ``|U| - 2 < sum_U x <= |U|``.

    Only the s smallest (resp. largest) entries matter for each size s.
    """
    xs = sorted(xs)
    lo = np.cumsum(xs)
    hi = np.cumsum(xs[::-1])
    s = np.arange(1, len(xs) + 1)
    return float(min((lo - (s - 2)).min(), (s - hi).min()))


def subset_sum_margin_bruteforce(xs: Sequence[float]) -> float:
    best = math.inf
    for r in range(1, len(xs) + 1):
        for sub in itertools.combinations(xs, r):
            t = sum(sub)
            best = min(best, t - (r - 2), r - t)
    return best


def check_maximizer(dec: MaximizerDecomposition, gid: str | None = None) -> list[LemmaFinding]:
    """Structure diagnostics for a (candidate) maximizer.  Status is always
    ``diagnostic``; ``satisfied`` carries the outcome."""
    g, q, k, n = dec.g, dec.pr.q1, dec.k, dec.g.n
    gid = gid if gid is not None else graph_id(g)
    x = dec.pr.x_max1 / dec.pr.x_max1[dec.report.vmax]
    vk = dec.v(k)
    nk = n - k
    out = [_judge(Q_ABOVE_4, gid, q - 4.0, 4.0, f"q1={q:.12g}", diagnostic=True)]

    dk = g.degree(vk)
    out.append(_judge(END_DEGREE, gid, -abs(dk - (nk + 1)), 1.0,
                      f"d(v_k)={dk}, n-k+1={nk + 1}", tol=0.0, diagnostic=True))
    out.append(_judge(Q_WINDOW, gid, min(q - 2 * nk, 2 * (nk + 1) - q), q,
                      f"2(n-k)={2 * nk} < q1={q:.12g} < 2(n-k+1)={2 * (nk + 1)}",
                      diagnostic=True))
    need = k - 2
    got = dec.report.pendant_prefix
    if need >= 1:
        out.append(_judge(PENDANT_PREFIX, gid, min(0, got - need), 1.0,
                          f"pendant prefix {got}, need v_1..v_{need}", tol=0.0, diagnostic=True))
    else:
        out.append(_na(PENDANT_PREFIX, gid, f"k={k}: nothing before v_(k-1)"))

    norm2 = float(x @ x)
    out.append(_judge(NORM_WINDOW, gid, min(norm2 - (q / 2 - 2), q / 2 + 3 - norm2), q,
                      f"q/2-2 < |x|^2={norm2:.12g} < q/2+3 (max entry 1)", diagnostic=True))

    nbrs = g.neighbors(vk)
    out.append(_judge(SUBSET_SUMS, gid, subset_sum_margin([x[v] for v in nbrs]), len(nbrs),
                      f"|U|-2 < sum_U x <= |U| over subsets of N(v_k), |N(v_k)|={len(nbrs)}",
                      diagnostic=True))
    if k >= 3:
        d = g.degree(dec.v(k - 2))
        out.append(_judge(DEG_THIRD_LAST, gid, -abs(d - 2), 1.0, f"d(v_(k-2))={d}, |T|={len(dec.T)}",
                          tol=0.0, diagnostic=True))
    else:
        out.append(_na(DEG_THIRD_LAST, gid, f"k={k} < 3"))
    out.append(_judge(Q_REFINED, gid, 2 * nk + 1.5 - q, q,
                      f"q1={q:.12g} < 2(n-k)+3/2={2 * nk + 1.5}", diagnostic=True))
    d = g.degree(dec.v(k - 1))
    out.append(_judge(DEG_SECOND_LAST, gid, -abs(d - 2), 1.0, f"d(v_(k-1))={d}, |S|={len(dec.S)}",
                      tol=0.0, diagnostic=True))
    return out


def maximizer_findings(g: Graph, tol: float = DEFAULT_TOL) -> list[LemmaFinding]:
    """``check_maximizer`` with degenerate inputs turned into not_applicable."""
    gid = graph_id(g)
    try:
        dec = decompose_maximizer(g, tol)
    except (DomainError, DegenerateError) as exc:
        return [_na(Q_ABOVE_4, gid, str(exc))]
    return check_maximizer(dec, gid)


# ---------------------------------------------------------------------------
# asymptotic scan

@dataclass(frozen=True)
class ScanRow:
    n: int
    k_star: int
    log_gamma: float
    q1: float
    gap_ratio: float
    in_band: bool
    x_second_last: float
    n_pow: float
    below_n_pow: bool


GAP_BAND = (0.5, 2.0)


def asymptotic_scan(n_values: Iterable[int], tol: float = DEFAULT_TOL) -> list[ScanRow]:
    """Per n: best kite, ``(n - k*) ln n / n`` and ``x_{k-1}`` against ``n^(-1/6)``."""
    rows = []
    for n in n_values:
        if n < 10:
            raise ValueError("asymptotic_scan needs n >= 10")
        k, lg = km.best_kite_k(n, "log", tol)
        pr = perron(build_kite((n, k)), tol)
        x = pr.x_max1 / pr.x_max1[k - 1]
        ratio = (n - k) * math.log(n) / n
        xs = float(x[k - 2])
        bound = n ** (-1 / 6)
        rows.append(ScanRow(n, k, float(lg), float(pr.q1), ratio,
                            GAP_BAND[0] <= ratio <= GAP_BAND[1], xs, bound, xs < bound))
    return rows


def scan_findings(rows: Iterable[ScanRow]) -> list[LemmaFinding]:
    out = []
    for r in rows:
        gid = f"kite({r.n},{r.k_star})"
        out.append(_judge(GAP_SCALING, gid, min(r.gap_ratio - GAP_BAND[0], GAP_BAND[1] - r.gap_ratio),
                          1.0, f"(n-k*) ln n / n = {r.gap_ratio:.6f}", diagnostic=True))
        out.append(_judge(SECOND_LAST_DECAY, gid, r.n_pow - r.x_second_last, r.n_pow,
                          f"x_(k-1)={r.x_second_last:.6g} vs n^(-1/6)={r.n_pow:.6g}",
                          diagnostic=True))
    return out


# ---------------------------------------------------------------------------
# perturbation probes

def perturbation_probe(g: Graph, edge: tuple[int, int], action: str,
                       tol: float = DEFAULT_TOL, pr: PerronResult | None = None
                       ) -> LemmaFinding:
    """Rayleigh-quotient lower bound on the shift of q1 under one edge change.

    With the old unit Perron vector x: adding uv gives
    ``q1' - q1 >= (x_u + x_v)^2``; removing uv gives ``q1' - q1 >= -(x_u + x_v)^2``,
    and under max-entry-1 scaling ``(x_u + x_v)^2 / |x|^2 <= 4 / |x|^2``.
    """
    u, v = edge
    if action == "add":
        h = g.with_edge(u, v)
    elif action == "remove":
        h = g.without_edge(u, v)
        if not is_connected(h):
            raise NotConnectedError(f"removing ({u}, {v}) disconnects the graph")
    else:
        raise ValueError(f"unknown action {action!r}")
    if pr is None:
        pr = perron(g, tol)
    q_new = perron(h, tol, entrywise=False).q1
    shift = q_new - pr.q1
    xu = pr.x_unit
    quad = (xu[u] + xu[v]) ** 2
    gid = graph_id(g)
    if action == "add":
        margin = shift - quad
        detail = f"q1'-q1={shift:.12g} >= (x_u+x_v)^2={quad:.12g}"
        lemma = RAYLEIGH_ADD
    else:
        xm = pr.x_max1
        norm2 = float(xm @ xm)
        chain = (4.0 - (xm[u] + xm[v]) ** 2) / norm2
        margin = min(shift + quad, chain)
        detail = (f"q1'-q1={shift:.12g} >= -(x_u+x_v)^2={-quad:.12g} >= -4/|x|^2={-4 / norm2:.12g}")
        lemma = RAYLEIGH_REMOVE
    ok = bool(margin >= -PROBE_TOL)
    return LemmaFinding(lemma, gid, HOLDS if ok else VIOLATED, float(margin), 1.0,
                        f"{detail}; edge=({u},{v})", ok)


def bridges_free_edges(g: Graph) -> list[tuple[int, int]]:
    """Edges whose removal keeps g connected."""
    return [e for e in g.edges() if is_connected(g.without_edge(*e))]


def random_connected_graph(rng: np.random.Generator, n: int, p: float) -> Graph:
    while True:
        edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
        try:
            g = Graph.from_edges(n, edges)
        except GraphError:
            continue
        if is_connected(g):
            return g


def random_probes(count: int, n_max: int = 12, seed: int = 0,
                  tol: float = DEFAULT_TOL) -> list[LemmaFinding]:
    """``count`` random (graph, edge, action) probes on 3 <= n <= n_max."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        n = int(rng.integers(3, n_max + 1))
        g = random_connected_graph(rng, n, float(rng.uniform(0.2, 0.9)))
        action = "add" if rng.random() < 0.5 else "remove"
        pool = g.non_edges() if action == "add" else bridges_free_edges(g)
        if not pool:
            continue
        e = pool[int(rng.integers(len(pool)))]
        out.append(perturbation_probe(g, e, action, tol))
    return out
