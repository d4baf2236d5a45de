"""Perron eigenpair of the signless Laplacian Q = D + A and the principal ratio.

Everything here is binary64.  Perron entries along long pendant paths decay
geometrically; entries under ``UNDERFLOW_FLOOR`` (relative to the maximum)
are flagged instead of trusted, and callers should switch to the log-space
routines in :mod:`kiteratio.kite_math`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import NoConvergenceError, NotConnectedError
from .graph_core import Graph, is_connected, pendant_prefix_length, shortest_path

DEFAULT_TOL = 1e-12
UNDERFLOW_FLOOR = 1e-250
# relative width inside which two Perron entries count as tied
TIE_TOL = 1e-9

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class PerronResult:
    q1: float
    x_unit: np.ndarray
    x_max1: np.ndarray
    residual: float
    iterations: int
    entry_residual: float = 0.0
    underflow: bool = False


@dataclass(frozen=True)
class RatioReport:
    gamma: float
    vmin: int
    vmax: int
    path: tuple[int, ...]
    pendant_prefix: int
    q1: float
    log_space_recommended: bool = False


@lru_cache(maxsize=4096)
def _edge_arrays(g: Graph) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    src, dst = [], []
    for u, v in g.edges():
        src += (u, v)
        dst += (v, u)
    deg = np.asarray(g.degrees(), dtype=float)
    return np.asarray(src, dtype=np.intp), np.asarray(dst, dtype=np.intp), deg


def _apply(src, dst, deg, x):
    return deg * x + np.bincount(src, weights=x[dst], minlength=len(x))


def q_matvec(g: Graph, x) -> np.ndarray:
    """``(Qx)_v = d(v) x_v + sum of x_u over neighbours u``."""
    x = np.asarray(x, dtype=float)
    if x.shape != (g.n,):
        raise ValueError(f"expected a vector of length {g.n}, got shape {x.shape}")
    return _apply(*_edge_arrays(g), x)


def default_max_iter(n: int) -> int:
    return 200 * n + 10000


def perron(g: Graph, tol: float = DEFAULT_TOL, max_iter: int | None = None,
           entrywise: bool = True) -> PerronResult:
    """Dominant eigenpair of Q(g) by power iteration.

    Stops once ``||Qx - q x||_inf / q <= tol`` for the unit vector.  With
    ``entrywise`` the per-vertex relative residual must also drop below
    ``tol`` on every entry above the underflow floor; the tiny entries at
    the far end of a pendant path converge much later than the norm does,
    and the principal ratio depends on them.  The Rayleigh quotient of a
    PSD matrix never decreases under power iteration; a decrease beyond
    rounding raises ``ArithmeticError``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = g.n
    if n == 1:
        one = np.ones(1)
        return PerronResult(0.0, one, one.copy(), 0.0, 0)
    if not is_connected(g):
        raise NotConnectedError("Q(G) is reducible: the graph is not connected")
    if max_iter is None:
        max_iter = default_max_iter(n)
    src, dst, deg = _edge_arrays(g)

    x = deg + 1.0
    x /= x.max()
    slack = 16 * n * _EPS
    prev = -np.inf
    rq = resid = rel = np.nan
    for it in range(1, max_iter + 1):
        y = _apply(src, dst, deg, x)
        xx = x @ x
        rq = (x @ y) / xx
        if rq < prev * (1 - slack):
            raise ArithmeticError(f"Rayleigh quotient decreased at iteration {it}")
        prev = rq
        r = np.abs(y - rq * x)
        resid = r.max() / (rq * np.sqrt(xx))
        if resid <= tol:
            if not entrywise:
                break
            live = x > UNDERFLOW_FLOOR
            rel = (r[live] / x[live]).max() / rq
            if rel <= tol:
                break
        x = y / y.max()
    else:
        raise NoConvergenceError(
            f"no convergence after {max_iter} iterations (residual {resid:.3e})",
            _result(x, rq, resid, rel, max_iter),
        )
    return _result(x, rq, resid, rel if entrywise else np.nan, it)


def _result(x, rq, resid, rel, it) -> PerronResult:
    x_max1 = x / x.max()
    x_unit = x / np.linalg.norm(x)
    return PerronResult(
        q1=float(rq),
        x_unit=x_unit,
        x_max1=x_max1,
        residual=float(resid),
        iterations=it,
        entry_residual=float(rel),
        underflow=bool(x_max1.min() < UNDERFLOW_FLOOR),
    )


def extreme_vertices(x: np.ndarray) -> tuple[int, int]:
    """Lowest-index argmin and argmax, treating entries within ``TIE_TOL``
    (relative) of the extreme as tied."""
    lo, hi = x.min(), x.max()
    vmin = int(np.flatnonzero(x <= lo * (1 + TIE_TOL))[0])
    vmax = int(np.flatnonzero(x >= hi * (1 - TIE_TOL))[0])
    return vmin, vmax


def principal_ratio(g: Graph, tol: float = DEFAULT_TOL,
                    pr: PerronResult | None = None) -> RatioReport:
    if pr is None:
        pr = perron(g, tol)
    x = pr.x_max1
    vmin, vmax = extreme_vertices(x)
    with np.errstate(divide="ignore"):
        gamma = float(x[vmax] / x[vmin])
    path = shortest_path(g, vmin, vmax)
    return RatioReport(
        gamma=gamma,
        vmin=vmin,
        vmax=vmax,
        path=tuple(path),
        pendant_prefix=pendant_prefix_length(g, path),
        q1=pr.q1,
        log_space_recommended=pr.underflow,
    )
