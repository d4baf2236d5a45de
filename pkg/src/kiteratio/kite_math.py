"""Scalar machinery for pendant paths hanging off a graph with q1 > 4.

For q > 4 write ``s = acosh((q - 2) / 2)``, so ``sigma = e^s`` is the larger
root of ``t^2 - (q - 2) t + 1``.  The sequence

    U_0 = 1,  U_1 = q - 1,  U_{i+1} = (q - 2) U_i - U_{i-1}

has the closed form ``(sigma^{i+1} - sigma^{-(i+1)} + sigma^i - sigma^{-i})
/ (sigma - 1/sigma)``, which collapses to ``sinh((i + 1/2) s) / sinh(s/2)``.
The hyperbolic form is what we evaluate: it has no cancellation as q -> 4
and its logarithm is cheap to take without overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, OverflowDomainError
from .graph_core import Graph, KiteParams, build_kite
from .spectral import PerronResult, RatioReport, perron

_LOG2 = math.log(2.0)
_LOG_MAX = math.log(np.finfo(float).max)


@dataclass(frozen=True)
class SigmaValue:
    q: float
    sigma: float


@dataclass(frozen=True)
class USequence:
    q: float
    values: tuple[float, ...]
    scale: str = "linear"


def _check_q(q: float) -> None:
    if not q > 4:
        raise DomainError(f"q must exceed 4, got {q!r}")


def _half_log_sigma(q: float) -> float:
    """``s/2`` with ``s = log sigma``, accurate as q -> 4+."""
    t = (q - 4.0) / 2.0
    return 0.5 * math.log1p(t + math.sqrt(t * (t + 2.0)))


def sigma(q: float) -> SigmaValue:
    _check_q(q)
    return SigmaValue(q, (q - 2.0 + math.sqrt(q * q - 4.0 * q)) / 2.0)


def u_recurrence(q: float, m: int) -> USequence:
    _check_q(q)
    if m < 0:
        raise ValueError("m must be non-negative")
    vals = [1.0, q - 1.0][: m + 1]
    for _ in range(2, m + 1):
        nxt = (q - 2.0) * vals[-1] - vals[-2]
        if not math.isfinite(nxt):
            raise OverflowDomainError(f"U_{len(vals)} overflows binary64; use log_u")
        vals.append(nxt)
    return USequence(q, tuple(vals))


def u_closed_form(q: float, i: int) -> float:
    _check_q(q)
    if i < 0:
        raise ValueError("i must be non-negative")
    h = _half_log_sigma(q)
    try:
        return math.sinh((2 * i + 1) * h) / math.sinh(h)
    except OverflowError:
        raise OverflowDomainError(f"U_{i}({q}) overflows binary64; use log_u") from None


def _log_sinh(a: float) -> float:
    if a > 20.0:
        return a - _LOG2 + math.log1p(-math.exp(-2.0 * a))
    return math.log(math.sinh(a))


def log_u(q: float, i: int) -> float:
    """Natural log of ``U_i(q)``; finite for any i."""
    _check_q(q)
    if i < 0:
        raise ValueError("i must be non-negative")
    if i == 0:
        return 0.0
    h = _half_log_sigma(q)
    return _log_sinh((2 * i + 1) * h) - _log_sinh(h)


def u_sandwich(q: float, j: int) -> tuple[float, float]:
    """Bounds ``lower <= U_{j-1}(q) <= upper`` for ``j >= 2``."""
    _check_q(q)
    if j < 2:
        raise DomainError("the sandwich needs j >= 2")
    e = j - 2
    lower = (q - 1.0) * (q - 2.0 - 1.0 / (q - 3.0)) ** e
    upper = (q - 1.0) * (q - 2.0 - 1.0 / q) ** e
    return lower, upper


def log_u_sandwich(q: float, j: int) -> tuple[float, float]:
    _check_q(q)
    if j < 2:
        raise DomainError("the sandwich needs j >= 2")
    e = j - 2
    return (math.log(q - 1.0) + e * math.log(q - 2.0 - 1.0 / (q - 3.0)),
            math.log(q - 1.0) + e * math.log(q - 2.0 - 1.0 / q))


def log_gamma_upper_bound(pr: PerronResult, report: RatioReport, j: int) -> float:
    """Log of ``U_{j-1}(q1) / x_{v_j}``, with x rescaled so that the path end
    ``v_k = report.vmax`` has entry exactly 1."""
    _check_q(pr.q1)
    k = len(report.path)
    if not 1 <= j <= k:
        raise ValueError(f"j must lie in [1, {k}], got {j}")
    x = pr.x_max1
    xj = x[report.path[j - 1]] / x[report.vmax]
    return log_u(pr.q1, j - 1) - math.log(xj)


def gamma_upper_bound(g: Graph, pr: PerronResult, report: RatioReport, j: int) -> float:
    """Upper bound on gamma(g) from the first j vertices of the min-to-max path.

    Tight when ``path[:j]`` is a pendant path.  Returns ``inf`` when the
    bound does not fit in binary64.
    """
    lg = log_gamma_upper_bound(pr, report, j)
    return math.exp(lg) if lg < _LOG_MAX else math.inf


def kite_q1(n: int, k: int, tol: float = 1e-12) -> float:
    # only q1 is needed, so the slow tail entries may stay unconverged
    return perron(build_kite(KiteParams(n, k)), tol, entrywise=False).q1


def _check_kite(n: int, k: int) -> None:
    KiteParams(n, k)
    if k > 1 and n - k + 1 < 3:
        raise DomainError("kite_gamma needs a clique on at least 3 vertices")


def kite_gamma(n: int, k: int, mode: str = "linear", tol: float = 1e-12) -> float:
    """gamma of the kite from ``U_{k-1}(q1)``; ``mode='log'`` returns log gamma."""
    if mode not in ("linear", "log"):
        raise ValueError(f"unknown mode {mode!r}")
    _check_kite(n, k)
    if k == 1:
        return 1.0 if mode == "linear" else 0.0
    q = kite_q1(n, k, tol)
    if mode == "log":
        return log_u(q, k - 1)
    return u_closed_form(q, k - 1)


def best_kite_k(n: int, mode: str = "log", tol: float = 1e-12) -> tuple[int, float]:
    """Scan every 2 <= k <= n-2 and return ``(k_star, log gamma)``.

    Ties go to the smaller k.  Unimodality in k is not assumed.
    """
    if n < 4:
        raise DomainError("best_kite_k needs n >= 4")
    best_k, best = 0, -math.inf
    for k in range(2, n - 1):
        val = kite_gamma(n, k, mode, tol)
        lg = val if mode == "log" else math.log(val)
        if lg > best:
            best_k, best = k, lg
    return best_k, best
