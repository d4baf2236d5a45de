import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from kiteratio import kite_math as km
from kiteratio.errors import DomainError, OverflowDomainError
from kiteratio.graph_core import build_kite, build_named
from kiteratio.spectral import perron, principal_ratio

from oracles import mp_kite_perron, mp_sigma, mp_u, mp_u_sigma

# (q, i) spot points; expected log U_i frozen from the 200-bit recurrence oracle
LOG_U_FROZEN = {
    (50.0, 10000): 38707.6880655228365553588550516,
    (4.01, 500): 52.3317543524115374643788107453,
    (1000.0, 3): 20.7182593242504202912803223718,
}

SPOT_Q = [4.0001, 4.01, 4.1, 4.5, 5.0, 6.0, 7.25, 10.0, 13.3, 20.0, 50.0, 100.0, 999.0]
SPOT_I = [0, 1, 2, 5, 17, 40]

qs = st.floats(4.0 + 1e-6, 1e3, allow_nan=False)


def test_sigma_examples():
    assert km.sigma(4.5).sigma == 2.0
    assert km.sigma(6.0).sigma == pytest.approx(2 + math.sqrt(3), rel=1e-15)
    assert km.sigma(4 + 1e-12).sigma == pytest.approx(1.0, abs=1e-5)
    for bad in (4.0, 3.9, 0.0, -1.0):
        with pytest.raises(DomainError):
            km.sigma(bad)


@pytest.mark.parametrize("q", [4.01, 4.5, 5.0, 10.0, 100.0])
def test_sigma_identity_spot(q):
    s = km.sigma(q).sigma
    assert s > 1
    assert s + 1 / s == pytest.approx(q - 2, abs=1e-12 * q)
    assert s == pytest.approx(float(mp_sigma(q)), rel=1e-14)


def test_sigma_identity_random(rng):
    for q in rng.uniform(4, 1e3, 1000):
        if q <= 4:
            continue
        s = km.sigma(q).sigma
        assert abs(s + 1 / s - (q - 2)) <= 1e-12 * q


def test_u_recurrence_examples():
    assert km.u_recurrence(4.5, 3).values == (1.0, 3.5, 7.75, 15.875)
    assert km.u_recurrence(5.0, 1).values == (1.0, 4.0)
    assert km.u_recurrence(7.0, 0).values == (1.0,)
    for q in (4.5, 6.0, 11.0):
        assert km.u_recurrence(q, 2).values[2] == pytest.approx(q * q - 3 * q + 1, rel=1e-15)
    with pytest.raises(OverflowDomainError):
        km.u_recurrence(100.0, 400)


def test_closed_form_examples():
    assert km.u_closed_form(4.5, 2) == pytest.approx(7.75, rel=1e-14)
    assert km.u_closed_form(4.5, 3) == pytest.approx(15.875, rel=1e-14)
    assert km.u_closed_form(4.5, 0) == 1.0
    assert km.u_closed_form(123.0, 0) == 1.0
    with pytest.raises(DomainError):
        km.u_closed_form(4.0, 3)
    with pytest.raises(OverflowDomainError):
        km.u_closed_form(100.0, 400)


@pytest.mark.parametrize("q", SPOT_Q)
def test_closed_form_against_200bit_oracle(q):
    for i in SPOT_I:
        ref = mp_u(q, i)
        assert mp_u_sigma(q, i) == pytest.approx(ref, rel=mpmath.mpf(10) ** -50)
        assert km.u_closed_form(q, i) == pytest.approx(float(ref), rel=1e-12)
        assert km.log_u(q, i) == pytest.approx(float(mpmath.log(ref)), abs=1e-12)


@pytest.mark.parametrize("key", sorted(LOG_U_FROZEN))
def test_log_u_frozen(key):
    q, i = key
    assert km.log_u(q, i) == pytest.approx(LOG_U_FROZEN[key], rel=1e-13)


def test_log_u_examples():
    assert km.log_u(4.5, 2) == pytest.approx(math.log(7.75), abs=1e-12)
    assert km.log_u(9.0, 0) == 0.0
    s = km.sigma(50.0).sigma
    # the O(1) remainder is log(1 + 1/sigma) - log(sigma - 1/sigma)
    rest = math.log1p(1 / s) - math.log(s - 1 / s)
    assert km.log_u(50.0, 10000) == pytest.approx(10001 * math.log(s) + rest, rel=1e-13)


@given(qs, st.integers(0, 40))
def test_closed_form_matches_recurrence(q, i):
    rec = km.u_recurrence(q, i).values[i]
    assert abs(km.u_closed_form(q, i) - rec) <= 1e-10 * rec
    assert math.exp(km.log_u(q, i)) == pytest.approx(km.u_closed_form(q, i), rel=1e-10)


@given(qs, st.integers(0, 60))
def test_u_monotone(q, i):
    assert km.u_closed_form(q, i + 1) > km.u_closed_form(q, i)
    assert km.log_u(q * 1.01 + 0.01, i + 1) > km.log_u(q, i + 1)


def test_u_monotone_grid():
    grid_q = np.linspace(4.05, 60, 40)
    table = np.array([km.u_recurrence(q, 30).values for q in grid_q])
    assert (np.diff(table, axis=1) > 0).all()
    assert (np.diff(table[:, 1:], axis=0) > 0).all()


def test_sandwich_examples():
    lo, hi = km.u_sandwich(4.5, 3)
    assert lo == pytest.approx(6.4166667, abs=1e-6)
    assert hi == pytest.approx(7.9722222, abs=1e-6)
    assert lo <= 7.75 <= hi
    for q in (4.2, 7.0, 31.0):
        assert km.u_sandwich(q, 2) == (q - 1, q - 1)
    lo, hi = km.u_sandwich(10.0, 5)
    assert lo <= 4401.0 <= hi
    with pytest.raises(DomainError):
        km.u_sandwich(5.0, 1)


@given(qs, st.integers(2, 30))
def test_sandwich_brackets(q, j):
    lo, hi = km.u_sandwich(q, j)
    u = km.u_recurrence(q, j - 1).values[-1]
    assert lo <= u * (1 + 1e-12) and u <= hi * (1 + 1e-12)
    llo, lhi = km.log_u_sandwich(q, j)
    assert llo == pytest.approx(math.log(lo)) and lhi == pytest.approx(math.log(hi))


def test_sandwich_against_oracle():
    for q in SPOT_Q:
        for j in (2, 3, 7, 20):
            ref = mp_u(q, j - 1)
            lo, hi = km.u_sandwich(q, j)
            assert lo <= float(ref) * (1 + 1e-14) and float(ref) <= hi * (1 + 1e-14)


# -- graph-facing pieces -----------------------------------------------------

def _bound(g, j):
    pr = perron(g)
    rep = principal_ratio(g, pr=pr)
    return km.gamma_upper_bound(g, pr, rep, j), rep


def test_bound_equality_on_kite():
    b, rep = _bound(build_kite((8, 5)), 5)
    assert rep.path == (0, 1, 2, 3, 4)
    assert b == pytest.approx(rep.gamma, rel=1e-8)


def test_bound_at_path_end_is_u():
    g = build_kite((9, 3)).with_edge(0, 5)
    pr = perron(g)
    rep = principal_ratio(g, pr=pr)
    k = len(rep.path)
    assert km.gamma_upper_bound(g, pr, rep, k) == pytest.approx(km.u_closed_form(pr.q1, k - 1))
    assert km.gamma_upper_bound(g, pr, rep, k) >= rep.gamma * (1 - 1e-8)


def test_bound_on_paw():
    g = build_kite((4, 2))
    b, rep = _bound(g, 2)
    pr = perron(g)
    assert b == pytest.approx((pr.q1 - 1) / pr.x_max1[1])
    assert b >= rep.gamma * (1 - 1e-8)


def test_bound_domain():
    g = build_named("path", 5)
    pr = perron(g)
    with pytest.raises(DomainError):
        km.gamma_upper_bound(g, pr, principal_ratio(g, pr=pr), 1)


@pytest.mark.parametrize("n", range(5, 11))
def test_bound_equality_on_kites(n):
    for k in range(2, n - 1):
        b, rep = _bound(build_kite((n, k)), k)
        assert b == pytest.approx(rep.gamma, rel=1e-8)


def test_kite_gamma_examples():
    assert km.kite_gamma(4, 2) == pytest.approx((3 + math.sqrt(17)) / 2, abs=1e-9)
    assert km.kite_gamma(7, 1) == 1.0
    assert km.kite_gamma(7, 1, "log") == 0.0
    g12 = principal_ratio(build_kite((12, 6))).gamma
    assert km.kite_gamma(12, 6) == pytest.approx(g12, rel=1e-8)
    assert km.kite_gamma(12, 6, "log") == pytest.approx(math.log(g12), abs=1e-8)
    with pytest.raises(DomainError):
        km.kite_gamma(6, 5)
    with pytest.raises(OverflowDomainError):
        km.kite_gamma(300, 250, "linear")
    assert math.isfinite(km.kite_gamma(300, 250, "log"))


# ten kites: binary64 route vs a 200-bit eigensolve
ORACLE_KITES = [(5, 2), (5, 3), (6, 3), (7, 4), (8, 5), (9, 3), (9, 6), (10, 2), (10, 6), (10, 7)]


@pytest.mark.parametrize("n,k", ORACLE_KITES)
def test_kite_gamma_against_200bit_eigensolve(n, k):
    q_ref, gamma_ref = mp_kite_perron(n, k)
    assert km.kite_q1(n, k) == pytest.approx(float(q_ref), rel=1e-13)
    assert km.kite_gamma(n, k) == pytest.approx(float(gamma_ref), rel=1e-8)
    assert principal_ratio(build_kite((n, k))).gamma == pytest.approx(float(gamma_ref), rel=1e-8)


@pytest.mark.parametrize("n", [4, 5, 6, 7, 9])
def test_best_kite_k_matches_exhaustive(n):
    # independent route: Perron vectors of every kite rather than U_{k-1}
    gammas = {k: principal_ratio(build_kite((n, k))).gamma for k in range(2, n - 1)}
    want = max(gammas, key=lambda k: (gammas[k], -k))
    k, lg = km.best_kite_k(n)
    assert k == want
    assert lg == pytest.approx(math.log(gammas[k]), abs=1e-8)


def test_best_kite_k_small():
    assert km.best_kite_k(4)[0] == 2
    assert km.best_kite_k(6)[0] == 3
    with pytest.raises(DomainError):
        km.best_kite_k(3)


def test_best_kite_k_linear_mode_agrees():
    assert km.best_kite_k(20, "linear") == pytest.approx(km.best_kite_k(20, "log"), rel=1e-12)


def test_best_kite_k_gap_band_n100():
    k, _ = km.best_kite_k(100)
    assert 0.5 <= (100 - k) * math.log(100) / 100 <= 2.0
