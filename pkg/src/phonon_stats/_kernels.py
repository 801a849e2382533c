"""Low-level summation kernels for the reciprocal-gamma series.

Everything here evaluates sums of the shape

    S_j(nu, x) = sum_{k>=0} w_j(k) * x**k / Gamma(nu + k)

and the per-level population sums

    T_m(nu, y) = sum_{k>=m} [k!/(k-m)!] * y**k / Gamma(nu + k)

in log space: terms are generated as ``exp(k*log(x) - lgamma(nu+k))`` relative
to a running peak, because at large ``x`` the terms span hundreds of orders of
magnitude. All summands are nonnegative, and the term sequence is strictly
log-concave in ``k`` (term ratios are products of decreasing positive factors),
so the peak is unique: "past the peak" is detected exactly by the first
non-increasing term, and termination applies the relative tolerance only there.

Two interchangeable lanes:

* a numba lane — scalar ``@njit`` loops, one ``math.lgamma`` per term, online
  peak rescaling, Kahan-compensated accumulation;
* a numpy lane — chunked vectorized terms via ``scipy.special.gammaln``, the
  analytic peak as the shift, ascending sort + pairwise sum per chunk, chunk
  partials combined with ``math.fsum``.

The numba lane is the default when numba imports; set the environment variable
``PHONON_STATS_NO_NUMBA=1`` to force the numpy lane. The lanes agree to
~1e-13 relative at moderate arguments (pinned by tests), degrading to ~1e-10
by x ~ 1e5 where ulp-level lgamma disagreement on ~1e6-sized values stops
cancelling; ``terms_used`` may differ (the numpy lane evaluates a small
analytic overshoot past the peak).
"""

from __future__ import annotations

import math
import os

import numpy as np
from scipy.special import gammaln

_NINF = float("-inf")

try:
    if os.environ.get("PHONON_STATS_NO_NUMBA", "").strip() not in ("", "0"):
        raise ImportError("numba disabled via PHONON_STATS_NO_NUMBA")
    from numba import njit

    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False

    def njit(*args, **kwargs):  # no-op decorator so the source below still defines
        if args and callable(args[0]):
            return args[0]

        def wrap(func):
            return func

        return wrap


# ---------------------------------------------------------------------------
# numba lane (compiled when available; the undecorated python versions are
# never used directly — the numpy lane below is the fallback)
# ---------------------------------------------------------------------------


@njit(cache=True)
def _series_logsums_scalar(nu, x, rel_tol, max_terms):
    if x == 0.0:
        return -math.lgamma(nu), _NINF, _NINF, 1, True
    lx = math.log(x)
    shift = -math.lgamma(nu)  # log of the k = 0 term
    s0 = 1.0
    c0 = 0.0
    s1 = 0.0
    c1 = 0.0
    s2 = 0.0
    c2 = 0.0
    prev_ell = shift
    past_peak = False
    k = 1
    while k <= max_terms:
        ell = k * lx - math.lgamma(nu + k)
        if ell <= prev_ell:
            past_peak = True
        if ell > shift:
            f = math.exp(shift - ell)
            s0 *= f
            c0 *= f
            s1 *= f
            c1 *= f
            s2 *= f
            c2 *= f
            shift = ell
        t = math.exp(ell - shift)
        kf = float(k)
        w1 = kf * t
        w2 = kf * (kf - 1.0) * t
        # Kahan updates
        y = t - c0
        tmp = s0 + y
        c0 = (tmp - s0) - y
        s0 = tmp
        y = w1 - c1
        tmp = s1 + y
        c1 = (tmp - s1) - y
        s1 = tmp
        y = w2 - c2
        tmp = s2 + y
        c2 = (tmp - s2) - y
        s2 = tmp
        if past_peak and t <= rel_tol * s0 and w1 <= rel_tol * s1 and w2 <= rel_tol * s2:
            l1 = math.log(s1) + shift if s1 > 0.0 else _NINF
            l2 = math.log(s2) + shift if s2 > 0.0 else _NINF
            return math.log(s0) + shift, l1, l2, k + 1, True
        prev_ell = ell
        k += 1
    l1 = math.log(s1) + shift if s1 > 0.0 else _NINF
    l2 = math.log(s2) + shift if s2 > 0.0 else _NINF
    return math.log(s0) + shift, l1, l2, max_terms + 1, False


@njit(cache=True)
def _population_logsums_scalar(nu, y, m_max, rel_tol, max_terms):
    out = np.empty(m_max + 1, dtype=np.float64)
    if y == 0.0:
        out[0] = -math.lgamma(nu)
        for m in range(1, m_max + 1):
            out[m] = _NINF
        return out, 1, True
    ly = math.log(y)
    total = 0
    converged = True
    for m in range(m_max + 1):
        # substitute j = k - m; the j = 0 term seeds the accumulator
        shift = math.lgamma(m + 1.0) + m * ly - math.lgamma(nu + m)
        acc = 1.0
        comp = 0.0
        prev_ell = shift
        past_peak = False
        j = 1
        done = False
        while j <= max_terms:
            mj = m + j
            ell = (
                math.lgamma(mj + 1.0)
                - math.lgamma(j + 1.0)
                + mj * ly
                - math.lgamma(nu + mj)
            )
            if ell <= prev_ell:
                past_peak = True
            if ell > shift:
                f = math.exp(shift - ell)
                acc *= f
                comp *= f
                shift = ell
            t = math.exp(ell - shift)
            yk = t - comp
            tmp = acc + yk
            comp = (tmp - acc) - yk
            acc = tmp
            if past_peak and t <= rel_tol * acc:
                done = True
                total += j + 1
                break
            prev_ell = ell
            j += 1
        if not done:
            total += max_terms + 1
            converged = False
        out[m] = math.log(acc) + shift
    return out, total, converged


# ---------------------------------------------------------------------------
# numpy lane
# ---------------------------------------------------------------------------

_CHUNK = 1 << 18


def _series_logsums_numpy(nu, x, rel_tol, max_terms):
    if x == 0.0:
        return -math.lgamma(nu), _NINF, _NINF, 1, True
    lx = math.log(x)
    kc = max(x - nu + 0.5, 0.0)  # stationary point of k*lx - lgamma(nu+k)
    cand = {0, int(kc), int(kc) + 1, max(int(kc) - 1, 0)}
    gmax = max(k * lx - math.lgamma(nu + k) for k in cand)
    n_hi = int(min(max_terms, math.ceil(kc + 12.0 * math.sqrt(x + 10.0) + 60.0)))
    while True:
        p0 = []
        p1 = []
        p2 = []
        t_last = w1_last = w2_last = 0.0
        for start in range(0, n_hi + 1, _CHUNK):
            k = np.arange(start, min(start + _CHUNK, n_hi + 1), dtype=np.float64)
            ell = k * lx - gammaln(nu + k)
            e = np.exp(ell - gmax)
            p0.append(np.sort(e).sum())
            p1.append(np.sort(k * e).sum())
            p2.append(np.sort(k * (k - 1.0) * e).sum())
            t_last = e[-1]
            w1_last = k[-1] * e[-1]
            w2_last = k[-1] * (k[-1] - 1.0) * e[-1]
        s0 = math.fsum(p0)
        s1 = math.fsum(p1)
        s2 = math.fsum(p2)
        ok = (
            n_hi > kc
            and t_last <= rel_tol * s0
            and w1_last <= rel_tol * s1
            and w2_last <= rel_tol * s2
        )
        if ok:
            l1 = math.log(s1) + gmax if s1 > 0.0 else _NINF
            l2 = math.log(s2) + gmax if s2 > 0.0 else _NINF
            return math.log(s0) + gmax, l1, l2, n_hi + 1, True
        if n_hi >= max_terms:
            l1 = math.log(s1) + gmax if s1 > 0.0 else _NINF
            l2 = math.log(s2) + gmax if s2 > 0.0 else _NINF
            return math.log(s0) + gmax, l1, l2, n_hi + 1, False
        n_hi = int(min(max_terms, 2 * n_hi))


def _population_logsums_numpy(nu, y, m_max, rel_tol, max_terms):
    out = np.empty(m_max + 1, dtype=np.float64)
    if y == 0.0:
        out[0] = -math.lgamma(nu)
        out[1:] = _NINF
        return out, 1, True
    ly = math.log(y)
    total = 0
    converged = True
    for m in range(m_max + 1):
        # peak j* of lgamma(m+j+1) - lgamma(j+1) + (m+j)ly - lgamma(nu+m+j):
        # term ratio = 1 gives (j+1)(nu+m+j) = y(m+j+1)
        bq = nu + m + 1.0 - y
        cq = nu + m - y * (m + 1.0)
        disc = bq * bq - 4.0 * cq
        jc = max(0.0, 0.5 * (-bq + math.sqrt(disc))) if disc > 0.0 else 0.0

        def _ell(jj):
            return (
                gammaln(m + jj + 1.0)
                - gammaln(jj + 1.0)
                + (m + jj) * ly
                - gammaln(nu + m + jj)
            )

        cand = np.unique(
            np.array([0.0, np.floor(jc), np.ceil(jc), np.floor(jc) + 1.0])
        )
        gmax = float(np.max(_ell(cand)))
        n_hi = int(min(max_terms, math.ceil(jc + 12.0 * math.sqrt(y + m + 10.0) + 60.0)))
        while True:
            parts = []
            t_last = 0.0
            for start in range(0, n_hi + 1, _CHUNK):
                j = np.arange(start, min(start + _CHUNK, n_hi + 1), dtype=np.float64)
                e = np.exp(_ell(j) - gmax)
                parts.append(np.sort(e).sum())
                t_last = e[-1]
            s = math.fsum(parts)
            if n_hi > jc and t_last <= rel_tol * s:
                total += n_hi + 1
                break
            if n_hi >= max_terms:
                total += n_hi + 1
                converged = False
                break
            n_hi = int(min(max_terms, 2 * n_hi))
        out[m] = math.log(s) + gmax
    return out, total, converged


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

if HAS_NUMBA:
    _series_impl = _series_logsums_scalar
    _population_impl = _population_logsums_scalar
else:
    _series_impl = _series_logsums_numpy
    _population_impl = _population_logsums_numpy


def series_logsums(nu, x, rel_tol=1e-18, max_terms=10_000_000):
    """Return (log_s0, log_s1, log_s2, terms_used, converged) for S_j(nu, x)."""
    return _series_impl(float(nu), float(x), float(rel_tol), int(max_terms))


def population_logsums(nu, y, m_max, rel_tol=1e-18, max_terms=10_000_000):
    """Return (log_T[0..m_max], terms_used, converged) for the population sums."""
    return _population_impl(float(nu), float(y), int(m_max), float(rel_tol), int(max_terms))


def series_logsums_numpy(nu, x, rel_tol=1e-18, max_terms=10_000_000):
    """numpy lane, always available (benchmarks / lane-equivalence tests)."""
    return _series_logsums_numpy(float(nu), float(x), float(rel_tol), int(max_terms))


def population_logsums_numpy(nu, y, m_max, rel_tol=1e-18, max_terms=10_000_000):
    return _population_logsums_numpy(float(nu), float(y), int(m_max), float(rel_tol), int(max_terms))


series_logsums_numba = _series_logsums_scalar if HAS_NUMBA else None
population_logsums_numba = _population_logsums_scalar if HAS_NUMBA else None
