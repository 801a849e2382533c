"""Numerically stable special functions and series sums.

The central object is the triple of reciprocal-gamma series

    S_j(nu, x) = sum_{k>=0} w_j(k) x^k / Gamma(nu + k),
    w_0 = 1,  w_1 = k,  w_2 = k(k-1),

from which the steady-state mean phonon number and second-order correlation
of the two-phonon-damped oscillator follow as ratios. At the parameter values
of interest ``x`` reaches 1e6 and beyond, so the sums are computed entirely in
log space (see :mod:`phonon_stats._kernels`) and returned in log-magnitude
form. All three sums are nonnegative for ``nu > 0, x >= 0``, so no sign
bookkeeping is needed; ratios formed from the logs can never overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import scipy.special as _sps

from . import _kernels
from .errors import DomainError, NotConverged

__all__ = ["SeriesSums", "log_gamma", "erfcx", "recip_gamma_series"]


@dataclass(frozen=True)
class SeriesSums:
    """Log-magnitude values of S_0, S_1, S_2 plus convergence metadata.

    ``log_s1``/``log_s2`` are ``-inf`` when the corresponding sum is zero
    (only at ``x = 0``, where just the ``k = 0`` term survives). The linear
    properties ``s0``/``s1``/``s2`` may overflow to ``inf`` for large ``x``;
    downstream code forms ratios from the logs instead.

    ``terms_used`` counts evaluated terms and is lane-dependent diagnostics,
    not a contract (the vectorized lane evaluates a small overshoot past the
    term peak).
    """

    log_s0: float
    log_s1: float
    log_s2: float
    terms_used: int
    converged: bool

    @property
    def s0(self) -> float:
        return math.exp(self.log_s0)

    @property
    def s1(self) -> float:
        return math.exp(self.log_s1)

    @property
    def s2(self) -> float:
        return math.exp(self.log_s2)


def log_gamma(x: float) -> float:
    """Natural log of the gamma function for x > 0.

    Thin, domain-checked wrapper over the platform ``lgamma`` (relative error
    at the 1e-15 level across [1e-3, 1e6], comfortably inside the 1e-13
    budget the series kernels assume).
    """
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"log_gamma requires x > 0, got {x!r}")
    return math.lgamma(x)


def erfcx(x: float) -> float:
    """Scaled complementary error function exp(x^2) * erfc(x) for x >= 0.

    Evaluated via scipy's Cephes/Faddeeva implementation (relative error
    below 1e-12), which is the stable form: the unscaled erfc underflows
    near x ~ 27 while erfcx decays only like 1/(x sqrt(pi)).
    """
    x = float(x)
    if not math.isfinite(x) or x < 0.0:
        raise DomainError(f"erfcx requires x >= 0, got {x!r}")
    return float(_sps.erfcx(x))


def recip_gamma_series(
    nu: float,
    x: float,
    *,
    rel_tol: float = 1e-18,
    max_terms: int = 10_000_000,
) -> SeriesSums:
    """Evaluate S_0, S_1, S_2 at (nu, x) in log space.

    Parameters
    ----------
    nu : float
        Shift of the gamma argument; must be positive. In the steady-state
        application nu = (1 + 2 n_th) / C.
    x : float
        Series argument; must be nonnegative. In the application
        x = 2 n_th / C, which can be enormous in the high-temperature regime.
    rel_tol : float
        Termination threshold: summation stops once a term past the (unique)
        peak contributes less than ``rel_tol`` relative to each running sum.
    max_terms : int
        Term cap; reaching it raises :class:`NotConverged`. The cap signals
        a pathological ``x`` for which the high-temperature closed forms are
        the intended route.

    Returns
    -------
    SeriesSums
    """
    nu = float(nu)
    x = float(x)
    if not math.isfinite(nu) or nu <= 0.0:
        raise DomainError(f"recip_gamma_series requires nu > 0, got {nu!r}")
    if not math.isfinite(x) or x < 0.0:
        raise DomainError(f"recip_gamma_series requires x >= 0, got {x!r}")
    if max_terms < 1:
        raise DomainError("max_terms must be >= 1")
    l0, l1, l2, terms, ok = _kernels.series_logsums(nu, x, rel_tol, max_terms)
    sums = SeriesSums(l0, l1, l2, int(terms), bool(ok))
    if not ok:
        raise NotConverged(
            f"series at nu={nu:g}, x={x:g} did not converge within "
            f"{max_terms} terms (use the high-temperature route instead)",
            terms_used=int(terms),
        )
    return sums
