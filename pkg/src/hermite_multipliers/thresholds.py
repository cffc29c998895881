"""Closed-form exponent and regularity thresholds, in exact rational arithmetic.

Every function returns a ``fractions.Fraction``.  Exponents ``p`` may be
given as int, Fraction, a string such as ``"10/3"`` or ``"inf"``, or a float
(snapped to the nearest rational with denominator <= 10**6).  ``p = inf`` is
handled explicitly with 1/p = 0.

Regularity thresholds are infima of open conditions: boundedness holds for
``s`` strictly greater than the returned value.
"""
from __future__ import annotations

import math
from fractions import Fraction

from .errors import HermiteError

INF = math.inf
HALF = Fraction(1, 2)
THETA_INFTY = Fraction(-1, 12)
FHT_SHIFT = Fraction(1, 12)

KINDS = ("gamma", "gamma-infty", "theta-infty", "s-linear-FT", "s-linear-FHT", "delta",
         "s-spectral-pp'", "s-spectral-pq", "s-multilinear")


class ThresholdError(HermiteError):
    """Query outside the ranges covered by the threshold tables."""


def as_exponent(p):
    """Normalize an exponent to a Fraction or ``math.inf``."""
    if isinstance(p, str):
        p = p.strip().lower()
        if p in ("inf", "infty", "infinity", "oo"):
            return INF
        return Fraction(p)
    if isinstance(p, float):
        if math.isinf(p) and p > 0:
            return INF
        if not math.isfinite(p):
            raise ThresholdError(f"invalid exponent {p}")
        return Fraction(p).limit_denominator(10**6)
    return Fraction(p)


def inv(p):
    """1/p with 1/inf = 0."""
    return Fraction(0) if p == INF else 1 / Fraction(p)


def conjugate(p):
    """Hoelder conjugate p' with 1' = inf and inf' = 1."""
    p = as_exponent(p)
    if p == INF:
        return Fraction(1)
    if p == 1:
        return INF
    return p / (p - 1)


def _check_n(n):
    if int(n) != n or n < 1:
        raise ThresholdError(f"dimension must be a positive integer, got {n}")
    return int(n)


def gamma(n, p):
    """Growth exponent gamma_p of ||phi_nu||_p ||phi_nu||_p'.

    Defined for p in (1, inf]; for p < 2 the value at p' is returned.
    """
    n = _check_n(n)
    p = as_exponent(p)
    if p != INF and p <= 1:
        raise ThresholdError(f"gamma needs p in (1, inf], got {p}")
    if p != INF and p < 2:
        p = conjugate(p)
    t = HALF - inv(p)
    if n == 1:
        if p <= 4:
            return Fraction(0)
        return Fraction(-1, 6) + Fraction(2, 3) * t
    p1 = Fraction(2 * (n + 3), n + 1)
    if p < p1:
        return Fraction(n - 1, 2) * t
    if p == p1:
        return Fraction(n - 1, 2 * (n + 3))
    if n == 2 or p <= Fraction(2 * n, n - 2):
        return Fraction(-1, 6) + Fraction(2 * n, 3) * t
    return Fraction(-1, 2) + n * t


def gamma_infty(n):
    return gamma(n, INF)


def theta_infty():
    """Decay exponent of sup-norms of Hermite functions."""
    return THETA_INFTY


def delta(n, p):
    """delta(p) = n |1/p - 1/2| - 1/2."""
    n = _check_n(n)
    p = as_exponent(p)
    if p != INF and p < 1:
        raise ThresholdError(f"delta needs p >= 1, got {p}")
    return n * abs(inv(p) - HALF) - HALF


def s_linear_ft(n, p, literal=False):
    """Regularity threshold s_{n,p} for pseudo-multipliers, Fourier-type norm.

    For 2 <= p < inf the value is 3n/2 + gamma_p, with the dedicated values at
    p = 2(n+3)/(n+1) (n >= 2) and p = 4 (n = 1).  For 1 < p < 2 the default is
    the dual value at p'.  ``literal=True`` instead evaluates the formulas as
    tabulated for 1 < p < 2, which keep the factor (1/2 - 1/p) unchanged.
    """
    n = _check_n(n)
    p = as_exponent(p)
    if p == INF or p <= 1:
        raise ThresholdError(f"s-linear thresholds cover 1 < p < inf, got {p}")
    base = Fraction(3 * n, 2)
    if p >= 2:
        if n == 1 and p == 4:
            return Fraction(2)
        return base + gamma(n, p)
    if not literal:
        return s_linear_ft(n, conjugate(p))
    t = HALF - inv(p)
    if n == 1:
        if p >= Fraction(4, 3):
            return base
        return Fraction(4, 3) + Fraction(2, 3) * t
    if p >= Fraction(2 * (n + 3), n + 5):
        return base + Fraction(n - 1, 2) * t
    if p >= Fraction(2 * n, n + 2):
        return base - Fraction(1, 6) + Fraction(2 * n, 3) * t
    return Fraction(3 * n - 1, 2) + n * t


def s_linear_fht(n, p, literal=False):
    """Threshold for the Fourier-Hermite type norm: s_{n,p} - 1/12."""
    return s_linear_ft(n, p, literal) - FHT_SHIFT


def s_linear_general(n, p, fht=False):
    """Uniform threshold 3n/2 (minus 1/12 for the Hermite-type norm) for 4/3 < p < 4."""
    n = _check_n(n)
    p = as_exponent(p)
    if not Fraction(4, 3) < p < 4:
        raise ThresholdError("the uniform bound covers 4/3 < p < 4")
    return Fraction(3 * n, 2) - (FHT_SHIFT if fht else 0)


def s_spectral_pp(n, p):
    """Threshold for spectral pseudo-multipliers from L^p to L^p', 1 <= p <= 2."""
    n = _check_n(n)
    p = as_exponent(p)
    if p == INF or p > 2 or p < 1:
        raise ThresholdError(f"spectral thresholds cover 1 <= p <= 2, got {p}")
    if n >= 2:
        if p <= Fraction(2 * n, n + 2):
            return Fraction(n + 1, 2) + delta(n, p)
        return Fraction(3 * n, 2)
    if p == 1:
        raise ThresholdError("n = 1 spectral thresholds need p > 1")
    if p > Fraction(4, 3):
        return 2 - inv(p)
    if p == Fraction(4, 3):
        return Fraction(3, 2)
    return 1 + inv(p) / 3


def s_spectral_pq(n, p, literal=False):
    """Threshold for L^p -> L^q, p <= q <= p', 1 < p <= 2.

    Default: the larger of the L^p -> L^p' threshold and the dual linear
    threshold.  ``literal=True`` returns the tabulated bullet values.
    """
    n = _check_n(n)
    p = as_exponent(p)
    if p == INF or p > 2 or p <= 1:
        raise ThresholdError(f"(p, q) thresholds cover 1 < p <= 2, got {p}")
    if not literal:
        return max(s_spectral_pp(n, p), s_linear_ft(n, p))
    t = HALF - inv(p)
    if n >= 2:
        if p <= Fraction(2 * n, n + 2):
            return Fraction(3 * n - 1, 2) + n * t
        return Fraction(3 * n, 2)
    if p >= Fraction(4, 3):
        return Fraction(3, 2)
    return 1 + inv(p) / 3


def s_multilinear(n, kappa, p):
    """Threshold s_{n,kappa,p} for kappa-linear pseudo-multipliers with target L^p."""
    n = _check_n(n)
    kappa = int(kappa)
    if kappa < 2:
        raise ThresholdError("multilinear thresholds need kappa >= 2")
    p = as_exponent(p)
    if p != INF and p < 1:
        raise ThresholdError(f"target exponent must be >= 1, got {p}")
    base = Fraction(3 * n * kappa, 2)
    mixed = base + Fraction((kappa - 1) * n, 4)
    if p <= 2:
        return max(base + (kappa - 1) * gamma_infty(n), mixed)
    return max(mixed, base + Fraction((n - 1) * (kappa - 1), 2) + gamma(n, p))


def s_threshold(kind, n, p=None, kappa=None, literal=False):
    """Dispatch on the query kind (see ``KINDS``)."""
    if kind == "gamma":
        return gamma(n, p)
    if kind == "gamma-infty":
        return gamma_infty(n)
    if kind == "theta-infty":
        return theta_infty()
    if kind == "delta":
        return delta(n, p)
    if kind == "s-linear-FT":
        return s_linear_ft(n, p, literal)
    if kind == "s-linear-FHT":
        return s_linear_fht(n, p, literal)
    if kind in ("s-spectral-pp'", "s-spectral-pp"):
        return s_spectral_pp(n, p)
    if kind == "s-spectral-pq":
        return s_spectral_pq(n, p, literal)
    if kind == "s-multilinear":
        if kappa is None:
            raise ThresholdError("s-multilinear needs kappa")
        return s_multilinear(n, kappa, p)
    raise ThresholdError(f"unknown threshold kind {kind!r}")


def junctions(n):
    """Interior branch points of gamma and s-linear-FT for dimension n (p >= 2)."""
    if n == 1:
        return [Fraction(4)]
    pts = [Fraction(2 * (n + 3), n + 1)]
    if n > 2:
        pts.append(Fraction(2 * n, n - 2))
    return pts


def branch_values(n, p):
    """Values of the adjacent gamma branch formulas at p (for junction checks)."""
    t = HALF - inv(p)
    if n == 1:
        return [Fraction(0), Fraction(-1, 6) + Fraction(2, 3) * t]
    return [Fraction(n - 1, 2) * t,
            Fraction(-1, 6) + Fraction(2 * n, 3) * t,
            Fraction(-1, 2) + n * t]
