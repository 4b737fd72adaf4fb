"""Special functions for Dirichlet walks.

Everything here is a pure function.  Pochhammer symbols and hypergeometric
Taylor coefficients stay exact when given ``int`` or ``Fraction`` inputs.
Everything else is evaluated in double precision by summing the series
directly.  No analytic continuation is attempted: every series argument must
satisfy ``|z| <= Z_CAP``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np
from scipy import special

from .errors import ConvergenceError, DomainError

__all__ = [
    "Z_CAP",
    "SeriesPolicy",
    "DEFAULT_POLICY",
    "pochhammer",
    "gauss_2f1",
    "gauss_2f1_coefficients",
    "g_func",
    "l_exponent",
    "l_exponent_series",
    "f_q_closed",
    "reg_inc_beta",
]

# Series arguments are capped strictly inside the unit disc: near z = 1 the
# terms decay like z**k and the term budget would be exhausted.
Z_CAP = 1.0 - 1e-6


@dataclass(frozen=True)
class SeriesPolicy:
    """Truncation rule for every infinite series in the package."""

    rtol: float = 1e-14
    atol: float = 1e-300
    max_terms: int = 1_000_000

    def __post_init__(self):
        if not (self.rtol > 0 and self.atol > 0):
            raise DomainError("series tolerances must be positive")
        if self.max_terms < 1:
            raise DomainError("max_terms must be at least 1")


DEFAULT_POLICY = SeriesPolicy()


def _is_exact(x) -> bool:
    return isinstance(x, Rational)


def pochhammer(a, k: int):
    """Rising factorial ``a (a+1) ... (a+k-1)``.

    Exact for ``int``/``Fraction`` arguments.  Floats with ``a > 0`` and
    ``k > 64`` go through log-gamma to avoid overflowing the running product.
    """
    if k < 0 or int(k) != k:
        raise DomainError(f"pochhammer length must be a nonnegative integer, got {k!r}")
    k = int(k)
    if _is_exact(a):
        out = Fraction(1) if isinstance(a, Fraction) else 1
        for j in range(k):
            out *= a + j
        return out
    a = float(a)
    if k > 64 and a > 0:
        return math.exp(math.lgamma(a + k) - math.lgamma(a))
    out = 1.0
    for j in range(k):
        out *= a + j
    return out


def _check_c(c) -> None:
    if c <= 0 and float(c).is_integer():
        raise DomainError(f"2F1 lower parameter c={c} is a nonpositive integer")


def gauss_2f1(a: float, b: float, c: float, z: float, policy: SeriesPolicy = DEFAULT_POLICY) -> float:
    """Gauss hypergeometric series ``2F1(a, b; c; z)`` for ``|z| <= Z_CAP``.

    Summation stops once a geometric bound on the remaining tail falls below
    ``policy.rtol * |sum| + policy.atol``.  When ``a`` or ``b`` is a
    nonpositive integer the series is a polynomial and is summed exactly to
    its last term.
    """
    _check_c(c)
    a, b, c, z = float(a), float(b), float(c), float(z)
    if not abs(z) < 1.0:
        raise DomainError(f"2F1 series needs |z| < 1, got z={z}")
    if abs(z) > Z_CAP:
        raise DomainError(f"|z|={abs(z)} exceeds the series cap {Z_CAP}")
    if z == 0.0:
        return 1.0
    # past this index every ratio has settled towards z
    settle = abs(a) + abs(b) + abs(c)
    total = 1.0
    term = 1.0
    for k in range(policy.max_terms):
        num = (a + k) * (b + k)
        if num == 0.0:
            return total
        term *= num / ((c + k) * (k + 1)) * z
        total += term
        if k + 1 < settle:
            continue
        nxt = abs(z * (a + k + 1) * (b + k + 1) / ((c + k + 1) * (k + 2)))
        rho = max(nxt, abs(z))
        if rho < 1.0 and abs(term) * rho / (1.0 - rho) <= policy.rtol * abs(total) + policy.atol:
            return total
    raise ConvergenceError(
        f"2F1({a}, {b}; {c}; {z}) not converged after {policy.max_terms} terms"
    )


def gauss_2f1_coefficients(a, b, c, order: int) -> list:
    """Taylor coefficients ``[z^0 .. z^order]`` of ``2F1(a, b; c; z)``.

    Exact when the parameters are ``int``/``Fraction``.
    """
    _check_c(c)
    if _is_exact(a) and _is_exact(b) and _is_exact(c):
        a, b, c = Fraction(a), Fraction(b), Fraction(c)
        coef = Fraction(1)
    else:
        a, b, c = float(a), float(b), float(c)
        coef = 1.0
    out = [coef]
    for k in range(order):
        coef = coef * (a + k) * (b + k) / ((c + k) * (k + 1))
        out.append(coef)
    return out


def g_func(z: float) -> float:
    """``G(z) = 2 / (1 + sqrt(1 - z))`` for ``z <= 1``."""
    z = float(z)
    if z > 1.0:
        raise DomainError(f"G(z) needs z <= 1, got {z}")
    return 2.0 / (1.0 + math.sqrt(1.0 - z))


def _check_unit_interval(z: float) -> float:
    z = float(z)
    if not 0.0 <= z < 1.0:
        raise DomainError(f"expected 0 <= z < 1, got {z}")
    if z > Z_CAP:
        raise DomainError(f"z={z} exceeds the series cap {Z_CAP}")
    return z


def l_exponent_series(d: int, z: float, policy: SeriesPolicy = DEFAULT_POLICY) -> float:
    """Direct summation of ``L_d(z) = 1/2 sum_{k>=1} (1/2)_k/(d/2)_k z^k/k``."""
    if d < 1:
        raise DomainError(f"dimension must be >= 1, got {d}")
    z = _check_unit_interval(z)
    if z == 0.0:
        return 0.0
    half_d = d / 2.0
    ratio = 1.0  # (1/2)_k / (d/2)_k * z^k
    total = 0.0
    for k in range(1, policy.max_terms + 1):
        ratio *= (k - 0.5) / (half_d + k - 1) * z
        term = 0.5 * ratio / k
        total += term
        # term ratio is below z once k >= 1 for d >= 1
        if term * z / (1.0 - z) <= policy.rtol * total + policy.atol:
            return total
    raise ConvergenceError(f"L_{d}({z}) not converged after {policy.max_terms} terms")


def l_exponent(d: int, z: float, policy: SeriesPolicy = DEFAULT_POLICY) -> float:
    """Exponent of the limit transform, ``T_Q -> exp(Q L_d(z))``.

    Closed forms for ``d`` in 1, 2, 3; series summation otherwise.
    """
    if d < 1:
        raise DomainError(f"dimension must be >= 1, got {d}")
    z = _check_unit_interval(z)
    if d == 1:
        return -0.5 * math.log1p(-z)
    if d == 2:
        return math.log(g_func(z))
    if d == 3:
        t = math.sqrt(z)
        if t < 1e-4:
            return l_exponent_series(3, z, policy)
        return (1.0 + (1.0 - t) / (2.0 * t) * math.log1p(-t)
                - (1.0 + t) / (2.0 * t) * math.log1p(t))
    return l_exponent_series(d, z, policy)


def f_q_closed(Q: float, t: float) -> float:
    """``f_Q(t) = 1/2 int_{-1}^{1} (1 + u t)^{-Q} du`` in closed form."""
    Q, t = float(Q), float(t)
    if Q <= 0:
        raise DomainError(f"Q must be positive, got {Q}")
    if not abs(t) < 1.0:
        raise DomainError(f"f_Q needs |t| < 1, got {t}")
    if abs(t) < 1e-4:
        # even Taylor terms (Q)_{2m} t^{2m} / ((2m)! (2m+1)), m = 0..3
        out = 0.0
        for m in range(4):
            out += pochhammer(Q, 2 * m) / math.factorial(2 * m) / (2 * m + 1) * t ** (2 * m)
        return out
    if Q == 1.0:
        return (math.log1p(t) - math.log1p(-t)) / (2.0 * t)
    return ((1.0 + t) ** (1.0 - Q) - (1.0 - t) ** (1.0 - Q)) / (2.0 * t * (1.0 - Q))


def reg_inc_beta(p: float, q: float, x):
    """Regularized incomplete beta ``I_x(p, q)``; ``x`` may be an array."""
    if not (p > 0 and q > 0):
        raise DomainError(f"beta parameters must be positive, got ({p}, {q})")
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0.0) or np.any(xa > 1.0) or np.any(np.isnan(xa)):
        raise DomainError("reg_inc_beta needs 0 <= x <= 1")
    out = special.betainc(float(p), float(q), xa)
    return float(out) if out.ndim == 0 else out
