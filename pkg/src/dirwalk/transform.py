"""The transform ``T_p(U)(y) = E[(1 + <y, U>)^(-p)]``: analytic, limiting and empirical.

All laws here are rotation invariant, so the analytic routes take only
``|y|``.  Directional queries exist only for the empirical estimator.
"""
from __future__ import annotations

import math
from collections import Counter
from fractions import Fraction

import numpy as np

from . import _rational as rp
from .errors import DomainError
from .exactlaw import WalkConfig
from .sampler import SampleBatch
from .specfun import (
    DEFAULT_POLICY,
    SeriesPolicy,
    gauss_2f1,
    gauss_2f1_coefficients,
    l_exponent,
    pochhammer,
)

__all__ = [
    "t_single",
    "t_walk_analytic",
    "t_limit",
    "t_empirical",
    "moments_from_transform",
    "walk_taylor_coeffs",
    "moment_taylor_coeffs",
]


def _check_norm(y_norm: float) -> float:
    y_norm = float(y_norm)
    if not 0.0 <= y_norm < 1.0:
        raise DomainError(f"need 0 <= |y| < 1, got {y_norm}")
    return y_norm


def t_single(p: float, d: int, y_norm: float, policy: SeriesPolicy = DEFAULT_POLICY) -> float:
    """Transform of a single uniform direction on the sphere."""
    if not p > 0:
        raise DomainError(f"p must be positive, got {p}")
    y_norm = _check_norm(y_norm)
    p = float(p)
    return gauss_2f1(p / 2, (p + 1) / 2, d / 2, y_norm * y_norm, policy)


def t_walk_analytic(config: WalkConfig, y_norm: float, policy: SeriesPolicy = DEFAULT_POLICY) -> float:
    """``T_Q(W)`` for ``Q = sum q_j``: the product of single-step factors."""
    y_norm = _check_norm(y_norm)
    out = 1.0
    for q, mult in Counter(config.qs).items():
        out *= t_single(q, config.d, y_norm, policy) ** mult
    return out


def t_limit(Q: float, d: int, y_norm: float, policy: SeriesPolicy = DEFAULT_POLICY) -> float:
    """Limit of ``T_Q(W)`` as the walk is split into ``n -> oo`` equal pieces."""
    if not Q > 0:
        raise DomainError(f"Q must be positive, got {Q}")
    y_norm = _check_norm(y_norm)
    return math.exp(float(Q) * l_exponent(d, y_norm * y_norm, policy))


def t_empirical(batch: SampleBatch, p: float, y) -> tuple:
    """Sample mean and standard error of ``(1 + <y, W>)^(-p)`` over a batch."""
    y = np.asarray(y, dtype=float).reshape(-1)
    if y.shape[0] != batch.d:
        raise DomainError(f"y has dimension {y.shape[0]}, batch has {batch.d}")
    if not np.linalg.norm(y) < 1.0:
        raise DomainError("need |y| < 1")
    if len(batch) == 0:
        raise DomainError("empty batch")
    vals = (1.0 + batch.points @ y) ** (-float(p))
    if len(vals) < 2:
        return float(vals[0]), 0.0
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(len(vals)))


def _half(x):
    return Fraction(x) / 2 if isinstance(x, (int, Fraction)) else x / 2


def moments_from_transform(form: str, a, b, d: int, k: int):
    """Even moments ``E(R^(2k))`` implied by a transform of closed form.

    ``"FD"``: ``T_a = (1 - z)^(-b)``; ``"FD1"``: ``T_a = G(z)^b``;
    ``"FD2"``: ``T_a = G(z)^(b-1) / sqrt(1 - z)``.
    """
    if not (a > 0 and b > 0) or d < 1 or k < 0:
        raise DomainError(f"invalid arguments a={a}, b={b}, d={d}, k={k}")
    half_d = Fraction(d, 2)
    if form == "FD":
        return (pochhammer(b, k) * pochhammer(half_d, k)
                / (pochhammer(_half(a), k) * pochhammer(_half(a + 1), k)))
    if form == "FD1":
        return pochhammer(b, 2 * k) * pochhammer(half_d, k) / (pochhammer(a, 2 * k) * pochhammer(b + 1, k))
    if form == "FD2":
        return pochhammer(b, 2 * k) * pochhammer(half_d, k) / (pochhammer(a, 2 * k) * pochhammer(b, k))
    raise DomainError(f"unknown form {form!r}")


def walk_taylor_coeffs(config: WalkConfig, order: int) -> list:
    """Exact Taylor coefficients in ``z = |y|^2`` of ``t_walk_analytic``."""
    out = [Fraction(1)]
    half_d = Fraction(config.d, 2)
    for q in config.qs:
        q = Fraction(q)
        out = rp.mul(out, gauss_2f1_coefficients(q / 2, (q + 1) / 2, half_d, order))[: order + 1]
    return out + [Fraction(0)] * (order + 1 - len(out))


def moment_taylor_coeffs(moment, a, d: int, order: int) -> list:
    """Taylor coefficients of ``T_a`` built from the even moments of ``R``.

    ``moment(k)`` must return ``E(R^(2k))``.
    """
    half_d = Fraction(d, 2)
    return [pochhammer(a, 2 * k) / math.factorial(2 * k) * pochhammer(Fraction(1, 2), k)
            / pochhammer(half_d, k) * moment(k) for k in range(order + 1)]
