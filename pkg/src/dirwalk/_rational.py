"""Exact univariate polynomials over the rationals.

A polynomial is a list of ``Fraction`` coefficients in ascending degree.
Only what the coefficient pipelines need is here.
"""
from __future__ import annotations

from fractions import Fraction
from math import comb

from .errors import InternalError


def trim(p):
    p = [Fraction(c) for c in p]
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p or [Fraction(0)]


def is_zero(p) -> bool:
    return all(c == 0 for c in p)


def add(p, q):
    n = max(len(p), len(q))
    return trim([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)])


def scale(p, c):
    return trim([c * x for x in p])


def mul(p, q):
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return trim(out)


def power(p, n: int):
    out = [Fraction(1)]
    for _ in range(n):
        out = mul(out, p)
    return out


def evaluate(p, x):
    acc = Fraction(0) if isinstance(x, (int, Fraction)) else 0.0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def integrate(p):
    """Antiderivative vanishing at 0."""
    return trim([Fraction(0)] + [c / (i + 1) for i, c in enumerate(p)])


def divmod_poly(num, den):
    num, den = trim(num), trim(den)
    if is_zero(den):
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(num)
    quot = [Fraction(0)] * max(len(num) - len(den) + 1, 1)
    lead = den[-1]
    for shift in range(len(num) - len(den), -1, -1):
        c = rem[shift + len(den) - 1] / lead
        quot[shift] = c
        if c:
            for i, d in enumerate(den):
                rem[shift + i] -= c * d
    return trim(quot), trim(rem[: max(len(den) - 1, 1)])


def rising(shift, length: int):
    """``(s + shift)_length`` as a polynomial in ``s``."""
    out = [Fraction(1)]
    for j in range(length):
        out = mul(out, [Fraction(shift) + j, Fraction(1)])
    return out


def one_minus_power(m: int):
    """``(1 - v)^m`` expanded in ``v``."""
    return [Fraction(comb(m, j) * (-1) ** j) for j in range(m + 1)]


def partial_fractions(num, shifts):
    """Residues of ``num(s) / prod_i (s + shifts[i])``.

    Returns ``[(shift, residue), ...]``.  The fraction must be proper and the
    poles simple; both are exact checks and raise ``InternalError``.
    """
    shifts = [Fraction(c) for c in shifts]
    if len(set(shifts)) != len(shifts):
        raise InternalError(f"repeated pole among shifts {shifts}")
    num = trim(num)
    if not is_zero(num) and len(num) - 1 >= len(shifts):
        raise InternalError("partial fractions of an improper rational function")
    out = []
    for i, c in enumerate(shifts):
        den = Fraction(1)
        for j, other in enumerate(shifts):
            if j != i:
                den *= other - c
        out.append((c, evaluate(num, -c) / den))
    return out
