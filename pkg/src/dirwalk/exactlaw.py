"""Closed-form laws of the squared radius of Dirichlet walks.

The coefficient pipelines (beta-mixture weights, partial-fraction residues,
the ``B_k`` recursion and its powers) run entirely in ``Fraction``
arithmetic, so the sign patterns and the vanishing polynomial parts that the
theory predicts are checked exactly rather than to a tolerance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Optional

from . import _rational as rp
from .errors import DomainError, InternalError, NotClosedForm
from .laws import (
    BetaLaw,
    BetaMixture,
    GammaRatioMellin,
    MixedSignedLaw,
    PolyDensity,
    SignedPiece,
    as_exact,
    fmt_number,
)
from .specfun import gauss_2f1_coefficients, pochhammer

__all__ = [
    "WalkConfig",
    "HyperuniformVerdict",
    "radial_law",
    "prop5_beta",
    "thm11_law",
    "thm11_mellin",
    "prop12_b_coeffs",
    "thm13_p_coeffs",
    "thm13_moment",
    "thm13_density",
    "prop14_mellin",
    "cor15_mellin",
    "cor15_density",
    "prop10_law",
    "hyperuniform_check",
    "detect_hyperuniform",
    "emi_quadratic",
    "classify_q",
]

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class WalkConfig:
    """Dimension ``d`` and Dirichlet parameters ``qs`` of one walk."""

    d: int
    qs: tuple

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise DomainError(f"dimension must be a positive integer, got {self.d!r}")
        qs = tuple(as_exact(q) for q in self.qs)
        if not qs:
            raise DomainError("a walk needs at least one Dirichlet parameter")
        if any(not q > 0 for q in qs):
            raise DomainError(f"Dirichlet parameters must be positive, got {qs}")
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "qs", qs)

    @property
    def n(self) -> int:
        return len(self.qs)

    @property
    def Q(self):
        return sum(self.qs, Fraction(0))

    def describe(self) -> str:
        return f"d={self.d};q={','.join(fmt_number(q) for q in self.qs)}"


@dataclass(frozen=True)
class HyperuniformVerdict:
    is_hyperuniform: bool
    type_k: Optional[object]
    order_checked: int


def _matches(qs, base, special) -> bool:
    """All equal to ``base``, or exactly one equal to ``special`` and the rest ``base``."""
    rest = [q for q in qs if q != base]
    return not rest or (len(rest) == 1 and rest[0] == special)


def radial_law(config: WalkConfig):
    """Exact law of ``|W|^2`` (of ``W`` itself when ``d = 1``).

    Raises ``NotClosedForm`` when the configuration is outside the solvable
    table; callers fall back to sampling.
    """
    d, qs, n = config.d, config.qs, config.n
    if d == 1:
        if len(set(qs)) == 1:
            return prop10_law(qs[0], n, HALF)
        raise NotClosedForm(f"no closed form for d=1 with unequal parameters {qs}")
    if n == 1:
        raise NotClosedForm("a single step has |W| = 1 almost surely")
    if _matches(qs, Fraction(d - 1), Fraction(d)):
        return prop5_beta(1, n, d)
    if d >= 3 and _matches(qs, Fraction(d, 2) - 1, Fraction(d, 2)):
        return prop5_beta(2, n, d)
    if all(q == d for q in qs):
        return thm11_law(n, d)
    if d % 2 == 0 and d >= 4 and all(q == 1 for q in qs):
        return thm13_density(n, d // 2)
    if n == 2:
        return _two_step_law(qs[0], qs[1], d)
    raise NotClosedForm(f"no closed form implemented for {config.describe()}")


def prop5_beta(variant: int, n: int, d: int) -> BetaLaw:
    """Beta law of ``R^2`` for ``q = d - 1`` (variant 1) or ``q = d/2 - 1`` (variant 2)."""
    if n < 2:
        raise DomainError(f"need n >= 2, got {n}")
    if variant == 1:
        if d < 2:
            raise DomainError("variant 1 needs d >= 2")
        return BetaLaw(Fraction(d, 2), Fraction((n - 1) * (d - 1), 2))
    if variant == 2:
        if d < 3:
            raise DomainError("variant 2 needs d >= 3")
        return BetaLaw(Fraction(d, 2), (n - 1) * (Fraction(d, 2) - 1))
    raise DomainError(f"variant must be 1 or 2, got {variant}")


def thm11_mellin(n: int, d: int) -> GammaRatioMellin:
    """Mellin transform of ``R^2`` for ``q_i = d``, before any simplification."""
    return GammaRatioMellin.normalized(
        [Fraction(n * d + n, 2), Fraction(d, 2)],
        [Fraction(n * d + 1, 2), Fraction(n * d, 2)],
        variable="R2",
    )


def _thm11_odd_residues(N: int, d: int):
    half_d = Fraction(d, 2)
    top = N * d + Fraction(d + 1, 2)
    const = pochhammer(half_d, N * d) / pochhammer(top, N)
    residues = rp.partial_fractions(rp.scale(rp.rising(top, N), const),
                                    [half_d + k for k in range(N * d)])
    for k, (_, a_k) in enumerate(residues):
        if a_k == 0 or (a_k > 0) != (k % 2 == 0):
            raise InternalError(f"residue A_{k} = {a_k} breaks the alternating sign pattern")
    return [a for _, a in residues]


def thm11_law(n: int, d: int):
    """Law of ``R^2`` when every Dirichlet parameter equals ``d``.

    Even ``n = 2N`` gives a finite beta mixture; odd ``n = 2N + 1`` gives a
    polynomial density in ``v^(1/2)`` steps whose coefficients alternate in sign.
    """
    if n < 2 or d < 2:
        raise DomainError(f"need n >= 2 and d >= 2, got n={n}, d={d}")
    half_d = Fraction(d, 2)
    N = n // 2
    if n % 2 == 0:
        shift = d * (N - HALF)
        norm = pochhammer(Fraction(N * d), N)
        weights = tuple(pochhammer(half_d, k) * pochhammer(shift, N - k) * comb(N, k) / norm
                        for k in range(N + 1))
        comps = tuple((half_d + k, N * d - Fraction(d - 1, 2) - k) for k in range(N + 1))
        return BetaMixture(weights, comps)
    residues = _thm11_odd_residues(N, d)
    return PolyDensity(tuple((a, half_d + k - 1) for k, a in enumerate(residues)))


def prop12_b_coeffs(D: int) -> list:
    """Coefficients ``B_1..B_{D-1}`` with ``2F1(1/2, 1; D; z) = sum B_k G(z)^k``."""
    if D < 2:
        raise DomainError(f"need D >= 2, got {D}")
    a_poly = [Fraction(0), Fraction(4)]  # A_2(u) = 4u
    for _ in range(3, D + 1):
        a_poly = rp.integrate(rp.mul([Fraction(4), Fraction(-8)], a_poly))
    if any(c != 0 for c in a_poly[: D - 1]):
        raise InternalError(f"A_{D} does not vanish to order {D - 1} at u = 0")
    b_poly = a_poly[D - 1:]
    # P(w) = (D-1)!/4^(D-1) * B_D(1 - w) = sum_k B_k w^(D-1-k)
    p_w = [Fraction(0)]
    for j, c in enumerate(b_poly):
        p_w = rp.add(p_w, rp.scale(rp.one_minus_power(j), c))
    p_w = rp.scale(p_w, Fraction(factorial(D - 1), 4 ** (D - 1)))
    p_w = p_w + [Fraction(0)] * (D - 1 - len(p_w))
    return [p_w[D - 1 - k] for k in range(1, D)]


def thm13_p_coeffs(n: int, D: int) -> dict:
    """``{i: p_i}`` with ``(sum_k B_k z^k)^n = sum_i p_i z^i``."""
    if n < 1:
        raise DomainError(f"need n >= 1, got {n}")
    b = [Fraction(0)] + prop12_b_coeffs(D)
    powered = rp.power(b, n)
    return {i: (powered[i] if i < len(powered) else Fraction(0))
            for i in range(n, n * (D - 1) + 1)}


def thm13_moment(n: int, D: int, k: int) -> Fraction:
    """``E(R^(2k))`` for ``q_i = 1`` in dimension ``2D``."""
    p = thm13_p_coeffs(n, D)
    total = sum((p_i * pochhammer(i, 2 * k) / pochhammer(i + 1, k) for i, p_i in p.items()),
                Fraction(0))
    return Fraction(pochhammer(D, k), pochhammer(n, 2 * k)) * total


def _linear_in_2s(c):
    return [Fraction(c), Fraction(2)]


def thm13_density(n: int, D: int) -> PolyDensity:
    """Polynomial density of ``R^2`` for ``q_i = 1`` in dimension ``2D``.

    The Mellin transform is assembled over the common denominator
    ``(s + D)_m``; its polynomial part must vanish identically.
    """
    if n < 2 or D < 2:
        raise DomainError(f"need n >= 2 and D >= 2, got n={n}, D={D}")
    p = thm13_p_coeffs(n, D)
    m = n * (D - 1) + 1 - D
    pref = Fraction(factorial(n - 1), factorial(D - 1))
    total = [Fraction(0)]
    for i, p_i in p.items():
        if p_i == 0:
            continue
        term = [pref * i * p_i]
        for j in range(i - n):  # (2s)_i / (2s)_n = (2s + n)_{i-n}
            term = rp.mul(term, _linear_in_2s(n + j))
        if i + 1 >= D:  # (s)_D / (s)_{i+1} = 1 / (s + D)_{i+1-D}
            term = rp.mul(term, rp.rising(i + 1, m - (i + 1 - D)))
        else:
            term = rp.mul(term, rp.rising(i + 1, D - i - 1))
            term = rp.mul(term, rp.rising(D, m))
        total = rp.add(total, term)
    quot, rem = rp.divmod_poly(total, rp.rising(D, m))
    if not rp.is_zero(quot):
        raise InternalError(f"nonzero polynomial part {quot} in the Mellin transform")
    residues = rp.partial_fractions(rem, [D + j for j in range(m)])
    return PolyDensity(tuple((a, int(c) - 1) for c, a in residues if a != 0))


def prop14_mellin(q1, q2, d: int) -> GammaRatioMellin:
    """Mellin transform of ``H = 1 - R^2`` for a two-step walk, simplified."""
    q1, q2 = as_exact(q1), as_exact(q2)
    if not (q1 > 0 and q2 > 0) or d < 2:
        raise DomainError(f"need q1, q2 > 0 and d >= 2, got ({q1}, {q2}, {d})")
    half = HALF if isinstance(q1 + q2, Fraction) else 0.5
    return GammaRatioMellin.normalized(
        [q1, q2, Fraction(d - 1, 2)],
        [(q1 + q2) * half, (q1 + q2 + 1) * half, Fraction(d - 1)],
        variable="H",
    ).simplified()


def _h_rational_to_r2(num, shifts):
    """Invert a rational Mellin transform of ``H`` into the law of ``R^2 = 1 - H``."""
    residues = [(c, a) for c, a in rp.partial_fractions(num, shifts) if a != 0]
    if all(c.denominator == 1 and c >= 1 for c, _ in residues):
        # h-density sum A_c h^(c-1), then h = 1 - v
        v_poly = [Fraction(0)]
        for c, a in residues:
            v_poly = rp.add(v_poly, rp.scale(rp.one_minus_power(int(c) - 1), a))
        return PolyDensity(tuple((c, e) for e, c in enumerate(v_poly) if c != 0))
    if len(residues) == 1:
        c, a = residues[0]
        if a != c or c <= 0:
            raise InternalError(f"single-pole transform {a}/(s+{c}) is not normalized")
        return BetaLaw(Fraction(1), c)
    return None


def _two_step_law(q1, q2, d: int):
    mellin = prop14_mellin(q1, q2, d)
    beta_h = mellin.as_beta()
    if beta_h is not None:
        return BetaLaw(beta_h.q, beta_h.p)
    parts = mellin.rational_parts()
    if parts is not None:
        law = _h_rational_to_r2(*parts)
        if law is not None:
            return law
    return mellin


def cor15_mellin(d: int) -> GammaRatioMellin:
    """Mellin transform of ``H`` for a two-step walk with uniform weight."""
    if d < 2:
        raise DomainError(f"need d >= 2, got {d}")
    if d == 2:
        return GammaRatioMellin(Fraction(1, 2), (), (), ((HALF, 1, False),), "H")
    D = d // 2
    if d % 2 == 0:
        const = Fraction(factorial(2 * D - 2)) / pochhammer(Fraction(3, 2), D - 2)
        factors = ((Fraction(3, 2), D - 2, True), (Fraction(1), 2 * D - 2, False))
        return GammaRatioMellin(const, (), (), factors, "H")
    const = math.gamma(1.5) * factorial(2 * D - 1) / factorial(D - 1)
    return GammaRatioMellin(const, (Fraction(1),), (Fraction(3, 2),),
                            ((Fraction(D), D, False),), "H")


def cor15_density(d: int):
    """Law of ``R^2`` for ``q = (1, 1)``; odd ``d`` returns the Mellin transform."""
    if d < 2:
        raise DomainError(f"need d >= 2, got {d}")
    if d == 2:
        return BetaLaw(Fraction(1), HALF)
    mellin = cor15_mellin(d)
    if d % 2:
        return mellin
    law = _h_rational_to_r2(*mellin.rational_parts())
    if law is None:
        raise InternalError(f"even d={d} produced a non-integer pole lattice")
    return law


def prop10_law(q, n: int, p) -> MixedSignedLaw:
    """Law of ``sum X_i eps_i`` with ``X ~ D(q,...,q)`` and iid signs ``P(+1) = p``.

    Conditionally on ``k`` plus signs the value is ``2B - 1`` with
    ``B ~ beta(kq, (n-k)q)``, so each piece has density constant
    ``2^(1-nq) Gamma(nq) / (Gamma(kq) Gamma((n-k)q))``.
    """
    q, p = as_exact(q), as_exact(p)
    if not q > 0 or n < 1 or not 0 <= p <= 1:
        raise DomainError(f"need q > 0, n >= 1, 0 <= p <= 1; got ({q}, {n}, {p})")
    pieces = []
    for k in range(1, n):
        w = comb(n, k) * p ** k * (1 - p) ** (n - k)
        if w != 0:
            pieces.append(SignedPiece(w, k * q, (n - k) * q))
    return MixedSignedLaw((1 - p) ** n, p ** n, tuple(pieces))


def _exact_param(x) -> Fraction:
    return Fraction(x) if not isinstance(x, str) else Fraction(x)


def _truncated_product(series_list, order):
    out = [Fraction(1)] + [Fraction(0)] * order
    for s in series_list:
        out = rp.mul(out, s)[: order + 1]
        out = out + [Fraction(0)] * (order + 1 - len(out))
    return out


def _hyper_coeffs(q, d, order):
    q = _exact_param(q)
    return gauss_2f1_coefficients(q / 2, (q + 1) / 2, Fraction(d, 2), order)


def hyperuniform_check(config: WalkConfig, k, order: int = 6) -> HyperuniformVerdict:
    """Compare Taylor coefficients of both sides of the hyperuniformity identity.

    Floats are converted to their exact binary rational value, so the
    comparison is exact.
    """
    if order < 2:
        raise DomainError(f"order must be >= 2, got {order}")
    k_exact = _exact_param(k)
    if not k_exact > config.d:
        raise DomainError(f"type k={k} must exceed d={config.d}")
    lhs = _truncated_product([_hyper_coeffs(q, config.d, order) for q in config.qs], order)
    Q = sum((_exact_param(q) for q in config.qs), Fraction(0))
    rhs = gauss_2f1_coefficients(Q / 2, (Q + 1) / 2, k_exact / 2, order)
    ok = lhs == rhs
    return HyperuniformVerdict(ok, as_exact(k_exact) if ok else None, order)


def detect_hyperuniform(config: WalkConfig, order: int = 6) -> HyperuniformVerdict:
    """Solve the first-order coefficient equation for ``k``, then check to ``order``."""
    qs = [_exact_param(q) for q in config.qs]
    Q = sum(qs, Fraction(0))
    # sum q_i (q_i+1) / (2d) = Q (Q+1) / (2k)
    k = config.d * Q * (Q + 1) / sum(q * (q + 1) for q in qs)
    if not k > config.d:
        return HyperuniformVerdict(False, None, order)
    return hyperuniform_check(config, k, order)


def emi_quadratic(n: int, q) -> list:
    """Coefficients ``[c0, c1, c2]`` of the quadratic in ``x = d/(q+1)``.

    Obtained by clearing denominators in
    ``(nq+2)(nq+3)/(x(nq+1)+2) = (q+2)(q+3)/(x(q+1)+2) + (n-1)q/x``.
    """
    q = Fraction(q)
    nq = n * q
    t1 = rp.scale([Fraction(0), Fraction(2), q + 1], (nq + 2) * (nq + 3))
    t2 = rp.scale([Fraction(0), Fraction(2), nq + 1], (q + 2) * (q + 3))
    t3 = rp.scale(rp.mul([Fraction(2), nq + 1], [Fraction(2), q + 1]), (n - 1) * q)
    out = rp.add(rp.add(t1, rp.scale(t2, -1)), rp.scale(t3, -1))
    return out + [Fraction(0)] * (3 - len(out))


def _exact_sqrt(x: Fraction) -> Fraction:
    num, den = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if num * num != x.numerator or den * den != x.denominator:
        raise InternalError(f"discriminant {x} is not a rational square")
    return Fraction(num, den)


def _quadratic_roots(c):
    c0, c1, c2 = c
    if c2 == 0:
        raise InternalError("degenerate quadratic")
    r = _exact_sqrt(c1 * c1 - 4 * c2 * c0)
    return {(-c1 - r) / (2 * c2), (-c1 + r) / (2 * c2)}


_EXPONENT_SAMPLES = [(n, q) for n in (2, 3, 4) for q in (Fraction(1, 2), Fraction(1), Fraction(2), Fraction(7, 3))]


def classify_q(d: int) -> frozenset:
    """Equal Dirichlet parameters ``q`` for which ``W`` can be hyperuniform in dimension ``d``."""
    if d < 2:
        raise DomainError(f"need d >= 2, got {d}")
    roots = None
    for n, q in _EXPONENT_SAMPLES:
        r = _quadratic_roots(emi_quadratic(n, q))
        if roots is not None and r != roots:
            raise InternalError(f"roots {r} depend on (n, q) = ({n}, {q})")
        roots = r
    found = frozenset(Fraction(d) / x - 1 for x in roots if Fraction(d) / x - 1 > 0)
    for q in found:
        for n in (2, 3, 4):
            k = n * (d - 1) + 1 if q == d - 1 else n * (d - 2) + 2
            if not hyperuniform_check(WalkConfig(d, (q,) * n), k, 6).is_hyperuniform:
                raise InternalError(f"q={q} is not hyperuniform at n={n}, k={k}")
    return found
