"""Exact laws of the squared radius of a Dirichlet walk.

A law is one of a handful of frozen dataclasses sharing a small duck-typed
surface: ``kind``, ``moment(k)``, ``radial_moment(k)``, ``total_mass()``,
``to_json()`` and, except for Mellin-only and empirical laws, ``pdf``/``cdf``.
``moment(k)`` is the k-th moment of the law's own variable; the radial moment
is ``E(|W|^(2k))``, which differs only for the signed ``d = 1`` law.

Rational parameters are kept as ``Fraction`` so that masses and moments come
out exact; floats appear at the ``pdf``/``cdf`` boundary only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from numbers import Rational

import numpy as np
from scipy import special

from . import _rational as rp
from .errors import DomainError, UnsupportedLaw
from .specfun import pochhammer, reg_inc_beta

__all__ = [
    "BetaLaw",
    "BetaMixture",
    "PolyDensity",
    "SignedPiece",
    "MixedSignedLaw",
    "GammaRatioMellin",
    "Empirical",
    "as_exact",
    "fmt_number",
    "parse_number",
    "law_from_json",
]


def as_exact(x):
    """Return ``x`` as a ``Fraction`` when that is lossless and tidy, else a float."""
    if isinstance(x, Rational):
        return Fraction(x)
    if isinstance(x, str):
        return parse_number(x)
    x = float(x)
    exact = Fraction(x)
    # dyadic floats such as 0.5 are kept exact; 0.1 and friends stay floats
    return exact if exact.denominator <= 1024 else x


def fmt_number(x) -> str:
    """Rationals as ``"num/den"`` (``"num"`` when integral), floats via repr."""
    if isinstance(x, Rational):
        x = Fraction(x)
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return repr(float(x))


def parse_number(s: str):
    s = s.strip().replace("−", "-")
    try:
        return Fraction(s) if ("/" in s or s.lstrip("+-").isdigit()) else float(s)
    except ValueError as exc:
        raise DomainError(f"not a number: {s!r}") from exc


def _f(x) -> float:
    return float(x)


def _beta_pdf(p, q, x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.exp((p - 1) * np.log(x) + (q - 1) * np.log1p(-x) - special.betaln(p, q))
    return np.where((x > 0) & (x < 1), out, 0.0)


@dataclass(frozen=True)
class BetaLaw:
    p: object
    q: object
    kind: str = field(default="beta", init=False, repr=False)

    def __post_init__(self):
        if not (self.p > 0 and self.q > 0):
            raise DomainError(f"beta parameters must be positive, got ({self.p}, {self.q})")

    def moment(self, k: int):
        return pochhammer(self.p, k) / pochhammer(self.p + self.q, k)

    radial_moment = moment

    def total_mass(self):
        return Fraction(1)

    def pdf(self, x):
        return _beta_pdf(_f(self.p), _f(self.q), x)

    def cdf(self, x):
        return reg_inc_beta(_f(self.p), _f(self.q), np.clip(x, 0.0, 1.0))

    cdf_left = cdf

    def to_json(self) -> dict:
        return {"kind": self.kind, "p": fmt_number(self.p), "q": fmt_number(self.q)}


@dataclass(frozen=True)
class BetaMixture:
    weights: tuple
    components: tuple  # ((p, q), ...)
    kind: str = field(default="beta_mixture", init=False, repr=False)

    def _laws(self):
        return [BetaLaw(p, q) for p, q in self.components]

    def moment(self, k: int):
        return sum((w * law.moment(k) for w, law in zip(self.weights, self._laws())), Fraction(0))

    radial_moment = moment

    def total_mass(self):
        return sum(self.weights, Fraction(0))

    def pdf(self, x):
        return sum(_f(w) * law.pdf(x) for w, law in zip(self.weights, self._laws()))

    def cdf(self, x):
        return sum(_f(w) * law.cdf(x) for w, law in zip(self.weights, self._laws()))

    cdf_left = cdf

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "weights": [fmt_number(w) for w in self.weights],
            "components": [[fmt_number(p), fmt_number(q)] for p, q in self.components],
        }


@dataclass(frozen=True)
class PolyDensity:
    """Density ``sum_j c_j v^(e_j)`` on ``(0, 1)``; exponents may be rational."""

    terms: tuple  # ((coefficient, exponent), ...)
    kind: str = field(default="poly_density", init=False, repr=False)

    def __post_init__(self):
        if any(e <= -1 for _, e in self.terms):
            raise DomainError("density exponents must exceed -1")

    def moment(self, k: int):
        return sum((c / (e + k + 1) for c, e in self.terms), Fraction(0))

    radial_moment = moment

    def total_mass(self):
        return self.moment(0)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x > 0) & (x < 1)
        xs = np.where(inside, x, 0.5)
        out = sum(_f(c) * xs ** _f(e) for c, e in self.terms)
        return np.where(inside, out, 0.0)

    def cdf(self, x):
        x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
        return sum(_f(c / (e + 1)) * x ** _f(e + 1) for c, e in self.terms)

    cdf_left = cdf

    def coefficient_map(self) -> dict:
        return {e: c for c, e in self.terms}

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "terms": [[fmt_number(c), fmt_number(e)] for c, e in self.terms],
        }


@dataclass(frozen=True)
class SignedPiece:
    """``weight`` times the law of ``2B - 1`` with ``B ~ beta(alpha, beta)``."""

    weight: object
    alpha: object
    beta: object

    def coefficient(self) -> float:
        # weight * 2^(1 - alpha - beta) / B(alpha, beta)
        a, b = _f(self.alpha), _f(self.beta)
        return _f(self.weight) * math.exp((1 - a - b) * math.log(2) - special.betaln(a, b))

    def signed_moment(self, m: int):
        # E[(2B - 1)^m] by binomial expansion of beta moments
        total = Fraction(0) if isinstance(self.alpha, Rational) and isinstance(self.beta, Rational) else 0.0
        for j in range(m + 1):
            total += comb(m, j) * 2 ** j * (-1) ** (m - j) * (
                pochhammer(self.alpha, j) / pochhammer(self.alpha + self.beta, j))
        return self.weight * total


@dataclass(frozen=True)
class MixedSignedLaw:
    """Law of a ``d = 1`` walk on ``[-1, 1]``: two atoms plus beta-type pieces.

    Piece densities are ``coefficient * (1+y)^(alpha-1) * (1-y)^(beta-1)``.
    """

    atom_minus: object
    atom_plus: object
    pieces: tuple  # (SignedPiece, ...)
    kind: str = field(default="mixed_signed", init=False, repr=False)

    def total_mass(self):
        return self.atom_minus + self.atom_plus + sum((pc.weight for pc in self.pieces), 0)

    def moment(self, k: int):
        out = self.atom_minus * (-1) ** k + self.atom_plus
        for pc in self.pieces:
            out += pc.signed_moment(k)
        return out

    def radial_moment(self, k: int):
        return self.moment(2 * k)

    def coefficient_pieces(self):
        """``(coefficient, exponent_plus, exponent_minus)`` per piece."""
        return [(pc.coefficient(), pc.alpha - 1, pc.beta - 1) for pc in self.pieces]

    def pdf(self, y):
        y = np.asarray(y, dtype=float)
        return sum(_f(pc.weight) * 0.5 * _beta_pdf(_f(pc.alpha), _f(pc.beta), (1 + y) / 2)
                   for pc in self.pieces) + np.zeros_like(y)

    def _continuous_cdf(self, y):
        u = np.clip((np.asarray(y, dtype=float) + 1) / 2, 0.0, 1.0)
        return sum((_f(pc.weight) * reg_inc_beta(_f(pc.alpha), _f(pc.beta), u)
                    for pc in self.pieces), np.zeros_like(u))

    def cdf(self, y):
        y = np.asarray(y, dtype=float)
        return (_f(self.atom_minus) * (y >= -1) + self._continuous_cdf(y)
                + _f(self.atom_plus) * (y >= 1))

    def cdf_left(self, y):
        y = np.asarray(y, dtype=float)
        return (_f(self.atom_minus) * (y > -1) + self._continuous_cdf(y)
                + _f(self.atom_plus) * (y > 1))

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "atom_minus": fmt_number(self.atom_minus),
            "atom_plus": fmt_number(self.atom_plus),
            "pieces": [
                {
                    "weight": fmt_number(pc.weight),
                    "alpha": fmt_number(pc.alpha),
                    "beta": fmt_number(pc.beta),
                    "coefficient": fmt_number(coef),
                    "exponent_plus": fmt_number(ep),
                    "exponent_minus": fmt_number(em),
                }
                for pc, (coef, ep, em) in zip(self.pieces, self.coefficient_pieces())
            ],
        }


@dataclass(frozen=True)
class GammaRatioMellin:
    """``M(s) = constant * prod Gamma(a_i+s) / prod Gamma(b_j+s) * Pochhammer factors``.

    ``M`` is the Mellin transform ``E(V^s)`` of ``variable``, which is either
    ``"H"`` (``1 - R^2``) or ``"R2"``.  Pochhammer factors are
    ``(shift, length, is_numerator)`` meaning ``(shift + s)_length`` in the
    numerator or denominator.  ``M(0) = 1``.
    """

    constant: object
    gamma_numerator_shifts: tuple
    gamma_denominator_shifts: tuple
    pochhammer_factors: tuple = ()
    variable: str = "H"
    kind: str = field(default="gamma_ratio_mellin", init=False, repr=False)

    @classmethod
    def normalized(cls, numerator, denominator, pochhammer_factors=(), variable="H"):
        numerator = tuple(as_exact(a) for a in numerator)
        denominator = tuple(as_exact(b) for b in denominator)
        factors = tuple((as_exact(c), int(n), bool(up)) for c, n, up in pochhammer_factors)
        if any(x <= 0 for x in numerator + denominator) or any(c <= 0 for c, _, _ in factors):
            raise DomainError("gamma and Pochhammer shifts must be positive")
        at_zero = 1
        for c, n, up in factors:
            at_zero = at_zero * pochhammer(c, n) if up else at_zero / pochhammer(c, n)
        if numerator or denominator:
            log_c = (sum(math.lgamma(_f(b)) for b in denominator)
                     - sum(math.lgamma(_f(a)) for a in numerator))
            constant = math.exp(log_c) / _f(at_zero)
        else:
            constant = Fraction(1) / at_zero
        return cls(constant, numerator, denominator, factors, variable)

    def evaluate(self, s: float) -> float:
        s = float(s)
        log_g = (sum(math.lgamma(_f(a) + s) for a in self.gamma_numerator_shifts)
                 - sum(math.lgamma(_f(b) + s) for b in self.gamma_denominator_shifts))
        out = _f(self.constant) * math.exp(log_g)
        for c, n, up in self.pochhammer_factors:
            v = pochhammer(_f(c) + s, n)
            out = out * v if up else out / v
        return out

    def mellin_moment(self, k: int):
        """``E(V^k)`` for integer ``k``; exact when all shifts are rational."""
        out = Fraction(1)
        for a in self.gamma_numerator_shifts:
            out *= pochhammer(a, k)
        for b in self.gamma_denominator_shifts:
            out /= pochhammer(b, k)
        for c, n, up in self.pochhammer_factors:
            ratio = pochhammer(c + k, n) / pochhammer(c, n)
            out = out * ratio if up else out / ratio
        return out

    moment = mellin_moment

    def radial_moment(self, k: int):
        if self.variable == "R2":
            return self.mellin_moment(k)
        # E((1 - H)^k)
        return sum((comb(k, j) * (-1) ** j * self.mellin_moment(j) for j in range(k + 1)),
                   Fraction(0))

    def total_mass(self):
        return self.mellin_moment(0)

    def pdf(self, x):
        raise UnsupportedLaw("a gamma-ratio Mellin transform has no implemented density")

    cdf = cdf_left = pdf

    def simplified(self) -> "GammaRatioMellin":
        """Cancel equal gamma shifts and fold integer-spaced pairs into Pochhammers."""
        num = list(self.gamma_numerator_shifts)
        den = list(self.gamma_denominator_shifts)
        factors = list(self.pochhammer_factors)
        for a in list(num):
            if a in den:
                num.remove(a)
                den.remove(a)
        changed = True
        while changed:
            changed = False
            for a in num:
                best = None
                for b in den:
                    diff = a - b
                    if isinstance(diff, Rational) and Fraction(diff).denominator == 1:
                        if best is None or abs(diff) < abs(a - best):
                            best = b
                if best is not None:
                    diff = int(a - best)
                    # Gamma(a+s)/Gamma(b+s) = (b+s)_diff  or  1/(a+s)_{-diff}
                    if diff > 0:
                        factors.append((best, diff, True))
                    else:
                        factors.append((a, -diff, False))
                    num.remove(a)
                    den.remove(best)
                    changed = True
                    break
        constant = self.constant
        if not num and not den:
            at_zero = Fraction(1)
            for c, n, up in factors:
                at_zero = at_zero * pochhammer(c, n) if up else at_zero / pochhammer(c, n)
            constant = 1 / at_zero
        return GammaRatioMellin(constant, tuple(num), tuple(den), tuple(factors), self.variable)

    def is_rational(self) -> bool:
        return not self.gamma_numerator_shifts and not self.gamma_denominator_shifts

    def as_beta(self):
        """The beta law of ``variable`` when ``M`` is a single beta Mellin transform."""
        s = self.simplified()
        if (len(s.gamma_numerator_shifts) == 1 and len(s.gamma_denominator_shifts) == 1
                and not s.pochhammer_factors):
            a, = s.gamma_numerator_shifts
            b, = s.gamma_denominator_shifts
            if b > a:
                return BetaLaw(a, b - a)
        # an integer gap leaves Gamma(a+s)/Gamma(a+n+s) folded as 1/(a+s)_n
        if s.is_rational() and len(s.pochhammer_factors) == 1:
            a, n, up = s.pochhammer_factors[0]
            if not up and n > 0:
                return BetaLaw(a, Fraction(n))
        return None

    def rational_parts(self):
        """``(numerator polynomial, denominator pole shifts)`` of a rational ``M``."""
        s = self.simplified()
        if not s.is_rational():
            return None
        num = [Fraction(s.constant)]
        shifts = []
        for c, n, up in s.pochhammer_factors:
            if up:
                num = rp.mul(num, rp.rising(c, n))
            else:
                shifts.extend(Fraction(c) + j for j in range(n))
        return num, shifts

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "variable": self.variable,
            "constant": fmt_number(self.constant),
            "gamma_numerator_shifts": [fmt_number(a) for a in self.gamma_numerator_shifts],
            "gamma_denominator_shifts": [fmt_number(b) for b in self.gamma_denominator_shifts],
            "pochhammer_factors": [[fmt_number(c), n, "num" if up else "den"]
                                   for c, n, up in self.pochhammer_factors],
        }


@dataclass(frozen=True)
class Empirical:
    squared_radii: np.ndarray
    kind: str = field(default="empirical", init=False, repr=False)

    @classmethod
    def from_values(cls, values):
        return cls(np.sort(np.asarray(values, dtype=float)))

    def moment(self, k: int) -> float:
        return float(np.mean(self.squared_radii ** k))

    radial_moment = moment

    def total_mass(self):
        return 1.0

    def pdf(self, x):
        raise UnsupportedLaw("empirical laws have no density")

    cdf = cdf_left = pdf

    def to_json(self) -> dict:
        return {"kind": self.kind, "squared_radii": [repr(float(v)) for v in self.squared_radii]}


def law_from_json(obj: dict):
    """Inverse of ``to_json`` for every law kind."""
    num = parse_number
    kind = obj["kind"]
    if kind == "beta":
        return BetaLaw(num(obj["p"]), num(obj["q"]))
    if kind == "beta_mixture":
        return BetaMixture(tuple(num(w) for w in obj["weights"]),
                           tuple((num(p), num(q)) for p, q in obj["components"]))
    if kind == "poly_density":
        return PolyDensity(tuple((num(c), num(e)) for c, e in obj["terms"]))
    if kind == "mixed_signed":
        return MixedSignedLaw(num(obj["atom_minus"]), num(obj["atom_plus"]),
                              tuple(SignedPiece(num(p["weight"]), num(p["alpha"]), num(p["beta"]))
                                    for p in obj["pieces"]))
    if kind == "gamma_ratio_mellin":
        return GammaRatioMellin(num(obj["constant"]),
                                tuple(num(a) for a in obj["gamma_numerator_shifts"]),
                                tuple(num(b) for b in obj["gamma_denominator_shifts"]),
                                tuple((num(c), int(n), up == "num")
                                      for c, n, up in obj["pochhammer_factors"]),
                                obj.get("variable", "H"))
    if kind == "empirical":
        return Empirical.from_values([float(v) for v in obj["squared_radii"]])
    raise DomainError(f"unknown law kind {kind!r}")
