"""Verification harness: KS goodness of fit, moment panels, identity residuals.

Every check is deterministic given its seed.  Reports are plain dataclasses
that flatten into the JSON report schema used by the CLI.
"""
from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np
from scipy import stats

from .errors import UnsupportedLaw
from .exactlaw import (
    WalkConfig,
    classify_q,
    cor15_density,
    hyperuniform_check,
    radial_law,
    thm13_density,
)
from .laws import BetaLaw, MixedSignedLaw
from .sampler import (
    RngStream,
    SampleBatch,
    StickConfig,
    compose_semigroup,
    sample_radial,
    sample_stick_breaking,
    sample_walk,
)
from .specfun import (
    DEFAULT_POLICY,
    SeriesPolicy,
    g_func,
    gauss_2f1,
    gauss_2f1_coefficients,
    l_exponent,
    l_exponent_series,
    reg_inc_beta,
)
from .transform import moment_taylor_coeffs, t_limit, t_walk_analytic, walk_taylor_coeffs

__all__ = [
    "KS_ALPHA",
    "GofReport",
    "MomentRow",
    "MomentReport",
    "IdentityResult",
    "ks_critical",
    "ks_statistic",
    "ks_radial",
    "moment_panel",
    "identity_suite",
    "limit_convergence",
    "crosscheck_kolesnik",
    "matched_panels",
    "run_suite",
]

KS_ALPHA = 0.01
IDENTITY_TOL = 1e-10
Z_LIMIT = 4.0
# values this close to +-1 are the atoms of the d = 1 law, blurred by rounding
_ATOM_SNAP = 1e-12


@dataclass
class GofReport:
    name: str
    count: int
    statistic: float
    critical: float
    passed: bool
    config: str = ""


@dataclass
class MomentRow:
    k: int
    empirical: float
    exact: float
    std_error: Optional[float]
    z: float


@dataclass
class MomentReport:
    rows: list = field(default_factory=list)

    def max_abs_z(self) -> float:
        return max((abs(r.z) for r in self.rows), default=0.0)


@dataclass
class IdentityResult:
    name: str
    max_residual: float
    passed: bool
    tolerance: float = IDENTITY_TOL


def ks_critical(n: int, alpha: float = KS_ALPHA) -> float:
    """Asymptotic Kolmogorov critical value for the two-sided statistic."""
    return float(stats.kstwobign.ppf(1.0 - alpha)) / math.sqrt(n)


def ks_statistic(values, cdf: Callable, cdf_left: Optional[Callable] = None) -> float:
    """Two-sided KS distance; ``cdf_left`` handles atoms in the reference law."""
    x = np.sort(np.asarray(values, dtype=float))
    n = len(x)
    upper = np.asarray(cdf(x), dtype=float)
    lower = upper if cdf_left is None else np.asarray(cdf_left(x), dtype=float)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - upper), np.max(lower - (i - 1) / n)))


def _law_values(batch: SampleBatch, law) -> np.ndarray:
    if isinstance(law, MixedSignedLaw):
        v = batch.points[:, 0].copy()
        v[np.abs(v - 1.0) < _ATOM_SNAP] = 1.0
        v[np.abs(v + 1.0) < _ATOM_SNAP] = -1.0
        return v
    return np.clip(batch.squared_radii(), 0.0, 1.0)


def ks_radial(batch: SampleBatch, law, name: str = "ks", alpha: float = KS_ALPHA) -> GofReport:
    """KS test of the squared radii (signed values for ``d = 1``) against ``law``."""
    if law.kind in ("empirical", "gamma_ratio_mellin"):
        raise UnsupportedLaw(f"no CDF for a {law.kind} law")
    values = _law_values(batch, law)
    stat = ks_statistic(values, law.cdf, law.cdf_left)
    crit = ks_critical(len(values), alpha)
    return GofReport(name, len(values), stat, crit, stat < crit, str(batch.meta.get("config", "")))


def moment_panel(batch: SampleBatch, law, k_max: int) -> MomentReport:
    """Empirical vs exact ``E(R^(2k))`` for ``k = 0..k_max`` with z-scores."""
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    r2 = batch.squared_radii()
    n = len(r2)
    report = MomentReport([MomentRow(0, 1.0, 1.0, None, 0.0)])
    for k in range(1, k_max + 1):
        v = r2 ** k
        emp = float(v.mean())
        exact = float(law.radial_moment(k))
        se = float(v.std(ddof=1) / math.sqrt(n))
        z = (emp - exact) / se if se > 0 else (0.0 if emp == exact else math.inf)
        report.rows.append(MomentRow(k, emp, exact, se, z))
    return report


def _grid(lo, hi, m):
    return [float(x) for x in np.linspace(lo, hi, m)]


def _hyp3_series(z: float, policy: SeriesPolicy) -> float:
    # sum_{n>=1} (1/2)_n / n! * z^n / (2n)
    coef, total = 1.0, 0.0
    for n in range(1, policy.max_terms):
        coef *= (n - 0.5) / n * z
        term = coef / (2 * n)
        total += term
        if term * z / (1 - z) <= policy.rtol * total + policy.atol:
            break
    return total


def _theorem6_families():
    """``(d, n, q, k)`` for the two hyperuniform families, small sizes."""
    out = [(4, 3, Fraction(3), Fraction(10))]
    for d in range(2, 7):
        for n in (2, 3, 4):
            out.append((d, n, Fraction(d - 1), Fraction(n * (d - 1) + 1)))
            if d >= 3:
                out.append((d, n, Fraction(d, 2) - 1, Fraction(n * (d - 2) + 2)))
    return out


_BRIDGE_CASES = [
    (3, (2, 2)), (3, (2, 3)), (2, (1, 1, 1)), (3, (Fraction(1, 2),) * 3),
    (3, (Fraction(3, 2), Fraction(1, 2), Fraction(1, 2))), (4, (1, 1)),
    (2, (2, 2)), (2, (2, 2, 2)), (3, (3, 3, 3, 3)), (6, (1, 1)), (6, (1, 1, 1)),
    (8, (1, 1)), (8, (1, 1, 1)), (5, (1, 1)),
]


def identity_suite(policy: SeriesPolicy = DEFAULT_POLICY) -> list:
    """Deterministic residual checks of the hypergeometric and moment identities."""
    results = []

    def record(name, residuals, tol=IDENTITY_TOL):
        worst = max(residuals)
        results.append(IdentityResult(name, worst, bool(worst < tol), tol))

    res = []
    for a in (0.1, 0.25, 0.5, 1.0, 1.5, 2.0):
        for b in (0.2, 0.5, 1.0, 1.3):
            for u in _grid(0.0, 0.45, 10):
                lhs = gauss_2f1(2 * a, 2 * b, a + b + 0.5, u, policy)
                rhs = gauss_2f1(a, b, a + b + 0.5, 4 * u - 4 * u * u, policy)
                res.append(abs(lhs - rhs))
    record("quadratic_transformation", res)

    zs = _grid(0.0, 0.9, 19)
    record("hyp_G_power", [abs(gauss_2f1(c / 2, (c + 1) / 2, c + 1, z, policy) - g_func(z) ** c)
                           for c in (0.5, 1.0, 2.0, 3.7) for z in zs])
    record("hyp2_G_power_over_sqrt", [
        abs(gauss_2f1(c / 2, (c + 1) / 2, c, z, policy) - g_func(z) ** (c - 1) / math.sqrt(1 - z))
        for c in (1.5, 2.0, 4.0) for z in zs])
    record("hyp3_log_G", [abs(_hyp3_series(z, policy) - math.log(g_func(z))) for z in zs])
    euler = []
    for p, q, r in ((0.5, 1.0, 2.0), (1.5, 0.3, 2.5), (2.0, 1.5, 1.5), (0.25, 0.75, 3.0), (1.0, 2.0, 0.7)):
        for z in zs:
            lhs = gauss_2f1(p, q, r, z, policy)
            rhs = (1 - z) ** (r - p - q) * gauss_2f1(r - p, r - q, r, z, policy)
            euler.append(abs(lhs - rhs))
    record("euler_transformation", euler)
    record("l_exponent_closed_forms", [
        abs(l_exponent(d, z, policy) - l_exponent_series(d, z, policy)) for d in (1, 2, 3) for z in zs],
        tol=1e-12)
    record("reg_inc_beta_symmetry", [
        abs(reg_inc_beta(p, q, x) + reg_inc_beta(q, p, 1 - x) - 1)
        for p in (0.5, 1.0, 2.5, 7.0) for q in (0.3, 1.0, 4.0) for x in _grid(0.0, 1.0, 11)],
        tol=1e-12)

    coeff_res, transform_res = [], []
    for d, n, q, k in _theorem6_families():
        cfg = WalkConfig(d, (q,) * n)
        order = 8 if (d, n, q) == (4, 3, 3) else 6
        coeff_res.append(0.0 if hyperuniform_check(cfg, k, order).is_hyperuniform else 1.0)
        Q = float(cfg.Q)
        for z in _grid(0.0, 0.9, 10):
            y = math.sqrt(z)
            target = gauss_2f1(Q / 2, (Q + 1) / 2, float(k) / 2, z, policy)
            # relative: the values reach 1e10 at the top of the grid
            transform_res.append(abs(t_walk_analytic(cfg, y, policy) - target) / target)
    record("hyperuniform_coefficients", coeff_res)
    record("hyperuniform_transform", transform_res)

    bridge = []
    for d, qs in _BRIDGE_CASES:
        cfg = WalkConfig(d, qs)
        law = radial_law(cfg)
        lhs = walk_taylor_coeffs(cfg, 6)
        rhs = moment_taylor_coeffs(law.radial_moment, cfg.Q, d, 6)
        bridge.extend(abs(float(a - b)) for a, b in zip(lhs, rhs))
    record("moment_coefficient_bridge", bridge)

    # limiting laws: exp(Q L_1) = (1-z)^(-Q/2), exp(Q L_2) = G^Q
    limit = []
    for Q in (Fraction(1), Fraction(2), Fraction(3), Fraction(5, 2)):
        cases = ((1, gauss_2f1_coefficients(Q / 2, Fraction(1), Fraction(1), 6), BetaLaw(Fraction(1, 2), Q / 2)),
                 (2, gauss_2f1_coefficients(Q / 2, (Q + 1) / 2, Q + 1, 6), BetaLaw(Fraction(1), Q)))
        for d, coeffs, law in cases:
            rhs = moment_taylor_coeffs(law.radial_moment, Q, d, 6)
            limit.extend(abs(float(a - b)) for a, b in zip(coeffs, rhs))
    record("limit_law_moments", limit)

    cls = []
    for d in range(2, 11):
        expected = {Fraction(d - 1)} | ({Fraction(d, 2) - 1} if d >= 3 else set())
        cls.append(0.0 if classify_q(d) == expected else 1.0)
    record("classify_q", cls)
    return results


def limit_convergence(Q: float = 1.0, d: int = 1, ns=(8, 64, 512), policy: SeriesPolicy = DEFAULT_POLICY):
    """Sup gap between the n-step transform with ``q = Q/n`` and its limit.

    Returns ``(gaps, log_ratios)``; first-order convergence gives log ratios
    near ``log(8)`` for the default ``ns``.
    """
    gaps = []
    for n in ns:
        cfg = WalkConfig(d, (Fraction(Q) / n if isinstance(Q, int) else Q / n,) * n)
        gaps.append(max(abs(t_walk_analytic(cfg, math.sqrt(z), policy) - t_limit(Q, d, math.sqrt(z), policy))
                        for z in _grid(0.1, 0.8, 8)))
    ratios = [math.log(a / b) for a, b in zip(gaps, gaps[1:])]
    return gaps, ratios


def limit_convergence_ok(ratios) -> bool:
    return all(1.5 <= r <= 2.7 for r in ratios)


def _kolesnik_exact() -> bool:
    a = thm13_density(2, 3)
    b = cor15_density(6)
    target = {2: Fraction(8), 3: Fraction(-20, 3)}
    return a.coefficient_map() == b.coefficient_map() == target and a.total_mass() == 1


def crosscheck_kolesnik(count: int = 10 ** 5, seed: int = 0) -> bool:
    """Exact equality of the two ``d = 6, q = (1, 1)`` pipelines plus a KS check."""
    if not _kolesnik_exact():
        return False
    batch = sample_walk(WalkConfig(6, (1, 1)), count, RngStream(seed, (6,)))
    return ks_radial(batch, thm13_density(2, 3)).passed


def matched_panels(seed: int, count: int, workers: int = 1):
    """``(name, batch, law)`` triples where the batch is drawn from ``law``."""
    rng = RngStream(seed)
    out = []
    walk_cases = [
        ("prop5_d3_q22", WalkConfig(3, (2, 2))),
        ("prop5_d3_q23", WalkConfig(3, (2, 3))),
        ("uniform_d2_q111", WalkConfig(2, (1, 1, 1))),
        ("prop5b_d3_q_half", WalkConfig(3, (Fraction(1, 2),) * 3)),
        ("thm11_n2_d2", WalkConfig(2, (2, 2))),
        ("thm11_n3_d2", WalkConfig(2, (2, 2, 2))),
        ("thm13_d6_n2", WalkConfig(6, (1, 1))),
        ("prop10_d1_q1_n2", WalkConfig(1, (1, 1))),
    ]
    for i, (name, cfg) in enumerate(walk_cases):
        out.append((name, sample_walk(cfg, count, rng.child(i), workers), radial_law(cfg)))
    base = len(walk_cases)
    out.append(("stick_Q1_d2", sample_stick_breaking(StickConfig(1.0, 2), count, rng.child(base), workers),
                BetaLaw(Fraction(1), Fraction(1))))
    out.append(("stick_Q3_d1_radial", sample_stick_breaking(StickConfig(3.0, 1), count, rng.child(base + 1), workers),
                BetaLaw(Fraction(1, 2), Fraction(3, 2))))
    a = sample_radial(BetaLaw(Fraction(1), Fraction(1)), 2, count, rng.child(base + 2))
    b = sample_radial(BetaLaw(Fraction(1), Fraction(2)), 2, count, rng.child(base + 3))
    out.append(("semigroup_d2_q1_q2", compose_semigroup(a, b, 1, 2, rng.child(base + 4)),
                BetaLaw(Fraction(1), Fraction(3))))
    return out


def _entry(name, statistic, critical, passed):
    return {"name": name, "statistic": float(statistic), "critical": float(critical), "pass": bool(passed)}


def _timestamp() -> str:
    # SOURCE_DATE_EPOCH pins the stamp so reports are reproducible byte for byte
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    t = int(epoch) if epoch else int(time.time())
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(t))


def run_suite(suite: str = "all", seed: int = 0, count: int = 10 ** 5, workers: int = 1,
              policy: SeriesPolicy = DEFAULT_POLICY) -> dict:
    """Run ``identities``, ``kolesnik``, ``panels`` or ``all`` into one JSON-ready report."""
    if suite not in ("all", "identities", "kolesnik", "panels"):
        raise ValueError(f"unknown suite {suite!r}")
    entries = []
    if suite in ("all", "identities"):
        for r in identity_suite(policy):
            entries.append(_entry(r.name, r.max_residual, r.tolerance, r.passed))
        for d in (1, 2, 3):
            gaps, ratios = limit_convergence(1, d, policy=policy)
            entries.append(_entry(f"limit_convergence_d{d}", min(ratios), 1.5,
                                  limit_convergence_ok(ratios) and gaps == sorted(gaps, reverse=True)))
    if suite in ("all", "kolesnik"):
        entries.append(_entry("kolesnik_exact", 0.0 if _kolesnik_exact() else 1.0, 0.5, _kolesnik_exact()))
        batch = sample_walk(WalkConfig(6, (1, 1)), count, RngStream(seed, (6,)), workers)
        rep = ks_radial(batch, thm13_density(2, 3), "kolesnik_ks")
        entries.append(_entry(rep.name, rep.statistic, rep.critical, rep.passed))
    if suite in ("all", "panels"):
        for name, batch, law in matched_panels(seed, count, workers):
            rep = ks_radial(batch, law, f"ks_{name}")
            entries.append(_entry(rep.name, rep.statistic, rep.critical, rep.passed))
            mom = moment_panel(batch, law, 4)
            entries.append(_entry(f"moments_{name}", mom.max_abs_z(), Z_LIMIT, mom.max_abs_z() <= Z_LIMIT))
    return {"suite": suite, "entries": entries, "seed": seed, "timestamp": _timestamp()}
