from fractions import Fraction as F

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dirwalk import _rational as rp
from dirwalk.errors import DomainError, InternalError, NotClosedForm
from dirwalk.exactlaw import (
    WalkConfig,
    classify_q,
    cor15_density,
    cor15_mellin,
    detect_hyperuniform,
    emi_quadratic,
    hyperuniform_check,
    prop5_beta,
    prop10_law,
    prop12_b_coeffs,
    prop14_mellin,
    radial_law,
    thm11_law,
    thm11_mellin,
    thm13_density,
    thm13_moment,
    thm13_p_coeffs,
)
from dirwalk.laws import BetaLaw, GammaRatioMellin, PolyDensity, law_from_json
from dirwalk.specfun import g_func
from dirwalk.transform import moments_from_transform

from conftest import transform_moments


def poly_moment(law: PolyDensity, k: int):
    return sum((c / (e + k + 1) for c, e in law.terms), F(0))


# -- dispatcher --------------------------------------------------------------

@pytest.mark.parametrize("d,qs,law", [
    (3, (2, 2), BetaLaw(F(3, 2), F(1))),
    (3, (2, 3), BetaLaw(F(3, 2), F(1))),
    (3, (F(1, 2),) * 3, BetaLaw(F(3, 2), F(1))),
    (3, (F(3, 2), F(1, 2), F(1, 2)), BetaLaw(F(3, 2), F(1))),
    (2, (1, 1, 1), BetaLaw(F(1), F(1))),
    (4, (1, 1), BetaLaw(F(2), F(1))),
    (4, (3, 3, 3), BetaLaw(F(2), F(3))),
])
def test_radial_law_beta_cases(d, qs, law):
    assert radial_law(WalkConfig(d, qs)) == law


def test_radial_law_kolesnik_case():
    law = radial_law(WalkConfig(6, (1, 1)))
    assert law.coefficient_map() == {2: F(8), 3: F(-20, 3)}


def test_radial_law_float_parameters_become_exact():
    assert radial_law(WalkConfig(3, (0.5, 0.5, 0.5))) == BetaLaw(F(3, 2), F(1))


def test_radial_law_no_closed_form():
    with pytest.raises(NotClosedForm):
        radial_law(WalkConfig(5, (1, 2, 3)))
    with pytest.raises(NotClosedForm):
        radial_law(WalkConfig(3, (2,)))
    with pytest.raises(NotClosedForm):
        radial_law(WalkConfig(1, (1, 2)))


def test_walk_config_validation():
    with pytest.raises(DomainError):
        WalkConfig(0, (1,))
    with pytest.raises(DomainError):
        WalkConfig(2, (1, -1))
    with pytest.raises(DomainError):
        WalkConfig(2, ())


CLOSED_CASES = [
    (3, (2, 2)), (3, (2, 3)), (2, (1, 1, 1)), (3, (F(1, 2),) * 3), (4, (1, 1)),
    (2, (2, 2)), (2, (2, 2, 2)), (3, (3, 3)), (3, (3, 3, 3)), (2, (2, 2, 2, 2)),
    (6, (1, 1)), (6, (1, 1, 1)), (8, (1, 1)), (8, (1, 1, 1, 1)),
    (1, (1, 1)), (1, (F(1, 2),) * 3), (1, (2, 2, 2)),
    (2, (1, 3)), (4, (2, 5)),
]


@pytest.mark.parametrize("d,qs", CLOSED_CASES)
def test_law_moments_match_transform_oracle(d, qs):
    cfg = WalkConfig(d, qs)
    law = radial_law(cfg)
    want = transform_moments(cfg, 6)
    got = [law.radial_moment(k) for k in range(7)]
    if all(isinstance(g, F) for g in got):
        assert got == want
    else:
        assert np.allclose([float(g) for g in got], [float(w) for w in want], rtol=1e-12, atol=0)


@pytest.mark.parametrize("d,qs", [c for c in CLOSED_CASES if c[0] > 1])
def test_laws_have_unit_mass_and_json_round_trip(d, qs):
    law = radial_law(WalkConfig(d, qs))
    assert law.total_mass() == 1
    assert law_from_json(law.to_json()) == law


# -- uniform (hyperuniform) parametrizations --------------------------------

def test_prop5_examples():
    assert prop5_beta(1, 2, 3) == BetaLaw(F(3, 2), F(1))
    assert prop5_beta(2, 3, 3) == BetaLaw(F(3, 2), F(1))
    assert prop5_beta(1, 2, 2) == BetaLaw(F(1), F(1, 2))
    with pytest.raises(DomainError):
        prop5_beta(2, 2, 2)
    with pytest.raises(DomainError):
        prop5_beta(3, 2, 4)


@pytest.mark.parametrize("n,d", [(2, 3), (3, 4), (4, 5), (2, 6)])
def test_prop4_two_parametrisations_agree(n, d):
    # both parameter choices under FD land on the first beta law
    a = F(n * (d - 1))
    for k in range(6):
        first = moments_from_transform("FD", a, a / 2, d, k)
        second = moments_from_transform("FD", a + 1, a / 2 + 1, d, k)
        assert first == second == prop5_beta(1, n, d).moment(k)
    # FD1 and FD2 with a = b land on the second one
    c = n * (F(d, 2) - 1)
    for k in range(6):
        first = moments_from_transform("FD1", c, c, d, k)
        second = moments_from_transform("FD2", c + 1, c + 1, d, k)
        assert first == second == prop5_beta(2, n, d).moment(k)


# -- all parameters equal to d ---------------------------------------------

def test_thm11_even_small_case():
    law = thm11_law(2, 2)
    assert law.weights == (F(1, 2), F(1, 2))
    assert law.components == ((F(1), F(3, 2)), (F(2), F(1, 2)))


def test_thm11_odd_small_case():
    assert thm11_law(3, 2).terms == ((F(10, 7), F(0)), (F(-6, 7), F(1)))


def test_thm11_frozen_values():
    # frozen after checking against the transform-moment oracle below
    assert thm11_law(4, 3).weights == (F(33, 56), F(9, 28), F(5, 56))
    assert [c for c, _ in thm11_law(5, 2).terms] == [F(36, 13), F(-756, 143), F(420, 143), F(-60, 143)]


@pytest.mark.parametrize("N", range(1, 6))
@pytest.mark.parametrize("d", range(2, 9))
def test_thm11_even_weights(N, d):
    law = thm11_law(2 * N, d)
    assert all(w > 0 for w in law.weights)
    assert sum(law.weights) == 1


@pytest.mark.parametrize("N", range(1, 6))
@pytest.mark.parametrize("d", range(2, 9))
def test_thm11_odd_signs_and_mass(N, d):
    law = thm11_law(2 * N + 1, d)
    coeffs = [c for c, _ in law.terms]
    assert all((c > 0) == (k % 2 == 0) and c != 0 for k, c in enumerate(coeffs))
    assert law.total_mass() == 1


@pytest.mark.parametrize("n,d", [(2, 3), (3, 3), (4, 2), (5, 4)])
def test_thm11_law_matches_its_mellin_transform(n, d):
    law, mellin = thm11_law(n, d), thm11_mellin(n, d)
    for k in range(1, 7):
        assert law.moment(k) == mellin.mellin_moment(k)


def test_thm11_domain():
    with pytest.raises(DomainError):
        thm11_law(1, 3)


# -- B coefficients and polynomial densities --------------------------------

def test_prop12_small_d():
    assert prop12_b_coeffs(2) == [1]
    assert prop12_b_coeffs(3) == [F(4, 3), F(-1, 3)]


def test_prop12_d4_verified_values():
    # [3/5, -6/5, 8/5] would give 3/4 as the z coefficient; the true one is 1/8
    assert prop12_b_coeffs(4) == [F(8, 5), F(-7, 10), F(1, 10)]


@pytest.mark.parametrize("D", range(2, 8))
def test_prop12_identity_against_mpmath(D):
    b = prop12_b_coeffs(D)
    assert sum(b) == 1  # z = 0
    for z in (0.1, 0.5, 0.85):
        lhs = float(mpmath.hyp2f1(0.5, 1, D, z))
        rhs = sum(float(bk) * g_func(z) ** (k + 1) for k, bk in enumerate(b))
        assert abs(lhs - rhs) < 1e-12


def test_prop12_domain():
    with pytest.raises(DomainError):
        prop12_b_coeffs(1)


def test_thm13_p_coeffs():
    assert thm13_p_coeffs(2, 3) == {2: F(16, 9), 3: F(-8, 9), 4: F(1, 9)}
    assert list(thm13_p_coeffs(1, 4).values()) == prop12_b_coeffs(4)
    assert thm13_p_coeffs(3, 2) == {3: F(1)}


def test_thm13_moments():
    assert thm13_moment(2, 3, 0) == 1
    assert thm13_moment(2, 3, 1) == F(2, 3)
    assert thm13_moment(2, 3, 2) == F(22, 45)


def test_thm13_density_kolesnik():
    assert thm13_density(2, 3).coefficient_map() == {2: F(8), 3: F(-20, 3)}


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("D", [2, 3, 4, 5])
def test_thm13_density_mass_and_moments(n, D):
    law = thm13_density(n, D)
    assert law.total_mass() == 1
    for k in range(1, 7):
        assert poly_moment(law, k) == thm13_moment(n, D, k)
    assert [thm13_moment(n, D, k) for k in range(5)] == transform_moments(WalkConfig(2 * D, (1,) * n), 4)


def test_thm13_density_frozen():
    assert thm13_density(3, 3).coefficient_map() == {2: F(106, 3), 3: F(-260, 3), 4: F(70), 5: F(-56, 3)}


# -- two-step Mellin transforms ---------------------------------------------

def test_prop14_simplifies_to_beta_for_equal_d_minus_one():
    for d in (3, 4, 5):
        h = prop14_mellin(d - 1, d - 1, d).as_beta()
        assert h == BetaLaw(F(d - 1, 2), F(d, 2))


def test_prop14_uniform_d2():
    m = prop14_mellin(1, 1, 2)
    for s in (0.5, 1.0, 3.0):
        assert m.evaluate(s) == pytest.approx(1 / (1 + 2 * s), rel=1e-13)


def test_prop14_kolesnik_mellin():
    m = prop14_mellin(1, 1, 6)
    for s in (0.3, 1.0, 2.5):
        want = 16 * (s + 1.5) / ((s + 1) * (s + 2) * (s + 3) * (s + 4))
        assert m.evaluate(s) == pytest.approx(want, rel=1e-13)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([F(1, 2), F(1), F(3, 2), F(2), F(3)]),
       st.sampled_from([F(1, 2), F(1), F(5, 2), F(4)]), st.integers(2, 7))
def test_prop14_normalised_and_moments_match_transform(q1, q2, d):
    m = prop14_mellin(q1, q2, d)
    assert m.evaluate(0.0) == pytest.approx(1.0, abs=1e-14)
    want = transform_moments(WalkConfig(d, (q1, q2)), 4)
    assert [m.radial_moment(k) for k in range(5)] == want


def test_prop14_domain():
    with pytest.raises(DomainError):
        prop14_mellin(0, 1, 3)


def test_cor15():
    assert cor15_density(2) == BetaLaw(F(1), F(1, 2))
    assert cor15_density(6).coefficient_map() == {2: F(8), 3: F(-20, 3)}
    assert cor15_density(4).coefficient_map() == {1: F(2)}
    assert isinstance(cor15_density(5), GammaRatioMellin)


@pytest.mark.parametrize("d", [4, 6, 8, 10])
def test_cor15_density_matches_mellin(d):
    law, mellin = cor15_density(d), cor15_mellin(d)
    assert law.total_mass() == 1
    for k in range(1, 4):
        assert law.radial_moment(k) == mellin.radial_moment(k)


# -- one-dimensional mixed law ----------------------------------------------

def test_prop10_uniform_case():
    law = prop10_law(1, 2, F(1, 2))
    assert (law.atom_minus, law.atom_plus) == (F(1, 4), F(1, 4))
    ys = np.linspace(-0.99, 0.99, 9)
    assert np.allclose(law.pdf(ys), 0.25, atol=1e-15)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([F(1, 3), F(1, 2), F(1), F(2), F(5, 2)]), st.integers(1, 6),
       st.sampled_from([F(0), F(1, 5), F(1, 2), F(2, 3), F(1)]))
def test_prop10_unit_mass(q, n, p):
    law = prop10_law(q, n, p)
    assert law.total_mass() == 1


def test_prop10_all_positive_signs():
    law = prop10_law(2, 3, F(1))
    assert law.atom_plus == 1 and law.atom_minus == 0
    assert all(pc.weight == 0 for pc in law.pieces) or not law.pieces


def test_prop10_constant_integrates_to_weight():
    law = prop10_law(F(3, 2), 3, F(1, 3))
    for pc, (coef, ep, em) in zip(law.pieces, law.coefficient_pieces()):
        integral = mpmath.quad(lambda y: coef * (1 + y) ** float(ep) * (1 - y) ** float(em), [-1, 1])
        assert float(integral) == pytest.approx(float(pc.weight), rel=1e-12)


def test_prop10_cdf_has_atoms():
    law = prop10_law(1, 2, F(1, 2))
    assert float(law.cdf(-1.0)) == pytest.approx(0.25)
    assert float(law.cdf_left(-1.0)) == 0.0
    assert float(law.cdf(1.0)) == pytest.approx(1.0)
    assert float(law.cdf_left(1.0)) == pytest.approx(0.75)


# -- hyperuniformity ---------------------------------------------------------

def test_hyperuniform_examples():
    assert hyperuniform_check(WalkConfig(2, (1, 1, 1)), 4).is_hyperuniform
    assert hyperuniform_check(WalkConfig(3, (2, 2)), 5).is_hyperuniform
    for k in np.arange(3.5, 12, 0.5):
        assert not hyperuniform_check(WalkConfig(3, (1, 1)), F(k)).is_hyperuniform


def test_hyperuniform_check_domain():
    with pytest.raises(DomainError):
        hyperuniform_check(WalkConfig(3, (2, 2)), 5, order=1)
    with pytest.raises(DomainError):
        hyperuniform_check(WalkConfig(3, (2, 2)), 3)


def test_detect_hyperuniform():
    v = detect_hyperuniform(WalkConfig(4, (3, 3, 3)))
    assert v.is_hyperuniform and v.type_k == 10 and v.type_k > 4
    assert not detect_hyperuniform(WalkConfig(4, (2, 2))).is_hyperuniform


@pytest.mark.parametrize("d", range(2, 11))
def test_classify_q(d):
    want = {F(d - 1)} | ({F(d, 2) - 1} if d >= 3 else set())
    assert classify_q(d) == want


def test_emi_quadratic_roots_are_one_and_two():
    for n in (2, 3, 5):
        for q in (1, 2, F(7, 2)):
            c0, c1, c2 = emi_quadratic(n, q)
            assert c0 + c1 + c2 == 0 and c0 + 2 * c1 + 4 * c2 == 0


# -- exact polynomial helpers -------------------------------------------------

def test_partial_fractions_round_trip():
    num = [F(3), F(1)]
    shifts = [F(1), F(2), F(4)]
    parts = rp.partial_fractions(num, shifts)
    for s in (F(1, 3), F(5), F(-7, 2)):
        lhs = rp.evaluate(num, s) / ((s + 1) * (s + 2) * (s + 4))
        assert lhs == sum(r / (s + a) for a, r in parts)


def test_partial_fractions_rejects_repeated_poles():
    with pytest.raises(InternalError):
        rp.partial_fractions([F(1)], [F(1), F(1)])
