from __future__ import annotations

import math
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gstspace.errors import InvalidInput
from gstspace.model import GameSpec
from gstspace.points import (
    EquivWitness,
    affine_point,
    alternating_point,
    boundary_point,
    boundary_point_float,
    cross_term,
    equivalent,
    f_coeffs,
    f_eval,
    influence_oracle,
    involution,
    membership,
    random_ind_point,
    theta_brackets,
    theta_point,
    theta_roots,
)
from gstspace.quadform import psi
from gstspace import roots as R

TEQ = [F(1), F(1, 2), F(1, 3)]
# roots of f in (0, 1) for n = 10, frozen; test_n10_roots_independent_oracle
# recomputes them with numpy's companion-matrix solver
N10_ROOTS = (0.100498764474, 0.235210661797, 0.866589546415)


def test_membership_examples():
    assert membership(TEQ).in_gst
    r = membership([1, 0, 1])
    assert r.in_ind and not r.in_inf and not r.in_gst
    r = membership([F(3, 10)] * 4)
    assert r.in_ind and not r.in_inf and r.influence_witness is None


def test_membership_float_tolerances():
    r = membership([0.3, 0.3, 0.3])
    assert r.mode == "float" and r.in_ind and not r.in_inf
    r = membership([1.0, 0.5, 1 / 3 + 1e-13])
    assert r.in_gst
    assert not membership([1.0, 0.5, 0.34]).in_ind


def test_membership_box():
    r = membership([F(3, 2), F(3, 2), F(3, 2)])
    assert not r.in_box and not r.in_ind


def test_influence_oracle_examples():
    spec = GameSpec.gst(TEQ)
    assert influence_oracle(spec, "I1") and influence_oracle(spec, "I2")
    sym = GameSpec.gst([F(1, 5), F(2, 3), F(1, 5)])
    assert not influence_oracle(sym, "I1") and not influence_oracle(sym, "I2")
    alt = GameSpec.gst(alternating_point(5, F(1, 4), F(3, 4)))
    assert not influence_oracle(alt, "I1") and not influence_oracle(alt, "I2")
    with pytest.raises(InvalidInput):
        influence_oracle(spec, "I3")


def test_influence_oracle_general_spec_can_split_modes():
    # outside the GST setting I2 is strictly stronger: E_i depends on C_i only
    spec = GameSpec(3, F(1, 2), [F(1, 5)] * 3, [F(4, 5)] * 3)
    assert influence_oracle(spec, "I1")
    assert not influence_oracle(spec, "I2")


@pytest.mark.parametrize("n", range(3, 17))
def test_f_endpoints(n):
    assert f_eval(n, 0) == 1
    assert f_eval(n, 1) == 0
    assert R.evaluate(f_coeffs(n), F(2, 7)) == f_eval(n, F(2, 7))


@pytest.mark.parametrize("n", range(3, 13))
def test_psi_on_theta_family(n):
    # psi(theta, ..., theta^n) = theta^2 f(theta) / N^2
    N = 2 ** (n - 1)
    for t in (F(1, 3), F(2, 5), F(5, 7)):
        assert psi(theta_point(n, t)) == t * t * f_eval(n, t) / (N * N)


def test_f_signs_at_one_over_n():
    signs = {n: (f_eval(n, F(1, n)) > 0) - (f_eval(n, F(1, n)) < 0) for n in range(3, 17)}
    assert signs[3] == 0  # f(1/3) vanishes exactly
    assert all(signs[n] == 1 for n in range(4, 11))
    assert all(signs[n] == -1 for n in range(11, 17))


def test_n3_factorization_and_roots():
    expected = R.poly_mul(R.poly_mul(R.poly_mul([1, -1], [1, -1]), [1, 1]), [1, -3])
    assert f_coeffs(3) == expected
    assert theta_roots(3) == [F(1, 3)]
    assert f_eval(3, F(1, 3)) == 0
    for th in (F(1, 5), F(1, 2), F(4, 5)):
        assert psi(theta_point(3, th)) == F(1, 16) * th**2 * (1 - th**2) * (1 - 3 * th) * (1 - th)


def test_n10_roots():
    rs = [float(r) for r in theta_roots(10, F(1, 10**13))]
    assert len(rs) == 3
    for want in N10_ROOTS:
        assert min(abs(r - want) for r in rs) < 1e-11
    assert min(abs(r - 0.100499) for r in rs) < 1e-5
    assert min(abs(r - 0.86659) for r in rs) < 1e-5


def test_n10_roots_independent_oracle():
    import numpy as np

    coeffs = np.array(f_coeffs(10)[::-1], dtype=float)
    found = np.roots(coeffs)
    real = sorted(z.real for z in found if abs(z.imag) < 1e-9 and 0.01 < z.real < 0.95)
    assert real == pytest.approx(list(N10_ROOTS), abs=1e-8)


def test_n11_root_below_one_over_n():
    br = theta_brackets(11, F(1, 10**6))
    assert any(0 < a and b < F(1, 11) for a, b in br)


def test_theta_roots_bad_tol():
    with pytest.raises(InvalidInput):
        theta_roots(5, 0)


def test_theta_point():
    p = theta_point(3, F(1, 3))
    assert p == [F(1, 3), F(1, 9), F(1, 27)]
    assert membership(p).in_gst
    assert psi(theta_point(3, F(1, 2))) != 0
    for n in (4, 7):
        assert membership(theta_point(n, F(2, 3))).in_inf
    with pytest.raises(InvalidInput):
        theta_point(3, 1)


@pytest.mark.parametrize("n", range(4, 13))
def test_boundary_points(n):
    b = boundary_point(n)
    N = 2 ** (n - 1)
    assert list(b.poly) == R.primitive([1, 2, 1 - N])
    assert b.root_is_isolated()
    r = membership(b)
    assert r.in_box and r.in_ind and r.in_inf and r.psi_value == 0
    partner = involution(b)
    assert membership(partner).in_gst
    # partner's last coordinate is (sqrt(N) - 2) / (sqrt(N) - 1)
    assert abs(partner.floats()[-1] - (math.sqrt(N) - 2) / (math.sqrt(N) - 1)) < 1e-15
    assert abs(psi(boundary_point_float(n))) < 1e-12
    assert abs(b.floats()[-1] - 1 / (math.sqrt(N) - 1)) < 1e-15
    assert equivalent(b, partner) == EquivWitness(-1, 1)


def test_boundary_n4_quadratic():
    b = boundary_point(4)
    s = b.floats()[-1]
    assert abs((1 + s) ** 2 / 64 - s * s / 8) < 1e-15
    assert b.restriction() == [F(1, 64), F(2, 64), F(1, 64) - F(1, 8)]


def test_boundary_rejects_n3():
    with pytest.raises(InvalidInput, match="influence"):
        boundary_point(3)


def test_certified_point_with_wrong_coordinate_is_not_in_ind():
    b = boundary_point(5)
    moved = type(b)(b.base, b.index, (1, 3, -20), (F(0), F(1)))
    assert moved.root_is_isolated()
    assert not membership(moved).in_ind


def test_involution():
    p = [F(1), F(1, 2), F(1, 3)]
    assert involution(involution(p)) == p
    assert involution(p) == [0, F(1, 2), F(2, 3)]
    assert membership(involution(p)).in_gst
    m = [F(1, 2)] * 5
    assert involution(m) == m


def test_affine_point():
    p = TEQ
    assert affine_point(p, 1, 0) == p
    assert affine_point(p, -1, 1) == involution(p)
    for c in (F(1), F(1, 2), F(1, 9)):
        assert membership(affine_point(p, c, 0)).in_gst


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.fractions(min_value=-2, max_value=2, max_denominator=64), min_size=3, max_size=9),
    st.fractions(min_value=-3, max_value=3, max_denominator=64),
    st.fractions(min_value=-3, max_value=3, max_denominator=64),
)
def test_affine_invariance(p, x, y):
    assert psi(affine_point(p, x, y)) == x * x * psi(p)


def test_equivalent_examples():
    w = equivalent(TEQ, [F(1, 3), F(1, 9), F(1, 27)])
    assert w == EquivWitness(F(9, 4), F(1, 4))
    assert equivalent(TEQ, [1, 0, 1]) is None
    assert equivalent([F(1, 2)] * 3, [F(1, 5)] * 3) == EquivWitness(1, F(3, 10))
    assert equivalent(TEQ, [F(1, 5)] * 3) is None
    assert equivalent([F(1, 5)] * 3, TEQ) is None


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.fractions(min_value=0, max_value=1, max_denominator=64), min_size=3, max_size=7, unique=True),
    st.fractions(min_value=-4, max_value=4, max_denominator=16).filter(lambda v: v != 0),
    st.fractions(min_value=-4, max_value=4, max_denominator=16),
    st.fractions(min_value=-4, max_value=4, max_denominator=16).filter(lambda v: v != 0),
    st.fractions(min_value=-4, max_value=4, max_denominator=16),
)
def test_equivalence_laws(r, a1, b1, a2, b2):
    q = affine_point(r, a2, b2)
    p = affine_point(q, a1, b1)
    assert equivalent(p, p) == EquivWitness(1, 0)
    w = equivalent(p, q)
    assert w == EquivWitness(a1, b1)
    assert equivalent(q, p) == w.inverse()
    assert equivalent(p, r) == w.compose(equivalent(q, r))


def test_cross_term_properties():
    rng = random.Random(7)
    for n in (3, 5, 8):
        for _ in range(20):
            p = [F(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(n)]
            q = [F(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(n)]
            x, y = F(rng.randint(-5, 5), 3), F(rng.randint(-5, 5), 7)
            assert cross_term(p, [1] * n) == 0
            assert cross_term(p, q) == cross_term(q, p)
            mixed = [x * a + y * b for a, b in zip(p, q)]
            assert psi(mixed) == x * x * psi(p) + y * y * psi(q) + x * y * cross_term(p, q)
    with pytest.raises(InvalidInput):
        cross_term([1, 2], [1, 2, 3])


def test_cross_term_n10_pair():
    rs = theta_roots(10, F(1, 10**15))
    p, q = theta_point(10, float(rs[0])), theta_point(10, float(rs[2]))
    raw = cross_term(p, q)
    assert raw == pytest.approx(1.1464e-4, rel=1e-3)
    assert cross_term(p, q, scaled=True) == pytest.approx(30.0527, abs=1e-2)


@pytest.mark.parametrize("n", [3, 5, 6, 7, 8, 9, 10])
def test_random_ind_points(n):
    rng = random.Random(n)
    for _ in range(10):
        p = random_ind_point(n, rng)
        assert psi(p) == 0
        assert membership(p).in_gst


def test_n4_has_no_rational_seed():
    assert random_ind_point(4, random.Random(0)) is None
