from __future__ import annotations

from fractions import Fraction as F

from hypothesis import given, settings
from hypothesis import strategies as st

from gstspace import roots as R


def from_roots(rs):
    p = [1]
    for r in rs:
        p = R.poly_mul(p, [-r, 1])
    return R.primitive(p)


def test_sign_at_exact():
    p = [-2, 0, 1]
    assert R.sign_at(p, F(141, 100)) == -1
    assert R.sign_at(p, F(142, 100)) == 1
    assert R.sign_at([0, 0, 1], F(0)) == 0


def test_count_and_isolate_sqrt2():
    p = [-2, 0, 1]
    assert R.count_roots(p, -5, 5) == 2
    (a, b), = R.isolate(p, F(0), F(2))
    assert a < F(141421356, 10**8) < b
    a, b = R.refine(p, (a, b), F(1, 10**12))
    assert b - a <= F(1, 10**12) and a * a < 2 < b * b


def test_squarefree_and_deflate():
    p = R.poly_mul([-1, 1], [-1, 1])
    assert R.squarefree(p) == [-1, 1]
    q, mult = R.deflate(R.poly_mul(p, [1, 1]), F(1))
    assert mult == 2 and q == [1, 1]


def test_isolate_close_and_grid_roots():
    rs = [F(1, 1000), F(1001, 1000000), F(1, 2)]
    out = R.isolate(from_roots(rs), F(0), F(1))
    assert len(out) == 3
    assert (F(1, 2), F(1, 2)) in out
    for r, (a, b) in zip(sorted(rs), out):
        assert a <= r <= b


def test_simplest_between():
    assert R.simplest_between(F(33, 100), F(34, 100)) == F(1, 3)
    assert R.simplest_between(F(1, 2), F(1, 2)) == F(1, 2)
    assert R.simplest_between(F(3, 2), F(5, 2)) == 2


@settings(max_examples=50, deadline=None)
@given(st.lists(st.fractions(min_value=F(1, 50), max_value=F(49, 50), max_denominator=50), min_size=1, max_size=5, unique=True))
def test_isolate_recovers_rational_roots(rs):
    p = from_roots(rs)
    out = R.isolate(p, F(0), F(1))
    assert len(out) == len(rs)
    for r, (a, b) in zip(sorted(rs), out):
        assert a <= r <= b
