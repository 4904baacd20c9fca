"""Exact real-root isolation for integer polynomials on an interval.

Polynomials are coefficient lists, lowest degree first.  Signs are
evaluated exactly at rationals; brackets come from a dyadic grid that is
refined until it accounts for every root Sturm's theorem says is there.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from ._numbers import sign


def trim(p: list) -> list:
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def degree(p: Sequence) -> int:
    p = trim(p)
    return -1 if p == [0] else len(p) - 1


def poly_add(a, b):
    n = max(len(a), len(b))
    return trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def poly_sub(a, b):
    return poly_add(a, [-x for x in b])


def poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return trim(out)


def poly_pow(a, k: int):
    out = [1]
    for _ in range(k):
        out = poly_mul(out, a)
    return out


def derivative(p):
    return trim([i * p[i] for i in range(1, len(p))]) if len(p) > 1 else [0]


def evaluate(p: Sequence, x):
    """Horner evaluation; exact for rational ``x``."""
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def sign_at(p: Sequence, x: Fraction) -> int:
    """Exact sign of ``p(x)`` using only integer arithmetic."""
    x = Fraction(x)
    a, b = x.numerator, x.denominator
    d = len(p) - 1
    # b^d p(a/b) = sum c_i a^i b^(d-i) with b > 0
    total, apow, bpow = 0, 1, b**d
    for c in p:
        total += c * apow * bpow
        apow *= a
        bpow //= b
    return sign(total)


def divmod_poly(a, b):
    """Division over the rationals: ``a = q b + r``."""
    a = [Fraction(x) for x in trim(a)]
    b = [Fraction(x) for x in trim(b)]
    if degree(b) < 0:
        raise ZeroDivisionError("division by the zero polynomial")
    q = [Fraction(0)] * max(1, len(a) - len(b) + 1)
    r = a[:]
    while degree(r) >= degree(b) and degree(r) >= 0:
        shift = len(r) - len(b)
        f = r[-1] / b[-1]
        q[shift] = f
        for i, c in enumerate(b):
            r[i + shift] -= f * c
        r = trim(r)
        if r == [0]:
            break
    return trim(q), trim(r)


def primitive(p) -> list[int]:
    """Scale a rational polynomial to coprime integer coefficients, positive leading term."""
    from math import gcd, lcm

    p = [Fraction(x) for x in trim(p)]
    den = lcm(*(x.denominator for x in p))
    ints = [int(x * den) for x in p]
    g = 0
    for v in ints:
        g = gcd(g, v)
    g = g or 1
    ints = [v // g for v in ints]
    if ints[-1] < 0:
        ints = [-v for v in ints]
    return ints


def poly_gcd(a, b) -> list[int]:
    a, b = trim(a), trim(b)
    while degree(b) >= 0:
        _, r = divmod_poly(a, b)
        a, b = b, r
    return primitive(a)


def squarefree(p) -> list[int]:
    """``p / gcd(p, p')``: same real roots, all simple."""
    g = poly_gcd(p, derivative(p))
    if degree(g) <= 0:
        return primitive(p)
    q, r = divmod_poly(p, g)
    assert degree(r) < 0
    return primitive(q)


def deflate(p, root: Fraction) -> tuple[list[int], int]:
    """Remove every factor ``(x - root)``; returns the quotient and multiplicity."""
    root = Fraction(root)
    lin = primitive([-root, 1])
    mult = 0
    p = primitive(p)
    while degree(p) > 0 and sign_at(p, root) == 0:
        p, r = divmod_poly(p, lin)
        p = primitive(p)
        mult += 1
    return p, mult


def _content_free(p) -> list[int]:
    """Integer multiple of ``p`` by a positive factor (sign pattern kept)."""
    from math import gcd, lcm

    p = [Fraction(x) for x in trim(p)]
    den = lcm(*(x.denominator for x in p))
    ints = [int(x * den) for x in p]
    g = 0
    for v in ints:
        g = gcd(g, v)
    return [v // (g or 1) for v in ints]


def sturm_sequence(p) -> list[list[int]]:
    seq = [_content_free(p), _content_free(derivative(p))]
    while degree(seq[-1]) > 0:
        _, r = divmod_poly(seq[-2], seq[-1])
        if degree(r) < 0:
            break
        seq.append(_content_free([-c for c in r]))
    return seq


def _variations(seq, x: Fraction) -> int:
    signs = [s for s in (sign_at(q, x) for q in seq) if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots(p, lo: Fraction, hi: Fraction) -> int:
    """Number of distinct real roots in ``(lo, hi]`` (Sturm)."""
    seq = sturm_sequence(p)
    return _variations(seq, Fraction(lo)) - _variations(seq, Fraction(hi))


def isolate(p, lo: Fraction, hi: Fraction, grid_bits: int = 10, max_depth: int = 200) -> list[tuple[Fraction, Fraction]]:
    """Brackets ``(a, b)`` around each root of ``p`` in the open interval ``(lo, hi)``.

    ``p`` is made square-free first so every root is a sign change.  A
    dyadic grid of ``2**grid_bits`` cells is scanned for sign changes; when
    the brackets found fall short of the Sturm count, every cell is
    re-examined with Sturm counts and bisected until each holds one root.
    Roots that land exactly on a grid point come back as ``(r, r)``.
    """
    lo, hi = Fraction(lo), Fraction(hi)
    sf = squarefree(p)
    seq = sturm_sequence(sf)
    v_lo, v_hi = _variations(seq, lo), _variations(seq, hi)
    expected = v_lo - v_hi - (1 if sign_at(sf, hi) == 0 else 0)

    cells = 2**grid_bits
    xs = [lo + (hi - lo) * k / cells for k in range(cells + 1)]
    signs = [sign_at(sf, x) for x in xs]
    out = [(x, x) for x, s in zip(xs[1:-1], signs[1:-1]) if s == 0]
    out += [
        (xs[k], xs[k + 1])
        for k in range(cells)
        if signs[k] and signs[k + 1] and signs[k] != signs[k + 1]
    ]
    if len(out) == expected:
        # every sign-change cell holds at least one root, so each holds exactly one
        return sorted(out)

    out = [(x, x) for x, s in zip(xs[1:-1], signs[1:-1]) if s == 0]

    def split(a: Fraction, b: Fraction, va: int, vb: int, depth: int) -> None:
        inside = va - vb - (1 if sign_at(sf, b) == 0 else 0)
        if inside == 0:
            return
        sa, sb = sign_at(sf, a), sign_at(sf, b)
        if inside == 1 and sa and sb:
            out.append((a, b))
            return
        if depth >= max_depth:
            raise ArithmeticError("root isolation did not separate the roots")
        mid = (a + b) / 2
        vm = _variations(seq, mid)
        if sign_at(sf, mid) == 0:
            out.append((mid, mid))
        split(a, mid, va, vm, depth + 1)
        split(mid, b, vm, vb, depth + 1)

    vs = [_variations(seq, x) for x in xs]
    for k in range(cells):
        split(xs[k], xs[k + 1], vs[k], vs[k + 1], 0)
    out = sorted(set(out))
    if len(out) != expected:
        raise ArithmeticError(f"root isolation found {len(out)} roots, Sturm count is {expected}")
    return out


def refine(p, bracket: tuple[Fraction, Fraction], tol: Fraction) -> tuple[Fraction, Fraction]:
    """Bisect a sign-change bracket of ``p`` down to width ``<= tol``."""
    a, b = map(Fraction, bracket)
    if a == b:
        return a, b
    sa = sign_at(p, a)
    while b - a > tol:
        mid = (a + b) / 2
        sm = sign_at(p, mid)
        if sm == 0:
            return mid, mid
        if sm == sa:
            a = mid
        else:
            b = mid
    return a, b


def simplest_between(a: Fraction, b: Fraction) -> Fraction:
    """The rational with the smallest denominator in ``[a, b]`` (Stern-Brocot)."""
    a, b = Fraction(a), Fraction(b)
    if a > b:
        a, b = b, a
    fl = a.numerator // a.denominator
    if Fraction(fl) == a:
        return a
    if fl + 1 <= b:
        return Fraction(fl + 1)
    # a, b share integer part; recurse on reciprocals of fractional parts
    inner = simplest_between(1 / (b - fl), 1 / (a - fl))
    return fl + 1 / inner
