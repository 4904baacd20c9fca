"""Points of ``Ind_n``, ``Inf_n`` and ``GST_n = Ind_n & Inf_n``.

* ``Ind_n``: points of ``[0,1]^n`` with ``psi(p) = 0`` (pairwise independent effects);
* ``Inf_n``: points with ``p_s != p_{n-s+1}`` for some ``s`` (every cause
  influences every effect).

Besides membership this module builds the explicit families (constant,
alternating, ``p_k = theta^k``, boundary points), the affine structure
``p -> x p + y 1`` that preserves ``Ind_n``, and the cross term used to
decide when a segment stays inside ``Ind_n``.

Boundary points have one irrational coordinate.  They are represented by
:class:`CertifiedPoint`: rational coordinates plus one coordinate pinned
down as the unique root of an integer polynomial inside a rational
bracket, so every verdict about them is still decided exactly.
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import roots as R
from ._numbers import EXACT, FLOAT, Scalar, all_exact, to_json, vector_to_json
from .errors import InvalidInput
from .model import ENUMERATION_CAP, EnumerationCapExceeded, GameSpec, effect_prob
from .quadform import binom, hessian, psi

#: default Float-mode tolerances (|psi| and influence margin)
PSI_TOL = 1e-10
MARGIN_TOL = 1e-10


def _as_vector(p: Sequence) -> list:
    p = list(p)
    if len(p) < 2:
        raise InvalidInput("a probability vector needs at least two entries")
    if all_exact(p):
        return [Fraction(v) for v in p]
    out = [float(v) for v in p]
    if not all(math.isfinite(v) for v in out):
        raise InvalidInput("non-finite coordinate")
    return out


def prob_vector(p: Sequence) -> list:
    """Validate and normalize a point of ``[0,1]^n``."""
    p = _as_vector(p)
    bad = [v for v in p if not 0 <= v <= 1]
    if bad:
        raise InvalidInput(f"coordinates outside [0, 1]: {bad}")
    return p


def midpoint(n: int) -> list[Fraction]:
    return [Fraction(1, 2)] * n


# -- certified algebraic points -------------------------------------------


def _compose_linear(g: Sequence[int], a: Fraction, b: Fraction) -> list[int]:
    """Integer polynomial proportional to ``g(a t + b)``."""
    out = [Fraction(0)]
    lin = [Fraction(b), Fraction(a)]
    for k, c in enumerate(g):
        if c:
            out = R.poly_add(out, [c * v for v in R.poly_pow(lin, k)])
    return R.primitive(out)


@dataclass(frozen=True)
class CertifiedPoint:
    """A point whose coordinate ``index`` (0-based) is the unique root of ``poly`` in ``(lo, hi)``.

    ``base`` holds the other coordinates exactly (and 0 at ``index``).
    """

    base: tuple
    index: int
    poly: tuple
    bracket: tuple

    def __post_init__(self):
        object.__setattr__(self, "base", tuple(Fraction(v) for v in self.base))
        object.__setattr__(self, "poly", tuple(R.primitive(self.poly)))
        lo, hi = map(Fraction, self.bracket)
        object.__setattr__(self, "bracket", (lo, hi))
        if self.base[self.index] != 0:
            raise InvalidInput("base must be 0 at the certified coordinate")

    @property
    def n(self) -> int:
        return len(self.base)

    def root_is_isolated(self) -> bool:
        """Exactly one root of ``poly`` in the open bracket, none on its ends."""
        lo, hi = self.bracket
        g = list(self.poly)
        if lo >= hi or R.sign_at(g, lo) == 0 or R.sign_at(g, hi) == 0:
            return False
        return R.count_roots(R.squarefree(g), lo, hi) == 1

    def value(self, tol: Fraction = Fraction(1, 2**60)) -> Fraction:
        """Rational approximation of the certified coordinate within ``tol``."""
        a, b = R.refine(list(self.poly), self.bracket, tol)
        return (a + b) / 2

    def floats(self) -> list[float]:
        out = [float(v) for v in self.base]
        out[self.index] = float(self.value())
        return out

    def is_root(self, v: Fraction) -> bool:
        lo, hi = self.bracket
        return lo < v < hi and R.sign_at(list(self.poly), v) == 0

    def restriction(self) -> list[Fraction]:
        """``psi(base + s e_index)`` as a polynomial in ``s`` (lowest degree first)."""
        Q = hessian(self.n).Q
        i = self.index
        c = psi(list(self.base))
        b = 2 * sum(Q[i][j] * self.base[j] for j in range(self.n))
        a = Q[i][i]
        return R.trim([c, b, a])

    def affine(self, x, y) -> "CertifiedPoint":
        """The point ``x p + y 1`` (``x != 0``), still certified exactly."""
        x, y = Fraction(x), Fraction(y)
        if x == 0:
            raise InvalidInput("affine image needs x != 0")
        base = [x * v + y for v in self.base]
        base[self.index] = Fraction(0)
        # new coordinate t = x s + y, so s = (t - y) / x
        poly = _compose_linear(self.poly, 1 / x, -y / x)
        ends = sorted(x * v + y for v in self.bracket)
        return CertifiedPoint(tuple(base), self.index, tuple(poly), tuple(ends))

    def certificate(self) -> dict:
        return {
            "coordinate": self.index + 1,
            "polynomial": list(self.poly),
            "bracket": vector_to_json(self.bracket),
            "psi_restriction": vector_to_json(self.restriction()),
        }

    def to_dict(self) -> dict:
        p = vector_to_json(self.base)
        p[self.index] = float(self.value())
        return {"n": self.n, "p": p, "certificates": self.certificate()}


# -- membership --------------------------------------------------------------


@dataclass
class MembershipReport:
    p: object
    mode: str
    in_box: bool
    psi_value: Scalar | None
    in_ind: bool
    in_inf: bool
    influence_witness: int | None
    influence_margin: Scalar
    certificate: dict | None = None

    @property
    def in_gst(self) -> bool:
        return self.in_ind and self.in_inf

    def to_dict(self) -> dict:
        if isinstance(self.p, CertifiedPoint):
            point = self.p.to_dict()["p"]
        else:
            point = vector_to_json(self.p)
        d = {
            "n": len(point),
            "p": point,
            "mode": self.mode,
            "in_box": self.in_box,
            "psi": None if self.psi_value is None else to_json(self.psi_value),
            "in_ind": self.in_ind,
            "in_inf": self.in_inf,
            "in_gst": self.in_gst,
            "influence_witness": self.influence_witness,
            "influence_margin": to_json(self.influence_margin),
        }
        if self.certificate is not None:
            d["certificates"] = self.certificate
        return d


def influence_margin(p: Sequence) -> tuple[Scalar, int | None]:
    """``max_s |p_s - p_{n-s+1}|`` and the smallest ``s`` attaining it (None if 0)."""
    n = len(p)
    best, arg = abs(p[0] - p[0]), None
    for s in range(n // 2):
        d = abs(p[s] - p[n - 1 - s])
        if d > best:
            best, arg = d, s + 1
    return best, arg


def membership(p, tol: float = PSI_TOL, margin_tol: float = MARGIN_TOL) -> MembershipReport:
    """Verdicts for ``Ind_n``, ``Inf_n`` and ``GST_n``.

    Rational input is decided exactly; any float coordinate switches to
    Float mode with ``|psi| <= tol`` and influence margin ``> margin_tol``.
    A :class:`CertifiedPoint` is decided exactly from its certificate.
    """
    if isinstance(p, CertifiedPoint):
        return _membership_certified(p)
    p = _as_vector(p)
    exact = all_exact(p)
    in_box = all(0 <= v <= 1 for v in p)
    value = psi(p)
    margin, witness = influence_margin(p)
    if exact:
        in_ind = in_box and value == 0
        in_inf = witness is not None
    else:
        in_ind = in_box and abs(value) <= tol
        in_inf = margin > margin_tol
        if not in_inf:
            witness = None
    return MembershipReport(p, EXACT if exact else FLOAT, in_box, value, in_ind, in_inf, witness, margin)


def _membership_certified(cp: CertifiedPoint) -> MembershipReport:
    isolated = cp.root_is_isolated()
    lo, hi = cp.bracket
    others = [v for k, v in enumerate(cp.base) if k != cp.index]
    in_box = isolated and lo >= 0 and hi <= 1 and all(0 <= v <= 1 for v in others)
    # psi vanishes at the root iff the restriction shares that root with poly
    rest = cp.restriction()
    if R.degree(rest) < 0:
        zero = True
    elif R.degree(rest) == 0:
        zero = False
    else:
        h = R.poly_gcd(R.primitive(rest), list(cp.poly))
        zero = R.degree(h) > 0 and R.count_roots(R.squarefree(h), lo, hi) == 1
    value = Fraction(0) if zero else psi(cp.floats())
    n, i = cp.n, cp.index
    witness = None
    for s in range(n // 2):
        a, b = s, n - 1 - s
        if i in (a, b):
            other = cp.base[b if i == a else a]
            differ = not cp.is_root(other)
        else:
            differ = cp.base[a] != cp.base[b]
        if differ:
            witness = s + 1
            break
    margin, _ = influence_margin(cp.floats())
    return MembershipReport(
        cp, EXACT, in_box, value, in_box and zero and isolated, witness is not None, witness, margin,
        certificate=cp.certificate(),
    )


# -- influence by enumeration -------------------------------------------------


def influence_oracle(spec: GameSpec, mode: str = "I2") -> bool:
    """Enumerated influence check.

    ``I1``: each cause ``C_i`` influences its own effect ``E_i``.
    ``I2``: every cause influences every effect.  A cause influences an
    effect when, for some assignment of the remaining causes, flipping it
    changes ``P(E | causes)``.
    """
    if mode not in ("I1", "I2"):
        raise InvalidInput(f"influence mode must be I1 or I2, got {mode!r}")
    n = spec.n
    if n > ENUMERATION_CAP:
        raise EnumerationCapExceeded(f"n={n} exceeds the enumeration cap of {ENUMERATION_CAP}")
    pairs = [(i, i) for i in range(1, n + 1)] if mode == "I1" else list(itertools.product(range(1, n + 1), repeat=2))
    rest = list(itertools.product((0, 1), repeat=n - 1))
    for cause, effect in pairs:
        found = False
        for bits in rest:
            x = list(bits)
            x.insert(cause - 1, 0)
            before = effect_prob(spec, effect, x)
            x[cause - 1] = 1
            if effect_prob(spec, effect, x) != before:
                found = True
                break
        if not found:
            return False
    return True


# -- the theta-power family ----------------------------------------------------


def f_coeffs(n: int) -> list[int]:
    """Integer coefficients of ``f`` (lowest degree first)."""
    if not isinstance(n, int) or n < 3:
        raise InvalidInput(f"f(theta) is defined for n >= 3, got {n!r}")
    a = R.poly_pow([1, 1], 2 * n - 2)
    b = [0, 0] + R.poly_pow([1, 0, 1], n - 2)
    c = [0] * (n - 2) + [1]
    out = R.poly_sub(a, [2 ** (n - 1) * v for v in b])
    return R.poly_sub(out, [2 ** (2 * n - 3) * v for v in c])


def f_eval(n: int, theta) -> Scalar:
    """``f(theta) = (1+theta)^(2n-2) - 2^(n-1) theta^2 (1+theta^2)^(n-2) - 2^(2n-3) theta^(n-2)``."""
    if not isinstance(n, int) or n < 3:
        raise InvalidInput(f"f(theta) is defined for n >= 3, got {n!r}")
    t = Fraction(theta) if all_exact([theta]) else float(theta)
    return (1 + t) ** (2 * n - 2) - 2 ** (n - 1) * t**2 * (1 + t**2) ** (n - 2) - 2 ** (2 * n - 3) * t ** (n - 2)


def theta_brackets(n: int, tol=Fraction(1, 10**12)) -> list[tuple[Fraction, Fraction]]:
    """Brackets of width ``<= tol`` around every root of ``f`` in ``(0, 1)``.

    A rational root comes back as a degenerate bracket ``(r, r)``.
    """
    tol = Fraction(tol)
    if tol <= 0:
        raise InvalidInput("tol must be positive")
    g, _ = R.deflate(f_coeffs(n), Fraction(1))
    sf = R.squarefree(g)
    out = []
    for br in R.isolate(sf, Fraction(0), Fraction(1)):
        a, b = R.refine(sf, br, tol)
        if a != b:
            cand = R.simplest_between(a, b)
            if R.sign_at(sf, cand) == 0:
                a = b = cand
        out.append((a, b))
    return out


def theta_roots(n: int, tol=Fraction(1, 10**12)) -> list[Fraction]:
    """Roots of ``f`` in ``(0, 1)``: exact when rational, else a bracket midpoint within ``tol``."""
    return [(a + b) / 2 for a, b in theta_brackets(n, tol)]


def theta_point(n: int, theta) -> list:
    """``(theta, theta^2, ..., theta^n)``; in ``GST_n`` exactly when ``f(theta) = 0``."""
    t = Fraction(theta) if all_exact([theta]) else float(theta)
    if not 0 < t < 1:
        raise InvalidInput(f"theta must lie in (0, 1), got {theta!r}")
    return [t**k for k in range(1, n + 1)]


# -- boundary points ----------------------------------------------------------


def boundary_point(n: int) -> CertifiedPoint:
    """``(1, 0, ..., 0, 1/(sqrt(N) - 1))`` with ``N = 2^(n-1)``.

    The last coordinate is the root in ``(0, 1)`` of ``(1-N) s^2 + 2 s + 1``.
    """
    if not isinstance(n, int) or n < 3:
        raise InvalidInput(f"boundary points need n >= 4, got {n!r}")
    if n == 3:
        raise InvalidInput(
            "for n = 3 the construction gives (1, 0, 1): independent, but p_1 = p_3 so influence fails"
        )
    N = 2 ** (n - 1)
    base = [Fraction(0)] * n
    base[0] = Fraction(1)
    return CertifiedPoint(tuple(base), n - 1, (1, 2, 1 - N), (Fraction(0), Fraction(1)))


def boundary_point_float(n: int) -> list[float]:
    N = 2 ** (n - 1)
    p = [1.0] + [0.0] * (n - 1)
    p[-1] = 1.0 / (math.sqrt(N) - 1.0)
    return p


# -- affine structure --------------------------------------------------------


def involution(p):
    """``1 - p``; fixes only ``m = (1/2, ..., 1/2)``."""
    if isinstance(p, CertifiedPoint):
        return p.affine(-1, 1)
    return [1 - v for v in _as_vector(p)]


def affine_point(p, x, y):
    """``x p + y 1``; ``psi`` scales by ``x^2``.  May leave the box."""
    if isinstance(p, CertifiedPoint):
        return p.affine(x, y)
    return [x * v + y for v in _as_vector(p)]


@dataclass(frozen=True)
class EquivWitness:
    """``p = a q + b 1`` with ``a != 0``."""

    a: Scalar
    b: Scalar

    def inverse(self) -> "EquivWitness":
        return EquivWitness(1 / self.a, -self.b / self.a)

    def compose(self, other: "EquivWitness") -> "EquivWitness":
        """If ``p = self(q)`` and ``q = other(r)`` then ``p = result(r)``."""
        return EquivWitness(self.a * other.a, self.a * other.b + self.b)

    def to_dict(self) -> dict:
        return {"a": to_json(self.a), "b": to_json(self.b)}


def _solve_equiv(p: Sequence, q: Sequence) -> EquivWitness | None:
    n = len(q)
    ref = next((j for j in range(1, n) if q[j] != q[0]), None)
    if ref is None:
        if all(v == p[0] for v in p):
            return EquivWitness(1, p[0] - q[0])
        return None
    a = (p[0] - p[ref]) / (q[0] - q[ref])
    if a == 0:
        return None
    b = p[0] - a * q[0]
    if all(p[k] == a * q[k] + b for k in range(n)):
        return EquivWitness(a, b)
    return None


def equivalent(p, q) -> EquivWitness | None:
    """A witness ``(a, b)`` with ``p = a q + b 1`` and ``a != 0``, or None."""
    pc, qc = isinstance(p, CertifiedPoint), isinstance(q, CertifiedPoint)
    if not pc and not qc:
        p, q = _as_vector(p), _as_vector(q)
        if len(p) != len(q):
            raise InvalidInput("points have different lengths")
        return _solve_equiv(p, q)
    if pc != qc:
        return None
    if p.n != q.n or p.index != q.index:
        return None
    i = p.index
    idx = [k for k in range(p.n) if k != i]
    w = _solve_equiv([p.base[k] for k in idx], [q.base[k] for k in idx])
    if w is None or w.a == 0:
        return None
    # the certified coordinates must match too: a * s_q + b is the root of p.poly
    image = q.affine(w.a, w.b)
    if list(image.poly) != list(p.poly):
        return None
    lo, hi = max(image.bracket[0], p.bracket[0]), min(image.bracket[1], p.bracket[1])
    if lo >= hi or R.count_roots(R.squarefree(list(p.poly)), lo, hi) != 1:
        return None
    return w


def cross_term(p: Sequence, q: Sequence, scaled: bool = False) -> Scalar:
    """``CT(p, q) = 2 p^T Q_n q`` so that ``psi(x p + y q) = x^2 psi(p) + y^2 psi(q) + x y CT(p, q)``.

    With ``scaled=True`` the value is multiplied by ``N^2 = 4^(n-1)``, the
    normalization in which ``psi`` has integer-binomial coefficients.
    """
    p, q = _as_vector(p), _as_vector(q)
    n = len(p)
    if len(q) != n:
        raise InvalidInput("cross term needs two vectors of the same length")
    exact = all_exact(p + q)
    N = 2 ** (n - 1)
    s_p = sum(binom(n - 1, k) * p[k] for k in range(n))
    s_q = sum(binom(n - 1, k) * q[k] for k in range(n))
    # polarize the defining sums of psi
    t = sum(
        binom(n - 2, k) * (2 * p[k + 1] * q[k + 1] + p[k] * q[n - k - 2] + q[k] * p[n - k - 2])
        for k in range(n - 1)
    )
    if exact:
        ct = Fraction(2 * s_p * s_q, N * N) - Fraction(t) / N
    else:
        ct = 2 * s_p * s_q / (N * N) - t / N
    return ct * N * N if scaled else ct


# -- explicit families --------------------------------------------------------


def constant_point(n: int, c) -> list:
    return [c] * n


def alternating_point(n: int, a, b) -> list:
    """``(a, b, a, b, ...)``: in ``Ind_n`` for odd ``n``, never in ``Inf_n`` then."""
    return [a if k % 2 == 0 else b for k in range(n)]


# -- random rational points (seeded; for tests and sampling) ------------------


def random_rational(rng: random.Random, bound: int = 64) -> Fraction:
    """Uniform-ish rational in ``[0, 1]`` with denominator at most ``bound``."""
    den = rng.randint(1, bound)
    return Fraction(rng.randint(0, den), den)


def random_vector(rng: random.Random, n: int, bound: int = 64) -> list[Fraction]:
    return [random_rational(rng, bound) for _ in range(n)]


def _into_box(x: Sequence[Fraction], rng: random.Random) -> list[Fraction] | None:
    """Affine image of a non-constant ``x`` inside ``[0, 1]^n`` (random scale and offset)."""
    lo, hi = min(x), max(x)
    if lo == hi:
        return None
    scale = Fraction(rng.randint(1, 8), 8) / (hi - lo)
    width = scale * (hi - lo)
    offset = Fraction(rng.randint(0, 8), 8) * (1 - width)
    out = [scale * (v - lo) + offset for v in x]
    if rng.random() < 0.5:
        out = [1 - v for v in out]
    return out


_SEEDS: dict[int, list[Fraction]] = {}


def _find_seed(n: int) -> list[Fraction] | None:
    """A rational zero of ``psi`` with influence, or None.

    Odd ``n`` uses the alternating vector.  Otherwise ``psi`` is restricted
    to planes spanned by sparse integer vectors; a binary form whose
    discriminant is a perfect square has a rational zero.
    """
    if n in _SEEDS:
        return _SEEDS[n]
    found = None
    if n % 2 == 1:
        found = [Fraction(v) for v in alternating_point(n, 1, 0)]
        # alternating vectors fail influence; one secant step fixes that
        found = _secant(found, [Fraction(k * k) for k in range(n)])
    else:
        N2 = 4 ** (n - 1)
        Q = hessian(n).Q
        M = [[int(Q[i][j] * N2) for j in range(n)] for i in range(n)]

        def form(u, w):
            return sum(u[i] * M[i][j] * w[j] for i in range(n) if u[i] for j in range(n) if w[j])

        vecs = []
        for i in range(n):
            v = [0] * n
            v[i] = 1
            vecs.append(v)
        for i, k in itertools.combinations(range(n), 2):
            for a in (-2, -1, 1, 2):
                v = [0] * n
                v[i], v[k] = 1, a
                vecs.append(v)
        for u, w in itertools.combinations(vecs, 2):
            a, b, c = form(u, u), 2 * form(u, w), form(w, w)
            disc = b * b - 4 * a * c
            if a == 0 or disc < 0 or math.isqrt(disc) ** 2 != disc:
                continue
            s = Fraction(-b + math.isqrt(disc), 2 * a)
            pt = [s * u[k] + w[k] for k in range(n)]
            if influence_margin(pt)[1] is not None:
                found = pt
                break
    _SEEDS[n] = found
    return found


def _secant(x: list[Fraction], d: list[Fraction]) -> list[Fraction] | None:
    """Second intersection of the line ``x + s d`` with ``psi = 0`` (``x`` on it)."""
    a = psi(d)
    if a == 0:
        return None
    s = -cross_term(x, d) / a
    return [xi + s * di for xi, di in zip(x, d)]


def random_ind_point(n: int, rng: random.Random, influence: bool = True, max_tries: int = 200) -> list[Fraction] | None:
    """A random rational point of ``Ind_n`` (of ``GST_n`` when ``influence``).

    Secants through a known rational zero of ``psi`` meet the quadric again
    at a rational point; an affine map then brings it into the box.  For
    ``n = 3`` the plane ``p_1 - 4 p_2 + 3 p_3 = 0`` is sampled directly.
    Returns None when no rational seed is known (``n = 4``).
    """
    if n == 3:
        for _ in range(max_tries):
            p1, p3 = random_rational(rng), random_rational(rng)
            p2 = (p1 + 3 * p3) / 4
            if p1 != p3 or not influence:
                return [p1, p2, p3]
        return None
    seed = _find_seed(n)
    if seed is None:
        return None
    for _ in range(max_tries):
        d = [Fraction(rng.randint(-4, 4), rng.randint(1, 4)) for _ in range(n)]
        x = _secant(seed, d)
        pt = None if x is None else _into_box(x, rng)
        if pt is None:
            continue
        if influence and influence_margin(pt)[1] is None:
            continue
        return pt
    return None
