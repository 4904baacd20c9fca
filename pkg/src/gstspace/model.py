"""The cause/effect game and exact brute-force probability oracles.

``n`` players each toss a coin (the causes ``C_1..C_n``, with
``P(C_i = 1) = r``).  Given all the tosses, the effects ``E_1..E_n`` are
independent and

* ``P(E_i | causes) = p_k`` if ``C_i = 0`` and ``k`` causes (``C_i``
  included) are 0,
* ``P(E_i | causes) = q_k`` if ``C_i = 1`` and ``k`` causes are 1.

The GST setting is ``r = 1/2`` and ``p = q``.  Player, cause and
coordinate indices are 1-based throughout the public API, matching
``p_1..p_n``.

Every oracle here enumerates cause assignments; nothing uses the closed
forms of :mod:`gstspace.quadform`, so the two can check each other.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from ._numbers import EXACT, FLOAT, Scalar, all_exact, parse_scalar, to_json, vector_to_json
from .errors import EnumerationCapExceeded, InvalidInput, ZeroProbabilityCondition

#: exact oracles refuse beyond 2**24 cause assignments
ENUMERATION_CAP = 24


@dataclass(frozen=True)
class GameSpec:
    n: int
    r: Scalar
    p: tuple
    q: tuple

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 2:
            raise InvalidInput(f"n must be an integer >= 2, got {self.n!r}")
        object.__setattr__(self, "p", tuple(self.p))
        object.__setattr__(self, "q", tuple(self.q))
        if len(self.p) != self.n or len(self.q) != self.n:
            raise InvalidInput("p and q must both have n entries")
        for v in self.p + self.q:
            if not (v == v and 0 <= v <= 1):
                raise InvalidInput(f"probability {v!r} outside [0, 1]")
        if not (0 < self.r < 1):
            raise InvalidInput(f"r must lie in (0, 1), got {self.r!r}")

    @classmethod
    def gst(cls, p: Sequence) -> "GameSpec":
        """The fully symmetric game: ``r = 1/2``, ``q = p``."""
        p = tuple(p)
        half = Fraction(1, 2) if all_exact(p) else 0.5
        return cls(len(p), half, p, p)

    @property
    def is_gst(self) -> bool:
        return self.r == Fraction(1, 2) and self.p == self.q

    @property
    def mode(self) -> str:
        return EXACT if all_exact((self.r,) + self.p + self.q) else FLOAT

    def to_dict(self) -> dict:
        d = {"n": self.n, "r": to_json(self.r), "p": vector_to_json(self.p), "q": vector_to_json(self.q)}
        if self.mode == FLOAT:
            d["mode"] = FLOAT
        return d

    @classmethod
    def from_dict(cls, data: Mapping) -> "GameSpec":
        try:
            mode = data.get("mode", EXACT)
            p = [parse_scalar(v, mode) for v in data["p"]]
            q = [parse_scalar(v, mode) for v in data.get("q", data["p"])]
            r = parse_scalar(data.get("r", "1/2"), mode)
            n = int(data.get("n", len(p)))
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise InvalidInput(f"malformed game spec: {exc}") from exc
        return cls(n, r, p, q)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "GameSpec":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidInput(f"game spec is not valid JSON: {exc}") from exc
        return cls.from_dict(data)


def tequila() -> GameSpec:
    """The three-player drinking game: ``p = q = (1, 1/2, 1/3)``."""
    return GameSpec.gst([Fraction(1), Fraction(1, 2), Fraction(1, 3)])


def _check_index(spec: GameSpec, i: int, what: str = "player") -> None:
    if not isinstance(i, int) or not 1 <= i <= spec.n:
        raise InvalidInput(f"{what} index {i!r} outside 1..{spec.n}")


def _check_assignment(spec: GameSpec, x: Sequence[int]) -> tuple:
    x = tuple(x)
    if len(x) != spec.n or any(b not in (0, 1) for b in x):
        raise InvalidInput(f"cause assignment must be {spec.n} bits, got {x!r}")
    return x


def effect_prob(spec: GameSpec, i: int, x: Sequence[int]) -> Scalar:
    """``P(E_i | C = x)`` for a full cause assignment ``x``."""
    _check_index(spec, i)
    x = _check_assignment(spec, x)
    ones = sum(x)
    if x[i - 1] == 0:
        return spec.p[spec.n - ones - 1]
    return spec.q[ones - 1]


class _Scaled:
    """Integer (exact) or float view of a spec used by the enumerator.

    In exact mode every probability is rescaled to an integer over a
    common denominator so the hot loop runs on Python ints.
    """

    def __init__(self, spec: GameSpec):
        self.exact = spec.mode == EXACT
        if self.exact:
            r = Fraction(spec.r)
            vals = [Fraction(v) for v in spec.p + spec.q]
            den = math.lcm(*(v.denominator for v in vals))
            self.scale = den
            self.p = [int(v * den) for v in vals[: spec.n]]
            self.q = [int(v * den) for v in vals[spec.n:]]
            self.w1, self.w0 = r.numerator, r.denominator - r.numerator
        else:
            self.scale = 1.0
            self.p = [float(v) for v in spec.p]
            self.q = [float(v) for v in spec.q]
            self.w1, self.w0 = float(spec.r), 1.0 - float(spec.r)

    def ratio(self, num, den):
        if self.exact:
            return Fraction(num, den)
        return num / den


@dataclass
class Moments:
    """Sums over the cause assignments compatible with a conditioning event.

    ``mass`` is the (unnormalized) probability of the event, ``first[i]``
    the mass of ``E_i`` and ``second[i][j]`` that of ``E_i and E_j``; all
    0-based, scaled by ``_Scaled.scale`` per effect factor.
    """

    scaled: _Scaled
    mass: object
    first: list
    second: list

    def prob(self, i: int) -> Scalar:
        return self.scaled.ratio(self.first[i], self.mass * self.scaled.scale)

    def joint(self, i: int, j: int) -> Scalar:
        a, b = min(i, j), max(i, j)
        return self.scaled.ratio(self.second[a][b], self.mass * self.scaled.scale**2)

    def residual(self, i: int, j: int) -> Scalar:
        return self.joint(i, j) - self.prob(i) * self.prob(j)


def moments(spec: GameSpec, fixed: Mapping[int, int] | None = None, pairs: bool = True) -> Moments:
    """Enumerate all assignments agreeing with ``fixed`` (1-based cause -> bit)."""
    fixed = dict(fixed or {})
    for k, b in fixed.items():
        _check_index(spec, k, "cause")
        if b not in (0, 1):
            raise InvalidInput(f"cause value must be 0 or 1, got {b!r}")
    if spec.n > ENUMERATION_CAP and spec.mode == EXACT:
        raise EnumerationCapExceeded(
            f"n={spec.n} exceeds the exact enumeration cap of {ENUMERATION_CAP}; use the simulator"
        )
    n = spec.n
    sc = _Scaled(spec)
    free = [k for k in range(n) if (k + 1) not in fixed]
    base = [0] * n
    for k, b in fixed.items():
        base[k - 1] = b
    zero = 0 if sc.exact else 0.0
    mass = zero
    first = [zero] * n
    second = [[zero] * n for _ in range(n)] if pairs else []
    for bits in itertools.product((0, 1), repeat=len(free)):
        x = base[:]
        for k, b in zip(free, bits):
            x[k] = b
        ones = sum(x)
        w = sc.w1**ones * sc.w0 ** (n - ones)
        if not w:
            continue
        pz, qo = sc.p[n - ones - 1] if ones < n else None, sc.q[ones - 1] if ones else None
        e = [pz if b == 0 else qo for b in x]
        mass += w
        for i in range(n):
            we = w * e[i]
            first[i] += we
            if pairs and we:
                row = second[i]
                for j in range(i + 1, n):
                    row[j] += we * e[j]
    if not mass:
        raise ZeroProbabilityCondition(f"conditioning event {fixed} has probability zero")
    return Moments(sc, mass, first, second)


def marginal_effect(spec: GameSpec, i: int) -> Scalar:
    """``P(E_i)`` by summing over all ``2**n`` cause assignments."""
    _check_index(spec, i)
    return moments(spec, pairs=False).prob(i - 1)


def conditional_effect(spec: GameSpec, i: int, fixed: Mapping[int, int]) -> Scalar:
    _check_index(spec, i)
    return moments(spec, fixed, pairs=False).prob(i - 1)


def pair_prob_given_cause(spec: GameSpec, i: int, j: int, k: int, x: int) -> Scalar:
    """``P(E_i and E_j | C_k = x)``."""
    _check_index(spec, i)
    _check_index(spec, j)
    if i == j:
        raise InvalidInput("pair probability needs two distinct effects")
    return moments(spec, {k: x}).joint(i - 1, j - 1)


def screening_residual(
    spec: GameSpec, i: int, j: int, causes: Iterable[int] = (), values: Iterable[int] = ()
) -> Scalar:
    """``P(E_i E_j | S) - P(E_i | S) P(E_j | S)`` for the assignment ``causes = values``.

    Zero exactly when the fixed causes screen ``E_i`` off from ``E_j``.
    """
    _check_index(spec, i)
    _check_index(spec, j)
    if i == j:
        raise InvalidInput("screening residual needs two distinct effects")
    causes, values = tuple(causes), tuple(values)
    if len(causes) != len(values):
        raise InvalidInput("one value per conditioning cause is required")
    if len(set(causes)) != len(causes):
        raise InvalidInput("conditioning causes must be distinct")
    return moments(spec, dict(zip(causes, values))).residual(i - 1, j - 1)


def residual_matrix(spec: GameSpec, fixed: Mapping[int, int] | None = None) -> list[list[Scalar]]:
    """All pairwise screening residuals under one conditioning event (0-based)."""
    m = moments(spec, fixed)
    n = spec.n
    return [[m.residual(i, j) if i != j else None for j in range(n)] for i in range(n)]


def gst_marginal_formula(p: Sequence) -> Scalar:
    """Binomial closed form of ``P(E_i)`` in the GST setting."""
    n = len(p)
    total = sum(math.comb(n - 1, k) * p[k] for k in range(n))
    if all_exact(p):
        return Fraction(total, 2 ** (n - 1))
    return total / 2 ** (n - 1)


def influences(spec: GameSpec, cause: int, effect: int) -> bool:
    """Does flipping ``C_cause``, all other causes held fixed, ever change ``P(E_effect | causes)``?"""
    _check_index(spec, cause, "cause")
    _check_index(spec, effect)
    if spec.n > ENUMERATION_CAP:
        raise EnumerationCapExceeded(f"n={spec.n} exceeds the enumeration cap of {ENUMERATION_CAP}")
    for bits in itertools.product((0, 1), repeat=spec.n - 1):
        x = list(bits)
        x.insert(cause - 1, 0)
        before = effect_prob(spec, effect, x)
        x[cause - 1] = 1
        if effect_prob(spec, effect, x) != before:
            return True
    return False
