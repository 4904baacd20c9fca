"""Geometry of ``Ind_n`` and ``GST_n`` around the midpoint ``m``.

Writing ``p = m + P y`` with ``P`` orthogonal and ``P^T Q_n P = D`` turns
``psi`` into ``sum_i lambda_i y_i^2 - sum_j |mu_j| y_{k+j}^2``; the kernel
coordinate (along ``1``) does not enter at all.  Everything here works in
those coordinates:

* the contraction ``(1 - t) p + t x`` onto a constant point;
* exact segment classification through the cross term;
* sampling of ``GST_n`` on the quadric near ``m``;
* component labels when one eigenvalue sign is unique (``n = 3, 4``);
* a seeded path search on the quadric for the connected regime.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from ._numbers import all_exact, to_json, vector_to_json
from .errors import InvalidInput
from .points import (
    CertifiedPoint,
    PSI_TOL,
    cross_term,
    equivalent,
    influence_margin,
    membership,
)
from .quadform import eigen_sym, hessian, psi

#: waypoints closer than this to the no-influence subspace are rejected
PATH_MARGIN = 1e-6
PATH_PSI_TOL = 1e-6
#: radius (Euclidean, in y) of the ball kept inside the box: |P y|_inf <= |y|_2
BALL = 0.49
EXPERIMENTAL_N = (5, 6, 7)


# -- eigen frame ---------------------------------------------------------------


@dataclass(frozen=True)
class EigenFrame:
    """Columns of ``P`` ordered as (kernel, positive block, negative block)."""

    n: int
    P: np.ndarray
    D: np.ndarray
    k: int
    l: int

    def to_y(self, p: Sequence[float]) -> np.ndarray:
        return self.P.T @ (np.asarray(p, dtype=float) - 0.5)

    def to_p(self, y: np.ndarray) -> np.ndarray:
        return 0.5 + self.P @ y

    def blocks(self, y: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
        return y[0], y[1 : 1 + self.k], y[1 + self.k :]

    def block_norms(self, y: np.ndarray) -> tuple[float, float]:
        """D-weighted norms of the positive and negative blocks."""
        _, u, w = self.blocks(y)
        pos = float(np.sqrt(np.sum(self.D[1 : 1 + self.k] * u * u)))
        neg = float(np.sqrt(np.sum(-self.D[1 + self.k :] * w * w)))
        return pos, neg

    def quad(self, y: np.ndarray) -> float:
        return float(np.sum(self.D * y * y))


_FRAMES: dict[int, EigenFrame] = {}


def eigen_frame(n: int) -> EigenFrame:
    if n in _FRAMES:
        return _FRAMES[n]
    Q = hessian(n).Q_float()
    pairs = eigen_sym(Q)
    thr = 1e-10 * np.abs(Q).max()
    zero = [pr for pr in pairs if abs(pr[0]) <= thr]
    pos = [pr for pr in pairs if pr[0] > thr]
    neg = [pr for pr in pairs if pr[0] < -thr]
    if len(zero) != 1:
        raise InvalidInput(f"expected a one-dimensional kernel for n={n}, found {len(zero)}")
    ordered = zero + pos + neg
    P = np.column_stack([v for _, v in ordered])
    if P[:, 0].sum() < 0:
        P[:, 0] = -P[:, 0]
    D = np.array([0.0] + [val for val, _ in pos + neg])
    frame = EigenFrame(n, P, D, len(pos), len(neg))
    _FRAMES[n] = frame
    return frame


# -- component certificate ----------------------------------------------------


@dataclass(frozen=True)
class ComponentLabel:
    sign: int
    coordinate: float
    block: str

    def to_dict(self) -> dict:
        return {"sign": self.sign, "coordinate": self.coordinate, "block": self.block}


def _float_point(p) -> list[float]:
    if isinstance(p, CertifiedPoint):
        return p.floats()
    return [float(v) for v in p]


def component_label(p, tol: float = PSI_TOL, check: bool = True) -> ComponentLabel:
    """Sign of the eigen-coordinate paired with the unique-sign eigenvalue.

    On ``GST_n`` that coordinate never vanishes when ``min(k, l) = 1``:
    if it did, the quadric would force the whole other block to vanish and
    ``p`` would lie on ``m + span(1)``, where influence fails.
    """
    pt = _float_point(p)
    n = len(pt)
    frame = eigen_frame(n)
    if min(frame.k, frame.l) != 1:
        raise InvalidInput(f"component labels need min(k, l) = 1; n={n} has k={frame.k}, l={frame.l}")
    if check and not membership(p, tol=tol).in_gst:
        raise InvalidInput("component labels are defined on GST_n only")
    y = frame.to_y(pt)
    if frame.k == 1:
        c, block = y[1], "positive"
    else:
        c, block = y[-1], "negative"
    return ComponentLabel(1 if c > 0 else -1, float(c), block)


# -- contraction ---------------------------------------------------------------


def contraction(p: Sequence, t, x: Sequence) -> list:
    """``(1 - t) p + t x`` for a constant vector ``x`` (the only points with ``x ~ 1``)."""
    ones = [1] * len(x)
    if equivalent(list(x), ones) is None:
        raise InvalidInput("contraction target must be equivalent to the all-ones vector")
    if len(p) != len(x):
        raise InvalidInput("dimension mismatch")
    rep = membership(p)
    if not rep.in_ind:
        raise InvalidInput("contraction starts from a point of Ind_n")
    if all_exact([t]):
        t = Fraction(t)
    if not 0 <= t <= 1:
        raise InvalidInput("t must lie in [0, 1]")
    return [(1 - t) * a + t * b for a, b in zip(rep.p, x)]


# -- segments -------------------------------------------------------------------


@dataclass
class SegmentResult:
    kind: str  # AllInGST | AllInIndNotGST | InteriorOutsideInd | Mixed
    cross_term: object
    failures: list = field(default_factory=list)
    report: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "cross_term": to_json(self.cross_term),
            "failures": [
                {"t": to_json(t), "point": vector_to_json(pt)} for t, pt in self.failures
            ],
            "report": [{k: v for k, v in e.items() if k != "point"} for e in self.report],
        }


def segment_classify(p: Sequence, q: Sequence, samples: int = 101, tol: float = PSI_TOL) -> SegmentResult:
    """Classify the segment ``(1 - t) p + t q`` between two points of ``GST_n``.

    Along the segment ``psi = t (1 - t) CT(p, q)``, so the interior is in
    ``Ind_n`` exactly when the cross term vanishes.  Influence can then
    only fail where the difference vector ``d(t)`` with
    ``d_s = x_s - x_{n-s+1}`` vanishes; ``d`` is affine in ``t``, so this is
    solved exactly.  Float endpoints are classified from ``samples``
    interior points instead, and so are certified points.
    """
    # certified points carry an irrational coordinate: classify them in floats
    if isinstance(p, CertifiedPoint) or isinstance(q, CertifiedPoint):
        p, q = _float_point(p), _float_point(q)
    rp, rq = membership(p, tol=tol), membership(q, tol=tol)
    if not (rp.in_gst and rq.in_gst):
        raise InvalidInput("segment endpoints must lie in GST_n")
    p, q = rp.p, rq.p
    if len(p) != len(q):
        raise InvalidInput("dimension mismatch")
    n = len(p)
    ct = cross_term(p, q)
    if all_exact(p + q):
        if ct != 0:
            return SegmentResult("InteriorOutsideInd", ct)
        a = [p[s] - p[n - 1 - s] for s in range(n // 2)]
        b = [q[s] - q[n - 1 - s] for s in range(n // 2)]
        # d(t) = (1 - t) a + t b
        s0 = next(s for s in range(len(a)) if a[s] != b[s] or a[s] != 0)
        failures = []
        if a[s0] != b[s0]:
            t = a[s0] / (a[s0] - b[s0])
            if 0 < t < 1 and all((1 - t) * a[s] + t * b[s] == 0 for s in range(len(a))):
                failures.append((t, [(1 - t) * u + t * v for u, v in zip(p, q)]))
        return SegmentResult("AllInIndNotGST" if failures else "AllInGST", ct, failures)
    kinds, report = set(), []
    for k in range(1, samples + 1):
        t = k / (samples + 1)
        x = [(1 - t) * u + t * v for u, v in zip(p, q)]
        r = membership(x, tol=tol)
        kind = "gst" if r.in_gst else ("ind" if r.in_ind else "out")
        kinds.add(kind)
        report.append({"t": t, "psi": float(r.psi_value), "margin": float(r.influence_margin), "kind": kind, "point": x})
    if kinds == {"gst"}:
        return SegmentResult("AllInGST", ct, report=report)
    if kinds == {"out"}:
        return SegmentResult("InteriorOutsideInd", ct, report=report)
    if "out" not in kinds:
        fails = [(e["t"], e["point"]) for e in report if e["kind"] == "ind"]
        return SegmentResult("AllInIndNotGST", ct, fails, report)
    return SegmentResult("Mixed", ct, report=report)


# -- sampling on the quadric ---------------------------------------------------


def _retract(frame: EigenFrame, y: np.ndarray) -> np.ndarray | None:
    """Rescale both blocks to the geometric mean of their D-weighted norms."""
    pos, neg = frame.block_norms(y)
    if pos <= 1e-14 or neg <= 1e-14:
        return None
    g = math.sqrt(pos * neg)
    out = y.copy()
    out[1 : 1 + frame.k] *= g / pos
    out[1 + frame.k :] *= g / neg
    return out


def _unit(rng: np.random.Generator, d: int) -> np.ndarray:
    v = rng.standard_normal(d)
    return v / np.linalg.norm(v)


def surface_sample(
    n: int,
    count: int,
    radius: float = 0.05,
    seed: int = 0,
    max_attempts: int | None = None,
    margin: float = PATH_MARGIN,
) -> tuple[list[list[float]], int]:
    """Random points of ``GST_n`` on the quadric near ``m``.

    Returns the accepted points and the number of attempts used.
    """
    if count < 1 or radius <= 0:
        raise InvalidInput("count and radius must be positive")
    frame = eigen_frame(n)
    rng = np.random.default_rng(seed)
    lam_min = min(abs(frame.D[1:]))
    attempts, out = 0, []
    max_attempts = max_attempts or 100 * count
    while len(out) < count and attempts < max_attempts:
        attempts += 1
        y = np.zeros(n)
        y[0] = rng.uniform(-radius, radius)
        t = rng.uniform(0, radius * radius * lam_min)
        u = _unit(rng, frame.k)
        w = _unit(rng, frame.l)
        u *= math.sqrt(t / np.sum(frame.D[1 : 1 + frame.k] * u * u))
        w *= math.sqrt(t / np.sum(-frame.D[1 + frame.k :] * w * w))
        y[1 : 1 + frame.k], y[1 + frame.k :] = u, w
        p = frame.to_p(y)
        if np.any(p < 0) or np.any(p > 1):
            continue
        pl = p.tolist()
        if influence_margin(pl)[0] <= margin or abs(psi(pl)) > 1e-9:
            continue
        out.append(pl)
    if not out:
        raise InvalidInput(f"no sample accepted in {attempts} attempts; reduce the radius")
    return out, attempts


# -- path probe -------------------------------------------------------------------


@dataclass
class SurfacePath:
    waypoints: list
    max_psi_drift: float
    min_influence_margin: float
    max_step: float
    seed: int
    iterations: int
    experimental: bool = False

    kind = "SurfacePath"

    def trailer(self) -> dict:
        return {
            "kind": self.kind,
            "waypoints": len(self.waypoints),
            "max_psi_drift": self.max_psi_drift,
            "min_influence_margin": self.min_influence_margin,
            "max_step": self.max_step,
            "seed": self.seed,
            "iterations": self.iterations,
            "experimental": self.experimental,
        }


@dataclass
class FailureCertificate:
    """``p`` and ``q`` carry different component labels: no path exists in ``GST_n``."""

    n: int
    k: int
    l: int
    label_p: ComponentLabel
    label_q: ComponentLabel

    kind = "FailureCertificate"

    def trailer(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "k": self.k,
            "l": self.l,
            "label_p": self.label_p.to_dict(),
            "label_q": self.label_q.to_dict(),
        }


@dataclass
class TimedOut:
    seed: int
    iterations: int
    distance_left: float
    experimental: bool = False

    kind = "TimedOut"

    def trailer(self) -> dict:
        return {
            "kind": self.kind,
            "seed": self.seed,
            "iterations": self.iterations,
            "distance_left": self.distance_left,
            "experimental": self.experimental,
        }


@dataclass
class ProbeParams:
    step: float = 0.01
    budget: int = 100_000
    seed: int = 0
    psi_tol: float = PATH_PSI_TOL
    margin: float = PATH_MARGIN
    shrink_to: float = 0.3
    jitter: float = 0.25
    time_limit: float | None = None


def _scaled_chain(p: np.ndarray, c: float, step: float) -> list[np.ndarray]:
    """Waypoints on ``m + s (p - m)`` for ``s`` from 1 down to ``c`` (all in ``GST_n``)."""
    d = p - 0.5
    length = (1 - c) * np.linalg.norm(d)
    k = max(1, math.ceil(length / step))
    return [0.5 + (1 - (1 - c) * j / k) * d for j in range(k + 1)]


def path_probe(p, q, params: ProbeParams | None = None):
    """Search for a path inside ``GST_n`` from ``p`` to ``q``.

    When one eigenvalue sign is unique and the component labels differ a
    :class:`FailureCertificate` is returned.  Otherwise both endpoints are
    pulled toward ``m`` by the scaling ``m + c (p - m)`` (which stays in
    ``GST_n``), and the scaled endpoints are joined by a seeded walk on the
    quadric: each step heads for the current target, is jittered, and is
    retracted back onto ``psi = 0``.  Targets are random quadric points
    followed by the endpoint; a target is dropped when the walk gets stuck.
    """
    params = params or ProbeParams()
    t0 = time.monotonic()
    pp, qq = _float_point(p), _float_point(q)
    n = len(pp)
    if len(qq) != n:
        raise InvalidInput("dimension mismatch")
    for x in (p, q):
        if not membership(x, tol=params.psi_tol, margin_tol=params.margin).in_gst:
            raise InvalidInput("path endpoints must lie in GST_n")
    frame = eigen_frame(n)
    experimental = n in EXPERIMENTAL_N
    if min(frame.k, frame.l) == 1:
        lp, lq = component_label(p, check=False), component_label(q, check=False)
        if lp.sign != lq.sign:
            return FailureCertificate(n, frame.k, frame.l, lp, lq)
    pa, pb = np.array(pp), np.array(qq)
    if np.array_equal(pa, pb):
        return SurfacePath([pp], abs(psi(pp)), influence_margin(pp)[0], 0.0, params.seed, 0, experimental)

    rng = np.random.default_rng(params.seed)
    step = params.step

    def shrink(x):
        r = np.linalg.norm(frame.to_y(x))
        return min(1.0, params.shrink_to / r)

    head = _scaled_chain(pa, shrink(pa), step)
    tail = _scaled_chain(pb, shrink(pb), step)[::-1]
    y = frame.to_y(head[-1])
    y_end = frame.to_y(tail[0])

    def ok(yv):
        if np.linalg.norm(yv) > BALL:
            return False
        x = frame.to_p(yv).tolist()
        return influence_margin(x)[0] >= params.margin and abs(psi(x)) <= params.psi_tol

    def random_target():
        r = rng.uniform(0.1, params.shrink_to)
        for _ in range(100):
            t = np.zeros(n)
            t[0] = rng.uniform(-0.05, 0.05)
            u, w = _unit(rng, frame.k), _unit(rng, frame.l)
            u /= math.sqrt(np.sum(frame.D[1 : 1 + frame.k] * u * u))
            w /= math.sqrt(np.sum(-frame.D[1 + frame.k :] * w * w))
            t[1 : 1 + frame.k], t[1 + frame.k :] = u, w
            t *= r / np.linalg.norm(t)
            if ok(t):
                return t
        return None

    walk = [y]
    targets = [t for t in (random_target() for _ in range(2)) if t is not None] + [y_end]
    it, stuck = 0, 0
    while it < params.budget:
        if params.time_limit and time.monotonic() - t0 > params.time_limit:
            break
        target = targets[0]
        gap = target - y
        dist = float(np.linalg.norm(gap))
        if dist <= step:
            if len(targets) == 1:
                walk.append(target)
                y = target
                break
            targets.pop(0)
            continue
        it += 1
        cand = y + step * gap / dist + params.jitter * step * rng.standard_normal(n) / math.sqrt(n)
        cand = _retract(frame, cand)
        if cand is not None and np.linalg.norm(cand - y) <= 2 * step and ok(cand) and (
            np.linalg.norm(target - cand) < dist
        ):
            walk.append(cand)
            y = cand
            stuck = 0
            continue
        stuck += 1
        if stuck > 50:
            # detour through a fresh random point of the quadric
            detour = random_target()
            if detour is not None:
                targets.insert(0, detour)
            stuck = 0
    if not np.array_equal(y, y_end):
        return TimedOut(params.seed, it, float(np.linalg.norm(y_end - y)), experimental)

    pts = [h.tolist() for h in head] + [frame.to_p(v).tolist() for v in walk[1:-1]] + [t.tolist() for t in tail]
    pts[0], pts[-1] = pp, qq
    drift = max(abs(psi(x)) for x in pts)
    margin = min(influence_margin(x)[0] for x in pts)
    max_step = max(float(np.linalg.norm(np.subtract(a, b))) for a, b in zip(pts, pts[1:]))
    return SurfacePath(pts, drift, margin, max_step, params.seed, it, experimental)
