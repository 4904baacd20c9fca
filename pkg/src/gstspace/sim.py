"""Seeded Monte Carlo simulation of the cause/effect game.

Rounds are split into chunks of ``chunk`` rounds.  Chunk ``c`` draws from
sub-stream ``c`` of SplitMix64 (see :mod:`gstspace.rng`); round ``j`` of a
chunk uses outputs ``2 n j .. 2 n j + 2n - 1``: the first ``n`` decide the
causes, the next ``n`` the effects.  A Bernoulli(``p``) draw is
``uniform < p`` with ``uniform = (z >> 11) / 2**53``, compared exactly on
integers.  Counts are integers, so any grouping of chunks over workers
adds up to the same report.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import rng
from .errors import InvalidInput
from .model import GameSpec, effect_prob

DEFAULT_CHUNK = 65536


@dataclass(frozen=True)
class SimConfig:
    spec: GameSpec
    rounds: int
    seed: int
    chunk: int = DEFAULT_CHUNK

    def __post_init__(self):
        if self.rounds < 1 or self.chunk < 1:
            raise InvalidInput("rounds and chunk must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise InvalidInput("seed must be a 64-bit unsigned integer")

    def to_dict(self) -> dict:
        return {"spec": self.spec.to_dict(), "rounds": self.rounds, "seed": self.seed, "chunk": self.chunk}


def _thresholds(spec: GameSpec) -> tuple[int, np.ndarray]:
    """Cause threshold and effect thresholds ``T[x_i, ones]`` from :func:`model.effect_prob`."""
    n = spec.n
    table = np.zeros((2, n + 1), dtype=np.uint64)
    for xi in (0, 1):
        for ones in range(xi, n - (1 - xi) + 1):
            # any assignment with C_1 = xi and `ones` ones in total
            x = [xi] + [1] * (ones - xi) + [0] * (n - 1 - (ones - xi))
            table[xi, ones] = rng.threshold(effect_prob(spec, 1, x))
    return rng.threshold(spec.r), table


def _empty(n: int) -> dict:
    return {
        "rounds": 0,
        "effects": np.zeros(n, dtype=np.int64),
        "joint": np.zeros((n, n), dtype=np.int64),
        "cond_rounds": np.zeros((n, 2), dtype=np.int64),
        "cond_effects": np.zeros((n, 2, n), dtype=np.int64),
        "cond_joint": np.zeros((n, 2, n, n), dtype=np.int64),
    }


def _run_chunk(args) -> dict:
    spec, seed, index, start, count = args
    n = spec.n
    cause_thr, table = _thresholds(spec)
    z = rng.block(rng.substream(seed, index), 0, count * 2 * n).reshape(count, 2 * n) >> np.uint64(11)
    causes = z[:, :n] < np.uint64(cause_thr)
    ones = causes.sum(axis=1)
    thr = table[causes.astype(np.int64), ones[:, None]]
    effects = z[:, n:] < thr
    e = effects.astype(np.int64)
    out = _empty(n)
    out["rounds"] = count
    out["effects"] = e.sum(axis=0)
    out["joint"] = e.T @ e
    for k in range(n):
        for x in (0, 1):
            sel = e[causes[:, k] == bool(x)]
            out["cond_rounds"][k, x] = sel.shape[0]
            out["cond_effects"][k, x] = sel.sum(axis=0)
            out["cond_joint"][k, x] = sel.T @ sel
    return out


def _add(a: dict, b: dict) -> dict:
    return {key: a[key] + b[key] for key in a}


@dataclass
class SimReport:
    """Integer counts; frequencies and standard errors are derived from them.

    Conditional cells use the number of rounds meeting the condition as
    their denominator.  Indices are 1-based.
    """

    config: SimConfig
    counts: dict

    @property
    def rounds(self) -> int:
        return int(self.counts["rounds"])

    def freq(self, i: int) -> float:
        return int(self.counts["effects"][i - 1]) / self.rounds

    def cond_rounds(self, k: int, x: int) -> int:
        return int(self.counts["cond_rounds"][k - 1, x])

    def cond_freq(self, i: int, k: int, x: int) -> float:
        m = self.cond_rounds(k, x)
        return int(self.counts["cond_effects"][k - 1, x, i - 1]) / m if m else math.nan

    def joint_cond_freq(self, i: int, j: int, k: int, x: int) -> float:
        m = self.cond_rounds(k, x)
        return int(self.counts["cond_joint"][k - 1, x, i - 1, j - 1]) / m if m else math.nan

    def se(self, f: float, m: int | None = None) -> float:
        m = self.rounds if m is None else m
        return math.sqrt(f * (1 - f) / m) if m else math.inf

    def to_dict(self) -> dict:
        c = self.counts
        n = self.config.spec.n
        return {
            "config": self.config.to_dict(),
            "counts": {
                "rounds": int(c["rounds"]),
                "effects": c["effects"].tolist(),
                "joint": c["joint"].tolist(),
                "cond_rounds": c["cond_rounds"].tolist(),
                "cond_effects": c["cond_effects"].tolist(),
                "cond_joint": c["cond_joint"].tolist(),
            },
            "frequencies": {
                "effects": [self.freq(i) for i in range(1, n + 1)],
                "effects_se": [self.se(self.freq(i)) for i in range(1, n + 1)],
                "cond_effects": [
                    [[self.cond_freq(i, k, x) for i in range(1, n + 1)] for x in (0, 1)]
                    for k in range(1, n + 1)
                ],
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def simulate(config: SimConfig, workers: int = 1) -> SimReport:
    """Run the game; the result depends only on ``(spec, seed, rounds, chunk)``."""
    spec = config.spec
    jobs = []
    start, index = 0, 0
    while start < config.rounds:
        count = min(config.chunk, config.rounds - start)
        jobs.append((spec, config.seed, index, start, count))
        start += count
        index += 1
    total = _empty(spec.n)
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_run_chunk, jobs):
                total = _add(total, part)
    else:
        for job in jobs:
            total = _add(total, _run_chunk(job))
    return SimReport(config, total)


@dataclass(frozen=True)
class ZScore:
    z: float | None
    residual: float
    se: float
    degenerate: bool

    def to_dict(self) -> dict:
        return {"z": self.z, "residual": self.residual, "se": self.se, "degenerate": self.degenerate}


def independence_test(report: SimReport, i: int, j: int, k: int, x: int) -> ZScore:
    """``(P(E_i E_j | C_k = x) - P(E_i | .) P(E_j | .)) / SE`` with a delta-method SE.

    Over the ``M`` rounds with ``C_k = x`` the four cells ``(E_i, E_j)`` are
    multinomial; the residual ``pi11 - p_i p_j`` has gradient
    ``(1 - p_i - p_j, -p_j, -p_i, 0)`` in ``(pi11, pi10, pi01, pi00)``.
    A vanishing variance (cells at 0 or 1) is flagged as degenerate.
    """
    n = report.config.spec.n
    if i == j or not all(1 <= v <= n for v in (i, j, k)) or x not in (0, 1):
        raise InvalidInput("need distinct effects i, j, a cause k and x in {0, 1}")
    m = report.cond_rounds(k, x)
    if m == 0:
        return ZScore(None, math.nan, math.inf, True)
    pi, pj = report.cond_freq(i, k, x), report.cond_freq(j, k, x)
    p11 = report.joint_cond_freq(i, j, k, x)
    p10, p01 = pi - p11, pj - p11
    p00 = 1 - p11 - p10 - p01
    cells = np.array([p11, p10, p01, p00])
    g = np.array([1 - pi - pj, -pj, -pi, 0.0])
    var = (float(np.sum(g * g * cells)) - float(np.sum(g * cells)) ** 2) / m
    resid = p11 - pi * pj
    if var <= 1e-300:
        return ZScore(None, resid, 0.0, True)
    se = math.sqrt(var)
    return ZScore(resid / se, resid, se, False)
