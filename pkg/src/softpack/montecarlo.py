"""Seeded, reproducible Monte Carlo estimation of region measures.

Every estimator here is hit-or-miss: draw uniform points in a reference
region of known measure, test a predicate, and scale the hit fraction.
Runs are chunked internally; chunk ``i`` of a run seeded with ``s`` draws
from the substream ``(s, i)``, so results are independent of chunk size
only in distribution, but a fixed (seed, n) pair is always bit-for-bit
reproducible on one platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

# Points per chunk.  Keeps the working set of the hit test small while the
# per-chunk Python overhead stays negligible.
CHUNK_SIZE = 1 << 18

_SEED_MASK = (1 << 63) - 1


def unit_ball_volume(d: int) -> float:
    """Volume of the d-dimensional unit ball."""
    return math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0)


def substream(seed: int, index: int) -> np.random.Generator:
    """Independent generator for chunk ``index`` of a run seeded with ``seed``."""
    return np.random.default_rng(np.random.SeedSequence((seed & _SEED_MASK, index)))


@dataclass(frozen=True)
class MCEstimate:
    """A Monte Carlo result: point estimate, standard error, and provenance."""

    value: float
    stderr: float
    samples: int
    seed: int


@dataclass(frozen=True)
class Sampler:
    """Uniform point source over a region of known measure.

    ``draw(rng, n)`` returns an (n, dim) array of i.i.d. uniform points.
    """

    measure: float
    dim: int
    draw: Callable[[np.random.Generator, int], np.ndarray]


def box_sampler(lo, hi) -> Sampler:
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    if lo.shape != hi.shape or lo.ndim != 1:
        raise ValueError("box bounds must be two equal-length vectors")
    if np.any(hi <= lo):
        raise ValueError("degenerate box: each upper bound must exceed the lower")
    span = hi - lo

    def draw(rng: np.random.Generator, n: int) -> np.ndarray:
        return lo + span * rng.random((n, lo.size))

    return Sampler(measure=float(np.prod(span)), dim=lo.size, draw=draw)


def ball_sampler(d: int, radius: float, center=None) -> Sampler:
    if d < 1 or radius <= 0.0:
        raise ValueError("ball sampler needs d >= 1 and radius > 0")
    c = np.zeros(d) if center is None else np.asarray(center, dtype=float)

    def draw(rng: np.random.Generator, n: int) -> np.ndarray:
        x = rng.standard_normal((n, d))
        norms = np.linalg.norm(x, axis=1)
        norms[norms == 0.0] = 1.0
        r = radius * rng.random(n) ** (1.0 / d)
        return c + x * (r / norms)[:, None]

    return Sampler(measure=unit_ball_volume(d) * radius**d, dim=d, draw=draw)


def simplex_volume(vertices) -> float:
    """k-dimensional volume of a simplex given as (k+1) vertices in any R^m."""
    v = np.asarray(vertices, dtype=float)
    edges = v[1:] - v[0]
    gram = edges @ edges.T
    det = np.linalg.det(gram)
    if det <= 0.0:
        raise ValueError("degenerate simplex (zero measure)")
    return math.sqrt(det) / math.factorial(len(v) - 1)


def simplex_sampler(vertices) -> Sampler:
    """Uniform sampler inside a simplex via normalized exponential weights."""
    v = np.asarray(vertices, dtype=float)
    vol = simplex_volume(v)

    def draw(rng: np.random.Generator, n: int) -> np.ndarray:
        w = rng.standard_exponential((n, len(v)))
        w /= w.sum(axis=1, keepdims=True)
        return w @ v

    return Sampler(measure=vol, dim=v.shape[1], draw=draw)


def sample_box(bounds, n: int, seed: int) -> np.ndarray:
    """n uniform points in the axis box given as (lo, hi)."""
    if n <= 0:
        raise ValueError("need n > 0 samples")
    lo, hi = bounds
    s = box_sampler(lo, hi)
    return s.draw(np.random.default_rng(seed & _SEED_MASK), n)


def sample_ball(d: int, r: float, n: int, seed: int) -> np.ndarray:
    """n uniform points in the radius-r ball about the origin of R^d."""
    if n <= 0:
        raise ValueError("need n > 0 samples")
    s = ball_sampler(d, r)
    return s.draw(np.random.default_rng(seed & _SEED_MASK), n)


def sample_simplex(vertices, n: int, seed: int) -> np.ndarray:
    """n uniform points in the simplex spanned by ``vertices``."""
    if n <= 0:
        raise ValueError("need n > 0 samples")
    s = simplex_sampler(vertices)
    return s.draw(np.random.default_rng(seed & _SEED_MASK), n)


def estimate_fraction(
    region_test: Callable[[np.ndarray], np.ndarray],
    sampler: Sampler,
    n: int,
    seed: int,
) -> MCEstimate:
    """Measure of {x in reference region : region_test(x)} by hit-or-miss.

    ``region_test`` must map an (m, dim) array to a boolean mask of length m.
    The standard error is the binomial one scaled by the reference measure.
    """
    if n <= 0:
        raise ValueError("need n > 0 samples")
    hits = 0
    done = 0
    chunk_index = 0
    while done < n:
        m = min(CHUNK_SIZE, n - done)
        pts = sampler.draw(substream(seed, chunk_index), m)
        mask = np.asarray(region_test(pts), dtype=bool)
        hits += int(mask.sum())
        done += m
        chunk_index += 1
    p = hits / n
    stderr = sampler.measure * math.sqrt(p * (1.0 - p) / n)
    return MCEstimate(value=sampler.measure * p, stderr=stderr, samples=n, seed=seed)


def pooled(estimates) -> MCEstimate:
    """Pool chunked hit-or-miss estimates that share one reference measure."""
    ests = list(estimates)
    if not ests:
        raise ValueError("nothing to pool")
    total = sum(e.samples for e in ests)
    value = sum(e.value * e.samples for e in ests) / total
    var = sum((e.stderr * e.samples) ** 2 for e in ests) / total**2
    return MCEstimate(value=value, stderr=math.sqrt(var), samples=total, seed=ests[0].seed)
