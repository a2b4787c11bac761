"""Regular d-simplex and orthoscheme machinery with Monte Carlo cell densities.

The regular simplex of edge 2 is embedded in R^(d+1) as the scaled standard
basis sqrt(2)*e_i; its barycentric subdivision contains the orthoscheme
q_0 ... q_d whose Gram products reproduce the extremal values 2i/(i+1) of
Voronoi-cell vertex chains.  sigma_d / sigma_bar_d are estimated by uniform
sampling inside the simplex for any dimension.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import rogers_limit
from .montecarlo import MCEstimate, substream

_DOMAIN_TOL = 1e-12
_CHUNK = 1 << 18


@dataclass(frozen=True)
class SimplexModel:
    """Regular d-simplex of edge 2, vertices as rows of an (d+1, d+1) array."""

    d: int
    vertices: np.ndarray


@dataclass(frozen=True)
class Orthoscheme:
    """Orthoscheme of the barycentric subdivision: q_i has i+1 coordinates sqrt(2)/(i+1)."""

    d: int
    q: np.ndarray  # (d+1, d+1)


def regular_simplex(d: int) -> SimplexModel:
    if d < 2:
        raise ValueError("dimension must be at least 2")
    return SimplexModel(d=d, vertices=math.sqrt(2.0) * np.eye(d + 1))


def orthoscheme(d: int) -> Orthoscheme:
    if d < 2:
        raise ValueError("dimension must be at least 2")
    q = np.zeros((d + 1, d + 1))
    for i in range(d + 1):
        q[i, : i + 1] = math.sqrt(2.0) / (i + 1)
    return Orthoscheme(d=d, q=q)


def gram_identity_check(d: int) -> float:
    """Max deviation of <q_i - q_0, q_j - q_0> from 2i/(i+1) over 1 <= i <= j <= d."""
    q = orthoscheme(d).q
    rel = q[1:] - q[0]
    gram = rel @ rel.T
    worst = 0.0
    for i in range(1, d + 1):
        expected = 2.0 * i / (i + 1.0)
        for j in range(i, d + 1):
            worst = max(worst, abs(gram[i - 1, j - 1] - expected))
    return worst


def simplex_lambda_limit(d: int) -> float:
    """Largest admissible inflation: circumradius of the edge-2 simplex minus 1."""
    return rogers_limit(d) - 1.0


def _coverage_fractions(d: int, lam: float, samples: int, seed: int):
    """Fractions of the simplex within distance 1 and 1 + lam of some vertex."""
    if samples <= 0:
        raise ValueError("need samples > 0")
    limit = simplex_lambda_limit(d)
    if not (-_DOMAIN_TOL <= lam <= limit + _DOMAIN_TOL):
        raise ValueError(f"lambda = {lam} outside [0, {limit}] for d = {d}")
    lb = 1.0 + min(max(lam, 0.0), limit)
    verts = regular_simplex(d).vertices
    hits_unit = 0
    hits_infl = 0
    done = 0
    chunk_index = 0
    while done < samples:
        m = min(_CHUNK, samples - done)
        w = substream(seed, chunk_index).standard_exponential((m, d + 1))
        w /= w.sum(axis=1, keepdims=True)
        pts = w @ verts
        d2min = np.full(m, np.inf)
        for v in verts:
            diff = pts - v
            np.minimum(d2min, (diff * diff).sum(axis=1), out=d2min)
        hits_unit += int(np.count_nonzero(d2min <= 1.0))
        hits_infl += int(np.count_nonzero(d2min <= lb * lb))
        done += m
        chunk_index += 1
    return hits_unit / samples, hits_infl / samples


def sigma_bar_d_mc(d: int, lam: float, samples: int, seed: int) -> MCEstimate:
    """Covered fraction of the edge-2 d-simplex by inflated balls at its vertices."""
    _, p = _coverage_fractions(d, lam, samples, seed)
    stderr = math.sqrt(p * (1.0 - p) / samples)
    return MCEstimate(value=p, stderr=stderr, samples=samples, seed=seed)


def sigma_d_mc(d: int, lam: float, samples: int, seed: int) -> MCEstimate:
    """Ratio of unit coverage to inflated coverage of the edge-2 d-simplex.

    The unit balls at the vertices are disjoint inside the simplex, so the
    single-vertex numerator of the cell density equals the full unit
    coverage divided by d + 1; the ratio of nested hit fractions estimates
    the density directly.  The standard error uses the delta method for
    nested proportions from one sample stream.
    """
    p_unit, p_infl = _coverage_fractions(d, lam, samples, seed)
    if p_infl == 0.0:
        raise ValueError("no coverage hits; increase samples")
    ratio = p_unit / p_infl
    var = (p_unit / (p_infl * p_infl)) * ((1.0 - p_unit) - ratio * (1.0 - p_infl)) / samples
    stderr = math.sqrt(max(var, 0.0))
    return MCEstimate(value=ratio, stderr=stderr, samples=samples, seed=seed)
