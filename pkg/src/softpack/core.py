"""Packing data model, validation, regime classification, and lattice patches.

A packing is a finite set of centers of unit balls (pairwise distances at
least 2, up to a tolerance).  Inflating every ball to radius 1 + lambda
produces the outer parallel domain of the packing; how much the inflated
balls may interact splits the lambda axis into three regimes:

* pairwise:     1 + lambda < 2/sqrt(3); at most two inflated balls share
                a point, so inclusion-exclusion at order two is exact,
* rogers_only:  up to the circumradius sqrt(2d/(d+1)) of the regular
                d-simplex of edge 2 (empty band in the plane),
* beyond:       everything larger.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np

#: sup of 1 + lambda for which no three inflated balls of any unit-ball
#: packing share a common point (circumradius of the unit triangle of side 2)
PAIRWISE_LIMIT = 2.0 / math.sqrt(3.0)

DEFAULT_TOL = 1e-9


def rogers_limit(d: int) -> float:
    """Circumradius sqrt(2d/(d+1)) of the regular d-simplex of edge length 2."""
    if d < 2:
        raise ValueError("dimension must be at least 2")
    return math.sqrt(2.0 * d / (d + 1.0))


class Regime(Enum):
    PAIRWISE = "pairwise"
    ROGERS_ONLY = "rogers_only"
    BEYOND = "beyond"


@dataclass(frozen=True)
class Packing:
    """n unit balls in dimension ``dim`` given by their centers (n, dim)."""

    dim: int
    centers: np.ndarray

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.centers, dtype=float))
        if self.dim < 2:
            raise ValueError("packing dimension must be at least 2")
        if c.ndim != 2 or c.shape[1] != self.dim:
            raise ValueError(
                f"centers must be (n, {self.dim}); got array of shape {np.asarray(self.centers).shape}"
            )
        if c.shape[0] == 0:
            raise ValueError("packing must contain at least one ball")
        if not np.all(np.isfinite(c)):
            raise ValueError("center coordinates must be finite")
        object.__setattr__(self, "centers", c)

    @property
    def n(self) -> int:
        return self.centers.shape[0]


@dataclass(frozen=True)
class Inflation:
    """Inflation lambda >= 0 with 1 + lambda and its regime in dimension dim."""

    lam: float
    lambda_bar: float
    regime: Regime
    dim: int


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    min_pair_distance: float
    offending_pair: Optional[Tuple[int, int]]


@dataclass(frozen=True)
class IntersectionGraph:
    """Graph on packing centers with edges between pairs within ``threshold``."""

    vertex_count: int
    edges: np.ndarray  # (m, 2) int, each row i < j
    threshold: float

    @property
    def edge_count(self) -> int:
        return self.edges.shape[0]


def pairwise_distances(p: Packing) -> np.ndarray:
    """Symmetric (n, n) matrix of center distances, zeros on the diagonal."""
    diff = p.centers[:, None, :] - p.centers[None, :, :]
    return np.sqrt((diff * diff).sum(axis=-1))


def validate_packing(p: Packing, tol: float = DEFAULT_TOL) -> ValidationReport:
    """Check the packing condition: all pairwise center distances >= 2 - tol."""
    if tol < 0.0:
        raise ValueError("tolerance must be nonnegative")
    if p.n == 1:
        return ValidationReport(valid=True, min_pair_distance=math.inf, offending_pair=None)
    dists = pairwise_distances(p)
    iu = np.triu_indices(p.n, k=1)
    flat = dists[iu]
    k = int(np.argmin(flat))
    dmin = float(flat[k])
    pair = (int(iu[0][k]), int(iu[1][k]))
    valid = dmin >= 2.0 - tol
    return ValidationReport(
        valid=valid,
        min_pair_distance=dmin,
        offending_pair=None if valid else pair,
    )


def classify_regime(d: int, lam: float) -> Inflation:
    """Inflation record for lambda in dimension d, with its overlap regime."""
    if d < 2:
        raise ValueError("dimension must be at least 2")
    if lam < 0.0:
        raise ValueError("lambda must be nonnegative")
    lb = 1.0 + lam
    if lb < PAIRWISE_LIMIT:
        regime = Regime.PAIRWISE
    elif lb < rogers_limit(d):
        regime = Regime.ROGERS_ONLY
    else:
        regime = Regime.BEYOND
    return Inflation(lam=lam, lambda_bar=lb, regime=regime, dim=d)


def intersection_graph(p: Packing, threshold: float, tol: float = DEFAULT_TOL) -> IntersectionGraph:
    """Edges between every pair of centers within threshold + tol."""
    if p.n == 1:
        return IntersectionGraph(vertex_count=1, edges=np.zeros((0, 2), dtype=int), threshold=threshold)
    dists = pairwise_distances(p)
    iu = np.triu_indices(p.n, k=1)
    mask = dists[iu] <= threshold + tol
    edges = np.column_stack((iu[0][mask], iu[1][mask])).astype(int)
    return IntersectionGraph(vertex_count=p.n, edges=edges, threshold=threshold)


def contact_count(p: Packing, tol: float = DEFAULT_TOL) -> int:
    """Number of tangent pairs: center distance within tol of 2.

    Pairs closer than 2 - tol would make the packing invalid and are not
    counted; perturbation sensitivity therefore sits entirely in ``tol``.
    """
    if p.n == 1:
        return 0
    dists = pairwise_distances(p)
    iu = np.triu_indices(p.n, k=1)
    return int(np.count_nonzero(np.abs(dists[iu] - 2.0) <= tol))


def _hexagonal2d(extent: int) -> np.ndarray:
    pts = []
    for i in range(-extent, extent + 1):
        for j in range(-extent, extent + 1):
            if abs(i + j) > extent:
                continue
            pts.append((2.0 * i + j, j * math.sqrt(3.0)))
    return np.array(pts)


def _square2d(extent: int) -> np.ndarray:
    rng = range(-extent, extent + 1)
    return np.array([(2.0 * i, 2.0 * j) for i in rng for j in rng])


def _fcc3d(extent: int) -> np.ndarray:
    # even-parity integer points scaled by sqrt(2): nearest neighbors at 2
    rng = range(-extent, extent + 1)
    pts = [
        (i, j, k)
        for i in rng
        for j in rng
        for k in rng
        if (i + j + k) % 2 == 0
    ]
    return math.sqrt(2.0) * np.array(pts, dtype=float)


def _bcc3d(extent: int) -> np.ndarray:
    # cube side 4/sqrt(3) puts nearest (corner-to-center) neighbors at 2
    a = 4.0 / math.sqrt(3.0)
    rng = range(-extent, extent + 1)
    corners = [(a * i, a * j, a * k) for i in rng for j in rng for k in rng]
    body = [
        (a * (i + 0.5), a * (j + 0.5), a * (k + 0.5))
        for i in range(-extent, extent)
        for j in range(-extent, extent)
        for k in range(-extent, extent)
    ]
    return np.array(corners + body, dtype=float)


_LATTICES = {
    "hexagonal2d": (_hexagonal2d, 2),
    "square2d": (_square2d, 2),
    "fcc3d": (_fcc3d, 3),
    "bcc3d": (_bcc3d, 3),
}


def lattice_patch(kind: str, extent: int) -> Packing:
    """Finite patch of a named lattice, normalized to unit-ball packing scale."""
    if extent < 1:
        raise ValueError("extent must be at least 1")
    try:
        build, dim = _LATTICES[kind]
    except KeyError:
        raise ValueError(f"unknown lattice kind {kind!r}; choose from {sorted(_LATTICES)}") from None
    return Packing(dim=dim, centers=build(extent))


def save_packing_json(p: Packing, path: str) -> None:
    with open(path, "w") as fh:
        json.dump({"dim": p.dim, "centers": p.centers.tolist()}, fh, indent=1)
        fh.write("\n")


def save_packing_csv(p: Packing, path: str) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(f"# dim={p.dim}\n")
        writer = csv.writer(fh)
        writer.writerow([f"x{i + 1}" for i in range(p.dim)])
        for row in p.centers:
            writer.writerow([repr(float(v)) for v in row])


def load_packing(path: str) -> Packing:
    """Read a packing from JSON ({"dim": d, "centers": [...]}) or CSV."""
    if path.endswith(".json"):
        with open(path) as fh:
            data = json.load(fh)
        try:
            return Packing(dim=int(data["dim"]), centers=np.array(data["centers"], dtype=float))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed packing JSON in {path}: {exc}") from exc
    dim = None
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                if "dim=" in line:
                    dim = int(line.split("dim=")[1].split()[0])
                continue
            if line.lower().startswith("x1"):
                continue
            rows.append([float(v) for v in line.split(",")])
    if not rows:
        raise ValueError(f"no coordinate rows found in {path}")
    centers = np.array(rows, dtype=float)
    if dim is None:
        dim = centers.shape[1]
    return Packing(dim=dim, centers=centers)
