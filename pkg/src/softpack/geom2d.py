"""Exact planar geometry of inflated disk packings.

Includes two-disk lens areas, the hexagon/disk cell area, exact union area
in the pairwise regime (inclusion-exclusion at order two), outer-boundary
traversal of the intersection graph, Groemer-type lower bounds for the
union area, and the planar density functions delta2, sigma2, sigma_bar2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import List

import numpy as np

from .core import (
    DEFAULT_TOL,
    PAIRWISE_LIMIT,
    Inflation,
    IntersectionGraph,
    Packing,
    Regime,
    pairwise_distances,
    validate_packing,
)
from .montecarlo import MCEstimate, box_sampler, estimate_fraction

_DOMAIN_TOL = 1e-12


def lens_area(r: float, dist: float) -> float:
    """Area of the intersection of two radius-r disks with centers ``dist`` apart."""
    if r <= 0.0 or dist < 0.0:
        raise ValueError("need r > 0 and dist >= 0")
    if dist >= 2.0 * r:
        return 0.0
    return 2.0 * r * r * math.acos(dist / (2.0 * r)) - 0.5 * dist * math.sqrt(4.0 * r * r - dist * dist)


def hexdisk_area(lambda_bar: float) -> float:
    """Area of H ∩ (lambda_bar · disk), H the regular hexagon with inradius 1.

    Equals the area one disk of the densest lattice packing covers inside
    its own Voronoi cell after inflation; pi at lambda_bar = 1, the full
    hexagon area 2*sqrt(3) at lambda_bar = 2/sqrt(3).
    """
    if not (1.0 - _DOMAIN_TOL <= lambda_bar <= PAIRWISE_LIMIT + _DOMAIN_TOL):
        raise ValueError(f"lambda_bar = {lambda_bar} outside [1, 2/sqrt(3)]")
    lb = min(max(lambda_bar, 1.0), PAIRWISE_LIMIT)
    return lb * lb * (math.pi - 6.0 * math.acos(1.0 / lb)) + 6.0 * math.sqrt(lb * lb - 1.0)


def _require(p: Packing, infl: Inflation, dim: int) -> None:
    if p.dim != dim:
        raise ValueError(f"packing dimension {p.dim}, expected {dim}")
    if infl.dim != dim:
        raise ValueError(f"inflation classified for dimension {infl.dim}, expected {dim}")


def union_area_exact(p: Packing, infl: Inflation) -> float:
    """Exact area of the union of disks of radius 1 + lambda about the centers.

    Only valid in the pairwise regime, where no three inflated disks share
    a point and inclusion-exclusion terminates at pair overlaps.
    """
    _require(p, infl, 2)
    if infl.regime is not Regime.PAIRWISE:
        raise ValueError("exact union area requires the pairwise regime; use union_area_mc")
    report = validate_packing(p)
    if not report.valid:
        raise ValueError(f"invalid packing: pair {report.offending_pair} at distance {report.min_pair_distance}")
    lb = infl.lambda_bar
    total = p.n * math.pi * lb * lb
    if p.n > 1:
        dists = pairwise_distances(p)
        iu = np.triu_indices(p.n, k=1)
        for d in dists[iu]:
            if d < 2.0 * lb:
                total -= lens_area(lb, float(d))
    return total


def coverage_test(p: Packing, lambda_bar: float):
    """Vectorized membership test for the union of inflated balls."""
    centers = p.centers
    r2 = lambda_bar * lambda_bar

    def test(pts: np.ndarray) -> np.ndarray:
        covered = np.zeros(len(pts), dtype=bool)
        for c in centers:
            d = pts - c
            covered |= (d * d).sum(axis=1) <= r2
        return covered

    return test


def union_area_mc(p: Packing, infl: Inflation, samples: int, seed: int) -> MCEstimate:
    """Monte Carlo union area over the bounding box of the inflated disks."""
    _require(p, infl, 2)
    lb = infl.lambda_bar
    lo = p.centers.min(axis=0) - lb
    hi = p.centers.max(axis=0) + lb
    return estimate_fraction(coverage_test(p, lb), box_sampler(lo, hi), samples, seed)


# ---------------------------------------------------------------------------
# Outer boundary of the intersection graph
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundaryWalk:
    """Closed walks bounding the unbounded face, one per graph component.

    ``cycles`` lists edge indices in traversal order; an edge incident to
    the unbounded face on both sides appears twice and contributes its
    length twice to ``perim``.  Isolated vertices contribute empty walks.
    """

    cycles: List[List[int]]
    perim: float
    component_count: int


def _proper_cross(a, b, c, d) -> bool:
    def orient(p, q, r):
        return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])

    o1 = orient(a, b, c)
    o2 = orient(a, b, d)
    o3 = orient(c, d, a)
    o4 = orient(c, d, b)
    return (o1 * o2 < 0.0) and (o3 * o4 < 0.0)


def edges_cross(g: IntersectionGraph, p: Packing) -> bool:
    """True if any two edges of the straight-line drawing properly cross."""
    pts = p.centers
    e = g.edges
    for i in range(len(e)):
        a, b = e[i]
        for j in range(i + 1, len(e)):
            c, d = e[j]
            if len({a, b, c, d}) < 4:
                continue
            if _proper_cross(pts[a], pts[b], pts[c], pts[d]):
                return True
    return False


def _components(n: int, edges: np.ndarray) -> np.ndarray:
    parent = np.arange(n)

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in edges:
        ri, rj = find(int(i)), find(int(j))
        if ri != rj:
            parent[ri] = rj
    return np.array([find(v) for v in range(n)])


def boundary_walk(g: IntersectionGraph, p: Packing) -> BoundaryWalk:
    """Walks bounding the unbounded face of the straight-line drawing of g.

    Uses the rotation system of the drawing: neighbors are ordered
    counterclockwise around each vertex, and the face to the right of a
    directed edge is traced by turning to the clockwise successor of the
    reversed edge.  Interior faces then close with positive signed area
    and the outer walk of each component with the most negative one.
    """
    if p.dim != 2:
        raise ValueError("boundary traversal is planar only")
    if g.vertex_count != p.n:
        raise ValueError("graph and packing sizes disagree")
    if edges_cross(g, p):
        raise ValueError("straight-line drawing has crossing edges; no plane boundary")

    pts = p.centers
    edges = g.edges
    labels = _components(p.n, edges)

    # counterclockwise rotation at every vertex, remembering edge indices
    rotation: List[List[int]] = [[] for _ in range(p.n)]
    edge_index = {}
    for idx, (i, j) in enumerate(edges):
        i, j = int(i), int(j)
        rotation[i].append(j)
        rotation[j].append(i)
        edge_index[(i, j)] = idx
        edge_index[(j, i)] = idx
    order = {}
    for v in range(p.n):
        nbrs = rotation[v]
        angles = [math.atan2(pts[u][1] - pts[v][1], pts[u][0] - pts[v][0]) for u in nbrs]
        nbrs_sorted = [u for _, u in sorted(zip(angles, nbrs))]
        rotation[v] = nbrs_sorted
        order[v] = {u: k for k, u in enumerate(nbrs_sorted)}

    def next_directed(u, v):
        nbrs = rotation[v]
        k = order[v][u]
        return v, nbrs[(k - 1) % len(nbrs)]

    unused = {(int(i), int(j)) for i, j in edges} | {(int(j), int(i)) for i, j in edges}
    faces = []  # (component, signed_area, [edge indices])
    for start in sorted(unused):
        if start not in unused:
            continue
        walk = []
        area2 = 0.0
        cur = start
        while True:
            unused.discard(cur)
            u, v = cur
            walk.append(edge_index[(u, v)])
            area2 += pts[u][0] * pts[v][1] - pts[v][0] * pts[u][1]
            cur = next_directed(u, v)
            if cur == start:
                break
        faces.append((labels[start[0]], 0.5 * area2, walk))

    cycles: List[List[int]] = []
    perim = 0.0
    lengths = np.linalg.norm(pts[edges[:, 0]] - pts[edges[:, 1]], axis=1) if len(edges) else np.zeros(0)
    for root in sorted(set(int(r) for r in labels)):
        comp_faces = [f for f in faces if f[0] == root]
        if not comp_faces:
            cycles.append([])  # isolated vertex
            continue
        outer = min(comp_faces, key=lambda f: f[1])
        cycles.append(outer[2])
        perim += float(sum(lengths[k] for k in outer[2]))
    return BoundaryWalk(cycles=cycles, perim=perim, component_count=len(cycles))


def boundary_walk_json(walk: BoundaryWalk) -> dict:
    """Plain-dict form of a boundary walk for JSON export / plotting."""
    return {
        "cycles": [[int(e) for e in cyc] for cyc in walk.cycles],
        "perim": walk.perim,
        "components": walk.component_count,
    }


# ---------------------------------------------------------------------------
# Groemer-type lower bounds for the union area
# ---------------------------------------------------------------------------


@lru_cache(maxsize=1)
def _widest_inflation() -> float:
    from .bounds import lambda_bar_root

    return lambda_bar_root()


def groemer_rhs(n: int, perim: float, infl: Inflation, variant: str) -> float:
    """Lower bound for the union area of n inflated disks with boundary length perim.

    variant "pairwise" (1 < lambda_bar <= 2/sqrt(3)) uses the hexagon cell
    area; variant "extended" (2/sqrt(3) <= lambda_bar <= the widest-inflation
    root 2.926949...) uses the full hexagon area sqrt(12).  The cell term
    counts n - 1 disks: one cell per boundary component is traded for the
    full inflated disk pi*lambda_bar^2, which is what makes hexagonal
    lattice patches attain equality.
    """
    if n < 1 or perim < 0.0:
        raise ValueError("need n >= 1 and perim >= 0")
    lb = infl.lambda_bar
    theta = math.acos(min(1.0, 1.0 / lb))
    root = math.sqrt(max(0.0, lb * lb - 1.0))
    if variant == "pairwise":
        if not (1.0 < lb <= PAIRWISE_LIMIT + _DOMAIN_TOL):
            raise ValueError("pairwise variant needs 1 < lambda_bar <= 2/sqrt(3)")
        cell = hexdisk_area(lb)
        coeff = lb * lb * theta - root
    elif variant == "extended":
        if not (PAIRWISE_LIMIT - _DOMAIN_TOL <= lb <= _widest_inflation() + _DOMAIN_TOL):
            raise ValueError("extended variant needs 2/sqrt(3) <= lambda_bar <= 2.926949...")
        cell = math.sqrt(12.0)
        coeff = 0.5 * (lb * lb * (0.5 * math.pi - theta) + root - math.sqrt(3.0))
    else:
        raise ValueError(f"unknown variant {variant!r}; use 'pairwise' or 'extended'")
    return cell * (n - 1) + coeff * perim + math.pi * lb * lb


def hull_perimeter_inflated(p: Packing, lambda_bar: float) -> float:
    """Perimeter of the convex hull of the inflated disks: hull of centers + 2*pi*lambda_bar."""
    if p.dim != 2:
        raise ValueError("hull perimeter is planar only")
    if lambda_bar <= 0.0:
        raise ValueError("lambda_bar must be positive")
    hull = _convex_hull(p.centers)
    per = 0.0
    if len(hull) > 1:
        per = float(sum(np.linalg.norm(hull[(k + 1) % len(hull)] - hull[k]) for k in range(len(hull))))
    return per + 2.0 * math.pi * lambda_bar


def _convex_hull(points: np.ndarray) -> np.ndarray:
    pts = sorted(set(map(tuple, np.asarray(points, dtype=float))))
    if len(pts) <= 2:
        return np.array(pts)

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    def build(seq):
        h = []
        for pt in seq:
            while len(h) >= 2 and cross(h[-2], h[-1], pt) <= 0.0:
                h.pop()
            h.append(pt)
        return h

    lower = build(pts)
    upper = build(reversed(pts))
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 2:  # all points collinear collapse to the two extremes
        hull = [pts[0], pts[-1]]
    return np.array(hull)


# ---------------------------------------------------------------------------
# Planar density functions
# ---------------------------------------------------------------------------

PLANAR_LAMBDA_LIMIT = PAIRWISE_LIMIT - 1.0


def _check_planar_lambda(lam: float) -> float:
    if not (-_DOMAIN_TOL <= lam <= PLANAR_LAMBDA_LIMIT + _DOMAIN_TOL):
        raise ValueError(f"lambda = {lam} outside [0, 2/sqrt(3) - 1]")
    return min(max(lam, 0.0), PLANAR_LAMBDA_LIMIT)


def delta2_exact(lam: float) -> float:
    """Largest density of unit disks relative to their inflated union: pi / hexdisk_area."""
    lam = _check_planar_lambda(lam)
    return math.pi / hexdisk_area(1.0 + lam)


def sigma2(lam: float) -> float:
    """Planar simplex-cell density: unit-disk sectors over inflated coverage of the triangle."""
    lam = _check_planar_lambda(lam)
    lb = 1.0 + lam
    return math.pi / (math.pi * lb * lb - 3.0 * lens_area(lb, 2.0))


def sigma_bar2(lam: float) -> float:
    """Covered fraction of the edge-2 triangle by inflated disks at its vertices.

    Three sectors of angle pi/3 minus the three half-lenses that are double
    counted along the edges, over the triangle area sqrt(3).
    """
    lam = _check_planar_lambda(lam)
    lb = 1.0 + lam
    covered = 0.5 * math.pi * lb * lb - 1.5 * lens_area(lb, 2.0)
    return covered / math.sqrt(3.0)
