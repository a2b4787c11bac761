"""3D geometry of inflated ball packings.

Two-ball lens volumes, spherical cap volumes, the spherical triangle area
of the projected Rogers cell, the Hajos-polygon sector volume and its
calibrated slack, exact pairwise-regime union volumes, tetrahedron cell
densities sigma3 / sigma_bar3, the dodecahedral cell functionals tau3 /
tau_bar3, and the fcc / bcc lattice constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    PAIRWISE_LIMIT,
    Inflation,
    Packing,
    Regime,
    pairwise_distances,
    validate_packing,
)
from .geom2d import coverage_test
from .montecarlo import (
    MCEstimate,
    ball_sampler,
    box_sampler,
    estimate_fraction,
    unit_ball_volume,
)

_DOMAIN_TOL = 1e-12

#: arctan(1/sqrt(2)): half the dihedral angle of the regular tetrahedron
PHI0 = math.atan(1.0 / math.sqrt(2.0))

#: solid angle at a vertex of the regular tetrahedron: 3*arccos(1/3) - pi = 6*PHI0 - pi
TETRA_VERTEX_SOLID_ANGLE = 6.0 * PHI0 - math.pi

#: volume of the regular tetrahedron of edge length 2
TETRA_VOLUME = 2.0 * math.sqrt(2.0) / 3.0

#: dihedral angle of the regular tetrahedron
TETRA_DIHEDRAL = math.acos(1.0 / 3.0)


def lens_volume(r: float, dist: float) -> float:
    """Volume of the intersection of two radius-r balls with centers ``dist`` apart."""
    if r <= 0.0 or dist < 0.0:
        raise ValueError("need r > 0 and dist >= 0")
    if dist >= 2.0 * r:
        return 0.0
    return math.pi / 12.0 * (4.0 * r + dist) * (2.0 * r - dist) ** 2


def cap_volume(lambda_bar: float, x: float) -> float:
    """Volume cut off a ball of radius lambda_bar by a plane at distance x.

    Within a Voronoi cell cone whose face plane sits at distance x, this is
    exactly the part of the inflated ball sector lost beyond the face:
    pi * (2/3 lb^3 - lb^2 x + x^3 / 3).
    """
    if not (1.0 - _DOMAIN_TOL <= x <= lambda_bar + _DOMAIN_TOL):
        raise ValueError(f"x = {x} outside [1, lambda_bar = {lambda_bar}]")
    lb = lambda_bar
    return math.pi * (2.0 / 3.0 * lb**3 - lb * lb * x + x**3 / 3.0)


def spherical_triangle_area(x: float) -> float:
    """Spherical area of the projected half-edge cell of a face at distance x.

    The planar right triangle spanned by the face foot point, a tangent-edge
    midpoint and an extreme vertex of the Hajos polygon projects to a
    spherical triangle of excess arctan(1/sqrt(3-x^2)) + arctan(sqrt(4-x^2)/x) - pi/2.
    """
    if not (1.0 - _DOMAIN_TOL <= x <= PAIRWISE_LIMIT + _DOMAIN_TOL):
        raise ValueError(f"x = {x} outside [1, 2/sqrt(3)]")
    x = min(max(x, 1.0), PAIRWISE_LIMIT)
    return (
        math.atan(1.0 / math.sqrt(3.0 - x * x))
        + math.atan(math.sqrt(4.0 - x * x) / x)
        - 0.5 * math.pi
    )


def hajos_sector_volume(x: float) -> float:
    """Minimal unit-ball sector volume over the cone of a Hajos polygon at distance x.

    The hexagonal Hajos polygon contributes ten tangent half-edge triangles
    plus a free edge handled by the arccot term; the arccot branch is fixed
    to (0, pi) so the expression stays continuous where tan(5*arctan(...))
    changes sign (at x = 1.051462...).
    """
    if not (1.0 - _DOMAIN_TOL <= x <= PAIRWISE_LIMIT + _DOMAIN_TOL):
        raise ValueError(f"x = {x} outside [1, 2/sqrt(3)]")
    x = min(max(x, 1.0), PAIRWISE_LIMIT)
    s3 = math.sqrt(3.0 - x * x)
    s4 = math.sqrt(4.0 - x * x)
    z = x * s3 * math.tan(5.0 * math.atan(1.0 / s3)) / s4
    arccot = 0.5 * math.pi - math.atan(z)  # branch in (0, pi)
    return 10.0 / 3.0 * math.atan(s4 / x) - 2.0 / 3.0 * arccot - 2.0 / 3.0 * math.pi


def hajos_slack(x: float, lambda_bar: float) -> float:
    """Sector volume minus its cap-volume calibration; zero at x = 1 by construction.

    Nonnegativity of this slack over 1 <= x <= lambda_bar < 2/sqrt(3) is
    what pins the truncated-cell density bound in dimension three.
    """
    if not (1.0 < lambda_bar < PAIRWISE_LIMIT):
        raise ValueError("need 1 < lambda_bar < 2/sqrt(3)")
    if not (1.0 - _DOMAIN_TOL <= x <= lambda_bar + _DOMAIN_TOL):
        raise ValueError(f"x = {x} outside [1, lambda_bar]")
    x = min(max(x, 1.0), lambda_bar)
    c = hajos_sector_volume(1.0) / cap_volume(lambda_bar, 1.0)
    return hajos_sector_volume(x) - c * cap_volume(lambda_bar, x)


def union_volume_exact(p: Packing, infl: Inflation) -> float:
    """Exact volume of the union of balls of radius 1 + lambda about the centers."""
    if p.dim != 3 or infl.dim != 3:
        raise ValueError("union_volume_exact requires dimension 3")
    if infl.regime is not Regime.PAIRWISE:
        raise ValueError("exact union volume requires the pairwise regime; use union_volume_mc")
    report = validate_packing(p)
    if not report.valid:
        raise ValueError(f"invalid packing: pair {report.offending_pair} at distance {report.min_pair_distance}")
    lb = infl.lambda_bar
    total = p.n * unit_ball_volume(3) * lb**3
    if p.n > 1:
        dists = pairwise_distances(p)
        iu = np.triu_indices(p.n, k=1)
        for d in dists[iu]:
            if d < 2.0 * lb:
                total -= lens_volume(lb, float(d))
    return total


def union_volume_mc(p: Packing, infl: Inflation, samples: int, seed: int) -> MCEstimate:
    """Monte Carlo union volume over the bounding box of the inflated balls."""
    if p.dim != 3 or infl.dim != 3:
        raise ValueError("union_volume_mc requires dimension 3")
    lb = infl.lambda_bar
    lo = p.centers.min(axis=0) - lb
    hi = p.centers.max(axis=0) + lb
    return estimate_fraction(coverage_test(p, lb), box_sampler(lo, hi), samples, seed)


# ---------------------------------------------------------------------------
# Regular tetrahedron cell densities
# ---------------------------------------------------------------------------


def tetra_union_volume(lambda_bar: float) -> float:
    """Volume of T ∩ union of lambda_bar-balls at the vertices of the edge-2 tetrahedron.

    Four vertex sectors minus, per edge, the dihedral-wedge fraction of the
    two-ball lens; exact for lambda_bar < 2/sqrt(3) since the lens is a
    solid of revolution about the edge and no three balls meet.
    """
    if not (1.0 - _DOMAIN_TOL <= lambda_bar <= PAIRWISE_LIMIT + _DOMAIN_TOL):
        raise ValueError(f"lambda_bar = {lambda_bar} outside [1, 2/sqrt(3)]")
    lb = min(max(lambda_bar, 1.0), PAIRWISE_LIMIT)
    sectors = 4.0 * (TETRA_VERTEX_SOLID_ANGLE / 3.0) * lb**3
    wedges = 6.0 * (TETRA_DIHEDRAL / (2.0 * math.pi)) * lens_volume(lb, 2.0)
    return sectors - wedges


SIMPLEX_LAMBDA_LIMIT3 = PAIRWISE_LIMIT - 1.0


def _check_lambda3(lam: float) -> float:
    if not (-_DOMAIN_TOL <= lam <= SIMPLEX_LAMBDA_LIMIT3 + _DOMAIN_TOL):
        raise ValueError(f"lambda = {lam} outside [0, 2/sqrt(3) - 1]")
    return min(max(lam, 0.0), SIMPLEX_LAMBDA_LIMIT3)


def sigma3(lam: float) -> float:
    """Unit-ball sectors of the edge-2 tetrahedron over its inflated coverage."""
    lam = _check_lambda3(lam)
    return (4.0 * TETRA_VERTEX_SOLID_ANGLE / 3.0) / tetra_union_volume(1.0 + lam)


def sigma_bar3(lam: float) -> float:
    """Covered fraction of the edge-2 tetrahedron by the inflated vertex balls."""
    lam = _check_lambda3(lam)
    return tetra_union_volume(1.0 + lam) / TETRA_VOLUME


def sigma3_coefficients() -> dict:
    """Denominator coefficients of sigma3 as a rational function of lambda.

    sigma3(lam) = (pi - 6*phi0) / (pi*lam^3 + (3*pi - 9*phi0)*lam^2
                                   + (3*pi - 18*phi0)*lam + pi - 6*phi0).
    Both numerator and denominator are negative on the domain; the linear
    coefficient 3*pi - 18*phi0 completes the closed form.
    """
    return {
        "numerator": math.pi - 6.0 * PHI0,
        "lam3": math.pi,
        "lam2": 3.0 * math.pi - 9.0 * PHI0,
        "lam1": 3.0 * math.pi - 18.0 * PHI0,
        "const": math.pi - 6.0 * PHI0,
    }


def sigma3_rational(lam: float) -> float:
    """sigma3 evaluated through its rational closed form (cross-check route)."""
    lam = _check_lambda3(lam)
    c = sigma3_coefficients()
    den = c["lam3"] * lam**3 + c["lam2"] * lam**2 + c["lam1"] * lam + c["const"]
    return c["numerator"] / den


def fcc_truncated_cell_density(lam: float) -> float:
    """Density of a unit ball in its lambda_bar-truncated fcc Voronoi cell.

    The rhombic dodecahedral cell has twelve faces at distance 1, so the
    truncated cell is the inflated ball minus twelve disjoint caps (caps
    stay disjoint for lambda_bar < 2/sqrt(3)).
    """
    lam = _check_lambda3(lam)
    lb = 1.0 + lam
    w3 = unit_ball_volume(3)
    return w3 / (w3 * lb**3 - 12.0 * cap_volume(lb, 1.0))


# ---------------------------------------------------------------------------
# Dodecahedral cell
# ---------------------------------------------------------------------------

#: circumradius of the regular dodecahedron with inradius 1
DODECA_CIRCUMRADIUS = math.sqrt(3.0) * math.tan(math.pi / 5.0)


@dataclass(frozen=True)
class Dodecahedron:
    """Regular dodecahedron circumscribing the unit ball, face planes at distance 1."""

    vertices: np.ndarray  # (20, 3)
    face_normals: np.ndarray  # (12, 3) unit outward normals
    face_offsets: np.ndarray  # (12,) all equal to 1
    inradius: float
    circumradius: float
    volume: float


def dodecahedron_model() -> Dodecahedron:
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    verts = []
    for sx in (-1.0, 1.0):
        for sy in (-1.0, 1.0):
            for sz in (-1.0, 1.0):
                verts.append((sx, sy, sz))
    for a in (-1.0 / phi, 1.0 / phi):
        for b in (-phi, phi):
            verts.append((0.0, a, b))
            verts.append((a, b, 0.0))
            verts.append((b, 0.0, a))
    verts = np.array(verts)
    # face centers point along (0, +-phi, +-1) and its cyclic shifts
    normals = []
    for a in (-1.0, 1.0):
        for b in (-phi, phi):
            normals.append((0.0, b, a))
            normals.append((b, a, 0.0))
            normals.append((a, 0.0, b))
    normals = np.array(normals)
    normals /= np.linalg.norm(normals, axis=1, keepdims=True)
    inradius = float(np.max(normals @ verts.T, axis=1).min())
    verts = verts / inradius  # rescale so every face plane sits at distance 1
    circum = float(np.linalg.norm(verts, axis=1).max())
    # 12 pyramids with apex at the centre and height 1: V = surface / 3;
    # each pentagon face has circumradius sqrt(circum^2 - 1)
    pent_area = 2.5 * (circum * circum - 1.0) * math.sin(0.4 * math.pi)
    volume = 4.0 * pent_area
    return Dodecahedron(
        vertices=verts,
        face_normals=normals,
        face_offsets=np.ones(12),
        inradius=1.0,
        circumradius=circum,
        volume=volume,
    )


_TAU_LIMIT = DODECA_CIRCUMRADIUS - 1.0


def _dodeca_ball_volume_mc(lam: float, samples: int, seed: int) -> MCEstimate:
    if not (-_DOMAIN_TOL <= lam <= _TAU_LIMIT + _DOMAIN_TOL):
        raise ValueError(f"lambda = {lam} outside [0, {_TAU_LIMIT}]")
    lb = min(1.0 + max(lam, 0.0), DODECA_CIRCUMRADIUS)
    d = dodecahedron_model()
    normals, offsets = d.face_normals, d.face_offsets

    def inside(pts: np.ndarray) -> np.ndarray:
        return np.all(pts @ normals.T <= offsets + 1e-15, axis=1)

    return estimate_fraction(inside, ball_sampler(3, lb), samples, seed)


def tau3(lam: float, samples: int, seed: int) -> MCEstimate:
    """vol(unit ball) / vol(D ∩ inflated ball) for the inradius-1 dodecahedron D."""
    est = _dodeca_ball_volume_mc(lam, samples, seed)
    w3 = unit_ball_volume(3)
    value = w3 / est.value
    stderr = w3 * est.stderr / est.value**2
    return MCEstimate(value=value, stderr=stderr, samples=est.samples, seed=est.seed)


def tau_bar3(lam: float, samples: int, seed: int) -> MCEstimate:
    """vol(D ∩ inflated ball) / vol(D) for the inradius-1 dodecahedron D."""
    est = _dodeca_ball_volume_mc(lam, samples, seed)
    vol = dodecahedron_model().volume
    return MCEstimate(value=est.value / vol, stderr=est.stderr / vol, samples=est.samples, seed=est.seed)


# ---------------------------------------------------------------------------
# Lattice constants
# ---------------------------------------------------------------------------


def fcc_density_check() -> float:
    """Packing density of fcc: ball volume over the rhombic dodecahedral cell 4*sqrt(2)."""
    return unit_ball_volume(3) / (4.0 * math.sqrt(2.0))


def bcc_covering_radius() -> float:
    """Covering radius of the bcc lattice normalized to nearest-neighbor distance 2."""
    return math.sqrt(5.0 / 3.0)


def bcc_covering_check(lambda_bar: float, samples: int, seed: int) -> MCEstimate:
    """Fraction of a bcc fundamental cube covered by lambda_bar-balls at lattice points."""
    if lambda_bar <= 0.0:
        raise ValueError("lambda_bar must be positive")
    a = 4.0 / math.sqrt(3.0)
    pts = []
    for i in range(-1, 3):
        for j in range(-1, 3):
            for k in range(-1, 3):
                pts.append((a * i, a * j, a * k))
                pts.append((a * (i + 0.5), a * (j + 0.5), a * (k + 0.5)))
    lattice = np.array(pts)
    # keep only lattice points within reach of the sampling cube [0, a]^3
    gap = lattice - np.clip(lattice, 0.0, a)
    lattice = lattice[(gap * gap).sum(axis=1) <= (lambda_bar + 1e-12) ** 2]
    r2 = lambda_bar * lambda_bar

    def covered(x: np.ndarray) -> np.ndarray:
        hit = np.zeros(len(x), dtype=bool)
        for c in lattice:
            d = x - c
            hit |= (d * d).sum(axis=1) <= r2
        return hit

    sampler = box_sampler(np.zeros(3), np.full(3, a))
    est = estimate_fraction(covered, sampler, samples, seed)
    cell = a**3
    return MCEstimate(value=est.value / cell, stderr=est.stderr / cell, samples=samples, seed=seed)
