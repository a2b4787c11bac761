"""Independent oracles and shared fixtures for the test suite.

Everything here deliberately avoids the closed forms under test: areas and
volumes come from high-precision quadrature (mpmath), spherical areas from
l'Huilier's theorem, and reference configurations from first principles.
"""

from __future__ import annotations

import math

import mpmath as mp
import numpy as np

from softpack.core import Packing

mp.mp.dps = 30


def lens_area_oracle(r: float, dist: float) -> float:
    """Two-disk intersection area by quadrature of the chord width."""
    if dist >= 2.0 * r:
        return 0.0
    # region is symmetric about the bisector x = dist/2; integrate the
    # near-disk half with the singularity removed by x = r sin t
    half = float(dist) / 2.0

    def integrand(t):
        return (mp.mpf(r) * mp.cos(t)) ** 2

    t0 = mp.asin(mp.mpf(half) / r)
    return float(4.0 * mp.quad(integrand, [t0, mp.pi / 2]))


def lens_volume_oracle(r: float, dist: float) -> float:
    """Two-ball intersection volume as a solid of revolution."""
    if dist >= 2.0 * r:
        return 0.0
    half = mp.mpf(dist) / 2

    def integrand(x):
        return mp.pi * (mp.mpf(r) ** 2 - x**2)

    return float(2.0 * mp.quad(integrand, [half, mp.mpf(r)]))


def cap_volume_oracle(radius: float, x: float) -> float:
    """Spherical cap volume by slicing the ball beyond the plane."""

    def integrand(t):
        return mp.pi * (mp.mpf(radius) ** 2 - t**2)

    return float(mp.quad(integrand, [mp.mpf(x), mp.mpf(radius)]))


def hexdisk_area_oracle(lambda_bar: float) -> float:
    """Hexagon-disk intersection by radial quadrature of min(disk, hexagon).

    One sector around a face normal is integrated with explicit breakpoints
    at the disk-edge crossings so the piecewise integrand stays smooth.
    """
    lb = mp.mpf(lambda_bar)

    def radial(a):
        rho = 1 / mp.cos(a)  # flat hexagon side at distance 1, normal at a = 0
        return mp.mpf(0.5) * min(lb, rho) ** 2

    cross = mp.acos(min(mp.mpf(1), 1 / lb))
    pts = [-mp.pi / 6, -cross, cross, mp.pi / 6]
    return float(6 * mp.quad(radial, pts))


def spherical_excess_oracle(vertices) -> float:
    """Spherical triangle area via l'Huilier from three points projected to S^2."""
    u = [np.asarray(v, dtype=float) for v in vertices]
    u = [v / np.linalg.norm(v) for v in u]
    a = math.acos(np.clip(np.dot(u[1], u[2]), -1.0, 1.0))
    b = math.acos(np.clip(np.dot(u[0], u[2]), -1.0, 1.0))
    c = math.acos(np.clip(np.dot(u[0], u[1]), -1.0, 1.0))
    s = 0.5 * (a + b + c)
    inner = (
        math.tan(0.5 * s)
        * math.tan(0.5 * (s - a))
        * math.tan(0.5 * (s - b))
        * math.tan(0.5 * (s - c))
    )
    return 4.0 * math.atan(math.sqrt(max(inner, 0.0)))


def rogers_cell_triangle(x: float):
    """Planar vertices (foot point, edge midpoint, extreme vertex) at distance x."""
    a = (2.0 - x * x) / math.sqrt(4.0 - x * x)
    b = (2.0 - x * x) / math.sqrt((3.0 - x * x) * (4.0 - x * x))
    return [
        np.array([0.0, 0.0, x]),
        np.array([a, 0.0, x]),
        np.array([a, b, x]),
    ]


def random_packing(rng: np.random.Generator, n: int, dim: int, spread: float = 1.0) -> Packing:
    """Rejection-sampled packing with all pairwise distances >= 2.

    The box grows automatically if rejection stalls, so small ``spread``
    yields dense packings without risking nontermination.
    """
    side = spread * (2.0 * (2.0 * n) ** (1.0 / dim) + 2.0)
    while True:
        pts: list[np.ndarray] = []
        attempts = 0
        while len(pts) < n and attempts < 20_000:
            attempts += 1
            cand = side * (rng.random(dim) - 0.5)
            if all(np.linalg.norm(cand - q) >= 2.0 for q in pts):
                pts.append(cand)
        if len(pts) == n:
            return Packing(dim=dim, centers=np.array(pts))
        side *= 1.3


def overlapping_packing(rng: np.random.Generator, n: int, dim: int, lam: float) -> Packing:
    """Valid packing contracted so several pairs sit inside the overlap zone.

    Keeps every distance strictly above 2 and strictly away from the
    gradient kink at 2 * (1 + lam), so central differences are clean.
    """
    p = random_packing(rng, n, dim, spread=0.8)
    c = p.centers - p.centers.mean(axis=0)
    dists = np.linalg.norm(c[:, None, :] - c[None, :, :], axis=-1)
    iu = np.triu_indices(n, k=1)
    dmin = dists[iu].min()
    c = c * (2.02 / dmin)
    kink = 2.0 * (1.0 + lam)
    for _ in range(50):
        dists = np.linalg.norm(c[:, None, :] - c[None, :, :], axis=-1)[iu]
        if np.all(np.abs(dists - kink) > 1e-4):
            break
        c = c * 0.9995
    return Packing(dim=dim, centers=c)
