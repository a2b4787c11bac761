"""Search for n-ball packings minimizing the inflated union measure.

Projected descent on the exact pairwise-regime objective with annealing
jitter: every proposal is pushed back to feasibility (all center distances
at least 2) by iterated symmetric pair separation, so the exact
inclusion-exclusion objective applies to every iterate.  Restarts are
seeded half from perturbed lattice patches and half from random feasible
configurations; everything is deterministic given the config seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .core import (
    Inflation,
    Packing,
    Regime,
    classify_regime,
    contact_count,
    intersection_graph,
    lattice_patch,
    pairwise_distances,
    validate_packing,
)
from .geom2d import union_area_exact
from .geom3d import union_volume_exact
from .montecarlo import substream


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 8
    max_iters: int = 250
    init_step: float = 0.15
    cooling: float = 0.96
    projection_tol: float = 1e-10
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1 or self.max_iters < 1:
            raise ValueError("restarts and max_iters must be positive")
        if self.init_step <= 0.0 or self.projection_tol <= 0.0:
            raise ValueError("init_step and projection_tol must be positive")
        if not (0.0 < self.cooling < 1.0):
            raise ValueError("cooling must lie in (0, 1)")


@dataclass(frozen=True)
class OptimizerResult:
    best: Packing
    objective: float
    contact_count: int
    lambda_edge_count: int
    history: List[Tuple[int, float]]
    converged: bool


def objective(p: Packing, infl: Inflation) -> float:
    """Exact union measure of the inflated packing (area in 2D, volume in 3D)."""
    if infl.regime is not Regime.PAIRWISE:
        raise ValueError("exact objective requires the pairwise regime")
    if p.dim == 2:
        return union_area_exact(p, infl)
    if p.dim == 3:
        return union_volume_exact(p, infl)
    raise ValueError("objective supports dimensions 2 and 3 only")


def gradient(p: Packing, infl: Inflation, kink_tol: float = 1e-9):
    """Gradient of the union measure in the center positions.

    Each overlapping pair contributes along the line of centers with
    magnitude -d(lens)/d(dist); at dist = 2 lambda_bar both one-sided
    derivatives vanish, so pairs within kink_tol of the kink contribute
    the (zero) subgradient and are reported separately.
    """
    if infl.regime is not Regime.PAIRWISE:
        raise ValueError("exact gradient requires the pairwise regime")
    if p.dim not in (2, 3):
        raise ValueError("gradient supports dimensions 2 and 3 only")
    lb = infl.lambda_bar
    grads = np.zeros_like(p.centers)
    kinks = []
    if p.n == 1:
        return grads, kinks
    dists = pairwise_distances(p)
    for i in range(p.n):
        for j in range(i + 1, p.n):
            d = dists[i, j]
            if d >= 2.0 * lb:
                continue
            if abs(d - 2.0 * lb) <= kink_tol:
                kinks.append((i, j))
                continue
            if p.dim == 2:
                magnitude = math.sqrt(max(0.0, 4.0 * lb * lb - d * d))
            else:
                magnitude = 0.25 * math.pi * (4.0 * lb * lb - d * d)
            u = (p.centers[i] - p.centers[j]) / d
            grads[i] += magnitude * u
            grads[j] -= magnitude * u
    return grads, kinks


def project_feasible(centers: np.ndarray, tol: float, max_passes: int = 500) -> np.ndarray:
    """Push overlapping pairs apart symmetrically until all distances >= 2 - tol."""
    c = np.array(centers, dtype=float)
    n = len(c)
    if n == 1:
        return c
    for _ in range(max_passes):
        diff = c[:, None, :] - c[None, :, :]
        dists = np.sqrt((diff * diff).sum(axis=-1))
        worst = 2.0
        for i in range(n):
            for j in range(i + 1, n):
                d = dists[i, j]
                if d < worst:
                    worst = d
        if worst >= 2.0 - tol:
            return c
        for i in range(n):
            for j in range(i + 1, n):
                d = float(np.linalg.norm(c[i] - c[j]))
                if d >= 2.0:
                    continue
                if d < 1e-12:  # coincident points: split along a fixed axis
                    u = np.zeros(c.shape[1])
                    u[0] = 1.0
                    d = 0.0
                else:
                    u = (c[i] - c[j]) / d
                shift = 0.5 * (2.0 - d) * (1.0 + 1e-12)
                c[i] += shift * u
                c[j] -= shift * u
    return c


def _lattice_seed(n: int, d: int) -> np.ndarray:
    kind = "hexagonal2d" if d == 2 else "fcc3d"
    extent = 1
    while True:
        patch = lattice_patch(kind, extent)
        if patch.n >= n:
            break
        extent += 1
    pts = patch.centers
    order = np.lexsort(tuple(pts[:, k] for k in range(d - 1, -1, -1)) + (np.linalg.norm(pts, axis=1).round(9),))
    return pts[order][:n].copy()


def _random_seed(n: int, d: int, rng: np.random.Generator, tol: float) -> np.ndarray:
    side = 2.0 * (2.0 * n) ** (1.0 / d) + 2.0
    pts = side * (rng.random((n, d)) - 0.5)
    return project_feasible(pts, tol)


def _tighten(centers: np.ndarray, infl: Inflation, tol: float, rounds: int = 60):
    """Snap near-contacts: contract about the centroid so the closest
    overlapping non-tangent pair reaches distance 2, then re-project.
    Accepted only while the objective improves."""
    c = centers
    f = objective(Packing(dim=c.shape[1], centers=c), infl)
    reach = 2.0 * infl.lambda_bar
    for _ in range(rounds):
        dists = pairwise_distances(Packing(dim=c.shape[1], centers=c))
        iu = np.triu_indices(len(c), k=1)
        flat = dists[iu]
        loose = flat[(flat < reach) & (flat > 2.0 + tol)]
        if loose.size == 0:
            break
        scale = 2.0 / float(loose.min())
        centroid = c.mean(axis=0)
        prop = project_feasible(centroid + (c - centroid) * scale, tol)
        f_prop = objective(Packing(dim=c.shape[1], centers=prop), infl)
        if f_prop < f - 1e-15:
            c, f = prop, f_prop
        else:
            break
    return c, f


def optimize(n: int, d: int, lam: float, config: Optional[OptimizerConfig] = None) -> OptimizerResult:
    """Best-of-restarts projected descent for the minimal inflated union measure."""
    if n < 2:
        raise ValueError("need at least two balls")
    if d not in (2, 3):
        raise ValueError("optimization supports dimensions 2 and 3 only")
    cfg = config or OptimizerConfig()
    infl = classify_regime(d, lam)
    if infl.regime is not Regime.PAIRWISE:
        raise ValueError("optimization requires the pairwise regime")

    best_centers = None
    best_obj = math.inf
    best_history: List[Tuple[int, float]] = []
    best_converged = False

    for restart in range(cfg.restarts):
        rng = substream(cfg.seed, restart)
        if restart % 2 == 0:
            start = _lattice_seed(n, d)
            start = start + 0.02 * cfg.init_step * rng.standard_normal(start.shape)
        else:
            start = _random_seed(n, d, rng, cfg.projection_tol)
        cur = project_feasible(start, cfg.projection_tol)
        f_cur = objective(Packing(dim=d, centers=cur), infl)
        step = cfg.init_step
        history = [(0, f_cur)]
        for it in range(1, cfg.max_iters + 1):
            g, _ = gradient(Packing(dim=d, centers=cur), infl)
            gscale = float(np.max(np.abs(g)))
            if gscale > 0.0:
                disp = -step * g / gscale
            else:
                # flat region (no overlaps): contract toward the centroid
                disp = -min(0.5, step) * (cur - cur.mean(axis=0))
            disp = disp + 0.3 * step * rng.standard_normal(cur.shape)
            prop = project_feasible(cur + disp, cfg.projection_tol)
            f_prop = objective(Packing(dim=d, centers=prop), infl)
            if f_prop < f_cur:
                cur, f_cur = prop, f_prop
            else:
                step *= cfg.cooling
            history.append((it, f_cur))
        cur, f_cur = _tighten(cur, infl, cfg.projection_tol)
        if f_cur < best_obj:
            best_obj = f_cur
            best_centers = cur
            best_history = history
            best_converged = step < 1e-6 * cfg.init_step

    best_centers = project_feasible(best_centers, cfg.projection_tol)
    best = Packing(dim=d, centers=best_centers)
    if not validate_packing(best).valid:
        raise RuntimeError("projection failed to restore feasibility")
    final_obj = objective(best, infl)
    graph = intersection_graph(best, 2.0 * infl.lambda_bar, tol=1e-9)
    return OptimizerResult(
        best=best,
        objective=final_obj,
        contact_count=contact_count(best, tol=1e-6),
        lambda_edge_count=graph.edge_count,
        history=best_history,
        converged=best_converged,
    )


@dataclass(frozen=True)
class ProbeRow:
    lam: float
    objective: float
    contact_count: int
    lambda_edge_count: int


@dataclass(frozen=True)
class ProbeResult:
    rows: List[ProbeRow]
    max_contacts: int
    prefix_length: int  # leading grid entries on which the best has max contacts


def contact_link_probe(n: int, d: int, lambda_grid, config: Optional[OptimizerConfig] = None) -> ProbeResult:
    """Optimize along a lambda grid and track where max-contact packings win."""
    cfg = config or OptimizerConfig()
    rows = []
    for k, lam in enumerate(lambda_grid):
        sub = OptimizerConfig(
            restarts=cfg.restarts,
            max_iters=cfg.max_iters,
            init_step=cfg.init_step,
            cooling=cfg.cooling,
            projection_tol=cfg.projection_tol,
            seed=cfg.seed + k,
        )
        res = optimize(n, d, float(lam), sub)
        rows.append(
            ProbeRow(
                lam=float(lam),
                objective=res.objective,
                contact_count=res.contact_count,
                lambda_edge_count=res.lambda_edge_count,
            )
        )
    max_contacts = max(r.contact_count for r in rows)
    prefix = 0
    for r in rows:
        if r.contact_count != max_contacts:
            break
        prefix += 1
    return ProbeResult(rows=rows, max_contacts=max_contacts, prefix_length=prefix)
