"""Closed-form density bounds, named constants, and inequality grid scans.

All constants are computed at call time from their defining expressions;
nothing is hard-coded beyond the defining formulas themselves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

import numpy as np

from . import geom2d, geom3d, simplexnd
from .core import PAIRWISE_LIMIT, rogers_limit
from .montecarlo import unit_ball_volume

_TOL = 1e-12

#: arctan(1/sqrt(2)) = 0.615479...
PHI0 = geom3d.PHI0


def psi0() -> float:
    """-arctan(sqrt(2/3) * tan(5 * phi0)) = 0.052438..."""
    return -math.atan(math.sqrt(2.0 / 3.0) * math.tan(5.0 * PHI0))


@dataclass(frozen=True)
class Constants:
    phi0: float
    psi0: float
    lambda_bar_root: float


def blichfeldt_bound(d: int, lam: float) -> Tuple[float, bool]:
    """Gauge-function density bound (2d+4) / ((2 - lb^2) d + 4) * lb^(-d).

    Valid on d^(1/d) - 1 <= lambda <= sqrt(2) - 1; outside that window the
    value is still returned but flagged invalid (the domain is empty for
    d = 3).  At lambda = sqrt(2) - 1 the bound reduces to (d+2)/2 * 2^(-d/2).
    """
    if d < 2:
        raise ValueError("dimension must be at least 2")
    lb = 1.0 + lam
    den = (2.0 - lb * lb) * d + 4.0
    value = math.inf if den <= 0.0 else (2.0 * d + 4.0) / den * lb ** (-d)
    valid = (d ** (1.0 / d) - 1.0 - _TOL <= lam <= math.sqrt(2.0) - 1.0 + _TOL)
    return value, valid


def gauge_integral(d: int, lam: float) -> float:
    """Integral of the truncated gauge 1 - |x|^2/2 over the lambda_bar ball."""
    if d < 2:
        raise ValueError("dimension must be at least 2")
    if lam < 0.0:
        raise ValueError("lambda must be nonnegative")
    lb = 1.0 + lam
    return unit_ball_volume(d) * (lb**d - d / (2.0 * d + 4.0) * lb ** (d + 2))


_LAM3_LIMIT = PAIRWISE_LIMIT - 1.0


def _check_lam3(lam: float, closed_left: bool = True) -> None:
    lo_ok = lam >= (0.0 if closed_left else _TOL) - _TOL
    if not (lo_ok and lam <= _LAM3_LIMIT + _TOL):
        raise ValueError(f"lambda = {lam} outside [0, 2/sqrt(3) - 1)")


def delta3_bound(lam: float) -> float:
    """Truncated-Voronoi density bound in dimension three, as displayed.

    Rational function (pi - 6 psi0) / (pi - 6 psi0 + (3 pi - 18 psi0) lam
    - 18 psi0 lam^2 - (pi + 6 psi0) lam^3).  See delta3_bound_discrepancy:
    the displayed quadratic and cubic coefficients undercut achievable
    truncated-cell densities, so the derived variant is the sound one.
    """
    _check_lam3(lam)
    p0 = psi0()
    num = math.pi - 6.0 * p0
    den = num + (3.0 * math.pi - 18.0 * p0) * lam - 18.0 * p0 * lam**2 - (math.pi + 6.0 * p0) * lam**3
    return num / den


def delta3_bound_derived(lam: float) -> float:
    """Truncated-Voronoi density bound rebuilt from the Hajos slack calibration.

    Per face cone the density is at most 1 / (lb^3 - cap(lb, 1) / f(1)) with
    f the minimal Hajos sector volume; equivalently
    (pi - 6 psi0) / ((pi - 6 psi0) + (3 pi - 18 psi0) lam
                     - (6 pi + 18 psi0) lam^2 - (5 pi + 6 psi0) lam^3).
    """
    _check_lam3(lam)
    lb = 1.0 + lam
    f1 = geom3d.hajos_sector_volume(1.0)
    if lam == 0.0:
        return 1.0
    return 1.0 / (lb**3 - geom3d.cap_volume(lb, 1.0) / f1)


def delta3_bound_discrepancy(lams=(0.02, 0.05, 0.1, 0.15)) -> dict:
    """Compare the displayed and derived 3D bounds with an achievable density.

    The fcc truncated-cell density is realized by an actual packing, so any
    bound falling below it is unsound; the displayed rational does exactly
    that on most of its domain while the derived variant stays above.
    """
    rows = []
    flagged = False
    for lam in lams:
        printed = delta3_bound(lam)
        derived = delta3_bound_derived(lam)
        achieved = geom3d.fcc_truncated_cell_density(lam)
        bad = printed < achieved - 1e-12
        flagged = flagged or bad
        rows.append(
            {
                "lam": lam,
                "displayed": printed,
                "derived": derived,
                "fcc_truncated_cell": achieved,
                "displayed_below_achievable": bad,
            }
        )
    return {"rows": rows, "displayed_bound_unsound": flagged}


def delta_bar3_bound(lam: float) -> float:
    """Covered-fraction bound for soft balls in dimension three.

    ((20 sqrt(6) phi0 - 4 sqrt(6) pi - 10 pi) lb^3 + 18 pi lb^2 - 6 pi)
    / (3 pi - 15 phi0 + 5 sqrt(2)); evaluates to 0.778425... at lambda = 0.
    """
    _check_lam3(lam)
    lb = 1.0 + lam
    s6 = math.sqrt(6.0)
    num = (20.0 * s6 * PHI0 - 4.0 * s6 * math.pi - 10.0 * math.pi) * lb**3 + 18.0 * math.pi * lb * lb - 6.0 * math.pi
    den = 3.0 * math.pi - 15.0 * PHI0 + 5.0 * math.sqrt(2.0)
    return num / den


def lambda_bar_root_residual(lambda_bar: float) -> float:
    """Residual of the widest-inflation equation for the extended boundary bound."""
    lb = lambda_bar
    if lb < 1.0:
        raise ValueError("lambda_bar must be at least 1")
    return (
        (math.sqrt(3.0) - 0.5 * lb * lb * math.pi) * (lb - 1.0)
        - lb * math.sqrt(max(0.0, lb * lb - 1.0))
        + lb**3 * math.acos(min(1.0, 1.0 / lb))
    )


@lru_cache(maxsize=1)
def lambda_bar_root() -> float:
    """Smallest root > 1 of the widest-inflation equation, 2.926949...

    Scans (1, 4] in steps of 1e-3 for a sign change, then bisects to 1e-12.
    lambda_bar = 1 is itself a root and is excluded.
    """
    step = 1e-3
    lo = 1.0 + step
    f_lo = lambda_bar_root_residual(lo)
    hi = lo
    while hi < 4.0:
        hi = hi + step
        f_hi = lambda_bar_root_residual(hi)
        if f_lo == 0.0:
            return lo
        if f_lo * f_hi < 0.0:
            break
        lo, f_lo = hi, f_hi
    else:
        raise RuntimeError("no sign change found on (1, 4]; root bracketing failed")
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        f_mid = lambda_bar_root_residual(mid)
        if f_mid == 0.0 or hi - lo < 1e-12:
            return mid
        if f_lo * f_mid < 0.0:
            hi = mid
        else:
            lo, f_lo = mid, f_mid
    return 0.5 * (lo + hi)


def constants() -> Constants:
    """The three named constants phi0, psi0 and the widest-inflation root."""
    return Constants(phi0=PHI0, psi0=psi0(), lambda_bar_root=lambda_bar_root())


# ---------------------------------------------------------------------------
# Inequality grid scans
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScanResult:
    name: str
    resolution: int
    min_value: float
    argmin: Tuple[float, float]


def _boundary_cell_slack(x: np.ndarray, lb: np.ndarray) -> np.ndarray:
    theta = np.arccos(np.clip(1.0 / lb, -1.0, 1.0))
    root = np.sqrt(np.clip(lb * lb - 1.0, 0.0, None))
    seg = np.sqrt(np.clip(lb * lb - x * x, 0.0, None))
    return (
        -0.5 * lb * lb * np.arccos(np.clip(x / lb, -1.0, 1.0))
        + 0.5 * x * seg
        + (1.5 - x) * (lb * lb * theta - root)
    )


def _interior_cell_slack(alpha: np.ndarray, lb: np.ndarray) -> np.ndarray:
    # slack of a right interior cell of angle alpha against the per-angle
    # cell constant; vanishes identically at alpha = pi/6 (hexagonal case)
    theta = np.arccos(np.clip(1.0 / lb, -1.0, 1.0))
    root = np.sqrt(np.clip(lb * lb - 1.0, 0.0, None))
    cosa = np.cos(alpha)
    cut = np.arccos(np.clip(2.0 * cosa / (math.sqrt(3.0) * lb), -1.0, 1.0))
    reach = np.sqrt(np.clip(lb * lb - (4.0 / 3.0) * cosa * cosa, 0.0, None))
    return (
        -0.5 * lb * lb * cut
        + cosa / math.sqrt(3.0) * reach
        + (3.0 * alpha / math.pi) * (lb * lb * theta - root)
    )


def _hajos_sector_volume_vec(x: np.ndarray) -> np.ndarray:
    s3 = np.sqrt(3.0 - x * x)
    s4 = np.sqrt(4.0 - x * x)
    z = x * s3 * np.tan(5.0 * np.arctan(1.0 / s3)) / s4
    arccot = 0.5 * math.pi - np.arctan(z)
    return 10.0 / 3.0 * np.arctan(s4 / x) - 2.0 / 3.0 * arccot - 2.0 / 3.0 * math.pi


def _hajos_slack_vec(x: np.ndarray, lb: np.ndarray) -> np.ndarray:
    f1 = geom3d.hajos_sector_volume(1.0)
    cap = math.pi * (2.0 / 3.0 * lb**3 - lb * lb * x + x**3 / 3.0)
    cap1 = math.pi * (2.0 / 3.0 * lb**3 - lb * lb + 1.0 / 3.0)
    return _hajos_sector_volume_vec(x) - (f1 / cap1) * cap


def scan_inequality(name: str, grid_resolution: int) -> ScanResult:
    """Grid minimum of a named slack function over its stated domain.

    Names: "groemer_boundary" (boundary-cell slack over 1 <= x <= lb <= 2/sqrt(3)),
    "groemer_interior" (interior-cell slack over arccos(sqrt(3) lb / 2) <= alpha <= pi/6),
    "hajos" (calibrated sector slack over 1 <= x <= lb < 2/sqrt(3)).
    All three are expected to be nonnegative up to rounding.
    """
    if grid_resolution < 50:
        raise ValueError("grid resolution must be at least 50")
    k = grid_resolution
    lim = PAIRWISE_LIMIT
    if name == "groemer_boundary":
        lbs = np.linspace(1.0, lim, k)
        t = np.linspace(0.0, 1.0, k)
        LB, T = np.meshgrid(lbs, t, indexing="ij")
        X = 1.0 + T * (LB - 1.0)
        vals = _boundary_cell_slack(X, LB)
        first, second = X, LB
    elif name == "groemer_interior":
        lbs = np.linspace(1.0, lim, k)
        lower = np.arccos(np.clip(math.sqrt(3.0) * lbs / 2.0, -1.0, 1.0))
        t = np.linspace(0.0, 1.0, k)
        LB = np.repeat(lbs[:, None], k, axis=1)
        A = lower[:, None] + t[None, :] * (math.pi / 6.0 - lower[:, None])
        vals = _interior_cell_slack(A, LB)
        first, second = A, LB
    elif name == "hajos":
        # open at lambda_bar = 1 (the calibration divides by cap(lb, 1))
        lbs = 1.0 + (lim - 1.0) * (np.arange(k) + 0.5) / (k + 0.5)
        t = np.linspace(0.0, 1.0, k)
        LB, T = np.meshgrid(lbs, t, indexing="ij")
        X = 1.0 + T * (LB - 1.0)
        vals = _hajos_slack_vec(X, LB)
        first, second = X, LB
    else:
        raise ValueError(
            f"unknown scan {name!r}; choose groemer_boundary, groemer_interior or hajos"
        )
    idx = np.unravel_index(int(np.argmin(vals)), vals.shape)
    return ScanResult(
        name=name,
        resolution=k,
        min_value=float(vals[idx]),
        argmin=(float(first[idx]), float(second[idx])),
    )


# ---------------------------------------------------------------------------
# Comparative bound tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundEntry:
    value: float
    valid: bool
    domain_note: str


@dataclass(frozen=True)
class BoundReport:
    d: int
    lam: float
    entries: Dict[str, BoundEntry]


def _entry(value: float, valid: bool, note: str = "") -> BoundEntry:
    return BoundEntry(value=value, valid=valid, domain_note=note if not valid else "")


def bound_table(
    d: int,
    lambda_grid,
    mc_samples: Optional[int] = None,
    seed: int = 0,
) -> List[BoundReport]:
    """One BoundReport per lambda with every bound evaluable in dimension d.

    Entries whose domain excludes a lambda are flagged invalid (with the
    violated condition) rather than dropped, so tables stay rectangular.
    For d >= 4 the sigma entries are Monte Carlo and need ``mc_samples``.
    """
    grid = [float(x) for x in lambda_grid]
    limit = rogers_limit(d) - 1.0
    for lam in grid:
        if not (0.0 <= lam < limit + _TOL):
            raise ValueError(f"lambda = {lam} outside [0, {limit}) for d = {d}")
    if d >= 4 and mc_samples is None:
        raise ValueError("sigma_d entries for d >= 4 are Monte Carlo; pass mc_samples")

    pairwise_note = "requires lambda < 2/sqrt(3) - 1"
    reports = []
    for row, lam in enumerate(grid):
        entries: Dict[str, BoundEntry] = {}
        value, valid = blichfeldt_bound(d, lam)
        entries["blichfeldt"] = _entry(value, valid, "requires d^(1/d) - 1 <= lambda <= sqrt(2) - 1")
        in_pairwise = lam <= _LAM3_LIMIT + _TOL
        if d == 2:
            if in_pairwise:
                entries["delta2"] = _entry(geom2d.delta2_exact(lam), True)
                entries["sigma2"] = _entry(geom2d.sigma2(lam), True)
                entries["sigma_bar2"] = _entry(geom2d.sigma_bar2(lam), True)
            else:
                for name in ("delta2", "sigma2", "sigma_bar2"):
                    entries[name] = _entry(math.nan, False, pairwise_note)
        elif d == 3:
            if in_pairwise:
                entries["delta3_bound"] = _entry(delta3_bound(lam), True)
                entries["delta3_bound_derived"] = _entry(delta3_bound_derived(lam), True)
                entries["delta_bar3_bound"] = _entry(delta_bar3_bound(lam), True)
                entries["sigma3"] = _entry(geom3d.sigma3(lam), True)
                entries["sigma_bar3"] = _entry(geom3d.sigma_bar3(lam), True)
            else:
                for name in (
                    "delta3_bound",
                    "delta3_bound_derived",
                    "delta_bar3_bound",
                    "sigma3",
                    "sigma_bar3",
                ):
                    entries[name] = _entry(math.nan, False, pairwise_note)
            if mc_samples is not None:
                tau_limit = geom3d.DODECA_CIRCUMRADIUS - 1.0
                if lam <= tau_limit + _TOL:
                    est = geom3d.tau_bar3(lam, mc_samples, seed + row)
                    entries["tau_bar3"] = _entry(est.value, True)
                    entries["tau_bar3_stderr"] = _entry(est.stderr, True)
                else:
                    note = "requires lambda <= circumradius - 1"
                    entries["tau_bar3"] = _entry(math.nan, False, note)
                    entries["tau_bar3_stderr"] = _entry(math.nan, False, note)
        else:
            est = simplexnd.sigma_d_mc(d, lam, mc_samples, seed + row)
            est_bar = simplexnd.sigma_bar_d_mc(d, lam, mc_samples, seed + row)
            entries["sigma_d_mc"] = _entry(est.value, True)
            entries["sigma_d_stderr"] = _entry(est.stderr, True)
            entries["sigma_bar_d_mc"] = _entry(est_bar.value, True)
            entries["sigma_bar_d_stderr"] = _entry(est_bar.stderr, True)
        reports.append(BoundReport(d=d, lam=lam, entries=entries))
    return reports
