"""Command-line front end: bound tables, densities, verification suites,
packing optimization, and lattice constant checks.

Exit codes: 0 success, 2 usage or domain error, 3 input data error,
4 verification failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import List, Optional, Tuple

import numpy as np

from . import __version__, bounds, geom2d, geom3d, simplexnd
from .core import (
    PAIRWISE_LIMIT,
    Packing,
    Regime,
    classify_regime,
    contact_count,
    intersection_graph,
    lattice_patch,
    load_packing,
    rogers_limit,
    save_packing_json,
    validate_packing,
)
from .montecarlo import box_sampler, estimate_fraction, substream, unit_ball_volume
from .optimizer import OptimizerConfig, optimize

USAGE_ERROR = 2
DATA_ERROR = 3
VERIFY_ERROR = 4


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return f"{float(x):.12g}"


def _default_seed() -> int:
    env = os.environ.get("SOFTPACK_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise SystemExit(USAGE_ERROR)


def _metadata_lines(args: argparse.Namespace, seed: Optional[int]) -> List[str]:
    flags = " ".join(sys.argv[1:]) if sys.argv[1:] else args.command
    lines = [f"# softpack {__version__}", f"# flags: {flags}"]
    if seed is not None:
        lines.append(f"# seed: {seed}")
    return lines


def _write_csv(path: Optional[str], lines: List[str]) -> None:
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------


def cmd_bounds(args) -> int:
    d = args.dim
    limit = rogers_limit(d) - 1.0
    if not (0.0 <= args.lambda_min <= args.lambda_max < limit + 1e-12):
        print(f"error: lambda range must sit inside [0, {limit:.6f}) for d={d}", file=sys.stderr)
        return USAGE_ERROR
    if args.steps < 1:
        print("error: need at least one step", file=sys.stderr)
        return USAGE_ERROR
    grid = np.linspace(args.lambda_min, args.lambda_max, args.steps)
    try:
        reports = bounds.bound_table(d, grid, mc_samples=args.mc_samples, seed=args.seed)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR

    lines = _metadata_lines(args, args.seed)
    if args.format == "wide":
        names = list(reports[0].entries.keys())
        header = ["lambda"]
        for name in names:
            header += [name, f"{name}_valid"]
        lines.append(",".join(header))
        for rep in reports:
            row = [_fmt(rep.lam)]
            for name in names:
                e = rep.entries[name]
                row += [_fmt(e.value), _fmt(e.valid)]
            lines.append(",".join(row))
    else:
        lines.append("name,d,lambda,value,valid,domain_note")
        for rep in reports:
            for name, e in rep.entries.items():
                lines.append(
                    ",".join(
                        [name, str(rep.d), _fmt(rep.lam), _fmt(e.value), _fmt(e.valid), e.domain_note]
                    )
                )
    _write_csv(args.out, lines)
    if args.json is not None:
        payload = [
            {
                "d": rep.d,
                "lambda": rep.lam,
                "entries": {
                    k: {"value": None if math.isnan(e.value) else e.value, "valid": e.valid, "domain_note": e.domain_note}
                    for k, e in rep.entries.items()
                },
            }
            for rep in reports
        ]
        with open(args.json, "w") as fh:
            json.dump(payload, fh, indent=1)
            fh.write("\n")
    return 0


# ---------------------------------------------------------------------------
# density
# ---------------------------------------------------------------------------


def cmd_density(args) -> int:
    try:
        p = load_packing(args.packing)
    except (OSError, ValueError) as exc:
        print(f"error: cannot read packing: {exc}", file=sys.stderr)
        return DATA_ERROR
    report = validate_packing(p)
    if not report.valid:
        print(
            f"error: invalid packing: pair {report.offending_pair} at distance "
            f"{_fmt(report.min_pair_distance)} < 2",
            file=sys.stderr,
        )
        return DATA_ERROR
    if args.lam < 0.0:
        print("error: lambda must be nonnegative", file=sys.stderr)
        return USAGE_ERROR
    infl = classify_regime(p.dim, args.lam)
    lb = infl.lambda_bar

    measure = stderr = None
    method = "exact"
    if infl.regime is Regime.PAIRWISE and p.dim in (2, 3):
        measure = geom2d.union_area_exact(p, infl) if p.dim == 2 else geom3d.union_volume_exact(p, infl)
    else:
        method = "monte-carlo"
        samples, seed = (args.mc if args.mc else (1_000_000, args.seed))
        if p.dim == 2:
            est = geom2d.union_area_mc(p, infl, int(samples), int(seed))
        elif p.dim == 3:
            est = geom3d.union_volume_mc(p, infl, int(samples), int(seed))
        else:
            lo = p.centers.min(axis=0) - lb
            hi = p.centers.max(axis=0) + lb
            est = estimate_fraction(geom2d.coverage_test(p, lb), box_sampler(lo, hi), int(samples), int(seed))
        measure, stderr = est.value, est.stderr

    density = p.n * unit_ball_volume(p.dim) / measure
    graph = intersection_graph(p, 2.0 * lb)
    print(f"n: {p.n}")
    print(f"dim: {p.dim}")
    print(f"lambda: {_fmt(args.lam)}")
    print(f"lambda_bar: {_fmt(lb)}")
    print(f"regime: {infl.regime.value}")
    print(f"method: {method}")
    print(f"union_measure: {_fmt(measure)}" + (f" +- {_fmt(stderr)}" if stderr is not None else ""))
    print(f"density: {_fmt(density)}")
    print(f"contacts: {contact_count(p)}")
    print(f"lambda_edges: {graph.edge_count}")
    if args.boundary_out is not None:
        if p.dim != 2:
            print("error: boundary export is planar only", file=sys.stderr)
            return USAGE_ERROR
        if 2.0 * lb >= 4.0 / math.sqrt(3.0):
            print("error: boundary walk needs threshold < 4/sqrt(3)", file=sys.stderr)
            return USAGE_ERROR
        walk = geom2d.boundary_walk(graph, p)
        with open(args.boundary_out, "w") as fh:
            json.dump(geom2d.boundary_walk_json(walk), fh, indent=1)
            fh.write("\n")
    return 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

Check = Tuple[str, bool, str]


def _suite_constants(grid: int, samples: int, seed: int) -> List[Check]:
    c = bounds.constants()
    checks = [
        ("phi0 = 0.615479 within 5e-7", abs(c.phi0 - 0.615479) <= 5e-7, _fmt(c.phi0)),
        ("psi0 = 0.052438 within 5e-7", abs(c.psi0 - 0.052438) <= 5e-7, _fmt(c.psi0)),
        ("widest-inflation root = 2.926949 within 5e-7", abs(c.lambda_bar_root - 2.926949) <= 5e-7, _fmt(c.lambda_bar_root)),
        ("root residual vanishes", abs(bounds.lambda_bar_root_residual(c.lambda_bar_root)) <= 1e-9, ""),
    ]
    return checks


def _random_packing(rng: np.random.Generator, n: int, dim: int) -> Packing:
    side = 2.0 * (2.0 * n) ** (1.0 / dim) + 2.0
    pts: List[np.ndarray] = []
    while len(pts) < n:
        cand = side * (rng.random(dim) - 0.5)
        if all(np.linalg.norm(cand - q) >= 2.0 for q in pts):
            pts.append(cand)
    return Packing(dim=dim, centers=np.array(pts))


def _suite_groemer(grid: int, samples: int, seed: int) -> List[Check]:
    rng = substream(seed, 0)
    lams = np.linspace(0.01, PAIRWISE_LIMIT - 1.0 - 0.01, 10)
    worst = math.inf
    for k in range(grid):
        n = int(rng.integers(2, 16))
        p = _random_packing(rng, n, 2)
        for lam in lams:
            infl = classify_regime(2, float(lam))
            area = geom2d.union_area_exact(p, infl)
            g = intersection_graph(p, 2.0 * infl.lambda_bar)
            walk = geom2d.boundary_walk(g, p)
            rhs = geom2d.groemer_rhs(p.n, walk.perim, infl, "pairwise")
            worst = min(worst, area - rhs)
    checks = [ (f"pairwise union-area bound on {grid} random packings (slack >= -1e-9)", worst >= -1e-9, f"min slack {_fmt(worst)}") ]
    worst_eq = 0.0
    for extent in (1, 2, 3):
        p = lattice_patch("hexagonal2d", extent)
        infl = classify_regime(2, 0.05)
        area = geom2d.union_area_exact(p, infl)
        g = intersection_graph(p, 2.0 * infl.lambda_bar)
        walk = geom2d.boundary_walk(g, p)
        rhs = geom2d.groemer_rhs(p.n, walk.perim, infl, "pairwise")
        worst_eq = max(worst_eq, abs(area - rhs))
    checks.append(("equality on hexagonal patches (extent 1-3) within 1e-9", worst_eq <= 1e-9, f"max |gap| {_fmt(worst_eq)}"))
    return checks


def _suite_scans(grid: int, samples: int, seed: int) -> List[Check]:
    checks = []
    for name in ("groemer_boundary", "groemer_interior", "hajos"):
        res = bounds.scan_inequality(name, grid)
        checks.append(
            (f"{name} slack >= -1e-9 on {grid}x{grid} grid", res.min_value >= -1e-9, f"min {_fmt(res.min_value)} at {res.argmin}")
        )
    return checks


def _suite_sigma(grid: int, samples: int, seed: int) -> List[Check]:
    checks = []
    for d, closed in ((2, geom2d.sigma_bar2), (3, geom3d.sigma_bar3)):
        lam = 0.1
        est = simplexnd.sigma_bar_d_mc(d, lam, samples, seed)
        ok = abs(est.value - closed(lam)) <= 3.0 * max(est.stderr, 1e-12)
        checks.append((f"sigma_bar{d}(0.1) closed form within 3 sigma of MC", ok, f"{_fmt(closed(lam))} vs {_fmt(est.value)} +- {_fmt(est.stderr)}"))
    for d in (2, 3, 4):
        est = simplexnd.sigma_d_mc(d, 0.0, samples, seed + d)
        checks.append((f"sigma_{d}(0) = 1", abs(est.value - 1.0) <= 3.0 * max(est.stderr, 1e-12), _fmt(est.value)))
    lam = 0.1
    est = simplexnd.sigma_bar_d_mc(4, lam, samples, seed + 11)
    checks.append(("sigma_bar_4(0.1) < 1 beyond 3 sigma", est.value + 3.0 * est.stderr < 1.0, f"{_fmt(est.value)} +- {_fmt(est.stderr)}"))
    grid_l = np.linspace(0.01, PAIRWISE_LIMIT - 1.0 - 1e-6, 25)
    worst = max(abs(geom3d.sigma3(l) - geom3d.sigma3_rational(l)) for l in grid_l)
    checks.append(("sigma3 closed form matches rational form to 1e-12", worst <= 1e-12, f"max gap {_fmt(worst)}"))
    return checks


def _suite_gram(grid: int, samples: int, seed: int) -> List[Check]:
    worst = max(simplexnd.gram_identity_check(d) for d in range(2, 11))
    return [("orthoscheme Gram identities (d = 2..10) within 1e-12", worst <= 1e-12, f"max deviation {_fmt(worst)}")]


def _suite_covering(grid: int, samples: int, seed: int) -> List[Check]:
    fcc = geom3d.fcc_density_check()
    target = math.pi / math.sqrt(18.0)
    checks = [("fcc density = pi/sqrt(18) within 1e-9", abs(fcc - target) <= 1e-9, _fmt(fcc))]
    mu = geom3d.bcc_covering_radius()
    full = geom3d.bcc_covering_check(mu, samples, seed)
    checks.append((f"bcc covered fraction at lambda_bar = {_fmt(mu)} is 1 within 3 sigma", full.value >= 1.0 - 3.0 * max(full.stderr, 1e-12) - 1e-12, f"{_fmt(full.value)} +- {_fmt(full.stderr)}"))
    partial = geom3d.bcc_covering_check(1.25, samples, seed + 1)
    checks.append(("bcc covered fraction at lambda_bar = 1.25 is < 1 beyond 3 sigma", partial.value + 3.0 * partial.stderr < 1.0, f"{_fmt(partial.value)} +- {_fmt(partial.stderr)}"))
    return checks


_SUITES = {
    "constants": _suite_constants,
    "groemer": _suite_groemer,
    "scans": _suite_scans,
    "sigma": _suite_sigma,
    "gram": _suite_gram,
    "covering": _suite_covering,
}


def cmd_verify(args) -> int:
    if args.suite != "all" and args.suite not in _SUITES:
        print(f"error: unknown suite {args.suite!r}; choose from {sorted(_SUITES)} or 'all'", file=sys.stderr)
        return USAGE_ERROR
    names = sorted(_SUITES) if args.suite == "all" else [args.suite]
    failed = 0
    for name in names:
        for label, ok, info in _SUITES[name](args.grid, args.samples, args.seed):
            tag = "PASS" if ok else "FAIL"
            suffix = f"  [{info}]" if info else ""
            print(f"{tag}  {name}: {label}{suffix}")
            if not ok:
                failed += 1
    return 0 if failed == 0 else VERIFY_ERROR


# ---------------------------------------------------------------------------
# optimize
# ---------------------------------------------------------------------------


def cmd_optimize(args) -> int:
    if args.lam < 0.0 or 1.0 + args.lam >= PAIRWISE_LIMIT:
        print(f"error: optimization needs 0 <= lambda < {PAIRWISE_LIMIT - 1.0:.6f}", file=sys.stderr)
        return USAGE_ERROR
    cfg = OptimizerConfig(
        restarts=args.restarts,
        max_iters=args.max_iters,
        seed=args.seed,
    )
    try:
        res = optimize(args.n, args.dim, args.lam, cfg)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    density = args.n * unit_ball_volume(args.dim) / res.objective
    print(f"objective: {_fmt(res.objective)}")
    print(f"density: {_fmt(density)}")
    print(f"contacts: {res.contact_count}")
    print(f"lambda_edges: {res.lambda_edge_count}")
    print(f"converged: {1 if res.converged else 0}")
    if args.out is not None:
        save_packing_json(res.best, args.out + ".json")
        lines = _metadata_lines(args, args.seed)
        lines.append("iteration,objective")
        lines += [f"{it},{_fmt(obj)}" for it, obj in res.history]
        _write_csv(args.out + ".history.csv", lines)
    return 0


# ---------------------------------------------------------------------------
# lattice
# ---------------------------------------------------------------------------


def cmd_lattice(args) -> int:
    kind, check = args.kind, args.check
    if check == "patch":
        try:
            p = lattice_patch(kind, args.extent)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return USAGE_ERROR
        if args.out is None:
            print(json.dumps({"dim": p.dim, "centers": p.centers.tolist()}))
        else:
            save_packing_json(p, args.out)
        return 0
    if check == "density":
        if kind == "fcc3d":
            value, reference = geom3d.fcc_density_check(), math.pi / math.sqrt(18.0)
        elif kind == "hexagonal2d":
            value, reference = math.pi / (2.0 * math.sqrt(3.0)), math.pi / math.sqrt(12.0)
        elif kind == "square2d":
            value, reference = math.pi / 4.0, math.pi / 4.0
        else:
            print("error: density check supports fcc3d, hexagonal2d, square2d", file=sys.stderr)
            return USAGE_ERROR
        print(f"density: {_fmt(value)}")
        print(f"reference: {_fmt(reference)}")
        print(f"deviation: {_fmt(abs(value - reference))}")
        return 0
    if check == "covering":
        if kind != "bcc3d":
            print("error: covering check supports bcc3d only", file=sys.stderr)
            return USAGE_ERROR
        mu = geom3d.bcc_covering_radius()
        print(f"covering_radius: {_fmt(mu)}")
        print(f"reference: {_fmt(math.sqrt(5.0 / 3.0))}")
        est = geom3d.bcc_covering_check(mu, args.samples, args.seed)
        print(f"covered_fraction_at_radius: {_fmt(est.value)} +- {_fmt(est.stderr)}")
        return 0
    print(f"error: unknown check {check!r}", file=sys.stderr)
    return USAGE_ERROR


def cmd_constants(args) -> int:
    c = bounds.constants()
    payload = {
        "phi0": c.phi0,
        "psi0": c.psi0,
        "lambda_bar_root": c.lambda_bar_root,
        "delta_bar3_bound_at_0": bounds.delta_bar3_bound(0.0),
        "fcc_density": geom3d.fcc_density_check(),
        "bcc_covering_radius": geom3d.bcc_covering_radius(),
        "dodecahedral_cell_fraction_at_0": unit_ball_volume(3) / geom3d.dodecahedron_model().volume,
    }
    if args.json:
        print(json.dumps(payload, indent=1))
    else:
        for key, value in payload.items():
            print(f"{key}: {_fmt(value)}")
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="softpack",
        description="Densities and bounds for inflated unit-ball packings.",
    )
    parser.add_argument("--version", action="version", version=f"softpack {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    seed_default = _default_seed()

    b = sub.add_parser("bounds", help="write a bound table over a lambda grid")
    b.add_argument("--dim", type=int, required=True)
    b.add_argument("--lambda-min", type=float, required=True)
    b.add_argument("--lambda-max", type=float, required=True)
    b.add_argument("--steps", type=int, required=True)
    b.add_argument("--out", default=None)
    b.add_argument("--json", default=None, help="also write the table as JSON")
    b.add_argument("--format", choices=("wide", "long"), default="wide")
    b.add_argument("--mc-samples", type=int, default=None)
    b.add_argument("--seed", type=int, default=seed_default)
    b.set_defaults(func=cmd_bounds)

    dns = sub.add_parser("density", help="density of a packing file at one lambda")
    dns.add_argument("--packing", required=True)
    dns.add_argument("--lambda", dest="lam", type=float, required=True)
    dns.add_argument("--mc", nargs=2, type=int, default=None, metavar=("SAMPLES", "SEED"))
    dns.add_argument("--boundary-out", default=None)
    dns.add_argument("--seed", type=int, default=seed_default)
    dns.set_defaults(func=cmd_density)

    v = sub.add_parser("verify", help="run a named verification suite")
    v.add_argument("--suite", required=True)
    v.add_argument("--grid", type=int, default=100)
    v.add_argument("--samples", type=int, default=1_000_000)
    v.add_argument("--seed", type=int, default=seed_default)
    v.set_defaults(func=cmd_verify)

    o = sub.add_parser("optimize", help="search for a minimal inflated union")
    o.add_argument("--n", type=int, required=True)
    o.add_argument("--dim", type=int, required=True)
    o.add_argument("--lambda", dest="lam", type=float, required=True)
    o.add_argument("--restarts", type=int, default=8)
    o.add_argument("--max-iters", type=int, default=250)
    o.add_argument("--seed", type=int, default=seed_default)
    o.add_argument("--out", default=None, help="prefix for packing JSON and history CSV")
    o.set_defaults(func=cmd_optimize)

    lat = sub.add_parser("lattice", help="lattice patches and constants")
    lat.add_argument("--kind", required=True, choices=("hexagonal2d", "square2d", "fcc3d", "bcc3d"))
    lat.add_argument("--check", required=True, choices=("density", "covering", "patch"))
    lat.add_argument("--extent", type=int, default=1)
    lat.add_argument("--samples", type=int, default=1_000_000)
    lat.add_argument("--seed", type=int, default=seed_default)
    lat.add_argument("--out", default=None)
    lat.set_defaults(func=cmd_lattice)

    c = sub.add_parser("constants", help="print the named constants")
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_constants)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
