"""Command-line entry point: ``arealstats {simulate,ann,kest,gen,theory}``.

Exit codes: 0 success, 2 invalid input, 3 internal invariant violation.
"""
from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from pathlib import Path

import numpy as np

from . import _kernels
from .ann import ann_test
from .areal import load_structure, parse_structure_ref
from .dgm import ClusterRegionSpec, SampleSizeRule, draw_units, sample_size
from .errors import ArealStatsError, ContractViolationError, ReplicateError
from .geometry import Region
from .harness import fmt, load_config, render_tables, run_matrix, with_seed
from .ripley import RadiusGrid, k_test, mc_envelope, radius_grid
from .theory import divergence_table

log = logging.getLogger("arealstats")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INTERNAL = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def read_points(path: str) -> np.ndarray:
    text = Path(path).read_text(encoding="utf-8")
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    if rows and not _is_number(rows[0][0]):
        header = [c.strip().lower() for c in rows[0]]
        ix, iy = header.index("x"), header.index("y")
        rows = [[r[ix], r[iy]] for r in rows[1:]]
    return np.array([[float(r[0]), float(r[1])] for r in rows], dtype=float).reshape(-1, 2)


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def parse_region(spec: str) -> Region:
    if spec.startswith("rect:"):
        vals = [float(v) for v in spec[5:].split(",")]
        if len(vals) != 4:
            raise ValueError("rect region must be rect:x0,y0,x1,y1")
        return Region.from_rect(vals)
    return load_structure(spec).region


def _write_csv(rows, out=None):
    out = out or sys.stdout
    w = csv.writer(out, lineterminator="\n")
    for r in rows:
        w.writerow([fmt(v) if isinstance(v, float) else v for v in r])


def cmd_simulate(args) -> int:
    scenarios, base_dir = load_config(args.config)
    if args.seed is not None:
        scenarios = with_seed(scenarios, args.seed)
    reports = run_matrix(scenarios, threads=args.threads, base_dir=base_dir)
    csv_text, table = render_tables(reports)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "results.csv").write_text(csv_text, encoding="utf-8")
    (out / "tables.txt").write_text(table, encoding="utf-8")
    sys.stdout.write(table)
    for rep in reports:
        log.info("%s: %.2fs", rep.scenario.key, rep.wall_time)
    return EXIT_OK


def cmd_ann(args) -> int:
    res = ann_test(read_points(args.points), parse_region(args.region), args.window, args.tail)
    _write_csv(
        [
            ["n", "area", "rho", "r_bar_o", "r_bar_e", "ratio", "sigma", "z", "tail", "reject"],
            [res.n, res.area, res.rho, res.r_bar_o, res.r_bar_e, res.ratio, res.sigma, res.z, res.tail.value, res.reject],
        ]
    )
    return EXIT_OK


def cmd_kest(args) -> int:
    pts = read_points(args.points)
    region = parse_region(args.region)
    if args.radii.startswith("auto:"):
        radii = radius_grid(parse_structure_ref(args.radii[5:]))
    else:
        radii = RadiusGrid(tuple(float(v) for v in args.radii.split(",")))
    env = mc_envelope(len(pts), region, radii, args.nsim, args.seed, threads=args.threads)
    res = k_test(pts, region, env, args.tail)
    rows = [["radius", "khat", "lhat", "q025", "q05", "q95", "q975", "reject"]]
    for k, t in enumerate(radii.radii):
        rows.append(
            [
                float(t),
                float(res.estimate.khat[k]),
                float(res.estimate.lhat[k]),
                *(float(env.q(q)[k]) for q in (0.025, 0.05, 0.95, 0.975)),
                bool(res.reject[k]),
            ]
        )
    _write_csv(rows)
    return EXIT_OK


def cmd_gen(args) -> int:
    structure = parse_structure_ref(args.structure)
    n = int(args.n) if args.n.isdigit() else sample_size(structure.n_a, SampleSizeRule(args.n))
    cluster = None
    if args.dgm == "d2":
        if not args.cluster:
            raise ValueError("--dgm d2 needs --cluster id1,id2,...")
        cluster = ClusterRegionSpec(args.cluster.split(","), args.weight_ratio)
    draw = draw_units(structure, args.dgm, n, args.seed, cluster)
    xy = structure.centroids(draw.observed_ids)
    _write_csv([["id", "x", "y"]] + [[i, float(x), float(y)] for i, (x, y) in zip(draw.observed_ids, xy)])
    return EXIT_OK


def cmd_theory(args) -> int:
    rows = [["t", "n_of_t", "k_csr", "error", "abs_error_over_sqrt_t"]]
    for r in divergence_table(args.tmax, args.step):
        rows.append([r.t, r.n_of_t, r.k_csr, r.error, r.scaled_error])
    _write_csv(rows)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="arealstats", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("simulate", help="run a scenario matrix and write CSV + text tables")
    s.add_argument("--config", required=True)
    s.add_argument("--out", default="results")
    s.add_argument("--threads", type=int, default=1)
    s.add_argument("--seed", type=int)
    s.set_defaults(func=cmd_simulate)

    a = sub.add_parser("ann", help="one-shot nearest neighbour ratio test")
    a.add_argument("--points", required=True)
    a.add_argument("--region", required=True, help="GeoJSON path or rect:x0,y0,x1,y1")
    a.add_argument("--window", choices=["study", "bbox"], default="study")
    a.add_argument("--tail", choices=["two", "left", "right"], default="two")
    a.set_defaults(func=cmd_ann)

    k = sub.add_parser("kest", help="one-shot Ripley's K test against a Monte Carlo envelope")
    k.add_argument("--points", required=True)
    k.add_argument("--region", required=True)
    k.add_argument("--radii", required=True, help="t1,..,t5 or auto:<grid:R,C,S|file:path>")
    k.add_argument("--nsim", type=int, default=1000)
    k.add_argument("--tail", choices=["two", "right"], default="two")
    k.add_argument("--seed", type=int, default=0)
    k.add_argument("--threads", type=int, default=1)
    k.set_defaults(func=cmd_kest)

    g = sub.add_parser("gen", help="draw observed units and print their centroids")
    g.add_argument("--structure", required=True, help="grid:R,C,S or file:path")
    g.add_argument("--dgm", choices=["d1", "d2", "d3"], required=True)
    g.add_argument("--n", required=True, help="integer, 'tenth' or 'quarter'")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--cluster", help="comma-separated unit ids of the d2 cluster region")
    g.add_argument("--weight-ratio", type=float, default=10.0)
    g.set_defaults(func=cmd_gen)

    t = sub.add_parser("theory", help="lattice count N(t) versus pi t^2")
    t.add_argument("--tmax", type=float, required=True)
    t.add_argument("--step", type=float, required=True)
    t.set_defaults(func=cmd_theory)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    log.debug("kernel backend: %s", _kernels.BACKEND)
    try:
        return args.func(args)
    except (AssertionError, ContractViolationError) as exc:
        print(f"internal invariant violation: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except ReplicateError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INPUT if isinstance(exc.cause, (ValueError, OSError)) else EXIT_INTERNAL
    except (ArealStatsError, ValueError, OSError, KeyError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
