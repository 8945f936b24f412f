"""
Simulation harness: scenario matrices, replicate loops, rejection rates, and
CSV / text tables laid out like the ANN and Ripley's K results tables.

A scenario is one (structure, DGM, sample size, method) cell. Replicate ``r``
draws its units from ``substream(base_seed, REPLICATE_STREAM, r)``; the Ripley
envelope for a cell comes from a seed derived with ``ENVELOPE_STREAM`` and is
built once and reused for every replicate (the null distribution of K-hat
depends only on the point count, region and radii).
"""
from __future__ import annotations

import csv
import io
import itertools
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
import yaml

from .ann import Tail, WindowChoice, ann_test
from .areal import ArealStructure, parse_structure_ref
from .dgm import ClusterRegionSpec, SampleSizeRule, draw_units, sample_size
from .errors import RenderError, ReplicateError
from .ripley import RadiusGrid, decide_k, k_hat, mc_envelope, radius_grid
from .rng import ENVELOPE_STREAM, REPLICATE_STREAM, substream

DASH = "\u2014"  # missing table cell


@dataclass(frozen=True)
class Scenario:
    structure: str
    dgm: str
    size: str  # "tenth", "quarter", or an explicit integer as text
    method: str  # "ann" or "ripley"
    window: str = "study"
    tail: str | None = None
    replicates: int = 500
    base_seed: int = 0
    n_sim: int = 1000
    cluster: ClusterRegionSpec | None = None
    label: str | None = None
    normalization: str = "n2"
    radii: tuple | None = None

    def __post_init__(self):
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if self.method not in ("ann", "ripley"):
            raise ValueError(f"method must be 'ann' or 'ripley', got {self.method!r}")
        if self.dgm not in ("d1", "d2", "d3"):
            raise ValueError(f"unknown DGM {self.dgm!r}")
        if self.method == "ann":
            WindowChoice(self.window)

    @property
    def structure_label(self) -> str:
        return self.label or self.structure

    @property
    def resolved_tail(self) -> Tail:
        if self.tail is not None:
            return Tail(self.tail)
        if self.dgm == "d1":
            return Tail.TWO
        return Tail.LEFT if self.method == "ann" else Tail.RIGHT

    @property
    def key(self) -> tuple:
        window = self.window if self.method == "ann" else ""
        return (self.structure_label, self.dgm, self.method, window, self.size)

    def sample_n(self, n_a: int) -> int:
        try:
            return sample_size(n_a, SampleSizeRule(self.size))
        except ValueError:
            return int(self.size)


@dataclass(frozen=True, eq=False)
class SimulationReport:
    scenario: Scenario
    n: int
    rejections: np.ndarray  # one entry for ANN, one per radius for Ripley
    replicates: int
    radii: tuple | None = None
    envelope_seed: int | None = None
    wall_time: float = field(default=0.0, compare=False)

    @property
    def rates(self) -> np.ndarray:
        return np.array([empirical_rate(int(k), self.replicates) for k in self.rejections])

    @property
    def rate(self) -> float:
        return float(self.rates[0])


def empirical_rate(rejections: int, replicates: int) -> float:
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    if not 0 <= rejections <= replicates:
        raise ValueError(f"rejections {rejections} outside [0, {replicates}]")
    return rejections / replicates


def envelope_seed(base_seed: int, n: int) -> int:
    ss = np.random.SeedSequence([int(base_seed), ENVELOPE_STREAM, int(n)])
    return int(ss.generate_state(1, dtype=np.uint32)[0])


class _Cache:
    """Structures and envelopes shared across the scenarios of one matrix."""

    def __init__(self, base_dir: Path | None = None):
        self.base_dir = base_dir
        self.structures: dict = {}
        self.envelopes: dict = {}

    def structure(self, ref: str) -> ArealStructure:
        if ref not in self.structures:
            self.structures[ref] = parse_structure_ref(ref, self.base_dir)
        return self.structures[ref]

    def envelope(self, s: Scenario, structure, n, radii, threads):
        seed = envelope_seed(s.base_seed, n)
        key = (s.structure, n, radii.radii, s.n_sim, s.normalization, seed)
        if key not in self.envelopes:
            self.envelopes[key] = mc_envelope(
                n, structure.region, radii, s.n_sim, seed, s.normalization, threads=threads
            )
        return self.envelopes[key]


def _map(fn, items, threads):
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(i) for i in items]


def run_scenario(s: Scenario, threads: int = 1, cache: _Cache | None = None) -> SimulationReport:
    cache = cache or _Cache()
    t0 = time.perf_counter()
    structure = cache.structure(s.structure)
    n = s.sample_n(structure.n_a)
    tail = s.resolved_tail
    env = radii = env_seed = None
    if s.method == "ripley":
        radii = RadiusGrid(s.radii) if s.radii else radius_grid(structure)
        env = cache.envelope(s, structure, n, radii, threads)
        env_seed = int(env.seed)

    def replicate(r):
        try:
            draw = draw_units(structure, s.dgm, n, substream(s.base_seed, REPLICATE_STREAM, r), s.cluster)
            pts = structure.centroids(draw.observed_ids)
            if s.method == "ann":
                return np.array([ann_test(pts, structure.region, s.window, tail).reject])
            est = k_hat(pts, structure.region, radii, s.normalization)
            return decide_k(est.khat, env, tail)
        except Exception as exc:
            raise ReplicateError(r, exc) from exc

    outcomes = _map(replicate, range(s.replicates), threads)
    rejections = np.sum(np.vstack(outcomes), axis=0).astype(np.int64)
    return SimulationReport(
        s,
        n,
        rejections,
        s.replicates,
        radii.radii if radii is not None else None,
        env_seed,
        time.perf_counter() - t0,
    )


def run_matrix(scenarios, threads: int = 1, base_dir: Path | None = None) -> list:
    cache = _Cache(base_dir)
    return [run_scenario(s, threads, cache) for s in scenarios]


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


def _cluster_from_config(spec: dict, structure_ref: str, base_dir: Path | None) -> ClusterRegionSpec:
    ratio = float(spec.get("weight_ratio", 10.0))
    if "ids" in spec:
        return ClusterRegionSpec(spec["ids"], ratio)
    if "block" in spec:
        rows = range(*spec["block"]["rows"])
        cols = range(*spec["block"]["cols"])
        return ClusterRegionSpec.grid_block(rows, cols, ratio)
    if "file" in spec:
        path = Path(spec["file"])
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        ids = yaml.safe_load(path.read_text(encoding="utf-8"))
        if isinstance(ids, dict):
            ids = ids["ids"]
        return ClusterRegionSpec(ids, ratio)
    raise ValueError(f"cluster spec for {structure_ref} needs 'ids', 'block' or 'file'")


def _method_fields(method: str) -> dict:
    name, _, window = method.partition(":")
    if name == "ann":
        return {"method": "ann", "window": window or "study"}
    if name == "ripley":
        return {"method": "ripley"}
    raise ValueError(f"unknown method {method!r}")


def load_config(path, seed: int | None = None) -> tuple:
    """Parse a scenario-matrix YAML file; returns (scenarios, base_dir)."""
    path = Path(path)
    doc = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
    return scenarios_from_config(doc, path.parent, seed), path.parent


def scenarios_from_config(doc: dict, base_dir: Path | None = None, seed: int | None = None) -> list:
    defaults = dict(doc.get("defaults") or {})
    structures = doc.get("structures") or {}
    clusters = doc.get("clusters") or {}

    def build(entry: dict) -> Scenario:
        e = {**defaults, **entry}
        sname = e.pop("structure")
        sdef = structures.get(sname, {"ref": sname})
        ref = sdef["ref"]
        fields = _method_fields(str(e.pop("method")))
        if "window" in e and fields["method"] == "ann":
            fields["window"] = e.pop("window")
        e.pop("window", None)
        cluster = None
        if e.get("dgm") == "d2":
            cdef = clusters.get(sname)
            if cdef is None:
                raise ValueError(f"d2 scenario on {sname!r} needs a clusters.{sname} entry")
            cluster = _cluster_from_config(cdef, ref, base_dir)
        radii = e.pop("radii", None)
        return Scenario(
            structure=ref,
            dgm=str(e.pop("dgm")),
            size=str(e.pop("size")),
            tail=e.pop("tail", None),
            replicates=int(e.pop("replicates", 500)),
            base_seed=int(seed if seed is not None else e.pop("base_seed", 0)),
            n_sim=int(e.pop("n_sim", 1000)),
            cluster=cluster,
            label=sdef.get("label", sname),
            normalization=e.pop("normalization", "n2"),
            radii=tuple(radii) if radii else None,
            **fields,
        )

    entries = list(doc.get("scenarios") or [])
    matrix = doc.get("matrix")
    if matrix:
        keys = ["structure", "dgm", "size", "method"]
        for combo in itertools.product(*(matrix[k] for k in keys)):
            entries.append(dict(zip(keys, combo)))
    if not entries:
        raise ValueError("configuration declares no scenarios")
    return [build(dict(e)) for e in entries]


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------

CSV_COLUMNS = (
    "structure",
    "dgm",
    "method",
    "window",
    "tail",
    "size_rule",
    "N",
    "radius_index",
    "radius",
    "rejections",
    "replicates",
    "rate",
)


def fmt(x: float) -> str:
    return f"{x:.6g}"


def _check_keys(reports):
    seen = set()
    for rep in reports:
        if rep.scenario.key in seen:
            raise RenderError(f"duplicate scenario {rep.scenario.key}")
        seen.add(rep.scenario.key)


def render_csv(reports) -> str:
    _check_keys(reports)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rep in reports:
        s = rep.scenario
        window = s.window if s.method == "ann" else ""
        base = [s.structure_label, s.dgm, s.method, window, s.resolved_tail.value, s.size, rep.n]
        if s.method == "ann":
            writer.writerow(base + ["", "", int(rep.rejections[0]), rep.replicates, fmt(rep.rate)])
        else:
            for k, (t, rej, rate) in enumerate(zip(rep.radii, rep.rejections, rep.rates), start=1):
                writer.writerow(base + [k, fmt(t), int(rej), rep.replicates, fmt(rate)])
    return buf.getvalue()


def parse_csv(text: str) -> list:
    """Read rows written by :func:`render_csv`; rates come back exactly."""
    rows = []
    for row in csv.DictReader(io.StringIO(text)):
        rej = int(row["rejections"])
        reps = int(row["replicates"])
        rate = empirical_rate(rej, reps)
        if fmt(rate) != row["rate"]:
            raise ValueError(f"rate column {row['rate']} disagrees with {rej}/{reps}")
        row.update(rejections=rej, replicates=reps, rate=rate, N=int(row["N"]))
        rows.append(row)
    return rows


_DGM_TITLES = {
    "d1": ("H0: CSR: D1", "Empirical type I error"),
    "d2": ("Ha: Single cluster: D2", "Empirical power"),
    "d3": ("Ha: Multiple clusters: D3", "Empirical power"),
}
_SIZE_TITLES = {"tenth": "floor(n_a/10)", "quarter": "floor(n_a/4)"}


def _align(rows) -> str:
    widths = [max(len(str(r[c])) for r in rows) for c in range(len(rows[0]))]
    return "\n".join("  ".join(str(v).ljust(w) for v, w in zip(r, widths)).rstrip() for r in rows)


def render_text(reports) -> str:
    _check_keys(reports)
    out = []
    ann = [r for r in reports if r.scenario.method == "ann"]
    rip = [r for r in reports if r.scenario.method == "ripley"]
    sizes = [sz for sz in _SIZE_TITLES] + sorted(
        {r.scenario.size for r in reports} - set(_SIZE_TITLES)
    )
    if ann:
        labels = list(dict.fromkeys(r.scenario.structure_label for r in ann))
        cell = {r.scenario.key: fmt(r.rate) for r in ann}
        rows = [["DGM", "Quantity", "N"] + labels]
        for window, title in (("study", "Window 1"), ("bbox", "Window 2")):
            rows.append([title] + [""] * (2 + len(labels)))
            for dgm in ("d1", "d2", "d3"):
                for k, size in enumerate(sizes):
                    if not any(r.scenario.size == size for r in ann):
                        continue
                    head = list(_DGM_TITLES[dgm]) if k == 0 else ["", ""]
                    vals = [cell.get((lab, dgm, "ann", window, size), DASH) for lab in labels]
                    rows.append(head + [_SIZE_TITLES.get(size, size)] + vals)
        out.append("Average nearest neighbour ratio: empirical type I error / power\n" + _align(rows))
    if rip:
        labels = list(dict.fromkeys(r.scenario.structure_label for r in rip))
        used = [sz for sz in sizes if any(r.scenario.size == sz for r in rip)]
        nrad = max(len(r.radii) for r in rip)
        by_key = {r.scenario.key: r for r in rip}
        header = ["Radius"] + [f"R{k + 1}" if j == 0 else "" for k in range(nrad) for j in range(len(used))]
        sub = ["N"] + [_SIZE_TITLES.get(sz, sz) for _ in range(nrad) for sz in used]
        rows = [header, sub]
        for lab in labels:
            rows.append([lab] + [""] * (nrad * len(used)))
            for dgm in ("d1", "d2", "d3"):
                vals = []
                for k in range(nrad):
                    for sz in used:
                        rep = by_key.get((lab, dgm, "ripley", "", sz))
                        vals.append(fmt(rep.rates[k]) if rep is not None and k < len(rep.rates) else DASH)
                rows.append([_DGM_TITLES[dgm][0]] + vals)
        out.append("Ripley's K: empirical type I error / power per radius\n" + _align(rows))
    return "\n\n".join(out) + "\n"


def render_tables(reports) -> tuple:
    """Return ``(csv_text, text_table)`` for a list of reports."""
    return render_csv(reports), render_text(reports)


def with_seed(scenarios, seed: int) -> list:
    return [replace(s, base_seed=seed) for s in scenarios]
