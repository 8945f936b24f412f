"""
Data-generation mechanisms that pick which areal units are observed.

* ``d1`` - uniform sampling without replacement (the null).
* ``d2`` - one cluster region whose units are ``weight_ratio`` times more
  likely to be picked, via successive weighted sampling without replacement.
* ``d3`` - repeated seed-plus-neighbours clusters until ``N`` units are
  observed.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .areal import ArealStructure
from .errors import DomainError, InsufficientSampleError
from .rng import as_generator


class SampleSizeRule(str, enum.Enum):
    TENTH = "tenth"
    QUARTER = "quarter"

    @property
    def divisor(self) -> int:
        return 10 if self is SampleSizeRule.TENTH else 4


def sample_size(n_a: int, rule: SampleSizeRule | str) -> int:
    n = int(n_a) // SampleSizeRule(rule).divisor
    if n < 2:
        raise InsufficientSampleError(f"{rule} of {n_a} units gives N = {n}; both tests need N >= 2")
    return n


@dataclass(frozen=True)
class ClusterRegionSpec:
    member_ids: frozenset
    weight_ratio: float = 10.0

    def __init__(self, member_ids: Iterable[str], weight_ratio: float = 10.0):
        members = frozenset(member_ids)
        if not members:
            raise ValueError("cluster region needs at least one member")
        if not weight_ratio >= 1:
            raise ValueError("weight_ratio must be >= 1")
        object.__setattr__(self, "member_ids", members)
        object.__setattr__(self, "weight_ratio", float(weight_ratio))

    @classmethod
    def grid_block(cls, rows: range, cols: range, weight_ratio: float = 10.0) -> "ClusterRegionSpec":
        return cls((f"r{i}c{j}" for i in rows for j in cols), weight_ratio)


@dataclass(frozen=True)
class Draw:
    observed_ids: tuple
    seed: object


def _check_n(structure: ArealStructure, n: int):
    if n < 1:
        raise InsufficientSampleError(f"N = {n}; need at least 1 observed unit")
    if n > structure.n_a:
        raise DomainError(f"N = {n} exceeds the {structure.n_a} available units")


def sample_d1(structure: ArealStructure, n: int, seed) -> Draw:
    _check_n(structure, n)
    rng = as_generator(seed)
    idx = rng.choice(structure.n_a, size=n, replace=False)
    ids = structure.ids
    return Draw(tuple(ids[k] for k in idx), seed)


def sample_d2(structure: ArealStructure, n: int, region: ClusterRegionSpec, seed) -> Draw:
    _check_n(structure, n)
    ids = structure.ids
    missing = region.member_ids.difference(ids)
    if missing:
        raise ValueError(f"cluster members not in structure: {sorted(missing)[:5]}")
    rng = as_generator(seed)
    weights = np.array([region.weight_ratio if i in region.member_ids else 1.0 for i in ids])
    picked = []
    for _ in range(n):
        cum = np.cumsum(weights)
        k = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
        k = min(k, len(ids) - 1)
        while weights[k] == 0.0:  # guards the u * total == cum[-1] float edge
            k -= 1
        picked.append(ids[k])
        weights[k] = 0.0
    return Draw(tuple(picked), seed)


def sample_d3(structure: ArealStructure, n: int, seed) -> Draw:
    _check_n(structure, n)
    rng = as_generator(seed)
    ids = structure.ids
    observed = []
    seen = set()
    while len(observed) < n:
        remaining = [i for i in ids if i not in seen]
        centre = remaining[int(rng.integers(len(remaining)))]
        batch = [centre] + sorted(u for u in structure.adjacency[centre] if u not in seen)
        for u in batch:
            if len(observed) == n:
                break
            observed.append(u)
            seen.add(u)
    return Draw(tuple(observed), seed)


def draw_units(structure: ArealStructure, dgm: str, n: int, seed, cluster: ClusterRegionSpec | None = None) -> Draw:
    dgm = dgm.lower()
    if dgm == "d1":
        return sample_d1(structure, n, seed)
    if dgm == "d2":
        if cluster is None:
            raise ValueError("d2 needs a cluster region")
        return sample_d2(structure, n, cluster, seed)
    if dgm == "d3":
        return sample_d3(structure, n, seed)
    raise ValueError(f"unknown DGM {dgm!r}")
