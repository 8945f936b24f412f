"""
Deterministic random substreams.

Every random draw in the package comes from :func:`substream`, which keys a
PCG64 generator by ``SeedSequence([seed, *keys])``. Distinct key tuples give
statistically independent streams, so replicates and Monte Carlo simulations
can run in any order or on any number of threads and still reproduce exactly.
"""
import numpy as np

# stream tags keep replicate draws and envelope simulations disjoint
REPLICATE_STREAM = 0
ENVELOPE_STREAM = 1


def substream(seed: int, *keys: int) -> np.random.Generator:
    entropy = [int(seed)] + [int(k) for k in keys]
    if any(e < 0 for e in entropy):
        raise ValueError("seeds and stream keys must be non-negative integers")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


def as_generator(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return substream(seed)
