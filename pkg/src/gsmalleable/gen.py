"""Seeded random instances.

Small profiles (at most 5 machines, 4 jobs by default) feed the brute-force
comparisons.  The ``wide-*`` profiles have many slow machines, which is what
it takes for the cheap-set and split rounding steps to receive any jobs at all.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .core import (Instance, LinearSpeed, MatroidBasedValuation, PartitionMatroid, UniformMatroid,
                   WeightedMatroidRank)

PROFILES = ("linear", "wmr-uniform", "wmr-partition", "mbv", "mixed")
WIDE_PROFILES = ("wide-j2", "wide-j3")
DENOMS = (1, 2, 3, 4, 8, 16)


def _rat(rng: random.Random, lo: int = 1, hi: int = 16) -> Fraction:
    d = rng.choice(DENOMS)
    return Fraction(rng.randint(lo * d, hi * d) if lo else rng.randint(0, hi * d), d) / 4


def _weights(rng, m, zero_p=0.2) -> tuple:
    w = [Fraction(0) if rng.random() < zero_p else _rat(rng) for _ in range(m)]
    if not any(w):
        w[rng.randrange(m)] = _rat(rng)
    return tuple(w)


def _partition(rng, m) -> PartitionMatroid:
    labels = [rng.randrange(max(1, m // 2 + 1)) for _ in range(m)]
    blocks, caps = [], []
    for lab in sorted(set(labels)):
        b = 0
        for i, x in enumerate(labels):
            if x == lab:
                b |= 1 << i
        blocks.append(b)
        caps.append(rng.randint(1, bin(b).count("1")))
    return PartitionMatroid(m, tuple(blocks), tuple(caps))


def random_speed(rng: random.Random, profile: str, m: int):
    if profile == "mixed":
        profile = rng.choice(PROFILES[:-1])
    if profile == "linear":
        return LinearSpeed(_weights(rng, m))
    if profile == "wmr-uniform":
        return WeightedMatroidRank(UniformMatroid(m, rng.randint(1, m)), _weights(rng, m))
    if profile == "wmr-partition":
        return WeightedMatroidRank(_partition(rng, m), _weights(rng, m))
    if profile == "mbv":
        k = rng.randint(1, 3)
        slots = UniformMatroid(k, rng.randint(1, k)) if rng.random() < 0.5 else _partition(rng, k)
        while True:
            w = tuple(tuple(Fraction(0) if rng.random() < 0.3 else _rat(rng) for _ in range(k)) for _ in range(m))
            fn = MatroidBasedValuation(slots, w)
            if fn((1 << m) - 1) > 0:
                return fn
    raise ValueError(f"unknown profile {profile!r}")


def generate(seed: int, profile: str, m: int | None = None, n: int | None = None) -> Instance:
    """Deterministic instance for ``(seed, profile)``."""
    if profile in WIDE_PROFILES:
        return generate_wide(seed, profile, m)
    if profile not in PROFILES:
        raise ValueError(f"unknown profile {profile!r}; choose from {PROFILES + WIDE_PROFILES}")
    rng = random.Random(f"{profile}:{seed}")
    m = rng.randint(1, 5) if m is None else m
    n = rng.randint(1, 4) if n is None else n
    jobs = [(f"j{k}", random_speed(rng, profile, m)) for k in range(n)]
    return Instance.build([f"m{i}" for i in range(m)], jobs)


def generate_wide(seed: int, profile: str, m: int | None = None) -> Instance:
    """Many slow machines next to an anchor job.

    The anchor job runs only on machine ``m0`` at speed 1, which pins the
    optimum near 1.  Each other job owns a block of machines of speed just
    below 1/16 each.  In ``wide-j2`` a block of about 20 machines gives the
    job barely enough total speed; in ``wide-j3`` a block of about 60 gives
    it far more than it needs, so its LP sets are expensive.
    """
    rng = random.Random(f"{profile}:{seed}")
    if profile == "wide-j2":
        n = rng.randint(1, 2)
        sizes = [rng.randint(20, 24) for _ in range(n)]
        lo, hi = 16, 19
    else:
        n = 1
        sizes = [rng.randint(57, 63) if m is None else m - 1]
        lo, hi = 15, 16
    m = 1 + sum(sizes)
    jobs = [("anchor", LinearSpeed(tuple(Fraction(int(i == 0)) for i in range(m))))]
    start = 1
    for k, size in enumerate(sizes):
        block = range(start, start + size)
        w = tuple(Fraction(rng.randint(lo, hi), 320) if i in block else Fraction(0) for i in range(m))
        if rng.random() < 0.5:
            jobs.append((f"j{k}", LinearSpeed(w)))
        else:
            jobs.append((f"j{k}", WeightedMatroidRank(UniformMatroid(m, size - rng.randint(0, 2)), w)))
        start += size
    return Instance.build([f"m{i}" for i in range(m)], jobs, check_threshold=0)


def generate_mmfa(seed: int, profile: str = "mixed", n_items: int | None = None, n_agents: int | None = None):
    from .mmfa import MmfaInstance
    rng = random.Random(f"mmfa:{profile}:{seed}")
    k = rng.randint(1, 5) if n_items is None else n_items
    a = rng.randint(1, 3) if n_agents is None else n_agents
    return MmfaInstance.build([f"i{t}" for t in range(k)],
                              [(f"a{t}", random_speed(rng, profile, k)) for t in range(a)])
