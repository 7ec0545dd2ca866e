"""Exact-arithmetic data model: rationals, matroids, speed functions, instances.

Machine sets are plain ``int`` bitmasks throughout the package: machine with
index ``i`` (its position in ``Instance.machines``) is bit ``1 << i``.  Using
input order as the index gives deterministic tie-breaking everywhere.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

logger = logging.getLogger(__name__)

Rat = Fraction

#: explicit_table speed functions are only accepted up to this ground-set size
EXPLICIT_TABLE_MAX = 16
#: brute-force evaluation limit for matroid-based valuations (number of slots)
MBV_SLOT_LIMIT = 10
#: exhaustive monotonicity / axiom validation runs up to this ground-set size
CHECK_THRESHOLD = 8


class GsError(Exception):
    """Base class for all package errors."""


class ValidationError(GsError, ValueError):
    """Malformed or unsupported input."""


class InvariantViolation(GsError):
    """A proven guarantee failed to hold; always indicates a bug."""


def ensure(cond: bool, msg: str) -> None:
    if not cond:
        raise InvariantViolation(msg)


# ---------------------------------------------------------------------------
# rationals and bitmasks


def rat(value) -> Fraction:
    """Parse an exact rational from an int, a Fraction, or a ``"p/q"`` string.

    Floats and booleans are rejected on purpose: they cannot be represented
    exactly and would silently poison the exact pipeline.
    """
    if isinstance(value, bool):
        raise ValidationError(f"boolean is not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        s = value.strip()
        try:
            if "/" in s:
                p, q = s.split("/")
                q = int(q)
                if q == 0:
                    raise ValidationError(f"zero denominator in {value!r}")
                return Fraction(int(p), q)
            return Fraction(int(s))
        except ValueError:
            raise ValidationError(f"not a rational: {value!r}") from None
    raise ValidationError(f"not a rational: {value!r} (use an integer or a 'p/q' string)")


def rat_str(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def bits(mask: int) -> list[int]:
    """Indices of the set bits of ``mask`` in increasing order."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def subsets(mask: int):
    """All submasks of ``mask`` in increasing numeric order (including 0)."""
    sub = 0
    yield 0
    while True:
        sub = (sub - mask) & mask
        if sub == 0:
            return
        yield sub


# ---------------------------------------------------------------------------
# matroids


class Matroid:
    """Independence oracle over a ground set ``range(size)``."""

    kind = "abstract"
    size: int

    def is_independent(self, mask: int) -> bool:
        raise NotImplementedError

    def max_weight_independent(self, mask: int, weights: Sequence[Fraction]) -> int:
        """Greedy max-weight independent subset of ``mask`` (exact for matroids)."""
        order = sorted(bits(mask), key=lambda i: (-weights[i], i))
        chosen = 0
        for i in order:
            if weights[i] <= 0:
                break
            if self.is_independent(chosen | (1 << i)):
                chosen |= 1 << i
        return chosen

    def validate(self) -> None:
        pass


@dataclass(frozen=True)
class FreeMatroid(Matroid):
    size: int
    kind = "free"

    def is_independent(self, mask: int) -> bool:
        return True


@dataclass(frozen=True)
class UniformMatroid(Matroid):
    size: int
    rank: int
    kind = "uniform"

    def is_independent(self, mask: int) -> bool:
        return popcount(mask) <= self.rank

    def validate(self) -> None:
        if not 0 <= self.rank <= self.size:
            raise ValidationError(f"uniform matroid rank {self.rank} outside [0, {self.size}]")


@dataclass(frozen=True)
class PartitionMatroid(Matroid):
    size: int
    blocks: tuple[int, ...]
    capacities: tuple[int, ...]
    kind = "partition"

    def is_independent(self, mask: int) -> bool:
        return all(popcount(mask & b) <= c for b, c in zip(self.blocks, self.capacities))

    def validate(self) -> None:
        if len(self.blocks) != len(self.capacities):
            raise ValidationError("partition matroid needs one capacity per block")
        seen = 0
        for b, c in zip(self.blocks, self.capacities):
            if b & seen:
                raise ValidationError("partition matroid blocks overlap")
            if c < 0:
                raise ValidationError("partition matroid capacity must be nonnegative")
            seen |= b
        if seen != (1 << self.size) - 1:
            raise ValidationError("partition matroid blocks do not cover the ground set")


@dataclass(frozen=True)
class ExplicitMatroid(Matroid):
    size: int
    bases: tuple[int, ...]
    kind = "explicit"

    def is_independent(self, mask: int) -> bool:
        return any(mask & b == mask for b in self.bases)

    def validate(self) -> None:
        if not self.bases:
            raise ValidationError("explicit matroid needs at least one basis")
        full = (1 << self.size) - 1
        sizes = {popcount(b) for b in self.bases}
        if len(sizes) != 1:
            raise ValidationError("explicit matroid bases differ in cardinality")
        if any(b & ~full for b in self.bases):
            raise ValidationError("explicit matroid basis outside the ground set")
        witness = basis_exchange_violation(self.bases)
        if witness is not None:
            b1, b2, x = witness
            raise ValidationError(
                f"explicit bases violate basis exchange: B1={bits(b1)}, B2={bits(b2)}, x={x}")


def basis_exchange_violation(bases: Iterable[int]):
    """First ``(B1, B2, x)`` with no ``y`` such that ``B1 - x + y`` is a basis."""
    family = sorted(set(bases))
    fset = set(family)
    for b1 in family:
        for b2 in family:
            for x in bits(b1 & ~b2):
                if not any((b1 & ~(1 << x)) | (1 << y) in fset for y in bits(b2 & ~b1)):
                    return b1, b2, x
    return None


# ---------------------------------------------------------------------------
# speed functions


@dataclass(frozen=True, eq=False)
class SpeedFn:
    """Set function over machines, evaluated on bitmasks with memoization.

    Subclasses implement :meth:`_value`.  This is also the extension point for
    user-provided value oracles: any subclass with a correct ``_value`` and
    ``n`` works with the whole pipeline, provided it is M-natural concave.
    """

    kind = "abstract"
    #: whether load-time validation may demand monotonicity
    monotone_expected = True

    def __post_init__(self):
        object.__setattr__(self, "_cache", {})

    @property
    def n(self) -> int:
        raise NotImplementedError

    def _value(self, mask: int) -> Fraction:
        raise NotImplementedError

    def __call__(self, mask: int) -> Fraction:
        cache = self._cache
        v = cache.get(mask)
        if v is None:
            v = cache[mask] = Fraction(0) if mask == 0 else self._value(mask)
        return v

    def _key(self):
        raise NotImplementedError

    def __eq__(self, other):
        return type(self) is type(other) and self._key() == other._key()

    def __hash__(self):
        return hash((type(self).__name__, self._key()))


@dataclass(frozen=True, eq=False)
class LinearSpeed(SpeedFn):
    weights: tuple[Fraction, ...]
    kind = "linear"

    @property
    def n(self):
        return len(self.weights)

    def _value(self, mask):
        w = self.weights
        return sum((w[i] for i in bits(mask)), Fraction(0))

    def _key(self):
        return self.weights


@dataclass(frozen=True, eq=False)
class WeightedMatroidRank(SpeedFn):
    """Max weight of an independent subset of ``S`` in a matroid over machines."""

    matroid: Matroid
    weights: tuple[Fraction, ...]
    kind = "weighted_matroid_rank"

    @property
    def n(self):
        return len(self.weights)

    def _value(self, mask):
        best = self.matroid.max_weight_independent(mask, self.weights)
        return sum((self.weights[i] for i in bits(best)), Fraction(0))

    def _key(self):
        return (self.matroid, self.weights)


@dataclass(frozen=True, eq=False)
class MatroidBasedValuation(SpeedFn):
    """Best matching of machines to weighted slots; used slots independent in ``slot_matroid``.

    ``weights[i][v]`` is the contribution of machine ``i`` in slot ``v``.
    Evaluation is a depth-first search over partial matchings, pruned by the
    downward closure of the slot matroid.
    """

    slot_matroid: Matroid
    weights: tuple[tuple[Fraction, ...], ...]
    kind = "matroid_based_valuation"

    @property
    def n(self):
        return len(self.weights)

    @property
    def n_slots(self):
        return self.slot_matroid.size

    def _value(self, mask):
        machines = bits(mask)
        w = self.weights
        slots = range(self.n_slots)
        ind = self.slot_matroid.is_independent
        # optimistic remainder bound for pruning
        best_single = [max((w[i][v] for v in slots), default=Fraction(0)) for i in machines]
        suffix = [Fraction(0)] * (len(machines) + 1)
        for k in range(len(machines) - 1, -1, -1):
            suffix[k] = suffix[k + 1] + best_single[k]
        best = Fraction(0)

        def dfs(k, used, acc):
            nonlocal best
            if acc + suffix[k] <= best:
                return
            if k == len(machines):
                best = acc
                return
            i = machines[k]
            for v in slots:
                bit = 1 << v
                if used & bit or w[i][v] <= 0:
                    continue
                if ind(used | bit):
                    dfs(k + 1, used | bit, acc + w[i][v])
            dfs(k + 1, used, acc)

        dfs(0, 0, Fraction(0))
        return best

    def _key(self):
        return (self.slot_matroid, self.weights)


@dataclass(frozen=True, eq=False)
class ExplicitTable(SpeedFn):
    """Value per subset, indexed by bitmask (``values[0]`` must be 0)."""

    values: tuple[Fraction, ...]
    kind = "explicit_table"

    @property
    def n(self):
        return (len(self.values) - 1).bit_length()

    def _value(self, mask):
        return self.values[mask]

    def _key(self):
        return self.values


@dataclass(frozen=True, eq=False)
class LinearShift(SpeedFn):
    """``base(S) - sum(shift[i] for i in S)``; the MMFA reduction's speed function.

    Not monotone in general and may be nonpositive on large sets; such sets are
    simply unusable (infinite processing time) for the job.
    """

    base: SpeedFn
    shift: tuple[Fraction, ...]
    kind = "linear_shift"
    monotone_expected = False

    @property
    def n(self):
        return len(self.shift)

    def _value(self, mask):
        return self.base(mask) - sum((self.shift[i] for i in bits(mask)), Fraction(0))

    def _key(self):
        return (self.base, self.shift)


def evaluate(fn: SpeedFn, S: int) -> Fraction:
    if S < 0 or S >> fn.n:
        raise ValidationError(f"machine set {S:#b} not inside a ground set of size {fn.n}")
    return fn(S)


def validate_speed(fn: SpeedFn, n: int, *, check_threshold: int = CHECK_THRESHOLD) -> list[str]:
    """Structural checks for a speed function; returns warnings for skipped checks."""
    warnings = []
    if fn.n != n:
        raise ValidationError(f"speed function ground set has {fn.n} machines, instance has {n}")
    if isinstance(fn, ExplicitTable):
        if n > EXPLICIT_TABLE_MAX:
            raise ValidationError(f"explicit_table limited to {EXPLICIT_TABLE_MAX} machines")
        if fn.values[0] != 0:
            raise ValidationError("explicit_table must have value 0 on the empty set")
    if isinstance(fn, MatroidBasedValuation) and fn.n_slots > MBV_SLOT_LIMIT:
        raise ValidationError(
            f"matroid_based_valuation with {fn.n_slots} slots exceeds the brute-force limit {MBV_SLOT_LIMIT}")
    for sub in _components(fn):
        if isinstance(sub, (LinearSpeed, WeightedMatroidRank)) and any(w < 0 for w in sub.weights):
            raise ValidationError(f"{sub.kind} weights must be nonnegative")
        if isinstance(sub, MatroidBasedValuation) and any(w < 0 for row in sub.weights for w in row):
            raise ValidationError("matroid_based_valuation weights must be nonnegative")
        if isinstance(sub, LinearShift) and any(p < 0 for p in sub.shift):
            raise ValidationError("linear_shift shifts must be nonnegative")
        if isinstance(sub, ExplicitTable) and any(v < 0 for v in sub.values):
            raise ValidationError("explicit_table values must be nonnegative")
        m = getattr(sub, "matroid", None) or getattr(sub, "slot_matroid", None)
        if m is not None:
            m.validate()
    if fn.monotone_expected:
        if n <= check_threshold:
            w = monotonicity_violation(fn, n)
            if w is not None:
                raise ValidationError(
                    f"speed function not monotone: g({bits(w[0])}) > g({bits(w[1])})")
        else:
            warnings.append(f"monotonicity not checked ({n} machines > {check_threshold})")
    return warnings


def _components(fn):
    yield fn
    if isinstance(fn, LinearShift):
        yield from _components(fn.base)


def monotonicity_violation(fn: SpeedFn, n: int):
    """First ``(S, S+i)`` with ``g(S) > g(S+i)``, or None."""
    for S in range(1 << n):
        for i in range(n):
            if not S >> i & 1 and fn(S) > fn(S | 1 << i):
                return S, S | 1 << i
    return None


# ---------------------------------------------------------------------------
# instance, assignment, schedule


@dataclass(frozen=True)
class Instance:
    machines: tuple[str, ...]
    job_ids: tuple[str, ...]
    speeds: tuple[SpeedFn, ...]
    warnings: tuple[str, ...] = field(default=(), compare=False)

    @property
    def m(self) -> int:
        return len(self.machines)

    @property
    def n(self) -> int:
        return len(self.job_ids)

    @property
    def full(self) -> int:
        return (1 << self.m) - 1

    @classmethod
    def build(cls, machines, jobs, *, check_threshold=CHECK_THRESHOLD) -> "Instance":
        """Validate and construct; ``jobs`` is a sequence of ``(id, SpeedFn)``."""
        machines = tuple(machines)
        jobs = list(jobs)
        if not machines:
            raise ValidationError("instance needs at least one machine")
        if not jobs:
            raise ValidationError("instance needs at least one job")
        if len(set(machines)) != len(machines):
            raise ValidationError("machine identifiers must be unique")
        ids = tuple(j for j, _ in jobs)
        if len(set(ids)) != len(ids):
            raise ValidationError("job identifiers must be unique")
        warnings = []
        for jid, fn in jobs:
            for w in validate_speed(fn, len(machines), check_threshold=check_threshold):
                warnings.append(f"job {jid}: {w}")
        for w in warnings:
            logger.warning(w)
        return cls(machines, ids, tuple(fn for _, fn in jobs), tuple(warnings))

    def machine_index(self, name: str) -> int:
        try:
            return self.machines.index(name)
        except ValueError:
            raise ValidationError(f"unknown machine {name!r}") from None

    def names(self, mask: int) -> list[str]:
        return [self.machines[i] for i in bits(mask)]

    def mask(self, names: Iterable[str]) -> int:
        return mask_of(self.machine_index(x) for x in names)

    def time(self, j: int, S: int) -> Fraction:
        """Processing time ``1/g_j(S)``."""
        g = evaluate(self.speeds[j], S)
        if g <= 0:
            raise ValidationError(f"job {self.job_ids[j]} has speed {g} on {self.names(S)}")
        return 1 / g


@dataclass(frozen=True)
class Assignment:
    """Machine set per job, aligned with ``Instance.job_ids``."""

    sets: tuple[int, ...]

    def validate(self, inst: Instance) -> None:
        if len(self.sets) != inst.n:
            raise ValidationError("assignment must give a set for every job")
        for j, S in enumerate(self.sets):
            if S == 0 or S & ~inst.full:
                raise ValidationError(f"job {inst.job_ids[j]}: set must be a nonempty subset of M")
            if inst.speeds[j](S) <= 0:
                raise ValidationError(f"job {inst.job_ids[j]}: zero speed on its set")


def machine_loads(a: Assignment, inst: Instance) -> list[Fraction]:
    loads = [Fraction(0)] * inst.m
    for j, S in enumerate(a.sets):
        t = inst.time(j, S)
        for i in bits(S):
            loads[i] += t
    return loads


def load(a: Assignment, inst: Instance) -> Fraction:
    """Maximum over machines of the summed processing times of their jobs."""
    a.validate(inst)
    return max(machine_loads(a, inst))


@dataclass(frozen=True)
class Schedule:
    assignment: Assignment
    starts: tuple[Fraction, ...]

    def makespan(self, inst: Instance) -> Fraction:
        return max(t + inst.time(j, S)
                   for j, (S, t) in enumerate(zip(self.assignment.sets, self.starts)))


# ---------------------------------------------------------------------------
# constants


@dataclass(frozen=True)
class AlgoConstants:
    """Fixed thresholds of the rounding pipeline.

    Quantities marked ``/C`` are multiplied by ``1/C`` where used and those
    marked ``*C`` by ``C``.
    """

    single_speed: Fraction = Fraction(1, 16)      # /C, defines M+_j
    j1_mass: Fraction = Fraction(1, 16)
    low_speed: Fraction = Fraction(4)             # /C, defines the low-price family
    j2_mass: Fraction = Fraction(1, 8)
    welfare_cap: int = 20
    split_cap: int = 26
    price_mass: Fraction = Fraction(79, 40)       # /C
    dyadic_floor: Fraction = Fraction(69, 40)     # /C
    greedy_floor: Fraction = Fraction(69, 160)    # /C
    speed_floor: Fraction = Fraction(69, 320)     # /C
    gamma_floor: Fraction = Fraction(39, 160)
    split_speed_ratio: Fraction = Fraction(2, 5)
    step1_budget: int = 16                        # *C
    step1_load: int = 32                          # *C
    step2_load: int = 40                          # *C
    step3_load: int = 121                         # *C
    total: int = 193
    step1_mult: int = 32
    mmfa_mult: int = 78


CONSTANTS = AlgoConstants()

