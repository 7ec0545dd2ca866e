"""JSON encoding of instances, assignments, schedules and LP solutions.

Rationals are written as integers or ``"p/q"`` strings.  Machine sets are
lists of machine identifiers.  Parsers reject unknown keys.

Instance::

    {"machines": ["a", "b"],
     "jobs": [{"id": "j1", "speed": SPEED}, ...]}

SPEED, with per-machine maps keyed by machine id (missing entries are 0)::

    {"type": "linear", "weights": {"a": 1, "b": "1/2"}}
    {"type": "weighted_matroid_rank", "matroid": MATROID, "weights": {...}}
    {"type": "matroid_based_valuation", "slots": ["s1", "s2"], "slot_matroid": MATROID,
     "weights": {"a": {"s1": 4, "s2": 7}}}
    {"type": "explicit_table", "values": [v0, v1, ...]}      # index = bitmask in machine order
    {"type": "linear_shift", "base": SPEED, "shift": {...}}

MATROID, over machines (or slots)::

    {"type": "free"} | {"type": "uniform", "rank": k}
    {"type": "partition", "blocks": [["a"], ["b", "c"]], "capacities": [1, 2]}
    {"type": "explicit", "bases": [["a", "b"], ["a", "c"]]}

MMFA instance::

    {"items": [...], "agents": [{"id": "x", "utility": SPEED}, ...]}
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction

from .core import (Assignment, ExplicitMatroid, ExplicitTable, FreeMatroid, Instance, LinearShift, LinearSpeed,
                   MatroidBasedValuation, PartitionMatroid, Schedule, UniformMatroid, ValidationError,
                   WeightedMatroidRank, bits, rat, rat_str)

SPEED_KEYS = {
    "linear": {"weights"},
    "weighted_matroid_rank": {"matroid", "weights"},
    "matroid_based_valuation": {"slots", "slot_matroid", "weights"},
    "explicit_table": {"values"},
    "linear_shift": {"base", "shift"},
}
MATROID_KEYS = {"free": set(), "uniform": {"rank"}, "partition": {"blocks", "capacities"}, "explicit": {"bases"}}


def _keys(obj, allowed: set, required: set, where: str) -> None:
    if not isinstance(obj, dict):
        raise ValidationError(f"{where}: expected an object")
    extra = set(obj) - allowed
    if extra:
        raise ValidationError(f"{where}: unknown key {sorted(extra)[0]!r}")
    missing = required - set(obj)
    if missing:
        raise ValidationError(f"{where}: missing key {sorted(missing)[0]!r}")


def _ids(values, where: str) -> tuple[str, ...]:
    if not isinstance(values, list) or not all(isinstance(v, str) for v in values):
        raise ValidationError(f"{where}: expected a list of strings")
    return tuple(values)


def _index(names: tuple, where: str) -> dict:
    return {x: i for i, x in enumerate(names)}


def _mask(names, index: dict, where: str) -> int:
    m = 0
    for x in _ids(names, where):
        if x not in index:
            raise ValidationError(f"{where}: unknown element {x!r}")
        if m >> index[x] & 1:
            raise ValidationError(f"{where}: element {x!r} repeated")
        m |= 1 << index[x]
    return m


def _vector(obj, ground: tuple, where: str) -> tuple[Fraction, ...]:
    if not isinstance(obj, dict):
        raise ValidationError(f"{where}: expected an object keyed by element id")
    idx = _index(ground, where)
    out = [Fraction(0)] * len(ground)
    for k, v in obj.items():
        if k not in idx:
            raise ValidationError(f"{where}: unknown element {k!r}")
        out[idx[k]] = rat(v)
    return tuple(out)


def parse_matroid(obj, ground: tuple, where: str = "matroid"):
    if not isinstance(obj, dict) or obj.get("type") not in MATROID_KEYS:
        raise ValidationError(f"{where}: unknown matroid type {obj.get('type') if isinstance(obj, dict) else obj!r}")
    t = obj["type"]
    _keys(obj, MATROID_KEYS[t] | {"type"}, MATROID_KEYS[t] | {"type"}, where)
    n = len(ground)
    idx = _index(ground, where)
    if t == "free":
        return FreeMatroid(n)
    if t == "uniform":
        if not isinstance(obj["rank"], int) or isinstance(obj["rank"], bool):
            raise ValidationError(f"{where}: rank must be an integer")
        return UniformMatroid(n, obj["rank"])
    if t == "partition":
        blocks = tuple(_mask(b, idx, f"{where}.blocks") for b in obj["blocks"])
        caps = obj["capacities"]
        if not isinstance(caps, list) or not all(isinstance(c, int) and not isinstance(c, bool) for c in caps):
            raise ValidationError(f"{where}: capacities must be integers")
        return PartitionMatroid(n, blocks, tuple(caps))
    return ExplicitMatroid(n, tuple(_mask(b, idx, f"{where}.bases") for b in obj["bases"]))


def parse_speed(obj, ground: tuple, where: str = "speed"):
    if not isinstance(obj, dict):
        raise ValidationError(f"{where}: expected an object")
    t = obj.get("type")
    if t not in SPEED_KEYS:
        raise ValidationError(f"{where}: unknown speed type {t!r}")
    _keys(obj, SPEED_KEYS[t] | {"type"}, SPEED_KEYS[t] | {"type"}, where)
    if t == "linear":
        return LinearSpeed(_vector(obj["weights"], ground, f"{where}.weights"))
    if t == "weighted_matroid_rank":
        return WeightedMatroidRank(parse_matroid(obj["matroid"], ground, f"{where}.matroid"),
                                   _vector(obj["weights"], ground, f"{where}.weights"))
    if t == "matroid_based_valuation":
        slots = _ids(obj["slots"], f"{where}.slots")
        if len(set(slots)) != len(slots):
            raise ValidationError(f"{where}: slot identifiers must be unique")
        w = obj["weights"]
        if not isinstance(w, dict):
            raise ValidationError(f"{where}.weights: expected an object keyed by machine id")
        idx = _index(ground, where)
        rows = [tuple(Fraction(0) for _ in slots) for _ in ground]
        for k, row in w.items():
            if k not in idx:
                raise ValidationError(f"{where}.weights: unknown machine {k!r}")
            rows[idx[k]] = _vector(row, slots, f"{where}.weights.{k}")
        return MatroidBasedValuation(parse_matroid(obj["slot_matroid"], slots, f"{where}.slot_matroid"), tuple(rows))
    if t == "explicit_table":
        vals = obj["values"]
        if not isinstance(vals, list) or len(vals) != 1 << len(ground):
            raise ValidationError(f"{where}.values: expected a list of 2^{len(ground)} values")
        return ExplicitTable(tuple(rat(v) for v in vals))
    return LinearShift(parse_speed(obj["base"], ground, f"{where}.base"),
                       _vector(obj["shift"], ground, f"{where}.shift"))


def _vec_out(v, ground) -> dict:
    return {x: _num(w) for x, w in zip(ground, v) if w != 0}


def _num(q: Fraction):
    q = Fraction(q)
    return q.numerator if q.denominator == 1 else rat_str(q)


def emit_matroid(m, ground) -> dict:
    if isinstance(m, FreeMatroid):
        return {"type": "free"}
    if isinstance(m, UniformMatroid):
        return {"type": "uniform", "rank": m.rank}
    if isinstance(m, PartitionMatroid):
        return {"type": "partition", "blocks": [[ground[i] for i in bits(b)] for b in m.blocks],
                "capacities": list(m.capacities)}
    if isinstance(m, ExplicitMatroid):
        return {"type": "explicit", "bases": [[ground[i] for i in bits(b)] for b in m.bases]}
    raise ValidationError(f"cannot serialize matroid {m!r}")


def emit_speed(fn, ground) -> dict:
    if isinstance(fn, LinearSpeed):
        return {"type": "linear", "weights": _vec_out(fn.weights, ground)}
    if isinstance(fn, WeightedMatroidRank):
        return {"type": "weighted_matroid_rank", "matroid": emit_matroid(fn.matroid, ground),
                "weights": _vec_out(fn.weights, ground)}
    if isinstance(fn, MatroidBasedValuation):
        slots = [f"s{v}" for v in range(fn.n_slots)]
        return {"type": "matroid_based_valuation", "slots": slots,
                "slot_matroid": emit_matroid(fn.slot_matroid, slots),
                "weights": {x: _vec_out(row, slots) for x, row in zip(ground, fn.weights) if any(row)}}
    if isinstance(fn, ExplicitTable):
        return {"type": "explicit_table", "values": [_num(v) for v in fn.values]}
    if isinstance(fn, LinearShift):
        return {"type": "linear_shift", "base": emit_speed(fn.base, ground), "shift": _vec_out(fn.shift, ground)}
    raise ValidationError(f"cannot serialize speed function {fn!r}")


def parse_instance(obj) -> Instance:
    _keys(obj, {"machines", "jobs"}, {"machines", "jobs"}, "instance")
    machines = _ids(obj["machines"], "machines")
    if not isinstance(obj["jobs"], list):
        raise ValidationError("jobs: expected a list")
    jobs = []
    for k, job in enumerate(obj["jobs"]):
        _keys(job, {"id", "speed"}, {"id", "speed"}, f"jobs[{k}]")
        if not isinstance(job["id"], str):
            raise ValidationError(f"jobs[{k}].id: expected a string")
        jobs.append((job["id"], parse_speed(job["speed"], machines, f"jobs[{k}].speed")))
    return Instance.build(machines, jobs)


def emit_instance(inst: Instance) -> dict:
    return {"machines": list(inst.machines),
            "jobs": [{"id": j, "speed": emit_speed(fn, inst.machines)} for j, fn in zip(inst.job_ids, inst.speeds)]}


def parse_mmfa(obj):
    from .mmfa import MmfaInstance
    _keys(obj, {"items", "agents"}, {"items", "agents"}, "mmfa")
    items = _ids(obj["items"], "items")
    if not isinstance(obj["agents"], list):
        raise ValidationError("agents: expected a list")
    agents = []
    for k, a in enumerate(obj["agents"]):
        _keys(a, {"id", "utility"}, {"id", "utility"}, f"agents[{k}]")
        if not isinstance(a["id"], str):
            raise ValidationError(f"agents[{k}].id: expected a string")
        agents.append((a["id"], parse_speed(a["utility"], items, f"agents[{k}].utility")))
    return MmfaInstance.build(items, agents)


def emit_mmfa(mm) -> dict:
    return {"items": list(mm.items),
            "agents": [{"id": a, "utility": emit_speed(u, mm.items)} for a, u in zip(mm.agents, mm.utilities)]}


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False, default=_default) + "\n"


def _default(o):
    if isinstance(o, Fraction):
        return _num(o)
    raise TypeError(f"not serializable: {type(o).__name__}")


def load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as e:
        raise ValidationError(f"{path}: invalid JSON ({e})") from None


def digest(obj) -> str:
    return hashlib.sha256(json.dumps(obj, sort_keys=True, default=_default).encode()).hexdigest()


def emit_assignment(a: Assignment, inst: Instance) -> dict:
    return {j: inst.names(S) for j, S in zip(inst.job_ids, a.sets)}


def parse_assignment(obj, inst: Instance) -> Assignment:
    if not isinstance(obj, dict):
        raise ValidationError("assignment: expected an object keyed by job id")
    extra = set(obj) - set(inst.job_ids)
    if extra:
        raise ValidationError(f"assignment: unknown job {sorted(extra)[0]!r}")
    idx = _index(inst.machines, "assignment")
    sets = []
    for j in inst.job_ids:
        if j not in obj:
            raise ValidationError(f"assignment: missing job {j!r}")
        sets.append(_mask(obj[j], idx, f"assignment.{j}"))
    a = Assignment(tuple(sets))
    a.validate(inst)
    return a


def emit_schedule(s: Schedule, inst: Instance) -> dict:
    return {"assignment": emit_assignment(s.assignment, inst),
            "starts": {j: _num(t) for j, t in zip(inst.job_ids, s.starts)}}


def emit_solution(sol, inst: Instance) -> dict:
    return {
        "C": _num(sol.C),
        "mode": sol.mode,
        "objective": _num(sol.objective),
        "x": [{"job": inst.job_ids[j], "set": inst.names(S), "value": _num(v)}
              for (S, j), v in sorted(sol.x.items(), key=lambda t: (t[0][1], t[0][0]))],
        "s": {m: _num(v) for m, v in zip(inst.machines, sol.s)},
        "lambda": {j: _num(v) for j, v in zip(inst.job_ids, sol.lam)},
        "mu": {m: _num(v) for m, v in zip(inst.machines, sol.mu)},
    }
