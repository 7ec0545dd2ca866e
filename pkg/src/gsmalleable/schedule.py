"""Greedy non-preemptive schedules for an assignment, and their verification."""

from __future__ import annotations

from fractions import Fraction

from .core import Assignment, Instance, Schedule, bits, load


def build_schedule(a: Assignment, inst: Instance) -> Schedule:
    """Longest job first; each job starts once every machine of its set is idle."""
    a.validate(inst)
    times = [inst.time(j, S) for j, S in enumerate(a.sets)]
    order = sorted(range(inst.n), key=lambda j: (-times[j], j))
    free = [Fraction(0)] * inst.m
    starts = [Fraction(0)] * inst.n
    for j in order:
        S = a.sets[j]
        t = max(free[i] for i in bits(S))
        starts[j] = t
        for i in bits(S):
            free[i] = t + times[j]
    return Schedule(a, tuple(starts))


def verify_schedule(s: Schedule, inst: Instance):
    """None if feasible, else the first ``(j, j2, machine)`` whose half-open intervals overlap."""
    sets = s.assignment.sets
    if len(s.starts) != len(sets):
        return (-1, -1, -1)
    ends = [t + inst.time(j, S) for j, (S, t) in enumerate(zip(sets, s.starts))]
    for j in range(len(sets)):
        if s.starts[j] < 0:
            return (j, j, -1)
        for j2 in range(j + 1, len(sets)):
            shared = sets[j] & sets[j2]
            if shared and s.starts[j] < ends[j2] and s.starts[j2] < ends[j]:
                return (j, j2, bits(shared)[0])
    return None


def summary(s: Schedule, inst: Instance) -> dict:
    return {"makespan": s.makespan(inst), "load": load(s.assignment, inst)}
