"""Run reports and their independent re-check."""

from __future__ import annotations

from fractions import Fraction

from . import jsonio
from .core import CONSTANTS, Instance, bits, machine_loads, rat
from .rounding import RoundingResult, round as run_pipeline
from .schedule import build_schedule, verify_schedule

K = CONSTANTS
J = jsonio._num


def _step_numbers(inst: Instance, sets, step_of) -> list[dict]:
    out = []
    for step in (1, 2, 3):
        loads = [Fraction(0)] * inst.m
        mult = [0] * inst.m
        jobs = [j for j in range(inst.n) if step_of[j] == step]
        for j in jobs:
            t = inst.time(j, sets[j])
            for i in bits(sets[j]):
                loads[i] += t
                mult[i] += 1
        out.append({"step": step, "jobs": [inst.job_ids[j] for j in jobs], "load": J(max(loads)),
                    "max_multiplicity": max(mult), "multiplicity": mult})
    return out


def assignment_numbers(inst: Instance, sets, step_of, C: Fraction) -> dict:
    """Every report number that follows from the instance and the assignment alone."""
    from .core import Assignment
    a = Assignment(tuple(sets))
    a.validate(inst)
    loads = machine_loads(a, inst)
    sched = build_schedule(a, inst)
    steps = _step_numbers(inst, sets, step_of)
    for s, bound in zip(steps, (K.step1_load, K.step2_load, K.step3_load)):
        s["bound"] = J(bound * C)
    return {
        "steps": steps,
        "machine_loads": {m: J(v) for m, v in zip(inst.machines, loads)},
        "load": J(max(loads)),
        "load_over_C": J(max(loads) / C),
        "makespan": J(sched.makespan(inst)),
        "schedule_feasible": verify_schedule(sched, inst) is None,
        "speeds": {inst.job_ids[j]: J(inst.speeds[j](S)) for j, S in enumerate(sets)},
    }


def lp_numbers(inst: Instance, res: RoundingResult) -> dict:
    """Numbers certified along the pipeline (recomputed by re-running it)."""
    sol = res.solution
    s2 = res.steps[1].info
    s3 = res.steps[2].info
    return {
        "lambda_min": J(min(sol.lam)),
        "mu_min": J(min(sol.mu)),
        "lp_objective": J(sol.objective),
        "lp_columns": sol.n_columns,
        "partition": {"J1": [inst.job_ids[j] for j in res.partition.J1],
                      "J2": [inst.job_ids[j] for j in res.partition.J2],
                      "J3": [inst.job_ids[j] for j in res.partition.J3]},
        "j1_mass": {inst.job_ids[j]: J(v) for j, v in enumerate(res.partition.j1_mass)},
        "cheap_mass": {inst.job_ids[j]: J(v) for j, v in enumerate(res.partition.s2_mass)},
        "step1_fractional_jobs": res.steps[0].info.get("fractional_jobs", 0),
        "welfare_value": J(s2.get("welfare_value", 0)),
        "welfare_certificate": {k: J(v) if isinstance(v, Fraction) else v
                                for k, v in s2.get("welfare_certificate", {}).items()},
        "gamma_min": J(res.split.min_gamma) if res.split.min_gamma is not None else None,
        "split_machine_total_max": J(max(res.split.machine_totals, default=Fraction(0))),
        "price_mass": {inst.job_ids[j]: J(js.price_mass) for j, js in res.split.jobs.items()},
        "dyadic_sum": {inst.job_ids[j]: J(jc.dyadic_sum) for j, jc in res.classes.jobs.items()},
        "class_demand": {inst.job_ids[j]: {str(k): d for k, d in jc.demand.items()}
                         for j, jc in res.classes.jobs.items()},
        "pm_value": s3.get("pm_value", 0),
        "pm_engine": s3.get("pm_engine"),
    }


def build_report(inst: Instance, res: RoundingResult, mode: str, digest: str, trace: bool = False) -> dict:
    step_of = res.step_of()
    rep = {
        "input_digest": digest,
        "mode": mode,
        "lp_mode": res.solution.mode,
        "C": J(res.C),
        "C_source": "search" if res.eps is not None else "given",
        "eps": J(res.eps) if res.eps is not None else None,
        "guarantee": J(K.total * (1 + res.eps)) if res.eps is not None else K.total,
        "assignment": jsonio.emit_assignment(res.assignment, inst),
        "step_of_job": {inst.job_ids[j]: s for j, s in enumerate(step_of)},
        "certified": assignment_numbers(inst, res.assignment.sets, step_of, res.C),
        "pipeline": lp_numbers(inst, res),
        "wall_time": res.wall_time,
        "notes": [],
        "warnings": list(inst.warnings),
    }
    if res.partition.J2:
        rep["notes"].append("integral welfare solution found by certified backtracking search")
    if res.steps[2].info.get("replaced_by_top"):
        rep["notes"].append("some split-step sets replaced by their independent greedy top part")
    if trace:
        rep["trace"] = trace_data(inst, res)
    return rep


def trace_data(inst: Instance, res: RoundingResult) -> dict:
    name = inst.job_ids
    return {
        "x": [{"job": name[j], "set": inst.names(S), "value": J(v)}
              for (S, j), v in sorted(res.solution.x.items(), key=lambda t: (t[0][1], t[0][0]))],
        "lambda": {name[j]: J(v) for j, v in enumerate(res.solution.lam)},
        "mu": {m: J(v) for m, v in zip(inst.machines, res.solution.mu)},
        "x_prime": {name[j]: [{"set": inst.names(S), "value": J(v)} for S, v in sorted(js.x_prime.items())]
                    for j, js in res.split.jobs.items()},
        "gamma": {name[j]: J(js.gamma) for j, js in res.split.jobs.items()},
        "classes": {name[j]: {str(k): {"machines": inst.names(M), "demand": jc.demand[k], "mass": J(jc.mass[k])}
                              for k, M in jc.classes.items()} for j, jc in res.classes.jobs.items()},
        "y": {name[j]: inst.names(S) for j, S in res.steps[2].sets.items()},
    }


def recheck(inst: Instance, rep: dict) -> list[str]:
    """Differences between a report and numbers recomputed from scratch (empty if consistent)."""
    problems = []
    a = jsonio.parse_assignment(rep["assignment"], inst)
    step_of = [rep["step_of_job"][j] for j in inst.job_ids]
    C = rat(rep["C"])
    fresh = jsonio.dumps(assignment_numbers(inst, a.sets, step_of, C))
    if fresh != jsonio.dumps(rep["certified"]):
        problems.append("assignment-derived numbers differ")
    res = run_pipeline(inst, C, mode=rep["lp_mode"])
    if res.assignment.sets != a.sets:
        problems.append("re-running the pipeline at the reported C gives a different assignment")
    again = lp_numbers(inst, res)
    if jsonio.dumps(again) != jsonio.dumps(rep["pipeline"]):
        problems.append("pipeline numbers differ")
    load = max(machine_loads(a, inst))
    if load > K.total * C:
        problems.append("load exceeds 193 C")
    return problems
