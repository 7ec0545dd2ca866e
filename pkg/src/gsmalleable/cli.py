"""Command line interface.

Exit codes: 0 success, 2 configuration LP infeasible at the given makespan,
3 invalid input, 4 an internal invariant failed.
"""

from __future__ import annotations

import argparse
import logging
import sys
from fractions import Fraction

from . import jsonio
from .configlp import binary_search_C, build_and_solve, explicit_lp
from .core import GsError, InvariantViolation, ValidationError, machine_loads, rat
from .mnat import MNAT_CHECK_MAX, check_mnat
from .rounding import LpInfeasible, choose_mode, round as run_pipeline
from .schedule import build_schedule, verify_schedule

EXIT_OK, EXIT_INFEASIBLE, EXIT_INVALID, EXIT_INVARIANT = 0, 2, 3, 4


def _out(obj, path=None) -> None:
    text = jsonio.dumps(obj)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_instance(path):
    raw = jsonio.load_json(path)
    return raw, jsonio.parse_instance(raw)


def _load_mmfa(path):
    raw = jsonio.load_json(path)
    return raw, jsonio.parse_mmfa(raw)


def _rational_arg(s: str) -> Fraction:
    try:
        return rat(s)
    except ValidationError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def cmd_gen(args) -> int:
    from .gen import generate, generate_mmfa
    if args.mmfa:
        _out(jsonio.emit_mmfa(generate_mmfa(args.seed, args.profile, args.machines, args.jobs)))
    else:
        _out(jsonio.emit_instance(generate(args.seed, args.profile, args.machines, args.jobs)))
    return EXIT_OK


def cmd_check(args) -> int:
    if args.mmfa:
        raw, mm = _load_mmfa(args.input)
        fns, ids, ground, warnings = mm.utilities, mm.agents, mm.items, mm.warnings
    else:
        raw, inst = _load_instance(args.input)
        fns, ids, ground, warnings = inst.speeds, inst.job_ids, inst.machines, inst.warnings
    report = {"input_digest": jsonio.digest(raw), "warnings": list(warnings), "mnat": {}}
    bad = False
    n = len(ground)
    for jid, fn in zip(ids, fns):
        if n > MNAT_CHECK_MAX:
            report["mnat"][jid] = "skipped"
            continue
        w = check_mnat(fn, n)
        if w is None:
            report["mnat"][jid] = "ok"
        else:
            S, T, i = w
            report["mnat"][jid] = {"S": [ground[k] for k in range(n) if S >> k & 1],
                                   "T": [ground[k] for k in range(n) if T >> k & 1], "element": ground[i]}
        bad |= w is not None
    _out(report)
    return EXIT_INVALID if bad else EXIT_OK


def cmd_lp(args) -> int:
    _, inst = _load_instance(args.input)
    mode = choose_mode(inst, args.mode)
    if args.search:
        C, sol = binary_search_C(inst, args.eps, mode)
    else:
        sol = build_and_solve(inst, args.makespan, mode)
        if sol is None:
            _out({"C": args.makespan, "status": "infeasible"})
            return EXIT_INFEASIBLE
    _out(jsonio.emit_solution(sol, inst))
    return EXIT_OK


def cmd_lp_dump(args) -> int:
    from .lp import to_cplex_lp
    _, inst = _load_instance(args.input)
    sys.stdout.write(to_cplex_lp(explicit_lp(inst, args.makespan), "configuration LP"))
    return EXIT_OK


def cmd_solve(args) -> int:
    from .report import build_report
    raw, inst = _load_instance(args.input)
    C = None if args.search else args.makespan
    res = run_pipeline(inst, C, eps=args.eps, mode=args.mode)
    rep = build_report(inst, res, args.mode, jsonio.digest(raw), trace=args.trace)
    if args.report:
        _out(rep, args.report)
    sched = build_schedule(res.assignment, inst)
    _out({"C": res.C, "load": res.load, "makespan": sched.makespan(inst),
          "assignment": rep["assignment"], "step_of_job": rep["step_of_job"]})
    return EXIT_OK


def cmd_schedule(args) -> int:
    _, inst = _load_instance(args.input)
    a = jsonio.parse_assignment(jsonio.load_json(args.assignment), inst)
    s = build_schedule(a, inst)
    clash = verify_schedule(s, inst)
    if clash is not None:
        raise InvariantViolation(f"schedule overlap {clash}")
    out = jsonio.emit_schedule(s, inst)
    out["makespan"] = s.makespan(inst)
    _out(out)
    return EXIT_OK


def cmd_mmfa(args) -> int:
    from .mmfa import solve_mmfa
    raw, mm = _load_mmfa(args.input)
    if args.santa:
        from .core import LinearSpeed
        if not all(isinstance(u, LinearSpeed) for u in mm.utilities):
            raise ValidationError("--santa expects linear utilities")
    alloc = solve_mmfa(mm, args.eps, args.mode)
    _out({
        "input_digest": jsonio.digest(raw),
        "status": alloc.status,
        "V": alloc.V,
        "eps": alloc.eps,
        "bundles": {a: [mm.items[i] for i in range(mm.n_items) if S >> i & 1] for a, S in zip(mm.agents, alloc.bundles)},
        "utilities": dict(zip(mm.agents, alloc.utilities)),
        "min_utility": alloc.min_utility,
        "item_multiplicity": dict(zip(mm.items, alloc.multiplicity)),
        "max_multiplicity": max(alloc.multiplicity),
        "probes": [{"V": p.V, "lp_feasible": p.lp_feasible, "load": p.load, "accepted": p.alpha_test}
                   for p in alloc.probes],
        "notes": alloc.notes,
    })
    return EXIT_OK


def cmd_verify(args) -> int:
    from .oracle import exact_assignment
    _, inst = _load_instance(args.input)
    opt, a = exact_assignment(inst)
    res = run_pipeline(inst, None, eps=args.eps, mode=args.mode)
    ratio = res.load / opt
    bound = 193 * (1 + args.eps)
    _out({"optimum": opt, "optimal_assignment": jsonio.emit_assignment(a, inst), "C": res.C,
          "load": res.load, "ratio": ratio, "bound": bound, "within_bound": ratio <= bound,
          "C_below_optimum": res.C <= opt})
    if ratio > bound or res.C > opt:
        raise InvariantViolation(f"pipeline load ratio {ratio} or C {res.C} violates the guarantee")
    return EXIT_OK


def cmd_recheck(args) -> int:
    from .report import recheck
    raw, inst = _load_instance(args.input)
    rep = jsonio.load_json(args.report)
    problems = []
    if rep.get("input_digest") != jsonio.digest(raw):
        problems.append("input digest differs")
    problems += recheck(inst, rep)
    _out({"consistent": not problems, "problems": problems,
          "load": max(machine_loads(jsonio.parse_assignment(rep["assignment"], inst), inst))})
    return EXIT_OK if not problems else EXIT_INVARIANT


def build_parser() -> argparse.ArgumentParser:
    from .gen import PROFILES, WIDE_PROFILES
    p = argparse.ArgumentParser(prog="gsmalleable", description="Malleable scheduling with M-natural concave speeds")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def makespan_args(q, search_ok=True):
        g = q.add_mutually_exclusive_group(required=True)
        g.add_argument("--makespan", type=_rational_arg, help="target C (integer or p/q)")
        if search_ok:
            g.add_argument("--search", action="store_true", help="search for the smallest feasible C")
            q.add_argument("--eps", type=_rational_arg, default=Fraction(1, 100))

    def mode_arg(q):
        q.add_argument("--mode", choices=("auto", "explicit", "colgen"), default="auto")

    q = sub.add_parser("gen", help="emit a seeded random instance")
    q.add_argument("--seed", type=int, required=True)
    q.add_argument("--profile", choices=PROFILES + WIDE_PROFILES, default="mixed")
    q.add_argument("-m", "--machines", type=int)
    q.add_argument("-n", "--jobs", type=int)
    q.add_argument("--mmfa", action="store_true", help="emit an allocation instance (items, agents)")
    q.set_defaults(func=cmd_gen)

    q = sub.add_parser("check", help="validate an instance and test M-natural concavity")
    q.add_argument("input")
    q.add_argument("--mmfa", action="store_true")
    q.set_defaults(func=cmd_check)

    q = sub.add_parser("lp", help="solve the configuration LP")
    q.add_argument("input")
    makespan_args(q)
    mode_arg(q)
    q.set_defaults(func=cmd_lp)

    q = sub.add_parser("lp-dump", help="write the explicit configuration LP in CPLEX LP format")
    q.add_argument("input")
    makespan_args(q, search_ok=False)
    q.set_defaults(func=cmd_lp_dump)

    q = sub.add_parser("solve", help="run the rounding pipeline")
    q.add_argument("input")
    makespan_args(q)
    mode_arg(q)
    q.add_argument("--report", help="write the run report to this path")
    q.add_argument("--trace", action="store_true", help="include LP values, split and classes in the report")
    q.set_defaults(func=cmd_solve)

    q = sub.add_parser("schedule", help="turn an assignment into a feasible schedule")
    q.add_argument("input")
    q.add_argument("assignment")
    q.set_defaults(func=cmd_schedule)

    q = sub.add_parser("mmfa", help="max-min fair allocation with shared items")
    q.add_argument("input")
    q.add_argument("--eps", type=_rational_arg, default=Fraction(1, 100))
    q.add_argument("--santa", action="store_true", help="require linear utilities")
    mode_arg(q)
    q.set_defaults(func=cmd_mmfa)

    q = sub.add_parser("verify", help="compare the pipeline with brute force on a small instance")
    q.add_argument("input")
    q.add_argument("--eps", type=_rational_arg, default=Fraction(1, 100))
    mode_arg(q)
    q.set_defaults(func=cmd_verify)

    q = sub.add_parser("recheck", help="recompute every number of a run report")
    q.add_argument("input")
    q.add_argument("report")
    q.set_defaults(func=cmd_recheck)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except LpInfeasible as e:
        print(f"infeasible: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ValidationError as e:
        print(f"invalid input: {e}", file=sys.stderr)
        return EXIT_INVALID
    except InvariantViolation as e:
        print(f"invariant violated: {e}", file=sys.stderr)
        return EXIT_INVARIANT
    except GsError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVARIANT
    except OSError as e:
        print(f"cannot read input: {e}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
