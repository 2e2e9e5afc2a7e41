"""Command-line interface.

Subcommands: ``check`` (run the exactness ladder), ``solve`` (one convex
relaxation), ``oracle`` (brute-force minimum), ``verify`` (relaxation vs
oracle gap), ``sweep`` (parameter sweep to CSV), ``random`` (emit a seeded
instance), ``mc`` (Monte Carlo exactness-frequency study).

Reports go to stdout as JSON (CSV for sweep/mc), diagnostics to stderr.
Exit codes: 0 for informational commands, 10/11 for check verdicts
(at least one Exact / all Inconclusive), 2 for usage or parse errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time

import numpy as np

from . import instances
from .conditions import CONDITION_IDS, CheckBudget, run_all
from .errors import QcqpError
from .model import DiagonalQCQP, check_assumption1, validate_instance
from .oracle import DESK_SCALE_MAX_N, global_minimize, verify_exactness
from .relaxations import (
    exactness_gap,
    kkt_residuals,
    reconstruct_shor,
    solve_convrel,
    solve_newconvrel,
)
from .util import parallel_map

EXIT_OK = 0
EXIT_EXACT = 10
EXIT_INCONCLUSIVE = 11
EXIT_USAGE = 2

SWEEP_COLUMNS = (
    ["param_value"]
    + list(CONDITION_IDS)
    + ["relax_value", "oracle_value", "gap", "boundary"]
)
MC_COLUMNS = ["n", "m", "scheme", "trials", "condition_fired_fraction", "oracle_exact_fraction"]


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, indent=2, default=_jsonable)
    sys.stdout.write("\n")


def _jsonable(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    raise TypeError(f"not JSON-serializable: {type(value)}")


def _load(path: str) -> DiagonalQCQP:
    try:
        return instances.load_instance(path)
    except (OSError, ValueError, KeyError, QcqpError, json.JSONDecodeError) as exc:
        print(f"error: cannot load instance {path!r}: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _assumption_block(q: DiagonalQCQP) -> dict:
    rep = check_assumption1(q)
    return {
        "feasibility": rep.feasibility,
        "slater": rep.slater,
        "y_weights": None if rep.y_weights is None else rep.y_weights.tolist(),
        "margin": rep.margin,
    }


def _verdict_block(v) -> dict:
    return {
        "condition_id": v.condition_id,
        "verdict": v.verdict,
        "witness": v.witness,
        "perturbed": v.perturbed,
        "caveats": list(v.caveats),
    }


def cmd_check(args) -> int:
    q = _load(args.instance)
    conditions = None
    if args.conditions:
        conditions = tuple(tag.strip() for tag in args.conditions.split(",") if tag.strip())
        unknown = [tag for tag in conditions if tag not in CONDITION_IDS]
        if unknown:
            print(f"error: unknown condition tags {unknown}; valid: {CONDITION_IDS}",
                  file=sys.stderr)
            return EXIT_USAGE
    budget = CheckBudget(
        exhaustive=args.exhaustive,
        include_powerset=bool(conditions and "H1PowerSet" in conditions) or args.exhaustive,
        conditions=conditions,
    )
    timings = {}
    t0 = time.perf_counter()
    assumption = _assumption_block(q)
    timings["assumption"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    verdicts = run_all(q, budget)
    timings["conditions"] = time.perf_counter() - t0
    report = {
        "instance": {"digest": instances.digest(q), "n": q.n, "m": q.m},
        "config": {
            "conditions": list(conditions) if conditions else "all",
            "exhaustive": args.exhaustive,
            "tol": args.tol,
            "seed": args.seed,
        },
        "assumption": assumption,
        "verdicts": [_verdict_block(v) for v in verdicts],
        "timings": timings,
    }
    _emit(report)
    if not verdicts:
        return EXIT_OK
    return EXIT_EXACT if any(v.exact for v in verdicts) else EXIT_INCONCLUSIVE


def _solution_block(q, sol) -> dict:
    block = {"which": sol.which, "status": sol.status, "detail": sol.detail}
    if sol.status != "Optimal":
        return block
    block["value"] = sol.value
    block["x"] = sol.x.tolist()
    if sol.z is not None:
        block["z"] = sol.z.tolist()
    if sol.w is not None:
        block["w"] = sol.w.tolist()
    block["mu"] = sol.mu.tolist()
    if sol.nu is not None:
        block["nu"] = sol.nu.tolist()
    if sol.gamma is not None:
        block["gamma"] = sol.gamma.tolist()
    resid = kkt_residuals(q, sol.partition, sol)
    block["kkt_residuals"] = {
        "stationarity_quadratic": resid.stationarity_quadratic,
        "stationarity_linear": resid.stationarity_linear,
        "primal": resid.primal,
        "complementarity": resid.complementarity,
        "dual_sign": resid.dual_sign,
    }
    slacks, aggregate = exactness_gap(q, sol)
    block["lift_slacks"] = slacks.tolist()
    block["lift_slack_max"] = aggregate
    point = reconstruct_shor(q, sol)
    block["shor_point"] = {
        "x": point.x.tolist(),
        "correction": point.correction.tolist(),
        "value": point.value,
        "rank_one": bool(aggregate <= 1e-8 * q.scale()),
    }
    return block


def cmd_solve(args) -> int:
    q = _load(args.instance)
    t0 = time.perf_counter()
    if args.relaxation == "conv":
        sol = solve_convrel(q, args.tol)
    else:
        sol = solve_newconvrel(q, tol=args.tol)
    report = {
        "instance": {"digest": instances.digest(q), "n": q.n, "m": q.m},
        "solution": _solution_block(q, sol),
        "timings": {"solve": time.perf_counter() - t0},
    }
    _emit(report)
    return EXIT_OK


def cmd_oracle(args) -> int:
    q = _load(args.instance)
    if q.n > DESK_SCALE_MAX_N:
        print(f"error: DeskScaleExceeded: n={q.n} above the oracle cap "
              f"{DESK_SCALE_MAX_N}", file=sys.stderr)
        return EXIT_USAGE
    t0 = time.perf_counter()
    try:
        res = global_minimize(q, grid_per_dim=args.grid, refine_rounds=args.refine)
    except QcqpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = {
        "instance": {"digest": instances.digest(q), "n": q.n, "m": q.m},
        "oracle": {
            "value": res.value,
            "argmin": res.argmin.tolist(),
            "box": [res.box[0].tolist(), res.box[1].tolist()],
            "grid_points": res.grid_points,
            "refinements": res.refinements,
            "feasible_found": res.feasible_found,
        },
        "timings": {"oracle": time.perf_counter() - t0},
    }
    _emit(report)
    return EXIT_OK


def cmd_verify(args) -> int:
    q = _load(args.instance)
    if q.n > DESK_SCALE_MAX_N:
        print(f"error: DeskScaleExceeded: n={q.n} above the oracle cap "
              f"{DESK_SCALE_MAX_N}", file=sys.stderr)
        return EXIT_USAGE
    t0 = time.perf_counter()
    try:
        record = verify_exactness(q, tol=args.tol)
    except QcqpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = {
        "instance": {"digest": instances.digest(q), "n": q.n, "m": q.m},
        "verify": record,
        "timings": {"verify": time.perf_counter() - t0},
    }
    _emit(report)
    return EXIT_OK


def _set_path(doc: dict, pathexpr: str, value: float) -> None:
    """Assign one scalar addressed as e.g. ``constraints[1].b`` or
    ``objective.D[0]``."""
    node = doc
    parts = pathexpr.split(".")
    for pos, part in enumerate(parts):
        last = pos == len(parts) - 1
        name, indices = _parse_path_part(part)
        if name:
            if last and not indices:
                node[name] = value
                return
            node = node[name]
        for k, idx in enumerate(indices):
            if last and k == len(indices) - 1:
                node[idx] = value
                return
            node = node[idx]


def _parse_path_part(part: str):
    name = ""
    indices = []
    rest = part
    if "[" in part:
        name = part[: part.index("[")]
        rest = part[part.index("[") :]
        while rest:
            if not (rest.startswith("[") and "]" in rest):
                raise ValueError(f"malformed path component {part!r}")
            indices.append(int(rest[1 : rest.index("]")]))
            rest = rest[rest.index("]") + 1 :]
    else:
        name = part
    return name, indices


def _sweep_row(doc, pathexpr, value, with_oracle, seed):
    import copy

    modified = copy.deepcopy(doc)
    _set_path(modified, pathexpr, float(value))
    q = validate_instance(modified)
    budget = CheckBudget(exhaustive=True, include_powerset=True)
    verdicts = {v.condition_id: v.verdict for v in run_all(q, budget)}
    row = {"param_value": repr(float(value))}
    for tag in CONDITION_IDS:
        row[tag] = verdicts.get(tag, "")
    sol = solve_convrel(q)
    row["relax_value"] = repr(sol.value) if sol.status == "Optimal" else ""
    row["oracle_value"] = ""
    row["gap"] = ""
    if with_oracle and q.n <= DESK_SCALE_MAX_N:
        try:
            res = global_minimize(q)
            row["oracle_value"] = repr(res.value)
            if sol.status == "Optimal":
                row["gap"] = repr(res.value - sol.value)
        except QcqpError:
            pass
    return row


def cmd_sweep(args) -> int:
    try:
        with open(args.instance, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        validate_instance(doc)
    except (OSError, ValueError, KeyError, QcqpError, json.JSONDecodeError) as exc:
        print(f"error: cannot load instance {args.instance!r}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.steps < 1:
        print("error: need at least one step", file=sys.stderr)
        return EXIT_USAGE
    values = (
        [args.start]
        if args.steps == 1
        else list(np.linspace(args.start, args.stop, args.steps))
    )
    rows = parallel_map(
        lambda v: _sweep_row(doc, args.param, v, args.with_oracle, args.seed), values
    )
    writer = csv.DictWriter(sys.stdout, fieldnames=SWEEP_COLUMNS)
    writer.writeheader()
    prev = None
    for row in rows:
        flags = tuple(row[tag] for tag in CONDITION_IDS)
        row["boundary"] = "true" if prev is not None and flags != prev else "false"
        prev = flags
        writer.writerow(row)
    return EXIT_OK


def cmd_random(args) -> int:
    try:
        q = instances.random_instance(args.n, args.m, args.scheme, args.seed)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(instances.to_json(q))
    return EXIT_OK


def _mc_trial(n, m, scheme, base_seed, trial):
    seed = int(
        np.random.SeedSequence((base_seed & 0xFFFFFFFF, n, trial)).generate_state(1)[0]
    )
    q = instances.random_instance(n, m, scheme, seed)
    verdicts = run_all(q, CheckBudget(exhaustive=False))
    fired = any(v.exact for v in verdicts)
    oracle_exact = None
    if n <= DESK_SCALE_MAX_N:
        try:
            oracle_exact = verify_exactness(q, tol=1e-4)["exact"]
        except QcqpError:
            oracle_exact = None
    return fired, oracle_exact


def cmd_mc(args) -> int:
    try:
        n_list = [int(tok) for tok in args.n_list.split(",") if tok.strip()]
    except ValueError:
        print("error: --n-list must be comma-separated integers", file=sys.stderr)
        return EXIT_USAGE
    if args.scheme not in instances.SCHEMES:
        print(f"error: unknown scheme {args.scheme!r}", file=sys.stderr)
        return EXIT_USAGE
    writer = csv.DictWriter(sys.stdout, fieldnames=MC_COLUMNS)
    writer.writeheader()
    for n in n_list:
        outcomes = parallel_map(
            lambda trial: _mc_trial(n, args.m, args.scheme, args.seed, trial),
            range(args.trials),
        )
        row = {
            "n": n,
            "m": args.m,
            "scheme": args.scheme,
            "trials": args.trials,
            "condition_fired_fraction": "",
            "oracle_exact_fraction": "",
        }
        if outcomes:
            row["condition_fired_fraction"] = repr(
                sum(1 for fired, _ in outcomes if fired) / len(outcomes)
            )
            confirmed = [ex for _, ex in outcomes if ex is not None]
            if confirmed:
                row["oracle_exact_fraction"] = repr(
                    sum(1 for ex in confirmed if ex) / len(confirmed)
                )
        writer.writerow(row)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcqp-exact",
        description="Exactness certificates and relaxation solvers for diagonal QCQPs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="run the exactness-condition ladder")
    p.add_argument("--instance", required=True)
    p.add_argument("--conditions", default="", help="comma-separated condition tags")
    p.add_argument("--exhaustive", action="store_true")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("solve", help="solve one convex relaxation")
    p.add_argument("--instance", required=True)
    p.add_argument("--relaxation", choices=("conv", "newconv"), default="conv")
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("oracle", help="brute-force approximate global minimum")
    p.add_argument("--instance", required=True)
    p.add_argument("--grid", type=int, default=None)
    p.add_argument("--refine", type=int, default=4)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("verify", help="relaxation value against the oracle")
    p.add_argument("--instance", required=True)
    p.add_argument("--tol", type=float, default=1e-5)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="parameter sweep, CSV on stdout")
    p.add_argument("--instance", required=True)
    p.add_argument("--param", required=True, help="path of one scalar, e.g. constraints[1].b")
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="stop", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--with-oracle", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("random", help="emit a seeded random instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--scheme", choices=instances.SCHEMES, default="gaussian")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_random)

    p = sub.add_parser("mc", help="Monte Carlo exactness-frequency study, CSV on stdout")
    p.add_argument("--n-list", required=True, help="comma-separated variable counts")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--scheme", choices=instances.SCHEMES, default="ball-linear")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_mc)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


def console_main() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    console_main()
