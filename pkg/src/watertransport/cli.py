"""Command-line entry point: kappa, simulate, cdf, reduce, halfline, serve.

Machine-readable JSON result records go to stdout, diagnostics to stderr;
the exit code is 0 exactly when every requested check passed.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import dynamics, exact, halfline, reduction, search, stochastic
from .graphs import InstanceError, dump_instance, instance_summary, load_instance
from .rationals import decimal_str, exact_str, parse_rational


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _rational_record(x: Fraction) -> dict:
    return {"exact": exact_str(x), "decimal": decimal_str(x)}


def _emit(record: dict) -> int:
    print(json.dumps(record, indent=2, default=str))
    return 0 if record.get("ok", True) else 1


def _fail(message: str, code: int = 2) -> int:
    print(message, file=sys.stderr)
    return code


def _load_graph_arg(path: str):
    text = Path(path).read_text()
    return load_instance(text)


# -- kappa ---------------------------------------------------------------------


def cmd_kappa(args) -> int:
    try:
        graph, profile = _load_graph_arg(args.graph)
        target = graph.id_of(args.target)
    except (InstanceError, OSError) as exc:
        return _fail(f"kappa: {exc}")
    t0 = time.monotonic()
    record = {
        "command": "kappa",
        "config": {
            "target": args.target,
            "exact_class": args.exact_class,
            "depth": args.depth,
            "beam": args.beam,
        },
        "inputs": {"graph": {"path": args.graph, "sha256": _sha256(args.graph)}},
        "ok": True,
    }
    detected = exact.detect_class(graph, target)
    use = args.exact_class
    if use == "auto":
        use = {
            "complete": "complete",
            "star-center": "complete",
            "line-endpoint": "line",
            "line-interior": "line",
            "line3-middle": "line",
            None: "search",
        }[detected]
    try:
        if use == "complete":
            result = exact.kappa_complete(profile, target)
        elif use == "line":
            cls = detected if detected else exact.detect_class(graph, target)
            if cls == "line-endpoint":
                result = exact.kappa_line_endpoint(profile, target)
            elif cls == "line3-middle":
                result = exact.kappa_line3_middle(profile)
            elif cls == "line-interior":
                result = exact.kappa_line_interior(profile, target)
            else:
                return _fail("kappa: graph is not a path")
        elif use == "search":
            cfg = search.SearchConfig(
                max_depth=args.depth,
                beam_width=args.beam if (args.beam or graph.n > 12) else None,
            )
            if cfg.beam_width is None and graph.n > cfg.exhaustive_vertex_cap:
                cfg = search.SearchConfig(max_depth=args.depth, beam_width=64)
            sres = search.search_kappa(graph, profile, target, cfg)
            record["results"] = {
                "solver": "search",
                "value": _rational_record(sres.best_value),
                "attained": None,
                "certificate": dynamics.moves_to_json(graph, sres.best_sequence),
                "nodes_expanded": sres.nodes_expanded,
                "exhausted": sres.exhausted,
                "claim": sres.claim,
                "upper_bound": _rational_record(search.upper_bound(graph, profile, target)),
            }
            record["timing"] = {"seconds": time.monotonic() - t0}
            print(f"kappa: solver=search ({sres.claim})", file=sys.stderr)
            return _emit(record)
        else:
            return _fail(f"kappa: unknown class {use!r}")
    except exact.WrongGraphClass as exc:
        return _fail(f"kappa: {exc}")
    record["results"] = {
        "solver": result.solver,
        "value": _rational_record(result.value),
        "attained": result.attained,
        "certificate": dynamics.moves_to_json(graph, result.certificate),
        "sad_weights": {
            graph.name_of(u): exact_str(w)
            for u, w in enumerate(result.sad_weights)
            if w
        },
        "upper_bound": _rational_record(search.upper_bound(graph, profile, target)),
    }
    if result.gla_attains is not None:
        record["results"]["gla_attains"] = result.gla_attains
    record["timing"] = {"seconds": time.monotonic() - t0}
    print(f"kappa: solver={result.solver} (auto-detected {detected})", file=sys.stderr)
    return _emit(record)


# -- simulate --------------------------------------------------------------------


def cmd_simulate(args) -> int:
    try:
        graph, profile = _load_graph_arg(args.graph)
        target = graph.id_of(args.target)
        moves_doc = json.loads(Path(args.moves).read_text())
        seq = dynamics.moves_from_json(graph, moves_doc)
    except (InstanceError, dynamics.InvalidMoveError, OSError, json.JSONDecodeError) as exc:
        return _fail(f"simulate: {exc}")
    t0 = time.monotonic()
    final, snapshots = dynamics.apply_sequence(profile, seq, trace=True)
    dual = dynamics.dual_sad(graph, seq, target)
    conserved = final.total() == profile.total()
    duality_ok = dual.dot(profile) == final.levels[target]
    rows = [[float(x) for x in profile.levels]] + [
        [float(x) for x in snap.levels] for snap in snapshots
    ]
    if args.out:
        with open(args.out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["round"] + [graph.name_of(u) for u in range(graph.n)])
            writer.writerow([0] + [exact_str(x) for x in profile.levels])
            for i, snap in enumerate(snapshots, start=1):
                writer.writerow([i] + [exact_str(x) for x in snap.levels])
    if args.plot:
        from .plotting import plot_profile_trace

        plot_profile_trace(graph.names, rows, args.plot, title="level trajectories")
    record = {
        "command": "simulate",
        "config": {"target": args.target, "moves": args.moves},
        "inputs": {"graph": {"path": args.graph, "sha256": _sha256(args.graph)}},
        "results": {
            "rounds": len(seq),
            "final_profile": {
                graph.name_of(u): _rational_record(x) for u, x in enumerate(final.levels)
            },
            "final_level_at_target": _rational_record(final.levels[target]),
            "dual_sad": {
                graph.name_of(u): exact_str(w) for u, w in enumerate(dual.weights) if w
            },
            "water_conserved": conserved,
            "duality_holds": duality_ok,
        },
        "timing": {"seconds": time.monotonic() - t0},
        "ok": conserved and duality_ok,
    }
    return _emit(record)


# -- cdf -------------------------------------------------------------------------


def cmd_cdf(args) -> int:
    try:
        oracle = stochastic.cdf_oracle(args.case)
    except KeyError as exc:
        return _fail(f"cdf: {exc}")
    t0 = time.monotonic()
    if args.workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        graph, _ = stochastic.case_instance(args.case)
        bounds = np.linspace(0, args.samples, args.workers + 1, dtype=int)
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            futures = [
                pool.submit(_worker_sample, args.case, args.seed, args.samples, int(a), int(b))
                for a, b in zip(bounds[:-1], bounds[1:])
            ]
            parts = [f.result() for f in futures]
        values = np.sort(np.concatenate(parts))
        sample = stochastic.KappaSample(values=values, n=args.samples, seed=args.seed, case=args.case)
    else:
        sample = stochastic.sample_case_fast(args.case, args.samples, args.seed)
    ks = sample.ks_distance(oracle)
    grid = np.linspace(0.0, 1.0, args.grid)
    empirical = sample.ecdf(grid)
    oracle_vals = oracle.eval_array(grid)
    diff = empirical - oracle_vals
    if args.out:
        with open(args.out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x", "empirical", "oracle", "diff"])
            for i in range(len(grid)):
                writer.writerow([f"{grid[i]:.6f}", f"{empirical[i]:.8f}", f"{oracle_vals[i]:.8f}", f"{diff[i]:.3e}"])
    if args.plot:
        from .plotting import plot_cdf_comparison

        plot_cdf_comparison(grid, empirical, oracle_vals, diff, args.plot, title=args.case)
    ok = True if args.tolerance is None else ks < args.tolerance
    record = {
        "command": "cdf",
        "config": {
            "case": args.case,
            "samples": args.samples,
            "seed": args.seed,
            "workers": args.workers,
            "tolerance": args.tolerance,
        },
        "results": {
            "ks_distance": ks,
            "csv": args.out,
            "figure": args.plot,
        },
        "timing": {"seconds": time.monotonic() - t0},
        "ok": ok,
    }
    return _emit(record)


def _worker_sample(case: str, seed: int, n_total: int, start: int, stop: int) -> np.ndarray:
    graph, _ = stochastic.case_instance(case)
    matrix = stochastic.draw_level_matrix(seed, n_total, graph.n)[start:stop]
    D = stochastic.DYADIC_DEN
    if case == "k2_v1":
        a, b = matrix[:, 0], matrix[:, 1]
        return np.where(a >= b, 2 * a, a + b).astype(np.float64) / float(2 * D)
    if case == "line3_v1":
        a, b, c = matrix[:, 0], matrix[:, 1], matrix[:, 2]
        return np.maximum(6 * a, np.maximum(3 * (a + b), 2 * (a + b + c))).astype(np.float64) / float(6 * D)
    a, b, c = matrix[:, 0], matrix[:, 1], matrix[:, 2]
    scaled = np.maximum.reduce(
        [12 * b, 6 * (a + b), 6 * (b + c), 4 * (a + b + c), 3 * (2 * a + b + c), 3 * (a + b + 2 * c)]
    )
    return scaled.astype(np.float64) / float(12 * D)


# -- reduce ----------------------------------------------------------------------


def cmd_reduce(args) -> int:
    try:
        formula = reduction.parse_cnf(Path(args.cnf).read_text())
    except (reduction.CnfError, OSError) as exc:
        return _fail(f"reduce: {exc}")
    t0 = time.monotonic()
    inst = reduction.build_comb(formula)
    bounds_ok = True
    try:
        bounds = reduction.verify_bounds(inst)
    except reduction.CombBoundsError as exc:
        bounds_ok = False
        bounds = {"error": str(exc)}
    results: dict = {
        "clauses": inst.n,
        "variables": inst.k,
        "instance": instance_summary(inst.graph, inst.profile),
        "bounds": bounds,
        "bounds_ok": bounds_ok,
    }
    ok = bounds_ok
    if args.out:
        Path(args.out).write_text(dump_instance(inst.graph, inst.profile))
        roles_path = args.roles or (args.out + ".roles.json")
        Path(roles_path).write_text(json.dumps(inst.role_map(), indent=2))
        results["instance_file"] = args.out
        results["roles_file"] = roles_path
    if args.witness is not None:
        try:
            if args.witness == "auto":
                assignment = reduction.solve_brute_force(formula)
                if assignment is None:
                    return _fail("reduce: formula is unsatisfiable, no witness exists")
            else:
                assignment = {}
                for tok in args.witness.replace(",", " ").split():
                    lit = int(tok)
                    assignment[abs(lit)] = lit > 0
            moves, achieved = reduction.witness_schedule(inst, assignment)
            results["witness"] = {
                "assignment": {f"x{v}": val for v, val in sorted(assignment.items())},
                "achieved": _rational_record(achieved),
                "exceeds_2": achieved > 2,
                "moves": len(moves),
            }
            ok = ok and achieved > 2
        except (reduction.AssignmentError, ValueError) as exc:
            return _fail(f"reduce: witness: {exc}")
    if args.probe:
        try:
            probe = reduction.adversarial_probe(inst, budget_seconds=args.probe_budget)
        except reduction.AssignmentError as exc:
            return _fail(f"reduce: probe: {exc}")
        results["probe"] = {
            "best_value": _rational_record(probe.best_value),
            "best_description": probe.best_description,
            "attempts": probe.attempts,
            "budget_exhausted": probe.budget_exhausted,
            "note": probe.note,
            "stayed_at_or_below_2": probe.best_value <= 2,
        }
        ok = ok and probe.best_value <= 2
    record = {
        "command": "reduce",
        "config": {"cnf": args.cnf, "witness": args.witness, "probe": args.probe},
        "inputs": {"cnf": {"path": args.cnf, "sha256": _sha256(args.cnf)}},
        "results": results,
        "timing": {"seconds": time.monotonic() - t0},
        "ok": ok,
    }
    return _emit(record)


# -- halfline --------------------------------------------------------------------


def cmd_halfline(args) -> int:
    try:
        if args.family:
            kind, _, params = args.family.partition(":")
            if kind != "affine":
                return _fail(f"halfline: unknown family {kind!r}")
            a, b = (int(x) for x in params.split(","))
            spec = halfline.HalfLineSpec.affine(a, b, args.m, args.eps)
        elif args.table:
            spec = halfline.HalfLineSpec.from_table(
                [int(x) for x in args.table.split(",")], args.eps
            )
        else:
            return _fail("halfline: need --family or --table")
        graph, profile, roles = halfline.build_half_line(
            spec,
            line_level=parse_rational(args.line_level),
            pendant_level=parse_rational(args.pendant_level),
        )
    except (ValueError, InstanceError) as exc:
        return _fail(f"halfline: {exc}")
    t0 = time.monotonic()
    try:
        result = halfline.half_line_schedule(spec, profile)
    except halfline.SweepCapExceeded as exc:
        return _fail(f"halfline: {exc}", code=3)
    bound_curve = [1.0 - float(s.residual_bound) for s in result.steps]
    if args.out:
        with open(args.out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["step", "pendant", "f", "sweeps", "weight", "threshold", "achieved", "residual", "residual_bound"]
            )
            for s in result.steps:
                writer.writerow(
                    [s.index, graph.name_of(s.pendant), s.f_value, s.sweeps, exact_str(s.weight),
                     exact_str(s.threshold), exact_str(s.achieved), exact_str(s.residual), exact_str(s.residual_bound)]
                )
    if args.plot and result.steps:
        from .plotting import plot_halfline_progress

        plot_halfline_progress(result.steps, bound_curve, args.plot, title="pendant schedule")
    bound_ok = result.residual <= result.residual_bound
    record = {
        "command": "halfline",
        "config": {
            "family": args.family,
            "table": args.table,
            "m": spec.m,
            "eps": exact_str(spec.epsilon),
            "divergence_declared": spec.divergence_declared(),
        },
        "results": {
            "achieved": _rational_record(result.achieved),
            "residual": _rational_record(result.residual),
            "residual_bound": _rational_record(result.residual_bound),
            "residual_within_bound": bound_ok,
            "moves": result.move_count,
            "steps": len(result.steps),
            "warning": result.warning,
            "csv": args.out,
        },
        "timing": {"seconds": time.monotonic() - t0},
        "ok": bound_ok,
    }
    return _emit(record)


# -- serve -----------------------------------------------------------------------


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="info")
    return 0


# -- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="watertransport",
        description="Water transport on graphs: solvers, simulation, distributions, reductions.",
    )
    sub = p.add_subparsers(dest="cmd", required=True)

    k = sub.add_parser("kappa", help="peak achievable level at a target vertex")
    k.add_argument("--graph", required=True)
    k.add_argument("--target", required=True)
    k.add_argument("--exact-class", default="auto", choices=["auto", "complete", "line", "search"])
    k.add_argument("--depth", type=int, default=3)
    k.add_argument("--beam", type=int, default=None)
    k.set_defaults(fn=cmd_kappa)

    s = sub.add_parser("simulate", help="apply a move sequence with trace and dual weights")
    s.add_argument("--graph", required=True)
    s.add_argument("--moves", required=True)
    s.add_argument("--target", required=True)
    s.add_argument("--out", default=None, help="per-round CSV")
    s.add_argument("--plot", default=None, help="trajectory figure file")
    s.set_defaults(fn=cmd_simulate)

    c = sub.add_parser("cdf", help="Monte Carlo peak-level CDF vs the exact formula")
    c.add_argument("--case", required=True, choices=["k2_v1", "line3_v1", "line3_v2"])
    c.add_argument("--samples", type=int, default=10**6)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out", default=None, help="CSV path (columns x, empirical, oracle, diff)")
    c.add_argument("--plot", default=None, help="figure file rendered next to the CSV")
    c.add_argument("--grid", type=int, default=2001)
    c.add_argument("--tolerance", type=float, default=None)
    c.add_argument("--workers", type=int, default=1)
    c.set_defaults(fn=cmd_cdf)

    r = sub.add_parser("reduce", help="build and check the comb instance of a 3-CNF formula")
    r.add_argument("--cnf", required=True)
    r.add_argument("--out", default=None, help="instance JSON output")
    r.add_argument("--roles", default=None, help="role-map sidecar path")
    r.add_argument("--witness", default=None, help="literal list like '1 -2 3', or 'auto'")
    r.add_argument("--probe", action="store_true")
    r.add_argument("--probe-budget", type=float, default=60.0)
    r.set_defaults(fn=cmd_reduce)

    h = sub.add_parser("halfline", help="pendant-rich half-line sweep schedule")
    h.add_argument("--family", default=None, help="affine:a,b meaning f(k) = a*k + b")
    h.add_argument("--table", default=None, help="comma-separated f values")
    h.add_argument("--m", type=int, default=10)
    h.add_argument("--eps", default="1/20")
    h.add_argument("--pendant-level", default="1")
    h.add_argument("--line-level", default="0")
    h.add_argument("--out", default=None)
    h.add_argument("--plot", default=None)
    h.set_defaults(fn=cmd_halfline)

    v = sub.add_parser("serve", help="run the interactive explorer service")
    v.add_argument("--host", default="127.0.0.1")
    v.add_argument("--port", type=int, default=8000)
    v.set_defaults(fn=cmd_serve)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    raise SystemExit(main())
