"""Command-line front end.

Exit codes: 0 success, 1 validation/criterion/sampler failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import secrets
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from . import diagnostics as dg
from . import repro
from . import samplers as sm
from . import transforms as tf
from .fixtures import fixture_path, resolve_network
from .network import NetworkError, parse_network, serialize_network, validate
from .oracle import BudgetExceeded, DegenerateConditional, exact_posteriors, markov_blanket


class UsageError(Exception):
    pass


def parse_assignments(text: str | None, net=None, values_required: bool = True) -> dict[str, str]:
    """``VAR=VALUE,VAR=VALUE``; contradictory repeats are an error."""
    out: dict[str, str] = {}
    if not text:
        return out
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        if "=" in item:
            name, value = (s.strip() for s in item.split("=", 1))
        elif values_required:
            raise UsageError(f"expected VAR=VALUE, got {item!r}")
        else:
            name, value = item, None
        if name in out and out[name] != value:
            raise UsageError(f"contradictory evidence for {name}: {out[name]} and {value}")
        out[name] = value
    if net is not None:
        for name, value in out.items():
            var = net.variable(name)
            if value is not None and value not in var.values:
                raise UsageError(f"{value!r} is not a value of {name} {list(var.values)}")
    return out


def parse_names(text: str | None) -> list[str]:
    if not text:
        return []
    return [s.split("=", 1)[0].strip() for s in text.split(",") if s.strip()]


def parse_arc(text: str | None) -> tuple[str, str]:
    if not text or "-" not in text:
        raise UsageError("arc must look like A-B (directed from the left)")
    a, b = text.split("-", 1)
    return a.strip(), b.strip()


def parse_groups(text: str | None) -> list[tuple[str, ...]] | None:
    """``A+B;C+D`` -> [(A, B), (C, D)]; ``auto`` -> None (detect)."""
    if text is None or text == "auto":
        return None
    return [tuple(m.strip() for m in g.split("+") if m.strip()) for g in text.split(";") if g]


def _seed(args) -> int:
    if args.seed is None:
        args.seed = secrets.randbits(63)
        print(f"seed: {args.seed}", file=sys.stderr)
    return args.seed


def _config(args) -> dict:
    return {k: v for k, v in vars(args).items() if k != "func"}


def _emit(report: dict, out: str | None) -> None:
    text = json.dumps(report, indent=2, default=_json_default)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, (set, tuple)):
        return list(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _envelope(command: str, args, body: dict, started: float) -> dict:
    return {"tool": "beliefsim", "version": __version__, "command": command,
            "config": _config(args), "elapsed_seconds": time.perf_counter() - started, **body}


# --------------------------------------------------------------------------
# commands


def cmd_validate(args) -> int:
    started = time.perf_counter()
    path = Path(args.net)
    if not path.exists():
        path = fixture_path(path.name)
    net = parse_network(path.read_text(encoding="utf-8"), check=False)
    report = validate(net)
    body = {"findings": [f.__dict__ for f in report.findings], "variables": list(net.names)}
    if report.ok:
        net = report.normalized
        body["topological_order"] = list(net.order)
        body["arcs"] = [f"{a}-{b}" for a, b in net.arcs]
        body["markov_blankets"] = {n: list(markov_blanket(net, n).members) for n in net.names}
    _emit(_envelope("validate", args, body, started), args.out)
    return 0 if report.ok else 1


def cmd_exact(args) -> int:
    started = time.perf_counter()
    net = resolve_network(args.net)
    evidence = parse_assignments(args.evidence, net)
    queries = parse_names(args.query) or [n for n in net.names if n not in evidence]
    table = exact_posteriors(net, evidence, queries)
    _emit(_envelope("exact", args, table.to_dict(), started), args.out)
    return 0 if table.defined else 1


def cmd_sample(args) -> int:
    started = time.perf_counter()
    net = resolve_network(args.net)
    evidence = parse_assignments(args.evidence, net)
    queries = parse_names(args.query) or [n for n in net.names if n not in evidence]
    rng = sm.RngStream(_seed(args))
    n = args.n
    scheme = args.scheme
    if scheme == "logic":
        if evidence:
            raise UsageError("logic sampling takes no evidence; use --scheme rejection")
        rep, trace = sm.logic_estimate(net, queries, n, rng)
    elif scheme == "rejection":
        rep, trace = sm.rejection_estimate(net, evidence, queries, n, rng)
    elif scheme == "lw":
        rep, trace = sm.likelihood_weighting_estimate(net, evidence, queries, n, rng)
    elif scheme == "uniform":
        rep, trace = sm.uniform_proposal_estimate(net, evidence, queries, n, rng)
    elif scheme == "clamped-forward":
        rep, trace = sm.clamped_forward_estimate(net, evidence, queries, n, rng)
    else:
        sweeps = args.sweeps or n
        order = parse_names(args.scan_order) or None
        if scheme == "gibbs":
            rep, trace = sm.gibbs_run(net, evidence, args.init, sweeps, order, rng, queries,
                                      burn_in=args.burn_in)
        else:
            groups = parse_groups(args.groups)
            if groups is None:
                groups = sm.sampling_groups(net, evidence)
            rep, trace = sm.blocked_gibbs_run(net, evidence, groups, args.init, sweeps, rng,
                                              scan_order=order, queries=queries,
                                              burn_in=args.burn_in)
    if args.trace:
        trace.write_csv(args.trace)
    _emit(_envelope("sample", args, {"seed": rng.seed, "report": rep.to_dict()}, started),
          args.out)
    if rep.extra.get("fixated"):
        print(f"fixation: no state change in {rep.n_total} sweeps", file=sys.stderr)
        return 1
    return 0 if rep.defined else 1


def cmd_diagnose(args) -> int:
    started = time.perf_counter()
    metric = args.metric
    if metric == "sm-sweep":
        grid = [float(x) for x in (args.grid or ",".join(map(str, repro.SM_GRID))).split(",")]
        seed = _seed(args)
        pts = dg.sm_sweep(grid, runs=args.runs, seed=seed, sweeps=args.sweeps)
        if args.csv:
            dg.write_sm_sweep_csv(pts, args.csv)
        else:
            dg.write_sm_sweep_csv(pts, sys.stdout)
        return 0
    net = resolve_network(args.net)
    evidence = parse_assignments(args.evidence, net)
    if metric == "D":
        a, b = parse_arc(args.arc)
        body = dg.pairwise_dependence(net, a, b).to_dict()
    elif metric == "blanket-D":
        body = dg.blanket_dependence(net, args.node).to_dict()
    elif metric == "flip":
        body = {"node": args.node,
                "worst_case_flip_probability": dg.worst_case_flip_probability(net, args.node,
                                                                              evidence)}
    else:
        if not args.trace:
            raise UsageError(f"--metric {metric} needs --trace")
        trace = sm.SampleTrace.read_csv(args.trace, net)
        node = args.node or trace.names[0]
        if metric == "tau":
            body = {"node": node, "value": args.value,
                    "tau_hat": dg.integrated_autocorrelation_time(trace, node, args.value)}
        elif metric == "sojourn":
            body = {"node": node, "sojourns": {k: s.to_dict() for k, s in
                                               dg.sojourn_statistics(trace, node).items()}}
        else:
            truth = args.truth
            if truth is None:
                truth = exact_posteriors(net, evidence, [node]).prob(node, args.value)
            prof = dg.convergence_profile(trace, node, args.value, truth, args.epsilon)
            if args.csv:
                prof.write_csv(args.csv)
            body = {"node": node, "value": args.value, "truth": truth, "epsilon": args.epsilon,
                    "entry_index": prof.entry_index, "tau_hat": prof.tau,
                    "final_estimate": float(prof.running[-1])}
    _emit(_envelope("diagnose", args, body, started), args.out)
    return 0


def cmd_transform(args) -> int:
    started = time.perf_counter()
    net = resolve_network(args.net)
    op = args.op
    if op == "prune":
        evidence, queries = parse_names(args.evidence), parse_names(args.query)
        out, removed = tf.prune(net, evidence, queries)
        plan = tf.TransformPlan([tf.TransformStep("prune", tuple(removed),
                                                  {"variables_removed": len(removed)})],
                                tf.network_digest(net), tuple(evidence), tuple(queries))
    elif op == "reverse":
        a, b = parse_arc(args.arc)
        out = tf.reverse_arc(net, a, b)
        plan = tf.TransformPlan([tf.TransformStep("reverse", (a, b),
                                                  tf._reverse_cost(net, out, a, b))],
                                tf.network_digest(net))
    elif op == "reduce":
        if not args.node:
            raise UsageError("--op reduce needs --node")
        out = tf.reduce_node(net, args.node)
        c = net.children(args.node)[0]
        plan = tf.TransformPlan([tf.TransformStep("reduce", (args.node,),
                                                  {"cpt_entries": int(out.cpts[c].rows.size)})],
                                tf.network_digest(net))
    else:
        plan, out = tf.absorb_evidence(net, parse_names(args.evidence), parse_names(args.query))
    text = serialize_network(out) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if args.plan:
        Path(args.plan).write_text(plan.to_json() + "\n", encoding="utf-8")
    cost = plan.total_cost
    print(f"{op}: {len(plan.steps)} step(s); cost {json.dumps(cost)}; "
          f"{time.perf_counter() - started:.3f}s", file=sys.stderr)
    return 0


def cmd_repro(args) -> int:
    only = parse_names(args.only) or None
    results = repro.run_all(only, args.fixtures, args.seed if args.seed is not None
                            else repro.DEFAULT_SEED, echo=print)
    failed = [c for c in results if not c.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return 1 if failed or not results else 0


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="beliefsim", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"beliefsim {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, net=True):
        if net:
            sp.add_argument("--net", required=True, help="network JSON file or fixture name")
        sp.add_argument("--out", help="write the JSON report here instead of stdout")

    s = sub.add_parser("validate", help="check a network file and print its structure")
    common(s)
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("exact", help="exact posteriors by enumeration")
    common(s)
    s.add_argument("--evidence", help="VAR=VALUE,...")
    s.add_argument("--query", help="VAR,... (default: all non-evidence)")
    s.set_defaults(func=cmd_exact)

    s = sub.add_parser("sample", help="run a stochastic simulation scheme")
    common(s)
    s.add_argument("--scheme", required=True,
                   choices=["logic", "rejection", "lw", "uniform", "gibbs", "blocked-gibbs",
                            "clamped-forward"])
    s.add_argument("--evidence")
    s.add_argument("--query")
    s.add_argument("-n", "--n", dest="n", type=int, default=100_000, help="simulations (forward schemes)")
    s.add_argument("--sweeps", type=int, help="sweeps (Gibbs schemes; default -n)")
    s.add_argument("--seed", type=int)
    s.add_argument("--scan-order", help="VAR,... (default topological)")
    s.add_argument("--init", default="all-true", choices=list(sm.INIT_POLICIES))
    s.add_argument("--groups", help="A+B;C+D, or 'auto' (default) to detect")
    s.add_argument("--burn-in", type=int, default=0)
    s.add_argument("--trace", help="write the per-iteration trace CSV here")
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("diagnose", help="dependence scores and mixing diagnostics")
    s.add_argument("--metric", required=True,
                   choices=["D", "blanket-D", "flip", "tau", "sojourn", "profile", "sm-sweep"])
    s.add_argument("--net")
    s.add_argument("--out")
    s.add_argument("--arc")
    s.add_argument("--node")
    s.add_argument("--evidence")
    s.add_argument("--trace", help="trace CSV from `sample --trace`")
    s.add_argument("--value", default="TRUE")
    s.add_argument("--truth", type=float)
    s.add_argument("--epsilon", type=float, default=0.01)
    s.add_argument("--grid", help="q values for sm-sweep, comma separated")
    s.add_argument("--runs", type=int, default=1)
    s.add_argument("--sweeps", type=int, help="fixed sweeps per sm-sweep point")
    s.add_argument("--seed", type=int)
    s.add_argument("--csv", help="CSV output for profile / sm-sweep")
    s.set_defaults(func=cmd_diagnose)

    s = sub.add_parser("transform", help="prune, reverse, reduce or absorb evidence")
    s.add_argument("--op", required=True, choices=["prune", "reverse", "reduce", "absorb"])
    common(s)
    s.add_argument("--arc")
    s.add_argument("--node")
    s.add_argument("--evidence", help="evidence variable names (values ignored)")
    s.add_argument("--query")
    s.add_argument("--plan", help="write the transform plan JSON here")
    s.set_defaults(func=cmd_transform)

    s = sub.add_parser("repro", help="run the reproduction criteria")
    s.add_argument("--only", help="criterion numbers or tags, comma separated")
    s.add_argument("--fixtures", help="directory holding the fixture JSON files")
    s.add_argument("--seed", type=int)
    s.set_defaults(func=cmd_repro)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "diagnose" and args.metric != "sm-sweep" and not args.net:
            raise UsageError("--net is required for this metric")
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (NetworkError, sm.SamplerError, tf.TransformError, dg.DiagnosticError,
            BudgetExceeded, DegenerateConditional, KeyError, FileNotFoundError,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
