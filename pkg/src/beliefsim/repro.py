"""Reproduction suite: every acceptance criterion as a runnable check.

Each criterion returns one or more :class:`Check` rows (reference value,
measured value, tolerance, verdict). Used by ``beliefsim repro`` and by
``tests/test_acceptance.py``.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

from . import diagnostics as dg
from . import samplers as sm
from . import transforms as tf
from .factors import joint_factor
from .fixtures import FIG3_2_EVIDENCE, FIG3_2_QUERIES, load_fixture
from .network import BeliefNetwork, networks_equal
from .oracle import (
    blanket_conditional,
    exact_posteriors,
    exact_state_distribution,
    gibbs_sweep_kernel,
)
from .random_nets import random_network

DEFAULT_SEED = 20240611
SM_GRID = (0.5, 0.25, 0.1, 0.05, 0.01, 0.005, 0.001)


@dataclass
class Check:
    criterion: int
    name: str
    reference: str
    measured: str
    tolerance: str
    passed: bool

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return (f"[{verdict}] C{self.criterion:<2} {self.name}: reference {self.reference}; "
                f"measured {self.measured}; tolerance {self.tolerance}")


class Context:
    def __init__(self, fixtures_dir: Path | str | None = None, seed: int = DEFAULT_SEED):
        self.fixtures_dir = fixtures_dir
        self.seed = seed
        self._nets: dict[str, BeliefNetwork] = {}

    def net(self, name: str) -> BeliefNetwork:
        if name not in self._nets:
            self._nets[name] = load_fixture(name, self.fixtures_dir)
        return self._nets[name]

    def rng(self, salt: int) -> sm.RngStream:
        return sm.RngStream(self.seed + salt)


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.6g}"
    return str(x)


def close(c: int, name: str, measured: float, reference: float, tol: float,
          ref_text: str | None = None) -> Check:
    ok = bool(abs(measured - reference) <= tol)
    return Check(c, name, ref_text or _fmt(reference), _fmt(measured), f"abs {tol:g}", ok)


def exact(c: int, name: str, measured: float, reference: float) -> Check:
    return Check(c, name, _fmt(reference), repr(measured), "exact", measured == reference)


def within(c: int, name: str, measured: float, lo: float, hi: float, ref_text: str) -> Check:
    ok = bool(lo <= measured <= hi)
    return Check(c, name, ref_text, _fmt(measured), f"[{lo:g}, {hi:g}]", ok)


def _bc(net, node, **given) -> float:
    return float(blanket_conditional(net, node, given)[1])


# --------------------------------------------------------------------------
# criteria


def c1_blanket_conditionals(ctx: Context) -> list[Check]:
    net = ctx.net("fig2-1")
    T, F = "TRUE", "FALSE"
    rows = [
        ("P(b|a,e,~d)", _bc(net, "B", A=T, D=F, E=T), 1.0, 1e-9, "1"),
        ("P(b|~a,e,~d)", _bc(net, "B", A=F, D=F, E=T), 1.0, 1e-9, "1"),
        ("P(c|~d)", _bc(net, "C", D=F), 0.0001, 1e-4, "~0.0001"),
        ("P(c|~d) exact", _bc(net, "C", D=F), 0.0001 / (0.0001 + 0.9801), 1e-9,
         "0.01*0.01/(0.01*0.01+0.99*0.99)"),
        ("P(d|~c,b,e)", _bc(net, "D", C=F, B=T, E=T), 0.01, 1e-9, "0.01"),
        ("P(a|b)", _bc(net, "A", B=T), 0.5, 1e-9, "0.5"),
        ("P(b|a,d,e)", _bc(net, "B", A=T, D=T, E=T), 0.99, 1e-9, "0.99"),
        ("P(b|~a,d,e)", _bc(net, "B", A=F, D=T, E=T), 0.01, 1e-9, "0.01"),
    ]
    return [close(1, name, m, r, tol, txt) for name, m, r, tol, txt in rows]


def c2_two_node(ctx: Context) -> list[Check]:
    net = ctx.net("fig2-2")
    dep = dg.pairwise_dependence(net, "A", "B")
    _, trace = sm.gibbs_run(net, {}, n_sweeps=1_000_000, rng=ctx.rng(2), queries=["A"])
    soj = dg.sojourn_statistics(trace, "A")["TRUE"]
    tau = dg.integrated_autocorrelation_time(trace, "A", "TRUE")
    return [
        exact(2, "D(A->B) fig2-2", dep.D, 0.002),
        exact(2, "SM fig2-2", dep.SM, 500.0),
        within(2, "mean TRUE-sojourn of A (1e6 sweeps)", float(soj.complete().mean()), 250, 1000,
               "about 500"),
        within(2, "tau_hat A=TRUE (1e6 sweeps)", tau, 250, 1000, "SM = 500"),
    ]


def c3_fig2_4(ctx: Context) -> list[Check]:
    net = ctx.net("fig2-4")
    dep = dg.pairwise_dependence(net, "A", "B")
    _, trace = sm.gibbs_run(net, {}, n_sweeps=1_000_000, rng=ctx.rng(3), queries=["A"])
    tau = dg.integrated_autocorrelation_time(trace, "A", "TRUE")
    return [
        exact(3, "D(A->B) fig2-4", dep.D, 0.501),
        close(3, "SM fig2-4", dep.SM, 1.996, 1e-3, "~1.996 (rounds to 2)"),
        within(3, "tau_hat A=TRUE (1e6 sweeps)", tau, 1, 4, "SM ~ 2"),
    ]


def c4_rejection_cost(ctx: Context) -> list[Check]:
    net = ctx.net("fig2-1")
    ev = {"E": "TRUE"}
    p_e = exact_posteriors(net, ev, []).evidence_probability
    n = 1_000_000
    rep, _ = sm.rejection_estimate(net, ev, ["A"], n, ctx.rng(4))
    sigma = math.sqrt(p_e * (1 - p_e) / n)
    return [
        close(4, "oracle P(e) = 1 - 0.9802^2", p_e, 1 - 0.9802 ** 2, 1e-12),
        close(4, "rejection acceptance rate (n=1e6)", rep.acceptance_rate, p_e, 3 * sigma,
              f"P(e)={p_e:.6g} (~1/{1 / p_e:.1f})"),
    ]


def c5_fixation(ctx: Context) -> list[Check]:
    net = ctx.net("fig2-1")
    _, trace = sm.gibbs_run(net, {"E": "TRUE"}, n_sweeps=400_000, rng=ctx.rng(5), queries=["A"])
    soj = dg.mode_sojourns(trace, {"B": "TRUE", "D": "FALSE"})
    mean = float(soj.complete().mean())
    return [within(5, "mean B-mode sojourn before D flips (4e5 sweeps)", mean, 50, 200,
                   "about 100")]


def c6_uniform_acceptance(ctx: Context) -> list[Check]:
    net = ctx.net("fig3-2-like")
    n = 1_000_000
    rep, _ = sm.uniform_proposal_estimate(net, FIG3_2_EVIDENCE, list(FIG3_2_QUERIES), n,
                                          ctx.rng(6))
    p = 1 / 16
    sigma = math.sqrt(p * (1 - p) / n)
    return [close(6, "uniform-proposal acceptance, 4 evidence nodes", rep.acceptance_rate, p,
                  3 * sigma, "1/16")]


def _marginal(net: BeliefNetwork, keep: Iterable[str]) -> np.ndarray:
    keep = list(keep)
    f = joint_factor(net)
    return f.sum_out([n for n in net.names if n not in keep]).transpose(keep).values


def _positive_state(net: BeliefNetwork, rng: np.random.Generator) -> dict[str, str]:
    joint = joint_factor(net).values.ravel()
    k = int(rng.choice(len(joint), p=joint / joint.sum()))
    idx = np.unravel_index(k, [v.arity for v in net.variables])
    return {v.name: v.values[int(i)] for v, i in zip(net.variables, idx)}


def transform_property_errors(seed: int, n_nets: int = 120) -> dict[str, float | int]:
    """Worst deviations of each transform property over random binary DAGs."""
    rng = np.random.default_rng(seed)
    worst = {"prune": 0.0, "reverse": 0.0, "reduce": 0.0, "absorb": 0.0, "double": 0.0,
             "absorb_violations": 0, "nets": 0, "reversals": 0, "reductions": 0}
    for _ in range(n_nets):
        n = int(rng.integers(2, 9))
        net = random_network(rng, n)
        worst["nets"] += 1
        names = list(net.names)

        k = rng.permutation(names)
        ev_names = list(k[: int(rng.integers(0, n))])
        q_names = [x for x in k if x not in ev_names][: int(rng.integers(1, 3))]
        pruned, _ = tf.prune(net, ev_names, q_names)
        diff = np.abs(_marginal(net, pruned.names) - _marginal(pruned, pruned.names)).max()
        worst["prune"] = max(worst["prune"], float(diff))

        arcs = [(a, b) for a, b in net.arcs if tf.alternate_path(net, a, b) is None]
        if arcs:
            a, b = arcs[int(rng.integers(len(arcs)))]
            rev = tf.reverse_arc(net, a, b)
            diff = np.abs(_marginal(net, names) - _marginal(rev, names)).max()
            worst["reverse"] = max(worst["reverse"], float(diff))
            worst["reversals"] += 1

        single = [x for x in names if len(net.children(x)) == 1]
        if single:
            x = single[int(rng.integers(len(single)))]
            red = tf.reduce_node(net, x)
            rest = [m for m in names if m != x]
            diff = np.abs(_marginal(net, rest) - _marginal(red, rest)).max()
            worst["reduce"] = max(worst["reduce"], float(diff))
            worst["reductions"] += 1

        if n >= 2:
            state = _positive_state(net, rng)
            ev = {m: state[m] for m in ev_names} if ev_names else {names[0]: state[names[0]]}
            qs = [m for m in names if m not in ev][:2] or []
            if qs:
                plan, out = tf.absorb_evidence(net, ev, qs)
                worst["absorb_violations"] += len(sm.clamped_forward_violations(out, ev))
                before = exact_posteriors(net, ev, qs)
                after = exact_posteriors(out, ev, qs)
                diff = max(np.abs(before.marginals[q] - after.marginals[q]).max() for q in qs)
                diff = max(diff, abs(before.evidence_probability - after.evidence_probability))
                if not networks_equal(tf.replay(net, plan), out, atol=0.0):
                    diff = math.inf
                worst["absorb"] = max(worst["absorb"], float(diff))

        pair = random_network(rng, 2, edge_prob=1.0, deterministic_prob=0.0)
        root = next(x for x in pair.names if not pair.parents(x))
        child = next(x for x in pair.names if x != root)
        back = tf.reverse_arc(tf.reverse_arc(pair, root, child), child, root)
        same_shape = all(back.parents(x) == pair.parents(x) for x in pair.names)
        diff = max(float(np.abs(back.cpts[x].rows - pair.cpts[x].rows).max())
                   for x in pair.names) if same_shape else math.inf
        worst["double"] = max(worst["double"], diff)
    return worst


def c7_transforms(ctx: Context) -> list[Check]:
    w = transform_property_errors(ctx.seed, n_nets=120)
    tol = 1e-9
    out = [Check(7, "random DAGs tested", ">= 100", str(w["nets"]), "count", w["nets"] >= 100)]
    for key, label in [("prune", "prune preserves survivor marginal"),
                       ("reverse", f"reverse_arc preserves joint ({w['reversals']} arcs)"),
                       ("reduce", f"reduce_node preserves marginal ({w['reductions']} nodes)"),
                       ("double", "reverse twice is identity (two-node)"),
                       ("absorb", "absorb_evidence preserves P(K|J) and replays")]:
        out.append(Check(7, label, "0", f"{w[key]:.3g}", f"<= {tol:g}", w[key] <= tol))
    out.append(Check(7, "absorb output satisfies clamped-forward precondition", "0 violations",
                     str(w["absorb_violations"]), "exact", w["absorb_violations"] == 0))
    return out


def stationarity_errors(net: BeliefNetwork, evidence: dict) -> tuple[float, bool]:
    kern = gibbs_sweep_kernel(net, evidence)
    pi = exact_state_distribution(net, evidence, kern.free)
    resid = float(np.abs(pi @ kern.matrix - pi).max())
    blocked = gibbs_sweep_kernel(net, evidence, groups=[(n,) for n in kern.free])
    return resid, bool(np.array_equal(blocked.matrix, kern.matrix))


def c8_stationarity(ctx: Context) -> list[Check]:
    cases = [("fig2-1 | e", ctx.net("fig2-1"), {"E": "TRUE"}),
             ("fig2-2", ctx.net("fig2-2"), {}),
             ("fig2-4", ctx.net("fig2-4"), {})]
    rng = np.random.default_rng(ctx.seed + 8)
    for i in range(25):
        net = random_network(rng, int(rng.integers(1, 7)))
        state = _positive_state(net, rng)
        ev_names = list(rng.permutation(net.names))[: int(rng.integers(0, min(3, len(net.names))))]
        cases.append((f"random #{i}", net, {m: state[m] for m in ev_names}))
    worst, all_equal = 0.0, True
    for _, net, ev in cases:
        resid, equal = stationarity_errors(net, ev)
        worst = max(worst, resid)
        all_equal &= equal
    return [
        Check(8, f"max |pi K - pi| over {len(cases)} nets", "0", f"{worst:.3g}", "< 1e-09",
              worst < 1e-9),
        Check(8, "blocked(singletons) kernel == gibbs kernel", "entrywise equal",
              str(all_equal), "exact", all_equal),
    ]


def c9_deterministic_pair(ctx: Context) -> list[Check]:
    net = ctx.net("det-pair")
    n = 100_000
    plain, _ = sm.gibbs_run(net, {}, n_sweeps=n, rng=ctx.rng(9))
    groups = sm.sampling_groups(net)
    blocked, _ = sm.blocked_gibbs_run(net, {}, groups, n_sweeps=n, rng=ctx.rng(90))
    p = blocked.prob("A", "TRUE")
    sigma = math.sqrt(0.25 / n)
    return [
        Check(9, "plain Gibbs fixation detected", "no state change",
              f"{plain.extra['state_changes']} changes", "exact", plain.extra["fixated"]),
        close(9, f"blocked Gibbs P(a), groups={groups}", p, 0.5, 3 * sigma, "0.5"),
    ]


def c10_sm_curve(ctx: Context) -> list[Check]:
    pts = dg.sm_sweep(SM_GRID, runs=1, seed=ctx.seed + 10)
    out = []
    for pt in pts:
        ok = pt.SM_pred / 2 <= pt.tau_hat <= pt.SM_pred * 2 and pt.sweeps >= 1000 / pt.q
        out.append(Check(10, f"q={pt.q:g} ({pt.sweeps} sweeps)", f"SM=1/(2q)={pt.SM_pred:.6g}",
                         f"tau_hat={pt.tau_hat:.4g}", "factor 2", ok))
    return out


def c11_reduction(ctx: Context) -> list[Check]:
    net = ctx.net("fig3-3-like")
    dep = dg.pairwise_dependence(net, "B", "C")
    reduced = tf.reduce_node(net, "B")
    n = 1_000_000
    _, before = sm.gibbs_run(net, {}, n_sweeps=n, rng=ctx.rng(11), queries=["C"])
    _, after = sm.gibbs_run(reduced, {}, n_sweeps=n, rng=ctx.rng(110), queries=["C"])
    tau_b = dg.integrated_autocorrelation_time(before, "C", "TRUE")
    tau_a = dg.integrated_autocorrelation_time(after, "C", "TRUE")
    ratio = tau_b / tau_a
    return [
        exact(11, "SM of removed link B->C", dep.SM, 500.0),
        Check(11, "tau_hat(C) before / after reducing B", ">= 50",
              f"{ratio:.4g} ({tau_b:.4g} / {tau_a:.4g})", ">= 50", ratio >= 50),
    ]


CONSISTENCY_CASES = (
    ("fig2-1", {"E": "TRUE"}, None),
    ("fig2-2", {}, None),
    ("fig2-4", {}, None),
    ("fig3-2-like", FIG3_2_EVIDENCE, FIG3_2_QUERIES),
    ("fig3-3-like", {}, None),
    ("fork", {}, None),
)
SCHEMES = ("logic", "rejection", "lw", "uniform", "gibbs", "blocked-gibbs", "clamped-forward")


def run_scheme(scheme: str, net: BeliefNetwork, evidence: dict, queries: list[str], n: int,
               rng: sm.RngStream) -> sm.EstimateReport:
    if scheme == "logic":
        return sm.logic_estimate(net, queries, n, rng)[0]
    if scheme == "rejection":
        return sm.rejection_estimate(net, evidence, queries, n, rng)[0]
    if scheme == "lw":
        return sm.likelihood_weighting_estimate(net, evidence, queries, n, rng)[0]
    if scheme == "uniform":
        return sm.uniform_proposal_estimate(net, evidence, queries, n, rng)[0]
    if scheme == "gibbs":
        return sm.gibbs_run(net, evidence, n_sweeps=n, rng=rng, queries=queries)[0]
    if scheme == "blocked-gibbs":
        groups = sm.sampling_groups(net, evidence)
        return sm.blocked_gibbs_run(net, evidence, groups, n_sweeps=n, rng=rng,
                                    queries=queries)[0]
    if scheme == "clamped-forward":
        _, absorbed = tf.absorb_evidence(net, evidence, queries)
        return sm.clamped_forward_estimate(absorbed, evidence, queries, n, rng)[0]
    raise ValueError(f"unknown scheme {scheme!r}")


def consistency_checks(ctx: Context, n: int = 1_000_000, k_se: float = 5.0) -> list[Check]:
    out = []
    salt = 1200
    for fixture, evidence, designated in CONSISTENCY_CASES:
        net = ctx.net(fixture)
        queries = list(designated or [m for m in net.names if m not in evidence])
        truth = exact_posteriors(net, evidence, queries)
        for scheme in SCHEMES:
            if scheme == "logic" and evidence:
                continue
            salt += 1
            rep = run_scheme(scheme, net, evidence, queries, n, ctx.rng(salt))
            worst_z, detail = 0.0, ""
            for q in queries:
                for k, lab in enumerate(net.variable(q).values[1:], 1):
                    err = abs(rep.estimates[q][k] - truth.marginals[q][k])
                    se = rep.std_error[q][k]
                    z = err / se if se > 0 else (0.0 if err <= 1e-12 else math.inf)
                    if z >= worst_z:
                        worst_z, detail = z, f"{q}={lab}: err {err:.2g}, se {se:.2g}"
            out.append(Check(12, f"{scheme} on {fixture}", "oracle posterior",
                             f"max |z| = {worst_z:.2f} ({detail})", f"<= {k_se:g} se",
                             worst_z <= k_se))
    return out


def c12_consistency(ctx: Context) -> list[Check]:
    return consistency_checks(ctx)


@dataclass(frozen=True)
class Criterion:
    number: int
    title: str
    tags: tuple[str, ...]
    run: Callable[[Context], list[Check]]


CRITERIA = (
    Criterion(1, "worked blanket conditionals", ("fig2-1",), c1_blanket_conditionals),
    Criterion(2, "two-node intransigence", ("fig2-2",), c2_two_node),
    Criterion(3, "well-behaved two-node network", ("fig2-4",), c3_fig2_4),
    Criterion(4, "rejection cost", ("fig2-1",), c4_rejection_cost),
    Criterion(5, "fixation magnitude", ("fig2-1",), c5_fixation),
    Criterion(6, "uniform-proposal acceptance", ("fig3-2-like",), c6_uniform_acceptance),
    Criterion(7, "transform correctness", ("transforms",), c7_transforms),
    Criterion(8, "sweep-kernel stationarity", ("fig2-1", "fig2-2", "fig2-4"), c8_stationarity),
    Criterion(9, "deterministic-group fix", ("det-pair",), c9_deterministic_pair),
    Criterion(10, "simulation-multiple curve", ("sm-sweep",), c10_sm_curve),
    Criterion(11, "node-reduction speedup", ("fig3-3-like",), c11_reduction),
    Criterion(12, "estimator consistency",
              ("fig2-1", "fig2-2", "fig2-4", "fig3-2-like", "fig3-3-like", "fork"),
              c12_consistency),
)


def select(only: Iterable[str] | None = None) -> list[Criterion]:
    if not only:
        return list(CRITERIA)
    wanted = set(only)
    return [c for c in CRITERIA
            if str(c.number) in wanted or f"C{c.number}" in wanted or wanted & set(c.tags)]


def run_criterion(crit: Criterion, ctx: Context) -> tuple[list[Check], float]:
    start = time.perf_counter()
    try:
        checks = crit.run(ctx)
    except Exception as exc:  # a broken fixture must show up as a named failure
        checks = [Check(crit.number, crit.title, "runs", f"{type(exc).__name__}: {exc}",
                        "no error", False)]
    return checks, time.perf_counter() - start


def run_all(only: Iterable[str] | None = None, fixtures_dir=None, seed: int = DEFAULT_SEED,
            echo: Callable[[str], None] | None = None) -> list[Check]:
    ctx = Context(fixtures_dir, seed)
    results: list[Check] = []
    for crit in select(only):
        checks, elapsed = run_criterion(crit, ctx)
        results.extend(checks)
        if echo:
            for chk in checks:
                echo(chk.line())
            echo(f"      C{crit.number} {crit.title}: {elapsed:.1f}s")
    return results
