"""Graph modification: pruning, arc reversal, node reduction, evidence absorption.

All transforms are pure; each returns a new validated network.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .factors import Factor, cpt_factor, multiply
from .network import (
    BeliefNetwork,
    Cpt,
    NetworkError,
    ancestors,
    serialize_network,
    validate,
)


class TransformError(NetworkError):
    pass


@dataclass(frozen=True)
class TransformStep:
    kind: str  # prune | reverse | reduce
    operands: tuple[str, ...]
    cost: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "operands": list(self.operands), "cost": dict(self.cost)}


@dataclass
class TransformPlan:
    steps: list[TransformStep]
    input_digest: str
    evidence: tuple[str, ...] = ()
    queries: tuple[str, ...] = ()

    @property
    def total_cost(self) -> dict:
        total: dict[str, int] = {}
        for s in self.steps:
            for k, v in s.cost.items():
                if isinstance(v, int):
                    total[k] = total.get(k, 0) + v
        return total

    def to_dict(self) -> dict:
        return {
            "input_digest": self.input_digest,
            "evidence": list(self.evidence),
            "queries": list(self.queries),
            "steps": [s.to_dict() for s in self.steps],
            "total_cost": self.total_cost,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> "TransformPlan":
        steps = [TransformStep(s["kind"], tuple(s["operands"]), dict(s.get("cost", {})))
                 for s in data["steps"]]
        return cls(steps, data["input_digest"], tuple(data.get("evidence", ())),
                   tuple(data.get("queries", ())))


def network_digest(net: BeliefNetwork) -> str:
    return hashlib.sha256(serialize_network(net).encode("utf-8")).hexdigest()


def _finish(net: BeliefNetwork) -> BeliefNetwork:
    report = validate(net)
    if not report.ok:
        raise TransformError("; ".join(f.message for f in report.errors))
    return report.normalized


def _cpt_from_factor(f: Factor, child: str, parents: tuple[str, ...]) -> Cpt:
    arr = f.transpose(parents + (child,)).values
    return Cpt(child, parents, arr.reshape(-1, arr.shape[-1]))


# --------------------------------------------------------------------------
# pruning


def prune(net: BeliefNetwork, evidence: Iterable[str], queries: Iterable[str]
          ) -> tuple[BeliefNetwork, list[str]]:
    """Drop every variable with no directed path to an evidence or query variable."""
    keep = ancestors(net, list(evidence) + list(queries))
    removed = [n for n in net.names if n not in keep]
    return net.subnetwork(keep), removed


# --------------------------------------------------------------------------
# arc reversal


def alternate_path(net: BeliefNetwork, a: str, b: str) -> list[str] | None:
    """A directed path a -> ... -> b other than the arc itself, if one exists."""
    prev: dict[str, str] = {}
    stack = [c for c in net.children(a) if c != b]
    for c in stack:
        prev[c] = a
    while stack:
        n = stack.pop()
        if n == b:
            path = [b]
            while path[-1] != a:
                path.append(prev[path[-1]])
            return path[::-1]
        for c in net.children(n):
            if c not in prev:
                prev[c] = n
                stack.append(c)
    return None


def reverse_arc(net: BeliefNetwork, a: str, b: str) -> BeliefNetwork:
    """Reverse a -> b by Bayes' rule; both ends inherit each other's parents.

    Zero-probability configurations of the new P(b | ...) get a uniform
    conditional for a; the joint distribution is unchanged either way.
    """
    if a not in net.parents(b):
        raise TransformError(f"no arc {a}->{b}")
    path = alternate_path(net, a, b)
    if path:
        raise TransformError(f"reversing {a}->{b} would create a cycle via {' -> '.join(path)}")
    pa_a = net.parents(a)
    pa_b = tuple(p for p in net.parents(b) if p != a)
    new_pa_b = pa_b + tuple(p for p in pa_a if p not in pa_b)
    new_pa_a = new_pa_b + (b,)
    f = multiply([cpt_factor(net, a), cpt_factor(net, b)])
    marg_b = f.sum_out([a])
    fb = marg_b.transpose(new_pa_b + (b,))
    fab = f.transpose(new_pa_a + (a,))
    denom = fb.values[..., None]
    arity_a = fab.values.shape[-1]
    with np.errstate(invalid="ignore", divide="ignore"):
        cond_a = np.where(denom > 0, fab.values / np.where(denom > 0, denom, 1.0), 1.0 / arity_a)
    cpts = dict(net.cpts)
    cpts[b] = _cpt_from_factor(fb, b, new_pa_b)
    cpts[a] = _cpt_from_factor(Factor(new_pa_a + (a,), cond_a), a, new_pa_a)
    out = _finish(net.replace(cpts=cpts))
    out.order  # raises on a cycle
    return out


def _reverse_cost(before: BeliefNetwork, after: BeliefNetwork, a: str, b: str) -> dict:
    new_arcs = set(after.arcs) - set(before.arcs)
    return {
        "cpt_entries": int(after.cpts[a].rows.size + after.cpts[b].rows.size),
        "arcs_added": len(new_arcs - {(b, a)}),
    }


# --------------------------------------------------------------------------
# node reduction


def reduce_node(net: BeliefNetwork, x: str) -> BeliefNetwork:
    """Sum ``x`` out into its only child; the child inherits x's parents."""
    kids = net.children(x)
    if len(kids) != 1:
        raise TransformError(
            f"{x} has {len(kids)} children; node reduction needs exactly one "
            "(reverse arcs first so the marginal is not split across children)")
    c = kids[0]
    pa_c = tuple(p for p in net.parents(c) if p != x)
    new_pa_c = pa_c + tuple(p for p in net.parents(x) if p not in pa_c)
    f = multiply([cpt_factor(net, x), cpt_factor(net, c)]).sum_out([x])
    cpts = {n: cpt for n, cpt in net.cpts.items() if n != x}
    cpts[c] = _cpt_from_factor(f, c, new_pa_c)
    return _finish(BeliefNetwork(tuple(v for v in net.variables if v.name != x), cpts))


# --------------------------------------------------------------------------
# evidence absorption


def apply_step(net: BeliefNetwork, step: TransformStep) -> BeliefNetwork:
    if step.kind == "reverse":
        return reverse_arc(net, *step.operands)
    if step.kind == "reduce":
        return reduce_node(net, *step.operands)
    if step.kind == "prune":
        return net.subnetwork(n for n in net.names if n not in set(step.operands))
    raise TransformError(f"unknown step kind {step.kind!r}")


def replay(net: BeliefNetwork, plan: TransformPlan) -> BeliefNetwork:
    if network_digest(net) != plan.input_digest:
        raise TransformError("plan was made for a different input network")
    for step in plan.steps:
        net = apply_step(net, step)
    return net


def absorb_evidence(net: BeliefNetwork, evidence: Iterable[str], queries: Iterable[str]
                    ) -> tuple[TransformPlan, BeliefNetwork]:
    """Reverse arcs into evidence variables until every evidence parent is itself
    evidence, then prune what no longer reaches evidence or queries.

    Evidence variables are handled in (current) topological order; for each,
    incoming arcs from non-evidence parents are reversed latest-parent first.
    """
    ev = list(dict.fromkeys(evidence))
    qs = list(dict.fromkeys(queries))
    for n in ev + qs:
        net.variable(n)
    if set(ev) & set(qs):
        raise TransformError("evidence and query sets must be disjoint")
    plan = TransformPlan([], network_digest(net), tuple(ev), tuple(qs))
    evset = set(ev)
    done: set[str] = set()
    current = net
    while len(done) < len(evset):
        target = next(n for n in current.order if n in evset and n not in done)
        while True:
            pos = {n: i for i, n in enumerate(current.order)}
            outside = [p for p in current.parents(target) if p not in evset]
            if not outside:
                break
            parent = max(outside, key=pos.__getitem__)
            after = reverse_arc(current, parent, target)
            plan.steps.append(TransformStep("reverse", (parent, target),
                                            _reverse_cost(current, after, parent, target)))
            current = after
        done.add(target)
    pruned, removed = prune(current, ev, qs)
    if removed:
        plan.steps.append(TransformStep("prune", tuple(removed),
                                        {"cpt_entries": 0, "arcs_added": 0,
                                         "variables_removed": len(removed)}))
    return plan, pruned
