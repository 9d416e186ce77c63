"""Exact inference by enumeration, Markov blankets and local conditionals.

Everything here is brute force on purpose: it is the ground truth the
samplers and diagnostics are checked against.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .factors import joint_factor
from .network import Assignment, BeliefNetwork

ENUMERATION_BUDGET = 1 << 22
KERNEL_STATE_BUDGET = 1 << 12


class BudgetExceeded(RuntimeError):
    pass


class DegenerateConditional(ArithmeticError):
    """Every candidate value of a node (or group) has probability zero.

    ``vector`` is the all-zero unnormalized conditional; ``state`` is the
    conditioning assignment that produced it.
    """

    def __init__(self, nodes: Sequence[str], state: Assignment, vector: np.ndarray):
        shown = ", ".join(f"{k}={v}" for k, v in sorted(state.items()))
        super().__init__(f"degenerate conditional for {'/'.join(nodes)} given {{{shown}}}")
        self.nodes = tuple(nodes)
        self.state = dict(state)
        self.vector = vector


@dataclass
class PosteriorTable:
    marginals: dict[str, np.ndarray]
    labels: dict[str, tuple[str, ...]]
    evidence_probability: float

    @property
    def defined(self) -> bool:
        return self.evidence_probability > 0.0

    def prob(self, name: str, value: str) -> float:
        return float(self.marginals[name][self.labels[name].index(value)])

    def to_dict(self) -> dict:
        return {
            "evidence_probability": self.evidence_probability,
            "defined": self.defined,
            "posteriors": {
                n: dict(zip(self.labels[n], map(float, vec))) if self.defined else None
                for n, vec in self.marginals.items()
            },
        }


@dataclass(frozen=True)
class MarkovBlanket:
    node: str
    parents: tuple[str, ...]
    children: tuple[str, ...]
    spouses: tuple[str, ...]

    @property
    def members(self) -> tuple[str, ...]:
        return tuple(dict.fromkeys(self.parents + self.children + self.spouses))


def _state_count(net: BeliefNetwork, names: Iterable[str]) -> int:
    return int(np.prod([net.variable(n).arity for n in names], dtype=object))


def _evidence_index(net: BeliefNetwork, evidence: Assignment) -> dict[str, int]:
    return {n: net.variable(n).index(v) for n, v in evidence.items()}


def exact_posteriors(net: BeliefNetwork, evidence: Assignment,
                     queries: Iterable[str] | None = None) -> PosteriorTable:
    """P(query | evidence) for each query variable by full-joint enumeration."""
    queries = list(net.names if queries is None else queries)
    for q in queries:
        net.variable(q)
    if _state_count(net, net.names) > ENUMERATION_BUDGET:
        raise BudgetExceeded(f"joint has more than {ENUMERATION_BUDGET} states")
    ev = _evidence_index(net, evidence)
    joint = joint_factor(net).values
    sliced = joint[tuple(ev.get(n, slice(None)) for n in net.names)]
    free = [n for n in net.names if n not in ev]
    p_evidence = float(sliced.sum())
    marginals: dict[str, np.ndarray] = {}
    for q in queries:
        arity = net.variable(q).arity
        if q in ev:
            vec = np.zeros(arity)
            vec[ev[q]] = 1.0
        elif p_evidence > 0.0:
            axis = free.index(q)
            other = tuple(i for i in range(len(free)) if i != axis)
            vec = sliced.sum(axis=other) / p_evidence
        else:
            vec = np.full(arity, np.nan)
        marginals[q] = vec
    labels = {q: net.variable(q).values for q in queries}
    return PosteriorTable(marginals, labels, p_evidence)


def exact_state_distribution(net: BeliefNetwork, evidence: Assignment,
                             free: Sequence[str]) -> np.ndarray:
    """Posterior over joint states of ``free`` (row-major), given the evidence."""
    if _state_count(net, net.names) > ENUMERATION_BUDGET:
        raise BudgetExceeded(f"joint has more than {ENUMERATION_BUDGET} states")
    ev = _evidence_index(net, evidence)
    joint = joint_factor(net).values
    sliced = joint[tuple(ev.get(n, slice(None)) for n in net.names)]
    rest = [n for n in net.names if n not in ev]
    extra = tuple(i for i, n in enumerate(rest) if n not in free)
    marg = sliced.sum(axis=extra) if extra else sliced
    kept = [n for n in rest if n in free]
    marg = np.transpose(marg, [kept.index(n) for n in free]).reshape(-1)
    total = marg.sum()
    if total <= 0.0:
        raise ZeroDivisionError("evidence has probability zero")
    return marg / total


def markov_blanket(net: BeliefNetwork, node: str) -> MarkovBlanket:
    net.variable(node)
    children = net.children(node)
    spouses = tuple(dict.fromkeys(p for c in children for p in net.parents(c) if p != node))
    return MarkovBlanket(node, net.parents(node), children, spouses)


def group_blanket(net: BeliefNetwork, nodes: Iterable[str]) -> tuple[str, ...]:
    """Joint Markov blanket of a set of nodes, excluding the nodes themselves."""
    nodes = list(nodes)
    inside = set(nodes)
    out: list[str] = []
    for n in nodes:
        out.extend(markov_blanket(net, n).members)
    return tuple(m for m in dict.fromkeys(out) if m not in inside)


def _local_factors(net: BeliefNetwork, nodes: Sequence[str]) -> list[str]:
    """Names of the CPTs that mention any of ``nodes``."""
    touched = list(nodes)
    for n in nodes:
        touched.extend(net.children(n))
    return list(dict.fromkeys(touched))


def block_weights(net: BeliefNetwork, nodes: Sequence[str], others: Assignment) -> np.ndarray:
    """Unnormalized P(nodes = config | rest) over joint configs, row-major."""
    domains = [net.variable(n).values for n in nodes]
    factors = _local_factors(net, nodes)
    state = dict(others)
    out = np.empty(_state_count(net, nodes))
    for k, config in enumerate(itertools.product(*domains)):
        state.update(zip(nodes, config))
        w = 1.0
        for f in factors:
            w *= net.prob(f, state)
            if w == 0.0:
                break
        out[k] = w
    return out


def block_conditional(net: BeliefNetwork, nodes: Sequence[str], others: Assignment) -> np.ndarray:
    """Exact conditional of a group of nodes given its joint Markov blanket."""
    w = block_weights(net, nodes, others)
    total = w.sum()
    if total <= 0.0:
        raise DegenerateConditional(nodes, {k: others[k] for k in group_blanket(net, nodes)
                                            if k in others}, w)
    return w / total


def blanket_conditional(net: BeliefNetwork, node: str, others: Assignment) -> np.ndarray:
    """P(node | W_node): own CPT entry times each child's CPT entry, normalized.

    ``others`` must assign every member of the node's Markov blanket; any
    other entries are ignored.
    """
    missing = [m for m in markov_blanket(net, node).members if m not in others]
    if missing:
        raise KeyError(f"blanket of {node} not assigned: {missing}")
    return block_conditional(net, (node,), others)


@dataclass
class SweepKernel:
    free: tuple[str, ...]
    units: tuple[tuple[str, ...], ...]
    matrix: np.ndarray

    def state_labels(self, net: BeliefNetwork) -> list[dict[str, str]]:
        domains = [net.variable(n).values for n in self.free]
        return [dict(zip(self.free, c)) for c in itertools.product(*domains)]


def sweep_units(net: BeliefNetwork, evidence: Assignment, scan_order: Sequence[str] | None = None,
                groups: Iterable[Iterable[str]] | None = None) -> list[tuple[str, ...]]:
    """Update units for one sweep: groups and leftover singletons.

    Evidence members are dropped from groups; units are ordered by the
    position of their earliest member in ``scan_order`` (default topological).
    """
    order = list(net.order if scan_order is None else scan_order)
    free = [n for n in order if n not in evidence]
    pos = {n: i for i, n in enumerate(free)}
    units: list[tuple[str, ...]] = []
    covered: set[str] = set()
    for g in groups or ():
        members = tuple(sorted((m for m in g if m not in evidence), key=lambda m: pos[m]))
        if not members:
            continue
        if covered & set(members):
            raise ValueError("groups must be disjoint")
        covered.update(members)
        units.append(members)
    units.extend((n,) for n in free if n not in covered)
    units.sort(key=lambda u: pos[u[0]])
    return units


def gibbs_sweep_kernel(net: BeliefNetwork, evidence: Assignment,
                       scan_order: Sequence[str] | None = None,
                       groups: Iterable[Iterable[str]] | None = None) -> SweepKernel:
    """Transition matrix of one full sequential sweep over non-evidence states.

    A unit whose conditional is degenerate (only possible from zero-probability
    states) is left unchanged, which keeps every row stochastic.
    """
    net.check_assignment(evidence)
    free = tuple(n for n in net.names if n not in evidence)
    units = sweep_units(net, evidence, scan_order, groups)
    shape = tuple(net.variable(n).arity for n in free)
    n_states = int(np.prod(shape, dtype=int)) if shape else 1
    if n_states > KERNEL_STATE_BUDGET:
        raise BudgetExceeded(f"{n_states} states exceeds kernel budget {KERNEL_STATE_BUDGET}")
    labels = [dict(zip(free, c)) for c in
              itertools.product(*[net.variable(n).values for n in free])]
    m = np.eye(n_states).reshape((n_states,) + shape)
    for unit in units:
        axes = [free.index(n) for n in unit]
        trans = np.empty(n_states)
        stuck = np.zeros(n_states, dtype=bool)
        cache: dict[tuple, np.ndarray | None] = {}
        for s, lab in enumerate(labels):
            key = tuple(lab[n] for n in free if n not in unit)
            if key not in cache:
                state = dict(evidence)
                state.update(lab)
                try:
                    cache[key] = block_conditional(net, unit, state)
                except DegenerateConditional:
                    cache[key] = None
            cond = cache[key]
            if cond is None:
                stuck[s] = True
                trans[s] = 0.0
                continue
            idx = 0
            for n in unit:
                var = net.variable(n)
                idx = idx * var.arity + var.index(lab[n])
            trans[s] = cond[idx]
        summed = m.sum(axis=tuple(a + 1 for a in axes), keepdims=True)
        new = summed * trans.reshape(shape)
        if stuck.any():
            new = np.where(stuck.reshape(shape), m, new)
        m = new
    return SweepKernel(free, tuple(units), m.reshape(n_states, n_states))
