"""Stochastic simulation schemes.

Forward schemes (logic sampling, rejection, likelihood weighting, the
uniform 0.5 proposal, clamped forward sampling) are vectorized over samples.
The clamped Markov-blanket simulator (Gibbs sampling, optionally blocked)
is a sequential scan with a per-unit cache of local conditionals.
"""

from __future__ import annotations

import csv
import itertools
from bisect import bisect_right
from dataclasses import dataclass, field
from operator import itemgetter
from typing import Iterable, Sequence

import numpy as np

from . import estimators
from .network import Assignment, BeliefNetwork, joint_probability
from .oracle import (
    BudgetExceeded,
    DegenerateConditional,
    block_conditional,
    exact_posteriors,
    group_blanket,
    sweep_units,
)

INIT_POLICIES = ("all-true", "all-false", "uniform", "forward")
GROUP_STATE_BUDGET = 1 << 16


class SamplerError(RuntimeError):
    """A scheme precondition failed or the chain hit an unrecoverable state."""


class ImpossibleEvidence(SamplerError):
    pass


class GibbsAbort(SamplerError):
    """The clamped simulation met a degenerate local conditional."""

    def __init__(self, nodes: Sequence[str], state: Assignment, sweep: int):
        shown = ", ".join(f"{k}={v}" for k, v in state.items())
        super().__init__(f"degenerate conditional for {'/'.join(nodes)} at sweep {sweep} "
                         f"in state {{{shown}}}")
        self.nodes = tuple(nodes)
        self.state = dict(state)
        self.sweep = sweep


class RngStream:
    """Seeded uniform stream; same seed and generator give the same draws."""

    def __init__(self, seed: int, generator: str = "PCG64"):
        self.seed = int(seed)
        self.generator = generator
        bitgen = getattr(np.random, generator)
        self._gen = np.random.Generator(bitgen(self.seed))

    def uniform(self, size=None):
        return self._gen.random(size)

    def spawn_seed(self) -> int:
        return int(self._gen.integers(0, 2**63 - 1))

    def describe(self) -> dict:
        return {"seed": self.seed, "generator": f"numpy.{self.generator}"}


@dataclass
class SampleTrace:
    """Per-iteration record of a run: states as value indices, weights, acceptance."""

    scheme: str
    names: tuple[str, ...]
    labels: tuple[tuple[str, ...], ...]
    states: np.ndarray
    weights: np.ndarray
    accepted: np.ndarray
    evidence: dict[str, str] = field(default_factory=dict)
    scan_order: tuple[str, ...] | None = None
    initial_state: dict[str, str] | None = None
    seed: int | None = None

    def __len__(self) -> int:
        return len(self.states)

    @property
    def sweeps(self) -> int:
        return len(self.states)

    def column(self, name: str) -> np.ndarray:
        try:
            return self.states[:, self.names.index(name)]
        except ValueError:
            raise KeyError(f"{name!r} is not in the trace") from None

    def indicator(self, name: str, value: str) -> np.ndarray:
        k = self.labels[self.names.index(name)].index(value)
        return self.column(name) == k

    def write_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["sweep", *self.names, "weight", "accepted"])
            labels = self.labels
            for t, (row, wt, acc) in enumerate(zip(self.states, self.weights, self.accepted), 1):
                w.writerow([t, *(labels[i][v] for i, v in enumerate(row)), repr(float(wt)),
                            int(acc)])

    @classmethod
    def read_csv(cls, path, net: BeliefNetwork, scheme: str = "unknown") -> "SampleTrace":
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        header = rows[0]
        if header[0] != "sweep" or header[-2:] != ["weight", "accepted"]:
            raise ValueError(f"{path}: not a trace file")
        names = tuple(header[1:-2])
        labels = tuple(net.variable(n).values for n in names)
        body = rows[1:]
        states = np.array([[labels[i].index(v) for i, v in enumerate(r[1:-2])] for r in body],
                          dtype=np.int16).reshape(len(body), len(names))
        weights = np.array([float(r[-2]) for r in body])
        accepted = np.array([r[-1] == "1" for r in body], dtype=bool)
        return cls(scheme, names, labels, states, weights, accepted)


@dataclass
class EstimateReport:
    scheme: str
    estimates: dict[str, np.ndarray]
    labels: dict[str, tuple[str, ...]]
    std_error: dict[str, np.ndarray]
    n_total: int
    n_used: int
    acceptance_rate: float | None = None
    ess: float | None = None
    evidence_probability: float | None = None
    defined: bool = True
    notes: list[str] = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def prob(self, name: str, value: str) -> float:
        return float(self.estimates[name][self.labels[name].index(value)])

    def se(self, name: str, value: str) -> float:
        return float(self.std_error[name][self.labels[name].index(value)])

    def to_dict(self) -> dict:
        def vec(d, n):
            if not self.defined:
                return None
            return {lab: float(x) for lab, x in zip(self.labels[n], d[n])}

        out = {
            "scheme": self.scheme,
            "n_total": self.n_total,
            "n_used": self.n_used,
            "defined": self.defined,
            "estimates": {n: vec(self.estimates, n) for n in self.estimates},
            "std_error": {n: vec(self.std_error, n) for n in self.std_error},
        }
        if self.acceptance_rate is not None:
            out["acceptance_rate"] = self.acceptance_rate
        if self.ess is not None:
            out["effective_sample_size"] = self.ess
        if self.evidence_probability is not None:
            out["evidence_probability_estimate"] = self.evidence_probability
        if self.notes:
            out["notes"] = list(self.notes)
        out.update(self.extra)
        return out


# --------------------------------------------------------------------------
# helpers


def _thresholds(probs: Sequence[float]) -> list[float]:
    """Cumulative cut points for inversion; values after the last positive
    entry get an unreachable threshold so they are never selected."""
    cum = np.cumsum(probs)[:-1].tolist()
    last = max(i for i, p in enumerate(probs) if p > 0) if any(p > 0 for p in probs) else 0
    for i in range(last, len(cum)):
        cum[i] = 2.0
    return cum


def draw_index(probs: Sequence[float], u: float) -> int:
    """Value index chosen by a uniform draw: the first k with u < P(v_0) + ... + P(v_k)."""
    return bisect_right(_thresholds(probs), u)


def _check_names(net: BeliefNetwork, names: Iterable[str]) -> list[str]:
    names = list(names)
    for n in names:
        net.variable(n)
    return names


def _evidence_codes(net: BeliefNetwork, evidence: Assignment) -> dict[int, int]:
    net.check_assignment(evidence)
    return {net.index[n]: net.variable(n).index(v) for n, v in evidence.items()}


def _forward_batch(net: BeliefNetwork, n: int, rng: RngStream,
                   clamp: dict[int, int] | None = None) -> tuple[np.ndarray, np.ndarray]:
    """``n`` forward samples; clamped variables are fixed and contribute their
    CPT probability to the returned likelihood weights."""
    clamp = clamp or {}
    v = len(net.names)
    u = rng.uniform((n, v))
    states = np.zeros((n, v), dtype=np.int16)
    weights = np.ones(n)
    for pos, name in enumerate(net.order):
        i = net.index[name]
        parents = [net.index[p] for p in net.parents(name)]
        row = np.zeros(n, dtype=np.int64)
        for p in parents:
            row = row * net.variable(net.names[p]).arity + states[:, p]
        rows = net.cpts[name].rows
        if i in clamp:
            states[:, i] = clamp[i]
            weights *= rows[row, clamp[i]]
            continue
        cuts = np.array([_thresholds(r) for r in rows]).reshape(len(rows), -1)
        states[:, i] = (u[:, pos, None] >= cuts[row]).sum(axis=1)
    return states, weights


def _joint_batch(net: BeliefNetwork, states: np.ndarray) -> np.ndarray:
    p = np.ones(len(states))
    for name in net.names:
        i = net.index[name]
        row = np.zeros(len(states), dtype=np.int64)
        for par in net.parents(name):
            row = row * net.variable(par).arity + states[:, net.index[par]]
        p *= net.cpts[name].rows[row, states[:, i]]
    return p


def _labels(net: BeliefNetwork) -> tuple[tuple[str, ...], ...]:
    return tuple(v.values for v in net.variables)


def _decode(net: BeliefNetwork, row: Sequence[int]) -> dict[str, str]:
    return {v.name: v.values[int(k)] for v, k in zip(net.variables, row)}


def _evidence_possible(net: BeliefNetwork, evidence: Assignment) -> bool | None:
    """Exact check when enumeration is affordable, else None."""
    if not evidence:
        return True
    try:
        return exact_posteriors(net, evidence, []).evidence_probability > 0.0
    except BudgetExceeded:
        return None


def _undefined_note(net: BeliefNetwork, evidence: Assignment) -> str:
    possible = _evidence_possible(net, evidence)
    if possible is False:
        return "evidence is impossible (probability zero)"
    return "no usable samples; evidence possibly impossible"


def _weighted_report(scheme: str, net: BeliefNetwork, queries: list[str], states: np.ndarray,
                     weights: np.ndarray, accepted: np.ndarray, evidence: Assignment,
                     rng: RngStream) -> EstimateReport:
    labels = {q: net.variable(q).values for q in queries}
    est, se = {}, {}
    for q in queries:
        est[q], se[q] = estimators.weighted_frequencies(states[:, net.index[q]].astype(np.int64),
                                                        weights, net.variable(q).arity)
    defined = weights.sum() > 0
    rep = EstimateReport(scheme, est, labels, se, len(states), int(accepted.sum()),
                         acceptance_rate=float(accepted.mean()),
                         ess=estimators.effective_sample_size(weights),
                         evidence_probability=float(weights.mean()), defined=bool(defined),
                         extra={"rng": rng.describe()})
    if not defined:
        rep.notes.append(_undefined_note(net, evidence))
    return rep


# --------------------------------------------------------------------------
# forward schemes


def logic_sample(net: BeliefNetwork, rng: RngStream) -> dict[str, str]:
    """One forward simulation in topological order by cumulative-threshold inversion."""
    states, _ = _forward_batch(net, 1, rng)
    return _decode(net, states[0])


def rejection_estimate(net: BeliefNetwork, evidence: Assignment, queries: Iterable[str],
                       n_simulations: int, rng: RngStream, scheme: str = "rejection"
                       ) -> tuple[EstimateReport, SampleTrace]:
    """Logic sampling that keeps only the runs matching the evidence."""
    if n_simulations < 1:
        raise ValueError("n_simulations must be positive")
    queries = _check_names(net, queries)
    ev = _evidence_codes(net, evidence)
    states, _ = _forward_batch(net, n_simulations, rng)
    accepted = np.ones(n_simulations, dtype=bool)
    for i, k in ev.items():
        accepted &= states[:, i] == k
    kept = states[accepted]
    m = len(kept)
    labels = {q: net.variable(q).values for q in queries}
    est = {q: estimators.frequencies(kept[:, net.index[q]].astype(np.int64),
                                     net.variable(q).arity) for q in queries}
    se = {q: estimators.binomial_se(est[q], m) for q in queries}
    rep = EstimateReport(scheme, est, labels, se, n_simulations, m,
                         acceptance_rate=m / n_simulations, defined=m > 0,
                         extra={"rng": rng.describe()})
    if m == 0:
        rep.notes.append(_undefined_note(net, evidence))
    trace = SampleTrace(scheme, net.names, _labels(net), states,
                        accepted.astype(float), accepted, dict(evidence), seed=rng.seed)
    return rep, trace


def logic_estimate(net: BeliefNetwork, queries: Iterable[str], n: int, rng: RngStream
                   ) -> tuple[EstimateReport, SampleTrace]:
    return rejection_estimate(net, {}, queries, n, rng, scheme="logic")


def likelihood_weighting_estimate(net: BeliefNetwork, evidence: Assignment,
                                  queries: Iterable[str], n: int, rng: RngStream
                                  ) -> tuple[EstimateReport, SampleTrace]:
    """Forward sampling with evidence clamped; weight = product of evidence likelihoods."""
    if n < 1:
        raise ValueError("n must be positive")
    queries = _check_names(net, queries)
    states, weights = _forward_batch(net, n, rng, _evidence_codes(net, evidence))
    accepted = weights > 0
    rep = _weighted_report("lw", net, queries, states, weights, accepted, evidence, rng)
    trace = SampleTrace("lw", net.names, _labels(net), states, weights, accepted,
                        dict(evidence), seed=rng.seed)
    return rep, trace


def uniform_proposal_estimate(net: BeliefNetwork, evidence: Assignment,
                              queries: Iterable[str], n: int, rng: RngStream
                              ) -> tuple[EstimateReport, SampleTrace]:
    """Every variable drawn with probability 0.5; mismatches with the evidence are
    discarded and survivors carry weight joint / 0.5**(number of variables)."""
    if not net.is_binary():
        raise SamplerError("uniform proposal requires an all-binary network")
    if n < 1:
        raise ValueError("n must be positive")
    queries = _check_names(net, queries)
    ev = _evidence_codes(net, evidence)
    states = (rng.uniform((n, len(net.names))) >= 0.5).astype(np.int16)
    accepted = np.ones(n, dtype=bool)
    for i, k in ev.items():
        accepted &= states[:, i] == k
    weights = np.where(accepted, _joint_batch(net, states) * 2.0 ** len(net.names), 0.0)
    rep = _weighted_report("uniform", net, queries, states, weights, accepted, evidence, rng)
    trace = SampleTrace("uniform", net.names, _labels(net), states, weights, accepted,
                        dict(evidence), seed=rng.seed)
    return rep, trace


def clamped_forward_violations(net: BeliefNetwork, evidence: Iterable[str]) -> list[tuple[str, str]]:
    """Arcs from non-evidence variables into evidence variables."""
    ev = set(evidence)
    return [(p, c) for p, c in net.arcs if c in ev and p not in ev]


def clamped_forward_estimate(net: BeliefNetwork, evidence: Assignment, queries: Iterable[str],
                             n: int, rng: RngStream) -> tuple[EstimateReport, SampleTrace]:
    """Forward sampling with evidence fixed, valid once evidence has only evidence parents."""
    bad = clamped_forward_violations(net, evidence)
    if bad:
        arcs = ", ".join(f"{p}->{c}" for p, c in bad)
        raise SamplerError(f"evidence variables have non-evidence parents: {arcs}")
    if n < 1:
        raise ValueError("n must be positive")
    queries = _check_names(net, queries)
    states, weights = _forward_batch(net, n, rng, _evidence_codes(net, evidence))
    if evidence and not weights[0] > 0:
        raise ImpossibleEvidence("evidence has probability zero")
    labels = {q: net.variable(q).values for q in queries}
    est = {q: estimators.frequencies(states[:, net.index[q]].astype(np.int64),
                                     net.variable(q).arity) for q in queries}
    se = {q: estimators.binomial_se(est[q], n) for q in queries}
    rep = EstimateReport("clamped-forward", est, labels, se, n, n, acceptance_rate=1.0,
                         extra={"rng": rng.describe()})
    ones = np.ones(n)
    trace = SampleTrace("clamped-forward", net.names, _labels(net), states, ones,
                        ones.astype(bool), dict(evidence), seed=rng.seed)
    return rep, trace


# --------------------------------------------------------------------------
# deterministic groups


@dataclass(frozen=True)
class DeterministicGroup:
    members: tuple[str, ...]
    external_parents: tuple[str, ...]
    external_children: tuple[str, ...]


def is_functional(net: BeliefNetwork, name: str) -> bool:
    rows = net.cpts[name].rows
    return bool(net.parents(name)) and bool(np.all((rows == 0.0) | (rows == 1.0)))


def detect_deterministic_groups(net: BeliefNetwork) -> list[DeterministicGroup]:
    """Maximal sets of functional variables (all CPT entries 0 or 1) joined by arcs."""
    functional = [n for n in net.names if is_functional(net, n)]
    fset = set(functional)
    seen: set[str] = set()
    groups = []
    for start in functional:
        if start in seen:
            continue
        comp, stack = [], [start]
        while stack:
            n = stack.pop()
            if n in seen:
                continue
            seen.add(n)
            comp.append(n)
            stack.extend(m for m in net.parents(n) + net.children(n) if m in fset)
        members = tuple(m for m in net.names if m in comp)
        ext_p = tuple(dict.fromkeys(p for m in members for p in net.parents(m) if p not in comp))
        ext_c = tuple(dict.fromkeys(c for m in members for c in net.children(m) if c not in comp))
        groups.append(DeterministicGroup(members, ext_p, ext_c))
    return groups


def sampling_groups(net: BeliefNetwork, evidence: Iterable[str] = ()) -> list[tuple[str, ...]]:
    """Blocks for blocked Gibbs: each deterministic group together with the
    parents that determine it, evidence removed, overlapping blocks merged."""
    ev = set(evidence)
    blocks: list[set[str]] = []
    for g in detect_deterministic_groups(net):
        block = {m for m in g.members + g.external_parents if m not in ev}
        if not block:
            continue
        for other in [b for b in blocks if b & block]:
            blocks.remove(other)
            block |= other
        blocks.append(block)
    return [tuple(n for n in net.names if n in b) for b in blocks if len(b) > 1]


# --------------------------------------------------------------------------
# clamped Markov-blanket simulation


def initial_state(net: BeliefNetwork, evidence: Assignment, policy: str,
                  rng: RngStream) -> dict[str, str]:
    if policy not in INIT_POLICIES:
        raise ValueError(f"unknown init policy {policy!r}; choose from {INIT_POLICIES}")
    if policy == "forward":
        clamp = _evidence_codes(net, evidence)
        for _ in range(10_000):
            states, w = _forward_batch(net, 1, rng, clamp)
            if w[0] > 0:
                return _decode(net, states[0])
        raise ImpossibleEvidence("could not draw a forward sample consistent with the evidence")
    state = {}
    for v in net.variables:
        if v.name in evidence:
            state[v.name] = evidence[v.name]
        elif policy == "all-true":
            state[v.name] = "TRUE" if "TRUE" in v.values else v.values[-1]
        elif policy == "all-false":
            state[v.name] = "FALSE" if "FALSE" in v.values else v.values[0]
        else:
            state[v.name] = v.values[min(int(rng.uniform() * v.arity), v.arity - 1)]
    return state


class _Unit:
    __slots__ = ("members", "idx", "blanket", "key", "configs", "cache", "binary")

    def __init__(self, net: BeliefNetwork, members: tuple[str, ...]):
        self.members = members
        self.idx = [net.index[m] for m in members]
        self.blanket = [net.index[b] for b in group_blanket(net, members)]
        if not self.blanket:
            self.key = lambda state: ()
        else:
            self.key = itemgetter(*self.blanket)
        self.configs = list(itertools.product(*[range(net.variable(m).arity) for m in members]))
        self.cache: dict = {}
        self.binary = len(members) == 1 and net.variable(members[0]).arity == 2


def _chain(net: BeliefNetwork, evidence: Assignment, units: list[tuple[str, ...]], init: str,
           n_sweeps: int, rng: RngStream, scheme: str, scan_order: Sequence[str],
           check_evidence: bool) -> SampleTrace:
    net.check_assignment(evidence)
    if n_sweeps < 1:
        raise ValueError("n_sweeps must be positive")
    if check_evidence and _evidence_possible(net, evidence) is False:
        raise ImpossibleEvidence("evidence has probability zero; clamped simulation is undefined")
    start = initial_state(net, evidence, init, rng)
    if joint_probability(net, start) == 0.0:
        shown = ", ".join(f"{k}={v}" for k, v in start.items())
        raise SamplerError(f"initial state {{{shown}}} has probability zero under init "
                           f"policy {init!r}; use init='forward'")
    values = [v.values for v in net.variables]
    state = [values[i].index(start[n]) for i, n in enumerate(net.names)]
    compiled = [_Unit(net, u) for u in units]
    for u in compiled:
        if len(u.configs) > GROUP_STATE_BUDGET:
            raise SamplerError(f"group {u.members} exceeds {GROUP_STATE_BUDGET} joint states")

    def conditional(u: _Unit, key, sweep: int):
        others = {net.names[j]: values[j][state[j]] for j in u.blanket}
        try:
            probs = block_conditional(net, u.members, others)
        except DegenerateConditional:
            raise GibbsAbort(u.members, _decode(net, state), sweep) from None
        return float(probs[0]) if u.binary else _thresholds(probs.tolist())

    v = len(state)
    flat: list[int] = []
    chunk = max(1, min(n_sweeps, 65536))
    done = 0
    while done < n_sweeps:
        todo = min(chunk, n_sweeps - done)
        draws = iter(rng.uniform(todo * len(compiled)).tolist())
        for sweep in range(done, done + todo):
            for u in compiled:
                key = u.key(state)
                cut = u.cache.get(key)
                if cut is None:
                    cut = u.cache[key] = conditional(u, key, sweep + 1)
                if u.binary:
                    state[u.idx[0]] = 0 if next(draws) < cut else 1
                else:
                    k = bisect_right(cut, next(draws))
                    for j, val in zip(u.idx, u.configs[k]):
                        state[j] = val
            flat.extend(state)
        done += todo
    states = np.array(flat, dtype=np.int16).reshape(n_sweeps, v)
    ones = np.ones(n_sweeps)
    return SampleTrace(scheme, net.names, _labels(net), states, ones, ones.astype(bool),
                       dict(evidence), tuple(scan_order), start, rng.seed)


def _chain_report(net: BeliefNetwork, trace: SampleTrace, queries: list[str], burn_in: int,
                  n_batches: int, rng: RngStream) -> EstimateReport:
    states = trace.states[burn_in:]
    m = len(states)
    labels = {q: net.variable(q).values for q in queries}
    est, se = {}, {}
    for q in queries:
        col = states[:, net.index[q]].astype(np.int64)
        arity = net.variable(q).arity
        est[q] = estimators.frequencies(col, arity)
        se[q] = np.array([estimators.batch_means_se(col == k, n_batches) for k in range(arity)])
    changes = int(np.any(trace.states[1:] != trace.states[:-1], axis=1).sum())
    init_row = np.array([net.variable(n).index(trace.initial_state[n]) for n in net.names])
    changes += int(np.any(trace.states[0] != init_row))
    free = [n for n in net.names if n not in trace.evidence]
    rep = EstimateReport(trace.scheme, est, labels, se, trace.sweeps, m, defined=m > 0,
                         extra={"rng": rng.describe(), "burn_in": burn_in,
                                "scan_order": list(trace.scan_order or ()),
                                "initial_state": trace.initial_state,
                                "state_changes": changes,
                                "fixated": bool(free) and changes == 0})
    if free and changes == 0:
        rep.notes.append(f"fixation: the state never changed in {trace.sweeps} sweeps")
    return rep


def gibbs_run(net: BeliefNetwork, evidence: Assignment, init: str = "all-true",
              n_sweeps: int = 1000, scan_order: Sequence[str] | None = None,
              rng: RngStream | None = None, queries: Iterable[str] | None = None,
              burn_in: int = 0, n_batches: int = estimators.DEFAULT_BATCHES,
              check_evidence: bool = True) -> tuple[EstimateReport, SampleTrace]:
    """Clamped simulation: evidence fixed, every other variable resampled in turn
    from its Markov-blanket conditional; estimates are per-sweep frequencies."""
    return blocked_gibbs_run(net, evidence, (), init, n_sweeps, rng, scan_order=scan_order,
                             queries=queries, burn_in=burn_in, n_batches=n_batches,
                             check_evidence=check_evidence, scheme="gibbs")


def blocked_gibbs_run(net: BeliefNetwork, evidence: Assignment, groups: Iterable[Iterable[str]],
                      init: str = "all-true", n_sweeps: int = 1000, rng: RngStream | None = None,
                      scan_order: Sequence[str] | None = None,
                      queries: Iterable[str] | None = None, burn_in: int = 0,
                      n_batches: int = estimators.DEFAULT_BATCHES, check_evidence: bool = True,
                      scheme: str = "blocked-gibbs") -> tuple[EstimateReport, SampleTrace]:
    """Like :func:`gibbs_run`, but each group is drawn jointly from its exact
    conditional given the group's Markov blanket."""
    rng = rng if rng is not None else RngStream(0)
    order = list(net.order if scan_order is None else scan_order)
    if sorted(order) != sorted(net.names):
        raise ValueError("scan order must list every variable exactly once")
    units = sweep_units(net, evidence, order, groups)
    queries = _check_names(net, net.names if queries is None else queries)
    if not 0 <= burn_in < n_sweeps:
        raise ValueError("burn_in must be smaller than n_sweeps")
    trace = _chain(net, evidence, units, init, n_sweeps, rng, scheme, order, check_evidence)
    rep = _chain_report(net, trace, queries, burn_in, n_batches, rng)
    rep.extra["units"] = [list(u) for u in units]
    return rep, trace


__all__ = [
    "DeterministicGroup",
    "EstimateReport",
    "GibbsAbort",
    "ImpossibleEvidence",
    "RngStream",
    "SampleTrace",
    "SamplerError",
    "blocked_gibbs_run",
    "clamped_forward_estimate",
    "detect_deterministic_groups",
    "draw_index",
    "gibbs_run",
    "likelihood_weighting_estimate",
    "logic_estimate",
    "logic_sample",
    "rejection_estimate",
    "sampling_groups",
    "uniform_proposal_estimate",
]
