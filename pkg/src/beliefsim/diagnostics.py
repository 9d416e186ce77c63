"""Dependence scores, simulation multiples and mixing diagnostics."""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .network import Assignment, BeliefNetwork
from .oracle import BudgetExceeded, DegenerateConditional, blanket_conditional, markov_blanket

FLIP_BUDGET = 1 << 20


class DiagnosticError(ValueError):
    pass


def _decimal(p: float) -> Fraction:
    # CPT entries are entered as decimals; summing them exactly keeps D = 0.002 from
    # turning into 0.0020000000000000018 and SM into 499.99999999999955.
    return Fraction(repr(float(p)))


@dataclass(frozen=True)
class DependenceReport:
    subject: str
    method: str  # pairwise | blanket-formula | worst-case-flip
    D: float
    exact: Fraction | None = None
    notes: tuple[str, ...] = ()

    @property
    def SM(self) -> float:
        if self.D == 0:
            return math.inf
        if self.exact is not None:
            return float(1 / self.exact)
        return 1.0 / self.D

    @property
    def infinite(self) -> bool:
        return self.D == 0

    def to_dict(self) -> dict:
        return {"subject": self.subject, "method": self.method, "D": self.D,
                "SM": "inf" if self.infinite else self.SM, "notes": list(self.notes)}


def _min_link(p: float) -> Fraction:
    q = _decimal(p)
    return min(q, 1 - q)


def pairwise_dependence(net: BeliefNetwork, parent: str, child: str) -> DependenceReport:
    """D = sum over parent values of min(P(child|value), 1 - P(child|value)); SM = 1/D."""
    if net.parents(child) != (parent,):
        raise DiagnosticError(f"{parent} must be the only parent of {child}; use blanket_dependence")
    if net.variable(parent).arity != 2 or net.variable(child).arity != 2:
        raise DiagnosticError("pairwise dependence is defined for binary pairs only")
    total = sum((_min_link(row[1]) for row in net.cpts[child].rows), Fraction(0))
    return DependenceReport(f"{parent}->{child}", "pairwise", float(total), total)


def blanket_dependence(net: BeliefNetwork, node: str) -> DependenceReport:
    """Markov-blanket extension of the pairwise score.

    Sums, over configurations of the variables indexing the rows of the
    node's link matrices (its own CPT if it has parents, each child's CPT),
    the product of min(p, 1 - p) across those rows. A node with no links
    falls back to its prior. Reduces to :func:`pairwise_dependence` on a
    two-node network.
    """
    if not net.is_binary():
        raise DiagnosticError("blanket dependence is defined for binary networks")
    links = ([node] if net.parents(node) else []) + list(net.children(node))
    notes = ("interpretation-dependent: sum over link-row configurations of products of minima",)
    if not links:
        return DependenceReport(node, "blanket-formula", float(_min_link(net.cpts[node].rows[0][1])),
                                _min_link(net.cpts[node].rows[0][1]),
                                notes + ("no links: prior used",))
    index_vars = list(dict.fromkeys(p for f in links for p in net.parents(f)))
    total = Fraction(0)
    for config in itertools.product((0, 1), repeat=len(index_vars)):
        where = dict(zip(index_vars, config))
        term = Fraction(1)
        for f in links:
            row = 0
            for p in net.parents(f):
                row = row * 2 + where[p]
            term *= _min_link(net.cpts[f].rows[row][1])
            if term == 0:
                break
        total += term
    return DependenceReport(node, "blanket-formula", float(total), total, notes)


def worst_case_flip_probability(net: BeliefNetwork, node: str, evidence: Assignment | None = None
                                ) -> float:
    """Smallest probability, over evidence-consistent blanket states, that a single
    resampling of ``node`` lands on its less likely value.

    Blanket states whose conditional is degenerate are unreachable and skipped.
    """
    evidence = dict(evidence or {})
    members = [m for m in markov_blanket(net, node).members if m not in evidence]
    count = int(np.prod([net.variable(m).arity for m in members], dtype=object))
    if count > FLIP_BUDGET:
        raise BudgetExceeded(f"{count} blanket states exceeds {FLIP_BUDGET}")
    worst = math.inf
    state = dict(evidence)
    for config in itertools.product(*[net.variable(m).values for m in members]):
        state.update(zip(members, config))
        try:
            cond = blanket_conditional(net, node, state)
        except DegenerateConditional:
            continue
        worst = min(worst, float(cond.min()))
    if math.isinf(worst):
        raise DiagnosticError(f"no blanket state of {node} is consistent with the evidence")
    return worst


# --------------------------------------------------------------------------
# trace diagnostics


@dataclass
class SojournStats:
    value: str
    lengths: np.ndarray
    censored_last: bool

    @property
    def count(self) -> int:
        return len(self.lengths)

    @property
    def mean(self) -> float:
        return float(self.lengths.mean()) if len(self.lengths) else math.nan

    @property
    def max(self) -> int:
        return int(self.lengths.max()) if len(self.lengths) else 0

    def complete(self) -> np.ndarray:
        """Lengths of the runs that ended inside the trace."""
        return self.lengths[:-1] if self.censored_last else self.lengths

    def to_dict(self) -> dict:
        return {"value": self.value, "count": self.count, "mean": self.mean, "max": self.max,
                "censored_last": self.censored_last}


def run_lengths(series: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Values and lengths of maximal constant runs."""
    series = np.asarray(series)
    if len(series) == 0:
        return series[:0], np.zeros(0, dtype=np.int64)
    cuts = np.flatnonzero(series[1:] != series[:-1]) + 1
    starts = np.concatenate([[0], cuts])
    ends = np.concatenate([cuts, [len(series)]])
    return series[starts], ends - starts


def sojourn_statistics(trace, node: str) -> dict[str, SojournStats]:
    """Run-length distribution per value of ``node``; the final run is censored."""
    col = trace.column(node)
    if len(col) == 0:
        raise DiagnosticError("empty trace")
    labels = trace.labels[trace.names.index(node)]
    vals, lens = run_lengths(col)
    out = {}
    for k, lab in enumerate(labels):
        mask = vals == k
        out[lab] = SojournStats(lab, lens[mask], bool(mask[-1]))
    return out


def mode_sojourns(trace, mode: Assignment) -> SojournStats:
    """Run lengths of the sweeps during which every variable in ``mode`` holds its value."""
    inside = np.ones(len(trace), dtype=bool)
    for name, value in mode.items():
        inside &= trace.indicator(name, value)
    vals, lens = run_lengths(inside)
    mask = vals.astype(bool)
    label = ",".join(f"{k}={v}" for k, v in mode.items())
    return SojournStats(label, lens[mask], bool(len(mask) and mask[-1]))


def autocorrelation(x: np.ndarray) -> np.ndarray:
    """Normalized autocorrelation function of a 1-D series (FFT, biased estimator)."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    x = x - x.mean()
    size = 1 << (2 * n - 1).bit_length()
    f = np.fft.rfft(x, size)
    acov = np.fft.irfft(f * np.conj(f), size)[:n]
    if acov[0] <= 0.0:
        raise DiagnosticError("constant series: autocorrelation undefined")
    return acov / acov[0]


def tau_from_series(x: np.ndarray) -> float:
    """Integrated autocorrelation time 1 + 2 sum rho(t), truncated by the initial
    positive sequence of paired autocorrelations."""
    rho = autocorrelation(x)
    n = len(rho)
    total = -1.0
    for k in range(0, n - 1, 2):
        pair = rho[k] + rho[k + 1]
        if pair <= 0.0:
            break
        total += 2.0 * pair
    return max(1.0, total)


def integrated_autocorrelation_time(trace, node: str, value: str = "TRUE") -> float:
    return tau_from_series(trace.indicator(node, value))


@dataclass
class ConvergenceProfile:
    running: np.ndarray
    truth: float
    epsilon: float
    entry_index: int | None
    tau: float | None = None
    sojourns: dict = field(default_factory=dict)

    @property
    def error(self) -> np.ndarray:
        return self.running - self.truth

    def write_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["sweep", "estimate", "error"])
            for t, (est, err) in enumerate(zip(self.running, self.error), 1):
                w.writerow([t, repr(float(est)), repr(float(err))])


def entry_index(series: np.ndarray, truth: float, epsilon: float) -> int | None:
    """First 1-based t after which |running mean - truth| < epsilon holds to the end."""
    x = np.asarray(series, dtype=float)
    running = np.cumsum(x) / np.arange(1, len(x) + 1)
    outside = np.flatnonzero(np.abs(running - truth) >= epsilon)
    if len(outside) == 0:
        return 1
    last = int(outside[-1]) + 1
    return None if last == len(x) else last + 1


def convergence_profile(trace, node: str, value: str, truth: float, epsilon: float,
                        with_tau: bool = True) -> ConvergenceProfile:
    x = trace.indicator(node, value).astype(float)
    running = np.cumsum(x) / np.arange(1, len(x) + 1)
    tau = None
    if with_tau:
        try:
            tau = tau_from_series(x)
        except DiagnosticError:
            tau = None
    return ConvergenceProfile(running, truth, epsilon, entry_index(x, truth, epsilon), tau,
                              sojourn_statistics(trace, node))


# --------------------------------------------------------------------------
# simulation-multiple curve


@dataclass
class SweepPoint:
    q: float
    D: float
    SM_pred: float
    tau_hat: float
    runs: int
    sweeps: int


def sm_sweep(grid: Sequence[float], runs: int = 1, seed: int = 0,
             sweeps: int | None = None, min_sweeps: int = 200_000,
             per_q: float = 1000.0) -> list[SweepPoint]:
    """Predicted SM = 1/(2q) against measured autocorrelation time on the symmetric
    two-node family P(a)=0.5, P(b|a)=1-q, P(b|not a)=q."""
    from .fixtures import symmetric_pair
    from .samplers import RngStream, gibbs_run

    seeds = np.random.SeedSequence(seed)
    out = []
    for q, child in zip(grid, seeds.spawn(len(grid))):
        if not 0.0 < q <= 0.5:
            raise DiagnosticError(f"q={q} outside (0, 0.5]")
        net = symmetric_pair(q)
        dep = pairwise_dependence(net, "A", "B")
        n = sweeps if sweeps is not None else max(min_sweeps, int(math.ceil(per_q / q)))
        taus = []
        for run_seed in child.generate_state(runs, dtype=np.uint64):
            _, trace = gibbs_run(net, {}, n_sweeps=n, rng=RngStream(int(run_seed)), queries=["A"])
            taus.append(integrated_autocorrelation_time(trace, "A", "TRUE"))
        out.append(SweepPoint(q, dep.D, dep.SM, float(np.mean(taus)), runs, n))
    return out


def write_sm_sweep_csv(points: Iterable[SweepPoint], path_or_file) -> None:
    close = False
    if isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__"):
        fh = open(path_or_file, "w", newline="", encoding="utf-8")
        close = True
    else:
        fh = path_or_file
    try:
        w = csv.writer(fh)
        w.writerow(["q", "D", "SM_pred", "tau_hat", "runs"])
        for p in points:
            w.writerow([repr(p.q), repr(p.D), repr(p.SM_pred), repr(p.tau_hat), p.runs])
    finally:
        if close:
            fh.close()
