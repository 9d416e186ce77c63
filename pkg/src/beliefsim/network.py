"""Belief-network data model, JSON file format, validation and joint probabilities."""

from __future__ import annotations

import json
from fractions import Fraction
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

ROW_TOLERANCE = 1e-9
BINARY_VALUES = ("FALSE", "TRUE")

Assignment = Mapping[str, str]


class NetworkError(ValueError):
    """Raised when a network cannot be built or parsed."""


class NetworkSyntaxError(NetworkError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")
        self.line = line
        self.column = column


class NetworkValidationError(NetworkError):
    def __init__(self, report: "ValidationReport"):
        lines = "; ".join(f.message for f in report.errors)
        super().__init__(f"invalid network: {lines}")
        self.report = report


@dataclass(frozen=True)
class Variable:
    name: str
    values: tuple[str, ...] = BINARY_VALUES

    @property
    def arity(self) -> int:
        return len(self.values)

    def index(self, value: str) -> int:
        try:
            return self.values.index(value)
        except ValueError:
            raise KeyError(f"{value!r} is not a value of {self.name} {list(self.values)}") from None


@dataclass(frozen=True, eq=False)
class Cpt:
    """Conditional probability table.

    ``rows[i]`` is the child distribution under the i-th parent configuration,
    enumerated row-major over ``parents`` in declared value order.
    """

    child: str
    parents: tuple[str, ...]
    rows: np.ndarray

    def __post_init__(self):
        rows = np.array(self.rows, dtype=float)
        if rows.ndim == 1:
            rows = rows[None, :]
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "parents", tuple(self.parents))


@dataclass(frozen=True)
class Finding:
    level: str  # "error" | "warning"
    code: str
    message: str


@dataclass
class ValidationReport:
    findings: list[Finding] = field(default_factory=list)
    normalized: "BeliefNetwork | None" = None

    @property
    def errors(self) -> list[Finding]:
        return [f for f in self.findings if f.level == "error"]

    @property
    def warnings(self) -> list[Finding]:
        return [f for f in self.findings if f.level == "warning"]

    @property
    def ok(self) -> bool:
        return not self.errors


@dataclass(frozen=True, eq=False)
class BeliefNetwork:
    """A DAG of discrete variables, one CPT per variable.

    Construction does not check invariants; use :func:`make_network` or
    :func:`parse_network` to obtain a validated instance.
    """

    variables: tuple[Variable, ...]
    cpts: Mapping[str, Cpt]

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "cpts", dict(self.cpts))

    @cached_property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    @cached_property
    def index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.names)}

    @cached_property
    def _by_name(self) -> dict[str, Variable]:
        return {v.name: v for v in self.variables}

    def variable(self, name: str) -> Variable:
        try:
            return self._by_name[name]
        except KeyError:
            raise KeyError(f"unknown variable {name!r}") from None

    def parents(self, name: str) -> tuple[str, ...]:
        return self.cpts[name].parents

    @cached_property
    def _children(self) -> dict[str, tuple[str, ...]]:
        kids: dict[str, list[str]] = {n: [] for n in self.names}
        for name in self.names:
            for p in self.cpts[name].parents:
                kids[p].append(name)
        return {k: tuple(v) for k, v in kids.items()}

    def children(self, name: str) -> tuple[str, ...]:
        return self._children[name]

    @cached_property
    def arcs(self) -> tuple[tuple[str, str], ...]:
        return tuple((p, n) for n in self.names for p in self.cpts[n].parents)

    @cached_property
    def order(self) -> tuple[str, ...]:
        return tuple(topological_order(self))

    def is_binary(self) -> bool:
        return all(v.arity == 2 for v in self.variables)

    def table(self, name: str) -> np.ndarray:
        """CPT as an array shaped ``(*parent_arities, child_arity)``."""
        cpt = self.cpts[name]
        shape = [self.variable(p).arity for p in cpt.parents] + [self.variable(name).arity]
        return cpt.rows.reshape(shape)

    def row_index(self, name: str, assignment: Assignment) -> int:
        idx = 0
        for p in self.cpts[name].parents:
            var = self.variable(p)
            idx = idx * var.arity + var.index(assignment[p])
        return idx

    def prob(self, name: str, assignment: Assignment) -> float:
        """P(name = assignment[name] | parents as assigned)."""
        row = self.cpts[name].rows[self.row_index(name, assignment)]
        return float(row[self.variable(name).index(assignment[name])])

    def check_assignment(self, assignment: Assignment) -> None:
        for name, value in assignment.items():
            self.variable(name).index(value)

    def replace(self, variables: Iterable[Variable] | None = None,
                cpts: Mapping[str, Cpt] | None = None) -> "BeliefNetwork":
        return BeliefNetwork(self.variables if variables is None else tuple(variables),
                             self.cpts if cpts is None else cpts)

    def subnetwork(self, keep: Iterable[str]) -> "BeliefNetwork":
        keep = set(keep)
        missing = {p for n in keep for p in self.cpts[n].parents} - keep
        if missing:
            raise NetworkError(f"subnetwork is not ancestrally closed: needs {sorted(missing)}")
        return BeliefNetwork(tuple(v for v in self.variables if v.name in keep),
                             {n: self.cpts[n] for n in self.names if n in keep})


def make_network(variables: Iterable[Variable], cpts: Iterable[Cpt]) -> BeliefNetwork:
    """Build and validate a network; small row-sum drift is normalized."""
    cpts = list(cpts)
    table: dict[str, Cpt] = {}
    for cpt in cpts:
        if cpt.child in table:
            raise NetworkError(f"variable {cpt.child!r} has more than one CPT")
        table[cpt.child] = cpt
    net = BeliefNetwork(tuple(variables), table)
    report = validate(net)
    if not report.ok:
        raise NetworkValidationError(report)
    return report.normalized


def binary(name: str) -> Variable:
    return Variable(name, BINARY_VALUES)


def binary_cpt(child: str, parents: Iterable[str], p_true: Iterable[float] | float) -> Cpt:
    """CPT for a binary child from P(TRUE) per parent configuration."""
    p = [float(x) for x in np.atleast_1d(np.asarray(p_true, dtype=float))]
    # complement in decimal arithmetic so 0.999 pairs with 0.001, not 0.0010000000000000009
    q = [float(1 - Fraction(repr(x))) for x in p]
    return Cpt(child, tuple(parents), np.column_stack([q, p]))


# --------------------------------------------------------------------------
# validation


def _find_cycle(names: list[str], parents: Mapping[str, Iterable[str]]) -> list[str] | None:
    colour = {n: 0 for n in names}
    stack: list[str] = []

    def visit(n: str) -> list[str] | None:
        colour[n] = 1
        stack.append(n)
        for p in parents.get(n, ()):
            if p not in colour:
                continue
            if colour[p] == 1:
                return stack[stack.index(p):] + [p]
            if colour[p] == 0:
                found = visit(p)
                if found:
                    return found
        stack.pop()
        colour[n] = 2
        return None

    for n in names:
        if colour[n] == 0:
            found = visit(n)
            if found:
                return found[::-1]
    return None


def validate(net: BeliefNetwork) -> ValidationReport:
    """Check every structural and numerical invariant of ``net``.

    Rows whose sum is off by at most ``ROW_TOLERANCE`` are rescaled and reported
    as warnings; the rescaled network is returned as ``report.normalized`` when
    there are no errors.
    """
    report = ValidationReport()
    err = lambda code, msg: report.findings.append(Finding("error", code, msg))
    warn = lambda code, msg: report.findings.append(Finding("warning", code, msg))

    names = [v.name for v in net.variables]
    seen: set[str] = set()
    arity: dict[str, int] = {}
    for v in net.variables:
        if not v.name:
            err("empty-name", "variable with empty name")
        if v.name in seen:
            err("duplicate-variable", f"variable {v.name!r} declared twice")
        seen.add(v.name)
        if len(v.values) < 2:
            err("domain-size", f"variable {v.name!r} needs at least two values")
        if len(set(v.values)) != len(v.values):
            err("duplicate-value", f"variable {v.name!r} has repeated values")
        arity[v.name] = len(v.values)

    for name in names:
        if name not in net.cpts:
            err("missing-cpt", f"variable {name!r} has no CPT")
    for child in net.cpts:
        if child not in seen:
            err("unknown-child", f"CPT for undeclared variable {child!r}")

    new_cpts = dict(net.cpts)
    for child, cpt in net.cpts.items():
        if cpt.child != child:
            err("cpt-key", f"CPT stored under {child!r} describes {cpt.child!r}")
        bad = [p for p in cpt.parents if p not in seen]
        if bad:
            err("unknown-parent", f"CPT of {child!r} names undeclared parents {bad}")
            continue
        if len(set(cpt.parents)) != len(cpt.parents) or child in cpt.parents:
            err("bad-parents", f"CPT of {child!r} has repeated or self parents")
            continue
        if child not in arity:
            continue
        n_rows = int(np.prod([arity[p] for p in cpt.parents], dtype=int))
        rows = cpt.rows
        if rows.shape != (n_rows, arity[child]):
            err("cpt-shape", f"CPT of {child!r} has shape {rows.shape}, expected {(n_rows, arity[child])}")
            continue
        if not np.all(np.isfinite(rows)) or rows.min() < 0.0 or rows.max() > 1.0:
            err("cpt-range", f"CPT of {child!r} has entries outside [0, 1]")
            continue
        sums = rows.sum(axis=1)
        fixed = rows
        for i, s in enumerate(sums):
            dev = abs(s - 1.0)
            if dev > ROW_TOLERANCE:
                err("row-sum", f"CPT of {child!r} row {i} sums to {s!r}")
            elif dev > 0.0:
                warn("row-normalized", f"CPT of {child!r} row {i} sums to {s!r}; normalized")
                if fixed is rows:
                    fixed = rows.copy()
                fixed[i] = rows[i] / s
        if fixed is not rows:
            new_cpts[child] = Cpt(child, cpt.parents, fixed)

    parent_map = {c: cpt.parents for c, cpt in net.cpts.items()}
    cycle = _find_cycle(names, parent_map)
    if cycle:
        err("cycle", "directed cycle " + " -> ".join(cycle))

    if report.ok:
        report.normalized = net if new_cpts == dict(net.cpts) else net.replace(cpts=new_cpts)
    return report


# --------------------------------------------------------------------------
# graph utilities


def topological_order(net: BeliefNetwork) -> list[str]:
    """Parents before children; FIFO over declaration order for ties."""
    indeg = {n: len(net.cpts[n].parents) for n in net.names}
    queue = deque(n for n in net.names if indeg[n] == 0)
    out: list[str] = []
    while queue:
        n = queue.popleft()
        out.append(n)
        for c in net.children(n):
            indeg[c] -= 1
            if indeg[c] == 0:
                queue.append(c)
    if len(out) != len(net.names):
        raise NetworkError("network contains a directed cycle")
    return out


def ancestors(net: BeliefNetwork, nodes: Iterable[str]) -> set[str]:
    """``nodes`` together with all their ancestors."""
    out: set[str] = set()
    stack = list(nodes)
    while stack:
        n = stack.pop()
        if n in out:
            continue
        out.add(n)
        stack.extend(net.parents(n))
    return out


def descendants(net: BeliefNetwork, node: str) -> set[str]:
    out: set[str] = set()
    stack = list(net.children(node))
    while stack:
        n = stack.pop()
        if n not in out:
            out.add(n)
            stack.extend(net.children(n))
    return out


# --------------------------------------------------------------------------
# probabilities


def joint_probability(net: BeliefNetwork, full: Assignment) -> float:
    """Product of the CPT entries selected by a total assignment."""
    missing = [n for n in net.names if n not in full]
    if missing:
        raise ValueError(f"assignment is partial; missing {missing}")
    p = 1.0
    for name in net.names:
        p *= net.prob(name, full)
    return p


# --------------------------------------------------------------------------
# file format


def network_to_dict(net: BeliefNetwork) -> dict:
    return {
        "variables": [{"name": v.name, "values": list(v.values)} for v in net.variables],
        "cpts": [
            {"child": n, "parents": list(net.cpts[n].parents),
             "rows": [[float(x) for x in row] for row in net.cpts[n].rows]}
            for n in net.names
        ],
    }


def serialize_network(net: BeliefNetwork) -> str:
    """JSON text with one variable and one CPT per line."""
    doc = network_to_dict(net)
    var_lines = ",\n".join("    " + json.dumps(v) for v in doc["variables"])
    cpt_lines = ",\n".join("    " + json.dumps(c) for c in doc["cpts"])
    return '{\n  "variables": [\n' + var_lines + '\n  ],\n  "cpts": [\n' + cpt_lines + "\n  ]\n}"


def network_from_dict(data: Mapping, check: bool = True) -> BeliefNetwork:
    """Build a network from the JSON document; ``check=False`` skips validation."""
    try:
        variables = [Variable(str(v["name"]), tuple(str(x) for x in v["values"]))
                     for v in data["variables"]]
        cpts = [Cpt(str(c["child"]), tuple(str(p) for p in c.get("parents", [])),
                    np.asarray(c["rows"], dtype=float))
                for c in data["cpts"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise NetworkSyntaxError(f"malformed network document: {exc!r}") from None
    for cpt in cpts:
        if cpt.rows.ndim != 2:
            raise NetworkSyntaxError(f"rows of {cpt.child!r} must be a list of lists")
    if not check:
        return BeliefNetwork(tuple(variables), {c.child: c for c in cpts})
    return make_network(variables, cpts)


def parse_network(text: str, check: bool = True) -> BeliefNetwork:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NetworkSyntaxError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(data, dict):
        raise NetworkSyntaxError("top level must be an object")
    return network_from_dict(data, check)


def load_network(path) -> BeliefNetwork:
    with open(path, encoding="utf-8") as fh:
        return parse_network(fh.read())


def networks_equal(a: BeliefNetwork, b: BeliefNetwork, atol: float = 1e-12) -> bool:
    if a.variables != b.variables or set(a.cpts) != set(b.cpts):
        return False
    for n in a.names:
        ca, cb = a.cpts[n], b.cpts[n]
        if ca.parents != cb.parents or ca.rows.shape != cb.rows.shape:
            return False
        if not np.allclose(ca.rows, cb.rows, rtol=0.0, atol=atol):
            return False
    return True
