"""Shipped example networks and builders for the parametric families.

See PROVENANCE.md in this directory for which parameters come from the
original worked examples and which are reconstructions.
"""

from __future__ import annotations

from pathlib import Path

from ..network import BeliefNetwork, binary, binary_cpt, load_network, make_network, serialize_network

FIXTURE_DIR = Path(__file__).resolve().parent

FIXTURE_NAMES = ("fig2-1", "fig2-2", "fig2-4", "fig3-2-like", "fig3-3-like", "det-pair", "fork")


def fixture_path(name: str, directory: Path | str | None = None) -> Path:
    base = Path(directory) if directory is not None else FIXTURE_DIR
    stem = name[:-5] if name.endswith(".json") else name
    return base / f"{stem}.json"


def load_fixture(name: str, directory: Path | str | None = None) -> BeliefNetwork:
    return load_network(fixture_path(name, directory))


def resolve_network(source: str) -> BeliefNetwork:
    """Load ``source`` as a path if it exists, else as a shipped fixture name."""
    path = Path(source)
    if path.exists():
        return load_network(path)
    candidate = fixture_path(path.name)
    if candidate.exists():
        return load_network(candidate)
    raise FileNotFoundError(f"no network file or fixture named {source!r}")


def two_node(p_a: float, p_b_given_not_a: float, p_b_given_a: float) -> BeliefNetwork:
    return make_network(
        [binary("A"), binary("B")],
        [binary_cpt("A", (), p_a), binary_cpt("B", ("A",), [p_b_given_not_a, p_b_given_a])],
    )


def symmetric_pair(q: float) -> BeliefNetwork:
    """P(a) = 0.5, P(b|a) = 1 - q, P(b|not a) = q."""
    return two_node(0.5, q, 1.0 - q)


def fig2_1() -> BeliefNetwork:
    return make_network(
        [binary(n) for n in "ABCDE"],
        [
            binary_cpt("A", (), 0.01),
            binary_cpt("B", ("A",), [0.01, 0.99]),
            binary_cpt("C", (), 0.01),
            binary_cpt("D", ("C",), [0.01, 0.99]),
            # E is the deterministic OR of B and D
            binary_cpt("E", ("B", "D"), [0.0, 1.0, 1.0, 1.0]),
        ],
    )


def fig2_2() -> BeliefNetwork:
    return two_node(0.5, 0.001, 0.999)


def fig2_4() -> BeliefNetwork:
    return two_node(0.5, 0.5, 0.999)


def fig3_2_like() -> BeliefNetwork:
    return make_network(
        [binary(n) for n in ("A", "B", "J1", "J2", "J3", "J4", "M", "K")],
        [
            binary_cpt("A", (), 0.2),
            binary_cpt("B", (), 0.3),
            binary_cpt("J1", ("A",), [0.05, 0.9]),
            binary_cpt("J2", ("A", "B"), [0.02, 0.7, 0.8, 0.97]),
            binary_cpt("J3", ("B",), [0.1, 0.9]),
            binary_cpt("J4", ("B",), [0.05, 0.85]),
            binary_cpt("M", ("J3",), [0.3, 0.8]),
            binary_cpt("K", ("J2", "M"), [0.05, 0.6, 0.5, 0.95]),
        ],
    )


FIG3_2_EVIDENCE = {"J1": "TRUE", "J2": "TRUE", "J3": "FALSE", "J4": "TRUE"}
FIG3_2_QUERIES = ("K",)


def fig3_3_like() -> BeliefNetwork:
    return make_network(
        [binary(n) for n in "ABC"],
        [
            binary_cpt("A", (), 0.5),
            binary_cpt("B", ("A",), [0.2, 0.7]),
            binary_cpt("C", ("B",), [0.001, 0.999]),
        ],
    )


def det_pair() -> BeliefNetwork:
    return two_node(0.5, 0.0, 1.0)


def fork() -> BeliefNetwork:
    return make_network(
        [binary(n) for n in ("X", "Y", "Z")],
        [
            binary_cpt("X", (), 0.4),
            binary_cpt("Y", ("X",), [0.3, 0.8]),
            binary_cpt("Z", ("X",), [0.6, 0.1]),
        ],
    )


BUILDERS = {
    "fig2-1": fig2_1,
    "fig2-2": fig2_2,
    "fig2-4": fig2_4,
    "fig3-2-like": fig3_2_like,
    "fig3-3-like": fig3_3_like,
    "det-pair": det_pair,
    "fork": fork,
}


def write_fixtures(directory: Path | str | None = None) -> None:
    base = Path(directory) if directory is not None else FIXTURE_DIR
    base.mkdir(parents=True, exist_ok=True)
    for name, build in BUILDERS.items():
        fixture_path(name, base).write_text(serialize_network(build()) + "\n", encoding="utf-8")
