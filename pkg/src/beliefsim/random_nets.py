"""Random binary belief networks for property checks."""

from __future__ import annotations

import numpy as np

from .network import BeliefNetwork, binary, binary_cpt, make_network


def random_network(rng: np.random.Generator, n_nodes: int, edge_prob: float = 0.4,
                   max_parents: int = 3, deterministic_prob: float = 0.1) -> BeliefNetwork:
    """Binary DAG over X0..X{n-1}, arcs only from lower to higher index.

    Declaration order is shuffled so topological order differs from it.
    Some CPT entries are exactly 0 or 1 to exercise zero-probability paths.
    """
    names = [f"X{i}" for i in range(n_nodes)]
    cpts = []
    for i, name in enumerate(names):
        cand = [names[j] for j in range(i) if rng.random() < edge_prob]
        if len(cand) > max_parents:
            cand = list(rng.choice(cand, size=max_parents, replace=False))
        parents = tuple(sorted(cand, key=names.index))
        p = rng.uniform(0.02, 0.98, size=2 ** len(parents))
        flip = rng.random(len(p)) < deterministic_prob
        p[flip] = rng.integers(0, 2, size=int(flip.sum()))
        p = np.round(p, 3)
        cpts.append(binary_cpt(name, parents, p))
    order = list(rng.permutation(n_nodes))
    return make_network([binary(names[k]) for k in order], [cpts[k] for k in order])
