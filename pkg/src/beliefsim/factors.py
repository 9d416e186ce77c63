"""Dense discrete factors: products, sums and reorderings over named axes."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .network import BeliefNetwork

_LETTERS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


@dataclass(frozen=True, eq=False)
class Factor:
    scope: tuple[str, ...]
    values: np.ndarray

    def __mul__(self, other: "Factor") -> "Factor":
        return multiply([self, other])

    def sum_out(self, names: Iterable[str]) -> "Factor":
        names = set(names)
        axes = tuple(i for i, n in enumerate(self.scope) if n in names)
        scope = tuple(n for n in self.scope if n not in names)
        return Factor(scope, self.values.sum(axis=axes))

    def transpose(self, scope: Iterable[str]) -> "Factor":
        scope = tuple(scope)
        perm = [self.scope.index(n) for n in scope]
        return Factor(scope, np.transpose(self.values, perm))

    def reduce(self, assignment: dict[str, int]) -> "Factor":
        """Slice at fixed value indices for the named axes present in the scope."""
        index = tuple(assignment.get(n, slice(None)) for n in self.scope)
        return Factor(tuple(n for n in self.scope if n not in assignment), self.values[index])


def cpt_factor(net: BeliefNetwork, name: str) -> Factor:
    return Factor(net.parents(name) + (name,), net.table(name))


def multiply(factors: list[Factor], scope: Iterable[str] | None = None) -> Factor:
    """Product of factors via einsum; output scope defaults to first-appearance order."""
    if scope is None:
        order: list[str] = []
        for f in factors:
            order.extend(n for n in f.scope if n not in order)
        scope = order
    scope = tuple(scope)
    every = list(dict.fromkeys(n for f in factors for n in f.scope))
    if len(every) > len(_LETTERS):
        raise ValueError("too many variables for a dense factor product")
    letter = {n: _LETTERS[i] for i, n in enumerate(every)}
    subscripts = ",".join("".join(letter[n] for n in f.scope) for f in factors)
    subscripts += "->" + "".join(letter[n] for n in scope)
    return Factor(scope, np.einsum(subscripts, *[f.values for f in factors]))


def joint_factor(net: BeliefNetwork) -> Factor:
    """The full joint as one dense array, axes in declaration order."""
    return multiply([cpt_factor(net, n) for n in net.names], scope=net.names)
