import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from beliefsim.fixtures import FIXTURE_NAMES, det_pair, load_fixture
from beliefsim.network import binary, binary_cpt, joint_probability, make_network
from beliefsim.oracle import (
    BudgetExceeded,
    DegenerateConditional,
    blanket_conditional,
    exact_posteriors,
    exact_state_distribution,
    gibbs_sweep_kernel,
    markov_blanket,
)
from beliefsim.random_nets import random_network

T, F = "TRUE", "FALSE"


def _stationary_error(net, evidence, **kw):
    k = gibbs_sweep_kernel(net, evidence, **kw)
    pi = exact_state_distribution(net, evidence, k.free)
    return np.abs(pi @ k.matrix - pi).max(), k


class TestExactPosteriors:
    def test_fig22_no_evidence(self, fig22):
        table = exact_posteriors(fig22, {}, ["A", "B"])
        assert table.prob("A", T) == pytest.approx(0.5)
        assert table.prob("B", T) == pytest.approx(0.5)

    def test_fig21_evidence_e(self, fig21):
        table = exact_posteriors(fig21, {"E": T}, ["A"])
        assert table.evidence_probability == pytest.approx(1 - 0.9802 ** 2, abs=1e-12)
        assert table.prob("A", T) == pytest.approx(0.2526, abs=1e-4)

    def test_impossible_evidence_undefined(self, fig21):
        ev = {"A": F, "B": F, "C": F, "D": F, "E": T}
        table = exact_posteriors(fig21, ev, [])
        assert not table.defined
        assert table.to_dict()["defined"] is False

    @pytest.mark.parametrize("name", FIXTURE_NAMES)
    def test_vectors_sum_to_one(self, name):
        net = load_fixture(name)
        table = exact_posteriors(net, {})
        for vec in table.marginals.values():
            assert abs(vec.sum() - 1.0) < 1e-9

    def test_budget(self):
        names = [f"X{i}" for i in range(23)]
        net = make_network([binary(n) for n in names], [binary_cpt(n, (), 0.5) for n in names])
        with pytest.raises(BudgetExceeded):
            exact_posteriors(net, {}, ["X0"])

    def test_unknown_query(self, fig22):
        with pytest.raises(KeyError):
            exact_posteriors(fig22, {}, ["Z"])


class TestMarkovBlanket:
    def test_fig21_b(self, fig21):
        mb = markov_blanket(fig21, "B")
        assert set(mb.parents) == {"A"}
        assert set(mb.children) == {"E"}
        assert set(mb.spouses) == {"D"}

    def test_fig21_e(self, fig21):
        mb = markov_blanket(fig21, "E")
        assert set(mb.parents) == {"B", "D"}
        assert not mb.children and not mb.spouses

    def test_isolated(self):
        net = make_network([binary("X"), binary("Y")], [binary_cpt("X", (), 0.3), binary_cpt("Y", (), 0.6)])
        assert markov_blanket(net, "X").members == ()


class TestBlanketConditional:
    """The six worked conditionals on the five-node OR network."""

    def test_b_stays_true(self, fig21):
        p = blanket_conditional(fig21, "B", {"A": T, "D": F, "E": T})
        assert p[1] == pytest.approx(1.0)

    def test_c_switch(self, fig21):
        p = blanket_conditional(fig21, "C", {"A": T, "B": T, "D": F, "E": T})
        assert p[1] == pytest.approx(0.01 * 0.01 / (0.01 * 0.01 + 0.99 * 0.99), rel=1e-12)
        assert p[1] == pytest.approx(0.000102, abs=1e-6)

    def test_d_stays_false(self, fig21):
        p = blanket_conditional(fig21, "D", {"A": T, "B": T, "C": F, "E": T})
        assert p[1] == pytest.approx(0.01)

    def test_a_fifty_fifty(self, fig21):
        p = blanket_conditional(fig21, "A", {"B": T, "C": F, "D": F, "E": T})
        assert p[1] == pytest.approx(0.5)

    def test_b_given_a_d(self, fig21):
        assert blanket_conditional(fig21, "B", {"A": T, "D": T, "E": T})[1] == pytest.approx(0.99)
        assert blanket_conditional(fig21, "B", {"A": F, "D": T, "E": T})[1] == pytest.approx(0.01)

    def test_degenerate_signal(self):
        net = det_pair()
        with pytest.raises(DegenerateConditional) as info:
            # B=TRUE needs A=TRUE, which has prior 0
            blanket_conditional(make_network(net.variables, [binary_cpt("A", (), 0.0),
                                                             net.cpts["B"]]), "A", {"B": T})
        assert np.all(info.value.vector == 0.0)
        assert info.value.nodes == ("A",)

    def test_missing_blanket_member(self, fig21):
        with pytest.raises(KeyError):
            blanket_conditional(fig21, "B", {"A": T})

    def test_ignores_non_blanket(self, fig21):
        a = blanket_conditional(fig21, "A", {"B": T})
        b = blanket_conditional(fig21, "A", {"B": T, "C": T, "D": F, "E": T})
        assert np.array_equal(a, b)


def _check_blanket_vs_oracle(net):
    for node in net.names:
        others = [n for n in net.names if n != node]
        for config in itertools.product(*[net.variable(n).values for n in others]):
            w = dict(zip(others, config))
            table = exact_posteriors(net, w, [node])
            if not table.defined:
                continue
            got = blanket_conditional(net, node, w)
            assert np.allclose(got, table.marginals[node], atol=1e-9)


@pytest.mark.parametrize("name", ["fig2-1", "fig2-2", "fig2-4", "fig3-3-like", "fork"])
def test_blanket_matches_oracle_exhaustively(name):
    _check_blanket_vs_oracle(load_fixture(name))


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 6))
def test_blanket_matches_oracle_random(seed, n):
    _check_blanket_vs_oracle(random_network(np.random.default_rng(seed), n))


class TestSweepKernel:
    def test_fig22(self, fig22):
        err, k = _stationary_error(fig22, {}, scan_order=["A", "B"])
        assert k.matrix.shape == (4, 4)
        assert np.allclose(k.matrix.sum(axis=1), 1.0)
        assert err < 1e-12

    def test_single_node_rows_equal_prior(self):
        net = make_network([binary("X")], [binary_cpt("X", (), 0.3)])
        k = gibbs_sweep_kernel(net, {})
        assert np.allclose(k.matrix, [[0.7, 0.3], [0.7, 0.3]])

    def test_deterministic_pair_absorbing(self):
        k = gibbs_sweep_kernel(det_pair(), {})
        labels = k.state_labels(det_pair())
        absorbing = [labels[i] for i in range(4) if k.matrix[i, i] == 1.0]
        assert {"A": F, "B": F} in absorbing and {"A": T, "B": T} in absorbing

    def test_blocked_pair_mixes(self):
        net = det_pair()
        err, k = _stationary_error(net, {}, groups=[("A", "B")])
        assert err < 1e-12
        assert k.matrix[3, 0] == pytest.approx(0.5)

    @pytest.mark.parametrize("name,evidence", [
        ("fig2-1", {}), ("fig2-1", {"E": T}), ("fig2-4", {"B": T}), ("fork", {"Y": F}),
        ("fig3-3-like", {"C": T}),
    ])
    def test_stationary(self, name, evidence):
        err, _ = _stationary_error(load_fixture(name), evidence)
        assert err < 1e-9


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 6), n_ev=st.integers(0, 2))
def test_kernel_stationary_random(seed, n, n_ev):
    rng = np.random.default_rng(seed)
    net = random_network(rng, n)
    ev_names = list(rng.permutation(net.names)[:min(n_ev, n - 1)])
    evidence = {e: ("TRUE" if rng.random() < 0.5 else "FALSE") for e in ev_names}
    if exact_posteriors(net, evidence, []).evidence_probability <= 0:
        return
    err, k = _stationary_error(net, evidence)
    assert np.allclose(k.matrix.sum(axis=1), 1.0)
    assert err < 1e-9
