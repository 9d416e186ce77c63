import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from beliefsim import transforms as tf
from beliefsim.fixtures import FIG3_2_EVIDENCE, FIG3_2_QUERIES, det_pair, load_fixture
from beliefsim.network import Cpt, Variable, binary, binary_cpt, make_network
from beliefsim.oracle import exact_posteriors
from beliefsim.samplers import (
    ImpossibleEvidence,
    RngStream,
    SampleTrace,
    SamplerError,
    blocked_gibbs_run,
    clamped_forward_estimate,
    clamped_forward_violations,
    detect_deterministic_groups,
    draw_index,
    gibbs_run,
    initial_state,
    likelihood_weighting_estimate,
    logic_estimate,
    logic_sample,
    rejection_estimate,
    sampling_groups,
    uniform_proposal_estimate,
)

T, F = "TRUE", "FALSE"
P_E = 1 - 0.9802 ** 2


def within(report, name, value, truth, k=3.0):
    err = abs(report.prob(name, value) - truth)
    assert err <= k * report.se(name, value) + 1e-12, (err, report.se(name, value))


class TestRng:
    def test_same_seed_same_stream(self):
        assert np.array_equal(RngStream(5).uniform(10), RngStream(5).uniform(10))
        assert not np.array_equal(RngStream(5).uniform(10), RngStream(6).uniform(10))

    def test_describe(self):
        assert RngStream(9).describe() == {"seed": 9, "generator": "numpy.PCG64"}


class TestDrawIndex:
    @pytest.mark.parametrize("u,k", [(0.35, 0), (0.75, 1), (0.95, 2)])
    def test_three_values(self, u, k):
        assert draw_index([0.4, 0.4, 0.2], u) == k

    @pytest.mark.parametrize("u", [0.0, 0.5, 0.999999])
    def test_deterministic_prior(self, u):
        assert draw_index([0.0, 1.0], u) == 1

    def test_trailing_zero_never_drawn(self):
        assert draw_index([0.3, 0.7, 0.0], 0.9999999999) == 1


class TestLogicSampling:
    def test_single_sample_total(self, fig21):
        s = logic_sample(fig21, RngStream(1))
        assert set(s) == set("ABCDE")
        assert s["E"] == (T if T in (s["B"], s["D"]) else F)

    def test_deterministic_prior_node(self):
        net = make_network([binary("X")], [binary_cpt("X", (), 1.0)])
        rep, _ = logic_estimate(net, ["X"], 1000, RngStream(2))
        assert rep.prob("X", T) == 1.0

    def test_three_valued_frequencies(self):
        net = make_network([Variable("L", ("HIGH", "MEDIUM", "LOW"))], [Cpt("L", (), [[0.4, 0.4, 0.2]])])
        rep, _ = logic_estimate(net, ["L"], 200_000, RngStream(3))
        for lab, p in zip(("HIGH", "MEDIUM", "LOW"), (0.4, 0.4, 0.2)):
            within(rep, "L", lab, p, k=4)

    def test_fig21_frequency_of_e(self, fig21):
        rep, _ = logic_estimate(fig21, ["E"], 1_000_000, RngStream(4))
        within(rep, "E", T, P_E)

    def test_reproducible(self, fig21):
        a = logic_estimate(fig21, ["A"], 5000, RngStream(11))[1]
        b = logic_estimate(fig21, ["A"], 5000, RngStream(11))[1]
        assert np.array_equal(a.states, b.states)


class TestRejection:
    def test_acceptance_rate_fig21(self, fig21):
        rep, trace = rejection_estimate(fig21, {"E": T}, ["A"], 1_000_000, RngStream(7))
        assert rep.acceptance_rate == pytest.approx(P_E, abs=3 * math.sqrt(P_E / 1e6))
        assert 1 / rep.acceptance_rate == pytest.approx(25.5, abs=1.0)
        within(rep, "A", T, 0.25255)
        assert len(trace) == 1_000_000
        assert trace.accepted.sum() == rep.n_used

    def test_no_evidence_accepts_all(self, fig22):
        rep, _ = rejection_estimate(fig22, {}, ["A"], 100, RngStream(1))
        assert rep.acceptance_rate == 1.0

    def test_zero_acceptances_undefined(self, fig21):
        ev = {"A": F, "B": F, "C": F, "D": F, "E": T}
        rep, _ = rejection_estimate(fig21, ev, ["A"], 1000, RngStream(1))
        assert not rep.defined and rep.acceptance_rate == 0.0
        assert rep.to_dict()["estimates"]["A"] is None


class TestLikelihoodWeighting:
    def test_no_evidence_unit_weights(self, fig21):
        rep, trace = likelihood_weighting_estimate(fig21, {}, ["A"], 1000, RngStream(1))
        assert np.all(trace.weights == 1.0)
        assert rep.ess == pytest.approx(1000)

    def test_root_evidence_constant_weight(self, fig21):
        _, trace = likelihood_weighting_estimate(fig21, {"A": T}, ["B"], 1000, RngStream(1))
        assert np.all(trace.weights == 0.01)

    def test_fig21(self, fig21):
        rep, _ = likelihood_weighting_estimate(fig21, {"E": T}, ["A"], 400_000, RngStream(8))
        within(rep, "A", T, 0.25255)
        assert rep.ess < rep.n_total

    def test_all_zero_weights(self):
        net = make_network([binary("A"), binary("B")],
                           [binary_cpt("A", (), 0.0), binary_cpt("B", ("A",), [0.0, 1.0])])
        rep, _ = likelihood_weighting_estimate(net, {"B": T}, ["A"], 100, RngStream(1))
        assert not rep.defined


class TestUniformProposal:
    def test_four_evidence_variables(self):
        net = load_fixture("fig3-2-like")
        rep, _ = uniform_proposal_estimate(net, FIG3_2_EVIDENCE, FIG3_2_QUERIES, 400_000, RngStream(9))
        assert rep.acceptance_rate == pytest.approx(1 / 16, abs=3 * math.sqrt(1 / 16 * 15 / 16 / 4e5))
        truth = exact_posteriors(net, FIG3_2_EVIDENCE, ["K"]).prob("K", T)
        within(rep, "K", T, truth, k=4)

    def test_no_evidence(self, fig21):
        rep, _ = uniform_proposal_estimate(fig21, {}, ["A", "E"], 400_000, RngStream(10))
        assert rep.acceptance_rate == 1.0
        within(rep, "E", T, P_E, k=4)

    def test_fig22_evidence_b(self, fig22):
        rep, _ = uniform_proposal_estimate(fig22, {"B": T}, ["A"], 200_000, RngStream(12))
        within(rep, "A", T, 0.999)

    def test_binary_only(self):
        net = make_network([Variable("L", ("a", "b", "c"))], [Cpt("L", (), [[0.2, 0.3, 0.5]])])
        with pytest.raises(SamplerError):
            uniform_proposal_estimate(net, {}, ["L"], 10, RngStream(1))


class TestClampedForward:
    def test_refuses_with_arc_names(self, fig22):
        assert clamped_forward_violations(fig22, ["B"]) == [("A", "B")]
        with pytest.raises(SamplerError, match="A->B"):
            clamped_forward_estimate(fig22, {"B": T}, ["A"], 10, RngStream(1))

    def test_after_reversal(self, fig22):
        net = tf.reverse_arc(fig22, "A", "B")
        rep, _ = clamped_forward_estimate(net, {"B": T}, ["A"], 200_000, RngStream(13))
        assert rep.acceptance_rate == 1.0
        within(rep, "A", T, 0.999)

    def test_no_evidence_matches_logic(self, fig21):
        a, _ = clamped_forward_estimate(fig21, {}, ["A", "E"], 5000, RngStream(14))
        b, _ = logic_estimate(fig21, ["A", "E"], 5000, RngStream(14))
        assert np.array_equal(a.estimates["E"], b.estimates["E"])

    def test_fig32_pipeline_all_usable(self):
        net = load_fixture("fig3-2-like")
        _, out = tf.absorb_evidence(net, FIG3_2_EVIDENCE, FIG3_2_QUERIES)
        rep, trace = clamped_forward_estimate(out, FIG3_2_EVIDENCE, FIG3_2_QUERIES, 200_000, RngStream(15))
        assert rep.acceptance_rate == 1.0 and trace.accepted.all()
        truth = exact_posteriors(net, FIG3_2_EVIDENCE, ["K"]).prob("K", T)
        within(rep, "K", T, truth, k=4)


class TestDeterministicGroups:
    def test_fig21(self, fig21):
        (g,) = detect_deterministic_groups(fig21)
        assert g.members == ("E",)
        assert set(g.external_parents) == {"B", "D"}

    def test_none(self, fig22):
        assert detect_deterministic_groups(fig22) == []

    def test_chain(self):
        net = make_network([binary(n) for n in "ABC"],
                           [binary_cpt("A", (), 0.5), binary_cpt("B", ("A",), [0.0, 1.0]),
                            binary_cpt("C", ("B",), [1.0, 0.0])])
        (g,) = detect_deterministic_groups(net)
        assert g.members == ("B", "C")

    def test_sampling_groups(self, fig21):
        assert sampling_groups(det_pair()) == [("A", "B")]
        assert sampling_groups(fig21, ["E"]) == [("B", "D")]


class TestGibbs:
    def test_fig22_wide_band(self, fig22):
        rep, trace = gibbs_run(fig22, {}, "all-true", 1_000_000, None, RngStream(7), ["A"])
        assert 0.45 <= rep.prob("A", T) <= 0.55
        assert trace.sweeps == 1_000_000

    def test_single_node_iid(self):
        net = make_network([binary("X")], [binary_cpt("X", (), 0.3)])
        rep, _ = gibbs_run(net, {}, "all-true", 100_000, None, RngStream(3), ["X"])
        assert abs(rep.prob("X", T) - 0.3) <= 3 * math.sqrt(0.21 / 1e5)

    def test_deterministic_pair_fixates(self):
        rep, trace = gibbs_run(det_pair(), {}, "all-true", 10_000, None, RngStream(1), ["A"])
        assert rep.extra["fixated"] and rep.prob("A", T) == 1.0
        assert np.all(trace.states == 1)

    def test_zero_probability_start_refused(self, fig21):
        with pytest.raises(SamplerError, match="probability zero"):
            gibbs_run(fig21, {"E": F}, "all-true", 10, None, RngStream(1))

    def test_impossible_evidence(self):
        with pytest.raises(ImpossibleEvidence):
            gibbs_run(det_pair(), {"A": T, "B": F}, "all-true", 10, None, RngStream(1))

    def test_forward_init_with_evidence(self, fig21):
        rep, trace = gibbs_run(fig21, {"E": F}, "forward", 2000, None, RngStream(5), ["A"])
        assert trace.initial_state["E"] == F

    def test_determinism(self, fig21):
        a = gibbs_run(fig21, {"E": T}, "all-true", 3000, None, RngStream(42), ["A"])[1]
        b = gibbs_run(fig21, {"E": T}, "all-true", 3000, None, RngStream(42), ["A"])[1]
        assert np.array_equal(a.states, b.states)

    def test_scan_order_recorded(self, fig22):
        rep, trace = gibbs_run(fig22, {}, "all-false", 100, ["B", "A"], RngStream(1), ["A"])
        assert trace.scan_order == ("B", "A")
        assert rep.extra["scan_order"] == ["B", "A"]

    def test_unknown_init(self, fig22):
        with pytest.raises(ValueError):
            initial_state(fig22, {}, "sideways", RngStream(1))


class TestBlockedGibbs:
    def test_deterministic_pair(self):
        rep, _ = blocked_gibbs_run(det_pair(), {}, [("A", "B")], "all-true", 100_000, RngStream(2), queries=["A"])
        assert not rep.extra["fixated"]
        assert abs(rep.prob("A", T) - 0.5) <= 3 * rep.se("A", T)

    def test_singletons_match_gibbs(self, fig21):
        a = gibbs_run(fig21, {"E": T}, "all-true", 2000, None, RngStream(3), ["A"])[1]
        b = blocked_gibbs_run(fig21, {"E": T}, [(n,) for n in "ABCD"], "all-true", 2000,
                              RngStream(3), queries=["A"])[1]
        assert np.array_equal(a.states, b.states)

    def test_fig21_group(self, fig21):
        rep, _ = blocked_gibbs_run(fig21, {"E": T}, [("B", "D", "E")], "all-true", 200_000,
                                   RngStream(4), queries=["A"])
        within(rep, "A", T, 0.25255)


class TestTraceCsv:
    def test_header_and_round_trip(self, tmp_path, fig21):
        _, trace = likelihood_weighting_estimate(fig21, {"E": T}, ["A"], 50, RngStream(1))
        path = tmp_path / "t.csv"
        trace.write_csv(path)
        header = path.read_text().splitlines()[0]
        assert header == "sweep,A,B,C,D,E,weight,accepted"
        back = SampleTrace.read_csv(path, fig21)
        assert np.array_equal(back.states, trace.states)
        assert np.array_equal(back.weights, trace.weights)
        assert np.array_equal(back.accepted, trace.accepted)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**63 - 1))
def test_estimates_are_distributions(seed):
    net = load_fixture("fig2-1")
    for run in (lambda r: rejection_estimate(net, {"E": T}, ["A", "C"], 500, r),
                lambda r: likelihood_weighting_estimate(net, {"E": T}, ["A", "C"], 500, r)):
        rep, trace = run(RngStream(seed))
        assert np.all(trace.weights >= 0)
        if rep.defined:
            for vec in rep.estimates.values():
                assert np.all((0 <= vec) & (vec <= 1)) and abs(vec.sum() - 1) < 1e-9
        ok = trace.accepted
        assert np.all(trace.states[ok, net.index["E"]] == 1)
