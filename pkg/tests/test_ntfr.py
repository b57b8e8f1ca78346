from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nashflow import gadgets
from nashflow.model import Arc
from nashflow.ntfr import (Curve, NTFRError, ThinFlow, ThinFlowProblem, admissible_flows,
                           series_blocks, solve_ntfr, sp_decompose, verify_ntfr)

from .conftest import random_ntfr_problems

EX1 = gadgets.example_one(1, 2)


def problem(active, resetting, inst=EX1):
    return ThinFlowProblem.from_instance(inst, set(active), set(resetting))


@pytest.mark.parametrize("method", ["auto", "sp", "orderings", "patterns"])
@pytest.mark.parametrize("active,resetting,lt", [
    ("fg", "", F(3)),
    ("efg", "fg", F(3, 2)),
    ("efgh", "efg", F(12, 13)),
    ("efgh", "g", F(1)),
])
def test_example_one_phases(method, active, resetting, lt):
    prob = problem(active, resetting)
    tf = solve_ntfr(prob, method=method)
    assert tf.labels["t"] == lt
    assert verify_ntfr(prob, tf) == []


def test_example_one_first_phase_labels():
    tf = solve_ntfr(problem("fg", ""))
    assert tf.labels == {"s": 1, "v": F(4, 3), "t": 3}
    assert tf.flows == {"e": 0, "f": 1, "g": 1, "h": 0}


def test_example_one_split_through_three_paths():
    tf = solve_ntfr(problem("efgh", "efg"))
    assert (tf.flows["e"], tf.flows["g"], tf.flows["h"]) == (F(4, 13), F(4, 13), F(5, 13))


def test_example_one_final_phase_even_split():
    tf = solve_ntfr(problem("efgh", "g"))
    assert tf.labels == {"s": 1, "v": 1, "t": 1}
    assert tf.flows == {"e": F(1, 3), "f": F(2, 3), "g": F(1, 3), "h": F(1, 3)}


def test_final_phase_lexmin_alternative_is_also_valid():
    prob = problem("efgh", "g")
    alt = solve_ntfr(prob, tie_break="lexmin")
    assert alt.flows["e"] == F(1, 4)
    assert alt.labels == solve_ntfr(prob).labels
    assert verify_ntfr(prob, alt) == []


def test_wrong_label_is_reported():
    prob = problem("fg", "")
    cand = ThinFlow({"s": F(1), "v": F(4, 3), "t": F(2)}, {"e": F(0), "f": F(1), "g": F(1), "h": F(0)})
    assert "label recursion at t" in verify_ntfr(prob, cand)


def test_verify_reports_conservation_and_inactive_flow():
    prob = problem("fg", "")
    cand = ThinFlow({"s": F(1), "v": F(4, 3), "t": F(3)}, {"e": F(1, 2), "f": F(1), "g": F(1), "h": F(0)})
    out = verify_ntfr(prob, cand)
    assert "inactive arc e carries flow" in out
    assert any(o.startswith("conservation at") for o in out)


def test_no_active_path():
    with pytest.raises(NTFRError):
        solve_ntfr(problem("f", ""))


def test_series_blocks_split_at_cut_nodes():
    inst = gadgets.figure_chain(1, 1)
    blocks = series_blocks(inst.nodes, list(inst.arcs), "s", "t'")
    assert [(b[0], b[1]) for b in blocks] == [("s", "t"), ("t", "t'")]


def test_wheatstone_is_not_series_parallel():
    arcs = [Arc("a", "s", "x", F(1), F(0)), Arc("b", "s", "y", F(1), F(0)), Arc("c", "x", "y", F(1), F(0)),
            Arc("d", "x", "t", F(1), F(0)), Arc("e", "y", "t", F(1), F(0))]
    assert sp_decompose("s", "t", arcs) is None
    prob = ThinFlowProblem(("s", "x", "y", "t"), tuple(arcs), "s", "t", frozenset("abcde"),
                           frozenset("c"), F(3))
    tf = solve_ntfr(prob)
    assert verify_ntfr(prob, tf) == []
    with pytest.raises(NTFRError):
        solve_ntfr(prob, method="sp")
    assert solve_ntfr(prob, method="patterns").labels == tf.labels


def test_curve_inverse_pieces():
    c = Curve([(F(0), F(1)), (F(2), F(1))], F(1, 2))
    assert c(F(3)) == F(3, 2)
    assert c.lo(F(1)) == 0 and c.hi(F(1)) == 2
    assert c.lo(F(2)) == c.hi(F(2)) == 4


def test_random_problems_all_methods_agree():
    for prob in random_ntfr_problems(60, seed=7):
        ref = solve_ntfr(prob)
        assert verify_ntfr(prob, ref) == []
        for method in ("orderings", "patterns"):
            for rev in (False, True):
                got = solve_ntfr(prob, method=method, reverse=rev)
                assert got.labels == ref.labels
                assert got.flows == ref.flows  # the tie-break is method independent


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.fractions(min_value=F(1, 9), max_value=10, max_denominator=9))
def test_homogeneity(seed, k):
    prob = random_ntfr_problems(1, seed=seed)[0]
    base = solve_ntfr(prob)
    arcs = tuple(Arc(a.id, a.tail, a.head, a.capacity * k, a.delay) for a in prob.arcs)
    scaled = ThinFlowProblem(prob.nodes, arcs, prob.source, prob.sink, prob.active, prob.resetting,
                             prob.inflow * k)
    tf = solve_ntfr(scaled)
    assert tf.labels == base.labels
    assert tf.flows == {e: x * k for e, x in base.flows.items()}


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_flow_tie_breaks_span_the_same_polytope(seed):
    prob = random_ntfr_problems(1, seed=seed)[0]
    tf = solve_ntfr(prob)
    lo = admissible_flows(prob.source, prob.sink, prob.arcs, prob.resetting, prob.inflow, tf.labels,
                          prob.active, tie_break="lexmin")
    hi = admissible_flows(prob.source, prob.sink, prob.arcs, prob.resetting, prob.inflow, tf.labels,
                          prob.active, tie_break="lexmax")
    order = sorted(lo)
    assert [lo[e] for e in order] <= [hi[e] for e in order]
    for flows in (lo, hi):
        assert verify_ntfr(prob, ThinFlow(tf.labels, flows)) == []
