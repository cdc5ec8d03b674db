import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from synsrl.data import DataError, DEP_STYLE, SPAN_STYLE
from synsrl.decoder import (
    DecodeProblem,
    assert_non_overlapping,
    decode_predicate,
    decode_score,
    decode_sentence,
)


def problem(spans, scores, n_words=8, style=SPAN_STYLE, predicate=1):
    return DecodeProblem(
        predicate=predicate,
        spans=list(spans),
        scores=np.asarray(scores, dtype=np.float64),
        n_words=n_words,
        style=style,
    )


def brute_force_best(prob):
    """Exhaustive maximum margin over non-overlapping span subsets."""
    margins = prob.scores[:, 1:].max(axis=1) - prob.scores[:, 0]
    best = 0.0
    n = len(prob.spans)
    for r in range(n + 1):
        for subset in itertools.combinations(range(n), r):
            covered = set()
            ok = True
            for s_idx in subset:
                start, end = prob.spans[s_idx]
                positions = set(range(start, end + 1))
                if covered & positions:
                    ok = False
                    break
                covered |= positions
            if ok:
                best = max(best, sum(margins[s] for s in subset))
    return best


def test_overlapping_prefers_larger_margin():
    # margins +2 for <2,3> and +1 for <3,4>; brute force over all 4 subsets
    prob = problem(
        spans=[(2, 3), (3, 4)],
        scores=[[0.0, 2.0, 0.0], [0.0, 1.0, 0.0]],
    )
    selected = decode_predicate(prob)
    assert [(s, e) for s, e, _l in selected] == [(2, 3)]
    assert decode_score(prob, selected) == brute_force_best(prob) == 2.0


def test_all_negative_margins_select_nothing():
    prob = problem(
        spans=[(1, 2), (3, 3)],
        scores=[[0.0, -1.0, -2.0], [0.0, -0.5, -3.0]],
    )
    assert decode_predicate(prob) == []


def test_disjoint_positive_margins_all_selected():
    prob = problem(
        spans=[(1, 2), (4, 5), (7, 7)],
        scores=[[0.0, 1.0, 0.5], [0.0, 0.3, 2.0], [0.0, 0.1, 0.05]],
    )
    selected = decode_predicate(prob)
    assert sorted((s, e) for s, e, _l in selected) == [(1, 2), (4, 5), (7, 7)]
    # each span carries its argmax label, lowest id on ties
    labels = {(s, e): l for s, e, l in selected}
    assert labels[(1, 2)] == 1
    assert labels[(4, 5)] == 2


def test_dependency_style_is_per_token_argmax():
    prob = problem(
        spans=[(1, 1), (2, 2), (3, 3)],
        scores=[[0.0, 0.7, 0.2], [0.0, -0.2, -0.1], [0.0, 0.1, 0.9]],
        style=DEP_STYLE,
    )
    selected = decode_predicate(prob)
    assert selected == [(1, 1, 1), (3, 3, 2)]


def test_decode_is_order_invariant():
    spans = [(1, 1), (2, 2), (3, 3), (1, 3)]
    scores = [[0.0, 0.4, 0.0], [0.0, 0.5, 0.0], [0.0, 0.6, 0.0], [0.0, 1.4, 0.0]]
    base = decode_predicate(problem(spans, scores))
    perm = [2, 0, 3, 1]
    shuffled = decode_predicate(problem([spans[i] for i in perm],
                                        [scores[i] for i in perm]))
    assert sorted(base) == sorted(shuffled)


def test_decode_sentence_zero_predicates():
    graph = decode_sentence([], SPAN_STYLE)
    assert graph.tuples == frozenset()


def test_decode_sentence_unions_predicates():
    p1 = problem([(1, 2)], [[0.0, 1.0, 0.0]], predicate=3)
    p2 = problem([(1, 2)], [[0.0, 0.0, 2.0]], predicate=4)
    graph = decode_sentence([p1, p2], SPAN_STYLE)
    assert graph.tuples == {(3, 1, 2, 1), (4, 1, 2, 2)}


def test_non_overlap_assertion_fires():
    with pytest.raises(DataError):
        assert_non_overlapping([(1, 3, 1), (3, 4, 2)])


@st.composite
def random_problems(draw):
    n = draw(st.integers(2, 8))
    n_labels = draw(st.integers(2, 3))
    all_spans = [(i, j) for i in range(1, n + 1) for j in range(i, n + 1)]
    count = draw(st.integers(1, min(6, len(all_spans))))
    idx = draw(st.permutations(range(len(all_spans))))
    spans = [all_spans[i] for i in idx[:count]]
    scores = draw(
        st.lists(
            st.lists(st.floats(-5, 5, allow_nan=False), min_size=n_labels, max_size=n_labels),
            min_size=count, max_size=count,
        )
    )
    return problem(spans, scores, n_words=n)


@settings(max_examples=200, deadline=None)
@given(random_problems())
def test_dp_matches_brute_force(prob):
    selected = decode_predicate(prob)
    assert_non_overlapping(selected)
    got = decode_score(prob, selected)
    want = brute_force_best(prob)
    assert got == pytest.approx(want, abs=1e-9)


def test_determinism_under_repeats():
    rng = np.random.default_rng(5)
    spans = [(1, 2), (2, 3), (4, 4), (1, 4)]
    scores = rng.normal(size=(4, 3))
    scores[:, 0] = 0.0
    outs = {tuple(decode_predicate(problem(spans, scores.copy()))) for _ in range(5)}
    assert len(outs) == 1
