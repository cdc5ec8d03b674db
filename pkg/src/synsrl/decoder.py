"""Dynamic-programming decoding of SRL graphs under the non-overlap constraint.

Per predicate, the decoder selects a set of labelled, pairwise
non-overlapping spans maximising the total margin of each span's best
non-null label over the null label.  Dependency-style problems contain
only width-1 spans, so the DP degenerates to a per-token argmax.

Tie-breaking is fixed: earlier start, then shorter span, then lower
label id, and a span is only selected when it strictly improves the
objective.
"""

from dataclasses import dataclass

import numpy as np

from .data import DataError, SrlGraph


@dataclass
class DecodeProblem:
    """Candidate spans and label scores for one predicate.

    `scores` has shape (n_spans, n_labels) with the null label in
    column 0; `spans` holds (start, end) token indices.
    """

    predicate: int
    spans: list
    scores: np.ndarray
    n_words: int
    style: str

    def __post_init__(self):
        self.scores = np.asarray(self.scores, dtype=np.float64)
        if self.scores.shape[0] != len(self.spans):
            raise DataError("scores and spans disagree on candidate count")
        if not np.isfinite(self.scores).all():
            raise DataError("decode scores must be finite")


def _best_margins(problem):
    """Per-span (margin, label) of the best non-null label, lowest-id ties."""
    labels = np.argmax(problem.scores[:, 1:], axis=1) + 1
    margins = problem.scores[np.arange(len(problem.spans)), labels] - problem.scores[:, 0]
    return margins, labels


def decode_predicate(problem):
    """Maximal non-overlapping labelled span set for one predicate."""
    if not problem.spans:
        return []
    margins, labels = _best_margins(problem)
    order = sorted(
        range(len(problem.spans)),
        key=lambda s: (problem.spans[s][0], problem.spans[s][1], labels[s]),
    )
    by_start = {}
    for s_idx in order:
        by_start.setdefault(problem.spans[s_idx][0], []).append(s_idx)
    max_pos = max(end for _s, end in problem.spans)
    # best[p] = max attainable margin using spans starting at position >= p
    best = [0.0] * (max_pos + 3)
    choice = [None] * (max_pos + 3)
    for p in range(max_pos + 1, 0, -1):
        span_best, span_choice = None, None
        for s_idx in by_start.get(p, []):
            end = problem.spans[s_idx][1]
            value = margins[s_idx] + best[end + 1]
            if span_best is None or value > span_best:
                span_best, span_choice = value, s_idx
        # on exact ties, selecting at the earlier start wins over skipping
        if span_best is not None and span_best >= best[p + 1]:
            best[p], choice[p] = span_best, span_choice
        else:
            best[p], choice[p] = best[p + 1], None
    selected = []
    p = 1
    while p <= max_pos:
        s_idx = choice[p]
        if s_idx is None:
            p += 1
        else:
            start, end = problem.spans[s_idx]
            selected.append((start, end, int(labels[s_idx])))
            p = end + 1
    return selected


def decode_score(problem, selected):
    """Objective value of a selected (start, end, label) set."""
    index = {span: s_idx for s_idx, span in enumerate(problem.spans)}
    total = 0.0
    for start, end, label in selected:
        s_idx = index[(start, end)]
        total += problem.scores[s_idx, label] - problem.scores[s_idx, 0]
    return total


def assert_non_overlapping(selected):
    covered = set()
    for start, end, _label in selected:
        positions = set(range(start, end + 1))
        if covered & positions:
            raise DataError("decoded spans overlap")
        covered |= positions


def decode_sentence(problems, style, label_vocab=None):
    """Union of per-predicate decodes as an SrlGraph.

    Labels stay integer ids unless a label vocabulary is given.
    """
    tuples = set()
    for problem in problems:
        selected = decode_predicate(problem)
        assert_non_overlapping(selected)
        for start, end, label in selected:
            name = label_vocab.decode(label) if label_vocab is not None else label
            tuples.add((problem.predicate, start, end, name))
    return SrlGraph(tuples, style)
