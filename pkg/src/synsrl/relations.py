"""Pairwise relation-index matrices consumed by the attention layers.

For an arc head->dependent with label id l out of n_labels:
    indices[head][dependent] = l
    indices[dependent][head] = l + n_labels
All other entries (including the diagonal) hold the no-arc id
2 * n_labels.
"""

import numpy as np

from .data import DataError


def none_relation_id(n_labels):
    return 2 * n_labels


def build_relation_matrix(arcs, n, n_labels):
    """Dense (n, n) int matrix of relation ids from id-labelled arcs."""
    indices = np.full((n, n), none_relation_id(n_labels), dtype=np.int64)
    seen_deps = set()
    for head, dep, label_id in arcs:
        if not (0 <= head < n and 0 <= dep < n):
            raise DataError(f"arc ({head},{dep}) out of range for length {n}")
        if not 0 <= label_id < n_labels:
            raise DataError(f"label id {label_id} out of range")
        if dep in seen_deps:
            raise DataError(f"duplicate arc for dependent {dep}")
        seen_deps.add(dep)
        indices[head, dep] = label_id
        indices[dep, head] = label_id + n_labels
    return indices


def relation_matrix_for(graph, n, syn_vocab, subword_label_id=None):
    """Build the matrix from a string-labelled DependencyGraph.

    The reserved subword-attachment label sits one past the syntactic
    label vocabulary, so the total label count is len(syn_vocab) + 1.
    """
    from .subword import SUBWORD_LABEL

    if subword_label_id is None:
        subword_label_id = len(syn_vocab)
    n_labels = len(syn_vocab) + 1
    arcs = []
    for head, dep, label in graph.arcs:
        if label == SUBWORD_LABEL:
            arcs.append((head, dep, subword_label_id))
        else:
            arcs.append((head, dep, syn_vocab.encode(label)))
    return build_relation_matrix(arcs, n, n_labels)


def relation_matrix_to_csv(indices, path):
    np.savetxt(path, indices, fmt="%d", delimiter=",")
