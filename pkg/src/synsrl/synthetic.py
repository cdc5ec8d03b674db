"""Deterministic synthetic corpora for overfitting and smoke tests."""

import random

from .data import (
    DEP_STYLE,
    SPAN_STYLE,
    CorpusRecord,
    DependencyGraph,
    Sentence,
    SrlGraph,
)

_NOUNS = ("cat", "dog", "bird", "fox", "girl", "boy")
_VERBS = ("sees", "chases", "likes", "finds")
_ADJS = ("small", "old", "red")


def make_synthetic_corpus(n_sentences=20, style=SPAN_STYLE, seed=7):
    """Toy SVO sentences with optional adjectives and two-role SRL graphs.

    Sentence shape: [adj?] noun verb [adj?] noun.  The verb heads both
    noun phrases, adjectives attach to their noun, and the verb is the
    single predicate with the subject phrase as agent and the object
    phrase as patient.
    """
    rng = random.Random(seed)
    records = []
    for _ in range(n_sentences):
        subj_adj = rng.random() < 0.5
        obj_adj = rng.random() < 0.5
        words, tags = [], []

        def noun_phrase(with_adj):
            start = len(words) + 1
            if with_adj:
                words.append(rng.choice(_ADJS))
                tags.append("JJ")
            words.append(rng.choice(_NOUNS))
            tags.append("NN")
            head = len(words)  # the noun, 1-based word index
            return start, head

        subj_start, subj_head = noun_phrase(subj_adj)
        words.append(rng.choice(_VERBS))
        tags.append("VB")
        verb = len(words)
        obj_start, obj_head = noun_phrase(obj_adj)
        obj_end = len(words)

        arcs = {(0, verb, "root"), (verb, subj_head, "nsubj"), (verb, obj_head, "dobj")}
        if subj_adj:
            arcs.add((subj_head, subj_start, "amod"))
        if obj_adj:
            arcs.add((obj_head, obj_start, "amod"))

        if style == SPAN_STYLE:
            tuples = {
                (verb, subj_start, subj_head, "agent"),
                (verb, obj_start, obj_end, "patient"),
            }
        else:
            tuples = {
                (verb, subj_head, subj_head, "agent"),
                (verb, obj_head, obj_head, "patient"),
            }
        records.append(CorpusRecord(
            sentence=Sentence.from_words(words, tags),
            syn=DependencyGraph(arcs),
            gold_srl=SrlGraph(tuples, style),
            predicates_given=(verb,),
        ))
    return records


def synthetic_config_overrides():
    """Config settings that make the toy corpus trainable from scratch."""
    return dict(
        num_layers=2,
        num_heads=2,
        hidden_size=64,
        ffn_size=128,
        span_hidden=64,
        label_hidden=32,
        dropout=0.0,
        base_lr=1e-3,
        encoder_lr=1e-3,
        lambda_span=1.0,
        lambda_verb=1.0,
        batch_size=10,
        epochs=200,
        patience=200,
        max_span_width=4,
    )
