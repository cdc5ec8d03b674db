"""Subword tokenisation and first-subword alignment of the dependency graph.

A word-level arc becomes an arc between the first subwords of the two
words; every non-first subword is attached to its word's first subword
with the reserved SUBWORD_LABEL relation.  SRL indices are likewise
remapped to first-subword positions.
"""

from .data import (
    CorpusRecord,
    DataError,
    DependencyGraph,
    Sentence,
    SrlGraph,
)

SUBWORD_LABEL = "<subword>"

_SPLIT_SUFFIXES = ("ning", "ing", "ed", "ly", "es", "s")


def identity_tokenizer(word):
    return [word]


def suffix_tokenizer(word):
    """Rule-based splitter: peel one common suffix when the stem is long enough."""
    for suffix in _SPLIT_SUFFIXES:
        stem = word[: len(word) - len(suffix)]
        if word.endswith(suffix) and len(stem) >= 3:
            return [stem, "##" + suffix]
    return [word]


TOKENIZERS = {"identity": identity_tokenizer, "suffix": suffix_tokenizer}


def get_tokenizer(name):
    if name not in TOKENIZERS:
        raise DataError(f"unknown tokenizer {name!r}")
    return TOKENIZERS[name]


def align_subwords(sentence, syn, tokenizer):
    """Tokenise each word and rebuild the arcs over subword positions."""
    subwords = []
    first = []
    subword_arcs = set()
    for w, word in enumerate(sentence.words):
        if 0 < w < len(sentence.words) - 1:
            pieces = list(tokenizer(word))
        else:
            pieces = [word]  # boundary tokens never split
        if not pieces:
            raise DataError(f"word {word!r} tokenised to zero subwords")
        first.append(len(subwords))
        for offset, piece in enumerate(pieces):
            if offset > 0:
                subword_arcs.add((first[w], len(subwords), SUBWORD_LABEL))
            subwords.append(piece)
    arcs = set(subword_arcs)
    for head, dep, label in syn.arcs:
        arcs.add((first[head], first[dep], label))
    aligned_sentence = Sentence(
        words=sentence.words,
        pos_tags=sentence.pos_tags,
        subwords=tuple(subwords),
        word_to_first_subword=tuple(first),
    )
    return aligned_sentence, DependencyGraph(arcs)


def align_record(record, tokenizer):
    """Align a whole record; SRL indices move to first-subword positions."""
    sentence, syn = align_subwords(record.sentence, record.syn, tokenizer)
    first = sentence.word_to_first_subword
    gold = None
    if record.gold_srl is not None:
        gold = SrlGraph(
            {(first[k], first[i], first[j], l) for k, i, j, l in record.gold_srl.tuples},
            record.gold_srl.style,
        )
    given = None
    if record.predicates_given is not None:
        given = tuple(first[k] for k in record.predicates_given)
    return CorpusRecord(sentence=sentence, syn=syn, gold_srl=gold, predicates_given=given)
