"""Core domain types: sentences, dependency graphs, SRL graphs.

Token positions are 0-based throughout: position 0 is the ROOT boundary
token, positions 1..n are the words, position n+1 is the SEP boundary
token.  After subword splitting the same convention holds over subword
positions, with each word represented by its first subword.
"""

from dataclasses import dataclass, field

ROOT_TOKEN = "<root>"
SEP_TOKEN = "<sep>"

SPAN_STYLE = "span"
DEP_STYLE = "dep"
STYLES = (SPAN_STYLE, DEP_STYLE)


class DataError(ValueError):
    pass


@dataclass(frozen=True)
class Sentence:
    """A tokenised sentence with boundary tokens and subword alignment.

    `words` and `pos_tags` are word-level (boundary tokens included);
    `subwords` is the flat subword sequence and `word_to_first_subword`
    maps each word index to the position of its first subword.
    """

    words: tuple
    pos_tags: tuple
    subwords: tuple
    word_to_first_subword: tuple

    def __post_init__(self):
        if len(self.words) < 2 or self.words[0] != ROOT_TOKEN or self.words[-1] != SEP_TOKEN:
            raise DataError("sentence must start with ROOT and end with SEP")
        if len(self.pos_tags) != len(self.words):
            raise DataError("pos_tags and words must have equal length")
        if len(self.word_to_first_subword) != len(self.words):
            raise DataError("word_to_first_subword must cover every word")
        prev = -1
        for pos in self.word_to_first_subword:
            if not 0 <= pos < len(self.subwords):
                raise DataError("first-subword index out of range")
            if pos <= prev:
                raise DataError("first-subword indices must be strictly increasing")
            prev = pos

    @classmethod
    def from_words(cls, words, pos_tags):
        """Build a word-level sentence (identity subwords), adding ROOT/SEP."""
        full_words = (ROOT_TOKEN,) + tuple(words) + (SEP_TOKEN,)
        full_tags = (ROOT_TOKEN,) + tuple(pos_tags) + (SEP_TOKEN,)
        return cls(
            words=full_words,
            pos_tags=full_tags,
            subwords=full_words,
            word_to_first_subword=tuple(range(len(full_words))),
        )

    @property
    def n_words(self):
        """Number of real words, excluding ROOT and SEP."""
        return len(self.words) - 2

    @property
    def n_positions(self):
        """Number of subword positions, boundaries included."""
        return len(self.subwords)


@dataclass(frozen=True)
class DependencyGraph:
    """Labelled head->dependent arcs over token positions.

    Every non-boundary position must have exactly one head; heads may be
    the ROOT position (0) but never SEP.
    """

    arcs: frozenset  # of (head, dependent, label) triples

    def __post_init__(self):
        object.__setattr__(self, "arcs", frozenset(self.arcs))

    def validate(self, n_positions):
        heads = {}
        for head, dep, _label in self.arcs:
            if not 1 <= dep <= n_positions - 2:
                raise DataError(f"dependent {dep} out of range")
            if not 0 <= head <= n_positions - 2:
                raise DataError(f"head {head} out of range")
            if dep in heads:
                raise DataError(f"position {dep} has more than one head")
            heads[dep] = head
        for dep in range(1, n_positions - 1):
            if dep not in heads:
                raise DataError(f"position {dep} has no head")

    def head_of(self):
        """Map dependent position -> (head, label)."""
        return {dep: (head, label) for head, dep, label in self.arcs}


@dataclass(frozen=True)
class SrlGraph:
    """A set of (predicate, span_start, span_end, label) tuples."""

    tuples: frozenset
    style: str

    def __post_init__(self):
        object.__setattr__(self, "tuples", frozenset(self.tuples))
        if self.style not in STYLES:
            raise DataError(f"unknown SRL style {self.style!r}")
        for pred, start, end, _label in self.tuples:
            if start > end:
                raise DataError(f"span <{start},{end}> has start > end")
            if self.style == DEP_STYLE and start != end:
                raise DataError("dependency-style arguments must have start == end")
            if min(pred, start) < 1:
                raise DataError("SRL indices must avoid the ROOT position")

    def validate(self, n_positions):
        for pred, start, end, _label in self.tuples:
            if max(pred, end) > n_positions - 2:
                raise DataError("SRL tuple index out of sentence range")

    @classmethod
    def empty(cls, style):
        return cls(tuples=frozenset(), style=style)


@dataclass(frozen=True)
class CorpusRecord:
    """One sentence with its dependency graph and (optionally) gold SRL."""

    sentence: Sentence
    syn: DependencyGraph
    gold_srl: SrlGraph = None
    predicates_given: tuple = None

    def __post_init__(self):
        n = self.sentence.n_positions
        self.syn.validate(n)
        if self.gold_srl is not None:
            self.gold_srl.validate(n)
        if self.predicates_given is not None:
            object.__setattr__(self, "predicates_given", tuple(self.predicates_given))
            for k in self.predicates_given:
                if not 1 <= k <= n - 2:
                    raise DataError(f"given predicate {k} out of range")
