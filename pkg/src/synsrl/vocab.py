"""Deterministic vocabularies built from a corpus, with file round-trip."""

from dataclasses import dataclass

from .data import DataError

UNK_TOKEN = "<unk>"
NONE_LABEL = "<none>"


class Vocab:
    """Immutable token<->id mapping; ids follow the construction order."""

    def __init__(self, tokens):
        self._tokens = tuple(tokens)
        self._ids = {tok: i for i, tok in enumerate(self._tokens)}
        if len(self._ids) != len(self._tokens):
            raise DataError("duplicate token in vocabulary")

    def __len__(self):
        return len(self._tokens)

    def __contains__(self, token):
        return token in self._ids

    def __eq__(self, other):
        return isinstance(other, Vocab) and self._tokens == other._tokens

    @property
    def tokens(self):
        return self._tokens

    def encode(self, token):
        if token in self._ids:
            return self._ids[token]
        if UNK_TOKEN in self._ids:
            return self._ids[UNK_TOKEN]
        raise DataError(f"token {token!r} not in vocabulary and no unk entry")

    def decode(self, idx):
        return self._tokens[idx]

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            for i, tok in enumerate(self._tokens):
                fh.write(f"{tok}\t{i}\n")

    @classmethod
    def load(cls, path):
        pairs = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.rstrip("\n")
                if not line:
                    continue
                tok, idx = line.split("\t")
                pairs.append((int(idx), tok))
        pairs.sort()
        return cls(tok for _i, tok in pairs)


@dataclass(frozen=True)
class Vocabularies:
    subwords: Vocab
    pos_tags: Vocab
    syn_labels: Vocab
    srl_labels: Vocab

    def to_dict(self):
        return {
            "subwords": self.subwords.tokens,
            "pos_tags": self.pos_tags.tokens,
            "syn_labels": self.syn_labels.tokens,
            "srl_labels": self.srl_labels.tokens,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            subwords=Vocab(d["subwords"]),
            pos_tags=Vocab(d["pos_tags"]),
            syn_labels=Vocab(d["syn_labels"]),
            srl_labels=Vocab(d["srl_labels"]),
        )


def build_vocabularies(records):
    """Build all vocabularies from a corpus of CorpusRecords.

    Ids are assigned by sorted order, so construction is a pure function
    of the corpus.  SRL labels reserve id 0 for the null label; subwords
    and PoS tags reserve id 0 for unknowns.
    """
    records = list(records)
    if not records:
        raise DataError("cannot build vocabularies from an empty corpus")
    subwords, pos_tags, syn_labels, srl_labels = set(), set(), set(), set()
    for rec in records:
        subwords.update(rec.sentence.subwords)
        pos_tags.update(rec.sentence.pos_tags)
        syn_labels.update(label for _h, _d, label in rec.syn.arcs)
        if rec.gold_srl is not None:
            srl_labels.update(label for _k, _i, _j, label in rec.gold_srl.tuples)
    return Vocabularies(
        subwords=Vocab([UNK_TOKEN] + sorted(subwords)),
        pos_tags=Vocab([UNK_TOKEN] + sorted(pos_tags)),
        syn_labels=Vocab(sorted(syn_labels)),
        srl_labels=Vocab([NONE_LABEL] + sorted(srl_labels)),
    )
