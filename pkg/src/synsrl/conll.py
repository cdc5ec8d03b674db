"""Readers and writers for CoNLL-2009 columns and the JSONL interchange format.

JSONL schema (one object per line, UTF-8):
    words:  list of surface strings (no boundary tokens)
    pos:    list of PoS tags, same length
    heads:  list of head indices, 1-based word indices with 0 = ROOT
    deprels: list of dependency labels
    srl:    list of {"pred": k, "start": i, "end": j, "label": str},
            indices 1-based word indices
    style:  "span" | "dep" (optional; inferred when absent)
    predicates: optional list of predicate word indices (pre-defined mode)
"""

import json

from .data import (
    DEP_STYLE,
    SPAN_STYLE,
    CorpusRecord,
    DataError,
    DependencyGraph,
    Sentence,
    SrlGraph,
)


class ParseError(ValueError):
    def __init__(self, path, line_no, message):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = path
        self.line_no = line_no


# 1-based CoNLL-2009 column numbers.
_COL_ID, _COL_FORM, _COL_PPOS, _COL_PHEAD, _COL_PDEPREL = 1, 2, 6, 10, 12
_COL_FILLPRED, _COL_PRED = 13, 14
_MIN_COLS = 14


def _build_conll_record(lines, path):
    forms, tags, heads, deprels, fillpred, apreds = [], [], [], [], [], []
    for line_no, line in lines:
        cols = line.split("\t")
        if len(cols) < _MIN_COLS:
            raise ParseError(path, line_no, f"expected >= {_MIN_COLS} columns, got {len(cols)}")
        forms.append(cols[_COL_FORM - 1])
        tags.append(cols[_COL_PPOS - 1])
        try:
            heads.append(int(cols[_COL_PHEAD - 1]))
        except ValueError:
            raise ParseError(path, line_no, f"non-integer head {cols[_COL_PHEAD - 1]!r}")
        deprels.append(cols[_COL_PDEPREL - 1])
        fillpred.append(cols[_COL_FILLPRED - 1] == "Y")
        apreds.append(cols[_MIN_COLS:])
    n = len(forms)
    first_line = lines[0][0]
    predicates = [w + 1 for w in range(n) if fillpred[w]]
    sentence = Sentence.from_words(forms, tags)
    arcs = set()
    for w, (head, deprel) in enumerate(zip(heads, deprels), start=1):
        if not 0 <= head <= n:
            raise ParseError(path, first_line + w - 1, f"head index {head} out of range")
        arcs.add((head, w, deprel))
    tuples = set()
    for w in range(n):
        if len(apreds[w]) != len(predicates):
            raise ParseError(
                path, first_line + w,
                f"expected {len(predicates)} argument columns, got {len(apreds[w])}",
            )
        for p_idx, label in enumerate(apreds[w]):
            if label != "_":
                k = predicates[p_idx]
                tuples.add((k, w + 1, w + 1, label))
    try:
        return CorpusRecord(
            sentence=sentence,
            syn=DependencyGraph(arcs),
            gold_srl=SrlGraph(tuples, DEP_STYLE),
            predicates_given=tuple(predicates),
        )
    except DataError as exc:
        raise ParseError(path, first_line, str(exc))


def read_conll2009(path):
    """Read a CoNLL-2009 file into dependency-style CorpusRecords."""
    records = []
    block = []
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                if block:
                    records.append(_build_conll_record(block, path))
                    block = []
                continue
            block.append((line_no, line))
    if block:
        records.append(_build_conll_record(block, path))
    return records


def write_conll2009(records, srl_graphs, path):
    """Write dependency-style SRL predictions in CoNLL-2009 columns."""
    with open(path, "w", encoding="utf-8") as fh:
        for rec, srl in zip(records, srl_graphs):
            n = rec.sentence.n_words
            head_of = rec.syn.head_of()
            predicates = sorted({k for k, _i, _j, _l in srl.tuples})
            by_pred = {k: {} for k in predicates}
            for k, i, _j, label in srl.tuples:
                by_pred[k][i] = label
            for w in range(1, n + 1):
                head, deprel = head_of[w]
                form = rec.sentence.words[w]
                tag = rec.sentence.pos_tags[w]
                is_pred = w in by_pred
                cols = [
                    str(w), form, "_", "_", tag, tag, "_", "_",
                    str(head), str(head), deprel, deprel,
                    "Y" if is_pred else "_",
                    form if is_pred else "_",
                ]
                cols.extend(by_pred[k].get(w, "_") for k in predicates)
                fh.write("\t".join(cols) + "\n")
            fh.write("\n")


_JSONL_REQUIRED = ("words", "pos", "heads", "deprels", "srl")


def _record_from_json(obj, path, line_no):
    for key in _JSONL_REQUIRED:
        if key not in obj:
            raise ParseError(path, line_no, f"missing field {key!r}")
    words, pos = obj["words"], obj["pos"]
    heads, deprels = obj["heads"], obj["deprels"]
    if not len(words) == len(pos) == len(heads) == len(deprels):
        raise ParseError(path, line_no, "words/pos/heads/deprels length mismatch")
    tuples = set()
    for entry in obj["srl"]:
        try:
            k, i, j, label = entry["pred"], entry["start"], entry["end"], entry["label"]
        except KeyError as exc:
            raise ParseError(path, line_no, f"srl entry missing {exc}")
        if i > j:
            raise ParseError(path, line_no, f"srl span <{i},{j}> has start > end")
        tuples.add((k, i, j, label))
    style = obj.get("style")
    if style is None:
        style = DEP_STYLE if all(i == j for _k, i, j, _l in tuples) else SPAN_STYLE
    arcs = {(h, w, rel) for w, (h, rel) in enumerate(zip(heads, deprels), start=1)}
    try:
        return CorpusRecord(
            sentence=Sentence.from_words(words, pos),
            syn=DependencyGraph(arcs),
            gold_srl=SrlGraph(tuples, style),
            predicates_given=tuple(obj["predicates"]) if "predicates" in obj else None,
        )
    except DataError as exc:
        raise ParseError(path, line_no, str(exc))


def read_jsonl(path):
    records = []
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(path, line_no, f"invalid JSON: {exc}")
            records.append(_record_from_json(obj, path, line_no))
    return records


def record_to_json(record, srl=None):
    """Serialise a CorpusRecord (optionally with replacement SRL) to a dict."""
    srl = record.gold_srl if srl is None else srl
    head_of = record.syn.head_of()
    n = record.sentence.n_words
    obj = {
        "words": list(record.sentence.words[1:-1]),
        "pos": list(record.sentence.pos_tags[1:-1]),
        "heads": [head_of[w][0] for w in range(1, n + 1)],
        "deprels": [head_of[w][1] for w in range(1, n + 1)],
        "srl": [
            {"pred": k, "start": i, "end": j, "label": label}
            for k, i, j, label in sorted(srl.tuples)
        ],
        "style": srl.style,
    }
    if record.predicates_given is not None:
        obj["predicates"] = list(record.predicates_given)
    return obj


def write_jsonl(records, path, srl_graphs=None):
    with open(path, "w", encoding="utf-8") as fh:
        for idx, rec in enumerate(records):
            srl = srl_graphs[idx] if srl_graphs is not None else None
            fh.write(json.dumps(record_to_json(rec, srl), ensure_ascii=False) + "\n")
