"""Precision / recall / F1 for SRL graphs, plus error-analysis binning."""

import csv
import json
from dataclasses import dataclass, field

from .data import DEP_STYLE, DataError

LENGTH_BIN_NAMES = ("0-9", "10-19", "20-29", "30-39", "40+")
DEP_BIN_NAMES = ("1", "2", "3", "4", "5", "6+")


@dataclass
class Counts:
    correct: int = 0
    predicted: int = 0
    gold: int = 0

    def add(self, other):
        self.correct += other.correct
        self.predicted += other.predicted
        self.gold += other.gold

    @property
    def precision(self):
        return self.correct / self.predicted if self.predicted else 0.0

    @property
    def recall(self):
        return self.correct / self.gold if self.gold else 0.0

    @property
    def f1(self):
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0


@dataclass
class EvalReport:
    mode: str
    counts: Counts
    length_bins: dict = field(default_factory=dict)   # bin name -> Counts
    dep_bins: dict = field(default_factory=dict)
    gold_recall: float = None

    @property
    def precision(self):
        return self.counts.precision

    @property
    def recall(self):
        return self.counts.recall

    @property
    def f1(self):
        return self.counts.f1

    def to_dict(self):
        def prf(c):
            return {"precision": c.precision, "recall": c.recall, "f1": c.f1,
                    "correct": c.correct, "predicted": c.predicted, "gold": c.gold}

        d = {"mode": self.mode, **prf(self.counts)}
        if self.length_bins:
            d["sentence_length_bins"] = {k: prf(v) for k, v in self.length_bins.items()}
        if self.dep_bins:
            d["dependency_length_bins"] = {k: prf(v) for k, v in self.dep_bins.items()}
        if self.gold_recall is not None:
            d["gold_recall"] = self.gold_recall
        return d

    def save_json(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")


def length_bin(n_words):
    if n_words < 10:
        return "0-9"
    if n_words < 20:
        return "10-19"
    if n_words < 30:
        return "20-29"
    if n_words < 40:
        return "30-39"
    return "40+"


def dependency_length(tup, style):
    """Predicate-argument distance; distance 0 is clamped into bin 1."""
    k, i, j, _label = tup
    dist = abs(k - i) if style == DEP_STYLE else min(abs(k - i), abs(k - j))
    return max(dist, 1)


def dep_bin(dist):
    return str(dist) if dist < 6 else "6+"


def evaluate(predictions, golds, mode="end-to-end", sentence_lengths=None):
    """Score predicted against gold SrlGraphs, sentence by sentence.

    A predicted tuple is correct iff predicate, span and label all match a
    gold tuple.  When sentence lengths are given the report also carries
    per-bin counts; the bins partition the tuples, so their sums equal
    the overall counts.
    """
    if len(predictions) != len(golds):
        raise DataError("prediction and gold lists differ in length")
    report = EvalReport(mode=mode, counts=Counts())
    report.length_bins = {name: Counts() for name in LENGTH_BIN_NAMES}
    report.dep_bins = {name: Counts() for name in DEP_BIN_NAMES}
    for s_idx, (pred, gold) in enumerate(zip(predictions, golds)):
        correct = pred.tuples & gold.tuples
        report.counts.correct += len(correct)
        report.counts.predicted += len(pred.tuples)
        report.counts.gold += len(gold.tuples)
        if sentence_lengths is not None:
            lbin = report.length_bins[length_bin(sentence_lengths[s_idx])]
            lbin.correct += len(correct)
            lbin.predicted += len(pred.tuples)
            lbin.gold += len(gold.tuples)
        for tup in pred.tuples:
            dbin = report.dep_bins[dep_bin(dependency_length(tup, pred.style))]
            dbin.predicted += 1
            if tup in correct:
                dbin.correct += 1
        for tup in gold.tuples:
            report.dep_bins[dep_bin(dependency_length(tup, gold.style))].gold += 1
    return report


def bins_to_csv(reports_by_name, bin_names, which, path):
    """Write one CSV row of per-bin F1 per named report (model variant)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["model"] + list(bin_names))
        for name, report in reports_by_name.items():
            bins = getattr(report, which)
            writer.writerow([name] + [f"{bins[b].f1:.4f}" for b in bin_names])
