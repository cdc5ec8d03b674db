"""Batch command line: train | eval | decode | analyze | paramcount.

Outputs go to the directory given by --out (overridable with the
SYNSRL_OUT_DIR environment variable); the effective config is echoed
into the run directory for provenance.
"""

import argparse
import json
import os
import sys
import time
from pathlib import Path

from .accounting import added_param_counts
from .config import GRAPH_ATTN, LABEL_EMB, PLAIN, VARIANTS, ModelConfig
from .conll import read_conll2009, read_jsonl, write_conll2009, write_jsonl
from .data import DEP_STYLE
from .evaluation import DEP_BIN_NAMES, LENGTH_BIN_NAMES, bins_to_csv, evaluate
from .model import featurize_corpus, load_checkpoint, save_checkpoint
from .training import train

ENV_OUT_DIR = "SYNSRL_OUT_DIR"


class CliError(RuntimeError):
    pass


def _out_dir(args):
    out = os.environ.get(ENV_OUT_DIR) or args.out
    if out is None:
        raise CliError("no output directory: pass --out or set " + ENV_OUT_DIR)
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _read_corpus(path, fmt):
    path = Path(path)
    if not path.exists():
        raise CliError(f"input file not found: {path}")
    if fmt == "conll2009" or (fmt == "auto" and path.suffix in (".conll", ".conll2009")):
        return read_conll2009(path)
    return read_jsonl(path)


def _load_config(args):
    if args.config:
        if not Path(args.config).exists():
            raise CliError(f"config file not found: {args.config}")
        config = ModelConfig.load(args.config)
    else:
        config = ModelConfig()
    overrides = {}
    if getattr(args, "variant", None):
        overrides["variant"] = args.variant
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    return config.replace(**overrides) if overrides else config


class _PhaseTimer:
    def __init__(self, log_path):
        self.log_path = log_path

    def log(self, phase, seconds):
        with open(self.log_path, "a", encoding="utf-8") as fh:
            fh.write(f"{phase}\t{seconds:.3f}\n")


def cmd_train(args):
    out = _out_dir(args)
    timer = _PhaseTimer(out / "timing.log")
    config = _load_config(args)
    train_records = _read_corpus(args.train, args.format)
    dev_records = _read_corpus(args.dev, args.format) if args.dev else None

    log_path = out / "train.log"
    log_fh = open(log_path, "w", encoding="utf-8")

    def log(line):
        log_fh.write(line + "\n")
        log_fh.flush()
        if not args.quiet:
            print(line)

    t0 = time.perf_counter()
    state = train(train_records, config, dev_records=dev_records, log=log)
    timer.log("train", time.perf_counter() - t0)
    log_fh.close()

    state.config.save(out / "config.yaml")
    state.vocabs.subwords.save(out / "vocab.subwords.tsv")
    state.vocabs.pos_tags.save(out / "vocab.pos.tsv")
    state.vocabs.syn_labels.save(out / "vocab.syn_labels.tsv")
    state.vocabs.srl_labels.save(out / "vocab.srl_labels.tsv")
    save_checkpoint(out / "model.pt", state.model, state.vocabs)
    with open(out / "train_summary.json", "w", encoding="utf-8") as fh:
        json.dump(
            {"epochs_run": state.epoch, "best_dev_f1": state.best_dev_f1,
             "history": state.history},
            fh, indent=2,
        )
    print(f"best dev F1 {state.best_dev_f1:.4f} after {state.epoch} epochs -> {out}")
    return 0


def _decode_corpus(model, vocabs, records, mode):
    examples = featurize_corpus(records, vocabs, model.config)
    return examples, [model.predict_labels(ex, vocabs, mode) for ex in examples]


def cmd_decode(args):
    out = _out_dir(args)
    timer = _PhaseTimer(out / "timing.log")
    if not Path(args.checkpoint).exists():
        raise CliError(f"checkpoint not found: {args.checkpoint}")
    model, vocabs = load_checkpoint(args.checkpoint)
    model.config.save(out / "config.yaml")
    records = _read_corpus(args.data, args.format)
    t0 = time.perf_counter()
    _examples, preds = _decode_corpus(model, vocabs, records, args.mode)
    timer.log("decode", time.perf_counter() - t0)
    write_jsonl(records, out / "predictions.jsonl", srl_graphs=preds)
    if args.conll:
        if any(p.style != DEP_STYLE for p in preds):
            raise CliError("--conll output needs dependency-style predictions")
        write_conll2009(records, preds, out / "predictions.conll")
    print(f"decoded {len(records)} sentences -> {out / 'predictions.jsonl'}")
    return 0


def cmd_eval(args):
    out = _out_dir(args)
    gold_records = _read_corpus(args.gold, args.format)
    pred_records = _read_corpus(args.pred, args.format)
    if len(gold_records) != len(pred_records):
        raise CliError("gold and prediction files differ in sentence count")
    golds = [rec.gold_srl for rec in gold_records]
    preds = [rec.gold_srl for rec in pred_records]
    lengths = [rec.sentence.n_words for rec in gold_records]
    report = evaluate(preds, golds, mode=args.mode, sentence_lengths=lengths)
    report.save_json(out / "eval.json")
    bins_to_csv({"model": report}, LENGTH_BIN_NAMES, "length_bins",
                out / "sentence_length_bins.csv")
    bins_to_csv({"model": report}, DEP_BIN_NAMES, "dep_bins",
                out / "dependency_length_bins.csv")
    print(f"P {report.precision:.4f} R {report.recall:.4f} F1 {report.f1:.4f}")
    return 0


def cmd_analyze(args):
    out = _out_dir(args)
    gold_records = _read_corpus(args.gold, args.format)
    golds = [rec.gold_srl for rec in gold_records]
    lengths = [rec.sentence.n_words for rec in gold_records]
    reports = {}
    for pred_dir in args.pred_dirs:
        pred_path = Path(pred_dir) / "predictions.jsonl"
        if not pred_path.exists():
            pred_path = Path(pred_dir)
        if not pred_path.exists():
            raise CliError(f"predictions not found under {pred_dir}")
        pred_records = read_jsonl(pred_path)
        preds = [rec.gold_srl for rec in pred_records]
        if not any(p.tuples for p in preds):
            print(f"warning: empty prediction set in {pred_dir}", file=sys.stderr)
        name = Path(pred_dir).stem
        reports[name] = evaluate(preds, golds, mode=args.mode, sentence_lengths=lengths)
    bins_to_csv(reports, LENGTH_BIN_NAMES, "length_bins", out / "sentence_length_bins.csv")
    bins_to_csv(reports, DEP_BIN_NAMES, "dep_bins", out / "dependency_length_bins.csv")
    if args.plots:
        _render_bin_charts(reports, out)
    print(f"analysis tables for {len(reports)} model(s) -> {out}")
    return 0


def _render_bin_charts(reports, out):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    for which, names, fname in (
        ("length_bins", LENGTH_BIN_NAMES, "sentence_length_f1.png"),
        ("dep_bins", DEP_BIN_NAMES, "dependency_length_f1.png"),
    ):
        fig, ax = plt.subplots()
        for model_name, report in reports.items():
            bins = getattr(report, which)
            ax.plot(list(names), [bins[b].f1 for b in names], marker="o", label=model_name)
        ax.set_ylabel("F1")
        ax.set_xlabel(which.replace("_", " "))
        ax.legend()
        fig.savefig(out / fname, dpi=120)
        plt.close(fig)


def cmd_paramcount(args):
    config = _load_config(args)
    if args.syn_labels is not None:
        config = config.replace(n_syn_labels=args.syn_labels)
    counts = added_param_counts(
        config.n_syn_labels, config.num_layers, config.num_heads, config.hidden_size
    )
    rows = [
        (PLAIN, "+0", counts[PLAIN]),
        (LABEL_EMB, "+(L+1)*d_x", counts[LABEL_EMB]),
        (GRAPH_ATTN, "+(2L+1)*m*d", counts[GRAPH_ATTN]),
    ]
    print(f"added parameters (L={config.n_syn_labels}, m={config.num_layers}, "
          f"d_x={config.hidden_size}, d={config.head_size})")
    for name, formula, count in rows:
        print(f"{name:12s} {formula:14s} {count}")
    if args.out:
        out = _out_dir(args)
        with open(out / "paramcount.json", "w", encoding="utf-8") as fh:
            json.dump({name: count for name, _f, count in rows}, fh, indent=2)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="synsrl")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_out=True):
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--format", choices=("auto", "jsonl", "conll2009"), default="auto")

    p = sub.add_parser("train", help="train a model")
    p.add_argument("--config", default=None)
    p.add_argument("--train", required=True)
    p.add_argument("--dev", default=None)
    p.add_argument("--variant", choices=VARIANTS, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--quiet", action="store_true")
    common(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("decode", help="decode with a trained checkpoint")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--mode", choices=("end-to-end", "given"), default="end-to-end")
    p.add_argument("--conll", action="store_true",
                   help="also write CoNLL-2009 columns (dependency style only)")
    common(p)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("eval", help="score predictions against gold")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--mode", choices=("end-to-end", "given"), default="end-to-end")
    common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("analyze", help="error-analysis bins across model runs")
    p.add_argument("--gold", required=True)
    p.add_argument("pred_dirs", nargs="+", help="run directories with predictions.jsonl")
    p.add_argument("--mode", choices=("end-to-end", "given"), default="end-to-end")
    p.add_argument("--plots", action="store_true")
    common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("paramcount", help="added-parameter accounting per variant")
    p.add_argument("--config", default=None)
    p.add_argument("--syn-labels", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_paramcount)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CliError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
