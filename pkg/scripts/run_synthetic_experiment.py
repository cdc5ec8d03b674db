#!/usr/bin/env python3
"""Variant comparison on the synthetic corpus, end to end through the CLI.

Generates a train/dev split, trains each encoder variant, decodes the dev
set, scores it, and emits the cross-variant error-analysis tables:

    python3 scripts/run_synthetic_experiment.py --out runs/synthetic

Outputs per variant: runs/<name>/model.pt, predictions under
runs/<name>-dec/, plus sentence-length and dependency-length F1 tables
aggregated across variants under <out>/analysis/.
"""

import argparse
import json
import sys
from pathlib import Path

from synsrl.cli import main as synsrl_main
from synsrl.config import VARIANTS, ModelConfig
from synsrl.conll import write_jsonl
from synsrl.synthetic import make_synthetic_corpus, synthetic_config_overrides


def parse_args(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="runs/synthetic", help="experiment directory")
    parser.add_argument("--style", choices=("span", "dep"), default="span")
    parser.add_argument("--n-train", type=int, default=40)
    parser.add_argument("--n-dev", type=int, default=20)
    parser.add_argument("--epochs", type=int, default=200)
    parser.add_argument("--seed", type=int, default=5)
    parser.add_argument(
        "--variants", nargs="+", choices=VARIANTS, default=list(VARIANTS)
    )
    return parser.parse_args(argv)


def run(argv=None):
    args = parse_args(argv)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    train_path = out / "train.jsonl"
    dev_path = out / "dev.jsonl"
    write_jsonl(make_synthetic_corpus(args.n_train, style=args.style, seed=args.seed),
                train_path)
    write_jsonl(make_synthetic_corpus(args.n_dev, style=args.style, seed=args.seed + 1),
                dev_path)

    overrides = synthetic_config_overrides()
    overrides.update(epochs=args.epochs, patience=args.epochs)
    config_path = out / "config.yaml"
    ModelConfig(seed=args.seed, **overrides).save(config_path)

    decode_dirs = []
    summary = {}
    for variant in args.variants:
        run_dir = out / variant
        rc = synsrl_main([
            "train", "--config", str(config_path), "--train", str(train_path),
            "--dev", str(dev_path), "--variant", variant,
            "--out", str(run_dir), "--quiet",
        ])
        if rc != 0:
            return rc
        dec_dir = out / f"{variant}-dec"
        rc = synsrl_main([
            "decode", "--checkpoint", str(run_dir / "model.pt"),
            "--data", str(dev_path), "--out", str(dec_dir),
        ])
        if rc != 0:
            return rc
        eval_dir = out / f"{variant}-eval"
        rc = synsrl_main([
            "eval", "--gold", str(dev_path),
            "--pred", str(dec_dir / "predictions.jsonl"), "--out", str(eval_dir),
        ])
        if rc != 0:
            return rc
        report = json.loads((eval_dir / "eval.json").read_text())
        summary[variant] = {k: report[k] for k in ("precision", "recall", "f1")}
        decode_dirs.append(str(dec_dir))

    rc = synsrl_main([
        "analyze", "--gold", str(dev_path), *decode_dirs,
        "--out", str(out / "analysis"),
    ])
    if rc != 0:
        return rc

    with open(out / "summary.json", "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2)
    width = max(len(v) for v in summary)
    print(f"\ndev-set results ({args.style} style, {args.n_dev} sentences)")
    for variant, scores in summary.items():
        print(f"  {variant:<{width}}  P {scores['precision']:.4f}  "
              f"R {scores['recall']:.4f}  F1 {scores['f1']:.4f}")
    return 0


if __name__ == "__main__":
    sys.exit(run())
