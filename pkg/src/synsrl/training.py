"""Training loop: two-group optimiser, bucket batching, early stopping."""

import math
import random
from dataclasses import dataclass, field

import torch

from .data import DataError
from .evaluation import evaluate
from .model import SrlModel, featurize_corpus
from .vocab import build_vocabularies


@dataclass
class TrainState:
    model: SrlModel
    vocabs: object
    config: object
    epoch: int = 0
    best_dev_f1: float = 0.0
    history: list = field(default_factory=list)  # (epoch, mean_loss, dev_f1)


def bucket_batches(examples, batch_size, rng):
    """Group length-sorted examples into batches, then shuffle batch order."""
    order = sorted(range(len(examples)), key=lambda i: examples[i].n_positions)
    batches = [order[i:i + batch_size] for i in range(0, len(order), batch_size)]
    rng.shuffle(batches)
    return [[examples[i] for i in batch] for batch in batches]


def build_optimizer(model, config):
    encoder_params = list(model.encoder.parameters())
    head_params = list(model.head.parameters())
    return torch.optim.AdamW(
        [
            {"params": encoder_params, "lr": config.encoder_lr},
            {"params": head_params, "lr": config.base_lr},
        ],
        betas=config.adam_betas,
        eps=config.adam_eps,
        weight_decay=config.weight_decay,
    )


def warmup_scale(step, total_steps, warmup_fraction):
    warmup_steps = max(1, math.ceil(warmup_fraction * total_steps))
    return min(1.0, step / warmup_steps)


def dev_f1(model, examples, vocabs, mode="end-to-end"):
    model.eval()
    preds = [model.predict_labels(ex, vocabs, mode) for ex in examples]
    golds = [ex.gold_srl for ex in examples]
    report = evaluate(preds, golds, mode=mode)
    model.train()
    return report.f1


def train(train_records, config, dev_records=None, vocabs=None, log=None):
    """Train a model from scratch; returns the best-dev TrainState.

    Without a dev set the training set doubles as dev (overfitting runs).
    Logs one `epoch, step, loss, dev_F1` line per epoch when `log` is given.
    """
    if not train_records:
        raise DataError("empty training corpus")
    torch.manual_seed(config.seed)
    rng = random.Random(config.seed)
    if vocabs is None:
        vocabs = build_vocabularies(train_records)
    model = SrlModel.from_vocabs(config, vocabs)
    config = model.config  # label counts filled in
    train_ex = featurize_corpus(train_records, vocabs, config)
    dev_ex = featurize_corpus(dev_records, vocabs, config) if dev_records else train_ex

    optimizer = build_optimizer(model, config)
    base_lrs = [group["lr"] for group in optimizer.param_groups]
    steps_per_epoch = math.ceil(len(train_ex) / config.batch_size)
    total_steps = max(1, steps_per_epoch * config.epochs)

    state = TrainState(model=model, vocabs=vocabs, config=config)
    best_state_dict = None
    patience_left = config.patience
    step = 0
    model.train()
    for epoch in range(1, config.epochs + 1):
        epoch_loss, epoch_pairs = 0.0, 0
        for batch in bucket_batches(train_ex, config.batch_size, rng):
            step += 1
            scale = warmup_scale(step, total_steps, config.warmup)
            for group, base in zip(optimizer.param_groups, base_lrs):
                group["lr"] = base * scale
            optimizer.zero_grad()
            loss, n_pairs, _recall = model.loss(batch)
            if not torch.isfinite(loss):
                raise DataError(
                    f"non-finite loss at epoch {epoch} step {step}: {loss.item()!r}"
                )
            (loss / n_pairs).backward()
            torch.nn.utils.clip_grad_norm_(model.parameters(), config.max_grad_norm)
            optimizer.step()
            epoch_loss += loss.item()
            epoch_pairs += n_pairs
        mean_loss = epoch_loss / max(epoch_pairs, 1)
        f1 = dev_f1(model, dev_ex, vocabs)
        state.epoch = epoch
        state.history.append((epoch, mean_loss, f1))
        if log is not None:
            log(f"epoch {epoch}, step {step}, loss {mean_loss:.6f}, dev_F1 {f1:.4f}")
        if f1 > state.best_dev_f1:
            state.best_dev_f1 = f1
            best_state_dict = {k: v.detach().clone() for k, v in model.state_dict().items()}
            patience_left = config.patience
        else:
            patience_left -= 1
            if patience_left <= 0:
                break
    if best_state_dict is not None:
        model.load_state_dict(best_state_dict)
    model.eval()
    return state
