"""Span representations, candidate scoring, pruning and the training loss.

Candidates are indexed in word space; their encoder rows are looked up
through first-subword positions.  The null label is fixed at id 0 and its
combined score is pinned to zero, so the predicate and argument scorers
stay trainable through the label softmax.
"""

import math
from dataclasses import dataclass

import torch
import torch.nn as nn
import torch.nn.functional as F

from .data import DataError
from .encoder import init_table


def span_representation(z, i, j, i_next=None, j_next=None):
    """Directional-difference representation of span <i, j>.

    The forward half of z feeds the right end-point, the backward half
    the left one: s = [fwd(z_{j+1}); fwd(z_j)] - [bwd(z_i); bwd(z_{i+1})].
    `i_next`/`j_next` default to the literal next positions; callers with
    multi-subword words pass the following word's first subword instead.
    """
    if i_next is None:
        i_next = i + 1
    if j_next is None:
        j_next = j + 1
    n, d_x = z.shape
    if not (0 <= i <= j and max(i_next, j_next) < n):
        raise DataError(f"span <{i},{j}> (next {i_next},{j_next}) out of range for {n} rows")
    half = d_x // 2
    fwd, bwd = z[:, :half], z[:, half:]
    sr = torch.cat([fwd[j_next], fwd[j]])
    sl = torch.cat([bwd[i], bwd[i_next]])
    return sr - sl


def span_representations(z, starts, ends, starts_next, ends_next):
    """Vectorised span reps for index tensors of equal length."""
    half = z.shape[1] // 2
    fwd, bwd = z[:, :half], z[:, half:]
    sr = torch.cat([fwd[ends_next], fwd[ends]], dim=-1)
    sl = torch.cat([bwd[starts], bwd[starts_next]], dim=-1)
    return sr - sl


@dataclass
class CandidateSet:
    """Pruned candidates with their scores (tensors keep the autograd graph)."""

    spans: list          # list of (start, end) word indices, score-descending
    span_scores: torch.Tensor
    predicates: list     # list of word indices, score-descending
    pred_scores: torch.Tensor
    predicates_pruned: bool = True


def _keep_count(n_words, lam, cap):
    return min(cap, math.ceil(lam * n_words))


def _top_ranked(items, scores, keep):
    """Deterministic top-k: score descending, ties by candidate order."""
    order = sorted(range(len(items)), key=lambda s: (-scores[s], items[s]))
    kept = sorted(order[:keep], key=lambda s: (-scores[s], items[s]))
    return kept


class SrlHead(nn.Module):
    def __init__(self, config):
        super().__init__()
        d_x = config.hidden_size
        self.config = config
        self.arg_transform = nn.Linear(d_x, d_x)
        self.pair_transform = nn.Linear(2 * d_x, config.label_hidden)
        self.pair_norm = nn.LayerNorm(config.label_hidden)
        self.label_out = nn.Linear(config.label_hidden, config.n_srl_labels)
        self.arg_scorer = nn.Sequential(
            nn.Linear(d_x, config.span_hidden), nn.ReLU(),
            nn.Linear(config.span_hidden, 1),
        )
        self.pred_scorer = nn.Sequential(
            nn.Linear(d_x, config.span_hidden), nn.ReLU(),
            nn.Linear(config.span_hidden, 1),
        )
        for module in self.modules():
            if isinstance(module, nn.Linear):
                init_table(module.weight)
                nn.init.zeros_(module.bias)

    def argument_rep(self, s):
        return F.relu(self.arg_transform(s))

    @staticmethod
    def predicate_rep(z, k):
        return z[k]

    def label_scores(self, a, p):
        """Per-label scores for argument reps a (A, d) and predicate reps p (P, d)."""
        n_p, n_a = p.shape[0], a.shape[0]
        pair = torch.cat(
            [a.unsqueeze(0).expand(n_p, -1, -1), p.unsqueeze(1).expand(-1, n_a, -1)],
            dim=-1,
        )
        hidden = self.pair_norm(self.pair_transform(pair))
        return self.label_out(hidden)  # (P, A, L)

    def enumerate_spans(self, n_words, style):
        """Candidate spans in word space; dependency style uses width 1."""
        max_width = self.config.max_span_width or n_words
        if style == "dep":
            max_width = 1
        spans = []
        for i in range(1, n_words + 1):
            for j in range(i, min(i + max_width - 1, n_words) + 1):
                spans.append((i, j))
        return spans

    def span_reps_for(self, z, spans, word_pos):
        """Span reps for word-space spans; word_pos maps word idx -> z row."""
        device = z.device
        starts = torch.tensor([word_pos[i] for i, _j in spans], device=device)
        ends = torch.tensor([word_pos[j] for _i, j in spans], device=device)
        starts_next = torch.tensor([word_pos[i + 1] for i, _j in spans], device=device)
        ends_next = torch.tensor([word_pos[j + 1] for _i, j in spans], device=device)
        return span_representations(z, starts, ends, starts_next, ends_next)

    def prune_candidates(self, z, n_words, word_pos, style, predicates_given=None):
        """Score all candidates and keep the top-ranked ones.

        `word_pos` is indexable by word index 0..n+1 and returns the row
        of z for that word's first subword.
        """
        if n_words <= 0:
            raise DataError("cannot prune candidates of an empty sentence")
        cfg = self.config
        spans = self.enumerate_spans(n_words, style)
        s = self.span_reps_for(z, spans, word_pos)
        a = self.argument_rep(s)
        span_scores = self.arg_scorer(a).squeeze(-1)
        keep_spans = _keep_count(n_words, cfg.lambda_span, cfg.max_spans)
        kept = _top_ranked(spans, span_scores.detach().tolist(), keep_spans)
        kept_spans = [spans[s_idx] for s_idx in kept]
        kept_span_scores = span_scores[kept]

        tokens = list(range(1, n_words + 1))
        token_rows = z[torch.tensor([word_pos[k] for k in tokens], device=z.device)]
        pred_scores_all = self.pred_scorer(token_rows).squeeze(-1)
        if predicates_given is not None:
            kept_preds = sorted(predicates_given)
            pred_idx = [tokens.index(k) for k in kept_preds]
            pruned = False
        else:
            keep_preds = _keep_count(n_words, cfg.lambda_verb, cfg.max_verbs)
            pred_idx = _top_ranked(tokens, pred_scores_all.detach().tolist(), keep_preds)
            kept_preds = [tokens[t] for t in pred_idx]
            pruned = True
        kept_pred_scores = pred_scores_all[pred_idx]
        return CandidateSet(
            spans=kept_spans,
            span_scores=kept_span_scores,
            predicates=kept_preds,
            pred_scores=kept_pred_scores,
            predicates_pruned=pruned,
        ), a[kept]

    def pair_scores(self, z, candidates, arg_reps, word_pos):
        """Combined per-pair logits with the pinned-zero null column.

        Returns (P, A, L) logits where column 0 is identically zero and
        column l holds phi_p + phi_a + phi_l for l != 0.
        """
        pred_rows = z[torch.tensor([word_pos[k] for k in candidates.predicates],
                                   device=z.device)]
        phi_l = self.label_scores(arg_reps, pred_rows)  # (P, A, L)
        combined = (
            candidates.pred_scores[:, None, None]
            + candidates.span_scores[None, :, None]
            + phi_l[..., 1:]
        )
        zero = torch.zeros(combined.shape[:-1] + (1,), dtype=z.dtype, device=z.device)
        return torch.cat([zero, combined], dim=-1)


def srl_loss(logits, candidates, gold_labels):
    """Summed cross-entropy over all kept (predicate, span) pairs.

    `gold_labels` maps (pred, start, end) word-space keys to label ids;
    pairs without a gold entry train towards the null label (id 0).
    """
    n_p, n_a, n_l = logits.shape
    if n_p == 0 or n_a == 0:
        raise DataError("no candidate pairs survive pruning")
    targets = torch.zeros((n_p, n_a), dtype=torch.long, device=logits.device)
    for p_idx, k in enumerate(candidates.predicates):
        for a_idx, (i, j) in enumerate(candidates.spans):
            targets[p_idx, a_idx] = gold_labels.get((k, i, j), 0)
    return F.cross_entropy(logits.view(-1, n_l), targets.view(-1), reduction="sum")


def gold_recall(candidates, gold_labels):
    """Fraction of gold tuples whose predicate and span both survived pruning."""
    if not gold_labels:
        return 1.0
    preds = set(candidates.predicates)
    spans = set(candidates.spans)
    hit = sum(1 for (k, i, j) in gold_labels if k in preds and (i, j) in spans)
    return hit / len(gold_labels)
