"""Transformer encoder with dependency-graph-conditioned self-attention.

Per head, the attention score between positions i and j is

    e_ij = [(x_i Wq + r_ij Wr)(x_j Wk + r_ij Wr)^T - (r_ij Wr)(r_ij Wr)^T] / sqrt(d)

where r_ij selects a row of the layer's relation table (shared across
heads).  Expanding and cancelling the quadratic relation term gives the
equivalent three-term form computed in the batched forward:

    e_ij = [q_i.k_j + q_i.r_ij + r_ij.k_j] / sqrt(d)

The no-key ablation drops the r_ij.k_j term; the plain and
label-embedding variants keep only the content term.
"""

import math

import torch
import torch.nn as nn
import torch.nn.functional as F

from .config import GRAPH_ATTN, GRAPH_ATTN_NOKEY, GRAPH_VARIANTS, LABEL_EMB


class EncoderError(RuntimeError):
    pass


def init_table(tensor):
    nn.init.trunc_normal_(tensor, std=0.02, a=-0.04, b=0.04)


def attention_scores_full(x, rel_ids, w_q, w_k, rel_table):
    """Reference single-head scores from the quadratic-form definition."""
    d = w_q.shape[1]
    q = x @ w_q
    k = x @ w_k
    r = rel_table[rel_ids]  # (N, N, d)
    qr = q.unsqueeze(1) + r
    kr = k.unsqueeze(0) + r
    e = (qr * kr).sum(-1) - (r * r).sum(-1)
    return e / math.sqrt(d)


def attention_scores_reformulated(x, rel_ids, w_q, w_k, rel_table, variant=GRAPH_ATTN):
    """Single-head scores as the parallel three-term sum, with ablations."""
    d = w_q.shape[1]
    q = x @ w_q
    k = x @ w_k
    e = q @ k.T
    if variant in GRAPH_VARIANTS:
        r = rel_table[rel_ids]
        e = e + (q.unsqueeze(1) * r).sum(-1)
        if variant == GRAPH_ATTN:
            e = e + (r * k.unsqueeze(0)).sum(-1)
    return e / math.sqrt(d)


def attention_values(alpha, x, w_v):
    """Value aggregation: v_i = sum_j alpha_ij (x_j W_v)."""
    return alpha @ (x @ w_v)


class InputEmbeddings(nn.Module):
    """Sum of subword, PoS-tag and learned positional embeddings.

    The label-embedding variant also adds a per-token embedding of the
    incoming dependency label (the no-head id is the last row).
    """

    def __init__(self, config, n_subwords, n_pos_tags):
        super().__init__()
        d_x = config.hidden_size
        self.token_emb = nn.Embedding(n_subwords, d_x)
        self.pos_tag_emb = nn.Embedding(n_pos_tags, d_x)
        self.position_emb = nn.Embedding(config.max_positions, d_x)
        init_table(self.token_emb.weight)
        init_table(self.pos_tag_emb.weight)
        init_table(self.position_emb.weight)
        if config.variant == LABEL_EMB:
            self.dep_label_emb = nn.Embedding(config.n_syn_labels + 1, d_x)
            init_table(self.dep_label_emb.weight)
        else:
            self.dep_label_emb = None

    def forward(self, token_ids, pos_tag_ids, position_ids, dep_label_ids=None):
        x = (
            self.token_emb(token_ids)
            + self.pos_tag_emb(pos_tag_ids)
            + self.position_emb(position_ids)
        )
        if self.dep_label_emb is not None:
            if dep_label_ids is None:
                raise EncoderError("label-emb variant needs per-token dependency label ids")
            x = x + self.dep_label_emb(dep_label_ids)
        return x


class EncoderLayer(nn.Module):
    """Post-norm Transformer layer whose attention conditions on relations."""

    def __init__(self, config):
        super().__init__()
        d_x = config.hidden_size
        self.num_heads = config.num_heads
        self.head_size = config.head_size
        self.query = nn.Linear(d_x, d_x, bias=False)
        self.key = nn.Linear(d_x, d_x, bias=False)
        self.value = nn.Linear(d_x, d_x, bias=False)
        self.output = nn.Linear(d_x, d_x)
        if config.variant in GRAPH_VARIANTS:
            self.rel_emb = nn.Embedding(config.n_relation_ids, config.head_size)
            init_table(self.rel_emb.weight)
        else:
            self.rel_emb = None
        self.attn_norm = nn.LayerNorm(d_x)
        self.ffn_in = nn.Linear(d_x, config.ffn_hidden)
        self.ffn_out = nn.Linear(config.ffn_hidden, d_x)
        self.ffn_norm = nn.LayerNorm(d_x)
        self.dropout = nn.Dropout(config.dropout)
        for lin in (self.query, self.key, self.value, self.output, self.ffn_in, self.ffn_out):
            init_table(lin.weight)
            if lin.bias is not None:
                nn.init.zeros_(lin.bias)
        self.variant = config.variant

    def head_weights(self, h):
        """(w_q, w_k) slices for head h, matching the standalone score functions."""
        d = self.head_size
        w_q = self.query.weight.T[:, h * d:(h + 1) * d]
        w_k = self.key.weight.T[:, h * d:(h + 1) * d]
        return w_q, w_k

    def scores(self, x, rel_ids, variant=None):
        """Batched multi-head raw scores e: (B, H, N, N)."""
        variant = self.variant if variant is None else variant
        b, n, _ = x.shape
        d = self.head_size
        q = self.query(x).view(b, n, self.num_heads, d)
        k = self.key(x).view(b, n, self.num_heads, d)
        e = torch.einsum("bihd,bjhd->bhij", q, k)
        if variant in GRAPH_VARIANTS:
            if self.rel_emb is None:
                raise EncoderError("layer was built without a relation table")
            r = self.rel_emb(rel_ids)  # (B, N, N, d)
            e = e + torch.einsum("bihd,bijd->bhij", q, r)
            if variant == GRAPH_ATTN:
                e = e + torch.einsum("bijd,bjhd->bhij", r, k)
        return e / math.sqrt(d)

    def forward(self, x, rel_ids, key_mask, variant=None):
        b, n, _ = x.shape
        e = self.scores(x, rel_ids, variant)
        e = e.masked_fill(~key_mask[:, None, None, :], float("-inf"))
        alpha = F.softmax(e, dim=-1)
        v = self.value(x).view(b, n, self.num_heads, self.head_size)
        ctx = torch.einsum("bhij,bjhd->bihd", self.dropout(alpha), v)
        ctx = ctx.reshape(b, n, -1)
        x = self.attn_norm(x + self.dropout(self.output(ctx)))
        ffn = self.ffn_out(F.gelu(self.ffn_in(x)))
        x = self.ffn_norm(x + self.dropout(ffn))
        return x, alpha, e


class GraphEncoder(nn.Module):
    """Embedding layer plus a stack of relation-conditioned layers."""

    def __init__(self, config, n_subwords, n_pos_tags):
        super().__init__()
        self.config = config
        self.embeddings = InputEmbeddings(config, n_subwords, n_pos_tags)
        self.layers = nn.ModuleList(EncoderLayer(config) for _ in range(config.num_layers))

    def forward(self, token_ids, pos_tag_ids, position_ids, rel_ids, key_mask,
                dep_label_ids=None, variant=None, collect_trace=False):
        x = self.embeddings(token_ids, pos_tag_ids, position_ids, dep_label_ids)
        trace = [] if collect_trace else None
        for layer_idx, layer in enumerate(self.layers):
            x, alpha, e = layer(x, rel_ids, key_mask, variant)
            if not torch.isfinite(x).all():
                raise EncoderError(f"non-finite activations after layer {layer_idx}")
            if collect_trace:
                trace.append((alpha.detach(), e.detach()))
        return x, trace
