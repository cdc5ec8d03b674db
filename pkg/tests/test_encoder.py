import math

import numpy as np
import pytest
import torch
from hypothesis import given, settings
from hypothesis import strategies as st

from synsrl.config import GRAPH_ATTN, GRAPH_ATTN_NOKEY, LABEL_EMB, PLAIN
from synsrl.encoder import (
    EncoderError,
    GraphEncoder,
    InputEmbeddings,
    attention_scores_full,
    attention_scores_reformulated,
    attention_values,
)
from synsrl.model import collate, featurize_corpus
from conftest import tiny_config


def random_instance(rng, n, d_x, d, n_labels):
    gen = torch.Generator().manual_seed(rng)
    x = torch.randn(n, d_x, generator=gen, dtype=torch.float64)
    w_q = torch.randn(d_x, d, generator=gen, dtype=torch.float64)
    w_k = torch.randn(d_x, d, generator=gen, dtype=torch.float64)
    rel_table = torch.randn(2 * n_labels + 1, d, generator=gen, dtype=torch.float64)
    rel_ids = torch.randint(0, 2 * n_labels + 1, (n, n), generator=gen)
    return x, w_q, w_k, rel_table, rel_ids


def test_zero_embedding_tables_give_zero_input():
    config = tiny_config()
    emb = InputEmbeddings(config, n_subwords=5, n_pos_tags=3)
    for table in (emb.token_emb, emb.pos_tag_emb, emb.position_emb):
        torch.nn.init.zeros_(table.weight)
    x = emb(torch.tensor([1, 2]), torch.tensor([0, 1]), torch.tensor([0, 1]))
    assert (x == 0).all()


def test_embedding_is_componentwise_sum():
    config = tiny_config(num_heads=1, hidden_size=4, ffn_size=4)
    emb = InputEmbeddings(config, n_subwords=2, n_pos_tags=2)
    torch.nn.init.zeros_(emb.token_emb.weight)
    torch.nn.init.zeros_(emb.pos_tag_emb.weight)
    torch.nn.init.zeros_(emb.position_emb.weight)
    emb.token_emb.weight.data[1] = torch.tensor([1.0, 0, 0, 0])
    emb.pos_tag_emb.weight.data[1] = torch.tensor([0, 1.0, 0, 0])
    emb.position_emb.weight.data[1] = torch.tensor([0, 0, 1.0, 0])
    x = emb(torch.tensor([1]), torch.tensor([1]), torch.tensor([1]))
    assert torch.equal(x[0], torch.tensor([1.0, 1.0, 1.0, 0.0]))


def test_label_emb_with_zero_table_matches_plain():
    config = tiny_config(variant=LABEL_EMB, n_syn_labels=3, n_srl_labels=2)
    emb = InputEmbeddings(config, n_subwords=4, n_pos_tags=2)
    torch.nn.init.zeros_(emb.dep_label_emb.weight)
    tok, tag, pos = torch.tensor([1, 2]), torch.tensor([0, 1]), torch.tensor([0, 1])
    with_labels = emb(tok, tag, pos, dep_label_ids=torch.tensor([0, 3]))
    base = emb.token_emb(tok) + emb.pos_tag_emb(tag) + emb.position_emb(pos)
    assert torch.equal(with_labels, base)


def test_zero_relation_table_is_vanilla_attention():
    x, w_q, w_k, rel_table, rel_ids = random_instance(0, n=4, d_x=8, d=4, n_labels=3)
    rel_table = torch.zeros_like(rel_table)
    e = attention_scores_full(x, rel_ids, w_q, w_k, rel_table)
    vanilla = (x @ w_q) @ (x @ w_k).T / math.sqrt(4)
    assert torch.allclose(e, vanilla)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.integers(2, 8), d=st.integers(1, 8))
def test_full_and_reformulated_scores_agree(seed, n, d):
    x, w_q, w_k, rel_table, rel_ids = random_instance(seed, n, d_x=2 * d, d=d, n_labels=4)
    e_full = attention_scores_full(x, rel_ids, w_q, w_k, rel_table)
    e_ref = attention_scores_reformulated(x, rel_ids, w_q, w_k, rel_table, GRAPH_ATTN)
    scale = e_full.abs().max().clamp(min=1.0)
    assert (e_full - e_ref).abs().max() / scale < 1e-6


def test_reformulated_matches_loop_oracle():
    x, w_q, w_k, rel_table, rel_ids = random_instance(3, n=3, d_x=8, d=4, n_labels=2)
    e = attention_scores_reformulated(x, rel_ids, w_q, w_k, rel_table, GRAPH_ATTN)
    for i in range(3):
        for j in range(3):
            q = x[i] @ w_q
            k = x[j] @ w_k
            r = rel_table[rel_ids[i, j]]
            want = (q @ k + q @ r + r @ k) / math.sqrt(4)
            assert abs(e[i, j].item() - want.item()) < 1e-10


def test_nokey_drops_exactly_the_key_term():
    x, w_q, w_k, rel_table, rel_ids = random_instance(5, n=5, d_x=8, d=4, n_labels=3)
    e_full = attention_scores_reformulated(x, rel_ids, w_q, w_k, rel_table, GRAPH_ATTN)
    e_nokey = attention_scores_reformulated(x, rel_ids, w_q, w_k, rel_table, GRAPH_ATTN_NOKEY)
    k = x @ w_k
    r = rel_table[rel_ids]
    key_term = (r * k.unsqueeze(0)).sum(-1) / math.sqrt(4)
    assert torch.allclose(e_full - e_nokey, key_term)


def test_nokey_equals_full_when_keys_orthogonal_to_relations():
    d = 4
    x = torch.randn(3, 8, dtype=torch.float64)
    w_q = torch.randn(8, d, dtype=torch.float64)
    # keys live in the first two dims, relations in the last two
    w_k = torch.zeros(8, d, dtype=torch.float64)
    w_k[:, :2] = torch.randn(8, 2, dtype=torch.float64)
    rel_table = torch.zeros(5, d, dtype=torch.float64)
    rel_table[:, 2:] = torch.randn(5, 2, dtype=torch.float64)
    rel_ids = torch.randint(0, 5, (3, 3))
    e_full = attention_scores_reformulated(x, rel_ids, w_q, w_k, rel_table, GRAPH_ATTN)
    e_nokey = attention_scores_reformulated(x, rel_ids, w_q, w_k, rel_table, GRAPH_ATTN_NOKEY)
    assert torch.allclose(e_full, e_nokey)


def test_plain_variant_is_standard_scores():
    x, w_q, w_k, rel_table, rel_ids = random_instance(7, n=4, d_x=8, d=4, n_labels=3)
    e = attention_scores_reformulated(x, rel_ids, w_q, w_k, rel_table, PLAIN)
    assert torch.allclose(e, (x @ w_q) @ (x @ w_k).T / math.sqrt(4))


def test_attention_values_identity_and_uniform():
    x = torch.randn(2, 6, dtype=torch.float64)
    w_v = torch.randn(6, 6, dtype=torch.float64)
    assert torch.allclose(attention_values(torch.eye(2, dtype=torch.float64), x, w_v), x @ w_v)
    uniform = torch.full((2, 2), 0.5, dtype=torch.float64)
    assert torch.allclose(
        attention_values(uniform, x, w_v), (x @ w_v).mean(0, keepdim=True).expand(2, -1)
    )


def test_attention_values_matches_double_loop():
    gen = torch.Generator().manual_seed(9)
    alpha = torch.softmax(torch.randn(4, 4, generator=gen, dtype=torch.float64), dim=-1)
    x = torch.randn(4, 6, generator=gen, dtype=torch.float64)
    w_v = torch.randn(6, 6, generator=gen, dtype=torch.float64)
    v = attention_values(alpha, x, w_v)
    for i in range(4):
        want = sum(alpha[i, j] * (x[j] @ w_v) for j in range(4))
        assert torch.allclose(v[i], want, atol=1e-12)


def build_encoder(config, seed=0):
    torch.manual_seed(seed)
    return GraphEncoder(config, n_subwords=9, n_pos_tags=4).double()


def encoder_inputs(config, n=5, batch=1, seed=0):
    gen = torch.Generator().manual_seed(seed)
    tok = torch.randint(0, 9, (batch, n), generator=gen)
    tag = torch.randint(0, 4, (batch, n), generator=gen)
    pos = torch.arange(n).expand(batch, n).clone()
    rel = torch.randint(0, config.n_relation_ids, (batch, n, n), generator=gen)
    mask = torch.ones(batch, n, dtype=torch.bool)
    return tok, tag, pos, rel, mask


def test_zero_layers_returns_input_embeddings():
    config = tiny_config(num_layers=0, n_syn_labels=2, n_srl_labels=2)
    enc = build_encoder(config)
    tok, tag, pos, rel, mask = encoder_inputs(config)
    z, _ = enc(tok, tag, pos, rel, mask)
    x = enc.embeddings(tok, tag, pos)
    assert torch.equal(z, x)


def test_encoder_deterministic_across_runs():
    config = tiny_config(n_syn_labels=2, n_srl_labels=2)
    outs = []
    for _ in range(2):
        enc = build_encoder(config, seed=42)
        enc.eval()
        tok, tag, pos, rel, mask = encoder_inputs(config, seed=1)
        z, _ = enc(tok, tag, pos, rel, mask)
        outs.append(z)
    assert torch.equal(outs[0], outs[1])


def test_attention_rows_sum_to_one():
    config = tiny_config(n_syn_labels=2, n_srl_labels=2)
    enc = build_encoder(config)
    enc.eval()
    tok, tag, pos, rel, mask = encoder_inputs(config, n=6)
    _, trace = enc(tok, tag, pos, rel, mask, collect_trace=True)
    for alpha, _e in trace:
        assert ((alpha >= 0) & (alpha <= 1)).all()
        assert torch.allclose(alpha.sum(-1), torch.ones_like(alpha.sum(-1)), atol=1e-6)


def test_layer_scores_match_standalone_per_head():
    config = tiny_config(n_syn_labels=3, n_srl_labels=2)
    enc = build_encoder(config)
    layer = enc.layers[0]
    n = 4
    x = torch.randn(1, n, config.hidden_size, dtype=torch.float64)
    rel = torch.randint(0, config.n_relation_ids, (1, n, n))
    e = layer.scores(x, rel)
    for h in range(config.num_heads):
        w_q, w_k = layer.head_weights(h)
        want = attention_scores_reformulated(
            x[0], rel[0], w_q, w_k, layer.rel_emb.weight, GRAPH_ATTN
        )
        assert torch.allclose(e[0, h], want, atol=1e-12)


def test_zero_relation_tables_reproduce_plain_scores():
    config = tiny_config(n_syn_labels=3, n_srl_labels=2)
    enc = build_encoder(config)
    layer = enc.layers[0]
    torch.nn.init.zeros_(layer.rel_emb.weight)
    n = 4
    x = torch.randn(1, n, config.hidden_size, dtype=torch.float64)
    rel = torch.randint(0, config.n_relation_ids, (1, n, n))
    e_graph = layer.scores(x, rel, variant=GRAPH_ATTN)
    e_plain = layer.scores(x, rel, variant=PLAIN)
    assert (e_graph - e_plain).abs().max().item() < 1e-12


def test_non_finite_activation_names_layer():
    config = tiny_config(n_syn_labels=2, n_srl_labels=2)
    enc = build_encoder(config)
    enc.eval()
    enc.layers[1].ffn_out.bias.data[0] = float("nan")
    tok, tag, pos, rel, mask = encoder_inputs(config)
    with pytest.raises(EncoderError, match="layer 1"):
        enc(tok, tag, pos, rel, mask)


def test_permutation_equivariance():
    # swap two tokens along with their positional ids and relation rows/cols
    config = tiny_config(n_syn_labels=2, n_srl_labels=2)
    enc = build_encoder(config, seed=5)
    enc.eval()
    tok, tag, pos, rel, mask = encoder_inputs(config, n=4, seed=2)
    perm = torch.tensor([0, 2, 1, 3])
    z, _ = enc(tok, tag, pos, rel, mask)
    z_perm, _ = enc(
        tok[:, perm], tag[:, perm], pos[:, perm],
        rel[:, perm][:, :, perm], mask,
    )
    assert torch.allclose(z[:, perm], z_perm, atol=1e-10)
