"""Parameter accounting for the syntax-conditioning variants.

Relative to the plain encoder, the label-embedding variant adds one
(n_labels+1) x hidden table at the input layer, and the graph-attention
variants add one (2*n_labels+1) x head_size relation table per layer
(shared across the heads of that layer).
"""

from .config import GRAPH_ATTN, GRAPH_ATTN_NOKEY, LABEL_EMB, PLAIN


def added_param_counts(n_syn_labels, num_layers, num_heads, hidden_size):
    """Number of parameters each variant adds on top of the plain encoder."""
    head_size = hidden_size // num_heads
    return {
        PLAIN: 0,
        LABEL_EMB: (n_syn_labels + 1) * hidden_size,
        GRAPH_ATTN: (2 * n_syn_labels + 1) * num_layers * head_size,
        GRAPH_ATTN_NOKEY: (2 * n_syn_labels + 1) * num_layers * head_size,
    }


def count_added_params(config):
    """Added-parameter counts for a ModelConfig, keyed by variant."""
    return added_param_counts(
        config.n_syn_labels, config.num_layers, config.num_heads, config.hidden_size
    )


def enumerate_added_params(model):
    """Directly count the syntax-specific tensor elements of a built model."""
    total = 0
    for name, tensor in model.named_parameters():
        if "rel_emb" in name or "dep_label_emb" in name:
            total += tensor.numel()
    return total
