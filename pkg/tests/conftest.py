import pytest
import torch

from synsrl.config import ModelConfig
from synsrl.model import SrlModel, featurize_corpus
from synsrl.synthetic import make_synthetic_corpus
from synsrl.vocab import build_vocabularies


def tiny_config(**overrides):
    base = dict(
        num_layers=2,
        num_heads=2,
        hidden_size=16,
        ffn_size=32,
        span_hidden=8,
        label_hidden=8,
        dropout=0.0,
        max_positions=64,
    )
    base.update(overrides)
    return ModelConfig(**base)


@pytest.fixture
def span_records():
    return make_synthetic_corpus(6, style="span", seed=3)


@pytest.fixture
def dep_records():
    return make_synthetic_corpus(6, style="dep", seed=3)


@pytest.fixture
def span_setup(span_records):
    """(model, vocabs, examples) in double precision on the span corpus."""
    torch.manual_seed(0)
    vocabs = build_vocabularies(span_records)
    model = SrlModel.from_vocabs(tiny_config(), vocabs).double()
    examples = featurize_corpus(span_records, vocabs, model.config)
    return model, vocabs, examples
