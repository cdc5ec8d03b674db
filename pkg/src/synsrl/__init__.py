"""Semantic role labelling with dependency-graph-conditioned self-attention."""

from .config import ModelConfig
from .data import (
    DEP_STYLE,
    SPAN_STYLE,
    CorpusRecord,
    DependencyGraph,
    Sentence,
    SrlGraph,
)
from .model import SrlModel, load_checkpoint, save_checkpoint
from .vocab import Vocab, Vocabularies, build_vocabularies

__all__ = [
    "ModelConfig",
    "CorpusRecord",
    "DependencyGraph",
    "Sentence",
    "SrlGraph",
    "SPAN_STYLE",
    "DEP_STYLE",
    "SrlModel",
    "save_checkpoint",
    "load_checkpoint",
    "Vocab",
    "Vocabularies",
    "build_vocabularies",
]
