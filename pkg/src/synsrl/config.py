"""Model and training configuration."""

import dataclasses
from dataclasses import dataclass

import yaml

# Encoder variants:
#   graph-attn        full query and key interaction with relation embeddings
#   graph-attn-nokey  query interaction only (key term ablated)
#   label-emb         dependency label embeddings added at the input layer
#   plain             syntax-agnostic
GRAPH_ATTN = "graph-attn"
GRAPH_ATTN_NOKEY = "graph-attn-nokey"
LABEL_EMB = "label-emb"
PLAIN = "plain"
VARIANTS = (GRAPH_ATTN, GRAPH_ATTN_NOKEY, LABEL_EMB, PLAIN)
GRAPH_VARIANTS = (GRAPH_ATTN, GRAPH_ATTN_NOKEY)


class ConfigError(ValueError):
    pass


@dataclass
class ModelConfig:
    variant: str = GRAPH_ATTN
    num_layers: int = 4
    num_heads: int = 4
    hidden_size: int = 128
    ffn_size: int = 0  # 0 -> 4 * hidden_size
    n_syn_labels: int = 0  # relation label count used for table sizing
    n_srl_labels: int = 0  # includes the null label at id 0
    span_hidden: int = 512
    label_hidden: int = 250
    max_positions: int = 512
    max_span_width: int = 0  # 0 -> full sentence width
    dropout: float = 0.1
    lambda_verb: float = 0.6
    lambda_span: float = 0.6
    max_spans: int = 300
    max_verbs: int = 30
    base_lr: float = 1.5e-3
    encoder_lr: float = 1e-5
    adam_betas: tuple = (0.9, 0.999)
    adam_eps: float = 1e-5
    weight_decay: float = 0.01
    warmup: float = 0.001  # fraction of total training steps
    max_grad_norm: float = 1.0
    epochs: int = 100
    batch_size: int = 8
    patience: int = 20
    tokenizer: str = "identity"
    seed: int = 13

    def __post_init__(self):
        self.adam_betas = tuple(self.adam_betas)
        self.validate()

    def validate(self):
        if self.variant not in VARIANTS:
            raise ConfigError(f"unknown variant {self.variant!r}")
        if self.num_layers < 0:
            raise ConfigError("num_layers must be >= 0")
        for name in ("num_heads", "hidden_size", "span_hidden", "label_hidden",
                     "max_positions", "max_spans", "max_verbs", "batch_size"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if self.hidden_size % self.num_heads != 0:
            raise ConfigError("hidden_size must be a multiple of num_heads")
        if self.hidden_size % 2 != 0:
            raise ConfigError("hidden_size must be even (span halves)")
        for name in ("lambda_verb", "lambda_span"):
            lam = getattr(self, name)
            if not 0.0 < lam <= 1.0:
                raise ConfigError(f"{name} must be in (0, 1]")
        if not 0.0 <= self.dropout < 1.0:
            raise ConfigError("dropout must be in [0, 1)")

    @property
    def head_size(self):
        return self.hidden_size // self.num_heads

    @property
    def ffn_hidden(self):
        return self.ffn_size if self.ffn_size else 4 * self.hidden_size

    @property
    def n_relation_ids(self):
        """Rows of the relation table: label+direction pairs plus the no-arc id."""
        return 2 * self.n_syn_labels + 1

    def to_dict(self):
        d = dataclasses.asdict(self)
        d["adam_betas"] = list(self.adam_betas)
        return d

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    def replace(self, **kwargs):
        return dataclasses.replace(self, **kwargs)

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            yaml.safe_dump(self.to_dict(), fh, sort_keys=True)

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            d = yaml.safe_load(fh) or {}
        return cls.from_dict(d)
