"""End-to-end SRL model: featurisation, loss, prediction, checkpoints."""

from dataclasses import dataclass

import numpy as np
import torch
import torch.nn as nn

from .config import LABEL_EMB, ModelConfig
from .data import DEP_STYLE, DataError, SrlGraph
from .decoder import DecodeProblem, decode_sentence
from .encoder import GraphEncoder
from .relations import none_relation_id, relation_matrix_for
from .srl_head import SrlHead, gold_recall, srl_loss
from .subword import SUBWORD_LABEL, align_record, get_tokenizer
from .vocab import Vocabularies


@dataclass
class EncodedExample:
    """One aligned sentence turned into model inputs."""

    token_ids: np.ndarray      # (N,) subword ids
    pos_tag_ids: np.ndarray    # (N,) per-subword PoS ids (word tag repeated)
    position_ids: np.ndarray   # (N,)
    rel_ids: np.ndarray        # (N, N)
    dep_label_ids: np.ndarray  # (N,) incoming-arc label ids, no-head id last row
    word_pos: tuple            # word index (0..n+1) -> subword position
    n_words: int
    style: str
    gold_labels: dict          # (pred, start, end) word-space -> srl label id
    gold_srl: SrlGraph         # word-space gold, for evaluation
    predicates_given: tuple    # word-space indices or None

    @property
    def n_positions(self):
        return len(self.token_ids)


def featurize(record, vocabs, tokenizer):
    """Align subwords and build all index arrays for one record."""
    aligned = align_record(record, tokenizer)
    sent = aligned.sentence
    n_sub = sent.n_positions
    word_pos = sent.word_to_first_subword
    subword_to_word = {}
    for w, p in enumerate(word_pos):
        subword_to_word[p] = w
    token_ids = np.array([vocabs.subwords.encode(t) for t in sent.subwords], dtype=np.int64)
    pos_tag_ids = np.empty(n_sub, dtype=np.int64)
    w = 0
    for p in range(n_sub):
        if p in subword_to_word:
            w = subword_to_word[p]
        pos_tag_ids[p] = vocabs.pos_tags.encode(sent.pos_tags[w])
    rel_ids = relation_matrix_for(aligned.syn, n_sub, vocabs.syn_labels)
    n_labels = len(vocabs.syn_labels) + 1  # includes the subword-attachment label
    dep_label_ids = np.full(n_sub, n_labels, dtype=np.int64)  # no-head id
    for _head, dep, label in aligned.syn.arcs:
        if label == SUBWORD_LABEL:
            dep_label_ids[dep] = len(vocabs.syn_labels)
        else:
            dep_label_ids[dep] = vocabs.syn_labels.encode(label)

    gold_labels = {}
    gold_srl = record.gold_srl
    if gold_srl is not None:
        for k, i, j, label in gold_srl.tuples:
            gold_labels[(k, i, j)] = vocabs.srl_labels.encode(label)
        style = gold_srl.style
    else:
        style = DEP_STYLE
        gold_srl = SrlGraph.empty(style)
    return EncodedExample(
        token_ids=token_ids,
        pos_tag_ids=pos_tag_ids,
        position_ids=np.arange(n_sub, dtype=np.int64),
        rel_ids=rel_ids,
        dep_label_ids=dep_label_ids,
        word_pos=word_pos,
        n_words=record.sentence.n_words,
        style=style,
        gold_labels=gold_labels,
        gold_srl=gold_srl,
        predicates_given=record.predicates_given,
    )


def featurize_corpus(records, vocabs, config):
    tokenizer = get_tokenizer(config.tokenizer)
    return [featurize(rec, vocabs, tokenizer) for rec in records]


def collate(examples, n_relation_ids, device=None):
    """Pad a batch of EncodedExamples into index tensors plus a key mask."""
    n_max = max(ex.n_positions for ex in examples)
    b = len(examples)
    none_id = n_relation_ids - 1
    token = np.zeros((b, n_max), dtype=np.int64)
    tag = np.zeros((b, n_max), dtype=np.int64)
    pos = np.zeros((b, n_max), dtype=np.int64)
    dep = np.zeros((b, n_max), dtype=np.int64)
    rel = np.full((b, n_max, n_max), none_id, dtype=np.int64)
    mask = np.zeros((b, n_max), dtype=bool)
    for idx, ex in enumerate(examples):
        n = ex.n_positions
        token[idx, :n] = ex.token_ids
        tag[idx, :n] = ex.pos_tag_ids
        pos[idx, :n] = ex.position_ids
        dep[idx, :n] = ex.dep_label_ids
        rel[idx, :n, :n] = ex.rel_ids
        mask[idx, :n] = True
    to = lambda arr: torch.as_tensor(arr, device=device)
    return to(token), to(tag), to(pos), to(dep), to(rel), torch.as_tensor(mask, device=device)


class SrlModel(nn.Module):
    """Graph-conditioned encoder plus span scorer and loss."""

    def __init__(self, config, n_subwords, n_pos_tags):
        super().__init__()
        if config.n_srl_labels < 1:
            raise DataError("config.n_srl_labels must include the null label")
        self.config = config
        self.encoder = GraphEncoder(config, n_subwords, n_pos_tags)
        self.head = SrlHead(config)

    @classmethod
    def from_vocabs(cls, config, vocabs):
        config = config.replace(
            n_syn_labels=len(vocabs.syn_labels) + 1,  # + subword-attachment label
            n_srl_labels=len(vocabs.srl_labels),
        )
        return cls(config, n_subwords=len(vocabs.subwords), n_pos_tags=len(vocabs.pos_tags))

    def device(self):
        return next(self.parameters()).device

    def encode_batch(self, examples, collect_trace=False):
        token, tag, pos, dep, rel, mask = collate(
            examples, self.config.n_relation_ids, device=self.device()
        )
        dep_ids = dep if self.config.variant == LABEL_EMB else None
        z, trace = self.encoder(token, tag, pos, rel, mask,
                                dep_label_ids=dep_ids, collect_trace=collect_trace)
        return z, mask, trace

    def score_example(self, z_row, example, predicates_given=None):
        """Prune candidates and build the (P, A, L) pair logits for one sentence."""
        candidates, arg_reps = self.head.prune_candidates(
            z_row, example.n_words, example.word_pos, example.style,
            predicates_given=predicates_given,
        )
        logits = self.head.pair_scores(z_row, candidates, arg_reps, example.word_pos)
        return candidates, logits

    def loss(self, examples):
        """Summed loss over a batch plus pair count and mean gold recall."""
        z, _mask, _ = self.encode_batch(examples)
        total = z.new_zeros(())
        n_pairs = 0
        recalls = []
        for idx, ex in enumerate(examples):
            candidates, logits = self.score_example(z[idx], ex)
            total = total + srl_loss(logits, candidates, ex.gold_labels)
            n_pairs += logits.shape[0] * logits.shape[1]
            recalls.append(gold_recall(candidates, ex.gold_labels))
        return total, n_pairs, float(np.mean(recalls))

    @torch.no_grad()
    def predict(self, example, mode="end-to-end"):
        """Decode one sentence into a word-space SrlGraph of label ids as names.

        Modes: "end-to-end" admits pruned predicates with a positive
        predicate score; "given" uses example.predicates_given unpruned.
        """
        if mode not in ("end-to-end", "given"):
            raise DataError(f"unknown decode mode {mode!r}")
        given = None
        if mode == "given":
            if example.predicates_given is None:
                raise DataError("given-predicate mode needs predicates in the data")
            given = example.predicates_given
        z, _mask, _ = self.encode_batch([example])
        candidates, logits = self.score_example(z[0], example, predicates_given=given)
        problems = []
        scores = logits.double().cpu().numpy()
        for p_idx, k in enumerate(candidates.predicates):
            if mode == "end-to-end" and candidates.pred_scores[p_idx].item() <= 0:
                continue
            problems.append(DecodeProblem(
                predicate=k,
                spans=list(candidates.spans),
                scores=scores[p_idx],
                n_words=example.n_words,
                style=example.style,
            ))
        return decode_sentence(problems, example.style)

    def predict_labels(self, example, vocabs, mode="end-to-end"):
        graph = self.predict(example, mode)
        return SrlGraph(
            {(k, i, j, vocabs.srl_labels.decode(l)) for k, i, j, l in graph.tuples},
            graph.style,
        )


def save_checkpoint(path, model, vocabs):
    torch.save(
        {
            "config": model.config.to_dict(),
            "vocabs": vocabs.to_dict(),
            "state_dict": model.state_dict(),
        },
        path,
    )


def load_checkpoint(path):
    payload = torch.load(path, map_location="cpu", weights_only=False)
    config = ModelConfig.from_dict(payload["config"])
    vocabs = Vocabularies.from_dict(payload["vocabs"])
    model = SrlModel(config, n_subwords=len(vocabs.subwords), n_pos_tags=len(vocabs.pos_tags))
    state = payload["state_dict"]
    dtype = next(iter(state.values())).dtype
    model.to(dtype)
    model.load_state_dict(state)
    model.eval()
    return model, vocabs
