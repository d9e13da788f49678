"""Joint word, term, and entity embeddings trained with terminology-based
distant supervision."""

from ._jet import (
    EmbeddingSet,
    MatchAutomaton,
    Terminology,
    TrainConfig,
    corpus_polysemy,
    cosine,
    eval_analogy,
    eval_simrel,
    eval_wsd,
    normalize,
    spearman,
    term_key,
    train,
    train_lines,
    wsd_score,
)

__all__ = [
    "EmbeddingSet",
    "MatchAutomaton",
    "Terminology",
    "TrainConfig",
    "corpus_polysemy",
    "cosine",
    "eval_analogy",
    "eval_simrel",
    "eval_wsd",
    "normalize",
    "spearman",
    "term_key",
    "train",
    "train_lines",
    "wsd_score",
]
