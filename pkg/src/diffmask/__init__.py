"""Difference masking: pick what to mask during continued pretraining.

Seed words that distinguish a target corpus from a general background
corpus are found with TF-ICF; tokens are then masked in proportion to
their embedding similarity to the nearest seed.
"""
__version__ = "0.1.0"

from diffmask.analysis import (
    chosen_seed_histogram,
    masked_group_label_fraction,
    masked_word_histogram,
    pearson,
    seed_embedding_variance,
)
from diffmask.background import BackgroundTable, load_background, relative_freq
from diffmask.corpus_io import (
    Document,
    Group,
    Token,
    load_corpus,
    load_plaintext,
    load_pretokenized,
    normalize,
    word_tokenize,
)
from diffmask.embeddings import EmbeddingStore, cosine, load_embeddings, lookup
from diffmask.kernels import BACKEND
from diffmask.masker import (
    MaskDistribution,
    MaskPlan,
    Replacement,
    Strategy,
    StrategyConfig,
    apply_plan,
    group_weights,
    sample_plan,
    score_attention,
    score_centroid,
    score_difference_nn,
    score_entity_spans,
    score_random,
)
from diffmask.tficf import DiffSet, TficfScore, count_corpus, select_seeds, tficf_scores
