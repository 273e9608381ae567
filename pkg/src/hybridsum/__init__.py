"""Hybrid extractive/abstractive multi-document summarization for Vietnamese.

Pipeline: preprocess -> embed -> cosine similarity -> alpha feature
selection -> elbow k-means -> medoid extraction -> optional LLM rewrite ->
ROUGE scoring.
"""

from .abstract import (
    AbstractiveSummary,
    ChatClient,
    Prompt,
    PromptSpec,
    build_prompt,
    collapse_repetition,
    summarize,
)
from .corpus import Corpus, Document, DocumentCluster, Finding, load_corpus, validate_corpus
from .embed import (
    EmbeddingMatrix,
    EmbeddingProvider,
    HashEmbedder,
    PrecomputedEmbedder,
    RemoteEmbedder,
    embed_sentences,
    hash_embed,
    load_precomputed,
)
from .extract import (
    ClusteringResult,
    ExtractiveSummary,
    FeatureMatrix,
    SimilarityMatrix,
    cosine_sim,
    elbow_k,
    extract,
    feature_select,
    kmeans,
    select_sentences,
    similarity_matrix,
)
from .harness import (
    RunConfig,
    RunResult,
    SweepReport,
    compare_baselines,
    render_table,
    run_pipeline,
    sweep_alpha,
)
from .preprocess import (
    Lexicon,
    NormConfig,
    PreparedCluster,
    SentenceRecord,
    normalize,
    preprocess_cluster,
    split_sentences,
    tokenize,
)
from .rouge import RougeScore, ScoreTable, lcs_len, ngrams, rouge_l, rouge_n, score_cluster

__version__ = "0.1.0"

__all__ = [
    "AbstractiveSummary",
    "build_prompt",
    "ChatClient",
    "ClusteringResult",
    "collapse_repetition",
    "compare_baselines",
    "Corpus",
    "cosine_sim",
    "Document",
    "DocumentCluster",
    "elbow_k",
    "embed_sentences",
    "EmbeddingMatrix",
    "EmbeddingProvider",
    "extract",
    "ExtractiveSummary",
    "feature_select",
    "FeatureMatrix",
    "Finding",
    "hash_embed",
    "HashEmbedder",
    "kmeans",
    "lcs_len",
    "Lexicon",
    "load_corpus",
    "load_precomputed",
    "ngrams",
    "normalize",
    "NormConfig",
    "PrecomputedEmbedder",
    "PreparedCluster",
    "preprocess_cluster",
    "Prompt",
    "PromptSpec",
    "RemoteEmbedder",
    "render_table",
    "rouge_l",
    "rouge_n",
    "RougeScore",
    "run_pipeline",
    "RunConfig",
    "RunResult",
    "score_cluster",
    "ScoreTable",
    "select_sentences",
    "SentenceRecord",
    "similarity_matrix",
    "SimilarityMatrix",
    "split_sentences",
    "summarize",
    "sweep_alpha",
    "SweepReport",
    "tokenize",
    "validate_corpus",
]

