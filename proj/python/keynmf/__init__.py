"""Python bindings for the KeyNMF C++ core."""

from ._keynmf import (
    KeynmfError,
    __version__,
    adaptive_filter,
    cosine_similarity,
    diversity,
    embedding_coherence,
    extract_keywords,
    fit_dynamic,
    fit_nmf,
    jsd,
    novelty,
    npmi_coherence,
    resonance_series,
    solve_h_fixed_w,
    test_embed,
    train_internal_embeddings,
    transience,
)

__all__ = [
    "KeynmfError",
    "__version__",
    "adaptive_filter",
    "cosine_similarity",
    "diversity",
    "embedding_coherence",
    "extract_keywords",
    "fit_dynamic",
    "fit_nmf",
    "jsd",
    "novelty",
    "npmi_coherence",
    "resonance_series",
    "solve_h_fixed_w",
    "test_embed",
    "train_internal_embeddings",
    "transience",
]
