"""
Extractive summary of one news cluster, step by step
=====================================================

Walks a single bundled cluster through every stage by hand so the
intermediate arrays can be inspected.
"""

from importlib import resources

from hybridsum import (
    HashEmbedder,
    embed_sentences,
    feature_select,
    elbow_k,
    kmeans,
    load_corpus,
    preprocess_cluster,
    select_sentences,
    similarity_matrix,
)

corpus = load_corpus(str(resources.files("hybridsum") / "data" / "mini"))
cluster = corpus.get("gia_xang")

# Sentences from all documents are pooled
pc = preprocess_cluster(cluster)
for s in pc.sentences:
    print(s.key, s.text)

# Hash embeddings stand in for a sentence encoder; swap in any EmbeddingProvider
E = embed_sentences(HashEmbedder(dim=64, seed=42), pc)
S = similarity_matrix(E)
print("similarity matrix", S.values.shape)

# alpha keeps the most variable similarity columns as clustering features
F = feature_select(S, alpha=0.2)
print("kept columns", F.selected_columns)

k, curve = elbow_k(F, k_max=len(pc) - 1, seed=42)
print("WCSS curve", {kk: round(w, 4) for kk, w in curve.items()}, "-> k =", k)

clustering = kmeans(F, k, seed=42, n_init=5)
summary = select_sentences(clustering, F, pc)
print()
print(summary.text)
print("references:", *cluster.references, sep="\n  ")
