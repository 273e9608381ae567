"""Extractive stage: similarity features, k-means with elbow selection, medoids.

The sentences of every document in a topic are pooled. Their pairwise
cosine similarity matrix is the feature matrix for clustering; ``alpha``
keeps only the most variable ``ceil(alpha * n)`` similarity columns. k is
chosen with the elbow rule and the member closest to each centroid is
extracted verbatim.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .embed import EmbeddingMatrix
from .errors import AlphaOutOfRange, KTooLarge, LengthMismatch, ZeroNorm
from .preprocess import PreparedCluster, SentenceRecord

DEFAULT_ALPHA = 0.2
DEFAULT_K_MAX = 10
DEFAULT_RESTARTS = 5
MAX_ITER = 100


@dataclass(frozen=True, eq=False)
class SimilarityMatrix:
    values: np.ndarray

    @property
    def n(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True, eq=False)
class FeatureMatrix:
    values: np.ndarray
    selected_columns: tuple[int, ...]

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]


@dataclass(eq=False)
class ClusteringResult:
    k: int
    assignments: np.ndarray
    centroids: np.ndarray
    wcss_curve: dict[int, float]
    seed: int
    wcss: float = 0.0
    n_iter: int = 0
    history: list[float] = field(default_factory=list)


@dataclass(frozen=True)
class ExtractiveSummary:
    cluster_id: str
    picks: tuple[tuple[SentenceRecord, int], ...]
    alpha: float
    k: int

    @property
    def sentences(self) -> list[str]:
        return [rec.text for rec, _ in self.picks]

    @property
    def text(self) -> str:
        return ". ".join(self.sentences)


def cosine_sim(u, v) -> float:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise LengthMismatch(f"vectors have lengths {u.shape} and {v.shape}")
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise ZeroNorm("cosine similarity is undefined for a zero vector")
    return float(np.dot(u, v) / (nu * nv))


def similarity_matrix(E: EmbeddingMatrix | np.ndarray) -> SimilarityMatrix:
    """All-pairs cosine similarity of the embedding rows."""
    rows = np.asarray(E.rows if isinstance(E, EmbeddingMatrix) else E, dtype=np.float64)
    norms = np.linalg.norm(rows, axis=1)
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        raise ZeroNorm(f"row {int(zero[0])} has zero norm")
    unit = rows / norms[:, None]
    S = unit @ unit.T
    S = np.clip((S + S.T) / 2.0, -1.0, 1.0)
    np.fill_diagonal(S, 1.0)
    S.setflags(write=False)
    return SimilarityMatrix(S)


def n_features(alpha: float, n: int) -> int:
    # The epsilon keeps e.g. 0.7 * 10 = 7.000000000000001 from rounding up to 8.
    return min(n, max(1, math.ceil(alpha * n - 1e-9)))


def feature_select(S: SimilarityMatrix | np.ndarray, alpha: float) -> FeatureMatrix:
    """Keep the ``ceil(alpha * n)`` columns of S with the largest variance.

    Ties go to the lower column index; kept columns stay in original order.
    """
    if not (isinstance(alpha, (int, float)) and 0.0 < alpha <= 1.0):
        raise AlphaOutOfRange(f"alpha must be in (0, 1], got {alpha!r}")
    values = np.asarray(S.values if isinstance(S, SimilarityMatrix) else S, dtype=np.float64)
    n = values.shape[0]
    p = n_features(alpha, n)
    var = values.var(axis=0)
    keep = np.sort(np.argsort(-var, kind="stable")[:p])
    return FeatureMatrix(values[:, keep], tuple(int(c) for c in keep))


# --- k-means ------------------------------------------------------------------

def _sqdist(X: np.ndarray, C: np.ndarray) -> np.ndarray:
    return ((X[:, None, :] - C[None, :, :]) ** 2).sum(axis=2)


def _kmeanspp(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = X.shape[0]
    idx = [int(rng.integers(n))]
    d2 = ((X - X[idx[0]]) ** 2).sum(axis=1)
    for _ in range(1, k):
        total = d2.sum()
        if total > 0:
            nxt = int(rng.choice(n, p=d2 / total))
        else:
            nxt = int(rng.integers(n))
        idx.append(nxt)
        d2 = np.minimum(d2, ((X - X[nxt]) ** 2).sum(axis=1))
    return X[idx].copy()


def _means(X: np.ndarray, labels: np.ndarray, k: int) -> np.ndarray:
    C = np.zeros((k, X.shape[1]))
    for j in range(k):
        C[j] = X[labels == j].mean(axis=0)
    return C


def _repair_empty(X: np.ndarray, labels: np.ndarray, C: np.ndarray, k: int) -> np.ndarray:
    labels = labels.copy()
    for j in range(k):
        if np.any(labels == j):
            continue
        sizes = np.bincount(labels, minlength=k)
        movable = sizes[labels] > 1
        d = ((X - C[labels]) ** 2).sum(axis=1)
        d[~movable] = -1.0
        far = int(np.argmax(d))
        labels[far] = j
        C[j] = X[far]
    return labels


def _wcss(X: np.ndarray, labels: np.ndarray, C: np.ndarray) -> float:
    return float(((X - C[labels]) ** 2).sum())


def _hartigan_pass(X: np.ndarray, labels: np.ndarray, k: int) -> bool:
    """Single-point moves that strictly lower WCSS; True if any point moved.

    Lloyd stops once every point is nearest its own centroid, but moving a
    point also shifts both means. Accounting for that (the n/(n-1) and
    n/(n+1) factors) escapes many Lloyd fixed points.
    """
    sizes = np.bincount(labels, minlength=k).astype(np.float64)
    sums = np.zeros((k, X.shape[1]))
    np.add.at(sums, labels, X)
    moved = False
    for i in range(X.shape[0]):
        a = labels[i]
        if sizes[a] == 1:
            continue
        d = ((sums / sizes[:, None] - X[i]) ** 2).sum(axis=1)
        remove = d[a] * sizes[a] / (sizes[a] - 1)
        add = d * sizes / (sizes + 1)
        add[a] = np.inf
        b = int(np.argmin(add))
        if add[b] < remove * (1 - 1e-12) - 1e-15:
            labels[i] = b
            sizes[a] -= 1
            sizes[b] += 1
            sums[a] -= X[i]
            sums[b] += X[i]
            moved = True
    return moved


def _lloyd(X: np.ndarray, C: np.ndarray) -> tuple[np.ndarray, np.ndarray, float, int, list[float]]:
    k = C.shape[0]
    labels = _repair_empty(X, np.argmin(_sqdist(X, C), axis=1), C, k)
    history: list[float] = []
    it = 0
    for it in range(1, MAX_ITER + 1):
        C = _means(X, labels, k)
        w = _wcss(X, labels, C)
        history.append(w)
        new = _repair_empty(X, np.argmin(_sqdist(X, C), axis=1), C.copy(), k)
        if np.array_equal(new, labels):
            # assignment fixed point: try to escape it before stopping
            if not _hartigan_pass(X, new, k):
                break
        labels = new
    else:
        C = _means(X, labels, k)
        history.append(_wcss(X, labels, C))
    return labels, C, history[-1], it, history


def kmeans(F: FeatureMatrix | np.ndarray, k: int, seed: int = 42, n_init: int = 1,
           init: np.ndarray | None = None) -> ClusteringResult:
    """Seeded k-means++ / Lloyd clustering, best of ``n_init`` restarts.

    ``init`` optionally adds one extra run started from the given centroids.

    Iteration stops at an assignment fixed point that no single-point move
    improves, or after 100 iterations.
    """
    X = np.asarray(F.values if isinstance(F, FeatureMatrix) else F, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    n = X.shape[0]
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > n:
        raise KTooLarge(f"k={k} exceeds the number of points n={n}")
    best = None
    if init is not None:
        best = _lloyd(X, np.array(init, dtype=np.float64))
    for r in range(max(1, n_init)):
        rng = np.random.default_rng([seed & 0xFFFFFFFF, r])
        labels, C, w, it, hist = _lloyd(X, _kmeanspp(X, k, rng))
        if best is None or w < best[2]:
            best = (labels, C, w, it, hist)
    labels, C, w, it, hist = best
    return ClusteringResult(k=k, assignments=labels, centroids=C, wcss_curve={k: w},
                            seed=seed, wcss=w, n_iter=it, history=hist)


def elbow_k(F: FeatureMatrix | np.ndarray, k_max: int | None = None, seed: int = 42,
            restarts: int = DEFAULT_RESTARTS) -> tuple[int, dict[int, float]]:
    """Pick k at the maximum second difference of the WCSS curve.

    Returns ``(k, {k': WCSS(k')})``. A zero-spread input gives k=1 and three
    or fewer points give ``min(n, 2)``.
    """
    X = np.asarray(F.values if isinstance(F, FeatureMatrix) else F, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    n = X.shape[0]
    if k_max is None:
        k_max = min(DEFAULT_K_MAX, n - 1)
    top = max(1, min(k_max, n))
    curve: dict[int, float] = {}
    prev = None
    for kk in range(1, top + 1):
        warm = None
        if prev is not None:
            # Previous solution plus its worst-fit point as a new centroid.
            d = ((X - prev.centroids[prev.assignments]) ** 2).sum(axis=1)
            warm = np.vstack([prev.centroids, X[int(np.argmax(d))]])
        res = kmeans(X, kk, seed, restarts)
        if warm is not None and res.wcss > prev.wcss:
            res = kmeans(X, kk, seed, restarts, init=warm)
        curve[kk] = res.wcss
        prev = res
    if curve[1] <= 1e-12:
        return 1, curve
    if n <= 3:
        return min(n, 2), curve
    candidates = range(2, top)
    if not candidates:
        return min(top, 2), curve
    bend = {kk: curve[kk - 1] - 2.0 * curve[kk] + curve[kk + 1] for kk in candidates}
    best = max(candidates, key=lambda kk: (bend[kk], -kk))
    return best, curve


def select_sentences(cl: ClusteringResult, F: FeatureMatrix | np.ndarray, pc: PreparedCluster,
                     alpha: float = DEFAULT_ALPHA) -> ExtractiveSummary:
    """One medoid per cluster: the member nearest its centroid."""
    X = np.asarray(F.values if isinstance(F, FeatureMatrix) else F, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[0] != len(pc.sentences):
        raise LengthMismatch(f"feature rows ({X.shape[0]}) != sentences ({len(pc.sentences)})")
    picks = []
    for j in range(cl.k):
        members = np.flatnonzero(cl.assignments == j)
        if members.size == 0:
            continue
        d = ((X[members] - cl.centroids[j]) ** 2).sum(axis=1)
        best = min(members[d == d.min()], key=lambda i: pc.sentences[i].key)
        picks.append((pc.sentences[int(best)], j))
    picks.sort(key=lambda pick: pick[0].key)
    return ExtractiveSummary(pc.cluster_id, tuple(picks), alpha, cl.k)


@dataclass(eq=False)
class Extraction:
    """Everything computed for one cluster by :func:`extract`."""

    summary: ExtractiveSummary
    similarity: SimilarityMatrix
    features: FeatureMatrix
    clustering: ClusteringResult


def extract(pc: PreparedCluster, E: EmbeddingMatrix, alpha: float = DEFAULT_ALPHA,
            k_max: int = DEFAULT_K_MAX, seed: int = 42,
            restarts: int = DEFAULT_RESTARTS) -> Extraction:
    S = similarity_matrix(E)
    F = feature_select(S, alpha)
    n = F.n
    k, curve = elbow_k(F, min(k_max, max(1, n - 1)), seed, restarts)
    cl = kmeans(F, k, seed, restarts)
    cl.wcss_curve = curve
    return Extraction(select_sentences(cl, F, pc, alpha), S, F, cl)

