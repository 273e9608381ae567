"""
Choosing k with the elbow rule
==============================

Three well separated blobs in the plane. The WCSS curve drops sharply up to
k=3 and flattens afterwards; the largest second difference marks the elbow.
"""

import numpy as np

from hybridsum import elbow_k, kmeans

rng = np.random.default_rng(0)
centers = np.array([[0.0, 0.0], [10.0, 0.0], [0.0, 10.0]])
X = np.vstack([c + 0.1 * rng.standard_normal((20, 2)) for c in centers])

k, curve = elbow_k(X, k_max=8, seed=0)
for kk, w in curve.items():
    bar = "#" * int(40 * w / curve[1])
    print(f"k={kk}  WCSS={w:10.3f}  {bar}")
print("elbow at k =", k)

# The clustering at the chosen k puts each blob in its own cluster
res = kmeans(X, k, seed=0, n_init=5)
print("cluster sizes:", np.bincount(res.assignments))
