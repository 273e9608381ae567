"""
ROUGE-1, ROUGE-2 and ROUGE-L
============================

Scoring token lists directly, then raw Vietnamese text through the same
normalization the pipeline applies to source documents.
"""

from hybridsum import lcs_len, rouge_l, rouge_n, score_cluster

cand = "the cat".split()
ref = "the cat sat".split()
for n in (1, 2):
    s = rouge_n(cand, ref, n)
    print(f"ROUGE-{n}: P={s.precision:.3f} R={s.recall:.3f} F1={s.f1:.3f}")

# ROUGE-L uses the longest common subsequence, which tolerates gaps
print("LCS(abcd, acbd) =", lcs_len("abcd", "acbd"))
print("ROUGE-L F1 =", rouge_l(list("abcd"), list("acbd")).f1)

# With several references the per-reference scores are averaged
scores = score_cluster(
    "Giá xăng tăng 500 đồng mỗi lít.",
    ["Giá xăng tăng 500 đồng một lít từ chiều nay.", "Xăng tăng giá 500 đồng."],
)
for variant, s in scores.items():
    print(variant, {k: round(v, 3) for k, v in s.as_dict().items()})
