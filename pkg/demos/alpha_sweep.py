"""
Sweeping the feature fraction alpha
===================================

Runs the extractive stage over the bundled mini corpus once per alpha and
prints the corpus-mean ROUGE table, best cells in bold. The second table
places those means next to published baselines.
"""

from importlib import resources

from hybridsum import RunConfig, compare_baselines, load_corpus, render_table, run_pipeline, sweep_alpha

corpus = load_corpus(str(resources.files("hybridsum") / "data" / "mini"))

report = sweep_alpha(corpus, [0.1, 0.2, 0.3, 0.4, 0.5], RunConfig(seed=42))
print(render_table(report))

# Pick the alpha with the best ROUGE-2 F1 and compare
best_alpha = report.best[("R2", "f1")]
result = run_pipeline(corpus, RunConfig(alpha=best_alpha, seed=42))
print(render_table(compare_baselines(result.scores, our_name=f"mini, alpha={best_alpha:g}")))
