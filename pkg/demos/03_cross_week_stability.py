"""
Stability of source embeddings across weeks
===========================================

Three independent "weeks" are drawn from the same block structure.  Each is
trained separately; the Pearson correlation between pairwise source
distances tells how much of the geometry is reproducible.
"""

from sourcebias import TrainConfig, build_dataset, train
from sourcebias.analysis import correlation_summary
from sourcebias.synth import planted_blocks

models, activities = [], []
for week in range(3):
    records, window, _, _ = planted_blocks(seed=100 + week)
    ds = build_dataset(records, window, 5, 5)
    models.append(train(ds, TrainConfig(epochs=20, seed=week)))
    activities.append(dict(zip(ds.sources, ds.source_degrees().tolist())))

summary = correlation_summary(models, activities, top_m=100)
for pair in summary["pairs"]:
    print(f"week {pair['a']} vs week {pair['b']}: r = {pair['pearson']:.3f}")
print(f"mean over all pairs {summary['mean_all_pairs']:.3f}, "
      f"consecutive {summary['mean_consecutive']:.3f}")
