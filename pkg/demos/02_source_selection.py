"""
Diversified source selection
============================

Ten near-duplicate, very active sources dominate an activity ranking.  MMR
re-ranking with the learned source embeddings trades some activity for
diversity; we track the Gini coefficient of event coverage, the
events/articles ratio and the retention of the most covered events.
"""

from sourcebias import (SelectionConfig, TrainConfig, build_dataset, coverage_metrics,
                        coverage_profile, lorenz_points, mmr_select, relevance_scores, train)
from sourcebias.synth import skewed_landscape

records, window, is_hot = skewed_landscape(seed=0)
dataset = build_dataset(records, window, 5, 5)
model = train(dataset, TrainConfig(seed=0))
relevance = relevance_scores(dataset)
hot = {name for name in dataset.sources if is_hot[int(name[3:])]}

print(" beta   hot  gini  events/articles  top-100")
for beta in (1.0, 0.9, 0.7, 0.5, 0.3, 0.0):
    picks = mmr_select(model, relevance, SelectionConfig(n=25, beta=beta)).picks
    m = coverage_metrics(dataset, picks, retention_at=(100,))
    n_hot = sum(dataset.sources[p] in hot for p in picks)
    print(f"{beta:5.1f} {n_hot:5d} {m['gini']:5.3f} {m['ratio_events_articles']:16.3f} "
          f"{m['retention']['top_100']:8.2f}")

###############################################################################
# Lorenz curves for the activity ranking and the beta = 0.5 re-ranking,
# sampled at a few population shares.

for beta in (1.0, 0.5):
    picks = mmr_select(model, relevance, SelectionConfig(25, beta)).picks
    pts = lorenz_points(coverage_profile(dataset, picks).covered_counts())
    idx = [int(q * (len(pts) - 1)) for q in (0.25, 0.5, 0.75, 0.9)]
    print(f"beta={beta}: " + "  ".join(f"({pts[i, 0]:.2f}, {pts[i, 1]:.2f})" for i in idx))
