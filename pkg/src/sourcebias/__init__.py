"""Latent news-source preference embeddings from one-class coverage data.

Sources and events are embedded with BPR matrix factorization; the source
embeddings then drive a diversity-aware (MMR) selection of news sources,
whose combined coverage is measured with Gini, Lorenz and retention metrics.
"""
from .ingest import (
    DataError,
    EmptyDatasetError,
    EvalSet,
    InteractionDataset,
    MentionFormat,
    MentionRecord,
    SplitPair,
    build_dataset,
    load_dataset,
    load_split,
    parse_mentions,
    save_dataset,
    save_split,
    split_leave_one_out,
)
from .model import FactorModel, init_model, load_model, save_model, score, score_triplet
from .training import TrainConfig, Triplet, bpr_step, sample_triplet, train
from .baselines import knn_scorer, popularity_scorer
from .evaluation import auc, auc_report
from .selection import SelectionConfig, SelectionResult, mmr_select, relevance_scores, similarity
from .coverage import coverage_metrics, coverage_profile, gini, lorenz_points, top_event_retention
from .analysis import cross_week_correlation, pairwise_distances

__version__ = "0.1.0"
