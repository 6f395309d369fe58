"""Challenge scoring: metric adapters, the relative Score, and reports."""

from .leaderboard import Leaderboard, render_leaderboard  # noqa: F401
from .providers import (  # noqa: F401
    CallableProvider, CommandProvider, ComposedPIProvider, ConstantProvider,
    MeanPixelProvider, MetricProvider, providers_from_config,
)
from .reference import (  # noqa: F401
    BASELINE_METHOD, CLASS_NAMES, EFFICIENCY, METRIC_DIRECTIONS, PSR4K_AGGREGATE,
    PSR4K_CLASS_SUMMARY, PSR4K_PER_CLASS, PSR4K_SCORES,
)
from .score import (  # noqa: F401
    MetricRecord, ScoreCard, ScoreWeights, aggregate_score, class_stats, compute_pi,
    evaluate_dataset, record, record_set, score_from_aggregates,
)
