"""The relative challenge Score, per-class statistics, and dataset evaluation.

Score = sum_i lambda_i * exp(metric_i / baseline_i) for lower-is-better
metrics and exp(baseline_i / metric_i) for higher-is-better ones; lower is
better and the baseline scores exactly e against itself. Metrics are
averaged over the dataset first and the Score is computed on the aggregates
(the reading that reproduces the published Scores from the published means);
`score_from_aggregates` is the single place that choice lives.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field

from ..errors import ScoringError
from .reference import CLASS_NAMES, METRIC_DIRECTIONS

DIRECTIONS = ("lower_better", "higher_better")


@dataclass(frozen=True)
class MetricRecord:
    name: str
    direction: str
    value: float

    def __post_init__(self):
        if self.direction not in DIRECTIONS:
            raise ScoringError(f"bad direction {self.direction!r} for metric {self.name}")
        if not math.isfinite(self.value):
            raise ScoringError(f"metric {self.name} has non-finite value {self.value}")


def record(name: str, value: float, direction: str | None = None) -> MetricRecord:
    """MetricRecord with the conventional direction for known metric names."""
    if direction is None:
        direction = METRIC_DIRECTIONS.get(name, "higher_better")
    return MetricRecord(name, direction, float(value))


def record_set(values: dict, directions: dict | None = None) -> dict[str, MetricRecord]:
    return {name: record(name, value, (directions or {}).get(name))
            for name, value in values.items()}


@dataclass(frozen=True)
class ScoreWeights:
    lambda_pi: float = 0.5
    lambda_clipiqa: float = 0.25
    lambda_maniqa: float = 0.25

    def as_map(self) -> dict[str, float]:
        return {"PI": self.lambda_pi, "CLIPIQA": self.lambda_clipiqa,
                "MANIQA": self.lambda_maniqa}

    def __post_init__(self):
        total = self.lambda_pi + self.lambda_clipiqa + self.lambda_maniqa
        if abs(total - 1.0) > 1e-9:
            raise ScoringError(f"score weights must sum to 1, got {total}")


def aggregate_score(metrics: dict[str, MetricRecord], baseline: dict[str, MetricRecord],
                    weights: ScoreWeights | dict | None = None) -> float:
    """Weighted sum of exponential metric ratios against the baseline; lower wins."""
    weight_map = weights.as_map() if isinstance(weights, ScoreWeights) else \
        dict(weights) if weights else ScoreWeights().as_map()
    total = 0.0
    for name, lam in weight_map.items():
        if name not in metrics:
            raise ScoringError(f"metric {name!r} missing from submission")
        if name not in baseline:
            raise ScoringError(f"metric {name!r} missing from baseline")
        rec, base = metrics[name], baseline[name]
        if rec.direction == "lower_better":
            if base.value == 0:
                raise ScoringError(f"baseline value for {name!r} is zero")
            total += lam * math.exp(rec.value / base.value)
        else:
            if rec.value == 0:
                raise ScoringError(f"submission value for {name!r} is zero")
            total += lam * math.exp(base.value / rec.value)
    return total


def compute_pi(ma_score: float, niqe: float) -> float:
    """Perceptual Index from its two constituents: 0.5 * ((10 - Ma) + NIQE)."""
    return 0.5 * ((10.0 - ma_score) + niqe)


def class_stats(values: dict) -> tuple[float, float, float]:
    """(mean, midpoint median, sample std) over per-class values."""
    data = [float(v) for v in values.values()]
    if len(data) < 2:
        raise ScoringError("standard deviation needs at least 2 class values")
    return (statistics.fmean(data), statistics.median(data), statistics.stdev(data))


@dataclass
class ScoreCard:
    method: str
    per_image: list = field(default_factory=list)  # {"image", "class", "metrics"}
    aggregate: dict = field(default_factory=dict)  # name -> MetricRecord
    per_class: dict = field(default_factory=dict)  # class -> name -> float
    score: float | None = None
    baseline_ref: dict = field(default_factory=dict)
    warnings: int = 0
    missing: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "per_image": self.per_image,
            "aggregate": {n: r.value for n, r in self.aggregate.items()},
            "directions": {n: r.direction for n, r in self.aggregate.items()},
            "per_class": self.per_class,
            "score": self.score,
            "baseline_ref": {n: r.value for n, r in self.baseline_ref.items()},
            "warnings": self.warnings,
            "missing": self.missing,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ScoreCard":
        directions = data.get("directions", {})
        return cls(
            method=data["method"],
            per_image=data.get("per_image", []),
            aggregate=record_set(data.get("aggregate", {}), directions),
            per_class=data.get("per_class", {}),
            score=data.get("score"),
            baseline_ref=record_set(data.get("baseline_ref", {}), directions),
            warnings=data.get("warnings", 0),
            missing=data.get("missing", []),
        )


def infer_class(path, class_map: dict | None = None) -> str | None:
    from pathlib import Path

    name = Path(path).name
    if class_map and name in class_map:
        return class_map[name]
    parent = Path(path).parent.name.lower()
    return parent if parent in CLASS_NAMES else None


def evaluate_dataset(sr_dir, providers, class_map: dict | None = None,
                     baseline: dict[str, MetricRecord] | None = None,
                     weights: ScoreWeights | None = None,
                     method: str = "candidate") -> ScoreCard:
    """Run every metric provider over every image; aggregate globally and per class.

    A provider failure marks the image missing: it is excluded from all
    aggregates and counted as a warning.
    """
    from ..images import list_images

    paths = list_images(sr_dir)
    if not paths:
        raise ScoringError(f"no images found under {sr_dir}")
    card = ScoreCard(method=method)
    complete: list[dict] = []
    for path in paths:
        values = {}
        failed = False
        for provider in providers:
            try:
                values[provider.name] = float(provider.evaluate(path))
            except Exception as exc:
                card.warnings += 1
                card.missing.append({"image": str(path), "metric": provider.name,
                                     "reason": str(exc)})
                failed = True
                break
        entry = {"image": str(path), "class": infer_class(path, class_map),
                 "metrics": values if not failed else None}
        card.per_image.append(entry)
        if not failed:
            complete.append(entry)
    if complete:
        names = [p.name for p in providers]
        directions = {p.name: p.direction for p in providers}
        card.aggregate = {
            name: MetricRecord(name, directions[name],
                               statistics.fmean(e["metrics"][name] for e in complete))
            for name in names}
        classes = sorted({e["class"] for e in complete if e["class"]})
        for cls_name in classes:
            members = [e for e in complete if e["class"] == cls_name]
            card.per_class[cls_name] = {
                name: statistics.fmean(e["metrics"][name] for e in members)
                for name in names}
    if baseline and card.aggregate:
        card.baseline_ref = dict(baseline)
        card.score = aggregate_score(card.aggregate, baseline, weights)
    return card


def score_from_aggregates(aggregates: dict, baseline_values: dict,
                          weights: ScoreWeights | None = None,
                          method: str = "replay") -> ScoreCard:
    """Build a ScoreCard directly from recorded dataset-mean metric values."""
    metrics = record_set(aggregates)
    baseline = record_set(baseline_values)
    card = ScoreCard(method=method, aggregate=metrics, baseline_ref=baseline,
                     score=aggregate_score(metrics, baseline, weights))
    return card
