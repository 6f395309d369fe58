"""Leaderboard rendering: Score-sorted rows with best/second-best flags."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from ..errors import ScoringError
from .score import ScoreCard


@dataclass
class Leaderboard:
    columns: list
    rows: list  # {"method", "score", "values": {col: float}, "flags": {col: "best"|"second"}}

    def to_records(self) -> list[dict]:
        return [{"rank": i + 1, "method": r["method"], "score": r["score"],
                 **r["values"], "flags": r["flags"]} for i, r in enumerate(self.rows)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["rank", "method", *self.columns, "score"])
        for i, row in enumerate(self.rows):
            writer.writerow([i + 1, row["method"],
                             *[f"{row['values'][c]:.4f}" for c in self.columns],
                             f"{row['score']:.4f}"])
        return buf.getvalue()

    def to_text(self) -> str:
        headers = ["rank", "method", *self.columns, "score"]
        table = [[str(i + 1), row["method"],
                  *[f"{row['values'][c]:.4f}{_mark(row['flags'].get(c))}"
                    for c in self.columns],
                  f"{row['score']:.4f}{_mark(row['flags'].get('score'))}"]
                 for i, row in enumerate(self.rows)]
        widths = [max(len(h), *(len(r[j]) for r in table)) for j, h in enumerate(headers)] \
            if table else [len(h) for h in headers]
        lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths))]
        lines += ["  ".join(c.ljust(w) for c, w in zip(row, widths)) for row in table]
        return "\n".join(lines)


def _mark(flag):
    return {"best": "*", "second": "+"}.get(flag, "")


def render_leaderboard(cards: list[ScoreCard]) -> Leaderboard:
    """Rows sorted by Score ascending (ties broken by method name)."""
    if not cards:
        raise ScoringError("no score cards to rank")
    columns = list(cards[0].aggregate.keys())
    for card in cards:
        if list(card.aggregate.keys()) != columns:
            raise ScoringError(f"card {card.method!r} reports different metrics")
        if card.score is None:
            raise ScoringError(f"card {card.method!r} has no Score (missing baseline?)")
    ordered = sorted(cards, key=lambda c: (c.score, c.method))
    rows = [{"method": c.method, "score": c.score,
             "values": {name: c.aggregate[name].value for name in columns},
             "flags": {}} for c in ordered]
    # Flag best/second-best per column, respecting each metric's direction.
    for name in columns:
        reverse = cards[0].aggregate[name].direction == "higher_better"
        ranked = sorted(rows, key=lambda r: r["values"][name], reverse=reverse)
        _flag(ranked, name)
    _flag(sorted(rows, key=lambda r: r["score"]), "score")
    return Leaderboard(columns=columns, rows=rows)


def _flag(ranked_rows, key):
    if ranked_rows:
        ranked_rows[0]["flags"][key] = "best"
    if len(ranked_rows) > 1:
        ranked_rows[1]["flags"][key] = "second"
