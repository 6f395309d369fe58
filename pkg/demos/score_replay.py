"""Replay the challenge leaderboard from the recorded PSR4K metric aggregates.

Feeds each method's published (PI, CLIPIQA, MANIQA) dataset means through the
relative Score formula against the Real-ESRGAN baseline row, then renders
the leaderboard and the per-class summary statistics.
"""

from epsr.scoring import (BASELINE_METHOD, CLASS_NAMES, PSR4K_AGGREGATE,
                          PSR4K_PER_CLASS, PSR4K_SCORES, class_stats,
                          render_leaderboard, score_from_aggregates)


def main():
    baseline = PSR4K_AGGREGATE[BASELINE_METHOD]
    cards = [score_from_aggregates(PSR4K_AGGREGATE[m], baseline, method=m)
             for m in PSR4K_AGGREGATE]
    print("Leaderboard (Score is relative to the baseline; lower is better,")
    print("the baseline itself scores e = 2.7183):\n")
    print(render_leaderboard(cards).to_text())

    print("\nComputed vs published Scores:")
    for card in sorted(cards, key=lambda c: c.score):
        print(f"  {card.method:12s} {card.score:.4f}  (published {PSR4K_SCORES[card.method]})")

    print("\nPer-class robustness (mean / median / sample std of PI over the "
          "ten PSR4K categories):")
    for method, per_class in PSR4K_PER_CLASS.items():
        mean, median, std = class_stats({c: per_class[c]["PI"] for c in CLASS_NAMES})
        print(f"  {method:12s} {mean:.4f} / {median:.4f} / {std:.4f}")


if __name__ == "__main__":
    main()
