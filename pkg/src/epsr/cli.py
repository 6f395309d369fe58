"""Command-line entry point: audit, degrade, train, infer, evaluate, report.

Exit codes: 0 success / budget pass, 1 domain failure (budget fail, training
abort), 2 usage error. Every run that reaches its command appends exactly
one JSON-line manifest (command, config hash, seeds, version, paths, timing)
to <out>/run_manifests.jsonl.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

from . import __version__
from .errors import ConfigurationError, EpsrError, TrainingAborted

# ---------------------------------------------------------------------------
# Manifest plumbing

def _config_hash(args: argparse.Namespace) -> str:
    payload = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    return hashlib.sha256(json.dumps(payload, sort_keys=True, default=str)
                          .encode()).hexdigest()[:16]


def _write_manifest(out_dir, command, args, inputs, outputs, started, exit_code):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    record = {
        "command": command,
        "config_hash": _config_hash(args),
        "seeds": {"seed": getattr(args, "seed", None)},
        "toolkit_version": __version__,
        "inputs": [str(p) for p in inputs],
        "outputs": [str(p) for p in outputs],
        "started_at": started,
        "elapsed_s": round(time.time() - started, 3),
        "exit_code": exit_code,
    }
    with open(out_dir / "run_manifests.jsonl", "a") as fh:
        fh.write(json.dumps(record) + "\n")


def _say(args, *message):
    if not getattr(args, "quiet", False):
        print(*message)


# ---------------------------------------------------------------------------
# audit

def cmd_audit(args) -> int:
    from .archs import MODEL_BUILDERS, build_model
    from .checkpoint import load_model
    from .efficiency import audit

    started = time.time()
    if args.checkpoint:
        model, _ = load_model(args.checkpoint)
        name = args.model or Path(args.checkpoint).stem
    else:
        if args.model not in MODEL_BUILDERS:
            raise ConfigurationError(
                f"unknown model {args.model!r}; registered: "
                f"{', '.join(sorted(MODEL_BUILDERS))}")
        model = build_model(args.model, seed=args.seed)
        name = args.model
        if name == "efdn":
            model = model.reparameterize()  # deployment form is what gets audited
    report = audit(model)
    report.model = name
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    report_path = out / f"audit_{name}.json"
    report_path.write_text(json.dumps(report.to_record(), indent=2))
    _say(args, f"{name}: {report.parameter_count / 1e6:.4f} M params, "
         f"{report.gmacs:.4f} GMACs at {report.input_size} -> "
         f"{'PASS' if report.passed else 'FAIL'}")
    exit_code = 0 if report.passed else 1
    _write_manifest(out, "audit", args, [args.checkpoint or args.model],
                    [report_path], started, exit_code)
    return exit_code


# ---------------------------------------------------------------------------
# degrade

def cmd_degrade(args) -> int:
    from .degrade import load_recipe, synthesize_pairs

    started = time.time()
    recipe_path = Path(args.recipe)
    if not recipe_path.is_file():
        raise ConfigurationError(f"recipe file not found: {recipe_path}")
    recipe = load_recipe(recipe_path)
    if args.seed is not None:
        recipe.seed = args.seed
    manifest = synthesize_pairs(args.hr_dir, recipe, args.out)
    _say(args, f"degraded {len(manifest['pairs'])} images "
         f"({len(manifest['skipped'])} skipped) -> {args.out}")
    _write_manifest(args.out, "degrade", args, [args.hr_dir, recipe_path],
                    [Path(args.out) / "pairs.json"], started, 0)
    return 0


# ---------------------------------------------------------------------------
# train

def cmd_train(args) -> int:
    from .archs import build_model
    from .checkpoint import load_model
    from .train import (RECIPES, ci_adapters, desk_scale, load_stage_config,
                        run_recipe)

    started = time.time()
    if args.checkpoint:
        model, _ = load_model(args.checkpoint)
    else:
        model = build_model(args.model, seed=args.seed)
    if args.stage:
        stages = [load_stage_config(path) for path in args.stage]
    elif args.recipe:
        if args.recipe not in RECIPES:
            raise ConfigurationError(f"unknown recipe {args.recipe!r}; "
                                     f"available: {', '.join(sorted(RECIPES))}")
        stages = RECIPES[args.recipe]()
        if args.desk_scale:
            stages = desk_scale(stages, patch_size=args.patch, batch_size=args.batch)
    else:
        raise ConfigurationError("provide --stage files or a named --recipe")
    out = Path(args.out)
    try:
        results = run_recipe(model, args.pairs, stages, out,
                             adapters=ci_adapters(args.seed), quiet=args.quiet)
        exit_code = 0
    except TrainingAborted as exc:
        _say(args, f"training aborted: {exc} (last good checkpoint: "
             f"{exc.last_checkpoint})")
        _write_manifest(out, "train", args, [args.pairs], [], started, 1)
        return 1
    summary = [{"stage": r.name, "checkpoint": r.checkpoint, "trace": r.trace_path,
                "first_total": r.loss_history[0]["total"],
                "last_total": r.loss_history[-1]["total"]} for r in results]
    (out / "training_summary.json").write_text(json.dumps(summary, indent=2))
    _say(args, f"trained {len(results)} stage(s) -> {out}")
    _write_manifest(out, "train", args, [args.pairs],
                    [r.checkpoint for r in results], started, exit_code)
    return exit_code


# ---------------------------------------------------------------------------
# infer

def cmd_infer(args) -> int:
    from .archs import build_model
    from .checkpoint import load_model
    from .images import list_images, load_image, save_image
    from .infer import TilingPolicy, infer

    started = time.time()
    if args.checkpoint:
        model, _ = load_model(args.checkpoint)
    elif args.model:
        model = build_model(args.model, seed=args.seed)
        if args.model == "efdn":
            model = model.reparameterize()
    else:
        raise ConfigurationError("provide --checkpoint or --model")
    tiling = TilingPolicy(enabled=args.tile > 0, tile_size=args.tile or 256,
                          overlap=args.overlap)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    paths = list_images(args.lr_dir)
    outputs = []
    if not paths:
        _say(args, f"warning: no images under {args.lr_dir}")
    for path in paths:
        sr = infer(model, load_image(path), tiling)
        target = out / f"{path.stem}.png"
        save_image(target, sr)
        outputs.append(target)
        _say(args, f"{path.name}: {sr.shape[1]}x{sr.shape[0]} -> {target}")
    _write_manifest(out, "infer", args, [args.checkpoint or args.model, args.lr_dir],
                    outputs, started, 0)
    return 0


# ---------------------------------------------------------------------------
# evaluate

def _load_baseline(spec: str) -> dict:
    from .scoring import BASELINE_METHOD, PSR4K_AGGREGATE

    if spec == "psr4k":
        return PSR4K_AGGREGATE[BASELINE_METHOD]
    data = json.loads(Path(spec).read_text())
    return data


def cmd_evaluate(args) -> int:
    import yaml

    from .scoring import (PSR4K_AGGREGATE, BASELINE_METHOD, evaluate_dataset,
                          providers_from_config, record_set, score_from_aggregates)

    started = time.time()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cards_dir = out / "scorecards"
    cards_dir.mkdir(exist_ok=True)
    outputs = []

    if args.replay:
        per_class = {}
        if args.replay == "psr4k":
            from .scoring import PSR4K_PER_CLASS

            methods = {m: v for m, v in PSR4K_AGGREGATE.items() if m != BASELINE_METHOD}
            baseline = PSR4K_AGGREGATE[BASELINE_METHOD]
            per_class = PSR4K_PER_CLASS
        else:
            payload = json.loads(Path(args.replay).read_text())
            methods = payload["methods"]
            baseline = payload["baseline"]
            per_class = payload.get("per_class", {})
        for method, aggregates in methods.items():
            card = score_from_aggregates(aggregates, baseline, method=method)
            card.per_class = per_class.get(method, {})
            path = cards_dir / f"{method}.json"
            path.write_text(json.dumps(card.to_dict(), indent=2))
            outputs.append(path)
            _say(args, f"{method}: Score {card.score:.4f}")
        _write_manifest(out, "evaluate", args, [args.replay], outputs, started, 0)
        return 0

    if not args.sr_dir:
        raise ConfigurationError("provide an SR directory or --replay")
    if not args.providers:
        raise ConfigurationError("provide a --providers config file")
    with open(args.providers) as fh:
        providers_cfg = yaml.safe_load(fh)
    providers = providers_from_config(providers_cfg)
    baseline = record_set(_load_baseline(args.baseline)) if args.baseline else None
    try:
        card = evaluate_dataset(args.sr_dir, providers, baseline=baseline,
                                method=args.method)
    finally:
        for provider in providers:
            provider.close()
    path = cards_dir / f"{args.method}.json"
    path.write_text(json.dumps(card.to_dict(), indent=2))
    outputs.append(path)
    score_text = f" Score {card.score:.4f}" if card.score is not None else ""
    _say(args, f"{args.method}: {len(card.per_image)} images, "
         f"{card.warnings} warnings{score_text}")
    _write_manifest(out, "evaluate", args, [args.sr_dir, args.providers],
                    outputs, started, 0)
    return 0


# ---------------------------------------------------------------------------
# report

def cmd_report(args) -> int:
    from .scoring import ScoreCard, class_stats, render_leaderboard

    started = time.time()
    cards = [ScoreCard.from_dict(json.loads(Path(p).read_text()))
             for p in args.scorecards]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    outputs = []
    board = render_leaderboard(cards)
    (out / "leaderboard.csv").write_text(board.to_csv())
    (out / "leaderboard.txt").write_text(board.to_text() + "\n")
    outputs += [out / "leaderboard.csv", out / "leaderboard.txt"]
    _say(args, board.to_text())

    with_classes = [c for c in cards if c.per_class]
    if with_classes:
        import csv as csv_mod

        with open(out / "per_class.csv", "w", newline="") as fh:
            writer = csv_mod.writer(fh)
            metrics = list(with_classes[0].aggregate.keys())
            writer.writerow(["method", "class", *metrics])
            for card in with_classes:
                for cls_name in sorted(card.per_class):
                    writer.writerow([card.method, cls_name,
                                     *[f"{card.per_class[cls_name].get(m, float('nan')):.4f}"
                                       for m in metrics]])
        with open(out / "class_summary.csv", "w", newline="") as fh:
            writer = csv_mod.writer(fh)
            writer.writerow(["method", "metric", "mean", "median", "sample_std"])
            for card in with_classes:
                metrics = list(card.aggregate.keys())
                for m in metrics:
                    values = {c: card.per_class[c][m] for c in card.per_class
                              if m in card.per_class[c]}
                    if len(values) >= 2:
                        mean, median, std = class_stats(values)
                        writer.writerow([card.method, m, f"{mean:.4f}",
                                         f"{median:.4f}", f"{std:.4f}"])
        outputs += [out / "per_class.csv", out / "class_summary.csv"]
    else:
        _say(args, "note: no per-class labels in any card; per-class tables omitted")
    _write_manifest(out, "report", args, list(args.scorecards), outputs, started, 0)
    return 0


# ---------------------------------------------------------------------------
# Parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="epsr",
        description="Efficient perceptual super-resolution benchmark toolkit")
    parser.add_argument("--version", action="version", version=f"epsr {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--config", help="YAML file of defaults for this command")
        p.add_argument("--out", default="epsr_out", help="output directory")
        p.add_argument("--quiet", action="store_true")

    p = sub.add_parser("audit", help="parameter/FLOPs budget gate")
    p.add_argument("model", nargs="?", help="registered model name")
    p.add_argument("--checkpoint")
    common(p)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("degrade", help="synthesize LR training pairs")
    p.add_argument("hr_dir")
    p.add_argument("--recipe", required=True, help="degradation recipe YAML")
    common(p)
    p.set_defaults(func=cmd_degrade, seed=None)

    p = sub.add_parser("train", help="run a training recipe or stage configs")
    p.add_argument("--model", default="safmn_l")
    p.add_argument("--checkpoint")
    p.add_argument("--pairs", required=True, help="pairs manifest from degrade")
    p.add_argument("--stage", action="append", help="stage config YAML (repeatable)")
    p.add_argument("--recipe", help="named recipe: vpeg, mialgo, ipiu")
    p.add_argument("--desk-scale", action="store_true",
                   help="iterations/1000 and batch/4")
    p.add_argument("--patch", type=int, help="override patch size")
    p.add_argument("--batch", type=int, help="override batch size")
    common(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("infer", help="x4 upscale a directory of images")
    p.add_argument("lr_dir")
    p.add_argument("--checkpoint")
    p.add_argument("--model")
    p.add_argument("--tile", type=int, default=0, help="tile size, 0 disables tiling")
    p.add_argument("--overlap", type=int, default=16)
    common(p)
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("evaluate", help="score SR outputs with metric providers")
    p.add_argument("sr_dir", nargs="?")
    p.add_argument("--providers", help="provider config YAML")
    p.add_argument("--baseline", help="'psr4k' or JSON file of baseline aggregates")
    p.add_argument("--replay", help="'psr4k' or JSON file of recorded aggregates")
    p.add_argument("--method", default="candidate", help="method name for the card")
    common(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("report", help="leaderboard and per-class tables")
    p.add_argument("scorecards", nargs="+")
    common(p)
    p.set_defaults(func=cmd_report)
    return parser


def _apply_config_file(parser, argv):
    """--config YAML supplies defaults; explicit flags still win."""
    import yaml

    probe = argparse.ArgumentParser(add_help=False)
    probe.add_argument("--config")
    known, _ = probe.parse_known_args(argv)
    if not known.config:
        return
    with open(known.config) as fh:
        data = yaml.safe_load(fh) or {}
    if not isinstance(data, dict):
        raise ConfigurationError(f"config file {known.config} is not a mapping")
    version = data.pop("version", None)
    if version != 1:
        raise ConfigurationError("config files must declare 'version: 1'")
    if not argv:
        raise ConfigurationError("missing command")
    command = argv[0]
    sub_actions = [a for a in parser._actions
                   if isinstance(a, argparse._SubParsersAction)]
    subparser = sub_actions[0].choices.get(command)
    if subparser is None:
        return
    valid = {a.dest for a in subparser._actions}
    unknown = set(data) - valid
    if unknown:
        raise ConfigurationError(f"unknown keys in config file: {sorted(unknown)}")
    subparser.set_defaults(**data)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config_file(parser, argv)
        args = parser.parse_args(argv)
        return args.func(args)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except EpsrError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
