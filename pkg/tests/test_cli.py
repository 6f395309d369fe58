import json
from pathlib import Path

import pytest
import yaml

from epsr.cli import main
from epsr.degrade import DegradationRecipe, save_recipe
from epsr.images import load_image, save_image


def run(argv):
    return main([str(a) for a in argv])


@pytest.fixture
def stub_providers(tmp_path):
    path = tmp_path / "providers.yaml"
    path.write_text(yaml.safe_dump({"providers": [
        {"name": "PI", "kind": "stub", "value": 4.0, "direction": "lower_better"},
        {"name": "CLIPIQA", "kind": "stub", "value": 0.5},
        {"name": "MANIQA", "kind": "stub", "value": 0.3},
    ]}))
    return path


class TestAudit:
    def test_passing_model_exits_zero(self, tmp_path):
        assert run(["audit", "safmn_l", "--out", tmp_path, "--quiet"]) == 0
        report = json.loads((tmp_path / "audit_safmn_l.json").read_text())
        assert report["passed"] is True

    def test_baseline_fails_with_exit_one(self, tmp_path):
        assert run(["audit", "realesrgan_baseline", "--out", tmp_path, "--quiet"]) == 1

    def test_unknown_model_usage_error(self, tmp_path):
        assert run(["audit", "nosuchmodel", "--out", tmp_path, "--quiet"]) == 2

    def test_efdn_audits_fused_form(self, tmp_path):
        assert run(["audit", "efdn", "--out", tmp_path, "--quiet"]) == 0
        report = json.loads((tmp_path / "audit_efdn.json").read_text())
        assert report["params"] < 300_000


class TestDegradeCommand:
    def test_missing_recipe_usage_error(self, tmp_path):
        (tmp_path / "hr").mkdir()
        code = run(["degrade", tmp_path / "hr", "--recipe", tmp_path / "nope.yaml",
                    "--out", tmp_path / "out", "--quiet"])
        assert code == 2

    def test_same_seed_identical_manifests(self, tmp_path, make_image):
        hr = tmp_path / "hr"
        hr.mkdir()
        for i in range(2):
            save_image(hr / f"{i}.png", make_image(64, 64))
        recipe_path = tmp_path / "recipe.yaml"
        save_recipe(recipe_path, DegradationRecipe(seed=5))
        for out in ("o1", "o2"):
            assert run(["degrade", hr, "--recipe", recipe_path,
                        "--out", tmp_path / out, "--quiet"]) == 0
        m1 = json.loads((tmp_path / "o1" / "pairs.json").read_text())
        m2 = json.loads((tmp_path / "o2" / "pairs.json").read_text())
        assert [p["trace"] for p in m1["pairs"]] == [p["trace"] for p in m2["pairs"]]

    def test_run_manifest_written(self, tmp_path, make_image):
        hr = tmp_path / "hr"
        hr.mkdir()
        save_image(hr / "a.png", make_image(64, 64))
        recipe_path = tmp_path / "recipe.yaml"
        save_recipe(recipe_path, DegradationRecipe(seed=1))
        run(["degrade", hr, "--recipe", recipe_path, "--out", tmp_path / "out",
             "--quiet"])
        lines = (tmp_path / "out" / "run_manifests.jsonl").read_text().splitlines()
        record = json.loads(lines[-1])
        assert record["command"] == "degrade"
        assert record["exit_code"] == 0
        assert "toolkit_version" in record


class TestInferCommand:
    def test_empty_dir_exits_zero(self, tmp_path):
        (tmp_path / "lr").mkdir()
        code = run(["infer", tmp_path / "lr", "--model", "efdn",
                    "--out", tmp_path / "sr", "--quiet"])
        assert code == 0
        assert not list((tmp_path / "sr").glob("*.png"))

    def test_x4_outputs_and_determinism(self, tmp_path, make_image):
        lr_dir = tmp_path / "lr"
        lr_dir.mkdir()
        save_image(lr_dir / "img.png", make_image(24, 32))
        for out in ("sr1", "sr2"):
            assert run(["infer", lr_dir, "--model", "efdn", "--seed", 3,
                        "--out", tmp_path / out, "--quiet"]) == 0
        a = (tmp_path / "sr1" / "img.png").read_bytes()
        b = (tmp_path / "sr2" / "img.png").read_bytes()
        assert a == b
        assert load_image(tmp_path / "sr1" / "img.png").shape == (96, 128, 3)

    def test_checkpoint_round_trip(self, tmp_path, make_image):
        from epsr.archs import ModelSpec, build_tiny_esrgan
        from epsr.checkpoint import manifest_from_spec, save_checkpoint

        model = build_tiny_esrgan(ModelSpec("tiny_esrgan", channels=8, blocks=1,
                                            growth=4), seed=1)
        ckpt = tmp_path / "tiny.npz"
        save_checkpoint(ckpt, model, manifest_from_spec(model.spec, 1))
        lr_dir = tmp_path / "lr"
        lr_dir.mkdir()
        save_image(lr_dir / "x.png", make_image(16, 16))
        assert run(["infer", lr_dir, "--checkpoint", ckpt, "--out", tmp_path / "sr",
                    "--quiet"]) == 0
        assert load_image(tmp_path / "sr" / "x.png").shape == (64, 64, 3)


class TestTrainCommand:
    def test_stage_file_training_run(self, tmp_path, make_image):
        from epsr.train import StageConfig, stage_to_dict

        hr = tmp_path / "hr"
        hr.mkdir()
        for i in range(2):
            save_image(hr / f"{i}.png", make_image(96, 96))
        recipe_path = tmp_path / "recipe.yaml"
        save_recipe(recipe_path, DegradationRecipe(seed=4))
        assert run(["degrade", hr, "--recipe", recipe_path, "--out",
                    tmp_path / "pairs", "--quiet"]) == 0
        stage_path = tmp_path / "stage.yaml"
        stage = StageConfig("quick", {"l1": 1.0}, patch_size=32, batch_size=1,
                            lr_max=1e-3, lr_min=1e-5, iterations=2)
        stage_path.write_text(yaml.safe_dump(stage_to_dict(stage)))
        code = run(["train", "--model", "efdn", "--pairs",
                    tmp_path / "pairs" / "pairs.json", "--stage", stage_path,
                    "--out", tmp_path / "train", "--quiet"])
        assert code == 0
        summary = json.loads((tmp_path / "train" / "training_summary.json")
                             .read_text())
        assert summary[0]["stage"] == "quick"
        assert Path(summary[0]["checkpoint"]).is_file()

    def test_unknown_recipe_usage_error(self, tmp_path):
        code = run(["train", "--pairs", tmp_path / "nope.json",
                    "--recipe", "mystery", "--out", tmp_path, "--quiet"])
        assert code == 2


class TestEvaluateCommand:
    def test_stub_providers_deterministic_card(self, tmp_path, make_image,
                                               stub_providers):
        sr = tmp_path / "sr"
        sr.mkdir()
        for i in range(2):
            save_image(sr / f"{i}.png", make_image(16, 16))
        assert run(["evaluate", sr, "--providers", stub_providers,
                    "--baseline", "psr4k", "--out", tmp_path / "ev", "--quiet"]) == 0
        card = json.loads((tmp_path / "ev" / "scorecards" / "candidate.json")
                          .read_text())
        assert card["aggregate"]["PI"] == pytest.approx(4.0)
        assert card["score"] is not None

    def test_replay_reproduces_published_scores(self, tmp_path):
        from epsr.scoring import PSR4K_SCORES

        assert run(["evaluate", "--replay", "psr4k", "--out", tmp_path, "--quiet"]) == 0
        for method, printed in PSR4K_SCORES.items():
            if method == "Real-ESRGAN":
                continue
            card = json.loads((tmp_path / "scorecards" / f"{method}.json").read_text())
            assert card["score"] == pytest.approx(printed, abs=5e-4)

    def test_provider_timeout_marks_missing(self, tmp_path, make_image):
        import sys

        sr = tmp_path / "sr"
        sr.mkdir()
        save_image(sr / "a.png", make_image(16, 16))
        hang = tmp_path / "hang.py"
        hang.write_text("import sys, time\nfor line in sys.stdin:\n    time.sleep(60)\n")
        providers = tmp_path / "providers.yaml"
        providers.write_text(yaml.safe_dump({"providers": [
            {"name": "SLOW", "kind": "command",
             "command": [sys.executable, str(hang)], "timeout": 0.5}]}))
        assert run(["evaluate", sr, "--providers", providers,
                    "--out", tmp_path / "ev", "--quiet"]) == 0
        card = json.loads((tmp_path / "ev" / "scorecards" / "candidate.json")
                          .read_text())
        assert card["warnings"] >= 1
        assert card["missing"]


class TestReportCommand:
    def test_replay_report_reproduces_published_tables(self, tmp_path):
        from epsr.scoring import PSR4K_CLASS_SUMMARY

        assert run(["evaluate", "--replay", "psr4k", "--out", tmp_path / "ev",
                    "--quiet"]) == 0
        cards = sorted((tmp_path / "ev" / "scorecards").glob("*.json"))
        assert run(["report", *cards, "--out", tmp_path / "rep", "--quiet"]) == 0
        board = (tmp_path / "rep" / "leaderboard.csv").read_text().splitlines()
        assert board[1].startswith("1,VPEG")
        per_class = (tmp_path / "rep" / "per_class.csv").read_text().splitlines()
        assert len(per_class) == 1 + 6 * 10  # six methods, ten classes each
        # the summary table reproduces the published mean/median/sample-std rows
        summary = (tmp_path / "rep" / "class_summary.csv").read_text().splitlines()
        for line in summary[1:]:
            method, metric, mean, median, std = line.split(",")
            exp_mean, exp_median, exp_std = PSR4K_CLASS_SUMMARY[method][metric]
            assert abs(float(mean) - exp_mean) <= 5e-4
            assert abs(float(median) - exp_median) <= 5e-4
            assert abs(float(std) - exp_std) <= 5e-4

    def test_cards_without_classes_leaderboard_only(self, tmp_path, make_image,
                                                    stub_providers):
        sr = tmp_path / "sr"
        sr.mkdir()
        save_image(sr / "i.png", make_image(16, 16))
        run(["evaluate", sr, "--providers", stub_providers, "--baseline", "psr4k",
             "--out", tmp_path / "ev", "--quiet"])
        card = tmp_path / "ev" / "scorecards" / "candidate.json"
        assert run(["report", card, "--out", tmp_path / "rep", "--quiet"]) == 0
        assert (tmp_path / "rep" / "leaderboard.csv").is_file()
        assert not (tmp_path / "rep" / "per_class.csv").exists()

    def test_per_class_tables_when_labelled(self, tmp_path, make_image,
                                            stub_providers):
        sr = tmp_path / "sr"
        for cls in ("animals", "food"):
            (sr / cls).mkdir(parents=True)
            save_image(sr / cls / "i.png", make_image(16, 16))
        run(["evaluate", sr, "--providers", stub_providers, "--baseline", "psr4k",
             "--out", tmp_path / "ev", "--quiet"])
        card = tmp_path / "ev" / "scorecards" / "candidate.json"
        assert run(["report", card, "--out", tmp_path / "rep", "--quiet"]) == 0
        per_class = (tmp_path / "rep" / "per_class.csv").read_text()
        assert "animals" in per_class and "food" in per_class
        summary = (tmp_path / "rep" / "class_summary.csv").read_text().splitlines()
        assert summary[0] == "method,metric,mean,median,sample_std"


class TestConfigFile:
    def test_config_supplies_defaults(self, tmp_path):
        config = tmp_path / "audit.yaml"
        config.write_text(yaml.safe_dump({"version": 1, "out": str(tmp_path / "o"),
                                          "quiet": True}))
        assert run(["audit", "safmn_l", "--config", config]) == 0
        assert (tmp_path / "o" / "audit_safmn_l.json").is_file()

    def test_unknown_config_key_rejected(self, tmp_path):
        config = tmp_path / "audit.yaml"
        config.write_text(yaml.safe_dump({"version": 1, "cheese": "brie"}))
        assert run(["audit", "safmn_l", "--config", config]) == 2

    def test_missing_version_rejected(self, tmp_path):
        config = tmp_path / "audit.yaml"
        config.write_text(yaml.safe_dump({"out": "x"}))
        assert run(["audit", "safmn_l", "--config", config]) == 2
