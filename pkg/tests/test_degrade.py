import json

import cv2
import numpy as np
import pytest

from epsr.degrade import (BlurSpec, DegradationRecipe, NoiseSpec, ResizeSpec, StageSpec,
                          degrade, load_recipe, make_blur_kernel, recipe_from_dict,
                          recipe_to_dict, save_recipe, sinc_kernel, synthesize_pairs,
                          usm_sharpen)
from epsr.degrade.pipeline import _jpeg_roundtrip, rng_for_image
from epsr.errors import ConfigurationError, ShapeError


class TestKernels:
    def test_every_kind_unit_sum(self, rng):
        for kind in ("iso_gaussian", "aniso_gaussian", "generalized_gaussian",
                     "plateau", "sinc"):
            for size in (7, 13, 21):
                k = make_blur_kernel(BlurSpec(kind=kind, kernel_size=size), rng)
                assert abs(k.sum() - 1.0) < 1e-6, (kind, size)

    def test_non_sinc_nonnegative(self, rng):
        for kind in ("iso_gaussian", "aniso_gaussian", "generalized_gaussian", "plateau"):
            k = make_blur_kernel(BlurSpec(kind=kind, kernel_size=15), rng)
            assert k.min() >= 0.0

    def test_sigma_zero_limit_is_center_one(self, rng):
        spec = BlurSpec(kind="iso_gaussian", kernel_size=7, sigma_range=(1e-3, 1e-3))
        k = make_blur_kernel(spec, rng)
        assert k[3, 3] == pytest.approx(1.0)
        off = np.delete(k.ravel(), 24)
        assert np.abs(off).max() < 1e-12

    def test_sampled_size_odd_in_range(self, rng):
        sizes = {make_blur_kernel(BlurSpec(), rng).shape[0] for _ in range(50)}
        assert all(7 <= s <= 21 and s % 2 == 1 for s in sizes)

    def test_rotation_honored(self):
        from epsr.degrade import gaussian_kernel

        horizontal = gaussian_kernel(15, 3.0, 0.5, theta=0.0)
        vertical = gaussian_kernel(15, 3.0, 0.5, theta=np.pi / 2)
        assert np.allclose(horizontal, vertical.T, atol=1e-12)
        assert not np.allclose(horizontal, vertical, atol=1e-6)

    def test_sinc_cutoff_pi_near_allpass(self, make_image):
        img = make_image(96, 96, sigma=1.5)  # bandlimited content
        k = sinc_kernel(21, np.pi).astype(np.float32)
        out = cv2.filter2D(img, -1, k, borderType=cv2.BORDER_REFLECT)
        assert np.abs(out - img).mean() < 1e-2

    def test_even_size_rejected(self, rng):
        with pytest.raises(ConfigurationError):
            BlurSpec(kernel_size=8)


def identity_recipe(seed=3):
    return DegradationRecipe(
        seed=seed,
        stage1=StageSpec(blur=BlurSpec(prob=0.0),
                         resize=ResizeSpec(mode_probs=(0.0, 0.0, 1.0)),
                         noise=NoiseSpec(prob=0.0),
                         jpeg_quality_range=(95, 95), jpeg_prob=1.0),
        stage2=StageSpec(blur=BlurSpec(prob=0.0),
                         resize=ResizeSpec(mode_probs=(0.0, 1.0, 0.0),
                                           down_range=(0.25, 0.25),
                                           interp_choices=("nearest",)),
                         noise=NoiseSpec(prob=0.0), jpeg_prob=0.0),
        final_sinc_prob=0.0, final_order="sinc_then_jpeg",
    )


class TestDegrade:
    def test_output_is_quarter_size(self, make_image):
        lr, _ = degrade(make_image(128, 256), DegradationRecipe(seed=1))
        assert lr.shape == (32, 64, 3)

    def test_4k_to_qhd(self, rng):
        hr = np.zeros((2160, 3840, 3), np.float32)
        hr[::9, ::16] = 1.0
        lr, _ = degrade(hr, DegradationRecipe(seed=2))
        assert lr.shape == (540, 960, 3)

    def test_same_seed_bit_identical(self, make_image):
        hr = make_image(128, 128)
        recipe = DegradationRecipe(seed=5)
        lr1, _ = degrade(hr, recipe)
        lr2, _ = degrade(hr, recipe)
        assert np.array_equal(lr1, lr2)

    def test_non_divisible_raises(self, make_image):
        with pytest.raises(ShapeError):
            degrade(make_image(66, 64), DegradationRecipe(seed=1))

    def test_identity_recipe_matches_reference_composition(self, make_image):
        hr = make_image(128, 128)
        lr, _ = degrade(hr, identity_recipe())
        ref = cv2.resize(_jpeg_roundtrip(hr, 95), (32, 32),
                         interpolation=cv2.INTER_NEAREST)
        assert np.array_equal(lr, ref)

    def test_range_and_channels_preserved(self, make_image):
        lr, _ = degrade(make_image(96, 96), DegradationRecipe(seed=8))
        assert lr.shape[2] == 3
        assert np.isfinite(lr).all()
        assert lr.min() >= 0.0 and lr.max() <= 1.0

    def test_trace_records_all_stages(self, make_image):
        _, trace = degrade(make_image(64, 64), DegradationRecipe(seed=4))
        assert set(trace) == {"stage1", "stage2", "final"}
        assert "resize" in trace["stage1"]
        assert "order" in trace["final"]


class TestUsmSharpen:
    def test_weight_zero_identity(self, make_image):
        img = make_image(48, 48)
        assert np.array_equal(usm_sharpen(img, weight=0.0), img)

    def test_constant_unchanged(self):
        img = np.full((32, 32, 3), 0.42, np.float32)
        assert np.allclose(usm_sharpen(img, weight=0.7), img, atol=1e-7)

    def test_step_edge_contrast_increases(self):
        img = np.zeros((32, 32, 3), np.float32)
        img[:, 16:] = 0.8
        sharpened = usm_sharpen(img, radius=1.5, weight=0.5, threshold=0.0)
        grad_before = np.abs(np.diff(img[16, :, 0])).max()
        grad_after = np.abs(np.diff(sharpened[16, :, 0])).max()
        assert grad_after > grad_before

    def test_negative_weight_rejected(self, make_image):
        with pytest.raises(ConfigurationError):
            usm_sharpen(make_image(16, 16), weight=-0.1)


class TestSynthesizePairs:
    def test_empty_directory(self, tmp_path):
        (tmp_path / "hr").mkdir()
        manifest = synthesize_pairs(tmp_path / "hr", DegradationRecipe(seed=1),
                                    tmp_path / "out")
        assert manifest["pairs"] == []
        assert (tmp_path / "out" / "pairs.json").is_file()

    def test_quarter_size_and_manifest_fields(self, tmp_path, make_image):
        from epsr.images import load_image, save_image

        hr_dir = tmp_path / "hr"
        hr_dir.mkdir()
        save_image(hr_dir / "a.png", make_image(256, 256))
        manifest = synthesize_pairs(hr_dir, DegradationRecipe(seed=9), tmp_path / "out")
        assert len(manifest["pairs"]) == 1
        entry = manifest["pairs"][0]
        assert set(entry) == {"lr_path", "hr_path", "seed", "trace"}
        assert load_image(entry["lr_path"]).shape == (64, 64, 3)

    def test_rerun_reproduces_within_quantization(self, tmp_path, make_image):
        from epsr.images import load_image, save_image

        hr_dir = tmp_path / "hr"
        hr_dir.mkdir()
        for i in range(3):
            save_image(hr_dir / f"{i}.png", make_image(128, 128))
        recipe = DegradationRecipe(seed=33)
        first = synthesize_pairs(hr_dir, recipe, tmp_path / "out1")
        second = synthesize_pairs(hr_dir, recipe, tmp_path / "out2")
        for a, b in zip(first["pairs"], second["pairs"]):
            la = load_image(a["lr_path"])
            lb = load_image(b["lr_path"])
            assert np.abs(la - lb).max() <= 1.0 / 255
            assert a["trace"] == b["trace"]

    def test_undecodable_file_skipped(self, tmp_path, make_image):
        from epsr.images import save_image

        hr_dir = tmp_path / "hr"
        hr_dir.mkdir()
        save_image(hr_dir / "good.png", make_image(64, 64))
        (hr_dir / "junk.png").write_bytes(b"not an image at all")
        manifest = synthesize_pairs(hr_dir, DegradationRecipe(seed=2), tmp_path / "out")
        assert len(manifest["pairs"]) == 1
        assert len(manifest["skipped"]) == 1

    def test_streams_independent_of_order(self, make_image):
        hr = make_image(64, 64)
        recipe = DegradationRecipe(seed=21)
        direct, _ = degrade(hr, recipe, rng=rng_for_image(21, 3))
        # Consuming other indices' streams first must not affect index 3.
        for other in (0, 1, 2):
            degrade(hr, recipe, rng=rng_for_image(21, other))
        again, _ = degrade(hr, recipe, rng=rng_for_image(21, 3))
        assert np.array_equal(direct, again)


class TestRecipeSerialization:
    def test_round_trip(self, tmp_path):
        recipe = identity_recipe(seed=12)
        path = tmp_path / "recipe.yaml"
        save_recipe(path, recipe)
        loaded = load_recipe(path)
        assert recipe_to_dict(loaded) == recipe_to_dict(recipe)

    def test_unknown_key_rejected(self):
        data = recipe_to_dict(DegradationRecipe(seed=1))
        data["sharpen_amount"] = 3
        with pytest.raises(ConfigurationError, match="sharpen_amount"):
            recipe_from_dict(data)

    def test_quality_range_bounds(self):
        with pytest.raises(ConfigurationError):
            StageSpec(jpeg_quality_range=(10, 95))

    def test_manifest_serializable(self, tmp_path, make_image):
        from epsr.images import save_image

        hr_dir = tmp_path / "hr"
        hr_dir.mkdir()
        save_image(hr_dir / "x.png", make_image(64, 64))
        manifest = synthesize_pairs(hr_dir, DegradationRecipe(seed=1), tmp_path / "out")
        json.dumps(manifest)  # full trace must be JSON-clean
