import numpy as np
import pytest
import torch


@pytest.fixture(autouse=True)
def _deterministic_torch():
    torch.manual_seed(0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def smooth_random_image(rng, height, width, sigma=1.5):
    """Random image with natural-ish (bandlimited) statistics."""
    import cv2

    raw = rng.random((height, width, 3)).astype(np.float32)
    img = cv2.GaussianBlur(raw, (0, 0), sigma)
    lo, hi = img.min(), img.max()
    return ((img - lo) / max(hi - lo, 1e-6)).astype(np.float32)


@pytest.fixture
def make_image(rng):
    def _make(height=64, width=64, sigma=1.5):
        return smooth_random_image(rng, height, width, sigma)
    return _make


@pytest.fixture
def hr_dataset(tmp_path, rng):
    """A small directory of smooth HR images plus synthesized LR pairs."""
    from epsr.degrade import DegradationRecipe, synthesize_pairs
    from epsr.images import save_image

    hr_dir = tmp_path / "hr"
    hr_dir.mkdir()
    for i in range(6):
        save_image(hr_dir / f"im{i:02d}.png", smooth_random_image(rng, 128, 128))
    recipe = DegradationRecipe(seed=77)
    manifest = synthesize_pairs(hr_dir, recipe, tmp_path / "pairs")
    return {"hr_dir": hr_dir, "manifest_path": tmp_path / "pairs" / "pairs.json",
            "manifest": manifest, "recipe": recipe}
