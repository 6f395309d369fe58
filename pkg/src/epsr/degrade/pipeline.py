"""Seeded second-order degradation pipeline for training-pair synthesis.

Two blur/resize/noise stages followed by a final exact-size resize with
sinc filtering and JPEG compression (in configurable order), driving every
draw from one per-image RNG stream. The published benchmark keeps its own
degradation recipe private, so this module ships fully configurable specs
whose defaults follow the widely used second-order ranges, and serializes
the recipe plus the complete sampled trace with every dataset.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import cv2
import numpy as np

from ..errors import ConfigurationError, ShapeError
from ..images import list_images, load_image, save_image, validate_plane
from .kernels import BlurSpec, kernel_from_params, sample_blur_params

INTERP_FLAGS = {"area": cv2.INTER_AREA, "bilinear": cv2.INTER_LINEAR,
                "bicubic": cv2.INTER_CUBIC, "nearest": cv2.INTER_NEAREST}
RESIZE_MODES = ("up", "down", "keep")
FINAL_ORDERS = ("sinc_then_jpeg", "jpeg_then_sinc", "random")


@dataclass
class ResizeSpec:
    mode_probs: tuple = (0.2, 0.7, 0.1)  # up / down / keep
    up_range: tuple = (1.0, 1.5)
    down_range: tuple = (0.15, 1.0)
    interp_choices: tuple = ("area", "bilinear", "bicubic")


@dataclass
class NoiseSpec:
    kind: str = "random"  # "gaussian" | "poisson" | "random"
    prob: float = 1.0
    gaussian_prob: float = 0.5
    sigma_range: tuple = (1.0 / 255, 30.0 / 255)
    poisson_scale_range: tuple = (0.05, 3.0)
    gray_noise_prob: float = 0.4

    def __post_init__(self):
        if self.sigma_range[0] < 0 or self.poisson_scale_range[0] < 0:
            raise ConfigurationError("noise strength ranges must be nonnegative")
        if not 0.0 <= self.gray_noise_prob <= 1.0:
            raise ConfigurationError("gray_noise_prob must be in [0, 1]")


@dataclass
class StageSpec:
    blur: BlurSpec = field(default_factory=BlurSpec)
    resize: ResizeSpec = field(default_factory=ResizeSpec)
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    jpeg_quality_range: tuple = (30, 95)
    jpeg_prob: float = 1.0

    def __post_init__(self):
        lo, hi = self.jpeg_quality_range
        if not (30 <= lo <= hi <= 95):
            raise ConfigurationError("jpeg quality range must satisfy 30 <= lo <= hi <= 95")


@dataclass
class DegradationRecipe:
    seed: int = 0
    stage1: StageSpec = field(default_factory=StageSpec)
    stage2: StageSpec = field(default_factory=lambda: StageSpec(
        blur=BlurSpec(prob=0.8, sigma_range=(0.2, 1.5)),
        resize=ResizeSpec(mode_probs=(0.3, 0.4, 0.3), up_range=(1.0, 1.2),
                          down_range=(0.3, 1.0)),
        noise=NoiseSpec(sigma_range=(1.0 / 255, 25.0 / 255),
                        poisson_scale_range=(0.05, 2.5)),
    ))
    final_sinc_prob: float = 0.8
    final_sinc_kernel_size: int = 21
    final_sinc_cutoff_range: tuple = (np.pi / 3, np.pi)
    final_order: str = "random"
    final_resize_interp: str = "random"
    target_scale: int = 4
    gt_usm: bool = False

    def __post_init__(self):
        if self.final_order not in FINAL_ORDERS:
            raise ConfigurationError(f"final_order must be one of {FINAL_ORDERS}")
        if not 0.0 <= self.final_sinc_prob <= 1.0:
            raise ConfigurationError("final_sinc_prob must be in [0, 1]")


def rng_for_image(master_seed: int, index: int) -> np.random.Generator:
    """Independent per-image stream: reordering images never changes a draw."""
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(index,)))


def _apply_blur(img, kernel):
    size = kernel.shape[0]
    smallest = min(img.shape[:2])
    if size > smallest:
        # Crop the kernel center so reflect padding still fits tiny images.
        keep = smallest if smallest % 2 == 1 else smallest - 1
        lo = (size - keep) // 2
        kernel = kernel[lo:lo + keep, lo:lo + keep]
        total = kernel.sum()
        if abs(total) > 1e-8:
            kernel = kernel / total
    return cv2.filter2D(img, -1, kernel, borderType=cv2.BORDER_REFLECT)


def _resize(img, size_wh, interp):
    return cv2.resize(img, size_wh, interpolation=INTERP_FLAGS[interp])


def _jpeg_roundtrip(img, quality: int):
    data = (np.clip(img, 0.0, 1.0) * 255.0).round().astype(np.uint8)
    ok, buf = cv2.imencode(".jpg", cv2.cvtColor(data, cv2.COLOR_RGB2BGR),
                           [cv2.IMWRITE_JPEG_QUALITY, int(quality)])
    if not ok:
        raise IOError("JPEG encode failed")
    out = cv2.imdecode(buf, cv2.IMREAD_COLOR)
    return cv2.cvtColor(out, cv2.COLOR_BGR2RGB).astype(np.float32) / 255.0


def _gaussian_noise(img, sigma, gray, rng):
    if gray:
        noise = rng.normal(0.0, sigma, img.shape[:2]).astype(np.float32)[..., None]
    else:
        noise = rng.normal(0.0, sigma, img.shape).astype(np.float32)
    return np.clip(img + noise, 0.0, 1.0)


def _poisson_noise(img, scale, gray, rng):
    base = img.mean(axis=2, keepdims=True) if gray else img
    # Shot noise on a rounded intensity grid; grid resolution follows the
    # image's own quantization so flat synthetic inputs stay nearly clean.
    levels = len(np.unique((base * 255.0).round()))
    vals = 2 ** int(np.ceil(np.log2(max(levels, 2))))
    shot = rng.poisson(np.clip(base, 0.0, 1.0) * vals).astype(np.float32) / vals
    noise = (shot - base) * scale
    return np.clip(img + noise, 0.0, 1.0)


def _run_stage(img, stage: StageSpec, rng, trace: dict):
    # Blur
    if rng.uniform() < stage.blur.prob:
        params = sample_blur_params(stage.blur, rng)
        img = _apply_blur(img, kernel_from_params(params).astype(np.float32))
        trace["blur"] = params
    # Resize by a factor relative to the current size ("keep" leaves it alone);
    # the final exact-size correction restores the x4 relationship.
    mode = str(rng.choice(RESIZE_MODES, p=np.asarray(stage.resize.mode_probs)
                          / sum(stage.resize.mode_probs)))
    if mode == "up":
        factor = float(rng.uniform(*stage.resize.up_range))
    elif mode == "down":
        factor = float(rng.uniform(*stage.resize.down_range))
    else:
        factor = 1.0
    interp = str(rng.choice(stage.resize.interp_choices))
    new_h = max(int(round(img.shape[0] * factor)), 8)
    new_w = max(int(round(img.shape[1] * factor)), 8)
    if (new_h, new_w) != img.shape[:2]:
        img = _resize(img, (new_w, new_h), interp)
    trace["resize"] = {"mode": mode, "factor": factor, "interp": interp,
                       "size": [new_h, new_w]}
    # Noise
    if rng.uniform() < stage.noise.prob:
        kind = stage.noise.kind
        if kind == "random":
            kind = "gaussian" if rng.uniform() < stage.noise.gaussian_prob else "poisson"
        gray = bool(rng.uniform() < stage.noise.gray_noise_prob)
        if kind == "gaussian":
            sigma = float(rng.uniform(*stage.noise.sigma_range))
            img = _gaussian_noise(img, sigma, gray, rng)
            trace["noise"] = {"kind": kind, "sigma": sigma, "gray": gray}
        else:
            scale = float(rng.uniform(*stage.noise.poisson_scale_range))
            img = _poisson_noise(img, scale, gray, rng)
            trace["noise"] = {"kind": kind, "scale": scale, "gray": gray}
    return img


def degrade(hr: np.ndarray, recipe: DegradationRecipe, rng=None):
    """Degrade one HR image to LR; returns (lr, trace of every sampled value)."""
    hr = validate_plane(hr)
    height, width = hr.shape[:2]
    scale = recipe.target_scale
    if height % scale or width % scale:
        raise ShapeError(f"HR dimensions {height}x{width} not divisible by {scale}")
    rng = np.random.default_rng(recipe.seed) if rng is None else rng
    target_hw = (height // scale, width // scale)
    trace: dict = {"stage1": {}, "stage2": {}, "final": {}}

    img = _run_stage(hr, recipe.stage1, rng, trace["stage1"])
    if rng.uniform() < recipe.stage1.jpeg_prob:
        quality = int(rng.integers(recipe.stage1.jpeg_quality_range[0],
                                   recipe.stage1.jpeg_quality_range[1] + 1))
        img = _jpeg_roundtrip(img, quality)
        trace["stage1"]["jpeg_quality"] = quality

    img = _run_stage(img, recipe.stage2, rng, trace["stage2"])

    # Final step: exact-size resize plus sinc, and the stage-2 JPEG, in order.
    order = recipe.final_order
    if order == "random":
        order = "sinc_then_jpeg" if rng.uniform() < 0.5 else "jpeg_then_sinc"
    interp = recipe.final_resize_interp
    if interp == "random":
        interp = str(rng.choice(("area", "bilinear", "bicubic")))
    use_sinc = bool(rng.uniform() < recipe.final_sinc_prob)
    sinc_params = None
    if use_sinc:
        sinc_params = sample_blur_params(
            BlurSpec(kind="sinc", kernel_size=recipe.final_sinc_kernel_size,
                     cutoff_range=recipe.final_sinc_cutoff_range), rng)

    def resize_and_sinc(x):
        if x.shape[:2] != target_hw:
            x = _resize(x, (target_hw[1], target_hw[0]), interp)
        if sinc_params is not None:
            x = _apply_blur(x, kernel_from_params(sinc_params).astype(np.float32))
        return x

    use_jpeg = rng.uniform() < recipe.stage2.jpeg_prob
    quality = int(rng.integers(recipe.stage2.jpeg_quality_range[0],
                               recipe.stage2.jpeg_quality_range[1] + 1)) if use_jpeg else None
    if order == "sinc_then_jpeg":
        img = resize_and_sinc(img)
        if use_jpeg:
            img = _jpeg_roundtrip(img, quality)
    else:
        if use_jpeg:
            img = _jpeg_roundtrip(img, quality)
        img = resize_and_sinc(img)

    trace["final"] = {"order": order, "resize_interp": interp, "sinc": sinc_params,
                      "jpeg_quality": quality}
    return np.clip(img, 0.0, 1.0), trace


def usm_sharpen(hr: np.ndarray, radius: float = 2.0, weight: float = 0.5,
                threshold: float = 10.0 / 255) -> np.ndarray:
    """Unsharp masking with a soft threshold mask over low-contrast residuals."""
    if weight < 0:
        raise ConfigurationError("usm weight must be >= 0")
    hr = validate_plane(hr)
    blur = cv2.GaussianBlur(hr, (0, 0), radius)
    residual = hr - blur
    mask = (np.abs(residual) > threshold).astype(np.float32)
    mask = cv2.GaussianBlur(mask, (0, 0), radius)
    return np.clip(hr + weight * residual * mask, 0.0, 1.0)


def synthesize_pairs(hr_dir, recipe: DegradationRecipe, out_dir) -> dict:
    """Degrade every decodable image under hr_dir; write LR PNGs plus a manifest."""
    out_dir = Path(out_dir)
    lr_dir = out_dir / "lr"
    lr_dir.mkdir(parents=True, exist_ok=True)
    records, skipped = [], []
    for index, hr_path in enumerate(list_images(hr_dir)):
        try:
            hr = load_image(hr_path)
            lr, trace = degrade(hr, recipe, rng=rng_for_image(recipe.seed, index))
        except Exception as exc:  # undecodable or ill-sized file: skip, not fatal
            skipped.append({"hr_path": str(hr_path), "reason": str(exc)})
            continue
        lr_path = lr_dir / f"{hr_path.stem}.png"
        save_image(lr_path, lr)
        records.append({
            "lr_path": str(lr_path),
            "hr_path": str(hr_path),
            "seed": [recipe.seed, index],
            "trace": trace,
        })
    manifest = {
        "master_seed": recipe.seed,
        "recipe": recipe_to_dict(recipe),
        "pairs": records,
        "skipped": skipped,
    }
    manifest_path = out_dir / "pairs.json"
    manifest_path.write_text(json.dumps(manifest, indent=2))
    return manifest


# ---------------------------------------------------------------------------
# Recipe (de)serialization: strict keys so datasets stay reproducible.

def _plain(value):
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value


def recipe_to_dict(recipe: DegradationRecipe) -> dict:
    data = _plain(asdict(recipe))
    data["version"] = 1
    return data


def _build(cls, data: dict, context: str):
    import dataclasses

    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - names
    if unknown:
        raise ConfigurationError(f"unknown keys in {context}: {sorted(unknown)}")
    kwargs = {}
    for f in dataclasses.fields(cls):
        if f.name not in data:
            continue
        value = data[f.name]
        if isinstance(value, list):
            value = tuple(value)
        kwargs[f.name] = value
    return cls(**kwargs)


def recipe_from_dict(data: dict) -> DegradationRecipe:
    data = dict(data)
    version = data.pop("version", 1)
    if version != 1:
        raise ConfigurationError(f"unsupported recipe version {version}")
    for key in ("stage1", "stage2"):
        if key in data and isinstance(data[key], dict):
            stage = dict(data[key])
            for sub, sub_cls in (("blur", BlurSpec), ("resize", ResizeSpec),
                                 ("noise", NoiseSpec)):
                if sub in stage and isinstance(stage[sub], dict):
                    stage[sub] = _build(sub_cls, stage[sub], f"{key}.{sub}")
            data[key] = _build(StageSpec, stage, key)
    return _build(DegradationRecipe, data, "recipe")


def load_recipe(path) -> DegradationRecipe:
    import yaml

    with open(path) as fh:
        data = yaml.safe_load(fh)
    if not isinstance(data, dict):
        raise ConfigurationError(f"recipe file {path} is not a mapping")
    return recipe_from_dict(data)


def save_recipe(path, recipe: DegradationRecipe):
    import yaml

    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        yaml.safe_dump(recipe_to_dict(recipe), fh, sort_keys=False)
