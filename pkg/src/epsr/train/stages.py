"""Stage configs, the published training recipes, and the desk-scale runner.

Patch sizes refer to the ground-truth crop; the LR crop is patch/scale.
Random crops plus horizontal/vertical flips are the only augmentations.
Training aborts on a non-finite loss, retaining the last good checkpoint.
"""

from __future__ import annotations

import csv
import dataclasses
import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
import torch

from ..checkpoint import manifest_from_spec, save_checkpoint
from ..degrade import usm_sharpen
from ..errors import ConfigurationError, TrainingAborted
from ..images import load_image
from .adapters import LossAdapters
from .discriminator import build_unet_discriminator
from .ema import EMAState, ema_update
from .losses import (cosine_lr, loss_aesop, loss_fft_l1, loss_gan, loss_l1, loss_ldl,
                     loss_mse, loss_perceptual)

KNOWN_LOSSES = ("l1", "mse", "fft_l1", "perceptual", "ldl", "gan", "aesop", "lpips")


@dataclass
class StageConfig:
    name: str
    loss_terms: dict = field(default_factory=lambda: {"l1": 1.0})
    patch_size: int = 192
    batch_size: int = 16
    lr_max: float = 3e-4
    lr_min: float = 1e-6
    iterations: int = 1000
    scheduler: str = "cosine"  # or "constant"
    adam_betas: tuple = (0.9, 0.99)
    ema_decay: float = 0.999
    seed: int = 0
    checkpoint_every: int = 0  # 0: final checkpoint only
    disc_channels: int = 64

    def __post_init__(self):
        unknown = set(self.loss_terms) - set(KNOWN_LOSSES)
        if unknown:
            raise ConfigurationError(f"unknown loss terms: {sorted(unknown)}")
        if any(w < 0 for w in self.loss_terms.values()):
            raise ConfigurationError("loss weights must be >= 0")
        if self.lr_min > self.lr_max:
            raise ConfigurationError("lr_min must not exceed lr_max")
        if self.iterations < 1:
            raise ConfigurationError("iterations must be >= 1")
        if self.scheduler not in ("cosine", "constant"):
            raise ConfigurationError(f"unknown scheduler {self.scheduler!r}")


def vpeg_stages() -> list[StageConfig]:
    """The winning three-stage recipe: pixel pretrain, GAN, reconstruction-loss polish."""
    return [
        StageConfig("vpeg_stage1", {"l1": 1.0, "fft_l1": 0.05}, patch_size=192,
                    batch_size=64, lr_max=3e-4, lr_min=1e-6, iterations=300_000),
        StageConfig("vpeg_stage2", {"l1": 1.0, "perceptual": 0.1, "ldl": 1.0, "gan": 0.1},
                    patch_size=192, batch_size=36, lr_max=1e-4, lr_min=1e-6,
                    iterations=300_000),
        StageConfig("vpeg_stage3", {"aesop": 1.0, "perceptual": 0.1, "ldl": 1.0, "gan": 0.1},
                    patch_size=192, batch_size=16, lr_max=1e-4, lr_min=1e-6,
                    iterations=100_000),
    ]


def mialgo_stages() -> list[StageConfig]:
    """TinyESRGAN recipe: MSE+LPIPS pretrain, then +GAN without a scheduler."""
    return [
        StageConfig("mialgo_stage1", {"mse": 1.0, "lpips": 1.0}, patch_size=512,
                    batch_size=32, lr_max=3e-4, lr_min=1e-6, iterations=500_000),
        StageConfig("mialgo_stage2", {"mse": 1.0, "lpips": 1.0, "gan": 0.1}, patch_size=512,
                    batch_size=32, lr_max=1e-4, lr_min=1e-4, iterations=250_000,
                    scheduler="constant"),
    ]


def ipiu_stages() -> list[StageConfig]:
    """EFDN recipe: single L1 stage with cosine annealing and flips."""
    return [StageConfig("ipiu_stage1", {"l1": 1.0}, patch_size=256, batch_size=64,
                        lr_max=1e-3, lr_min=1e-6, iterations=300_000)]


RECIPES = {"vpeg": vpeg_stages, "mialgo": mialgo_stages, "ipiu": ipiu_stages}


def desk_scale(stages, iter_divisor=1000, batch_divisor=4,
               patch_size=None, batch_size=None) -> list[StageConfig]:
    """Shrink a recipe to desk scale: iterations/1000 and batch/4 by default."""
    return [replace(s,
                    iterations=max(s.iterations // iter_divisor, 1),
                    batch_size=batch_size or max(s.batch_size // batch_divisor, 1),
                    patch_size=patch_size or s.patch_size)
            for s in stages]


# ---------------------------------------------------------------------------
# Stage config files (strict keys, versioned)

def stage_to_dict(config: StageConfig) -> dict:
    data = dataclasses.asdict(config)
    data["adam_betas"] = list(config.adam_betas)
    data["version"] = 1
    return data


def stage_from_dict(data: dict) -> StageConfig:
    data = dict(data)
    version = data.pop("version", 1)
    if version != 1:
        raise ConfigurationError(f"unsupported stage config version {version}")
    names = {f.name for f in dataclasses.fields(StageConfig)}
    unknown = set(data) - names
    if unknown:
        raise ConfigurationError(f"unknown keys in stage config: {sorted(unknown)}")
    if "adam_betas" in data:
        data["adam_betas"] = tuple(data["adam_betas"])
    return StageConfig(**data)


def load_stage_config(path) -> StageConfig:
    import yaml

    with open(path) as fh:
        data = yaml.safe_load(fh)
    if not isinstance(data, dict):
        raise ConfigurationError(f"stage config {path} is not a mapping")
    return stage_from_dict(data)


# ---------------------------------------------------------------------------
# Data plumbing

class PairSampler:
    """Aligned random HR/LR crops with flip augmentation from a pairs manifest."""

    def __init__(self, manifest, patch_size, scale=4, seed=0):
        if isinstance(manifest, (str, Path)):
            manifest = json.loads(Path(manifest).read_text())
        self.pairs = manifest["pairs"]
        if not self.pairs:
            raise ConfigurationError("pairs manifest is empty")
        self.gt_usm = bool(manifest.get("recipe", {}).get("gt_usm", False))
        self.patch = patch_size
        self.scale = scale
        self.rng = np.random.default_rng(seed)
        self._cache: dict[str, np.ndarray] = {}

    def _load(self, path, sharpen):
        key = ("usm:" if sharpen else "") + str(path)
        if key not in self._cache:
            img = load_image(path)
            if sharpen:
                img = usm_sharpen(img)
            self._cache[key] = img
        return self._cache[key]

    def batch(self, batch_size):
        lr_patch = self.patch // self.scale
        lrs, hrs = [], []
        for idx in self.rng.integers(0, len(self.pairs), size=batch_size):
            pair = self.pairs[idx]
            lr = self._load(pair["lr_path"], False)
            hr = self._load(pair["hr_path"], self.gt_usm)
            lr, hr = self._crop(lr, hr, lr_patch)
            if self.rng.random() < 0.5:
                lr, hr = lr[:, ::-1], hr[:, ::-1]
            if self.rng.random() < 0.5:
                lr, hr = lr[::-1], hr[::-1]
            lrs.append(np.ascontiguousarray(lr.transpose(2, 0, 1)))
            hrs.append(np.ascontiguousarray(hr.transpose(2, 0, 1)))
        return (torch.from_numpy(np.stack(lrs)).float(),
                torch.from_numpy(np.stack(hrs)).float())

    def _crop(self, lr, hr, lr_patch):
        s = self.scale
        pad_y = max(lr_patch - lr.shape[0], 0)
        pad_x = max(lr_patch - lr.shape[1], 0)
        if pad_y or pad_x:
            lr = np.pad(lr, ((0, pad_y), (0, pad_x), (0, 0)), mode="reflect")
            hr = np.pad(hr, ((0, pad_y * s), (0, pad_x * s), (0, 0)), mode="reflect")
        y = int(self.rng.integers(0, lr.shape[0] - lr_patch + 1))
        x = int(self.rng.integers(0, lr.shape[1] - lr_patch + 1))
        return (lr[y:y + lr_patch, x:x + lr_patch],
                hr[y * s:(y + lr_patch) * s, x * s:(x + lr_patch) * s])


# ---------------------------------------------------------------------------
# The stage runner

@dataclass
class StageResult:
    name: str
    checkpoint: str
    trace_path: str
    loss_history: list
    aborted: bool = False

    def term_series(self, term) -> list[float]:
        return [row[term] for row in self.loss_history if term in row]


def _set_requires_grad(module, flag):
    for p in module.parameters():
        p.requires_grad_(flag)


def run_stage(model, data, config: StageConfig, out_dir, discriminator=None,
              adapters: LossAdapters | None = None, device="cpu",
              log_every=50, quiet=True) -> StageResult:
    """Train one stage over a pairs manifest; returns paths and the loss trace."""
    adapters = adapters or LossAdapters()
    for name in config.loss_terms:
        adapters.require(name)
    needs_gan = "gan" in config.loss_terms
    if needs_gan and discriminator is None:
        raise ConfigurationError(f"stage {config.name!r} uses a GAN loss but got "
                                 "no discriminator")

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    scale = getattr(getattr(model, "spec", None), "scale", 4)
    sampler = PairSampler(data, config.patch_size, scale=scale, seed=config.seed)

    model = model.to(device).train()
    torch.manual_seed(config.seed)
    optimizer = torch.optim.Adam(model.parameters(), lr=config.lr_max,
                                 betas=config.adam_betas)
    d_optimizer = None
    if needs_gan:
        discriminator = discriminator.to(device).train()
        d_optimizer = torch.optim.Adam(discriminator.parameters(), lr=config.lr_max,
                                       betas=config.adam_betas)
    for module in (adapters.extractor, adapters.autoencoder):
        if isinstance(module, torch.nn.Module):
            module.to(device)
    ema = EMAState.from_model(model, config.ema_decay)

    trace_path = out_dir / f"trace_{config.name}.csv"
    term_names = sorted(config.loss_terms)
    history: list[dict] = []
    last_good = None

    def save(tag, iteration):
        spec = getattr(model, "spec", None)
        manifest = manifest_from_spec(spec, config.seed) if spec is not None else \
            {"name": config.name, "scale": scale, "channels": 0, "blocks": 0,
             "growth": 0, "fused": False, "seed": config.seed}
        manifest["stage"] = config.name
        manifest["iteration"] = iteration
        path = out_dir / f"{config.name}_{tag}.npz"
        save_checkpoint(path, model, manifest, extra_state={"ema": ema.state_dict()})
        return str(path)

    with open(trace_path, "w", newline="") as trace_file:
        writer = csv.writer(trace_file)
        writer.writerow(["iteration", "lr", *term_names, "total"])
        for t in range(config.iterations):
            lr_t = config.lr_max if config.scheduler == "constant" else \
                cosine_lr(t, config.iterations, config.lr_max, config.lr_min)
            for group in optimizer.param_groups:
                group["lr"] = lr_t
            lr_batch, hr_batch = sampler.batch(config.batch_size)
            lr_batch, hr_batch = lr_batch.to(device), hr_batch.to(device)

            if needs_gan:
                _set_requires_grad(discriminator, False)
            fake = model(lr_batch)
            terms = {}
            for name in term_names:
                weight = config.loss_terms[name]
                if name == "l1":
                    value = loss_l1(fake, hr_batch)
                elif name == "mse":
                    value = loss_mse(fake, hr_batch)
                elif name == "fft_l1":
                    value = loss_fft_l1(fake, hr_batch)
                elif name == "perceptual":
                    value = loss_perceptual(fake, hr_batch, adapters.extractor)
                elif name == "ldl":
                    value = loss_ldl(fake, hr_batch)
                elif name == "aesop":
                    value = loss_aesop(fake, hr_batch, adapters.autoencoder)
                elif name == "lpips":
                    value = adapters.lpips(fake, hr_batch)
                elif name == "gan":
                    value = loss_gan(None, discriminator(fake), "generator")
                terms[name] = value
            total = sum(config.loss_terms[n] * terms[n] for n in term_names)

            if not torch.isfinite(total):
                raise TrainingAborted(
                    f"non-finite loss at iteration {t} of {config.name}",
                    last_checkpoint=last_good)

            optimizer.zero_grad(set_to_none=True)
            total.backward()
            optimizer.step()
            ema_update(ema, model)

            if needs_gan:
                _set_requires_grad(discriminator, True)
                d_real = discriminator(hr_batch)
                d_fake = discriminator(fake.detach())
                d_loss = loss_gan(d_real, d_fake, "discriminator")
                d_optimizer.zero_grad(set_to_none=True)
                d_loss.backward()
                d_optimizer.step()

            row = {"iteration": t, "lr": lr_t,
                   **{n: float(terms[n].detach()) for n in term_names},
                   "total": float(total.detach())}
            history.append(row)
            writer.writerow([t, f"{lr_t:.3e}",
                             *[f"{row[n]:.6f}" for n in term_names],
                             f"{row['total']:.6f}"])
            if not quiet and (t % log_every == 0 or t == config.iterations - 1):
                printable = " ".join(f"{n}={row[n]:.4f}" for n in term_names)
                print(f"[{config.name}] iter {t}/{config.iterations} lr={lr_t:.2e} "
                      f"{printable} total={row['total']:.4f}")
            if config.checkpoint_every and (t + 1) % config.checkpoint_every == 0:
                last_good = save(f"iter{t + 1}", t + 1)

    final = save("final", config.iterations)
    return StageResult(name=config.name, checkpoint=final, trace_path=str(trace_path),
                       loss_history=history)


def run_recipe(model, data, stages, out_dir, adapters=None, device="cpu",
               quiet=True) -> list[StageResult]:
    """Run a multi-stage recipe; one discriminator persists across GAN stages."""
    discriminator = None
    results = []
    for config in stages:
        if "gan" in config.loss_terms and discriminator is None:
            discriminator = build_unet_discriminator(config.disc_channels)
        results.append(run_stage(model, data, config, out_dir,
                                 discriminator=discriminator, adapters=adapters,
                                 device=device, quiet=quiet))
    return results
