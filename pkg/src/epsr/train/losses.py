"""Loss functions for the multi-stage perceptual training recipes.

Every reconstruction loss is zero at pred == target and nonnegative; the
GAN losses are the non-saturating logistic form on per-pixel logit maps.
"""

from __future__ import annotations

import math

import torch
import torch.nn.functional as F

from ..errors import ConfigurationError, ShapeError

VGG_STAGE_WEIGHTS = (0.1, 0.1, 1.0, 1.0, 1.0)


def _check_shapes(pred, target):
    if pred.shape != target.shape:
        raise ShapeError(f"shape mismatch: {tuple(pred.shape)} vs {tuple(target.shape)}")


def loss_l1(pred, target):
    _check_shapes(pred, target)
    return (pred - target).abs().mean()


def loss_mse(pred, target):
    _check_shapes(pred, target)
    return (pred - target).pow(2).mean()


def loss_fft_l1(pred, target):
    """L1 over the stacked real and imaginary parts of the 2-D DFTs."""
    _check_shapes(pred, target)
    diff = torch.fft.fft2(pred) - torch.fft.fft2(target)
    return torch.stack([diff.real, diff.imag]).abs().mean()


def loss_perceptual(pred, target, extractor, stage_weights=None):
    """Weighted L1 over feature-extractor stages (default VGG-style weights)."""
    _check_shapes(pred, target)
    feats_pred = extractor(pred)
    feats_target = extractor(target)
    if len(feats_pred) != len(feats_target):
        raise ShapeError("extractor returned differing stage counts")
    if stage_weights is None:
        stage_weights = VGG_STAGE_WEIGHTS if len(feats_pred) == 5 \
            else (1.0,) * len(feats_pred)
    if len(stage_weights) != len(feats_pred):
        raise ShapeError(f"{len(stage_weights)} weights for {len(feats_pred)} stages")
    total = pred.new_zeros(())
    for w, fp, ft in zip(stage_weights, feats_pred, feats_target):
        total = total + w * (fp - ft).abs().mean()
    return total


def loss_gan(disc_out_real, disc_out_fake, side):
    """Non-saturating logistic loss averaged over the per-pixel logit map."""
    if side == "generator":
        return F.softplus(-disc_out_fake).mean()
    if side == "discriminator":
        return F.softplus(-disc_out_real).mean() + F.softplus(disc_out_fake).mean()
    raise ConfigurationError(f"side must be 'generator' or 'discriminator', got {side!r}")


def _local_variance(x, window):
    pad = (window - 1) // 2
    padded = F.pad(x, [pad] * 4, mode="reflect")
    patches = padded.unfold(2, window, 1).unfold(3, window, 1)
    return patches.var(dim=(-2, -1), unbiased=True)


def loss_ldl(pred, target, window=7, exponent=0.2):
    """Artifact-map-weighted L1: residual-variance statistics gate the penalty.

    The map combines the batch-item variance of the absolute residual with
    its local variance over a sliding window, each raised to the contrast
    exponent. Flat residuals (including pred == target) produce a zero map.
    """
    _check_shapes(pred, target)
    residual = (pred - target).abs().sum(1, keepdim=True)
    patch_level = residual.var(dim=(1, 2, 3), keepdim=True, unbiased=True)
    # Clamp away from 0 before the fractional power: its derivative blows up
    # at the origin while the value itself stays effectively zero.
    eps = torch.finfo(residual.dtype).tiny
    weight = patch_level.clamp_min(eps).pow(exponent) * \
        _local_variance(residual, window).clamp_min(eps).pow(exponent)
    return (weight * (pred - target).abs()).mean()


def loss_aesop(pred, target, autoencoder):
    """L1 between autoencoder reconstructions of prediction and target."""
    _check_shapes(pred, target)
    return (autoencoder(pred) - autoencoder(target)).abs().mean()


def cosine_lr(t, total, lr_max, lr_min):
    """Cosine annealing: lr_min + 0.5 (lr_max - lr_min)(1 + cos(pi t / T))."""
    if total <= 0:
        raise ConfigurationError("total iterations must be positive")
    if not 0 <= t <= total:
        raise ConfigurationError(f"iteration {t} outside [0, {total}]")
    return lr_min + 0.5 * (lr_max - lr_min) * (1.0 + math.cos(math.pi * t / total))
