"""Adapters for externally trained pieces of the loss stack.

The perceptual extractor, the reconstruction autoencoder, and LPIPS-style
similarity all come from pretrained models the toolkit does not embed.
Deterministic random-weight doubles ship for CI; real backbones plug in
through the same callables.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
import torch.nn as nn

from ..errors import ConfigurationError


class RandomFeatureExtractor(nn.Module):
    """Five frozen random conv stages with VGG-like downsampling; CI double."""

    def __init__(self, seed=0, base_channels=8):
        super().__init__()
        gen = torch.Generator().manual_seed(seed)
        channels = [3] + [base_channels * 2**min(i, 3) for i in range(5)]
        self.stages = nn.ModuleList()
        for i in range(5):
            conv = nn.Conv2d(channels[i], channels[i + 1], 3, 1 if i == 0 else 2, 1)
            with torch.no_grad():
                conv.weight.normal_(0.0, 0.2, generator=gen)
                conv.bias.zero_()
            conv.weight.requires_grad_(False)
            conv.bias.requires_grad_(False)
            self.stages.append(conv)
        self.act = nn.LeakyReLU(0.2)

    def forward(self, x):
        feats = []
        for stage in self.stages:
            x = stage(x)
            feats.append(x)  # pre-activation tap
            x = self.act(x)
        return feats


class IdentityAutoencoder(nn.Module):
    def forward(self, x):
        return x


class RandomLinearAutoencoder(nn.Module):
    """Frozen random 1x1 bottleneck; CI double for the reconstruction loss."""

    def __init__(self, seed=0, channels=3, hidden=8):
        super().__init__()
        gen = torch.Generator().manual_seed(seed)
        self.down = nn.Conv2d(channels, hidden, 1)
        self.up = nn.Conv2d(hidden, channels, 1)
        with torch.no_grad():
            for conv in (self.down, self.up):
                conv.weight.normal_(0.0, 0.3, generator=gen)
                conv.bias.zero_()
                conv.weight.requires_grad_(False)
                conv.bias.requires_grad_(False)

    def forward(self, x):
        return self.up(self.down(x))


@dataclass
class LossAdapters:
    """External model hooks a stage may need, keyed by loss name."""

    extractor: nn.Module | None = None     # perceptual
    autoencoder: nn.Module | None = None   # aesop
    lpips: object | None = None            # lpips: callable (pred, target) -> scalar

    def require(self, loss_name):
        if loss_name == "perceptual" and self.extractor is None:
            raise ConfigurationError("perceptual loss needs a feature extractor adapter")
        if loss_name == "aesop" and self.autoencoder is None:
            raise ConfigurationError("reconstruction loss stage refuses to start "
                                     "without an autoencoder adapter")
        if loss_name == "lpips" and self.lpips is None:
            raise ConfigurationError("lpips loss needs a similarity adapter")


def ci_adapters(seed=0) -> LossAdapters:
    """Deterministic test doubles for every adapter slot."""
    extractor = RandomFeatureExtractor(seed=seed)
    similarity = RandomFeatureExtractor(seed=seed + 1)

    def lpips_like(pred, target):
        from .losses import loss_perceptual

        return loss_perceptual(pred, target, similarity, stage_weights=(1.0,) * 5)

    return LossAdapters(extractor=extractor,
                        autoencoder=RandomLinearAutoencoder(seed=seed + 2),
                        lpips=lpips_like)
