"""Shared pieces of the architecture zoo: specs and seeded initialization."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import torch
import torch.nn as nn

from ..errors import ConfigurationError


@dataclass
class ModelSpec:
    """Architecture knobs common to every builder."""

    name: str
    scale: int = 4
    channels: int = 64
    blocks: int = 16
    growth: int = 0
    variant_params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.channels < 1 or self.blocks < 1:
            raise ConfigurationError("channels and blocks must be >= 1")
        if self.scale < 1:
            raise ConfigurationError("scale must be >= 1")


def seeded_init(module: nn.Module, seed: int, scale: float = 1.0, negative_slope: float = 0.0):
    """Kaiming-style fan-in init on every conv, reproducible from a seed.

    torch.nn.init has no generator argument, so the std is computed by hand
    and drawn with a local Generator: std = scale * sqrt(2 / (1+a^2) / fan_in).
    Biases are zeroed. BatchNorm affine weights stay at their defaults.
    """
    gen = torch.Generator().manual_seed(seed)
    gain = math.sqrt(2.0 / (1.0 + negative_slope**2))
    for m in module.modules():
        if isinstance(m, nn.Conv2d):
            fan_in = m.in_channels // m.groups * m.kernel_size[0] * m.kernel_size[1]
            std = scale * gain / math.sqrt(fan_in)
            with torch.no_grad():
                m.weight.normal_(0.0, std, generator=gen)
                if m.bias is not None:
                    m.bias.zero_()
        elif hasattr(m, "init_scales_"):
            m.init_scales_(gen)
