"""RRDB generators: the Real-ESRGAN x4 baseline and the TinyESRGAN reduction.

Both share one network body; they differ only in width (64 vs 32 feature
channels), depth (23 vs 17 blocks) and dense growth rate (32 vs 18). The
x4 generator consumes the LR image directly and upsamples with two
nearest-interpolation + conv stages, matching the reference generator.
"""

from __future__ import annotations

import torch
import torch.nn as nn
import torch.nn.functional as F

from ..errors import ConfigurationError
from ..graph import ModelGraph
from .common import ModelSpec, seeded_init

RESIDUAL_SCALE = 0.2


class ResidualDenseBlock(nn.Module):
    def __init__(self, num_feat, growth):
        super().__init__()
        self.conv1 = nn.Conv2d(num_feat, growth, 3, 1, 1)
        self.conv2 = nn.Conv2d(num_feat + growth, growth, 3, 1, 1)
        self.conv3 = nn.Conv2d(num_feat + 2 * growth, growth, 3, 1, 1)
        self.conv4 = nn.Conv2d(num_feat + 3 * growth, growth, 3, 1, 1)
        self.conv5 = nn.Conv2d(num_feat + 4 * growth, num_feat, 3, 1, 1)
        self.lrelu = nn.LeakyReLU(0.2, inplace=True)

    def forward(self, x):
        x1 = self.lrelu(self.conv1(x))
        x2 = self.lrelu(self.conv2(torch.cat((x, x1), 1)))
        x3 = self.lrelu(self.conv3(torch.cat((x, x1, x2), 1)))
        x4 = self.lrelu(self.conv4(torch.cat((x, x1, x2, x3), 1)))
        x5 = self.conv5(torch.cat((x, x1, x2, x3, x4), 1))
        return x + x5 * RESIDUAL_SCALE


class RRDB(nn.Module):
    def __init__(self, num_feat, growth):
        super().__init__()
        self.rdb1 = ResidualDenseBlock(num_feat, growth)
        self.rdb2 = ResidualDenseBlock(num_feat, growth)
        self.rdb3 = ResidualDenseBlock(num_feat, growth)

    def forward(self, x):
        out = self.rdb3(self.rdb2(self.rdb1(x)))
        return x + out * RESIDUAL_SCALE


class RRDBNet(nn.Module):
    def __init__(self, spec: ModelSpec):
        super().__init__()
        if spec.growth < 1:
            raise ConfigurationError("RRDB networks need a positive dense growth rate")
        self.spec = spec
        nf = spec.channels
        self.conv_first = nn.Conv2d(3, nf, 3, 1, 1)
        self.body = nn.Sequential(*[RRDB(nf, spec.growth) for _ in range(spec.blocks)])
        self.conv_body = nn.Conv2d(nf, nf, 3, 1, 1)
        self.conv_up1 = nn.Conv2d(nf, nf, 3, 1, 1)
        self.conv_up2 = nn.Conv2d(nf, nf, 3, 1, 1)
        self.conv_hr = nn.Conv2d(nf, nf, 3, 1, 1)
        self.conv_last = nn.Conv2d(nf, 3, 3, 1, 1)
        self.lrelu = nn.LeakyReLU(0.2, inplace=True)

    def forward(self, x):
        fea = self.conv_first(x)
        body = self.conv_body(self.body(fea))
        fea = fea + body
        fea = self.lrelu(self.conv_up1(F.interpolate(fea, scale_factor=2, mode="nearest")))
        fea = self.lrelu(self.conv_up2(F.interpolate(fea, scale_factor=2, mode="nearest")))
        return self.conv_last(self.lrelu(self.conv_hr(fea)))

    def graph(self) -> ModelGraph:
        g = ModelGraph(self.spec.name, self.spec.scale)
        nf, gc = self.spec.channels, self.spec.growth
        g.conv(3, nf, 3, label="conv_first")
        for b in range(self.spec.blocks):
            for r in range(3):
                tag = f"rrdb{b}.rdb{r}"
                for i in range(4):
                    g.conv(nf + i * gc, gc, 3, label=f"{tag}.conv{i + 1}")
                    g.add("act", gc, gc, label=f"{tag}.lrelu{i + 1}")
                g.conv(nf + 4 * gc, nf, 3, label=f"{tag}.conv5")
                g.add("mul", nf, nf, label=f"{tag}.scale")
                g.add("add", nf, nf, label=f"{tag}.res")
            g.add("mul", nf, nf, label=f"rrdb{b}.scale")
            g.add("add", nf, nf, label=f"rrdb{b}.res")
        g.conv(nf, nf, 3, label="conv_body")
        g.add("add", nf, nf, label="trunk_res")
        g.add("upsample", nf, nf, divisor=0.5, label="interp1")
        g.conv(nf, nf, 3, divisor=0.5, label="conv_up1")
        g.add("act", nf, nf, divisor=0.5, label="lrelu_up1")
        g.add("upsample", nf, nf, divisor=0.25, label="interp2")
        g.conv(nf, nf, 3, divisor=0.25, label="conv_up2")
        g.add("act", nf, nf, divisor=0.25, label="lrelu_up2")
        g.conv(nf, nf, 3, divisor=0.25, label="conv_hr")
        g.add("act", nf, nf, divisor=0.25, label="lrelu_hr")
        g.conv(nf, 3, 3, divisor=0.25, label="conv_last")
        return g


def build_rrdb_baseline(spec: ModelSpec | None = None, seed: int = 0) -> RRDBNet:
    """The Real-ESRGAN x4 generator: 64 channels, 23 RRDBs, growth 32."""
    spec = spec or ModelSpec("realesrgan_baseline", scale=4, channels=64, blocks=23, growth=32)
    model = RRDBNet(spec)
    seeded_init(model, seed, scale=0.1, negative_slope=0.2)
    return model


def build_tiny_esrgan(spec: ModelSpec | None = None, seed: int = 0) -> RRDBNet:
    """TinyESRGAN: 17 RRDBs, 32 feature channels, dense growth 18."""
    spec = spec or ModelSpec("tiny_esrgan", scale=4, channels=32, blocks=17, growth=18)
    model = RRDBNet(spec)
    seeded_init(model, seed, scale=0.1, negative_slope=0.2)
    return model
