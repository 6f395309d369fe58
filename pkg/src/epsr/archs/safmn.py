"""SAFMN-L: spatially-adaptive feature modulation network, 96-channel reduction."""

from __future__ import annotations

import torch
import torch.nn as nn
import torch.nn.functional as F

from ..errors import ConfigurationError
from ..graph import ModelGraph
from .common import ModelSpec, seeded_init


class ChannelLayerNorm(nn.Module):
    """LayerNorm over the channel axis of NCHW maps."""

    def __init__(self, dim, eps=1e-6):
        super().__init__()
        self.weight = nn.Parameter(torch.ones(dim))
        self.bias = nn.Parameter(torch.zeros(dim))
        self.eps = eps

    def forward(self, x):
        mu = x.mean(1, keepdim=True)
        var = (x - mu).pow(2).mean(1, keepdim=True)
        x = (x - mu) / torch.sqrt(var + self.eps)
        return self.weight[:, None, None] * x + self.bias[:, None, None]


class SAFM(nn.Module):
    """Split features into groups, filter each at a coarser scale, gate the input."""

    def __init__(self, dim, n_levels=4):
        super().__init__()
        if dim % n_levels != 0:
            raise ConfigurationError(f"{dim} channels not divisible by {n_levels} SAFM groups")
        self.n_levels = n_levels
        chunk = dim // n_levels
        self.mfr = nn.ModuleList(
            [nn.Conv2d(chunk, chunk, 3, 1, 1, groups=chunk) for _ in range(n_levels)])
        self.aggr = nn.Conv2d(dim, dim, 1, 1, 0)
        self.act = nn.GELU()

    def forward(self, x):
        h, w = x.size()[-2:]
        xc = x.chunk(self.n_levels, dim=1)
        out = []
        for i in range(self.n_levels):
            if i > 0:
                p_size = (max(h // 2**i, 1), max(w // 2**i, 1))
                s = F.adaptive_max_pool2d(xc[i], p_size)
                s = self.mfr[i](s)
                s = F.interpolate(s, size=(h, w), mode="nearest")
            else:
                s = self.mfr[i](xc[i])
            out.append(s)
        out = self.aggr(torch.cat(out, dim=1))
        return self.act(out) * x


class CCM(nn.Module):
    """Convolutional channel mixer: 3x3 expansion, GELU, 1x1 projection."""

    def __init__(self, dim, expansion=2.0):
        super().__init__()
        hidden = int(dim * expansion)
        self.ccm = nn.Sequential(
            nn.Conv2d(dim, hidden, 3, 1, 1),
            nn.GELU(),
            nn.Conv2d(hidden, dim, 1, 1, 0),
        )

    def forward(self, x):
        return self.ccm(x)


class FMM(nn.Module):
    def __init__(self, dim, expansion=2.0):
        super().__init__()
        self.norm1 = ChannelLayerNorm(dim)
        self.norm2 = ChannelLayerNorm(dim)
        self.safm = SAFM(dim)
        self.ccm = CCM(dim, expansion)

    def forward(self, x):
        x = self.safm(self.norm1(x)) + x
        x = self.ccm(self.norm2(x)) + x
        return x


class SAFMNet(nn.Module):
    def __init__(self, spec: ModelSpec, n_levels=4, expansion=2.0):
        super().__init__()
        dim = spec.channels
        self.spec = spec
        self.n_levels = n_levels
        self.expansion = expansion
        self.to_feat = nn.Conv2d(3, dim, 3, 1, 1)
        self.feats = nn.Sequential(*[FMM(dim, expansion) for _ in range(spec.blocks)])
        self.to_img = nn.Sequential(
            nn.Conv2d(dim, 3 * spec.scale**2, 3, 1, 1),
            nn.PixelShuffle(spec.scale),
        )

    def forward(self, x):
        x = self.to_feat(x)
        x = self.feats(x) + x
        return self.to_img(x)

    def graph(self) -> ModelGraph:
        g = ModelGraph(self.spec.name, self.spec.scale)
        dim = self.spec.channels
        chunk = dim // self.n_levels
        hidden = int(dim * self.expansion)
        g.conv(3, dim, 3, label="to_feat")
        for b in range(self.spec.blocks):
            tag = f"fmm{b}"
            g.add("norm", dim, dim, label=f"{tag}.norm1")
            for i in range(self.n_levels):
                div = float(2**i)
                if i > 0:
                    g.add("pool", chunk, chunk, divisor=div, label=f"{tag}.safm.pool{i}")
                g.conv(chunk, chunk, 3, divisor=div, groups=chunk, label=f"{tag}.safm.mfr{i}")
                if i > 0:
                    g.add("upsample", chunk, chunk, label=f"{tag}.safm.up{i}")
            g.conv(dim, dim, 1, label=f"{tag}.safm.aggr")
            g.add("act", dim, dim, label=f"{tag}.safm.gelu")
            g.add("mul", dim, dim, label=f"{tag}.safm.gate")
            g.add("add", dim, dim, label=f"{tag}.res1")
            g.add("norm", dim, dim, label=f"{tag}.norm2")
            g.conv(dim, hidden, 3, label=f"{tag}.ccm.expand")
            g.add("act", hidden, hidden, label=f"{tag}.ccm.gelu")
            g.conv(hidden, dim, 1, label=f"{tag}.ccm.project")
            g.add("add", dim, dim, label=f"{tag}.res2")
        g.add("add", dim, dim, label="trunk_res")
        g.conv(dim, 3 * self.spec.scale**2, 3, label="to_img")
        g.add("pixel_shuffle", 3 * self.spec.scale**2, 3, divisor=1.0 / self.spec.scale,
              label="shuffle")
        return g


def build_safmn_l(spec: ModelSpec | None = None, seed: int = 0) -> SAFMNet:
    """SAFMN-L challenge configuration: 16 blocks at 96 channels, x4."""
    spec = spec or ModelSpec("safmn_l", scale=4, channels=96, blocks=16)
    model = SAFMNet(spec)
    seeded_init(model, seed)
    return model
