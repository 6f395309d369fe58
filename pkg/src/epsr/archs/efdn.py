"""EFDN: edge-enhanced feature distillation network built from EDBB convolutions.

Four distillation blocks around EDBB 3x3 units with an enhanced spatial
attention tail, a 1x1 fusion over the block outputs, and a single
pixel-shuffle upsampler. Channel widths (38 trunk / 23 distilled / 12
attention) are pinned by the published fused budget of ~0.2762 M
parameters and ~132.14 G MACs at 960x540.
"""

from __future__ import annotations

import torch
import torch.nn as nn
import torch.nn.functional as F

from ..errors import StateError
from ..graph import ModelGraph
from ..reparam import EDBB
from .common import ModelSpec, seeded_init

EFDN_CHANNELS = 38
EFDN_DISTILL = 23
EFDN_ATTENTION = 12


class ESA(nn.Module):
    """Enhanced spatial attention: squeezed, strided context gating the block output."""

    def __init__(self, channels, squeeze):
        super().__init__()
        f = squeeze
        self.conv1 = nn.Conv2d(channels, f, 1)
        self.conv_f = nn.Conv2d(f, f, 1)
        self.conv2 = nn.Conv2d(f, f, 3, 2, 0)
        self.conv_max = nn.Conv2d(f, f, 3, 1, 1)
        self.conv3 = nn.Conv2d(f, f, 3, 1, 1)
        self.conv3_ = nn.Conv2d(f, f, 3, 1, 1)
        self.conv4 = nn.Conv2d(f, channels, 1)
        self.relu = nn.ReLU(inplace=True)
        self.sigmoid = nn.Sigmoid()

    def forward(self, x):
        c1_ = self.conv1(x)
        c1 = self.conv2(c1_)
        if c1.size(2) >= 7 and c1.size(3) >= 7:
            v_max = F.max_pool2d(c1, kernel_size=7, stride=3)
        else:
            v_max = c1  # map already tiny; pooling window would not fit
        v_range = self.relu(self.conv_max(v_max))
        c3 = self.relu(self.conv3(v_range))
        c3 = self.conv3_(c3)
        c3 = F.interpolate(c3, (x.size(2), x.size(3)), mode="bilinear", align_corners=False)
        cf = self.conv_f(c1_)
        c4 = self.conv4(c3 + cf)
        return x * self.sigmoid(c4)

    def graph_layers(self, g, label=""):
        c, f = self.conv1.in_channels, self.conv1.out_channels
        g.conv(c, f, 1, label=f"{label}.conv1")
        g.conv(f, f, 3, divisor=2.0, label=f"{label}.conv2")
        g.add("pool", f, f, divisor=6.0, label=f"{label}.max_pool")
        g.conv(f, f, 3, divisor=6.0, label=f"{label}.conv_max")
        g.add("act", f, f, divisor=6.0, label=f"{label}.relu1")
        g.conv(f, f, 3, divisor=6.0, label=f"{label}.conv3")
        g.add("act", f, f, divisor=6.0, label=f"{label}.relu2")
        g.conv(f, f, 3, divisor=6.0, label=f"{label}.conv3_")
        g.add("upsample", f, f, label=f"{label}.interp")
        g.conv(f, f, 1, label=f"{label}.conv_f")
        g.add("add", f, f, label=f"{label}.merge")
        g.conv(f, c, 1, label=f"{label}.conv4")
        g.add("act", c, c, label=f"{label}.sigmoid")
        g.add("mul", c, c, label=f"{label}.gate")


class EdgeDistillBlock(nn.Module):
    def __init__(self, channels, distill, attention, deploy=False):
        super().__init__()
        self.c1_d = nn.Conv2d(channels, distill, 1)
        self.c1_r = EDBB(channels, channels, deploy=deploy)
        self.c2_d = nn.Conv2d(channels, distill, 1)
        self.c2_r = EDBB(channels, channels, deploy=deploy)
        self.c3_d = nn.Conv2d(channels, distill, 1)
        self.c3_r = EDBB(channels, channels, deploy=deploy)
        self.c4 = EDBB(channels, distill, deploy=deploy)
        self.act = nn.GELU()
        self.c5 = nn.Conv2d(4 * distill, channels, 1)
        self.esa = ESA(channels, attention)

    def forward(self, x):
        d1 = self.act(self.c1_d(x))
        r1 = self.act(self.c1_r(x) + x)
        d2 = self.act(self.c2_d(r1))
        r2 = self.act(self.c2_r(r1) + r1)
        d3 = self.act(self.c3_d(r2))
        r3 = self.act(self.c3_r(r2) + r2)
        r4 = self.act(self.c4(r3))
        out = self.c5(torch.cat([d1, d2, d3, r4], dim=1))
        return self.esa(out)

    def graph_layers(self, g, label=""):
        c = self.c1_d.in_channels
        dc = self.c1_d.out_channels
        for i, (d_conv, r_conv) in enumerate(
                [(self.c1_d, self.c1_r), (self.c2_d, self.c2_r), (self.c3_d, self.c3_r)], 1):
            g.conv(c, dc, 1, label=f"{label}.c{i}_d")
            g.add("act", dc, dc, label=f"{label}.act_d{i}")
            r_conv.graph_layers(g, label=f"{label}.c{i}_r")
            g.add("add", c, c, label=f"{label}.res{i}")
            g.add("act", c, c, label=f"{label}.act_r{i}")
        self.c4.graph_layers(g, label=f"{label}.c4")
        g.add("act", dc, dc, label=f"{label}.act_r4")
        g.conv(4 * dc, c, 1, label=f"{label}.c5")
        self.esa.graph_layers(g, label=f"{label}.esa")


class EFDNet(nn.Module):
    def __init__(self, spec: ModelSpec, deploy=False):
        super().__init__()
        self.spec = spec
        self.deploy = deploy
        c = spec.channels
        distill = spec.variant_params.get("distill", EFDN_DISTILL)
        attention = spec.variant_params.get("attention", EFDN_ATTENTION)
        self.fea_conv = nn.Conv2d(3, c, 3, 1, 1)
        self.blocks = nn.ModuleList(
            [EdgeDistillBlock(c, distill, attention, deploy) for _ in range(spec.blocks)])
        self.fuse = nn.Conv2d(spec.blocks * c, c, 1)
        self.act = nn.GELU()
        self.lr_conv = EDBB(c, c, deploy=deploy)
        self.upsampler = nn.Sequential(
            nn.Conv2d(c, 3 * spec.scale**2, 3, 1, 1),
            nn.PixelShuffle(spec.scale),
        )

    def forward(self, x):
        fea = self.fea_conv(x)
        outs = []
        h = fea
        for block in self.blocks:
            h = block(h)
            outs.append(h)
        out = self.act(self.fuse(torch.cat(outs, dim=1)))
        out = self.lr_conv(out) + fea
        return self.upsampler(out)

    def reparameterize(self) -> "EFDNet":
        """Fuse every EDBB, returning the deployment-form network."""
        if self.deploy:
            return self
        fused = EFDNet(self.spec, deploy=True)
        state = {}
        for name, module in self.named_modules():
            if isinstance(module, EDBB):
                conv = module.reparameterize()
                state[f"{name}.fused.weight"] = conv.weight.detach()
                state[f"{name}.fused.bias"] = conv.bias.detach()
        for name, tensor in self.state_dict().items():
            if name not in state and name in fused.state_dict():
                state[name] = tensor
        fused.load_state_dict(state)
        return fused

    def graph(self) -> ModelGraph:
        g = ModelGraph(self.spec.name, self.spec.scale)
        c = self.spec.channels
        g.conv(3, c, 3, label="fea_conv")
        for i, block in enumerate(self.blocks):
            block.graph_layers(g, label=f"block{i}")
        g.conv(self.spec.blocks * c, c, 1, label="fuse")
        g.add("act", c, c, label="fuse_act")
        self.lr_conv.graph_layers(g, label="lr_conv")
        g.add("add", c, c, label="trunk_res")
        g.conv(c, 3 * self.spec.scale**2, 3, label="up_conv")
        g.add("pixel_shuffle", 3 * self.spec.scale**2, 3, divisor=1.0 / self.spec.scale,
              label="shuffle")
        return g


def default_efdn_spec() -> ModelSpec:
    return ModelSpec("efdn", scale=4, channels=EFDN_CHANNELS, blocks=4,
                     variant_params={"distill": EFDN_DISTILL, "attention": EFDN_ATTENTION})


def build_efdn(spec: ModelSpec | None = None, seed: int = 0, fused: bool = False) -> EFDNet:
    """EFDN in its multi-branch training form; fuse with .reparameterize().

    Requesting `fused=True` directly is a state error: deployment weights only
    exist after re-parameterizing a trained multi-branch model (or loading a
    checkpoint whose manifest says fused=true).
    """
    if fused:
        raise StateError("fused EFDN requires re-parameterization: build the training "
                         "form and call .reparameterize(), or load a fused checkpoint")
    spec = spec or default_efdn_spec()
    model = EFDNet(spec, deploy=False)
    seeded_init(model, seed, scale=0.1)
    return model
