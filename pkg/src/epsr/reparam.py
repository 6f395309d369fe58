"""Structural re-parameterization: fusing multi-branch training blocks into one 3x3 conv.

All merges are computed in float64 and cast back to the input dtype, which
keeps forward equivalence comfortably under 1e-5 in float32. The sequential
(1x1 then 3x3) merge is only exact on interior pixels under plain zero
padding; the training-time branch therefore pads its intermediate with the
1x1 bias value (the standard diverse-branch remedy), making fused and
unfused forwards agree on the whole image.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
import torch.nn as nn
import torch.nn.functional as F

from .errors import ConfigurationError, ShapeError

FIXED_FILTERS = {
    "sobel_x": torch.tensor([[1.0, 0.0, -1.0], [2.0, 0.0, -2.0], [1.0, 0.0, -1.0]]),
    "sobel_y": torch.tensor([[1.0, 2.0, 1.0], [0.0, 0.0, 0.0], [-1.0, -2.0, -1.0]]),
    "laplacian": torch.tensor([[0.0, 1.0, 0.0], [1.0, -4.0, 1.0], [0.0, 1.0, 0.0]]),
}


@dataclass
class ConvParams:
    """Weights of a plain convolution: kernel (out, in, kh, kw) and bias (out,)."""

    kernel: torch.Tensor
    bias: torch.Tensor

    @property
    def out_channels(self) -> int:
        return self.kernel.shape[0]

    @property
    def in_channels(self) -> int:
        return self.kernel.shape[1]

    def clone(self) -> "ConvParams":
        return ConvParams(self.kernel.clone(), self.bias.clone())


@dataclass
class NormStats:
    """Per-channel affine normalization statistics (batch-norm style)."""

    gamma: torch.Tensor
    beta: torch.Tensor
    running_mean: torch.Tensor
    running_var: torch.Tensor
    eps: float = 1e-5

    @classmethod
    def from_module(cls, bn: nn.BatchNorm2d) -> "NormStats":
        return cls(bn.weight.detach(), bn.bias.detach(),
                   bn.running_mean.detach(), bn.running_var.detach(), bn.eps)


@dataclass
class EdgeBranch:
    """A fixed 3x3 edge filter with a learnable per-channel scale and bias."""

    filter_kind: str
    per_channel_scale: torch.Tensor
    bias: torch.Tensor


def fuse_conv_norm(conv: ConvParams, norm: NormStats) -> ConvParams:
    """Fold a per-channel normalization into the preceding convolution."""
    if norm.gamma.shape[0] != conv.out_channels:
        raise ShapeError(
            f"norm has {norm.gamma.shape[0]} channels, conv produces {conv.out_channels}")
    dtype = conv.kernel.dtype
    k = conv.kernel.double()
    b = conv.bias.double()
    scale = norm.gamma.double() / torch.sqrt(norm.running_var.double() + norm.eps)
    kernel = k * scale.reshape(-1, 1, 1, 1)
    bias = norm.beta.double() + (b - norm.running_mean.double()) * scale
    return ConvParams(kernel.to(dtype), bias.to(dtype))


def pad_to_3x3(kernel: torch.Tensor) -> torch.Tensor:
    """Zero-pad a (out, in, kh, kw) kernel with kh, kw <= 3 to 3x3."""
    kh, kw = kernel.shape[-2:]
    if kh > 3 or kw > 3 or kh % 2 == 0 or kw % 2 == 0:
        raise ShapeError(f"cannot center a {kh}x{kw} kernel inside 3x3")
    return F.pad(kernel, [(3 - kw) // 2] * 2 + [(3 - kh) // 2] * 2)


def merge_parallel(branches: list[ConvParams]) -> ConvParams:
    """Sum parallel branches into one 3x3 convolution."""
    if not branches:
        raise ShapeError("no branches to merge")
    out_c, in_c = branches[0].out_channels, branches[0].in_channels
    for b in branches:
        if (b.out_channels, b.in_channels) != (out_c, in_c):
            raise ShapeError("parallel branches disagree on channel counts")
    dtype = branches[0].kernel.dtype
    kernel = sum(pad_to_3x3(b.kernel.double()) for b in branches)
    bias = sum(b.bias.double() for b in branches)
    return ConvParams(kernel.to(dtype), bias.to(dtype))


def merge_sequential_1x1_3x3(first: ConvParams, second: ConvParams) -> ConvParams:
    """Compose a 1x1 conv followed by a 3x3 conv into a single 3x3 conv.

    Equivalence over the whole image assumes the unfused branch pads its
    intermediate with `first.bias` (see module docstring).
    """
    if first.kernel.shape[-2:] != (1, 1):
        raise ShapeError("first conv must be 1x1")
    if second.kernel.shape[-2:] != (3, 3):
        raise ShapeError("second conv must be 3x3")
    if first.out_channels != second.in_channels:
        raise ShapeError(
            f"1x1 produces {first.out_channels} channels, 3x3 consumes {second.in_channels}")
    dtype = first.kernel.dtype
    k1 = first.kernel.double()
    k2 = second.kernel.double()
    # Contract the 1x1 mixing matrix into the 3x3 kernel's input dimension.
    kernel = F.conv2d(k2, k1.permute(1, 0, 2, 3))
    bias = (k2 * first.bias.double().reshape(1, -1, 1, 1)).sum(dim=(1, 2, 3)) + second.bias.double()
    return ConvParams(kernel.to(dtype), bias.to(dtype))


def edge_to_conv(edge: EdgeBranch) -> ConvParams:
    """Express a scaled fixed edge filter as a full (out, in, 3, 3) convolution."""
    if edge.filter_kind not in FIXED_FILTERS:
        raise ConfigurationError(f"unknown edge filter kind {edge.filter_kind!r}")
    channels = edge.per_channel_scale.shape[0]
    dtype = edge.per_channel_scale.dtype
    base = FIXED_FILTERS[edge.filter_kind].double()
    kernel = torch.zeros(channels, channels, 3, 3, dtype=torch.float64)
    idx = torch.arange(channels)
    kernel[idx, idx] = edge.per_channel_scale.double().reshape(-1, 1, 1) * base
    return ConvParams(kernel.to(dtype), edge.bias.clone())


def identity_conv(channels: int, dtype=torch.float32) -> ConvParams:
    """The 3x3 convolution that maps every input to itself (center-one kernel)."""
    kernel = torch.zeros(channels, channels, 3, 3, dtype=dtype)
    idx = torch.arange(channels)
    kernel[idx, idx, 1, 1] = 1.0
    return ConvParams(kernel, torch.zeros(channels, dtype=dtype))


SQUARE_ONLY_BRANCHES = ("sobel_x", "sobel_y", "laplacian", "identity")
DEFAULT_BRANCHES = ("conv3x3_norm", "conv1x1", "conv1x1_3x3") + SQUARE_ONLY_BRANCHES


class EDBB(nn.Module):
    """Edge-enhanced diverse branch block: a multi-branch training-time 3x3 conv.

    Branches (configurable): a 3x3 conv with normalization, a 1x1 conv, a
    1x1->3x3 sequential pair, fixed Sobel-x/Sobel-y/Laplacian filters with
    learnable per-channel scales, and an identity shortcut. All branches sum;
    `reparameterize` collapses the sum into one plain 3x3 convolution.
    Edge and identity branches require in_channels == out_channels.
    """

    def __init__(self, in_channels, out_channels, branches=DEFAULT_BRANCHES, deploy=False):
        super().__init__()
        if in_channels != out_channels:
            branches = tuple(b for b in branches if b not in SQUARE_ONLY_BRANCHES)
        self.in_channels = in_channels
        self.out_channels = out_channels
        self.branch_names = tuple(branches)
        self.deploy = deploy
        if deploy:
            self.fused = nn.Conv2d(in_channels, out_channels, 3, 1, 1)
            return
        if "conv3x3_norm" in branches:
            self.conv3 = nn.Conv2d(in_channels, out_channels, 3, 1, 1, bias=False)
            self.norm = nn.BatchNorm2d(out_channels)
        if "conv1x1" in branches:
            self.conv1 = nn.Conv2d(in_channels, out_channels, 1, 1, 0)
        if "conv1x1_3x3" in branches:
            self.seq_point = nn.Conv2d(in_channels, in_channels, 1, 1, 0)
            self.seq_spatial = nn.Conv2d(in_channels, out_channels, 3, 1, 0)
        for kind in ("sobel_x", "sobel_y", "laplacian"):
            if kind in branches:
                self.register_buffer(f"{kind}_filter", FIXED_FILTERS[kind].clone())
                setattr(self, f"{kind}_scale", nn.Parameter(torch.zeros(out_channels)))
                setattr(self, f"{kind}_bias", nn.Parameter(torch.zeros(out_channels)))

    def init_scales_(self, generator):
        """Give the fixed-filter branches small random gains (zeros would be dead)."""
        if self.deploy:
            return
        with torch.no_grad():
            for kind in ("sobel_x", "sobel_y", "laplacian"):
                if kind in self.branch_names:
                    getattr(self, f"{kind}_scale").normal_(0.0, 0.05, generator=generator)

    def _edge_forward(self, x, kind):
        base = getattr(self, f"{kind}_filter")
        scale = getattr(self, f"{kind}_scale")
        bias = getattr(self, f"{kind}_bias")
        kernel = scale.reshape(-1, 1, 1, 1) * base.reshape(1, 1, 3, 3)
        return F.conv2d(x, kernel, bias, padding=1, groups=self.out_channels)

    def _seq_forward(self, x):
        y = self.seq_point(x)
        y = F.pad(y, [1, 1, 1, 1])
        ring = self.seq_point.bias.reshape(1, -1, 1, 1)
        y[:, :, :1, :] = ring
        y[:, :, -1:, :] = ring
        y[:, :, :, :1] = ring
        y[:, :, :, -1:] = ring
        return self.seq_spatial(y)

    def forward(self, x):
        if self.deploy:
            return self.fused(x)
        out = 0
        if "conv3x3_norm" in self.branch_names:
            out = out + self.norm(self.conv3(x))
        if "conv1x1" in self.branch_names:
            out = out + self.conv1(x)
        if "conv1x1_3x3" in self.branch_names:
            out = out + self._seq_forward(x)
        for kind in ("sobel_x", "sobel_y", "laplacian"):
            if kind in self.branch_names:
                out = out + self._edge_forward(x, kind)
        if "identity" in self.branch_names:
            out = out + x
        return out

    def branch_params(self) -> list[ConvParams]:
        params = []
        if "conv3x3_norm" in self.branch_names:
            conv = ConvParams(self.conv3.weight.detach(),
                              torch.zeros(self.out_channels, dtype=self.conv3.weight.dtype))
            params.append(fuse_conv_norm(conv, NormStats.from_module(self.norm)))
        if "conv1x1" in self.branch_names:
            params.append(ConvParams(self.conv1.weight.detach(), self.conv1.bias.detach()))
        if "conv1x1_3x3" in self.branch_names:
            params.append(merge_sequential_1x1_3x3(
                ConvParams(self.seq_point.weight.detach(), self.seq_point.bias.detach()),
                ConvParams(self.seq_spatial.weight.detach(), self.seq_spatial.bias.detach())))
        for kind in ("sobel_x", "sobel_y", "laplacian"):
            if kind in self.branch_names:
                params.append(edge_to_conv(EdgeBranch(
                    kind,
                    getattr(self, f"{kind}_scale").detach(),
                    getattr(self, f"{kind}_bias").detach())))
        if "identity" in self.branch_names:
            params.append(identity_conv(self.out_channels, dtype=self.conv1.weight.dtype
                                        if hasattr(self, "conv1") else torch.float32))
        return params

    def reparameterize(self) -> nn.Conv2d:
        """Collapse all branches into a single plain 3x3 convolution."""
        if self.deploy:
            return self.fused
        fused = reparameterize_edbb(self)
        conv = nn.Conv2d(self.in_channels, self.out_channels, 3, 1, 1)
        conv.weight.data = fused.kernel
        conv.bias.data = fused.bias
        return conv

    def graph_layers(self, graph, divisor=1.0, label=""):
        c_in, c_out = self.in_channels, self.out_channels
        if self.deploy:
            graph.conv(c_in, c_out, 3, divisor=divisor, label=label)
            return
        if "conv3x3_norm" in self.branch_names:
            graph.conv(c_in, c_out, 3, divisor=divisor, bias=False, label=f"{label}.conv3")
            graph.add("norm", c_out, c_out, divisor=divisor, label=f"{label}.norm")
        if "conv1x1" in self.branch_names:
            graph.conv(c_in, c_out, 1, divisor=divisor, label=f"{label}.conv1")
        if "conv1x1_3x3" in self.branch_names:
            graph.conv(c_in, c_in, 1, divisor=divisor, label=f"{label}.seq_point")
            graph.conv(c_in, c_out, 3, divisor=divisor, label=f"{label}.seq_spatial")
        for kind in ("sobel_x", "sobel_y", "laplacian"):
            if kind in self.branch_names:
                graph.add("edge_conv", c_out, c_out, 3, divisor=divisor, label=f"{label}.{kind}")
        graph.add("add", c_out, c_out, divisor=divisor, label=f"{label}.branch_sum")


def reparameterize_edbb(block: EDBB) -> ConvParams:
    """Fuse an EDBB (or an already-fused one, idempotently) into single-conv weights."""
    if block.deploy:
        return ConvParams(block.fused.weight.detach().clone(), block.fused.bias.detach().clone())
    return merge_parallel(block.branch_params())
