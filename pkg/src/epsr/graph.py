"""Inspectable network descriptions used for analytic parameter/FLOPs accounting.

A ModelGraph is a flat, ordered list of layers. Each layer records the
channel counts, kernel size, grouping and the *output* resolution divisor
relative to the network input (2.0 means the layer produces maps at half
the input resolution, 0.25 means 4x upsampled). The graph is built by the
architecture code itself, mirroring the forward pass; a test pins it
against direct enumeration of the trainable tensors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

# Per-channel scale+bias on a fixed filter (edge branches): 2*out params,
# priced like a depthwise conv.
EDGE_KIND = "edge_conv"
# Zero-parameter kinds priced at one op per output element.
ELEMENTWISE_KINDS = ("act", "add", "mul", "pool", "upsample", "pixel_shuffle")


@dataclass(frozen=True)
class Layer:
    kind: str
    in_channels: int
    out_channels: int
    kernel_size: int = 0
    stride: int = 1
    divisor: float = 1.0
    groups: int = 1
    bias: bool = True
    label: str = ""

    def parameter_count(self) -> int:
        if self.kind == "conv":
            n = self.out_channels * (self.in_channels // self.groups) * self.kernel_size**2
            if self.bias:
                n += self.out_channels
            return n
        if self.kind == "norm":
            return 2 * self.out_channels
        if self.kind == EDGE_KIND:
            return 2 * self.out_channels
        return 0


@dataclass
class ModelGraph:
    name: str
    scale: int = 4
    layers: list[Layer] = field(default_factory=list)

    def add(self, kind, in_channels, out_channels, kernel_size=0, stride=1,
            divisor=1.0, groups=1, bias=True, label=""):
        self.layers.append(Layer(kind, in_channels, out_channels, kernel_size,
                                 stride, divisor, groups, bias, label))

    def conv(self, in_channels, out_channels, kernel_size=3, divisor=1.0,
             groups=1, bias=True, label=""):
        self.add("conv", in_channels, out_channels, kernel_size,
                 divisor=divisor, groups=groups, bias=bias, label=label)

    @property
    def parameter_count(self) -> int:
        return sum(layer.parameter_count() for layer in self.layers)
