"""Analytic parameter/FLOPs accounting and the challenge budget gate.

FLOPs convention (pinned by reproducing the published Real-ESRGAN figure of
9293.9416 G at 960x540 input): one multiply-accumulate counts as one FLOP,
conv cost is kh*kw*Cin*Cout*Hout*Wout / groups, biases are free, and every
elementwise layer (activation, residual add, gating multiply, normalization,
pooling, interpolation, pixel shuffle) costs one op per output element.
A 2x-MAC convention would land ~2x off the anchor, so the choice is not
cosmetic. Reported unit is GMACs = 1e9 MACs.
"""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass

from .errors import AccountingError, EpsrError
from .graph import ELEMENTWISE_KINDS, EDGE_KIND, ModelGraph

PARAM_LIMIT = 5_000_000
GMAC_LIMIT = 2000.0
OFFICIAL_INPUT_SIZE = (3, 540, 960)


def count_params(graph: ModelGraph) -> int:
    """Exact sum of weight and bias elements of every layer."""
    return graph.parameter_count


def count_flops(graph: ModelGraph, input_size=OFFICIAL_INPUT_SIZE) -> float:
    """Analytic GMACs of one forward pass at the given (C, H, W) input size."""
    _, height, width = input_size
    total = 0.0
    for layer in graph.layers:
        out_elems = layer.out_channels * (height / layer.divisor) * (width / layer.divisor)
        if layer.kind == "conv":
            total += layer.kernel_size**2 * (layer.in_channels // layer.groups) * out_elems
        elif layer.kind == EDGE_KIND:
            total += layer.kernel_size**2 * out_elems
        elif layer.kind == "norm" or layer.kind in ELEMENTWISE_KINDS:
            total += out_elems
        else:
            raise AccountingError(f"no FLOPs rule for layer kind {layer.kind!r} ({layer.label or 'unlabeled'})")
    return total / 1e9


@dataclass
class BudgetReport:
    model: str
    parameter_count: int
    gmacs: float
    input_size: tuple
    param_limit: int = PARAM_LIMIT
    gmac_limit: float = GMAC_LIMIT

    @property
    def passed(self) -> bool:
        return self.parameter_count <= self.param_limit and self.gmacs <= self.gmac_limit

    def to_record(self) -> dict:
        return {
            "model": self.model,
            "params": self.parameter_count,
            "gmacs": round(self.gmacs, 4),
            "input_size": list(self.input_size),
            "param_limit": self.param_limit,
            "gmac_limit": self.gmac_limit,
            "passed": self.passed,
            "convention": "MAC",
        }


def audit(model, input_size=OFFICIAL_INPUT_SIZE) -> BudgetReport:
    """Budget-gate a model (anything exposing .graph()) at the official input size."""
    graph = model.graph() if hasattr(model, "graph") else model
    if not isinstance(graph, ModelGraph):
        raise AccountingError(f"cannot audit {type(model).__name__}: no ModelGraph exposed")
    return BudgetReport(
        model=graph.name,
        parameter_count=count_params(graph),
        gmacs=count_flops(graph, input_size),
        input_size=tuple(input_size),
    )


def measure_runtime(model, inputs, warmup: int = 1) -> tuple[float, float]:
    """Mean and std wall-clock milliseconds per image, excluding warmup and file I/O.

    The device is synchronized before every stop-watch read so asynchronous
    kernels are fully charged to their image.
    """
    import torch

    from .images import to_tensor

    if len(inputs) == 0:
        raise EpsrError("empty input set")
    if warmup < 1:
        raise EpsrError("warmup must be >= 1")

    device = next(model.parameters()).device if hasattr(model, "parameters") else "cpu"
    tensors = [to_tensor(img).to(device) for img in inputs]

    def _sync():
        if isinstance(device, torch.device) and device.type == "cuda":
            torch.cuda.synchronize(device)

    with torch.no_grad():
        for _ in range(warmup):
            model(tensors[0])
        times_ms = []
        for x in tensors:
            _sync()
            start = time.perf_counter()
            model(x)
            _sync()
            times_ms.append((time.perf_counter() - start) * 1e3)
    mean = statistics.fmean(times_ms)
    std = statistics.stdev(times_ms) if len(times_ms) > 1 else 0.0
    return mean, std
