"""Whole-image and tiled x4 inference.

Tiling exists because UHD inputs can exhaust memory in one shot. Tiles are
taken with an overlap margin and only each tile's center region is written
back, so fully convolutional models reproduce whole-image output up to
border effects well below 1e-3. Networks with global pooling (SAFM's
multi-scale pools) are only approximately tile-invariant; the margin keeps
the seams visually irrelevant there too.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch

from .errors import ResourceError, ShapeError
from .images import to_plane, to_tensor, validate_plane


@dataclass
class TilingPolicy:
    enabled: bool = False
    tile_size: int = 256
    overlap: int = 16

    def __post_init__(self):
        if self.enabled and self.tile_size < self.overlap:
            raise ShapeError(f"tile size {self.tile_size} smaller than overlap {self.overlap}")


def infer(model, lr: np.ndarray, tiling: TilingPolicy | None = None) -> np.ndarray:
    """Run a x4 model over one LR image, optionally tile by tile."""
    lr = validate_plane(lr)
    tiling = tiling or TilingPolicy()
    model.eval()
    try:
        with torch.no_grad():
            if not tiling.enabled:
                return to_plane(model(to_tensor(lr)))
            return _tiled(model, lr, tiling)
    except (torch.cuda.OutOfMemoryError, MemoryError) as exc:
        suggestion = max(tiling.tile_size // 2, 32) if tiling.enabled else 256
        raise ResourceError(f"out of memory during inference: {exc}; retry with tile size "
                            f"{suggestion}", suggested_tile=suggestion) from exc


def _tiled(model, lr: np.ndarray, tiling: TilingPolicy) -> np.ndarray:
    scale = 4
    height, width = lr.shape[:2]
    tile, overlap = tiling.tile_size, tiling.overlap
    out = np.zeros((height * scale, width * scale, 3), dtype=np.float32)
    step = tile - overlap
    if step <= 0:
        raise ShapeError("tile size must exceed overlap")
    for top in range(0, height, step):
        for left in range(0, width, step):
            # Expand the tile by the margin on every side that has neighbors.
            y0 = max(top - overlap // 2, 0)
            x0 = max(left - overlap // 2, 0)
            y1 = min(top + tile + overlap // 2, height)
            x1 = min(left + tile + overlap // 2, width)
            patch = to_tensor(lr[y0:y1, x0:x1])
            sr = model(patch)
            sr = to_plane(sr)
            # Center region this tile is responsible for.
            cy0, cx0 = top, left
            cy1, cx1 = min(top + tile, height), min(left + tile, width)
            sy0, sx0 = (cy0 - y0) * scale, (cx0 - x0) * scale
            out[cy0 * scale:cy1 * scale, cx0 * scale:cx1 * scale] = \
                sr[sy0:sy0 + (cy1 - cy0) * scale, sx0:sx0 + (cx1 - cx0) * scale]
    return np.clip(out, 0.0, 1.0)
