"""ImagePlane helpers: the toolkit's pixel currency is float32 HxWx3 in [0,1].

Files are read with OpenCV (any decodable format) and written as 8-bit PNG;
conversion to/from torch uses NCHW layout. Values are clipped and checked
for NaN/Inf at module boundaries.
"""

from __future__ import annotations

from pathlib import Path

import cv2
import numpy as np
import torch

from .errors import ShapeError

IMAGE_EXTENSIONS = (".png", ".jpg", ".jpeg", ".bmp", ".ppm", ".webp", ".tif", ".tiff")


def validate_plane(img: np.ndarray) -> np.ndarray:
    if img.ndim != 3 or img.shape[2] != 3:
        raise ShapeError(f"expected HxWx3 image, got shape {tuple(img.shape)}")
    if not np.isfinite(img).all():
        raise ShapeError("image contains NaN or Inf values")
    return np.clip(img.astype(np.float32, copy=False), 0.0, 1.0)


def load_image(path) -> np.ndarray:
    data = cv2.imread(str(path), cv2.IMREAD_COLOR)
    if data is None:
        raise IOError(f"cannot decode image {path}")
    return validate_plane(cv2.cvtColor(data, cv2.COLOR_BGR2RGB).astype(np.float32) / 255.0)


def save_image(path, img: np.ndarray):
    img = validate_plane(img)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = cv2.cvtColor((img * 255.0).round().astype(np.uint8), cv2.COLOR_RGB2BGR)
    if not cv2.imwrite(str(path), data):
        raise IOError(f"cannot write image {path}")


def list_images(directory) -> list[Path]:
    root = Path(directory)
    return sorted(p for p in root.rglob("*") if p.suffix.lower() in IMAGE_EXTENSIONS)


def to_tensor(img: np.ndarray) -> torch.Tensor:
    """HxWx3 [0,1] float -> 1x3xHxW float32 tensor."""
    return torch.from_numpy(np.ascontiguousarray(img.transpose(2, 0, 1)))[None].float()


def to_plane(tensor: torch.Tensor) -> np.ndarray:
    """1x3xHxW tensor -> HxWx3 float32 clipped to [0,1]."""
    arr = tensor.detach().squeeze(0).clamp_(0.0, 1.0).cpu().numpy().transpose(1, 2, 0)
    return np.ascontiguousarray(arr)
