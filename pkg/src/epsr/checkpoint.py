"""Checkpoint archives: one .npz per model holding named tensors plus a manifest.

The manifest is a JSON record stored inside the archive under the reserved
key "__manifest__" with keys: name, scale, channels, blocks, growth, fused,
seed. Tensors round-trip bit-exactly (float32 in, float32 out).
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import torch

from .archs import ModelSpec
from .errors import ConfigurationError

MANIFEST_KEY = "__manifest__"


def manifest_from_spec(spec: ModelSpec, seed: int, fused: bool = False) -> dict:
    manifest = {
        "name": spec.name,
        "scale": spec.scale,
        "channels": spec.channels,
        "blocks": spec.blocks,
        "growth": spec.growth,
        "fused": fused,
        "seed": seed,
    }
    if spec.variant_params:
        manifest["variant_params"] = dict(spec.variant_params)
    return manifest


def save_checkpoint(path, model, manifest: dict, extra_state: dict | None = None):
    """Write model weights (and optional extra tensor groups) into one archive."""
    arrays = {}
    for key, tensor in model.state_dict().items():
        arrays[f"model/{key}"] = tensor.detach().cpu().numpy()
    for group, state in (extra_state or {}).items():
        for key, tensor in state.items():
            arrays[f"{group}/{key}"] = tensor.detach().cpu().numpy()
    arrays[MANIFEST_KEY] = np.frombuffer(json.dumps(manifest).encode(), dtype=np.uint8)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        np.savez(fh, **arrays)


def load_checkpoint(path):
    """Read back (manifest, {group: state_dict}) from an archive."""
    with np.load(path) as npz:
        manifest = json.loads(bytes(npz[MANIFEST_KEY]).decode())
        groups: dict[str, dict[str, torch.Tensor]] = {}
        for key in npz.files:
            if key == MANIFEST_KEY:
                continue
            group, _, name = key.partition("/")
            groups.setdefault(group, {})[name] = torch.from_numpy(npz[key].copy())
    return manifest, groups


def load_model(path):
    """Rebuild the model a checkpoint describes and load its weights."""
    from .archs import build_model
    from .archs.efdn import EFDNet

    manifest, groups = load_checkpoint(path)
    spec = ModelSpec(
        name=manifest["name"],
        scale=manifest["scale"],
        channels=manifest["channels"],
        blocks=manifest["blocks"],
        growth=manifest["growth"],
        variant_params=manifest.get("variant_params", {}),
    )
    if manifest["name"] == "efdn":
        # EFDNet falls back to the challenge distill/attention widths when
        # variant_params are absent from an older manifest.
        model = EFDNet(spec, deploy=bool(manifest["fused"]))
    else:
        if manifest.get("fused"):
            raise ConfigurationError(f"model {manifest['name']!r} has no fused form")
        model = build_model(manifest["name"], spec, seed=manifest.get("seed", 0))
    model.load_state_dict(groups["model"])
    model.eval()
    return model, manifest
