"""The architecture zoo: one builder per benchmarked network."""

from __future__ import annotations

from ..errors import ConfigurationError
from .common import ModelSpec, seeded_init
from .efdn import EFDNet, build_efdn, default_efdn_spec
from .rrdb import RRDBNet, build_rrdb_baseline, build_tiny_esrgan
from .safmn import SAFMNet, build_safmn_l

MODEL_BUILDERS = {
    "safmn_l": build_safmn_l,
    "tiny_esrgan": build_tiny_esrgan,
    "efdn": build_efdn,
    "realesrgan_baseline": build_rrdb_baseline,
}


def build_model(name: str, spec: ModelSpec | None = None, seed: int = 0, **kwargs):
    try:
        builder = MODEL_BUILDERS[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown model {name!r}; registered: {', '.join(sorted(MODEL_BUILDERS))}") from None
    return builder(spec, seed=seed, **kwargs)


__all__ = [
    "MODEL_BUILDERS", "ModelSpec", "build_model", "build_safmn_l", "build_tiny_esrgan",
    "build_efdn", "build_rrdb_baseline", "default_efdn_spec", "seeded_init",
    "SAFMNet", "RRDBNet", "EFDNet",
]
