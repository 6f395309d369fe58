"""Exponential moving average of model weights, kept for evaluation checkpoints."""

from __future__ import annotations

import torch

from ..errors import ConfigurationError, ShapeError


class EMAState:
    """Shadow copy theta_ema with theta_ema <- decay*theta_ema + (1-decay)*theta."""

    def __init__(self, shadow: dict, decay: float):
        if not 0.0 <= decay <= 1.0:
            raise ConfigurationError(f"ema decay must be in [0, 1], got {decay}")
        self.shadow = shadow
        self.decay = decay

    @classmethod
    def from_model(cls, model, decay: float = 0.999) -> "EMAState":
        shadow = {name: p.detach().clone() for name, p in model.named_parameters()}
        return cls(shadow, decay)

    def state_dict(self) -> dict:
        return dict(self.shadow)

    def copy_to(self, model):
        with torch.no_grad():
            for name, p in model.named_parameters():
                p.copy_(self.shadow[name])


def ema_update(state: EMAState, params) -> EMAState:
    """One EMA step over a model's named parameters (or a name->tensor map)."""
    named = params.named_parameters() if hasattr(params, "named_parameters") \
        else params.items()
    with torch.no_grad():
        for name, p in named:
            shadow = state.shadow[name]
            if shadow.shape != p.shape:
                raise ShapeError(f"ema shadow {name} has shape {tuple(shadow.shape)}, "
                                 f"parameter has {tuple(p.shape)}")
            shadow.mul_(state.decay).add_(p.detach(), alpha=1.0 - state.decay)
    return state
