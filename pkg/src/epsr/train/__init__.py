"""Multi-stage perceptual training: losses, EMA, discriminator, stage runner."""

from .adapters import (  # noqa: F401
    IdentityAutoencoder, LossAdapters, RandomFeatureExtractor, RandomLinearAutoencoder,
    ci_adapters,
)
from .discriminator import UNetDiscriminator, build_unet_discriminator  # noqa: F401
from .ema import EMAState, ema_update  # noqa: F401
from .losses import (  # noqa: F401
    cosine_lr, loss_aesop, loss_fft_l1, loss_gan, loss_l1, loss_ldl, loss_mse,
    loss_perceptual,
)
from .stages import (  # noqa: F401
    KNOWN_LOSSES, RECIPES, PairSampler, StageConfig, StageResult, desk_scale,
    ipiu_stages, load_stage_config, mialgo_stages, run_recipe, run_stage,
    stage_from_dict, stage_to_dict, vpeg_stages,
)
