"""Seeded second-order degradation pipeline and ground-truth sharpening."""

from .kernels import (  # noqa: F401
    KERNEL_KINDS, BlurSpec, gaussian_kernel, generalized_gaussian_kernel,
    kernel_from_params, make_blur_kernel, plateau_kernel, sample_blur_params, sinc_kernel,
)
from .pipeline import (  # noqa: F401
    DegradationRecipe, NoiseSpec, ResizeSpec, StageSpec, degrade, load_recipe,
    recipe_from_dict, recipe_to_dict, rng_for_image, save_recipe, synthesize_pairs,
    usm_sharpen,
)
