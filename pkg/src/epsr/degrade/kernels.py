"""Blur kernel synthesis for the second-order degradation pipeline.

Five kernel families: isotropic/anisotropic Gaussian, generalized Gaussian
(exponentiated quadratic form), plateau (reciprocal form), and a circular
sinc low-pass. All except sinc are nonnegative; every kernel is normalized
to unit sum. Sampling and construction are split so the pipeline can record
the exact parameter trace of every draw.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

from ..errors import ConfigurationError

KERNEL_KINDS = ("iso_gaussian", "aniso_gaussian", "generalized_gaussian", "plateau", "sinc")


@dataclass
class BlurSpec:
    """Distribution a stage draws its blur kernel from.

    kind may name one family or "random" (weighted by kind_probs over
    KERNEL_KINDS). kernel_size None samples an odd size in [7, 21].
    rotation None samples uniform in [-pi, pi].
    """

    kind: str = "random"
    prob: float = 1.0
    kernel_size: int | None = None
    sigma_range: tuple = (0.2, 3.0)
    beta_gauss_range: tuple = (0.5, 4.0)
    beta_plateau_range: tuple = (1.0, 2.0)
    cutoff_range: tuple = (np.pi / 3, np.pi)
    rotation: float | None = None
    kind_probs: tuple = (0.40, 0.25, 0.12, 0.13, 0.10)

    def __post_init__(self):
        if self.kind != "random" and self.kind not in KERNEL_KINDS:
            raise ConfigurationError(f"unknown blur kind {self.kind!r}")
        if self.kernel_size is not None and self.kernel_size % 2 != 1:
            raise ConfigurationError(f"blur kernel size must be odd, got {self.kernel_size}")
        if not 0.0 <= self.prob <= 1.0:
            raise ConfigurationError("blur prob must be in [0, 1]")


def _mesh_grid(size: int) -> np.ndarray:
    ax = np.arange(-(size // 2), size // 2 + 1, dtype=np.float64)
    xx, yy = np.meshgrid(ax, ax)
    return np.stack([xx, yy], axis=-1)


def _quadratic_form(size: int, sig_x: float, sig_y: float, theta: float) -> np.ndarray:
    d = np.array([[sig_x**2, 0.0], [0.0, sig_y**2]])
    u = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
    inv = np.linalg.inv(u @ d @ u.T)
    grid = _mesh_grid(size)
    return np.sum((grid @ inv) * grid, axis=-1)


def gaussian_kernel(size, sig_x, sig_y=None, theta=0.0) -> np.ndarray:
    sig_y = sig_x if sig_y is None else sig_y
    kernel = np.exp(-0.5 * _quadratic_form(size, sig_x, sig_y, theta))
    return kernel / kernel.sum()


def generalized_gaussian_kernel(size, sig_x, sig_y=None, theta=0.0, beta=1.0) -> np.ndarray:
    """exp(-0.5 * q^beta); beta=1 recovers the Gaussian."""
    sig_y = sig_x if sig_y is None else sig_y
    kernel = np.exp(-0.5 * np.power(_quadratic_form(size, sig_x, sig_y, theta), beta))
    return kernel / kernel.sum()


def plateau_kernel(size, sig_x, sig_y=None, theta=0.0, beta=1.0) -> np.ndarray:
    """1 / (q^beta + 1): flat top, heavy shoulders."""
    sig_y = sig_x if sig_y is None else sig_y
    kernel = np.reciprocal(np.power(_quadratic_form(size, sig_x, sig_y, theta), beta) + 1.0)
    return kernel / kernel.sum()


def sinc_kernel(size: int, cutoff: float) -> np.ndarray:
    """Circular low-pass (jinc) kernel; cutoff in radians, pi is near-allpass.

    Signed by construction (ringing side lobes) but still unit-sum.
    """
    with np.errstate(invalid="ignore", divide="ignore"):
        kernel = np.fromfunction(
            lambda x, y: cutoff * special.j1(
                cutoff * np.sqrt((x - (size - 1) / 2)**2 + (y - (size - 1) / 2)**2))
            / (2 * np.pi * np.sqrt((x - (size - 1) / 2)**2 + (y - (size - 1) / 2)**2)),
            [size, size])
    kernel[(size - 1) // 2, (size - 1) // 2] = cutoff**2 / (4 * np.pi)
    return kernel / kernel.sum()


def sample_blur_params(spec: BlurSpec, rng: np.random.Generator) -> dict:
    """Draw one concrete kernel parameterization from a BlurSpec."""
    kind = spec.kind
    if kind == "random":
        kind = str(rng.choice(KERNEL_KINDS, p=np.asarray(spec.kind_probs) / sum(spec.kind_probs)))
    size = spec.kernel_size
    if size is None:
        size = int(rng.integers(3, 11)) * 2 + 1  # odd in [7, 21]
    params = {"kind": kind, "kernel_size": size}
    if kind == "sinc":
        lo, hi = spec.cutoff_range
        if size < 13:
            lo = max(lo, np.pi / 3)  # small kernels ring badly below pi/3
        params["cutoff"] = float(rng.uniform(lo, hi))
        return params
    sig_x = float(rng.uniform(*spec.sigma_range))
    params["sigma_x"] = sig_x
    if kind == "iso_gaussian":
        return params
    params["sigma_y"] = float(rng.uniform(spec.sigma_range[0], sig_x))
    params["rotation"] = float(rng.uniform(-np.pi, np.pi)) if spec.rotation is None \
        else float(spec.rotation)
    if kind == "generalized_gaussian":
        params["beta"] = float(rng.uniform(*spec.beta_gauss_range))
    elif kind == "plateau":
        params["beta"] = float(rng.uniform(*spec.beta_plateau_range))
    return params


def kernel_from_params(params: dict) -> np.ndarray:
    kind = params["kind"]
    size = params["kernel_size"]
    if size % 2 != 1:
        raise ConfigurationError(f"blur kernel size must be odd, got {size}")
    if kind == "sinc":
        return sinc_kernel(size, params["cutoff"])
    if kind == "iso_gaussian":
        return gaussian_kernel(size, params["sigma_x"])
    if kind == "aniso_gaussian":
        return gaussian_kernel(size, params["sigma_x"], params["sigma_y"], params["rotation"])
    if kind == "generalized_gaussian":
        return generalized_gaussian_kernel(size, params["sigma_x"], params["sigma_y"],
                                           params["rotation"], params["beta"])
    if kind == "plateau":
        return plateau_kernel(size, params["sigma_x"], params["sigma_y"],
                              params["rotation"], params["beta"])
    raise ConfigurationError(f"unknown blur kind {kind!r}")


def make_blur_kernel(spec: BlurSpec, rng: np.random.Generator) -> np.ndarray:
    """Sample one kernel; unit-sum within 1e-6 by construction."""
    return kernel_from_params(sample_blur_params(spec, rng))
