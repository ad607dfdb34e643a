"""Image-quality metrics over RSS magnitude images: PSNR, SSIM, NMSE."""

from __future__ import annotations

import dataclasses
import math

import numpy as np
from scipy.signal import convolve2d

from .errors import DegenerateReference, ShapeError, WindowTooLarge

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03


@dataclasses.dataclass(frozen=True)
class MetricsReport:
    psnr_db: float  # +inf when images are identical
    ssim: float
    nmse: float


def _pixels(img) -> np.ndarray:
    return np.asarray(getattr(img, "pixels", img), dtype=np.float64)


def _check_pair(ref, test):
    r = _pixels(ref)
    t = _pixels(test)
    if r.shape != t.shape:
        raise ShapeError(f"shape mismatch: {r.shape} vs {t.shape}")
    return r, t


def psnr(ref, test) -> float:
    """20*log10(peak/rmse) with peak = max of the reference image."""
    r, t = _check_pair(ref, test)
    peak = float(r.max())
    if not np.any(r):
        raise DegenerateReference("all-zero reference image")
    mse = float(np.mean((r - t) ** 2))
    if mse == 0.0:
        return math.inf
    return 20.0 * math.log10(peak / math.sqrt(mse))


def nmse(ref, test) -> float:
    """||ref - test||^2 / ||ref||^2 (Frobenius)."""
    r, t = _check_pair(ref, test)
    denom = float(np.sum(r**2))
    if denom == 0.0:
        raise DegenerateReference("all-zero reference image")
    return float(np.sum((r - t) ** 2)) / denom


def _gaussian_kernel(size: int, sigma: float) -> np.ndarray:
    ax = np.arange(size, dtype=np.float64) - (size - 1) / 2.0
    g = np.exp(-(ax**2) / (2.0 * sigma**2))
    k = np.outer(g, g)
    return k / k.sum()


def ssim(ref, test) -> float:
    """Mean local SSIM, 11x11 Gaussian window (sigma 1.5), K1=0.01, K2=0.03.

    Dynamic range is max(ref) - min(ref); a constant reference falls back to
    L = 1 so identical inputs still score 1.
    """
    r, t = _check_pair(ref, test)
    if min(r.shape) < SSIM_WINDOW:
        raise WindowTooLarge(f"image smaller than {SSIM_WINDOW}x{SSIM_WINDOW} window")
    L = float(r.max() - r.min())
    if L == 0.0:
        L = 1.0
    c1 = (SSIM_K1 * L) ** 2
    c2 = (SSIM_K2 * L) ** 2
    w = _gaussian_kernel(SSIM_WINDOW, SSIM_SIGMA)

    def f(img):
        return convolve2d(img, w, mode="valid")

    mu1 = f(r)
    mu2 = f(t)
    s1 = f(r * r) - mu1**2
    s2 = f(t * t) - mu2**2
    s12 = f(r * t) - mu1 * mu2
    num = (2 * mu1 * mu2 + c1) * (2 * s12 + c2)
    den = (mu1**2 + mu2**2 + c1) * (s1 + s2 + c2)
    val = float(np.mean(num / den))
    return min(1.0, max(-1.0, val))


def report(ref, test) -> MetricsReport:
    return MetricsReport(psnr_db=psnr(ref, test), ssim=ssim(ref, test), nmse=nmse(ref, test))
