"""Global power-of-two input conditioning and its exact inverse.

One gain 2^k is chosen for the whole coil stack: k1 places the peak
magnitude at the target, k2 lifts the tail percentile of the nonzero
magnitudes above a floor, and the stricter (larger) of the two is clipped
to user bounds.  Applying and undoing the gain is exact in FP64.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .errors import ConfigError, InvalidValue

EPS = 1e-30  # guards log2 when peak or tail is zero


@dataclasses.dataclass(frozen=True)
class PrescaleConfig:
    target: float = 1.0
    tau: float = 1.0  # tail percentile of nonzero magnitudes, in (0, 100)
    tau_min: float = 2.0**-20
    k_min: int = -40
    k_max: int = 40

    def __post_init__(self):
        if not self.target > 0:
            raise ConfigError("target", "must be > 0")
        if not 0 < self.tau < 100:
            raise ConfigError("tau", "must be in (0, 100)")
        if not self.tau_min > 0:
            raise ConfigError("tau_min", "must be > 0")
        if self.k_min > self.k_max:
            raise ConfigError("k_min", "must be <= k_max")


@dataclasses.dataclass(frozen=True)
class PrescaleResult:
    k: int  # applied exponent, clip(max(k1, k2), k_min, k_max)
    a_max: float
    p_tau: float
    k1: int
    k2: int


def _round_half_away(v: float) -> int:
    return math.floor(v + 0.5) if v >= 0 else math.ceil(v - 0.5)


def _is_grid(x) -> bool:
    return not isinstance(x, np.ndarray) and hasattr(x, "data")


def _data_of(x) -> np.ndarray:
    return np.asarray(x.data if _is_grid(x) else x)


def compute_prescale(x, cfg: PrescaleConfig) -> PrescaleResult:
    """Choose the power-of-two exponent k for input x (grid or array)."""
    data = _data_of(x)
    if not np.all(np.isfinite(data)):
        raise InvalidValue("non-finite input to prescale")
    m = np.abs(data)
    a_max = float(m.max())
    nz = m[m > 0]
    p_tau = float(np.percentile(nz, cfg.tau)) if nz.size else 0.0
    k1 = _round_half_away(math.log2(cfg.target / max(a_max, EPS)))
    k2 = math.ceil(math.log2(cfg.tau_min / max(p_tau, EPS)))
    k = min(max(max(k1, k2), cfg.k_min), cfg.k_max)
    return PrescaleResult(k=k, a_max=a_max, p_tau=p_tau, k1=k1, k2=k2)


def apply_prescale(x, k: int):
    """Multiply every element by exactly 2^k.

    Exact in binary floating point while results stay in normal FP64 range.
    Returns the same kind of object as given (grid or array).
    """
    data = _data_of(x)
    scaled = data * math.ldexp(1.0, k)
    if _is_grid(x):
        return dataclasses.replace(x, data=scaled)
    return scaled


def undo_prescale(x, k: int):
    """Exact inverse of apply_prescale(x, k)."""
    return apply_prescale(x, -k)
