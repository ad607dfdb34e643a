"""Shared oracles and fixtures.

The oracles here are deliberately independent of the library's fast paths:
brute-force DFT matrices, nearest-neighbor search over enumerated format
values, and per-window metric formulas.
"""

import numpy as np
import pytest

from mxfft import enumerate_values

# Phantom settings used by the trend studies and the acceptance suite.
# tail/noise give the k-space a realistic noise floor and tail weight;
# without them the synthetic spectra are far more dynamic-range-heavy than
# any acquired data.
PHANTOM = dict(kind="blobs", tail=0.2, noise=0.1)
COILS = 4


def brute_dft(x, inverse=False):
    """O(n^2) FP64 DFT, the reference oracle for every transform test."""
    x = np.asarray(x, dtype=np.complex128)
    n = x.size
    j = np.arange(n)
    sign = 2j if inverse else -2j
    return np.exp(sign * np.pi * np.outer(j, j) / n) @ x


def mantissa_parity(v, fmt):
    """Parity of the mantissa code of a representable value (0 is even)."""
    if v == 0:
        return 0
    a = abs(v)
    _, e = np.frexp(a)
    eb = max(int(e) - 1, fmt.emin)
    m = round(a / np.ldexp(1.0, eb - fmt.mantissa_bits))
    return int(m) % 2


def nn_quantize(x, fmt, grid=None):
    """Nearest representable value by exhaustive search, ties to even code."""
    if grid is None:
        grid = enumerate_values(fmt)
    xs = np.atleast_1d(np.asarray(x, dtype=np.float64))
    out = np.empty_like(xs)
    idx = np.clip(np.searchsorted(grid, xs), 1, grid.size - 1)
    for i, (v, j) in enumerate(zip(xs, idx)):
        lo, hi = grid[j - 1], grid[j]
        dlo, dhi = abs(v - lo), abs(hi - v)
        if dlo < dhi:
            out[i] = lo
        elif dhi < dlo:
            out[i] = hi
        else:
            out[i] = lo if mantissa_parity(lo, fmt) == 0 else hi
    return out if np.ndim(x) else float(out[0])


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
