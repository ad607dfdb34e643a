"""Radix-2 decimation-in-time FFT with three arithmetic modes.

Modes:
  * Reference -- FP64 throughout; the accuracy baseline.
  * MX        -- the twiddle complex multiply inside each butterfly runs in
                 MX block arithmetic: operand blocks are encoded with a
                 shared power-of-two scale, multiplied in mantissa space
                 with FP32 products, renormalized if the product mantissas
                 exceed the element format's finite range, requantized, and
                 decoded.  Twiddles are encoded once at plan time.  The
                 add/sub operand u is never quantized; butterfly sums are
                 accumulated in FP32.
  * FP16      -- positive control: multiplies with every intermediate
                 rounded to FP16, add/sub in FP32, inputs/outputs in FP16.

No normalization is applied inside the transforms; pipelines apply 1/N**2
where needed.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from . import mxblock
from .errors import ShapeError, UnsupportedSize
from .minifloat import FP16 as _FP16_FMT
from .minifloat import MinifloatFormat, get_format, quantize_array


@dataclasses.dataclass(frozen=True)
class ModeSpec:
    """Arithmetic mode of a plan: "mx" (with element format), "fp16", "reference"."""

    kind: str
    fmt: MinifloatFormat = None
    block_size: int = 32  # B: real scalars per MX block (B/2 complex values)

    @staticmethod
    def mx(fmt: MinifloatFormat, block_size: int = 32) -> "ModeSpec":
        if block_size < 2 or block_size % 2 != 0:
            raise ValueError("block_size must be an even integer >= 2")
        return ModeSpec("mx", fmt, block_size)

    @staticmethod
    def fp16() -> "ModeSpec":
        return ModeSpec("fp16")

    @staticmethod
    def reference() -> "ModeSpec":
        return ModeSpec("reference")

    @staticmethod
    def from_name(name: str, block_size: int = 32) -> "ModeSpec":
        if name == "reference":
            return ModeSpec.reference()
        if name == "fp16":
            return ModeSpec.fp16()
        return ModeSpec.mx(get_format(name), block_size)

    @property
    def label(self) -> str:
        return self.kind if self.kind != "mx" else self.fmt.name


def _bit_reversal(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    perm = np.zeros(n, dtype=np.intp)
    for i in range(n):
        r = 0
        v = i
        for _ in range(bits):
            r = (r << 1) | (v & 1)
            v >>= 1
        perm[i] = r
    return perm


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


class FftPlan:
    """Precomputed bit-reversal permutation and twiddle tables for one size.

    Immutable after construction; safe to share across threads.  Twiddles are
    stored per stage in butterfly order (the flattened (group, j) iteration
    order), forward direction; the inverse conjugates them, which is exact for
    every mode.
    """

    def __init__(self, n: int, mode: ModeSpec):
        if not _is_pow2(n) or n < 2:
            raise UnsupportedSize(f"transform length must be a power of two >= 2, got {n}")
        self.n = n
        self.mode = mode
        self.stages = n.bit_length() - 1
        self.bitrev = _bit_reversal(n)
        half_tables = []
        for s in range(self.stages):
            half = 1 << s
            step = n // (2 * half)
            w = np.exp(-2j * np.pi * np.arange(half) * step / n)
            half_tables.append(np.tile(w, n // (2 * half)))  # butterfly order, len n//2
        self.ref_twiddles = half_tables

        if mode.kind == "mx":
            self.cplx_per_block = min(mode.block_size // 2, n // 2)
            self.mx_twiddles = [
                _encode_blocks_batch(w.real[None], w.imag[None], self.cplx_per_block, mode.fmt)
                for w in half_tables
            ]
        elif mode.kind == "fp16":
            self.fp16_twiddles = [
                (w.real.astype(np.float16), w.imag.astype(np.float16)) for w in half_tables
            ]


def make_plan(n: int, mode: ModeSpec) -> FftPlan:
    return FftPlan(n, mode)


# ---------------------------------------------------------------------------
# MX block machinery, vectorized over (batch, block) axes.
# The single-block semantics live in mxblock; these are the batched
# equivalents used inside the transform loops.
# ---------------------------------------------------------------------------


def _encode_blocks_batch(vr, vi, cpb: int, fmt: MinifloatFormat):
    """Encode (batch, m) real/imag arrays as blocks of cpb complex values.

    Returns (codes_r, codes_i, scales) with shapes (batch, nb, cpb) x2 and
    (batch, nb); one shared power-of-two scale per block over both
    components, per the interleaved-block convention.
    """
    b, m = vr.shape
    nb = m // cpb
    vr = np.asarray(vr, dtype=np.float64).reshape(b, nb, cpb)
    vi = np.asarray(vi, dtype=np.float64).reshape(b, nb, cpb)
    amax = np.maximum(np.abs(vr), np.abs(vi)).max(axis=-1)
    scales = mxblock.block_scales(amax, fmt)
    inv = 1.0 / scales[..., None]  # exact: reciprocal of a power of two
    codes_r = quantize_array(vr * inv, fmt)
    codes_i = quantize_array(vi * inv, fmt)
    return codes_r, codes_i, scales


def _mx_multiply_batch(vr, vi, w_enc, fmt: MinifloatFormat, cpb: int) -> np.ndarray:
    """Blockwise MX complex multiply w*v for a whole stage.

    v is (batch, m) split into real/imag; w_enc holds the prequantized
    twiddle blocks (codes_r, codes_i, scales) of shape (1, nb, cpb)/(1, nb).
    Implements the mantissa-space product with per-block renormalization and
    requantization; returns the decoded products, shape (batch, m) complex.
    """
    b, m = vr.shape
    wcr, wci, ws = w_enc
    cvr, cvi, sv = _encode_blocks_batch(vr, vi, cpb, fmt)
    # FP32 products are exact-range for <=16-bit element formats; wide test
    # formats would overflow FP32 mantissa products, so promote for those.
    ptype = np.float32 if 2 * (fmt.emax + 1) <= 126 else np.float64
    xr = wcr.astype(ptype)
    xi = wci.astype(ptype)
    yr = cvr.astype(ptype)
    yi = cvi.astype(ptype)
    p_r = xr * yr - xi * yi
    p_i = xr * yi + xi * yr
    s_out = ws * sv  # powers of two; product exact
    amax = np.maximum(np.abs(p_r), np.abs(p_i)).max(axis=-1).astype(np.float64)
    shift = np.zeros(amax.shape, dtype=np.int64)
    over = amax > fmt.max_finite
    if np.any(over):
        shift[over] = np.ceil(np.log2(amax[over] / fmt.max_finite)).astype(np.int64)
        fac = np.ldexp(np.ones(1, dtype=ptype), -shift)[..., None]
        p_r = p_r * fac
        p_i = p_i * fac
        s_out = s_out * np.ldexp(1.0, shift)
    c_r = quantize_array(p_r.astype(np.float64), fmt)
    c_i = quantize_array(p_i.astype(np.float64), fmt)
    wv = (c_r + 1j * c_i) * s_out[..., None]
    return wv.reshape(b, m)


def butterfly_mx(u, v, w, fmt: MinifloatFormat):
    """One MX-scaled complex butterfly on a block of up to B/2 values.

    w may be a prequantized MxBlock (the plan path) or a complex vector,
    which is then encoded on the fly.  Returns (y0, y1) = (u + wv, u - wv)
    accumulated in FP32.  This is the literal single-block procedure; the
    transform loops use the batched equivalent, which tests cross-check
    against this one.
    """
    u = np.asarray(u, dtype=np.complex128)
    v = np.asarray(v, dtype=np.complex128)
    if isinstance(w, mxblock.MxBlock):
        w_blk = w
    else:
        w = np.asarray(w, dtype=np.complex128)
        inter = np.empty(2 * w.size, dtype=np.float64)
        inter[0::2] = w.real
        inter[1::2] = w.imag
        w_blk = mxblock.encode_block_mx(inter, fmt)
    if u.shape != v.shape or 2 * v.size != w_blk.n:
        raise ShapeError("butterfly operands must have matching lengths")

    inter = np.empty(2 * v.size, dtype=np.float64)
    inter[0::2] = v.real
    inter[1::2] = v.imag
    v_blk = mxblock.encode_block_mx(inter, fmt)
    x_r, x_i = mxblock.mantissas_block(w_blk)
    y_r, y_i = mxblock.mantissas_block(v_blk)
    # same product-dtype rule as the batched path: mantissa products of very
    # wide formats can exceed the float32 range
    ptype = np.float32 if 2 * (fmt.emax + 1) <= 126 else np.float64
    x_r = x_r.astype(ptype)
    x_i = x_i.astype(ptype)
    y_r = y_r.astype(ptype)
    y_i = y_i.astype(ptype)
    p_r = x_r * y_r - x_i * y_i
    p_i = x_r * y_i + x_i * y_r
    s_out = w_blk.scale * v_blk.scale
    amax = max(np.max(np.abs(p_r), initial=0.0), np.max(np.abs(p_i), initial=0.0))
    if amax > fmt.max_finite:
        k = int(np.ceil(np.log2(float(amax) / fmt.max_finite)))
        p_r = p_r * ptype(2.0**-k)
        p_i = p_i * ptype(2.0**-k)
        s_out = s_out * 2.0**k
    prod = mxblock.encode_from_mant_block(
        p_r.astype(np.float64), p_i.astype(np.float64), s_out, fmt
    )
    wv = mxblock.decode_block_mx(prod).astype(np.complex64)
    u32 = u.astype(np.complex64)
    return u32 + wv, u32 - wv


# ---------------------------------------------------------------------------
# Batched 1-D transforms (batch along axis 0, transform along axis 1).
# ---------------------------------------------------------------------------


def _fft_batch_reference(x: np.ndarray, plan: FftPlan, inverse: bool) -> np.ndarray:
    y = x[:, plan.bitrev].astype(np.complex128)
    b = y.shape[0]
    for s in range(plan.stages):
        half = 1 << s
        w = plan.ref_twiddles[s]
        if inverse:
            w = np.conj(w)
        view = y.reshape(b, -1, 2 * half)
        u = view[..., :half]
        v = view[..., half:]
        t = v * w.reshape(-1, half)
        y = np.concatenate((u + t, u - t), axis=-1).reshape(b, plan.n)
    return y


def _fft_batch_mx(x: np.ndarray, plan: FftPlan, inverse: bool) -> np.ndarray:
    fmt = plan.mode.fmt
    cpb = plan.cplx_per_block
    y = x[:, plan.bitrev].astype(np.complex64)
    b = y.shape[0]
    for s in range(plan.stages):
        half = 1 << s
        wcr, wci, ws = plan.mx_twiddles[s]
        if inverse:
            wci = -wci  # conjugation is exact on codes
        view = y.reshape(b, -1, 2 * half)
        u = view[..., :half]
        v = view[..., half:]
        vflat = v.reshape(b, plan.n // 2)
        wv = _mx_multiply_batch(
            vflat.real.astype(np.float64),
            vflat.imag.astype(np.float64),
            (wcr, wci, ws),
            fmt,
            cpb,
        ).astype(np.complex64)
        t = wv.reshape(b, -1, half)
        y = np.concatenate((u + t, u - t), axis=-1).reshape(b, plan.n)
    return y


def _fft_batch_fp16(x: np.ndarray, plan: FftPlan, inverse: bool) -> np.ndarray:
    y = x[:, plan.bitrev]
    # inputs quantized scalar-wise to FP16
    y = (y.real.astype(np.float16).astype(np.float32)
         + 1j * y.imag.astype(np.float16).astype(np.float32)).astype(np.complex64)
    b = y.shape[0]
    for s in range(plan.stages):
        half = 1 << s
        wr, wi = plan.fp16_twiddles[s]
        if inverse:
            wi = -wi
        view = y.reshape(b, -1, 2 * half)
        u = view[..., :half]
        v = view[..., half:]
        vr = v.real.astype(np.float16)
        vi = v.imag.astype(np.float16)
        wr_ = wr.reshape(-1, half)
        wi_ = wi.reshape(-1, half)
        # every intermediate of the complex multiply rounded to FP16
        p_r = wr_ * vr - wi_ * vi
        p_i = wr_ * vi + wi_ * vr
        t = p_r.astype(np.float32) + 1j * p_i.astype(np.float32)
        y = np.concatenate((u + t, u - t), axis=-1).reshape(b, plan.n)
    # outputs quantized to FP16
    out_r = quantize_array(y.real.astype(np.float64), _FP16_FMT)
    out_i = quantize_array(y.imag.astype(np.float64), _FP16_FMT)
    return (out_r + 1j * out_i).astype(np.complex64)


_BATCH_FNS = {
    "reference": _fft_batch_reference,
    "mx": _fft_batch_mx,
    "fp16": _fft_batch_fp16,
}


def _fft_batch(x: np.ndarray, plan: FftPlan, direction: str) -> np.ndarray:
    if direction not in ("forward", "inverse"):
        raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")
    if x.shape[1] != plan.n:
        raise ShapeError(f"expected length {plan.n}, got {x.shape[1]}")
    return _BATCH_FNS[plan.mode.kind](x, plan, direction == "inverse")


def fft_1d(x, plan: FftPlan, direction: str = "forward") -> np.ndarray:
    """Unnormalized radix-2 DIT transform of a length-n complex vector."""
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim != 1:
        raise ShapeError("fft_1d expects a 1-D vector")
    return _fft_batch(x[None, :], plan, direction)[0]


def fft_1d_fp16(x, plan: FftPlan, direction: str = "forward") -> np.ndarray:
    """FP16 positive-control transform; plan must be in fp16 mode."""
    if plan.mode.kind != "fp16":
        raise ValueError("fft_1d_fp16 requires an fp16-mode plan")
    return fft_1d(x, plan, direction)


def fft_2d(x, plan: FftPlan, direction: str = "forward") -> np.ndarray:
    """Row transforms then column transforms of a square N x N grid."""
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise UnsupportedSize("fft_2d expects a square grid")
    if x.shape[0] != plan.n:
        raise UnsupportedSize(f"grid size {x.shape[0]} does not match plan size {plan.n}")
    rows = _fft_batch(x, plan, direction)
    cols = _fft_batch(np.ascontiguousarray(rows.T), plan, direction)
    return np.asarray(cols.T, dtype=np.complex128)
