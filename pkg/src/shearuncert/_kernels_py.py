"""Pure-numpy reference kernels.

These are the fallback twins of the compiled kernels in ``_kernels_cy``.
Both backends must produce bit-identical output, so every routine here is
written with a fixed, explicit operation order:

* reductions use a fold-halves pairwise scheme (pad with zeros to a power of
  two, then repeatedly add the upper half onto the lower half), and
* window profiles are evaluated with the same elementary-operation sequence
  the C loops use (no ``x**m`` shortcuts, no fused multiply-adds).
"""
from __future__ import annotations

import numpy as np

HALF_PI = np.pi / 2


def _fold_halves(buf: np.ndarray) -> complex | float:
    m = buf.shape[0]
    while m > 1:
        h = m // 2
        buf[:h] += buf[h:m]
        m = h
    return buf[0]


def _padded(x: np.ndarray, dtype) -> np.ndarray:
    n = x.shape[0]
    if n == 0:
        return np.zeros(1, dtype=dtype)
    m = 1 << (n - 1).bit_length()
    buf = np.zeros(m, dtype=dtype)
    buf[:n] = x
    return buf


def pairwise_sum(x) -> float:
    """Deterministic pairwise sum of a float64 array."""
    x = np.ascontiguousarray(x, dtype=np.float64).ravel()
    return float(_fold_halves(_padded(x, np.float64)))


def abs2_sum(values) -> float:
    """Pairwise sum of |v|^2 over a complex array."""
    v = np.ascontiguousarray(values, dtype=np.complex128).ravel()
    t = v.real * v.real + v.imag * v.imag
    return float(_fold_halves(_padded(t, np.float64)))


def weighted_abs2_sum(values, weights) -> float:
    """Pairwise sum of w * |v|^2."""
    v = np.ascontiguousarray(values, dtype=np.complex128).ravel()
    w = np.ascontiguousarray(weights, dtype=np.float64).ravel()
    if v.shape != w.shape:
        raise ValueError("values and weights must have the same length")
    t = w * (v.real * v.real + v.imag * v.imag)
    return float(_fold_halves(_padded(t, np.float64)))


def cdot(x, y) -> complex:
    """Pairwise sum of x * conj(y)."""
    a = np.ascontiguousarray(x, dtype=np.complex128).ravel()
    b = np.ascontiguousarray(y, dtype=np.complex128).ravel()
    if a.shape != b.shape:
        raise ValueError("arrays must have the same length")
    re = a.real * b.real + a.imag * b.imag
    im = a.imag * b.real - a.real * b.imag
    return complex(float(_fold_halves(_padded(re, np.float64))),
                   float(_fold_halves(_padded(im, np.float64))))


def cos_bump(t, order: int) -> np.ndarray:
    """cos(pi*t/2)**order on |t| < 1, zero outside; order >= 1."""
    if order < 1:
        raise ValueError("order must be >= 1")
    t = np.ascontiguousarray(t, dtype=np.float64)
    out = np.zeros_like(t)
    mask = np.abs(t) < 1.0
    c = np.cos(HALF_PI * t[mask])
    acc = c.copy()
    for _ in range(order - 1):
        acc = acc * c
    out[mask] = acc
    return out


def sqrt_tri_bump(t) -> np.ndarray:
    """sqrt(1 - |t|) on |t| < 1, zero outside (square is the order-2 spline)."""
    t = np.ascontiguousarray(t, dtype=np.float64)
    out = np.zeros_like(t)
    mask = np.abs(t) < 1.0
    out[mask] = np.sqrt(1.0 - np.abs(t[mask]))
    return out
