"""Weight fields, regions and weighted quadratures.

Weights are evaluated pointwise on the grid with one exception: the cell
containing the origin receives the exact cell-average of the weight.  For
the singular kinds (negative powers, logarithms) a pointwise value at the
origin is meaningless, and simply dropping the cell measurably biases the
logarithmic moments at N = 128.  The averages are computed with a Duffy
split of the cell into pyramids, which turns each integral into a smooth
1D/2D quadrature plus a closed-form radial factor.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .grid import SampledSignal, SpatialGrid, fourier

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)

SPATIAL_KINDS = ("abs_t_power", "log_abs_t", "log_sobolev_t")
FREQUENCY_KINDS = ("inv_xi_power", "log_abs_xi")


def _gl_integral_1d(f, lo: float, hi: float) -> float:
    x = 0.5 * (hi - lo) * _GL_NODES + 0.5 * (hi + lo)
    return 0.5 * (hi - lo) * float(np.dot(_GL_WEIGHTS, f(x)))


def _gl_integral_2d(f, lo: float, hi: float) -> float:
    half = 0.5 * (hi - lo)
    x = half * _GL_NODES + 0.5 * (hi + lo)
    U, V = np.meshgrid(x, x, indexing="ij")
    W = np.outer(_GL_WEIGHTS, _GL_WEIGHTS)
    return half * half * float(np.sum(W * f(U, V)))


def origin_cell_average(kind: str, d: float, n: int, lam: float | None = None) -> float:
    """Exact mean of the weight over the origin cell [-d, d]^n, n in {2, 3}."""
    if n not in (2, 3):
        raise ValueError(f"origin-cell averaging implemented for n in {{2,3}}, got {n}")

    if kind in ("abs_t_power", "inv_xi_power"):
        p = lam if kind == "abs_t_power" else -lam
        if p == 0.0:
            return 1.0
        if n == 2:
            i2 = _gl_integral_1d(lambda u: (1.0 + u * u) ** (p / 2.0), -1.0, 1.0)
            return d**p * i2 / (p + 2.0)
        i3 = _gl_integral_2d(lambda u, v: (1.0 + u * u + v * v) ** (p / 2.0), -1.0, 1.0)
        return 0.75 * d**p * i3 / (p + 3.0)

    if kind in ("log_abs_t", "log_abs_xi"):
        if n == 2:
            j2 = _gl_integral_1d(lambda u: np.log1p(u * u), -1.0, 1.0)
            return 0.5 * (2.0 * math.log(d) - 1.0) + 0.25 * j2
        j3 = _gl_integral_2d(lambda u, v: np.log1p(u * u + v * v), -1.0, 1.0)
        # cube split into 6 pyramids: ln r = ln z + ln(1+u^2+v^2)/2 on each
        return math.log(d) - 1.0 / 3.0 + j3 / 8.0

    if kind == "log_sobolev_t":
        # smooth at the origin; tensor Gauss-Legendre mean over the cell
        x = d * _GL_NODES
        if n == 2:
            U, V = np.meshgrid(x, x, indexing="ij")
            W = np.outer(_GL_WEIGHTS, _GL_WEIGHTS)
            return float(np.sum(W * np.log((1.0 + U * U + V * V) / 2.0))) / 4.0
        U, V, Z = np.meshgrid(x, x, x, indexing="ij")
        W = (_GL_WEIGHTS[:, None, None] * _GL_WEIGHTS[None, :, None]
             * _GL_WEIGHTS[None, None, :])
        return float(np.sum(W * np.log((1.0 + U * U + V * V + Z * Z) / 2.0))) / 8.0

    raise ValueError(f"unsupported weight kind {kind!r}")


def weight_field(grid: SpatialGrid, kind: str, lam: float | None = None) -> np.ndarray:
    """Pointwise weight samples with the origin cell replaced by its cell-average.

    Spatial kinds: |t|^lam (lam >= 0), ln|t|, ln((1+|t|^2)/2).
    Frequency kinds: |xi|^-lam (0 <= lam < 1), ln|xi|.
    """
    if kind in SPATIAL_KINDS:
        mesh = grid.mesh("spatial")
        d = grid.h / 2.0
    elif kind in FREQUENCY_KINDS:
        mesh = grid.mesh("frequency")
        d = grid.dxi / 2.0
    else:
        raise ValueError(f"unsupported weight kind {kind!r}")

    if kind == "abs_t_power":
        if lam is None or lam < 0:
            raise ValueError("abs_t_power requires lam >= 0")
    if kind == "inv_xi_power":
        if lam is None or not 0.0 <= lam < 1.0:
            raise ValueError("inv_xi_power requires lam in [0, 1)")

    r2 = np.zeros(grid.shape)
    for ax in mesh:
        r2 += ax * ax
    origin = np.unravel_index(int(np.argmin(r2)), grid.shape)
    r2[origin] = 1.0  # placeholder, overwritten below
    r = np.sqrt(r2)

    if kind == "abs_t_power":
        out = np.ones_like(r) if lam == 0.0 else r**lam
    elif kind == "inv_xi_power":
        out = np.ones_like(r) if lam == 0.0 else r**(-lam)
    elif kind in ("log_abs_t", "log_abs_xi"):
        out = np.log(r)
    else:  # log_sobolev_t
        out = np.log((1.0 + r2) / 2.0)

    out[origin] = origin_cell_average(kind, d, grid.n, lam)
    return out


@dataclass(frozen=True)
class RegionSpec:
    """Ball or axis-aligned box with closed-form Lebesgue measure."""

    kind: str
    center: tuple
    radius: float | None = None       # ball
    halfwidths: tuple | None = None   # box

    def __post_init__(self):
        if self.kind not in ("ball", "box"):
            raise ValueError(f"region kind must be ball|box, got {self.kind}")
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if self.kind == "ball":
            if self.radius is None or self.radius <= 0:
                raise ValueError("ball requires a positive radius")
        else:
            if self.halfwidths is None:
                raise ValueError("box requires halfwidths")
            object.__setattr__(self, "halfwidths",
                               tuple(float(w) for w in self.halfwidths))
            if any(w <= 0 for w in self.halfwidths):
                raise ValueError("box halfwidths must be positive")

    def measure(self) -> float:
        n = len(self.center)
        if self.kind == "ball":
            return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0) * self.radius**n
        return float(np.prod([2.0 * w for w in self.halfwidths]))


def region_mask(
    grid: SpatialGrid,
    region: RegionSpec,
    complement: bool = False,
    domain: str = "spatial",
):
    """Indicator samples and the region's closed-form measure.

    Returns (mask, measure, metadata); the measure is always that of the
    region itself, never read off the mask.
    """
    if len(region.center) != grid.n:
        raise ValueError("region dimension does not match the grid")
    mesh = grid.mesh(domain)
    if region.kind == "ball":
        r2 = np.zeros(grid.shape)
        for i, ax in enumerate(mesh):
            r2 += (ax - region.center[i]) ** 2
        mask = (r2 <= region.radius**2).astype(np.float64)
    else:
        mask = np.ones(grid.shape)
        for i, ax in enumerate(mesh):
            mask *= (np.abs(ax - region.center[i]) <= region.halfwidths[i]).astype(np.float64)

    meta: dict = {}
    if not mask.any():
        meta["warnings"] = ["region does not intersect the sampled domain"]
    if complement:
        mask = 1.0 - mask
    return mask, region.measure(), meta


def weighted_norm_sq(signal: SampledSignal, weights: np.ndarray) -> float:
    """Cell-volume-weighted sum of w |f|^2; with w = 1 this is the squared norm."""
    weights = np.asarray(weights, dtype=np.float64)
    if weights.shape != signal.values.shape:
        raise ValueError("weights shape does not match the signal")
    return signal.grid.cell_volume(signal.domain) * kernels.weighted_abs2_sum(
        signal.values, weights
    )


@dataclass(frozen=True)
class SpectralGradient:
    """Frequency second moment of a spatial signal.

    ``value`` is int |xi|^2 |fhat|^2 dxi, the quantity the log-Sobolev chain
    actually compares against; ``calculus_value`` carries the (2*pi)^2 factor
    that the ordinary-frequency convention inserts between this moment and
    the literal gradient norm int |grad f|^2 dt.
    """

    value: float
    calculus_value: float


def spectral_gradient_norm_sq(signal: SampledSignal) -> SpectralGradient:
    if signal.domain != "spatial":
        raise ValueError("spectral gradient expects a spatial signal")
    spec = fourier(signal, "forward")
    r2 = np.zeros(signal.grid.shape)
    for ax in signal.grid.mesh("frequency"):
        r2 += ax * ax
    val = signal.grid.cell_volume("frequency") * kernels.weighted_abs2_sum(spec.values, r2)
    return SpectralGradient(value=val, calculus_value=(2.0 * math.pi) ** 2 * val)
