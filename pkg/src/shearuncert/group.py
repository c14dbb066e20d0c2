"""Scale-shear group arithmetic and its unitary action on sampled signals.

An element is (a, s, t) with a != 0 a scale, s in R^{n-1} a shear vector and
t in R^n a translation.  The matrix pair is A_a = diag(a, sgn(a)|a|^{1/n} I)
and the unit upper-triangular S_s with first row (1, s^T); composition and
inversion are exact matrix algebra.  For a < 0 the real n-th root is taken
as sgn(a)|a|^{1/n}, which keeps every matrix real.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import map_coordinates

from .grid import SampledSignal


class InvalidScaleError(ValueError):
    """Scale parameter a must be nonzero."""


class DimensionError(ValueError):
    """Mismatched shear/translation lengths or group dimensions."""


@dataclass(frozen=True)
class GroupElement:
    a: float
    s: tuple
    t: tuple
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise DimensionError(f"group dimension must be >= 2, got {self.n}")
        if self.a == 0.0:
            raise InvalidScaleError("scale a must be nonzero")
        object.__setattr__(self, "s", tuple(float(x) for x in self.s))
        object.__setattr__(self, "t", tuple(float(x) for x in self.t))
        if len(self.s) != self.n - 1:
            raise DimensionError(f"shear length {len(self.s)} != n-1 = {self.n - 1}")
        if len(self.t) != self.n:
            raise DimensionError(f"translation length {len(self.t)} != n = {self.n}")

    @property
    def s_vec(self) -> np.ndarray:
        return np.array(self.s, dtype=float)

    @property
    def t_vec(self) -> np.ndarray:
        return np.array(self.t, dtype=float)


def group_identity(n: int) -> GroupElement:
    return GroupElement(1.0, (0.0,) * (n - 1), (0.0,) * n, n)


def signed_root(a: float, n: int) -> float:
    """Real n-th root with the sign of a: sgn(a) |a|^(1/n)."""
    return float(np.sign(a) * np.abs(a) ** (1.0 / n))


def scaling_matrix(a: float, n: int) -> np.ndarray:
    """diag(a, sgn(a)|a|^{1/n}, ..., sgn(a)|a|^{1/n}); |det| = |a|^{(2n-1)/n}."""
    if a == 0.0:
        raise InvalidScaleError("scale a must be nonzero")
    if n < 2:
        raise DimensionError(f"dimension must be >= 2, got {n}")
    d = np.full(n, signed_root(a, n))
    d[0] = a
    return np.diag(d)


def shear_matrix(s, n: int) -> np.ndarray:
    """Unit upper-triangular matrix with first row (1, s^T); det = 1."""
    s = np.asarray(s, dtype=float)
    if s.shape != (n - 1,):
        raise DimensionError(f"shear length {s.shape} != n-1 = {n - 1}")
    m = np.eye(n)
    m[0, 1:] = s
    return m


def msa_matrix(a: float, s, n: int) -> np.ndarray:
    """Product shear_matrix(s) @ scaling_matrix(a)."""
    return shear_matrix(s, n) @ scaling_matrix(a, n)


def element_matrix(g: GroupElement) -> np.ndarray:
    return msa_matrix(g.a, g.s_vec, g.n)


def group_compose(g: GroupElement, h: GroupElement) -> GroupElement:
    """(a,s,t) . (a',s',t') = (aa', s + |a|^{1-1/n} s', t + S_s A_a t').

    The shear factor is the positive root |a|^{1-1/n}; this is the unique
    real choice consistent with matrix multiplication,
    msa(aa', s'') = msa(a,s) @ msa(a',s').
    """
    if g.n != h.n:
        raise DimensionError("cannot compose elements of different dimension")
    a = g.a * h.a
    if a == 0.0:
        raise InvalidScaleError("composed scale vanished")
    fac = np.abs(g.a) ** (1.0 - 1.0 / g.n)
    s = g.s_vec + fac * h.s_vec
    t = g.t_vec + element_matrix(g) @ h.t_vec
    return GroupElement(a, tuple(s), tuple(t), g.n)


def group_inverse(g: GroupElement) -> GroupElement:
    """Inverse element: (1/a, -s |a|^{1/n - 1}, -(S_s A_a)^{-1} t)."""
    fac = np.abs(g.a) ** (1.0 / g.n - 1.0)
    s = -g.s_vec * fac
    t = -np.linalg.solve(element_matrix(g), g.t_vec)
    return GroupElement(1.0 / g.a, tuple(s), tuple(t), g.n)


def haar_weight(a: float, n: int) -> float:
    """Left-invariant measure density 1/|a|^{n+1} (absolute value keeps it positive)."""
    if a == 0.0:
        raise InvalidScaleError("scale a must be nonzero")
    return 1.0 / np.abs(a) ** (n + 1)


def apply_unitary(g: GroupElement, psi: SampledSignal) -> SampledSignal:
    """|det M|^{-1/2} psi(M^{-1}(x - t)) on the signal's own grid.

    Uses periodic cubic-spline interpolation; accuracy is limited by the
    signal's smoothness on the grid, which is fine for the smooth test
    signals this op is meant for (the transform oracle interpolates
    trigonometrically instead).
    """
    grid = psi.grid
    if grid.n != g.n:
        raise DimensionError("group element and signal dimensions differ")
    m = element_matrix(g)
    minv = np.linalg.inv(m)
    mesh = np.stack([ax.ravel() for ax in grid.mesh("spatial")])
    y = minv @ (mesh - g.t_vec[:, None])
    idx = (y + grid.L) / grid.h  # fractional indices, wrapped periodically

    re = map_coordinates(psi.values.real, idx, order=3, mode="grid-wrap")
    im = map_coordinates(psi.values.imag, idx, order=3, mode="grid-wrap")
    vals = (re + 1j * im).reshape(grid.shape)
    vals *= np.abs(np.linalg.det(m)) ** -0.5

    meta = dict(psi.metadata)
    out = SampledSignal(grid, vals, "spatial", meta)
    total = np.sum(np.abs(vals) ** 2)
    if total > 0:
        shell = np.zeros(grid.shape, dtype=bool)
        for ax in range(grid.n):
            sl = [slice(None)] * grid.n
            sl[ax] = slice(0, 2)
            shell[tuple(sl)] = True
            sl[ax] = slice(-2, None)
            shell[tuple(sl)] = True
        if np.sum(np.abs(vals[shell]) ** 2) / total > 1e-9:
            out.metadata.setdefault("warnings", []).append(
                "transformed support reaches the box boundary (truncation)"
            )
    return out
