"""Frequency-domain generator, scale/shear channel set and admissibility.

A channel is one (a, s) quadrature node; its filter is the generator
spectrum warped by the transposed channel matrix, evaluated on the grid's
frequency lattice.  The admissibility constant is the channel quadrature of
|filter|^2 / a^{(n^2-n+1)/n}; for the band-limited generator it reduces to a
separable product of 1D integrals and is direction-independent inside the
covered cone, which is verified numerically rather than assumed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from itertools import product

import numpy as np
from scipy.integrate import quad

from . import kernels
from .grid import SpatialGrid

# Default radial band: one node-comb width below the default Nyquist edge.
# The upper edge 1/4 puts the finest default channel (a = 1/16) right at the
# default grid's Nyquist box; the lower edge spans exactly four steps of the
# default 12-node scale ladder on [1/16, 1], which makes the discretized
# log-scale sum of |w|^2 flat to well under a percent.
DEFAULT_BAND = (0.25 * 16.0 ** (-4.0 / 11.0), 0.25)


class AliasingError(ValueError):
    """A channel's pass-band does not fit inside the Nyquist box."""


class AdmissibilityError(ValueError):
    """System has no usable admissibility constant."""


@dataclass(frozen=True)
class GeneratorSpec:
    """Generator spectrum specification.

    classical: psi_hat(xi) = amp * w(xi_1) * prod_k v(xi_k / xi_1) with w a
    log-band bump supported on band[0] <= |xi_1| <= band[1] and v an even
    bump supported on [-halfwidth, halfwidth].  Profiles:

    * radial_profile  "cos": cos^order bump in ln|r| across the band
    * angular_profile "sqrtspline": sqrt(1-|u|) (its square is the order-2
      spline partition; keeps the uniform shear comb flat), or "cos".

    gaussian-derivative: psi_hat(xi) = amp * |xi_1/scale|^order
    * exp(-pi |xi|^2 / scale^2); unbounded support, checked against the
    Nyquist box numerically.
    """

    kind: str = "classical"
    band: tuple = DEFAULT_BAND
    radial_profile: str = "cos"
    radial_order: int = 2
    angular_profile: str = "sqrtspline"
    angular_order: int = 2
    angular_halfwidth: float = 1.0
    gd_scale: float = 1.0
    gd_order: int = 2     # even orders keep the spectrum smooth at xi_1 = 0
    amplitude: float = 1.0

    def __post_init__(self):
        if self.kind not in ("classical", "gaussian-derivative"):
            raise ValueError(f"unknown generator kind {self.kind!r}")
        r0, r1 = self.band
        if not 0 < r0 < r1:
            raise ValueError(f"band must satisfy 0 < r0 < r1, got {self.band}")
        if not 0 < self.angular_halfwidth <= 1.0:
            raise ValueError("angular halfwidth must lie in (0, 1]")
        if self.radial_order < 1 or self.angular_order < 1:
            raise ValueError("window orders must be >= 1")


def _radial_window(spec: GeneratorSpec, r: np.ndarray) -> np.ndarray:
    r0, r1 = spec.band
    lc = 0.5 * (math.log(r0) + math.log(r1))
    hw = 0.5 * (math.log(r1) - math.log(r0))
    out = np.zeros_like(r)
    pos = np.abs(r) > 0
    t = (np.log(np.abs(r[pos])) - lc) / hw
    if spec.radial_profile == "cos":
        out[pos] = kernels.cos_bump(t, spec.radial_order)
    elif spec.radial_profile == "sqrtspline":
        out[pos] = kernels.sqrt_tri_bump(t)
    else:
        raise ValueError(f"unknown radial profile {spec.radial_profile!r}")
    return out


def _angular_window(spec: GeneratorSpec, u: np.ndarray) -> np.ndarray:
    t = u / spec.angular_halfwidth
    if spec.angular_profile == "sqrtspline":
        return kernels.sqrt_tri_bump(t)
    if spec.angular_profile == "cos":
        return kernels.cos_bump(t, spec.angular_order)
    raise ValueError(f"unknown angular profile {spec.angular_profile!r}")


def evaluate_generator_hat(spec: GeneratorSpec, coords) -> np.ndarray:
    """Generator spectrum at frequency points given as n coordinate arrays."""
    coords = [np.asarray(c, dtype=float) for c in coords]
    xi1 = coords[0]
    if spec.kind == "classical":
        out = _radial_window(spec, xi1)
        safe = np.where(xi1 != 0, xi1, 1.0)
        for xik in coords[1:]:
            out = out * _angular_window(spec, xik / safe)
        out = np.where(xi1 != 0, out, 0.0)
        return spec.amplitude * out
    # gaussian-derivative
    r2 = np.zeros_like(xi1)
    for c in coords:
        r2 = r2 + c * c
    b = spec.gd_scale
    out = (np.abs(xi1) / b) ** spec.gd_order * np.exp(-np.pi * r2 / (b * b))
    return spec.amplitude * out


@dataclass(frozen=True)
class Channel:
    """One (a, s) node: warp matrix data and quadrature weights."""

    a: float
    s: tuple
    weight: float       # da * prod(ds), the (a, s) cell weight

    @property
    def root(self) -> float:
        n = len(self.s) + 1
        return float(np.sign(self.a) * np.abs(self.a) ** (1.0 / n))

    @property
    def det_a(self) -> float:
        n = len(self.s) + 1
        return float(np.abs(self.a) ** ((2.0 * n - 1.0) / n))

    def haar_factor(self, n: int) -> float:
        return self.weight / np.abs(self.a) ** (n + 1)

    def admissibility_weight(self, n: int) -> float:
        return self.weight / np.abs(self.a) ** ((n * n - n + 1.0) / n)


@dataclass(frozen=True)
class ChannelSet:
    """Geometric scale nodes x uniform shear nodes with trapezoid weights."""

    a_nodes: tuple
    a_weights: tuple
    s_nodes: tuple
    s_weights: tuple
    n: int
    sign_mode: str = "positive"

    @property
    def scale_count(self) -> int:
        return len(self.a_nodes)

    @property
    def shear_count(self) -> int:
        return len(self.s_nodes)

    def channels(self) -> list[Channel]:
        out = []
        signs = (1.0,) if self.sign_mode == "positive" else (1.0, -1.0)
        for sign in signs:
            for j, a in enumerate(self.a_nodes):
                for ks in product(range(len(self.s_nodes)), repeat=self.n - 1):
                    s = tuple(self.s_nodes[k] for k in ks)
                    w = self.a_weights[j]
                    for k in ks:
                        w *= self.s_weights[k]
                    out.append(Channel(a=sign * a, s=s, weight=w))
        return out


def build_channel_set(
    a_min: float,
    a_max: float,
    scale_count: int,
    shear_max: float,
    shear_count: int,
    n: int,
    sign_mode: str = "positive",
) -> ChannelSet:
    if not 0 < a_min < a_max:
        raise ValueError("scale range must satisfy 0 < a_min < a_max")
    if scale_count < 2:
        raise ValueError("need at least two scale nodes")
    if shear_count < 3 or shear_count % 2 == 0:
        raise ValueError("shear count must be odd and >= 3 (symmetric sampling)")
    if sign_mode not in ("positive", "both"):
        raise ValueError(f"sign mode must be positive|both, got {sign_mode}")

    ln = np.linspace(math.log(a_min), math.log(a_max), scale_count)
    a = np.exp(ln)
    dln = ln[1] - ln[0]
    wln = np.full(scale_count, dln)
    wln[0] *= 0.5
    wln[-1] *= 0.5
    a_weights = a * wln  # trapezoid in ln a: da = a dln a

    s = np.linspace(-shear_max, shear_max, shear_count)
    ds = s[1] - s[0]
    ws = np.full(shear_count, ds)
    ws[0] *= 0.5
    ws[-1] *= 0.5

    return ChannelSet(
        a_nodes=tuple(a), a_weights=tuple(a_weights),
        s_nodes=tuple(s), s_weights=tuple(ws),
        n=n, sign_mode=sign_mode,
    )


@dataclass(frozen=True)
class AdmissibilityResult:
    c_psi: float
    probes: tuple                    # probe frequency points, shape (P, n) as tuples
    c_field: tuple                   # quadrature value at each probe
    coefficient_of_variation: float
    truncation_note: str
    excluded: tuple = ()             # probes outside the covered cone


@dataclass
class ShearletSystem:
    """Generator + channel set + grid, with per-channel frequency filters.

    Filters are psi_hat(M^T xi) on the frequency lattice (M = shear @ scale;
    the transpose is what the Fourier transform of the warped generator
    actually produces).  They are materialized lazily and kept only when the
    total size fits the memory budget.
    """

    generator: GeneratorSpec
    channel_set: ChannelSet
    grid: SpatialGrid
    memory_budget_bytes: int = 256 * 1024 * 1024
    admissibility: AdmissibilityResult | None = None
    _channels: list = field(default_factory=list, repr=False)
    _filters: list | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.channel_set.n != self.grid.n:
            raise ValueError("channel set and grid dimensions differ")
        self._channels = self.channel_set.channels()

    @property
    def n(self) -> int:
        return self.grid.n

    @property
    def channels(self) -> list[Channel]:
        return self._channels

    @property
    def c_psi(self) -> float:
        if self.admissibility is None:
            raise AdmissibilityError("admissibility has not been computed")
        return self.admissibility.c_psi

    def warped_coords(self, channel: Channel, coords) -> list[np.ndarray]:
        """M^T xi componentwise: (a xi_1, root*(s_k xi_1 + xi_{k+1})...)."""
        xi1 = coords[0]
        root = channel.root
        out = [channel.a * xi1]
        for k, xik in enumerate(coords[1:]):
            out.append(root * (channel.s[k] * xi1 + xik))
        return out

    def filter_values(self, index: int) -> np.ndarray:
        if self._filters is not None and self._filters[index] is not None:
            return self._filters[index]
        mesh = self.grid.mesh("frequency")
        vals = evaluate_generator_hat(
            self.generator, self.warped_coords(self._channels[index], mesh)
        )
        if self._filters is not None:
            self._filters[index] = vals
        return vals

    def filter_nbytes(self) -> int:
        return len(self._channels) * (self.grid.N ** self.n) * 8

    def materialize_filters(self) -> bool:
        """Cache all filters if they fit the budget; returns whether cached."""
        if self._filters is None:
            if self.filter_nbytes() > self.memory_budget_bytes:
                return False
            self._filters = [None] * len(self._channels)
            for i in range(len(self._channels)):
                self.filter_values(i)
        return True

    @property
    def filters(self) -> list[np.ndarray]:
        if not self.materialize_filters():
            raise MemoryError(
                f"filters need {self.filter_nbytes()} bytes, over the budget "
                f"{self.memory_budget_bytes}; stream via filter_values instead"
            )
        return self._filters

    def passband_mask(self) -> np.ndarray:
        """Union of channel supports on the frequency lattice."""
        mask = np.zeros(self.grid.shape, dtype=bool)
        for i in range(len(self._channels)):
            mask |= self.filter_values(i) != 0.0
        return mask

    def scale_complete_range(self) -> tuple[float, float]:
        """|xi_1| window where the scale quadrature sees the whole band."""
        r0, r1 = self.generator.band
        a = np.abs(np.array([c.a for c in self._channels]))
        return (r1 / a.max(), r0 / a.min())

    def shear_complete_q(self, xi1: float) -> float:
        """Largest |xi_2/xi_1| at which the shear window fits inside the range."""
        r0, r1 = self.generator.band
        hv = self.generator.angular_halfwidth
        smax = max(abs(s) for c in self._channels for s in c.s)
        a_hi = min(r1 / abs(xi1), max(abs(c.a) for c in self._channels))
        n = self.n
        return smax - hv * a_hi ** (1.0 - 1.0 / n)

    def default_probes(self, per_scale: int = 8, per_dir: int = 4) -> np.ndarray:
        """Probe lattice spanning the covered cone (scale- and shear-complete)."""
        lo, hi = self.scale_complete_range()
        if not lo < hi:
            raise AdmissibilityError("empty covered cone for this configuration")
        xi1s = np.geomspace(lo * 1.02, hi * 0.98, per_scale)
        probes = []
        for x1 in xi1s:
            qmax = 0.95 * self.shear_complete_q(x1)
            for q in np.linspace(-qmax, qmax, per_dir):
                probes.append((x1,) + (q * x1,) * (self.n - 1))
        return np.array(probes)


def admissibility(system: ShearletSystem, probes=None) -> AdmissibilityResult:
    """Channel quadrature of |psi_hat(M^T xi)|^2 / a^{(n^2-n+1)/n} per probe.

    Probes outside the covered cone are excluded (with a warning note), since
    the truncated quadrature cannot be direction-independent there.
    """
    if probes is None:
        if system.generator.kind == "classical":
            probes = system.default_probes()
        else:
            g = system.grid
            xi1s = np.geomspace(0.1 * g.N / (4 * g.L), 0.5 * g.N / (4 * g.L), 8)
            probes = np.array([(x1,) + (q * x1,) * (g.n - 1)
                               for x1 in xi1s for q in np.linspace(-0.5, 0.5, 4)])
    probes = np.atleast_2d(np.asarray(probes, dtype=float))

    included = []
    excluded = []
    if system.generator.kind == "classical":
        lo, hi = system.scale_complete_range()
        for p in probes:
            x1 = abs(p[0])
            if x1 == 0 or not lo - 1e-12 <= x1 <= hi + 1e-12:
                excluded.append(tuple(p))
                continue
            qmax = system.shear_complete_q(x1)
            if any(abs(pk / p[0]) > qmax + 1e-12 for pk in p[1:]):
                excluded.append(tuple(p))
                continue
            included.append(p)
    else:
        included = list(probes)

    if not included:
        raise AdmissibilityError("no probes inside the covered cone")

    n = system.n
    pts = np.array(included)  # (P, n)
    coords = [pts[:, i] for i in range(n)]
    parts = np.empty((len(system.channels), pts.shape[0]))
    for i, ch in enumerate(system.channels):
        g = evaluate_generator_hat(system.generator, system.warped_coords(ch, coords))
        parts[i] = (g.real**2 + g.imag**2) * ch.admissibility_weight(n)
    vals = np.array([kernels.pairwise_sum(parts[:, p]) for p in range(pts.shape[0])])
    mean = float(np.mean(vals))
    if mean <= 0:
        raise AdmissibilityError("vanishing admissibility quadrature")
    cov = float(np.std(vals) / mean)

    a_abs = [abs(c.a) for c in system.channels]
    smax = max(abs(s) for c in system.channels for s in c.s)
    note = (
        f"(a, s) domain truncated to [{min(a_abs):.6g}, {max(a_abs):.6g}] x "
        f"[-{smax:g}, {smax:g}]^{n - 1}, sign mode {system.channel_set.sign_mode}; "
        f"{len(excluded)} probe(s) outside the covered cone excluded"
    )
    return AdmissibilityResult(
        c_psi=mean,
        probes=tuple(tuple(p) for p in included),
        c_field=tuple(float(v) for v in vals),
        coefficient_of_variation=cov,
        truncation_note=note,
        excluded=tuple(excluded),
    )


def separable_reference(spec: GeneratorSpec, n: int) -> float:
    """1D-reduction value of the admissibility integral for the classical kind.

    Substituting r = a xi_1 and u_k = (s_k + xi_k/xi_1) a^{1/n - 1} in the
    (a, s) integral collapses it to
    [int |w(r)|^2 / r dr] * [int |v(u)|^2 du]^{n-1}, independent of xi.
    """
    if spec.kind != "classical":
        raise ValueError("separable reference defined for the classical kind")
    r0, r1 = spec.band

    def wsq_over_r(r):
        return _radial_window(spec, np.array([r]))[0] ** 2 / r

    def vsq(u):
        return _angular_window(spec, np.array([u]))[0] ** 2

    iw, _ = quad(wsq_over_r, r0, r1, limit=200)
    hv = spec.angular_halfwidth
    iv, _ = quad(vsq, -hv, hv, limit=200)
    return spec.amplitude**2 * iw * iv ** (n - 1)


def check_aliasing(system: ShearletSystem) -> list[int]:
    """Indices of channels whose first-axis band leaves the Nyquist box."""
    g = system.grid
    ximax = g.N / (4.0 * g.L)
    bad = []
    if system.generator.kind == "classical":
        _, r1 = system.generator.band
        for i, ch in enumerate(system.channels):
            if r1 / abs(ch.a) > ximax * (1 + 1e-12):
                bad.append(i)
    else:
        for i, ch in enumerate(system.channels):
            # effective Gaussian band edge where the profile falls below 1e-8
            b = system.generator.gd_scale
            reach = b * math.sqrt(math.log(1e16) / (2.0 * math.pi))
            if reach / abs(ch.a) > ximax * (1 + 1e-12):
                bad.append(i)
    return bad


def build_system(
    spec: GeneratorSpec,
    grid: SpatialGrid,
    a_min: float,
    a_max: float,
    scale_count: int,
    shear_max: float,
    shear_count: int,
    sign_mode: str = "positive",
    probes=None,
    memory_budget_bytes: int = 256 * 1024 * 1024,
) -> ShearletSystem:
    """Assemble the system, validate the Nyquist fit, compute admissibility."""
    cs = build_channel_set(a_min, a_max, scale_count, shear_max, shear_count,
                           grid.n, sign_mode)
    system = ShearletSystem(generator=spec, channel_set=cs, grid=grid,
                            memory_budget_bytes=memory_budget_bytes)
    bad = check_aliasing(system)
    if bad:
        chans = ", ".join(
            f"(a={system.channels[i].a:.6g}, s={system.channels[i].s})" for i in bad[:8]
        )
        more = "" if len(bad) <= 8 else f" and {len(bad) - 8} more"
        raise AliasingError(
            f"{len(bad)} channel band(s) exceed the Nyquist box: {chans}{more}"
        )
    system.admissibility = admissibility(system, probes)
    system.materialize_filters()
    return system


def normalize_system(system: ShearletSystem) -> ShearletSystem:
    """Rescale the generator amplitude so the admissibility constant is 1."""
    c = system.c_psi
    if c <= 0:
        raise AdmissibilityError("cannot normalize a system with c_psi <= 0")
    spec = replace(system.generator, amplitude=system.generator.amplitude / math.sqrt(c))
    out = ShearletSystem(
        generator=spec,
        channel_set=system.channel_set,
        grid=system.grid,
        memory_budget_bytes=system.memory_budget_bytes,
    )
    out.admissibility = admissibility(
        out, np.array(system.admissibility.probes) if system.admissibility else None
    )
    out.materialize_filters()
    return out
