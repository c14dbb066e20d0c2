"""Run configuration: a flat INI file with nested sections.

The file format is the reproducibility contract: a config round-trips
losslessly through ``to_text``/``from_text`` and its canonical text is
hashed into every report.  No environment variables are consulted.
"""
from __future__ import annotations

import configparser
import hashlib
import io
import math
from dataclasses import dataclass, field

from .system import DEFAULT_BAND
from .weights import RegionSpec


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration."""


def _floats(text: str) -> tuple:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip() != "")
    except ValueError as exc:
        raise ConfigError(f"expected comma-separated floats, got {text!r}") from exc


def _fmt_floats(values) -> str:
    return ",".join(repr(float(v)) for v in values)


@dataclass(frozen=True)
class SignalSpec:
    name: str
    sigma: tuple
    center: tuple
    modulation: tuple | None = None


@dataclass(frozen=True)
class RegionConfig:
    name: str
    spec: RegionSpec
    roles: tuple  # subset of {nazarov_e1, nazarov_e2, local_e}


@dataclass
class RunConfig:
    n: int = 2
    seed: int = 0
    normalize: bool = True
    threads: int = 1
    L: float = 8.0
    N: int = 128
    generator_kind: str = "classical"
    band: tuple = DEFAULT_BAND
    radial_profile: str = "cos"
    radial_order: int = 2
    angular_profile: str = "sqrtspline"
    angular_order: int = 2
    angular_halfwidth: float = 1.0
    a_min: float = 1.0 / 16.0
    a_max: float = 1.0
    scale_count: int = 12
    shear_max: float = 3.0
    shear_count: int = 13
    sign_mode: str = "positive"
    equality_tol: float = 0.05
    inequality_tol: float = 1e-3
    verifiers: tuple = ("pitt", "beckner", "heisenberg", "sobolev_log",
                        "nazarov", "local", "local_sobolev")
    lambdas: tuple = (0.0, 0.25, 0.5, 0.75)
    alphas: tuple = (0.25, 0.5, 0.75)
    signals: tuple = ()
    regions: tuple = ()

    def to_text(self) -> str:
        cp = configparser.ConfigParser()
        cp["run"] = {
            "n": str(self.n), "seed": str(self.seed),
            "normalize": str(self.normalize).lower(), "threads": str(self.threads),
        }
        cp["grid"] = {"L": repr(self.L), "N": str(self.N)}
        cp["generator"] = {
            "kind": self.generator_kind,
            "band": _fmt_floats(self.band),
            "radial_profile": self.radial_profile,
            "radial_order": str(self.radial_order),
            "angular_profile": self.angular_profile,
            "angular_order": str(self.angular_order),
            "angular_halfwidth": repr(self.angular_halfwidth),
        }
        cp["channels"] = {
            "a_min": repr(self.a_min), "a_max": repr(self.a_max),
            "scale_count": str(self.scale_count),
            "shear_max": repr(self.shear_max), "shear_count": str(self.shear_count),
            "sign_mode": self.sign_mode,
        }
        cp["tolerances"] = {
            "equality": repr(self.equality_tol), "inequality": repr(self.inequality_tol),
        }
        cp["verify"] = {
            "verifiers": ",".join(self.verifiers),
            "lambdas": _fmt_floats(self.lambdas),
            "alphas": _fmt_floats(self.alphas),
        }
        for sig in self.signals:
            sec = f"signal:{sig.name}"
            cp[sec] = {"sigma": _fmt_floats(sig.sigma), "center": _fmt_floats(sig.center)}
            if sig.modulation is not None:
                cp[sec]["modulation"] = _fmt_floats(sig.modulation)
        for reg in self.regions:
            sec = f"region:{reg.name}"
            cp[sec] = {"kind": reg.spec.kind, "center": _fmt_floats(reg.spec.center)}
            if reg.spec.kind == "ball":
                cp[sec]["radius"] = repr(reg.spec.radius)
            else:
                cp[sec]["halfwidths"] = _fmt_floats(reg.spec.halfwidths)
            cp[sec]["roles"] = ",".join(reg.roles)
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()

    def config_hash(self) -> str:
        return hashlib.sha256(self.to_text().encode()).hexdigest()[:16]


def from_text(text: str) -> RunConfig:
    cp = configparser.ConfigParser()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config parse error: {exc}") from exc

    cfg = RunConfig()
    try:
        run = cp["run"]
        cfg.n = run.getint("n", cfg.n)
        cfg.seed = run.getint("seed", cfg.seed)
        cfg.normalize = run.getboolean("normalize", cfg.normalize)
        cfg.threads = run.getint("threads", cfg.threads)
        grid = cp["grid"]
        cfg.L = grid.getfloat("L", cfg.L)
        cfg.N = grid.getint("N", cfg.N)
        gen = cp["generator"]
        cfg.generator_kind = gen.get("kind", cfg.generator_kind)
        cfg.band = _floats(gen.get("band", _fmt_floats(cfg.band)))
        cfg.radial_profile = gen.get("radial_profile", cfg.radial_profile)
        cfg.radial_order = gen.getint("radial_order", cfg.radial_order)
        cfg.angular_profile = gen.get("angular_profile", cfg.angular_profile)
        cfg.angular_order = gen.getint("angular_order", cfg.angular_order)
        cfg.angular_halfwidth = gen.getfloat("angular_halfwidth", cfg.angular_halfwidth)
        ch = cp["channels"]
        cfg.a_min = ch.getfloat("a_min", cfg.a_min)
        cfg.a_max = ch.getfloat("a_max", cfg.a_max)
        cfg.scale_count = ch.getint("scale_count", cfg.scale_count)
        cfg.shear_max = ch.getfloat("shear_max", cfg.shear_max)
        cfg.shear_count = ch.getint("shear_count", cfg.shear_count)
        cfg.sign_mode = ch.get("sign_mode", cfg.sign_mode)
        if cp.has_section("tolerances"):
            cfg.equality_tol = cp["tolerances"].getfloat("equality", cfg.equality_tol)
            cfg.inequality_tol = cp["tolerances"].getfloat("inequality", cfg.inequality_tol)
        if cp.has_section("verify"):
            v = cp["verify"]
            cfg.verifiers = tuple(x for x in v.get(
                "verifiers", ",".join(cfg.verifiers)).split(",") if x)
            cfg.lambdas = _floats(v.get("lambdas", _fmt_floats(cfg.lambdas)))
            cfg.alphas = _floats(v.get("alphas", _fmt_floats(cfg.alphas)))
    except KeyError as exc:
        raise ConfigError(f"missing config section: {exc}") from exc

    signals = []
    regions = []
    for sec in cp.sections():
        if sec.startswith("signal:"):
            s = cp[sec]
            mod = s.get("modulation", None)
            signals.append(SignalSpec(
                name=sec.split(":", 1)[1],
                sigma=_floats(s.get("sigma", "1.0")),
                center=_floats(s.get("center", _fmt_floats((0.0,) * cfg.n))),
                modulation=None if mod is None else _floats(mod),
            ))
        elif sec.startswith("region:"):
            r = cp[sec]
            kind = r.get("kind", "ball")
            center = _floats(r.get("center", _fmt_floats((0.0,) * cfg.n)))
            if kind == "ball":
                spec = RegionSpec(kind="ball", center=center,
                                  radius=r.getfloat("radius", 1.0))
            else:
                spec = RegionSpec(kind="box", center=center,
                                  halfwidths=_floats(r.get("halfwidths", "1.0")))
            roles = tuple(x for x in r.get("roles", "").split(",") if x)
            regions.append(RegionConfig(name=sec.split(":", 1)[1], spec=spec, roles=roles))
    cfg.signals = tuple(signals)
    cfg.regions = tuple(regions)
    _validate(cfg)
    return cfg


def from_file(path) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return from_text(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def _validate(cfg: RunConfig) -> None:
    if cfg.n < 2:
        raise ConfigError(f"dimension must be >= 2, got {cfg.n}")
    if cfg.N < 16 or (cfg.N & (cfg.N - 1)) != 0:
        raise ConfigError(f"N must be a power of two >= 16, got {cfg.N}")
    if not 0 < cfg.a_min < cfg.a_max:
        raise ConfigError("scale range must satisfy 0 < a_min < a_max")
    if cfg.shear_count % 2 == 0:
        raise ConfigError("shear count must be odd (symmetric sampling)")
    for lam in cfg.lambdas:
        if not 0.0 <= lam < 1.0:
            raise ConfigError(f"lambda values must lie in [0, 1), got {lam}")
    for alpha in cfg.alphas:
        if not 0.0 < alpha < 1.0:
            raise ConfigError(f"alpha values must lie in (0, 1), got {alpha}")
    for sig in cfg.signals:
        if len(sig.sigma) != cfg.n or len(sig.center) != cfg.n:
            raise ConfigError(f"signal {sig.name}: vectors must have length n")
        if sig.modulation is not None and len(sig.modulation) != cfg.n:
            raise ConfigError(f"signal {sig.name}: modulation must have length n")
    for reg in cfg.regions:
        if len(reg.spec.center) != cfg.n:
            raise ConfigError(f"region {reg.name}: center must have length n")


# Default desk-scale configuration (n = 2).  Signal family: anisotropic
# Gaussians modulated to a lattice frequency inside the covered cone, a
# quarter of the shear-comb period off the channel-center direction; widths
# keep the spatial tail below the box threshold and the spectrum inside the
# scale-complete window.
_BASE_WIDTHS = (2.2, 2.5, 2.8, 3.1, 3.3)
_ANISOTROPIES = (1.0, 1.15, 1.0 / 1.15)
_MODULATION = (1.0, 0.125)
_SIGMA2 = 1.2


def default_signals(n: int = 2) -> tuple:
    if n != 2:
        raise ConfigError("default signal family is defined for n = 2")
    sigs = []
    for i, s0 in enumerate(_BASE_WIDTHS):
        for j, rho in enumerate(_ANISOTROPIES):
            sigs.append(SignalSpec(
                name=f"g{i}{j}",
                sigma=(s0 * rho, _SIGMA2 / rho),
                center=(0.0, 0.0),
                modulation=_MODULATION,
            ))
    return tuple(sigs)


def default_regions(n: int = 2) -> tuple:
    if n != 2:
        raise ConfigError("default regions are defined for n = 2")
    return (
        RegionConfig("ball1", RegionSpec("ball", (0.0, 0.0), radius=1.0),
                     roles=("nazarov_e1",)),
        RegionConfig("box2", RegionSpec("box", (0.0, 0.0), halfwidths=(2.0, 2.0)),
                     roles=("nazarov_e1",)),
        RegionConfig("specball", RegionSpec("ball", _MODULATION, radius=0.75),
                     roles=("nazarov_e2", "local_e")),
    )


def default_config() -> RunConfig:
    cfg = RunConfig()
    cfg.signals = default_signals()
    cfg.regions = default_regions()
    _validate(cfg)
    return cfg


def dilation_sweep(base: SignalSpec, factors=(2 ** -0.5, 2 ** -0.25, 1.0, 2 ** 0.25, 2 ** 0.5)):
    """Isotropically dilated copies c^{-n/2} f(x/c).

    Widths scale by c and the modulation by 1/c (the spectrum dilates the
    other way).  The default factors keep every member inside the box-tail
    and band-coverage constraints of the default grid.
    """
    out = []
    for c in factors:
        out.append(SignalSpec(
            name=f"{base.name}[c={c:.4g}]",
            sigma=tuple(s * c for s in base.sigma),
            center=tuple(x * c for x in base.center),
            modulation=None if base.modulation is None
            else tuple(v / c for v in base.modulation),
        ))
    return tuple(out)
