"""Command-line driver: build systems, run transforms, verify inequalities.

Subcommands: admissibility, transform, energy, verify <name|all>,
convergence.  Exit codes: 0 all good, 1 at least one inequality violated
beyond tolerance, 2 usage/config errors.  Outputs are byte-stable for a
fixed (config, seed) regardless of thread count: no timestamps, fixed field
order, deterministic reductions.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import config as cfgmod
from . import verify as vmod
from .config import ConfigError, RunConfig, dilation_sweep
from .grid import SampledSignal, gaussian_signal, make_grid, save_signal
from .system import (GeneratorSpec, ShearletSystem, build_system, normalize_system,
                     separable_reference)
from .transform import energy, forward, moyal, save_coefficients, weighted_spectral_identity
from .verify import VerificationContext
from .weights import weight_field

VERIFIER_NAMES = ("pitt", "beckner", "heisenberg", "sobolev_log",
                  "nazarov", "local", "local_sobolev")


def build_grid(cfg: RunConfig):
    return make_grid(cfg.n, cfg.L, cfg.N)


def build_generator(cfg: RunConfig) -> GeneratorSpec:
    return GeneratorSpec(
        kind=cfg.generator_kind,
        band=cfg.band,
        radial_profile=cfg.radial_profile,
        radial_order=cfg.radial_order,
        angular_profile=cfg.angular_profile,
        angular_order=cfg.angular_order,
        angular_halfwidth=cfg.angular_halfwidth,
    )


def build_configured_system(cfg: RunConfig, scale_count=None, shear_count=None,
                            grid=None) -> ShearletSystem:
    grid = grid if grid is not None else build_grid(cfg)
    system = build_system(
        build_generator(cfg), grid,
        a_min=cfg.a_min, a_max=cfg.a_max,
        scale_count=scale_count or cfg.scale_count,
        shear_max=cfg.shear_max,
        shear_count=shear_count or cfg.shear_count,
        sign_mode=cfg.sign_mode,
    )
    if cfg.normalize:
        system = normalize_system(system)
    return system


def build_signals(cfg: RunConfig, grid) -> list[SampledSignal]:
    out = []
    for spec in cfg.signals:
        sig = gaussian_signal(grid, center=spec.center, sigma=spec.sigma,
                              modulation=spec.modulation)
        sig.metadata["label"] = spec.name
        out.append(sig)
    return out


def _regions(cfg: RunConfig, role: str):
    return [r for r in cfg.regions if role in r.roles]


def run_verify(cfg: RunConfig, selection: str = "all", threads: int | None = None):
    """Run the selected verifiers over the configured signal family.

    Returns (inequality_reports, constant_reports); each report is a
    (signal_label, report) pair in deterministic config order.
    """
    names = VERIFIER_NAMES if selection == "all" else (selection,)
    for name in names:
        if name not in VERIFIER_NAMES:
            raise ConfigError(f"unknown verifier {name!r}; choose from {VERIFIER_NAMES}")
    threads = threads if threads is not None else cfg.threads

    grid = build_grid(cfg)
    system = build_configured_system(cfg, grid=grid)
    signals = build_signals(cfg, grid)

    e1_regions = _regions(cfg, "nazarov_e1")
    e2_regions = _regions(cfg, "nazarov_e2")
    local_regions = _regions(cfg, "local_e")

    reports = []
    constants = []
    for sig in signals:
        ctx = VerificationContext(sig, system, threads=threads)
        label = sig.metadata["label"]
        for name in names:
            if name == "pitt":
                for lam in cfg.lambdas:
                    tol = cfg.equality_tol if lam == 0.0 else cfg.inequality_tol
                    reports.append((label, vmod.verify_pitt(ctx, lam=lam, tolerance=tol)))
            elif name == "beckner":
                reports.append((label, vmod.verify_beckner(ctx, tolerance=cfg.inequality_tol)))
            elif name == "heisenberg":
                reports.append((label, vmod.verify_heisenberg(ctx, tolerance=cfg.inequality_tol)))
            elif name == "sobolev_log":
                reports.append((label, vmod.verify_sobolev_log(ctx, tolerance=cfg.inequality_tol)))
            elif name == "nazarov":
                reports.append((label, vmod.verify_nazarov_concentration(
                    ctx, e1=None, tolerance=cfg.equality_tol)))
                for reg in e1_regions:
                    reports.append((label, vmod.verify_nazarov_concentration(
                        ctx, e1=reg.spec, tolerance=cfg.inequality_tol)))
                for reg1 in e1_regions:
                    for reg2 in e2_regions:
                        constants.append((label, vmod.nazarov_empirical_constant(
                            ctx, e1=reg1.spec, e2=reg2.spec)))
            elif name == "local":
                for reg in local_regions:
                    for alpha in cfg.alphas:
                        constants.append((label, vmod.verify_local(
                            ctx, e=reg.spec, alpha=alpha)))
            elif name == "local_sobolev":
                reports.append((label, vmod.verify_local_sobolev(
                    ctx, tolerance=cfg.inequality_tol)))
    return reports, constants


def emit_report(reports, constants, outdir: Path, cfg: RunConfig) -> list[Path]:
    """Write reports.json and summary.csv; byte-stable for fixed (config, seed)."""
    if not reports and not constants:
        raise ValueError("nothing to emit: empty report list")
    outdir.mkdir(parents=True, exist_ok=True)
    chash = cfg.config_hash()

    records = []
    for label, rep in reports:
        rec = {"kind": "inequality", "signal": label, **rep.to_record(),
               "config_hash": chash}
        records.append(rec)
    for label, rep in constants:
        rec = {"kind": "constant", "signal": label, **rep.to_record(),
               "config_hash": chash}
        records.append(rec)

    jpath = outdir / "reports.json"
    with open(jpath, "w", encoding="utf-8") as fh:
        json.dump(records, fh, indent=2)
        fh.write("\n")

    cpath = outdir / "summary.csv"
    with open(cpath, "w", encoding="utf-8") as fh:
        fh.write("name,signal,lhs,rhs,slack,pass\n")
        for label, rep in reports:
            fh.write(f"{rep.name},{label},{rep.lhs!r},{rep.rhs!r},"
                     f"{rep.slack!r},{str(rep.passed).lower()}\n")
        for label, rep in constants:
            fh.write(f"{rep.name},{label},{rep.constant!r},,,\n")

    tpath = outdir / "config.echo.ini"
    with open(tpath, "w", encoding="utf-8") as fh:
        fh.write(cfg.to_text())
    return [jpath, cpath, tpath]


def cmd_admissibility(cfg: RunConfig, outdir: Path) -> int:
    system = build_configured_system(cfg)
    adm = system.admissibility
    manifest = {
        "generator": {
            "kind": system.generator.kind,
            "band": list(system.generator.band),
            "radial_profile": system.generator.radial_profile,
            "radial_order": system.generator.radial_order,
            "angular_profile": system.generator.angular_profile,
            "angular_order": system.generator.angular_order,
            "angular_halfwidth": system.generator.angular_halfwidth,
            "amplitude": system.generator.amplitude,
        },
        "scale_nodes": list(system.channel_set.a_nodes),
        "scale_weights": list(system.channel_set.a_weights),
        "shear_nodes": list(system.channel_set.s_nodes),
        "shear_weights": list(system.channel_set.s_weights),
        "sign_mode": system.channel_set.sign_mode,
        "c_psi": adm.c_psi,
        "coefficient_of_variation": adm.coefficient_of_variation,
        "separable_reference": separable_reference(system.generator, cfg.n)
        if cfg.generator_kind == "classical" else None,
        "truncation_note": adm.truncation_note,
        "probes": [list(p) for p in adm.probes],
        "c_field": list(adm.c_field),
        "config_hash": cfg.config_hash(),
    }
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / "system.manifest.json"
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    print(f"c_psi = {adm.c_psi:.9g}  CoV = {adm.coefficient_of_variation:.4%}  "
          f"-> {path}")
    return 0


def cmd_transform(cfg: RunConfig, outdir: Path, threads: int) -> int:
    grid = build_grid(cfg)
    system = build_configured_system(cfg, grid=grid)
    outdir.mkdir(parents=True, exist_ok=True)
    for sig in build_signals(cfg, grid):
        label = sig.metadata["label"]
        save_signal(sig, outdir / f"{label}.shsg")
        coeffs = forward(sig, system, threads=threads)
        save_coefficients(coeffs, outdir / f"{label}.shlc")
        print(f"{label}: wrote {label}.shsg and {label}.shlc "
              f"({len(system.channels)} channels)")
    return 0


def cmd_energy(cfg: RunConfig, outdir: Path, threads: int) -> int:
    grid = build_grid(cfg)
    system = build_configured_system(cfg, grid=grid)
    outdir.mkdir(parents=True, exist_ok=True)
    rows = []
    for sig in build_signals(cfg, grid):
        coeffs = forward(sig, system, threads=threads)
        e = energy(coeffs)
        ratio = e / (system.c_psi * sig.norm_sq())
        rows.append((sig.metadata["label"], e, ratio))
        print(f"{sig.metadata['label']}: energy={e:.9g} ratio={ratio:.6f}")
    path = outdir / "energy.csv"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("signal,energy,ratio\n")
        for label, e, ratio in rows:
            fh.write(f"{label},{e!r},{ratio!r}\n")
    worst = max(abs(r - 1.0) for _, _, r in rows)
    print(f"worst |ratio - 1| = {worst:.4%} -> {path}")
    return 0


def cmd_verify(cfg: RunConfig, selection: str, outdir: Path, threads: int) -> int:
    reports, constants = run_verify(cfg, selection, threads=threads)
    emit_report(reports, constants, outdir, cfg)
    failed = [(label, r) for label, r in reports if not r.passed]
    for label, rep in reports:
        status = "pass" if rep.passed else "FAIL"
        print(f"[{status}] {rep.name:28s} {label:8s} lhs={rep.lhs:+.6e} "
              f"rhs={rep.rhs:+.6e} slack={rep.slack:+.3e}")
    for label, rep in constants:
        print(f"[info] {rep.name:28s} {label:8s} constant={rep.constant:.6g}")
    print(f"{len(reports) - len(failed)}/{len(reports)} inequality checks passed; "
          f"{len(constants)} constants estimated -> {outdir}")
    return 1 if failed else 0


def cmd_convergence(cfg: RunConfig, outdir: Path, threads: int) -> int:
    """Refinement ladder behind the empirical tolerances.

    Rungs refine the channel quadrature and then the grid; rows report the
    worst energy-identity deviation over three representative signals, the
    admissibility spread, and one paired-identity error.
    """
    ladder = [
        (cfg.N, cfg.scale_count, cfg.shear_count),
        (cfg.N, 2 * cfg.scale_count, 2 * cfg.shear_count - 1),
        (2 * cfg.N, 2 * cfg.scale_count, 2 * cfg.shear_count - 1),
    ]
    base = cfg.signals[len(cfg.signals) // 2] if cfg.signals else None
    if base is None:
        raise ConfigError("convergence needs at least one configured signal")
    picks = [cfg.signals[0], base, cfg.signals[-1]]

    rows = []
    for (N, J, K) in ladder:
        grid = make_grid(cfg.n, cfg.L, N)
        system = build_configured_system(cfg, scale_count=J, shear_count=K, grid=grid)
        devs = []
        for spec in picks:
            sig = gaussian_signal(grid, center=spec.center, sigma=spec.sigma,
                                  modulation=spec.modulation)
            coeffs = forward(sig, system, threads=threads)
            ratio = energy(coeffs) / (system.c_psi * sig.norm_sq())
            devs.append(abs(ratio - 1.0))
        sig0 = gaussian_signal(grid, center=picks[1].center, sigma=picks[1].sigma,
                               modulation=picks[1].modulation)
        ident = weighted_spectral_identity(
            sig0, system, weight_field(grid, "log_abs_xi"))
        cov = system.admissibility.coefficient_of_variation
        rows.append((N, J, K, max(devs), cov, ident.relative_error))
        print(f"N={N:4d} J={J:3d} K={K:3d}  energy dev={max(devs):.5f}  "
              f"CoV={cov:.5f}  log-identity err={ident.relative_error:.5f}")

    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / "convergence.csv"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("N,scale_count,shear_count,energy_dev,admissibility_cov,log_identity_err\n")
        for row in rows:
            fh.write(",".join(repr(x) for x in row) + "\n")
    print(f"-> {path}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="shearuncert",
        description="Scale-shear filter bank and uncertainty-inequality verification",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("admissibility", "transform", "energy", "verify", "convergence"):
        p = sub.add_parser(name)
        if name == "verify":
            p.add_argument("selection", nargs="?", default="all",
                           help="verifier name or 'all'")
        p.add_argument("--config", required=True, help="path to the INI run config")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override config seed")
        p.add_argument("--threads", type=int, default=None, help="worker threads")

    args = parser.parse_args(argv)
    try:
        cfg = cfgmod.from_file(args.config)
        if args.seed is not None:
            cfg.seed = args.seed
        threads = args.threads if args.threads is not None else cfg.threads
        outdir = Path(args.out)
        if args.command == "admissibility":
            return cmd_admissibility(cfg, outdir)
        if args.command == "transform":
            return cmd_transform(cfg, outdir, threads)
        if args.command == "energy":
            return cmd_energy(cfg, outdir, threads)
        if args.command == "verify":
            return cmd_verify(cfg, args.selection, outdir, threads)
        if args.command == "convergence":
            return cmd_convergence(cfg, outdir, threads)
        raise ConfigError(f"unknown command {args.command}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
