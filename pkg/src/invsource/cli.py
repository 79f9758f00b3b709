"""Command-line front end.

Exit codes: 0 success, 2 invalid input, 3 failed verification.  Verification
lines start with ``CHECK`` so they can be filtered by scripts.
"""
from __future__ import annotations

import argparse
import hashlib
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from . import io as fio
from . import oracles
from .config import ConfigError, RunConfig, load_config
from .imaging import boundary_scan_point, grid_sweep, moment_scan, threshold_mask
from .probes import ProbeSpec, Regime
from .synthesis import FarField, inject_noise, synthesize_dataset

EXIT_OK, EXIT_INVALID, EXIT_VERIFY = 0, 2, 3


class InputError(ValueError):
    pass


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="invsource", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, data=False):
        sp.add_argument("--config", required=True, help="INI run configuration")
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument("--threads", type=int, default=1, help="worker threads")
        sp.add_argument("--seed", type=int, default=None, help="noise seed (overrides [noise] seed)")
        if data:
            sp.add_argument("datasets", nargs="*",
                            help="data set files; synthesised from the configuration when omitted")

    common(sub.add_parser("synthesize", help="write one data file per observation"))
    common(sub.add_parser("image-far", help="indicator grid from far-field data"), data=True)
    common(sub.add_parser("image-near", help="indicator grid from near-field data"), data=True)
    common(sub.add_parser("scan-tmax", help="eta-scan for an unknown terminal moment"), data=True)
    common(sub.add_parser("scan-tmin", help="eta-scan for an unknown initial moment"), data=True)
    common(sub.add_parser("verify", help="run the numerical oracle suite"), data=True)
    return p


# -- helpers --------------------------------------------------------------------------

def _observations(cfg: RunConfig):
    return cfg.observations.all(cfg.dim)


def _synthesize(cfg: RunConfig, threads: int, seed: int | None):
    model = cfg.model()
    grid = cfg.band.grid()
    quad = cfg.quad()
    seed = cfg.noise.seed if seed is None else seed
    out = []
    for i, mode in enumerate(_observations(cfg)):
        ds = synthesize_dataset(model, mode, grid, quad, threads)
        if cfg.noise.level > 0:
            ds = inject_noise(ds, cfg.noise.level, seed + i)
        out.append(ds)
    return out


def _load_or_synthesize(cfg, files, threads, seed):
    if not files:
        return _synthesize(cfg, threads, seed)
    return [fio.read_dataset(f) for f in files]


def _consistency_key(ds) -> str:
    m = ds.manifest
    key = {k: m.get(k) for k in ("model_hash", "grid", "quadrature")}
    key["noise_level"] = (m.get("noise") or {}).get("level", 0.0)
    return fio.canonical_json(key)


def _check_same_manifest(datasets):
    keys = {_consistency_key(ds) for ds in datasets}
    if len(keys) > 1:
        raise InputError("data sets come from different runs (model, band, quadrature or noise differ)")


def input_hash(datasets) -> str:
    text = "\n".join(sorted(fio.canonical_json(ds.manifest) for ds in datasets))
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def _run_manifest(args, cfg, extra=None) -> dict:
    m = {"tool": f"invsource {__version__}", "command": args.command,
         "config": str(Path(args.config).resolve()), "threads": args.threads,
         "seed": cfg.noise.seed if args.seed is None else args.seed,
         "model": cfg.model().describe(), "model_hash": cfg.model().hash(),
         "grid": cfg.band.grid().describe(), "quadrature": cfg.quad().describe(),
         "regime": cfg.source.regime.value, "eta": cfg.imaging.eta, "delta": cfg.imaging.delta,
         "finished": time.strftime("%Y-%m-%dT%H:%M:%S%z")}
    m.update(extra or {})
    return m


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


# -- commands -----------------------------------------------------------------------

def cmd_synthesize(args, cfg: RunConfig) -> int:
    out = _out_dir(args)
    datasets = _synthesize(cfg, args.threads, args.seed)
    names = []
    for i, ds in enumerate(datasets):
        name = f"{ds.mode.kind}_{i:03d}.dat"
        fio.write_dataset(ds, out / name)
        names.append(name)
    fio.write_manifest(_run_manifest(args, cfg, {"files": names}), out / "run.json")
    print(f"wrote {len(names)} data sets to {out}")
    return EXIT_OK


def cmd_image(args, cfg: RunConfig, mode: str) -> int:
    if cfg.observations.mode != mode and not args.datasets:
        raise InputError(f"configuration observes '{cfg.observations.mode}' data, command expects '{mode}'")
    datasets = _load_or_synthesize(cfg, args.datasets, args.threads, args.seed)
    if any(ds.mode.kind != mode for ds in datasets):
        raise InputError(f"image-{mode} needs {mode}-field data sets only")
    _check_same_manifest(datasets)
    img = cfg.imaging
    box = img.search_box(len(datasets[0].mode.vector))
    grid = grid_sweep(datasets, box, img.eta, cfg.source.regime, cfg.source.known, img.eps,
                      args.threads, img.method)
    mask = threshold_mask(grid, img.delta)
    grid.manifest["input_hash"] = input_hash(datasets)
    out = _out_dir(args)
    fio.write_grid(grid, out / "grid.txt")
    fio.write_pgm(grid, out / "grid.pgm")
    fio.write_manifest(_run_manifest(args, cfg, {"input_hash": grid.manifest["input_hash"],
                                                 "mask_points": int(mask.sum())}), out / "run.json")
    print(f"grid {tuple(grid.shape)} with {int(mask.sum())} points above delta={img.delta:g}")
    return EXIT_OK


def _scan_etas(cfg: RunConfig, regime: Regime) -> np.ndarray:
    sc, src = cfg.scan, cfg.source
    if regime is Regime.TMAX_UNKNOWN:
        lo = sc.eta_min if sc.eta_min is not None else src.t_min + sc.eta_step
        hi = sc.eta_max if sc.eta_max is not None else src.t_max + 2.0
    else:
        lo = sc.eta_min if sc.eta_min is not None else src.t_min - 2.0
        hi = sc.eta_max if sc.eta_max is not None else src.t_max - sc.eta_step
    n = int(round((hi - lo) / sc.eta_step))
    return lo + sc.eta_step * np.arange(n + 1)


def cmd_scan(args, cfg: RunConfig, regime: Regime) -> int:
    if cfg.source.regime is not regime:
        raise InputError(f"configuration declares '{cfg.source.unknown}' unknown; "
                         f"use scan-{cfg.source.unknown.replace('_', '')}")
    datasets = _load_or_synthesize(cfg, args.datasets, args.threads, args.seed)
    _check_same_manifest(datasets)
    sc = cfg.scan
    if sc.direction is not None:
        target = np.asarray(sc.direction, dtype=float)
        if datasets[0].mode.kind == "far":
            target = target / np.linalg.norm(target)
    else:
        target = np.asarray(_observations(cfg)[0].vector)
    match = [ds for ds in datasets if np.allclose(ds.mode.vector, target, atol=1e-12, rtol=0)]
    if not match:
        raise InputError(f"no data set observed at {target.tolist()}")
    main = match[0]
    opposite = None
    if sc.use_pair:
        opp = [ds for ds in datasets if np.allclose(ds.mode.vector, -target, atol=1e-12, rtol=0)]
        if not opp:
            raise InputError("use_pair requires the opposite observation")
        opposite = opp[0]
    if sc.z is not None:
        z = np.asarray(sc.z, dtype=float)
    else:
        if main.mode.kind != "far":
            raise InputError("the eps0 recipe for z needs far-field data; set [scan] z")
        z = boundary_scan_point(cfg.model().shape, main.mode.vector, regime, sc.eps0)
    known = cfg.source.known
    curve = moment_scan(main, z, _scan_etas(cfg, regime), regime, known, sc.eps, opposite,
                        cfg.imaging.method, sc.threshold)
    curve.manifest["input_hash"] = input_hash([main] + ([opposite] if opposite else []))
    out = _out_dir(args)
    fio.write_scan(curve, out / "scan.txt")
    fio.write_manifest(_run_manifest(args, cfg, {"input_hash": curve.manifest["input_hash"],
                                                 "estimate": curve.estimate}), out / "run.json")
    est = "none" if curve.estimate is None else f"{curve.estimate:.6g}"
    print(f"estimate {est} (resolution {curve.resolution:g})")
    return EXIT_OK


def cmd_verify(args, cfg: RunConfig) -> int:
    model = cfg.model()
    grid = cfg.band.grid()
    datasets = _load_or_synthesize(cfg, args.datasets, args.threads, args.seed)
    results = [oracles.symmetry_check(ds) for ds in datasets]
    dim = model.dim
    first = datasets[0].mode
    direction = first.vector if isinstance(first, FarField) else np.eye(dim)[0]
    probe_mode = FarField(tuple(direction))
    probe = ProbeSpec(Regime.TMAX_UNKNOWN, cfg.source.t_min + 1.0, cfg.source.t_min, probe_mode,
                      (0.3,) + (0.2,) * (dim - 1))
    results.append(oracles.probe_ft_check(probe))
    results.append(oracles.factorization_check(model, first, grid, datasets[0]))
    results.append(oracles.time_domain_check(model, direction, quad=cfg.quad()))
    results.append(oracles.ft_support_check(model, direction))
    for r in results:
        print(r.line())
    ok = all(r.passed for r in results)
    out = _out_dir(args)
    fio.write_manifest(_run_manifest(args, cfg, {"checks": [r.line() for r in results]}), out / "verify.json")
    print("verification " + ("passed" if ok else "FAILED"))
    return EXIT_OK if ok else EXIT_VERIFY


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return EXIT_INVALID
    try:
        cfg = load_config(args.config)
        if args.command == "synthesize":
            return cmd_synthesize(args, cfg)
        if args.command == "image-far":
            return cmd_image(args, cfg, "far")
        if args.command == "image-near":
            return cmd_image(args, cfg, "near")
        if args.command == "scan-tmax":
            return cmd_scan(args, cfg, Regime.TMAX_UNKNOWN)
        if args.command == "scan-tmin":
            return cmd_scan(args, cfg, Regime.TMIN_UNKNOWN)
        return cmd_verify(args, cfg)
    except (ConfigError, InputError, fio.FormatError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
