"""Command-line entry point: ``skindefect <command> --config FILE --out DIR``.

Exit status is 0 on success, 2 for configuration errors and 3 for
numerical failures (solver, twist resolution, band matching).
"""
from __future__ import annotations

import argparse
import json
import sys

from .builders import HnParams, SshParams, build_ssh
from .classify import closure_brackets, critical_size, gap_scan
from .config import RunConfig, load_config
from .errors import ConfigError, ResolutionError, SolverError, SpecificationError
from .lattice import assemble
from .spectral import spectral_loop
from .sweep import (OutputSet, csv_text, build_spec, indexed, loop_csv, point_spectrum, run,
                    run_sweep, spectrum_csv, write_point)
from .topology import sigma_y_operator, symmetry_defect, winding_number

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


def _points(cfg: RunConfig):
    multi = cfg.sweep is not None
    for i, v in enumerate(cfg.sweep_values()):
        yield (i if multi else None), v


def _label(cfg, v):
    return "" if v is None else f"{cfg.sweep.parameter}={v} "


def cmd_spectrum(cfg, args, out):
    name = dict(cfg.outputs).get("spectrum_csv", "spectrum.csv")
    for i, v in _points(cfg):
        s = point_spectrum(cfg, v, backend=args.backend)
        out.write(indexed(name, i), spectrum_csv(s))
        print(f"{_label(cfg, v)}{cfg.bc}: {len(s)} eigenvalues, max residual {s.residuals.max():.2e}")


def cmd_loop(cfg, args, out):
    name = dict(cfg.outputs).get("loop_csv", "loop.csv")
    for i, v in _points(cfg):
        loop = spectral_loop(build_spec(cfg.model_params(v)), cfg.n_k, workers=args.workers,
                             backend=args.backend)
        out.write(indexed(name, i), loop_csv(loop))
        print(f"{_label(cfg, v)}{len(loop.cycles())} closed loops, n_k={loop.n_k}")


def cmd_winding(cfg, args, out):
    energy = complex(args.re, args.im)
    rows = []
    for _, v in _points(cfg):
        spec = build_spec(cfg.model_params(v))
        w = winding_number(spec, energy, cfg.n_k, eps_loop=cfg.thresholds.eps_loop,
                           workers=args.workers)
        value = "on_loop" if w.on_loop else str(w.value)
        rows.append((v, args.re, args.im, value, None if w.on_loop else w.phase_trace))
        print(f"{_label(cfg, v)}winding({energy}) = {value}")
    out.write("winding.csv", csv_text(("value", "re_energy", "im_energy", "winding", "phase_trace"), rows))


def cmd_classify(cfg, args, out):
    if cfg.sweep is not None:
        raise ConfigError("config has a sweep; use the 'sweep' command")
    result = run_sweep(cfg, args.workers, args.backend)
    write_point(out, cfg, result.classifications[0])
    print(" ".join(f"{k}={n}" for k, n in result.rows[0].counts.items()))


def cmd_sweep(cfg, args, out):
    result = run(cfg, out.out_dir, args.workers, args.backend)
    for r in result.rows:
        print(f"{_label(cfg, r.value)}" + " ".join(f"{k}={n}" for k, n in r.counts.items())
              + f" in_gap={r.n_in_gap}")


def cmd_critical_size(cfg, args, out):
    rows = []
    for _, v in _points(cfg):
        p = cfg.model_params(v)
        if not isinstance(p, HnParams):
            raise ConfigError("critical-size needs model 'hn'")
        n_c = critical_size(p, cfg.sizes(), cfg.thresholds, workers=args.workers, backend=args.backend)
        rows.append((v, n_c))
        print(f"{_label(cfg, v)}N_c = {'not found' if n_c is None else n_c}")
    out.write("critical_size.csv", csv_text(("value", "n_c"), rows))


def cmd_gap_scan(cfg, args, out):
    base = cfg.model_params()
    if not isinstance(base, SshParams):
        raise ConfigError("gap-scan needs model 'ssh'")
    rows = gap_scan(base, cfg.t_values(), n_k=min(cfg.n_k, 128), thresholds=cfg.thresholds,
                    workers=args.workers, backend=args.backend)
    out.write("gap_scan.csv", csv_text(
        ("t", "gap_width", "gap_open", "max_imag", "edge_present", "n_edge", "max_edge_imag"),
        [(r.t, r.gap_width, r.gap_open, r.max_imag, r.edge_present, len(r.edge_energies),
          max((abs(e.imag) for e in r.edge_energies), default=None)) for r in rows]))
    for a, b in closure_brackets(rows):
        print(f"gap changes between t={a} and t={b}")


def cmd_check_symmetry(cfg, args, out):
    p = cfg.model_params()
    if not isinstance(p, SshParams):
        raise ConfigError("check-symmetry needs model 'ssh'")
    H = assemble(build_ssh(p, with_defect=False))
    dev = symmetry_defect(H, sigma_y_operator(p.n_cells))
    out.write("symmetry.json", json.dumps({"operator": "I x sigma_y", "deviation": dev}, indent=2) + "\n")
    print(f"||T H^T T^-1 - H||_F = {dev:.3e}")


COMMANDS = {"spectrum": cmd_spectrum, "loop": cmd_loop, "winding": cmd_winding,
            "classify": cmd_classify, "sweep": cmd_sweep, "critical-size": cmd_critical_size,
            "gap-scan": cmd_gap_scan, "check-symmetry": cmd_check_symmetry}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="skindefect", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="JSON run configuration")
        sp.add_argument("--out", required=True, help="output directory")
        sp.add_argument("--workers", type=int, default=None,
                        help="worker threads (default: NHSE_WORKERS or available CPUs)")
        sp.add_argument("--backend", choices=("lapack", "qr"), default="lapack")
        if name == "winding":
            sp.add_argument("--re", type=float, required=True)
            sp.add_argument("--im", type=float, required=True)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.workers is not None and args.workers < 1:
            raise ConfigError("--workers must be positive")
        cfg = load_config(args.config)
        with OutputSet(args.out) as out:
            COMMANDS[args.command](cfg, args, out)
    except (ConfigError, SpecificationError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SolverError, ResolutionError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
