"""Command-line experiment runner.

Subcommands: ``build-library``, ``extend-library``, ``characterize``,
``scan``.  Exit codes: 0 success, 2 configuration error, 3 physics/tracking
error, 4 numeric error.
"""

import argparse
import csv
import sys
from dataclasses import replace as dc_replace

import numpy as np

from . import estimator, libio, protocol
from .config import parse_config
from .errors import NumericError, TrackingError

SCAN_COLUMNS = ["scan_param", "value", "method", "cond_A", "eps_clean",
                "eps_noisy", "seed", "error"]


def _g17(x):
    return format(float(x), ".17g")


def cmd_build_library(args):
    cfg = parse_config(args.config)
    ens = cfg.build_ensemble()
    if args.naive:
        lib = protocol.run_naive(ens, cfg.naive_pulse(),
                                 save_states=args.save_states)
    else:
        lib = protocol.run_ssmc(ens, cfg.pump(), order=cfg.suppression_order(),
                                save_states=args.save_states)
    libio.save_library(lib, args.out)
    A = protocol.assemble_A(lib, hard_zero_blocks=args.hard_zero_blocks)
    cond = estimator.condition_number(A)
    print(f"library: {args.out}")
    print(f"kind={lib.kind} family={lib.family} n_species={lib.n_species} "
          f"n_t={lib.n_t} segments={lib.n_segments}")
    print(f"cond(A) = {cond:.6e}")
    return 0


def cmd_extend_library(args):
    lib = libio.load_library(args.library)
    if lib.family == "morse":
        if args.mass is None:
            raise ValueError("extending a molecular library needs --mass")
        d = dict(lib.species[-1])
        d["m"] = args.mass
        label = args.label or f"m={args.mass:g}"
    else:
        if args.U is None:
            raise ValueError("extending a lattice library needs --U")
        d = dict(lib.species[-1])
        d["U"] = args.U
        label = args.label or f"U={args.U:g}t0"
    new = protocol.extend_library(lib, d, label=label,
                                  save_states=args.save_states)
    libio.save_library(new, args.out)
    print(f"library: {args.out}")
    print(f"n_species={new.n_species} extension_steps={new.extension_step_count}")
    A = protocol.assemble_A(new)
    print(f"cond(A) = {estimator.condition_number(A):.6e}")
    return 0


def _characterize_once(A, y_true, sigma_rel, seed, method):
    R = estimator.mixture_response(A, y_true)
    if sigma_rel > 0:
        R = estimator.add_noise(R, sigma_rel, seed)
    y_est = estimator.solve_concentrations(A, R)
    return estimator.EstimationReport(
        method=method, y_true=y_true, y_est=y_est,
        epsilon=estimator.error_norm(y_true, y_est),
        cond_A=estimator.condition_number(A),
        noise_sigma_rel=sigma_rel, seed=seed)


def cmd_characterize(args):
    lib = libio.load_library(args.library)
    A = protocol.assemble_A(lib, hard_zero_blocks=args.hard_zero_blocks)
    if args.y is not None:
        y_true = np.array([float(v) for v in args.y.split(",")])
        if y_true.size != lib.n_species:
            raise ValueError(f"--y needs {lib.n_species} entries")
    else:
        y_true = estimator.random_concentrations(lib.n_species, args.seed)
    report = _characterize_once(A, y_true, args.sigma, args.seed, lib.kind)
    print(f"method      = {report.method}")
    print(f"cond(A)     = {report.cond_A:.6e}")
    print(f"sigma_rel   = {report.noise_sigma_rel:g}  seed = {args.seed}")
    print("y_true      = " + " ".join(f"{v:.6f}" for v in report.y_true))
    print("y_est       = " + " ".join(f"{v:.6f}" for v in report.y_est))
    print(f"epsilon     = {report.epsilon:.6e}")
    if args.out:
        with open(args.out, "a", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            if fh.tell() == 0:
                w.writerow(["method", "cond_A", "epsilon", "sigma_rel", "seed"])
            w.writerow([report.method, _g17(report.cond_A),
                        _g17(report.epsilon), _g17(report.noise_sigma_rel),
                        args.seed])
    return 0


def _scan_configs(cfg):
    """One (value, config) per scan point; sigma scans reuse one config."""
    axis = cfg.scan_axis
    if axis is None or not cfg.scan_values:
        raise ValueError("scan needs scan_axis and scan_values")
    for v in cfg.scan_values:
        if axis == "T":
            yield v, dc_replace(cfg, T=float(v))
        elif axis == "n_s":
            yield v, dc_replace(cfg, n_species=int(v))
        elif axis == "dm":
            yield v, dc_replace(cfg, delta_m=float(v))
        elif axis == "dU":
            yield v, dc_replace(cfg, delta_U=float(v))
        else:   # sigma
            yield v, dc_replace(cfg, sigma_rel=float(v))


def run_scan_point(cfg, hard_zero_blocks=False):
    """Build both libraries for one scan point; returns {method: (lib, A)}."""
    out = {}
    ens = cfg.build_ensemble()
    lib = protocol.run_ssmc(ens, cfg.pump(), order=cfg.suppression_order(),
                            save_states=False)
    out["ssmc"] = (lib, protocol.assemble_A(lib, hard_zero_blocks=hard_zero_blocks))
    ens = cfg.build_ensemble()
    lib = protocol.run_naive(ens, cfg.naive_pulse())
    out["naive"] = (lib, protocol.assemble_A(lib))
    return out

def cmd_scan(args):
    cfg = parse_config(args.config)
    rows = []
    cached = None    # sigma scans share one pair of libraries
    for value, point_cfg in _scan_configs(cfg):
        try:
            if cfg.scan_axis == "sigma":
                if cached is None:
                    cached = run_scan_point(point_cfg, args.hard_zero_blocks)
                libs = cached
            else:
                libs = run_scan_point(point_cfg, args.hard_zero_blocks)
        except (TrackingError, NumericError) as exc:
            for method in ("ssmc", "naive"):
                rows.append([cfg.scan_axis, _g17(value), method, "", "", "",
                             "", str(exc)])
            continue
        for method, (lib, A) in libs.items():
            cond = estimator.condition_number(A)
            for seed in range(point_cfg.seed0, point_cfg.seed0 + point_cfg.n_seeds):
                y = estimator.random_concentrations(lib.n_species, seed)
                R = estimator.mixture_response(A, y)
                eps_clean = estimator.error_norm(
                    y, estimator.solve_concentrations(A, R))
                Rn = estimator.add_noise(R, point_cfg.sigma_rel, seed)
                eps_noisy = estimator.error_norm(
                    y, estimator.solve_concentrations(A, Rn))
                rows.append([cfg.scan_axis, _g17(value), method, _g17(cond),
                             _g17(eps_clean), _g17(eps_noisy), seed, ""])
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SCAN_COLUMNS)
        w.writerows(rows)
    print(f"scan: {len(rows)} rows -> {args.out}")
    return 0


def build_parser():
    p = argparse.ArgumentParser(
        prog="ssmc",
        description="Single-pulse mixture characterization via tracking control")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build-library", help="run the suppression protocol "
                       "(or the naive baseline) and store the library")
    b.add_argument("--config", required=True)
    b.add_argument("--out", required=True)
    b.add_argument("--naive", action="store_true")
    b.add_argument("--save-states", action="store_true")
    b.add_argument("--hard-zero-blocks", action="store_true")
    b.set_defaults(func=cmd_build_library)

    e = sub.add_parser("extend-library", help="append one species to a "
                       "stored library at linear cost")
    e.add_argument("--library", required=True)
    e.add_argument("--out", required=True)
    e.add_argument("--mass", type=float, help="new reduced mass (molecular)")
    e.add_argument("--U", type=float, help="new onsite repulsion in t0 (lattice)")
    e.add_argument("--label")
    e.add_argument("--save-states", action="store_true")
    e.set_defaults(func=cmd_extend_library)

    c = sub.add_parser("characterize", help="recover concentrations of a "
                       "synthetic mixture from a stored library")
    c.add_argument("--library", required=True)
    c.add_argument("--y", help="comma-separated true concentrations")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--sigma", type=float, default=0.0,
                   help="relative noise std (times ||R_mix||_inf)")
    c.add_argument("--out", help="append a CSV row here")
    c.add_argument("--hard-zero-blocks", action="store_true")
    c.set_defaults(func=cmd_characterize)

    s = sub.add_parser("scan", help="sweep one parameter, running both "
                       "methods per point; writes a CSV table")
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--hard-zero-blocks", action="store_true")
    s.set_defaults(func=cmd_scan)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except TrackingError as exc:
        print(f"tracking error: {exc}", file=sys.stderr)
        return 3
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
