"""Command-line interface.

Subcommands:
  run          propagate one configured run, write trajectory/spectrum/peaks
  scan-lambda  sweep the coupling strength, tabulate Rabi splittings
               against the eigenvalue oracle
  modes        normal-mode and polariton reports for the configured system
  spectrum     re-analyze an existing trajectory file

Configs are YAML files; the bundled figure recipes (fig1_lambda002,
fig1_lambda005, fig1_lambda010, fig2_kick_x, fig3_spinning) can be
named directly instead of a path.  POLARITONMD_OUTPUT_ROOT sets the
default output root.
"""

import argparse
import importlib.resources
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

from .analysis import (
    SplittingNotResolved,
    find_peaks,
    ir_spectrum,
    rabi_splitting,
    write_peaks,
    write_spectrum,
)
from .config import ConfigError, RunConfig, config_hash, load_config
from .integrate import NonFiniteForceError, read_trajectory
from .modes import (
    analyze_modes,
    polariton_gap,
    polariton_model,
    write_mode_report,
    write_polariton_report,
)
from .config import build_system
from .workflow import build_modes, execute_run, output_root

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONFIG = 2
EXIT_NUMERICS = 3

DEFAULT_SCAN_LAMBDAS = (0.02, 0.05, 0.1)


def _resolve_config(name_or_path) -> Path:
    """A filesystem path, or the name of a bundled recipe."""
    p = Path(name_or_path)
    if p.exists():
        return p
    stem = p.name.removesuffix(".yaml")
    res = importlib.resources.files("polaritonmd") / "recipes" / f"{stem}.yaml"
    if res.is_file():
        return Path(str(res))
    raise ConfigError(
        f"config {name_or_path!r} is neither a file nor a bundled recipe"
    )


def _load(args) -> RunConfig:
    return load_config(_resolve_config(args.config))


def cmd_run(args) -> int:
    cfg = _load(args)
    result = execute_run(cfg, out=args.out, seed_override=args.seed_override)
    traj = result.trajectory
    e = traj.energy_total
    rel = traj.energy_drift_abs / max(abs(e[0]), 1e-300)
    print(f"run {cfg.label}: {traj.n_samples} samples, "
          f"t_end = {traj.times_fs[-1]:.1f} fs")
    print(f"energy drift: {traj.energy_drift_abs:.3e} Ha "
          f"(relative {rel:.3e})")
    print(f"peaks ({len(result.peaks)}):")
    for p in result.peaks:
        print(f"  {p.wavenumber_cm1:10.2f} cm^-1  height {p.height:.3f}  "
              f"prominence {p.prominence:.3f}")
    for kind, path in sorted(result.files.items()):
        print(f"wrote {kind}: {path}")
    return EXIT_OK


def _with_lambda(cfg: RunConfig, lam: float) -> RunConfig:
    if not cfg.cavity:
        raise ConfigError("scan-lambda needs at least one cavity mode")
    cavity = tuple(replace(mc, lambda_au=lam) for mc in cfg.cavity)
    return replace(cfg, cavity=cavity, label=f"{cfg.label}_lambda{lam:g}")


def _scan_one(payload):
    """Worker: one coupling strength -> (lambda, dynamics, oracle, note)."""
    cfg, lam = payload
    cfg_l = _with_lambda(cfg, lam)
    center = cfg_l.cavity[0].omega_cm1
    matter, ff = build_system(cfg_l.system)
    oracle = polariton_gap(
        polariton_model(ff, matter, build_modes(cfg_l)), center)
    result = execute_run(cfg_l, write_files=False)
    try:
        dyn = rabi_splitting(result.spectrum, center,
                             min_prominence=cfg_l.analysis.min_prominence)
        note = ""
    except SplittingNotResolved:
        dyn = float("nan")
        note = "no splitting resolved"
    return lam, dyn, oracle, note


def cmd_scan_lambda(args) -> int:
    cfg = _load(args)
    if args.seed_override is not None:
        cfg = replace(cfg, initialization=replace(
            cfg.initialization, seed=args.seed_override))
    lambdas = args.lambdas
    payloads = [(cfg, lam) for lam in lambdas]
    if args.threads > 1:
        with ProcessPoolExecutor(max_workers=args.threads) as pool:
            rows = list(pool.map(_scan_one, payloads))
    else:
        rows = [_scan_one(p) for p in payloads]

    header = (f"{'lambda':>8}  {'omega_R dyn (cm^-1)':>20}  "
              f"{'omega_R oracle (cm^-1)':>22}  {'deviation':>10}  note")
    print(header)
    lines = ["# polaritonmd lambda scan v1",
             f"# config_hash {config_hash(cfg)}",
             "# columns: lambda_au omega_r_dynamics_cm1 "
             "omega_r_oracle_cm1 rel_deviation"]
    for lam, dyn, oracle, note in rows:
        if dyn == dyn and oracle > 0:  # dyn is not NaN
            dev = abs(dyn - oracle) / oracle
            dev_s = f"{dev:10.3%}"
        else:
            dev = float("nan")
            dev_s = f"{'-':>10}"
        dyn_s = f"{dyn:20.2f}" if dyn == dyn else f"{'-':>20}"
        print(f"{lam:8.4f}  {dyn_s}  {oracle:22.2f}  {dev_s}  {note}")
        lines.append(f"{lam:.6e} {dyn:.6e} {oracle:.6e} {dev:.6e}")

    out_dir = output_root(args.out) / (cfg.output_dir or "")
    out_dir.mkdir(parents=True, exist_ok=True)
    scan_path = out_dir / f"{cfg.label}_lambda_scan.dat"
    scan_path.write_text("\n".join(lines) + "\n")
    print(f"wrote scan table: {scan_path}")
    return EXIT_OK


def cmd_modes(args) -> int:
    cfg = _load(args)
    matter, ff = build_system(cfg.system)
    nm = analyze_modes(ff, matter)
    out_dir = output_root(args.out) / (cfg.output_dir or "") / cfg.label
    out_dir.mkdir(parents=True, exist_ok=True)
    header = {"config_hash": config_hash(cfg)}

    mode_path = out_dir / "mode_report.dat"
    write_mode_report(nm, mode_path, extra_header=header)
    print("normal modes (cm^-1, IR activity):")
    for i in range(nm.n_modes):
        print(f"  {nm.frequencies_cm1[i]:10.2f}  {nm.ir_activity[i]:.3e}")
    print(f"wrote mode report: {mode_path}")

    modes = build_modes(cfg)
    if modes:
        pm = polariton_model(ff, matter, modes)
        pol_path = out_dir / "polariton_report.dat"
        write_polariton_report(pm, pol_path, extra_header=header)
        print("polaritons (cm^-1, matter/photon weight):")
        for i in range(pm.frequencies_cm1.size):
            print(f"  {pm.frequencies_cm1[i]:10.2f}  "
                  f"{pm.matter_weight[i]:.3f}/{pm.photon_weight[i]:.3f}")
        print(f"wrote polariton report: {pol_path}")
    return EXIT_OK


def cmd_spectrum(args) -> int:
    traj = read_trajectory(args.trajectory)
    if args.config is not None:
        ana = _load(args).analysis
    else:
        from .config import AnalysisConfig

        ana = AnalysisConfig()
    spectrum = ir_spectrum(traj, components=ana.components, window=ana.window,
                           pad_factor=ana.pad_factor)
    peaks = find_peaks(spectrum, min_prominence=ana.min_prominence)

    traj_path = Path(args.trajectory)
    out_dir = Path(args.out) if args.out is not None else traj_path.parent
    out_dir.mkdir(parents=True, exist_ok=True)
    spec_path = out_dir / f"{traj_path.stem}_spectrum.dat"
    peaks_path = out_dir / f"{traj_path.stem}_peaks.dat"
    write_spectrum(spectrum, spec_path)
    write_peaks(peaks, peaks_path)

    print(f"peaks ({len(peaks)}):")
    for p in peaks:
        print(f"  {p.wavenumber_cm1:10.2f} cm^-1  height {p.height:.3f}  "
              f"prominence {p.prominence:.3f}")
    print(f"wrote spectrum: {spec_path}")
    print(f"wrote peaks: {peaks_path}")
    return EXIT_OK


def _lambda_list(text):
    try:
        values = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"bad lambda list {text!r}; expected comma-separated numbers"
        ) from None
    if not values:
        raise argparse.ArgumentTypeError("empty lambda list")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polaritonmd",
        description="Mean-field dynamics of molecules in optical cavities",
    )
    parser.add_argument("-q", "--quiet", action="store_true",
                        help="suppress progress logging")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_config=True):
        if needs_config:
            p.add_argument("--config", required=True,
                           help="config file path or bundled recipe name")
        else:
            p.add_argument("--config", default=None,
                           help="optional config for analysis settings")
        p.add_argument("--out", default=None,
                       help="output root (default: $POLARITONMD_OUTPUT_ROOT "
                            "or cwd)")
        p.add_argument("--seed-override", type=int, default=None,
                       help="replace the config's RNG seed")
        p.add_argument("--threads", type=int, default=1,
                       help="parallel workers where applicable")

    p_run = sub.add_parser("run", help="propagate one configured run")
    common(p_run)
    p_run.set_defaults(func=cmd_run)

    p_scan = sub.add_parser("scan-lambda",
                            help="sweep coupling strength, tabulate "
                                 "Rabi splittings vs the oracle")
    common(p_scan)
    p_scan.add_argument("--lambdas", type=_lambda_list,
                        default=list(DEFAULT_SCAN_LAMBDAS),
                        help="comma-separated coupling strengths "
                             "(default 0.02,0.05,0.1)")
    p_scan.set_defaults(func=cmd_scan_lambda)

    p_modes = sub.add_parser("modes",
                             help="normal-mode and polariton reports")
    common(p_modes)
    p_modes.set_defaults(func=cmd_modes)

    p_spec = sub.add_parser("spectrum",
                            help="re-analyze an existing trajectory file")
    p_spec.add_argument("--trajectory", required=True,
                        help="trajectory file to analyze")
    common(p_spec, needs_config=False)
    p_spec.set_defaults(func=cmd_spectrum)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except NonFiniteForceError as err:
        print(f"numerical blow-up: {err}", file=sys.stderr)
        return EXIT_NUMERICS
    except (OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
