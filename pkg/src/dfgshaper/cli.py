"""Command line interface: ``dfgshaper {shape,sweep,pm-sweep,info}``.

Settings are resolved as built-in preset < ``--config`` file < flags.
Every command that writes files also writes ``manifest.json`` next to them;
passing that manifest back as ``--config`` reproduces the run.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .dfg import DfgScheme, PhasematchingSpec
from .experiments import (
    DEFAULT_PM_FWHMS,
    find_fidelity_range,
    sweep_bandwidth,
    sweep_phasematching,
    write_csv,
    write_json,
)
from .pipeline import (
    PRESETS,
    ConfigError,
    PipelineConfig,
    StageError,
    config_from_dict,
    config_to_dict,
    dual_mode_separation_on_output,
    load_config,
    run_pipeline,
    target_for,
)
from .spectral import ghz_to_nm

# flag -> StageToggles field
STAGE_FLAGS = {
    "no_envelope": "envelope",
    "no_window": "window",
    "no_shaper_res": "shaper_resolution",
    "no_dual_mode": "dual_mode",
    "no_dye_linewidth": "dye_linewidth",
    "no_spectrometer": "spectrometer",
    "no_phasematching": "phasematching",
}


def _order(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"order must be nonnegative, got {value}")
    return value


def _positive(text):
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


class _Parser(argparse.ArgumentParser):
    # usage errors share exit code 1 with invalid configs
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", type=Path, help="JSON config file or run manifest")
    p.add_argument("--preset", choices=PRESETS, help="built-in parameter preset")
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")
    p.add_argument("--format", choices=("csv", "structured"), default="csv")
    p.add_argument("--input-wavelength", type=float, help="input laser wavelength, nm")
    p.add_argument("--pump-center", type=float, help="pump centre wavelength, nm")
    p.add_argument("--pm-shape", choices=("gaussian", "sinc2"))
    for flag in STAGE_FLAGS:
        p.add_argument("--" + flag.replace("_", "-"), dest=flag, action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dfgshaper", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("shape", help="model one Hermite-Gauss target")
    _common(p)
    p.add_argument("--order", type=_order, required=True)
    p.add_argument("--sigma", type=_positive, required=True, help="base Gaussian width, nm")
    p.add_argument("--pm-fwhm", type=float, help="phasematching FWHM on the pump axis, nm")

    p = sub.add_parser("sweep", help="overlap versus sigma for several orders")
    _common(p)
    p.add_argument("--orders", type=_order, nargs="+", default=[0, 1, 2, 3, 4])
    p.add_argument("--sigma-start", type=_positive, default=0.25)
    p.add_argument("--sigma-stop", type=_positive, default=10.0)
    p.add_argument("--sigma-step", type=_positive, default=0.25)
    p.add_argument("--pm-fwhm", type=float, help="phasematching FWHM on the pump axis, nm")
    p.add_argument("--threshold", type=float, nargs="*", default=[0.95, 0.90],
                   help="report sigma ranges with overlap at or above these values")

    p = sub.add_parser("pm-sweep", help="overlap versus sigma for several phasematching widths")
    _common(p)
    p.add_argument("--order", type=_order, default=4)
    p.add_argument("--pm-fwhms", type=_positive, nargs="+", default=list(DEFAULT_PM_FWHMS))
    p.add_argument("--sigma-start", type=_positive, default=0.25)
    p.add_argument("--sigma-stop", type=_positive, default=10.0)
    p.add_argument("--sigma-step", type=_positive, default=0.25)

    p = sub.add_parser("info", help="print derived quantities of a configuration")
    p.add_argument("--config", type=Path)
    p.add_argument("--preset", choices=PRESETS)
    p.add_argument("--input-wavelength", type=float)
    p.add_argument("--pump-center", type=float)
    return parser


def resolve_config(args, default_preset="current-experiment"):
    """Apply preset, config file and flags in increasing precedence."""
    if args.config is not None:
        if not args.config.exists():
            raise ConfigError(f"config file {args.config} not found")
        config, scheme = load_config(args.config)
        if args.preset is not None and args.preset != config.preset:
            data = json.loads(args.config.read_text())
            data = data.get("config", data)
            data["pipeline"]["preset"] = args.preset
            config, scheme = config_from_dict(data)
    else:
        config = PipelineConfig.from_preset(args.preset or default_preset)
        scheme = DfgScheme()
    try:
        if args.input_wavelength is not None or args.pump_center is not None:
            scheme = DfgScheme(
                args.input_wavelength or scheme.input_wavelength,
                args.pump_center or scheme.pump_center,
            )
        toggles = {field: False for flag, field in STAGE_FLAGS.items() if getattr(args, flag, False)}
        if toggles:
            config = config.with_stages(**toggles)
        pm_fwhm = getattr(args, "pm_fwhm", None)
        pm_shape = getattr(args, "pm_shape", None)
        if pm_fwhm is not None or pm_shape is not None:
            current = config.phasematching or PhasematchingSpec(0.2)
            config = replace(config, phasematching=PhasematchingSpec(
                pm_fwhm if pm_fwhm is not None else current.fwhm,
                pm_shape or current.shape,
            ))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return config, scheme


def _write_manifest(out: Path, args, config, scheme, outputs, extra=None):
    manifest = {
        "tool": "dfgshaper",
        "version": __version__,
        "command": args.command,
        "arguments": {k: (str(v) if isinstance(v, Path) else v) for k, v in vars(args).items()},
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "config": config_to_dict(config, scheme),
        "outputs": [str(p) for p in outputs],
    }
    if extra:
        manifest.update(extra)
    path = out / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2) + "\n")
    return path


def _write_spectrum(path: Path, spectrum, fmt: str, label: str, overlap: float):
    header = f"{label} spectrum, overlap {overlap!r}\nwavelength_nm,intensity"
    delimiter = "," if fmt == "csv" else " "
    data = np.column_stack([spectrum.wavelengths, spectrum.intensity])
    np.savetxt(path, data, delimiter=delimiter, header=header, fmt="%.17g")


def cmd_shape(args) -> int:
    config, scheme = resolve_config(args)
    try:
        target = target_for(args.order, args.sigma, scheme, config)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    result = run_pipeline(target, scheme, config)
    args.out.mkdir(parents=True, exist_ok=True)
    if args.format == "csv":
        outputs = [args.out / "programmed.csv", args.out / "modeled.csv"]
        _write_spectrum(outputs[0], result.programmed, "csv", "programmed", result.overlap)
        _write_spectrum(outputs[1], result.modeled, "csv", "modeled", result.overlap)
    else:
        outputs = [args.out / "spectra.json"]
        doc = {
            "order": args.order,
            "sigma_nm": args.sigma,
            "overlap": result.overlap,
            "wavelength_nm": result.programmed.wavelengths.tolist(),
            "programmed": result.programmed.intensity.tolist(),
            "modeled": result.modeled.intensity.tolist(),
        }
        outputs[0].write_text(json.dumps(doc) + "\n")
    _write_manifest(args.out, args, config, scheme, outputs, {"overlap": result.overlap})
    print(f"order {args.order}  sigma {args.sigma:g} nm  preset {config.preset}  "
          f"overlap {result.overlap:.6f}")
    return 0


def _write_records(args, records, config, scheme, extra=None):
    args.out.mkdir(parents=True, exist_ok=True)
    if args.format == "csv":
        path = args.out / f"{args.command}.csv"
        write_csv(records, path)
    else:
        path = args.out / f"{args.command}.json"
        write_json(records, path)
    _write_manifest(args.out, args, config, scheme, [path], extra)
    return path


def cmd_sweep(args) -> int:
    config, scheme = resolve_config(args)
    t0 = time.perf_counter()
    records = sweep_bandwidth(args.orders, args.sigma_start, args.sigma_stop,
                              args.sigma_step, config, scheme)
    ranges = {
        str(th): {str(k): v for k, v in find_fidelity_range(records, th).items()}
        for th in args.threshold
    }
    path = _write_records(args, records, config, scheme, {"fidelity_ranges": ranges})
    print(f"{len(records)} records -> {path} ({time.perf_counter() - t0:.1f} s)")
    for th, per_order in ranges.items():
        for order, intervals in per_order.items():
            spans = ", ".join(f"[{a:g}, {b:g}]" for a, b in intervals) or "none"
            print(f"  overlap >= {th}: order {order}: sigma {spans} nm")
    return 0


def cmd_pm_sweep(args) -> int:
    config, scheme = resolve_config(args, default_preset="pulsed-outlook")
    if config.phasematching is None:
        config = replace(config, phasematching=PhasematchingSpec(args.pm_fwhms[0]))
    if not config.stages.phasematching:
        raise ConfigError("pm-sweep needs the phasematching stage (use --preset pulsed-outlook)")
    t0 = time.perf_counter()
    records = sweep_phasematching(args.order, args.pm_fwhms, args.sigma_start,
                                  args.sigma_stop, args.sigma_step, config, scheme)
    path = _write_records(args, records, config, scheme)
    print(f"{len(records)} records -> {path} ({time.perf_counter() - t0:.1f} s)")
    return 0


def info_report(config: PipelineConfig, scheme: DfgScheme) -> str:
    out_c = scheme.output_center
    on = config.stages

    def line(label, enabled, text):
        return f"  {label:<26}{text if enabled else 'disabled'}"

    lines = [
        f"preset                      {config.preset}",
        f"input wavelength            {scheme.input_wavelength:g} nm",
        f"pump centre                 {scheme.pump_center:g} nm",
        f"output centre               {out_c:.2f} nm",
        f"width compression           {scheme.compression:.4f} (output nm per pump nm)",
        "stages:",
        line("pump envelope", on.envelope, f"{config.envelope_fwhm:g} nm FWHM"),
        line("shaper window", on.window,
             f"{config.shaper_window[0]:g}-{config.shaper_window[1]:g} nm"),
        line("shaper resolution", on.shaper_resolution,
             f"{config.shaper_resolution:g} GHz = "
             f"{ghz_to_nm(config.shaper_resolution, scheme.pump_center):.4f} nm "
             f"at {scheme.pump_center:g} nm"),
        line("phasematching", on.phasematching and config.phasematching is not None,
             "" if config.phasematching is None else
             f"{config.phasematching.fwhm:g} nm ({config.phasematching.shape}) = "
             f"{config.phasematching.fwhm * scheme.compression:.4f} nm at {out_c:.2f} nm"),
        line("dye linewidth", on.dye_linewidth,
             f"{config.dye_linewidth:g} GHz = "
             f"{ghz_to_nm(config.dye_linewidth, out_c):.4f} nm at {out_c:.2f} nm"),
        line("dual-mode shift", on.dual_mode,
             f"{config.dual_mode_separation:g} nm at {scheme.input_wavelength:g} nm = "
             f"{dual_mode_separation_on_output(config.dual_mode_separation, scheme):.4f} nm "
             f"at {out_c:.2f} nm, weights {config.dual_mode_ratio[0]:g}:"
             f"{config.dual_mode_ratio[1]:g}"),
        line("spectrometer", on.spectrometer,
             f"{config.spectrometer_resolution:g} GHz = "
             f"{ghz_to_nm(config.spectrometer_resolution, out_c):.4f} nm at {out_c:.2f} nm "
             f"({ghz_to_nm(config.spectrometer_resolution, 870.0):.4f} nm at 870 nm)"),
    ]
    return "\n".join(lines)


def cmd_info(args) -> int:
    config, scheme = resolve_config(args)
    print(info_report(config, scheme))
    return 0


COMMANDS = {"shape": cmd_shape, "sweep": cmd_sweep, "pm-sweep": cmd_pm_sweep, "info": cmd_info}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"dfgshaper: invalid configuration: {exc}", file=sys.stderr)
        return 1
    except StageError as exc:
        print(f"dfgshaper: pipeline failed at {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
