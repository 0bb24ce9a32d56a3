"""Command-line front end.

Subcommands: run (single pipeline pass + artifacts), montecarlo (variation
sweep), deviation (cell I-V deviation sweep), perf (power/runtime/energy
table).  Settings resolve in priority order: command line > config file
(flat key=value) > built-in defaults.  Exit codes: 0 success, 1 I/O,
2 configuration, 3 internal error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .cell import (
    MODEL_IDEAL,
    MODEL_SIGMOID,
    CellParams,
    SigmoidProductParams,
    fit_gamma_from_file,
    sweep_curves,
    sweep_deviation,
)
from .dog import IntensityImage, dog, make_gaussian_kernel
from .errors import (
    ConfigurationError,
    DimensionError,
    FormatError,
    InternalError,
    InvalidGainError,
    InvalidParameterError,
    UnachievableGainError,
)
from .imageio import (
    PATTERN_NAMES,
    binarize,
    codes_to_gray,
    intensity_to_gray,
    load_idx_image,
    make_pattern,
    read_pgm,
    write_pgm,
)
from .perf import PIXELS_FULL, PIXELS_VALID, PerfSpec, energy, power, realtime_check, runtime
from .pipeline import (
    DIST_LOGNORMAL,
    DIST_TRUNCNORM,
    AdcSpec,
    AnalogConfig,
    VariationModel,
    monte_carlo,
    run_dog_pipeline,
)

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_IO = 1
EXIT_CONFIG = 2
EXIT_INTERNAL = 3


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigurationError(f"not a boolean: {text!r}")


DEFAULTS = {
    "input": "pattern:step",
    "index": 0,
    "threshold": 0.5,
    "no_binarize": False,
    "sigma1": 0.85,
    "sigma_ratio": math.sqrt(2.0),
    "half_width": 1,
    "gamma": 1.0,
    "i_in": 100e-9,
    "model": MODEL_IDEAL,
    "steepness": 10.0,
    "half_separation": 0.4,
    "calibrate": None,
    "variation_gamma": 0.0,
    "variation_gain": 0.0,
    "variation_sensor": 0.0,
    "distribution": DIST_TRUNCNORM,
    "bits": 8,
    "vref": None,
    "adc_bypass": False,
    "transimpedance": 10e6,
    "settle_time": 0.5e-6,
    "supply": 3.3,
    "parallelism": 1,
    "pixel_mode": PIXELS_FULL,
    "adc_separate": False,
    "seed": 0,
    "out_dir": "out",
}

_CONVERTERS = {
    "input": str,
    "index": int,
    "threshold": float,
    "no_binarize": _bool,
    "sigma1": float,
    "sigma_ratio": float,
    "half_width": int,
    "gamma": float,
    "i_in": float,
    "model": str,
    "steepness": float,
    "half_separation": float,
    "calibrate": str,
    "variation_gamma": float,
    "variation_gain": float,
    "variation_sensor": float,
    "distribution": str,
    "bits": int,
    "vref": float,
    "adc_bypass": _bool,
    "transimpedance": float,
    "settle_time": float,
    "supply": float,
    "parallelism": int,
    "pixel_mode": str,
    "adc_separate": _bool,
    "seed": int,
    "out_dir": str,
}


def parse_config_file(path) -> dict:
    entries = {}
    with open(path, "r", encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key = key.strip().replace("-", "_")
            if not sep or not key:
                raise ConfigurationError(f"{path}:{lineno}: expected key=value, got {raw!r}")
            if key not in DEFAULTS:
                raise ConfigurationError(f"{path}:{lineno}: unknown setting {key!r}")
            entries[key] = value.strip()
    return entries


def resolve_settings(args) -> dict:
    """Merge CLI args over config-file entries over defaults."""
    filecfg = parse_config_file(args.config) if getattr(args, "config", None) else {}
    settings = {}
    for key, default in DEFAULTS.items():
        cli_value = getattr(args, key, None)
        if cli_value is not None:
            settings[key] = cli_value
        elif key in filecfg:
            settings[key] = _CONVERTERS[key](filecfg[key])
        else:
            settings[key] = default
    if not 0.0 <= settings["threshold"] <= 1.0:
        raise ConfigurationError("threshold must be in [0, 1]")
    if settings["sigma_ratio"] <= 1.0:
        raise ConfigurationError("sigma-ratio must exceed 1")
    return settings


def _add_common_options(p: argparse.ArgumentParser) -> None:
    # Defaults are all None so the config-file layer can tell "not given on
    # the command line" apart from an explicit value.
    p.add_argument("--config", help="flat key=value settings file")
    g = p.add_argument_group("input")
    g.add_argument("--input", help="IDX file, PGM file, or pattern:NAME "
                   f"(patterns: {', '.join(PATTERN_NAMES)})")
    g.add_argument("--index", type=int, help="image index within an IDX file")
    g.add_argument("--threshold", type=float, help="binarization threshold in [0,1]")
    g.add_argument("--no-binarize", action="store_const", const=True, default=None,
                   help="feed grayscale intensities instead of binary pixels")
    g = p.add_argument_group("kernels")
    g.add_argument("--sigma1", type=float, help="narrow Gaussian scale")
    g.add_argument("--sigma-ratio", type=float, help="sigma2/sigma1 (> 1)")
    g.add_argument("--half-width", type=int, help="kernel half-width P")
    g = p.add_argument_group("cell model")
    g.add_argument("--gamma", type=float, help="cell curvature constant (1/V^2)")
    g.add_argument("--i-in", type=float, help="nominal input current (A)")
    g.add_argument("--model", choices=[MODEL_IDEAL, MODEL_SIGMOID])
    g.add_argument("--steepness", type=float, help="sigmoid-product logistic slope (1/V)")
    g.add_argument("--half-separation", type=float, help="sigmoid-product half-separation (V)")
    g.add_argument("--calibrate", help="fit gamma from a (dv, i_out) sweep file")
    g = p.add_argument_group("process variation")
    g.add_argument("--variation-gamma", type=float, help="relative sigma of per-cell gamma")
    g.add_argument("--variation-gain", type=float, help="relative sigma of per-cell gain")
    g.add_argument("--variation-sensor", type=float, help="relative sigma of per-pixel sensors")
    g.add_argument("--distribution", choices=[DIST_TRUNCNORM, DIST_LOGNORMAL])
    g = p.add_argument_group("analog chain")
    g.add_argument("--bits", type=int, help="ADC resolution")
    g.add_argument("--vref", type=float, help="ADC full scale (V); default auto")
    g.add_argument("--adc-bypass", action="store_const", const=True, default=None,
                   help="skip quantization (infinite-resolution mode)")
    g.add_argument("--transimpedance", type=float, help="current-to-voltage gain (ohm)")
    g.add_argument("--settle-time", type=float, help="per-pixel settling time (s)")
    g = p.add_argument_group("performance accounting")
    g.add_argument("--supply", type=float, help="supply voltage (V)")
    g.add_argument("--parallelism", type=int, help="concurrent filter blocks")
    g.add_argument("--pixel-mode", choices=[PIXELS_FULL, PIXELS_VALID])
    g.add_argument("--adc-separate", action="store_const", const=True, default=None,
                   help="bill ADC conversions on top of settling")
    p.add_argument("--seed", type=int, help="RNG seed")
    p.add_argument("--out-dir", help="artifact directory")


def build_cell_params(s: dict) -> CellParams:
    gamma = s["gamma"]
    if s["calibrate"]:
        gamma = fit_gamma_from_file(s["calibrate"])
    return CellParams(
        gamma=gamma,
        i_in_nominal=s["i_in"],
        model_kind=s["model"],
        sigmoid=SigmoidProductParams(s["steepness"], s["half_separation"]),
    )


def build_analog_config(s: dict) -> AnalogConfig:
    return AnalogConfig(
        cell_params=build_cell_params(s),
        variation=VariationModel(
            gamma_rel_sigma=s["variation_gamma"],
            gain_rel_sigma=s["variation_gain"],
            sensor_rel_sigma=s["variation_sensor"],
            distribution=s["distribution"],
        ),
        adc=AdcSpec(bits=s["bits"], vref=s["vref"]),
        transimpedance=s["transimpedance"],
        settle_time=s["settle_time"],
        adc_bypass=s["adc_bypass"],
    )


def build_perf_spec(s: dict) -> PerfSpec:
    side = 2 * s["half_width"] + 1
    return PerfSpec(
        supply_v=s["supply"],
        node_current=s["i_in"],
        node_count=side * side,
        settle_time=s["settle_time"],
        parallelism=s["parallelism"],
        pixel_count_mode=s["pixel_mode"],
        half_width=s["half_width"],
        adc_separate=s["adc_separate"],
    )


def build_kernels(s: dict):
    k1 = make_gaussian_kernel(s["sigma1"], s["half_width"], normalize=True)
    k2 = make_gaussian_kernel(s["sigma1"] * s["sigma_ratio"], s["half_width"], normalize=True)
    return k1, k2


def load_input(s: dict) -> IntensityImage:
    source = s["input"]
    if source.startswith("pattern:"):
        image = make_pattern(source.split(":", 1)[1])
    else:
        path = Path(source)
        if path.suffix.lower() in (".pgm", ".pnm"):
            image = read_pgm(path)
        else:
            image = load_idx_image(path, s["index"])
    if not s["no_binarize"]:
        image = binarize(image, s["threshold"])
    return image


def _settings_echo(s: dict) -> dict:
    return {k: v for k, v in s.items()}


def write_json(path: Path, doc: dict) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(doc, f, indent=2, sort_keys=True)
        f.write("\n")


def _report_skeleton(s: dict) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "config": _settings_echo(s),
    }


def cmd_run(args) -> int:
    s = resolve_settings(args)
    image = load_input(s)
    k1, k2 = build_kernels(s)
    cfg = build_analog_config(s)
    codes, report = run_dog_pipeline(image, k1, k2, cfg, seed=s["seed"],
                                     perf_spec=build_perf_spec(s))
    oracle = dog(image, k1, k2)
    oracle_codes = oracle.values * (
        min(report.scale_1, report.scale_2) * s["i_in"] * s["transimpedance"]
        / report.vref * (2 ** s["bits"] - 1)
    )

    out = Path(s["out_dir"])
    out.mkdir(parents=True, exist_ok=True)
    artifacts = {
        "input": str(out / "input.pgm"),
        "oracle_dog": str(out / "oracle_dog.pgm"),
        "analog_dog": str(out / "analog_dog.pgm"),
        "report": str(out / "report.json"),
    }
    write_pgm(artifacts["input"], intensity_to_gray(image))
    write_pgm(artifacts["oracle_dog"], codes_to_gray(np.rint(oracle_codes), s["bits"]))
    write_pgm(artifacts["analog_dog"], codes_to_gray(codes.codes, s["bits"]))

    doc = _report_skeleton(s)
    doc["sim_report"] = report.to_dict()
    doc["artifacts"] = artifacts
    write_json(Path(artifacts["report"]), doc)

    print(f"power      {report.power_w * 1e6:.6g} uW")
    print(f"runtime    {report.runtime_s * 1e6:.6g} us per convolution")
    print(f"energy     {report.energy_j * 1e9:.6g} nJ per convolution")
    print(f"realtime   {report.realtime}")
    print(f"MAE        {report.mean_abs_error_code:.4f} codes (vs digital oracle)")
    print(f"artifacts  {out}/")
    return EXIT_OK


def cmd_montecarlo(args) -> int:
    s = resolve_settings(args)
    if args.trials < 1:
        raise ConfigurationError("need at least one trial")
    levels = [float(x) for x in args.levels.split(",")] if args.levels else [s["variation_gamma"]]
    image = load_input(s)
    k1, k2 = build_kernels(s)
    perf_spec = build_perf_spec(s)

    out = Path(s["out_dir"])
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "montecarlo.csv"
    rows = []
    aggregates = []
    for level in levels:
        level_settings = dict(s)
        level_settings[f"variation_{args.sweep_param}"] = level
        cfg = build_analog_config(level_settings)
        summary = monte_carlo(image, k1, k2, cfg, args.trials, s["seed"])
        for t in range(args.trials):
            rows.append([level, t, s["seed"] + t,
                         summary.per_trial_mae[t], summary.per_trial_flip_rate[t]])
        aggregates.append({
            "level": level,
            "mean_mae": summary.mean_mae,
            "std_mae": summary.std_mae,
            "max_mae": summary.max_mae,
            "mean_flip_rate": summary.mean_flip_rate,
        })
    with open(csv_path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["level", "trial", "seed", "mean_abs_error_code", "flip_rate"])
        writer.writerows(rows)

    doc = _report_skeleton(s)
    doc["sweep_param"] = args.sweep_param
    doc["trials"] = args.trials
    doc["levels"] = aggregates
    doc["artifacts"] = {"csv": str(csv_path)}
    write_json(out / "montecarlo.json", doc)
    for agg in aggregates:
        print(f"level {agg['level']:g}: MAE {agg['mean_mae']:.4f} +- {agg['std_mae']:.4f}, "
              f"flip rate {agg['mean_flip_rate']:.4f}")
    return EXIT_OK


def cmd_deviation(args) -> int:
    s = resolve_settings(args)
    params = build_cell_params(s)
    report = sweep_deviation(params, args.sweep_lo, args.sweep_hi, args.points, args.reference)
    dv, i_out, ref = sweep_curves(params, args.sweep_lo, args.sweep_hi, args.points,
                                  args.reference)

    out = Path(s["out_dir"])
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "deviation.csv"
    with open(csv_path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["dv_v", "i_out_a", "reference_a", "abs_deviation_a"])
        for row in zip(dv, i_out, ref, np.abs(i_out - ref)):
            writer.writerow([f"{x:.12e}" for x in row])

    doc = _report_skeleton(s)
    doc["deviation"] = {
        "sweep_lo_v": report.sweep_lo,
        "sweep_hi_v": report.sweep_hi,
        "n_points": report.n_points,
        "reference": report.reference,
        "avg_abs_deviation_a": report.avg_abs_deviation,
        "max_abs_deviation_a": report.max_abs_deviation,
        "extrapolated": report.extrapolated,
    }
    doc["artifacts"] = {"csv": str(csv_path)}
    write_json(out / "deviation.json", doc)

    print(f"average deviation {report.avg_abs_deviation * 1e9:.4f} nA")
    print(f"max deviation     {report.max_abs_deviation * 1e9:.4f} nA")
    if report.extrapolated:
        print("warning: sweep leaves the characterized +-1.3 V window", file=sys.stderr)
    return EXIT_OK


def cmd_perf(args) -> int:
    s = resolve_settings(args)
    if args.width < 1 or args.height < 1:
        raise ConfigurationError("image dimensions must be positive")
    spec = build_perf_spec(s)
    p = power(spec)
    t = runtime(args.height, args.width, spec)
    e = energy(args.height, args.width, spec)
    rt = realtime_check(t)

    print(f"{'power':<22}{p * 1e6:.6g} uW")
    print(f"{'runtime/convolution':<22}{t * 1e6:.6g} us")
    print(f"{'energy/convolution':<22}{e * 1e9:.6g} nJ")
    print(f"{'full-DoG runtime':<22}{2 * t * 1e6:.6g} us (2x extrapolation)")
    print(f"{'full-DoG energy':<22}{2 * e * 1e9:.6g} nJ (2x extrapolation)")
    print(f"{'realtime (< 42 ms)':<22}{rt}")

    out = Path(s["out_dir"])
    out.mkdir(parents=True, exist_ok=True)
    doc = _report_skeleton(s)
    doc["perf"] = {
        "width": args.width,
        "height": args.height,
        "power_w": p,
        "runtime_s": t,
        "energy_j": e,
        "dog_runtime_s": 2 * t,
        "dog_energy_j": 2 * e,
        "realtime": rt,
    }
    write_json(out / "perf.json", doc)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flexdog",
        description="Behavioral simulator of an analog DoG accelerator "
                    "built from flexible-TFT Gilbert Gaussian cells.",
    )
    parser.add_argument("--version", action="version", version=f"flexdog {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="single pipeline pass with artifacts")
    _add_common_options(p_run)
    p_run.set_defaults(func=cmd_run)

    p_mc = sub.add_parser("montecarlo", help="process-variation Monte Carlo sweep")
    _add_common_options(p_mc)
    p_mc.add_argument("--trials", type=int, default=100)
    p_mc.add_argument("--levels", help="comma-separated variation levels to sweep")
    p_mc.add_argument("--sweep-param", choices=["gamma", "gain", "sensor"], default="gamma")
    p_mc.set_defaults(func=cmd_montecarlo)

    p_dev = sub.add_parser("deviation", help="cell-vs-Gaussian deviation sweep")
    _add_common_options(p_dev)
    p_dev.add_argument("--sweep-lo", type=float, default=-1.3)
    p_dev.add_argument("--sweep-hi", type=float, default=1.3)
    p_dev.add_argument("--points", type=int, default=261)
    p_dev.add_argument("--reference", choices=["fitted-gaussian", "eq4-gaussian"],
                       default="fitted-gaussian")
    p_dev.set_defaults(func=cmd_deviation)

    p_perf = sub.add_parser("perf", help="power/runtime/energy table")
    p_perf.add_argument("width", type=int)
    p_perf.add_argument("height", type=int)
    _add_common_options(p_perf)
    p_perf.set_defaults(func=cmd_perf)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FormatError, FileNotFoundError, IsADirectoryError, PermissionError, OSError) as exc:
        print(f"flexdog: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (
        ConfigurationError,
        InvalidParameterError,
        DimensionError,
        InvalidGainError,
        UnachievableGainError,
        IndexError,
    ) as exc:
        print(f"flexdog: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - map anything else to the invariant code
        print(f"flexdog: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
