"""Command line front end: scenario configs in, CSV/JSON out."""

import csv
import json
import os
import sys
from pathlib import Path

import click
import numpy as np

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

from . import beamsplit, sim, uwb
from .beamsplit import SplitSpec
from .channel import AntennaGains, CarrierSpec
from .geometry import PolarPoint, RisLayout, TrajectorySpec
from .optimizer import PhaseSet
from .uwb import AnchorPair, RangingNoise

OUT_ENV = "RISTRACK_OUT"


class ConfigError(Exception):
    pass


# every recognized config key; unknown keys are rejected with their path
SCHEMA = {
    "layout": {"modules_x", "modules_y", "elems_per_module_x", "elems_per_module_y",
               "module_width_m", "module_height_m"},
    "carrier": {"frequency_hz", "wavelength_m"},
    "gains": {"tx_gain_dbi", "rx_gain_dbi"},
    "tx": {"distance_m", "angle_deg", "height_m"},
    "trajectory": {"start_distance_m", "start_angle_deg", "start_height_m",
                   "radial_speed_m_per_s", "angular_speed_deg_per_s",
                   "duration_s", "sample_rate_hz"},
    "phases": {"t_count"},
    "split": {"method", "factor_deg", "factor_m", "beam_count", "phase_matching"},
    "anchors": {"baseline_m", "height_offset_m"},
    "uwb": {"mode", "sigma_range_m", "bias_range_m", "seed"},
    "correction": {"enabled", "beta_d", "beta_nu"},
}


def load_config(path):
    if path is None:
        return {}
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        with open(p, "rb") as fh:
            return tomllib.load(fh)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"cannot parse {path}: {e}")


def apply_overrides(cfg, pairs):
    for pair in pairs:
        if "=" not in pair:
            raise ConfigError(f"--set expects key=value, got {pair!r}")
        key, raw = pair.split("=", 1)
        parts = key.strip().split(".")
        if len(parts) != 2:
            raise ConfigError(f"--set keys are section.key, got {key!r}")
        try:
            value = tomllib.loads(f"v = {raw}")["v"]
        except tomllib.TOMLDecodeError:
            value = raw
        cfg.setdefault(parts[0], {})[parts[1]] = value
    return cfg


def validate_keys(cfg):
    for section, body in cfg.items():
        if section not in SCHEMA:
            raise ConfigError(f"unknown config section {section!r}")
        if not isinstance(body, dict):
            raise ConfigError(f"section {section!r} must be a table")
        for key in body:
            if key not in SCHEMA[section]:
                raise ConfigError(f"unknown config key {section}.{key}")


def _get(cfg, section, key, default):
    return cfg.get(section, {}).get(key, default)


def build_scenario(cfg):
    """Map a validated config tree onto a Scenario."""
    validate_keys(cfg)
    try:
        layout = RisLayout(
            modules_x=_get(cfg, "layout", "modules_x", 3),
            modules_y=_get(cfg, "layout", "modules_y", 4),
            elems_per_module_x=_get(cfg, "layout", "elems_per_module_x", 16),
            elems_per_module_y=_get(cfg, "layout", "elems_per_module_y", 16),
            module_width=_get(cfg, "layout", "module_width_m", 0.360),
            module_height=_get(cfg, "layout", "module_height_m", 0.247),
        )
        carrier = CarrierSpec(
            frequency=_get(cfg, "carrier", "frequency_hz", 5.53e9),
            wavelength=_get(cfg, "carrier", "wavelength_m", None),
        )
        gains = AntennaGains(
            tx_gain_dbi=_get(cfg, "gains", "tx_gain_dbi", 16.89),
            rx_gain_dbi=_get(cfg, "gains", "rx_gain_dbi", 16.89),
        )
        tx = PolarPoint(
            distance=_get(cfg, "tx", "distance_m", 2.0),
            angle=_get(cfg, "tx", "angle_deg", -30.0),
            height=_get(cfg, "tx", "height_m", 0.0),
        )
        trajectory = TrajectorySpec(
            start=PolarPoint(
                distance=_get(cfg, "trajectory", "start_distance_m", 2.0),
                angle=_get(cfg, "trajectory", "start_angle_deg", -10.0),
                height=_get(cfg, "trajectory", "start_height_m", 0.0),
            ),
            radial_speed=_get(cfg, "trajectory", "radial_speed_m_per_s", 0.05),
            angular_speed=_get(cfg, "trajectory", "angular_speed_deg_per_s", 5.0),
            duration=_get(cfg, "trajectory", "duration_s", 10.0),
            sample_rate=_get(cfg, "trajectory", "sample_rate_hz", 10.0),
        )
        phases = PhaseSet(t_count=_get(cfg, "phases", "t_count", 8))
        anchors = AnchorPair(
            baseline=_get(cfg, "anchors", "baseline_m", 1.41),
            anchor_height_offset=_get(cfg, "anchors", "height_offset_m", 0.0),
        )

        split = None
        if "split" in cfg and cfg["split"]:
            s = cfg["split"]
            if "method" not in s:
                raise ConfigError("split.method is required when [split] is present")
            method = s["method"]
            if method == "ASM":
                if "factor_m" in s:
                    raise ConfigError("ASM uses split.factor_deg, not factor_m")
                factor = s.get("factor_deg", 2.5)
            elif method == "DSM":
                if "factor_deg" in s:
                    raise ConfigError("DSM uses split.factor_m, not factor_deg")
                factor = s.get("factor_m", 0.1)
            else:
                raise ConfigError(f"split.method must be ASM or DSM, got {method!r}")
            split = SplitSpec(method=method, factor=factor,
                              beam_count=s.get("beam_count", 2),
                              phase_matching=s.get("phase_matching"))

        noise = None
        mode = _get(cfg, "uwb", "mode", "perfect")
        if mode == "noisy":
            bias = _get(cfg, "uwb", "bias_range_m", 0.0)
            if isinstance(bias, list):
                bias = tuple(bias)
            noise = RangingNoise(
                sigma_range=_get(cfg, "uwb", "sigma_range_m", uwb.DEFAULT_SIGMA_RANGE),
                bias_range=bias,
                seed=_get(cfg, "uwb", "seed", 0),
            )
        elif mode != "perfect":
            raise ConfigError(f"uwb.mode must be 'perfect' or 'noisy', got {mode!r}")

        correction = None
        if _get(cfg, "correction", "enabled", False):
            correction = (_get(cfg, "correction", "beta_d", 0.3),
                          _get(cfg, "correction", "beta_nu", 0.55))

        return sim.Scenario(layout=layout, carrier=carrier, gains=gains, tx=tx,
                            trajectory=trajectory, split=split, phases=phases,
                            anchors=anchors, noise=noise, correction=correction)
    except (ValueError, TypeError) as e:
        raise ConfigError(str(e))


def resolve_out(out):
    d = Path(out or os.environ.get(OUT_ENV) or ".")
    d.mkdir(parents=True, exist_ok=True)
    return d


def write_summary(records, path):
    with open(path, "w") as fh:
        json.dump(sim.summarize(records), fh, indent=2, sort_keys=True)
        fh.write("\n")


@click.group()
def cli():
    """Beam tracking simulator for a binary-switching reflective surface."""


@cli.command()
@click.option("--config", "config_path", default=None, help="Scenario TOML file.")
@click.option("--set", "overrides", multiple=True, metavar="KEY=VALUE",
              help="Override a config key, e.g. --set split.method=ASM.")
@click.option("--out", default=None, help=f"Output directory (default ${OUT_ENV} or .).")
def track(config_path, overrides, out):
    """Run the tracking scenario; writes trace.csv and summary.json."""
    cfg = apply_overrides(load_config(config_path), overrides)
    scenario = build_scenario(cfg)
    out_dir = resolve_out(out)
    records = sim.run_tracking(scenario)
    sim.write_trace_csv(records, out_dir / "trace.csv")
    write_summary(records, out_dir / "summary.json")
    click.echo(f"wrote {out_dir / 'trace.csv'} and {out_dir / 'summary.json'}")


@cli.command()
@click.option("--config", "config_path", default=None)
@click.option("--set", "overrides", multiple=True, metavar="KEY=VALUE")
@click.option("--out", default=None)
@click.option("--from", "start", default=-90.0, show_default=True,
              help="First swept angle in degrees.")
@click.option("--to", "stop", default=90.0, show_default=True,
              help="Last swept angle in degrees (inclusive).")
@click.option("--step", default=1.0, show_default=True, help="Angle step in degrees.")
@click.option("--distance", default=2.25, show_default=True,
              help="Optimization target distance in meters.")
def sweep(config_path, overrides, out, start, stop, step, distance):
    """Sweep optimization targets over angles; writes sweep.csv."""
    if step <= 0:
        raise ConfigError("--step must be positive")
    if stop < start:
        raise ConfigError("--to must not be below --from")
    cfg = apply_overrides(load_config(config_path), overrides)
    scenario = build_scenario(cfg)
    out_dir = resolve_out(out)
    n = int(np.floor((stop - start) / step + 1e-9)) + 1
    angles = [start + k * step for k in range(n)]
    records = sim.run_sweep(scenario, angles, fixed_distance=distance)
    sim.write_trace_csv(records, out_dir / "sweep.csv")
    write_summary(records, out_dir / "summary.json")
    click.echo(f"wrote {out_dir / 'sweep.csv'} ({len(records)} angles)")


@cli.command("phase-grid")
@click.option("--config", "config_path", default=None)
@click.option("--set", "overrides", multiple=True, metavar="KEY=VALUE")
@click.option("--out", default=None)
def phase_grid(config_path, overrides, out):
    """Candidate-phase combination grids for a two-beam split.

    Writes phase_grid_asm.csv and phase_grid_dsm.csv, each a T x T
    matrix of magnitudes (dB) at the estimate: rows are the positive
    offset beam's candidate index, columns the negative offset beam's.
    """
    cfg = apply_overrides(load_config(config_path), overrides)
    scenario = build_scenario(cfg)
    if scenario.split is not None and scenario.split.beam_count != 2:
        raise ConfigError("phase-grid requires split.beam_count = 2")
    out_dir = resolve_out(out)
    from .geometry import build_geometry

    geom = build_geometry(scenario.layout)
    estimate = scenario.trajectory.start
    for method, default_factor, name in (("ASM", 2.5, "phase_grid_asm.csv"),
                                         ("DSM", 0.1, "phase_grid_dsm.csv")):
        factor = default_factor
        if scenario.split is not None and scenario.split.method == method:
            factor = scenario.split.factor
        spec = SplitSpec(method=method, factor=factor, beam_count=2)
        grid = beamsplit.phase_grid(geom, scenario.tx, estimate, spec,
                                    scenario.carrier, scenario.phases, scenario.gains)
        with open(out_dir / name, "w", newline="") as fh:
            w = csv.writer(fh)
            for row in grid:
                w.writerow([repr(float(v)) for v in row])
    click.echo(f"wrote {out_dir / 'phase_grid_asm.csv'} and {out_dir / 'phase_grid_dsm.csv'}")


@cli.command()
@click.argument("input_csv", type=click.Path())
@click.option("--beta-d", default=0.3, show_default=True)
@click.option("--beta-nu", default=0.55, show_default=True)
@click.option("--out", default=None)
def correct(input_csv, beta_d, beta_nu, out):
    """Filter a raw estimate CSV (columns k,time_s,d_m,nu_deg); writes
    corrected.csv with d_corr_m,nu_corr_deg appended."""
    path = Path(input_csv)
    if not path.is_file():
        raise ConfigError(f"input file not found: {input_csv}")
    out_dir = resolve_out(out)
    out_path = out_dir / "corrected.csv"

    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        rows = list(reader)
    if not rows:
        out_path.write_text("")
        click.echo(f"wrote {out_path} (empty)")
        return
    header = rows[0]
    if header[:4] != ["k", "time_s", "d_m", "nu_deg"]:
        raise RuntimeError(f"unexpected header {header!r}, want k,time_s,d_m,nu_deg")
    samples = []
    for i, row in enumerate(rows[1:], start=2):
        try:
            k = int(row[0])
            t = float(row[1])
            samples.append(uwb.UwbEstimate(float(row[2]), float(row[3]), t, k))
        except (IndexError, ValueError) as e:
            raise RuntimeError(f"malformed row {i} of {input_csv}: {e}")
    corrected = uwb.correct_stream(samples, beta_d=beta_d, beta_nu=beta_nu)
    with open(out_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "time_s", "d_m", "nu_deg", "d_corr_m", "nu_corr_deg"])
        for s, c in zip(samples, corrected):
            w.writerow([s.sample_index, repr(s.timestamp), repr(s.distance),
                        repr(s.angle), repr(c.distance), repr(c.angle)])
    click.echo(f"wrote {out_path}")


def main(argv=None):
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except ConfigError as e:
        click.echo(f"config error: {e}", err=True)
        return 1
    except click.UsageError as e:
        click.echo(f"config error: {e.format_message()}", err=True)
        return 1
    except click.ClickException as e:
        click.echo(f"config error: {e.format_message()}", err=True)
        return 1
    except click.exceptions.Abort:
        return 2
    except Exception as e:
        click.echo(f"runtime error: {e}", err=True)
        return 2


if __name__ == "__main__":
    sys.exit(main())
