"""Command-line pipeline: simulate -> map -> annotate -> evaluate."""

from __future__ import annotations

import functools
import logging
import sys
from pathlib import Path

import click
import numpy as np
import yaml

from poselabel import annotator, evaluator, simulator
from poselabel.global_mapper import map_global
from poselabel.local_mapper import LocalMapperConfig, map_local
from poselabel.session import (
    ParseReport,
    SessionFormatError,
    parse_session,
    read_control_points,
    read_landmarks,
    validate_session,
    write_control_points,
    write_landmarks,
    write_session,
)
from poselabel.trajectory import MappingError, Strategy, read_trajectory, write_trajectory

log = logging.getLogger("poselabel")

STRATEGIES = [s.value for s in Strategy] + ["all"]


class CliError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


def _fail(code: str, message: str):
    click.echo(f"error: {code}: {message}", err=True)
    sys.exit(1)


def reports_errors(fn):
    """Turn domain errors into a one-line ``error: CODE: message`` and exit 1."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except CliError as exc:
            _fail(exc.code, str(exc))
        except (MappingError, SessionFormatError, simulator.ScenarioError) as exc:
            _fail(getattr(exc, "code", "E_INPUT"), str(exc))
        except OSError as exc:
            _fail("E_IO", str(exc))
        except ValueError as exc:
            _fail("E_VALUE", str(exc))

    return wrapper


def _load_config(path) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh) or {}
    except (OSError, yaml.YAMLError) as exc:
        raise CliError("E_CONFIG", f"cannot read config {path}: {exc}")
    if not isinstance(data, dict):
        raise CliError("E_CONFIG", f"config {path} must be a mapping")
    return data


def _require(path, what: str) -> Path:
    p = Path(path)
    if not p.exists():
        raise CliError("E_MISSING_INPUT", f"{what} not found: {p}")
    return p


class Context:
    def __init__(self, config: dict, seed: int, verbose: bool):
        self.config = config
        self.seed = seed
        self.verbose = verbose


@click.group()
@click.option("--config", "config_path", type=click.Path(), default=None, help="YAML/JSON config file.")
@click.option("--seed", type=int, default=0, show_default=True, help="Seed for every random draw.")
@click.option("--verbose", is_flag=True, help="Log progress to stderr.")
@click.pass_context
def main(ctx, config_path, seed, verbose):
    """Map VI-SLAM session logs to the building frame and label sensor data."""
    logging.basicConfig(
        level=logging.INFO if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        config = _load_config(config_path)
    except CliError as exc:
        _fail(exc.code, str(exc))
    ctx.obj = Context(config, seed, verbose)


def _local_config(ctx: Context, overrides: dict) -> LocalMapperConfig:
    values = dict(ctx.config.get("local_mapper", {}) or {})
    values.update({k: v for k, v in overrides.items() if v is not None})
    return LocalMapperConfig.from_mapping(values)


@main.command()
@click.option("--preset", default=None, help=f"One of: {', '.join(simulator.PRESET_NAMES)}.")
@click.option("--scenario", "scenario_path", default=None, help="Scenario file (YAML/JSON).")
@click.option("--seed", type=int, default=None, help="Overrides the global --seed.")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--site-out", default=None, type=click.Path(file_okay=False),
              help="Where landmarks.csv/control_points.csv go (default OUT/site).")
@click.pass_obj
@reports_errors
def simulate(ctx: Context, preset, scenario_path, seed, out_dir, site_out):
    """Generate a synthetic session bundle plus ground truth."""
    seed = ctx.seed if seed is None else seed
    if preset is not None and scenario_path is not None:
        raise CliError("E_USAGE", "give only one of --preset or --scenario")
    if preset is None and scenario_path is None and "scenario" not in ctx.config:
        raise CliError("E_USAGE", "give --preset or --scenario")
    if preset is not None:
        if preset not in simulator.PRESET_NAMES:
            raise CliError(
                "E_PRESET", f"unknown preset {preset!r}; valid presets: {', '.join(simulator.PRESET_NAMES)}"
            )
        cfg = simulator.preset(preset, seed)
    else:
        data = _load_config(_require(scenario_path, "scenario file")) if scenario_path else ctx.config["scenario"]
        data = dict(data)
        data.setdefault("seed", seed)
        cfg = simulator.ScenarioConfig.from_dict(data)

    session, gt = simulator.simulate_session(cfg)
    out = Path(out_dir)
    write_session(session, out)
    simulator.write_ground_truth(gt, out / simulator.GROUND_TRUTH_FILE)
    site = Path(site_out) if site_out else out / "site"
    write_landmarks(cfg.registry(), site / "landmarks.csv")
    write_control_points(cfg.control_point_set(), site / "control_points.csv")
    site.mkdir(parents=True, exist_ok=True)
    (site / "scenario.yaml").write_text(yaml.safe_dump(cfg.to_dict(), sort_keys=True))
    click.echo(
        f"simulated {len(session.camera)} frames, {len(session.landmarks)} landmark rows, "
        f"{len(np.unique(session.wifi.scan_id))} scans -> {out}"
    )


@main.command("map")
@click.option("--session", "session_dir", required=True, type=click.Path())
@click.option("--landmarks", "landmarks_file", required=True, type=click.Path())
@click.option("--strategy", type=click.Choice(STRATEGIES), default="all", show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--floor-id", default=None, help="Floor to take from a multi-floor landmark file.")
@click.option("--device-id", default="unknown", show_default=True)
@click.option("--proximity-threshold", "proximity_threshold_m", type=float, default=None)
@click.option("--jump-threshold", "jump_threshold_m", type=float, default=None)
@click.option("--identity-eps", "identity_eps_m", type=float, default=None)
@click.option("--min-run", "min_run_frames", type=int, default=None)
@click.option("--merge-window", "merge_window_s", type=float, default=None)
@click.pass_obj
@reports_errors
def map_cmd(ctx: Context, session_dir, landmarks_file, strategy, out_dir, floor_id, device_id, **thresholds):
    """Map a session to the building frame with one or more strategies."""
    registry = read_landmarks(_require(landmarks_file, "landmark file"), floor_id)
    session = parse_session(_require(session_dir, "session directory"), registry.floor_id, device_id)
    cfg = _local_config(ctx, thresholds)
    selected = [s.value for s in Strategy] if strategy == "all" else [strategy]
    for name in selected:
        if name == Strategy.GLOBAL.value:
            traj = map_global(session, registry)
        else:
            cfg.correction_enabled = name == Strategy.LOCAL_CORRECTED.value
            traj = map_local(session, registry, cfg)
        write_trajectory(traj, out_dir)
        reasons = sorted(s.reason for s in traj.segments if s.discarded and s.reason)
        line = traj.summary()
        if reasons:
            line += " discarded_reasons=" + ",".join(reasons)
        click.echo(line)


@main.command()
@click.option("--session", "session_dir", required=True, type=click.Path())
@click.option("--trajectory", "trajectory_file", required=True, type=click.Path())
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--device-id", default=None, help="Defaults to config annotator.device_id or 'unknown'.")
@click.option("--floor-id", default=None)
@click.pass_obj
@reports_errors
def annotate(ctx: Context, session_dir, trajectory_file, out_dir, device_id, floor_id):
    """Label sensor records and WiFi scans from a mapped trajectory."""
    opts = ctx.config.get("annotator", {}) or {}
    device_id = device_id or opts.get("device_id", "unknown")
    traj = read_trajectory(_require(trajectory_file, "trajectory file"))
    if floor_id is not None:
        traj.floor_id = floor_id
    session = parse_session(_require(session_dir, "session directory"), traj.floor_id, device_id)
    clamp_ns = int(round(float(opts.get("clamp_ms", 500)) * 1e6))
    labeled = annotator.annotate_sensors(traj, session.sensors, clamp_ns)
    fps = annotator.build_fingerprints(
        traj, session.wifi, device_id, clamp_ns, float(opts.get("max_lost_fraction", 0.5))
    )
    out = Path(out_dir)
    annotator.write_fingerprints(fps.fingerprints, out / "fingerprints.csv")
    annotator.write_labeled_sensors(labeled, out / "labeled_sensors.csv")
    click.echo(
        f"labeled {len(labeled)} sensor records (dropped {labeled.dropped}); "
        f"{len(fps.fingerprints)} fingerprints (dropped {fps.dropped_scans} scans, "
        f"{fps.dropped_entries} entries)"
    )


@main.command()
@click.option("--trajectory", "trajectory_files", multiple=True, type=click.Path(),
              help="trajectory_<strategy>.csv; repeatable.")
@click.option("--ground-truth", default=None, type=click.Path())
@click.option("--control-points", default=None, type=click.Path())
@click.option("--session", "session_dir", default=None, type=click.Path(),
              help="Session whose Events.csv holds the control-point presses.")
@click.option("--fingerprints", "fingerprint_file", default=None, type=click.Path())
@click.option("--knn", is_flag=True, help="Run the kNN baseline on --fingerprints.")
@click.option("--k", "k", type=int, default=5, show_default=True)
@click.option("--test-fraction", type=float, default=0.3, show_default=True)
@click.option("--include-extrapolated", is_flag=True)
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.pass_obj
@reports_errors
def evaluate(ctx: Context, trajectory_files, ground_truth, control_points, session_dir,
             fingerprint_file, knn, k, test_fraction, include_extrapolated, out_dir):
    """Error report against ground truth and/or control points; optional kNN baseline."""
    if not trajectory_files and not knn:
        raise CliError("E_USAGE", "nothing to evaluate: give --trajectory and/or --knn")
    trajs = {}
    for path in trajectory_files:
        traj = read_trajectory(_require(path, "trajectory file"))
        trajs[traj.strategy.value] = traj
    if trajs and ground_truth is None and control_points is None:
        raise CliError("E_USAGE", "trajectories need --ground-truth or --control-points")

    rows, text = [], []
    plot = {}
    if ground_truth is not None:
        gt = simulator.read_ground_truth(_require(ground_truth, "ground truth file"))
        cols = {n: evaluator.trajectory_error(t, gt, include_extrapolated) for n, t in trajs.items()}
        rows += evaluator.metrics_rows("trajectory", cols)
        text.append(evaluator.format_table("Trajectory error vs ground truth [m]", cols))
        plot["ground_truth"] = (gt.t, gt.xy)
    if control_points is not None:
        if session_dir is None:
            raise CliError("E_USAGE", "--control-points needs --session for the button events")
        cps = read_control_points(_require(control_points, "control point file"))
        session = parse_session(_require(session_dir, "session directory"), cps.floor_id)
        events = session.events.control_points()
        cols = {n: evaluator.control_point_errors(t, events, cps) for n, t in trajs.items()}
        rows += evaluator.metrics_rows("control_points", cols)
        text.append(evaluator.format_table("Control point error [m]", cols))
    for n, t in trajs.items():
        plot[n] = (t.t, t.xy)

    if knn:
        if fingerprint_file is None:
            raise CliError("E_USAGE", "--knn needs --fingerprints")
        fps = annotator.read_fingerprints(_require(fingerprint_file, "fingerprint file"))
        if len(fps) < 2:
            raise CliError("E_EMPTY", "need at least 2 fingerprints for a train/test split")
        train, test = evaluator.random_split(fps, test_fraction, ctx.seed)
        res = evaluator.knn_localize(train, test, k)
        rows += evaluator.metrics_rows(f"knn_k{k}", {"position": res.stats})
        rows.append([f"knn_k{k}", "floor_accuracy", repr(res.floor_accuracy), "", "", str(len(test)), "0"])
        text.append(evaluator.format_table(f"kNN baseline (k={k}, test={test_fraction:.0%}) [m]",
                                           {"position": res.stats}))
        text.append(f"floor_ACC {res.floor_accuracy:.3f}")

    out = Path(out_dir)
    evaluator.write_metrics(rows, out / "metrics.csv")
    report = "\n\n".join(text) + "\n"
    tmp = out / ".report.txt.tmp"
    tmp.write_text(report)
    tmp.replace(out / "report.txt")
    if plot and len(plot) > 1:
        evaluator.write_plot_data(plot, out / "plot_data.csv")
    click.echo(report, nl=False)


@main.command()
@click.option("--session", "session_dir", required=True, type=click.Path())
@click.pass_obj
@reports_errors
def validate(ctx: Context, session_dir):
    """Check a session bundle and print coverage diagnostics."""
    parse_report = ParseReport()
    session = parse_session(_require(session_dir, "session directory"), report=parse_report)
    rep = validate_session(session)
    rep.violations += [f"dropped row {issue}" for issue in parse_report.issues]
    for line in rep.lines():
        click.echo(line)
    if not rep.ok:
        raise CliError("E_INVALID_SESSION", f"{len(rep.violations)} invariant violations")


if __name__ == "__main__":
    main()
