"""Two-phase experiment orchestration and file-based reporting.

Protocol per experiment: (A) simulate without a spring, fit the optimal
spring to the log; (B) re-simulate with the fitted spring; compare the
motor energies. A negative (or undefined-equilibrium) fit is clamped to
"no spring" here -- the fitter itself stays faithful to the closed form
and merely flags such results.

A grid of experiments produces, inside ``out_dir``:

    report.csv      label,m,T,A,h0,E0,Ea,mu_star,alpha0_star,ratio
    specs.ini       the resolved experiment list (reusable via --specs)
    failures.csv    label,error   (only when something failed)
    traces/<label>_no_spring.csv / _with_spring.csv

All files are written atomically (temp + rename) and byte-deterministic.
"""

from __future__ import annotations

import configparser
import math
import os
import re
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError, DegenerateTrajectory, EmptySpecList, MissingTrace
from .fitting import EnergyModel, FitDiagnostics, energy, fit_optimal
from .leg import LegGeometry
from .simulator import ControllerConfig, SimConfig, run
from .svgplot import line_plot
from .trajectory import SpringParams, Trajectory, load_trajectory, save_trajectory

SCHEMA_VERSION = "1"

REPORT_HEADER = "label,m,T,A,h0,E0,Ea,mu_star,alpha0_star,ratio"
TRACES_SUBDIR = "traces"
SPECS_FILENAME = "specs.ini"

_LABEL_RE = re.compile(r"^[A-Za-z0-9._-]+$")

#: SimConfig fields an ExperimentSpec may override (specs-file keys).
OVERRIDE_KEYS = (
    "link_len",
    "g",
    "kp",
    "kd",
    "control_rate",
    "duration",
    "physics_dt",
    "sine_convention",
    "torque_limit",
)


@dataclass(frozen=True, slots=True)
class ExperimentSpec:
    """One grid row: motion parameters plus optional config overrides."""

    label: str
    mass: float
    t_period: float
    amplitude: float
    h0: float
    overrides: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not _LABEL_RE.match(self.label):
            raise ValueError(f"label must be filesystem-safe, got {self.label!r}")
        for name in ("mass", "t_period", "h0"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{self.label}: {name} must be > 0, got {v!r}")
        # amplitude 0 is a legal static hold (it fails later, at fit time,
        # with DegenerateTrajectory -- not here).
        if not (math.isfinite(self.amplitude) and self.amplitude >= 0):
            raise ValueError(
                f"{self.label}: amplitude must be >= 0, got {self.amplitude!r}"
            )
        unknown = set(self.overrides) - set(OVERRIDE_KEYS)
        if unknown:
            raise ValueError(f"{self.label}: unknown overrides {sorted(unknown)}")
        # Reachability (h0 +/- A inside (0, 2L)) is enforced by SimConfig.
        self.to_sim_config()

    def to_sim_config(self, spring: SpringParams | None = None) -> SimConfig:
        ov = self.overrides
        geom = LegGeometry(
            link_len=float(ov.get("link_len", 0.28)),
            mass=self.mass,
            g=float(ov.get("g", 9.81)),
        )
        controller = ControllerConfig(
            kp=float(ov.get("kp", 300.0)),
            kd=float(ov.get("kd", 1.0)),
            control_rate=float(ov.get("control_rate", 100.0)),
        )
        limit = ov.get("torque_limit")
        return SimConfig(
            geom=geom,
            controller=controller,
            h0=self.h0,
            amplitude=self.amplitude,
            t_period=self.t_period,
            sine_convention=str(ov.get("sine_convention", "period")),
            duration=float(ov.get("duration", 10.0)),
            physics_dt=float(ov.get("physics_dt", 1e-3)),
            spring=spring,
            torque_limit=float(limit) if limit is not None else None,
        )


@dataclass(frozen=True, slots=True)
class ExperimentResult:
    """Outcome of the two-phase protocol for one spec."""

    spec: ExperimentSpec
    e0: float
    ea: float
    mu_star: float
    alpha0_star: float
    ratio: float
    trace_no_spring: Path
    trace_with_spring: Path
    fit: FitDiagnostics
    clamped: bool = False

    def __post_init__(self) -> None:
        if not self.e0 > 0:
            raise ValueError(f"{self.spec.label}: e0 must be > 0, got {self.e0!r}")
        if not (self.ratio >= 0 and self.ratio == self.ea / self.e0):
            raise ValueError(f"{self.spec.label}: inconsistent ratio")


def paper_table() -> list[ExperimentSpec]:
    """The built-in six-row benchmark grid (``--table paper``)."""
    return [
        ExperimentSpec("baseline", mass=4.1, t_period=1.88, amplitude=0.05, h0=0.2),
        ExperimentSpec("amplitude_0.08", mass=4.1, t_period=1.88, amplitude=0.08, h0=0.2),
        ExperimentSpec("h0_0.15", mass=4.1, t_period=1.88, amplitude=0.05, h0=0.15),
        ExperimentSpec("mass_8.1", mass=8.1, t_period=1.88, amplitude=0.05, h0=0.2),
        ExperimentSpec("period_0.94", mass=4.1, t_period=0.94, amplitude=0.05, h0=0.2),
        ExperimentSpec("period_3.77", mass=4.1, t_period=3.77, amplitude=0.05, h0=0.2),
    ]


def run_experiment(
    spec: ExperimentSpec,
    out_dir,
    model: EnergyModel = EnergyModel(),
) -> ExperimentResult:
    """Run the two-phase protocol for one spec, persisting both traces.

    Raises:
        DegenerateTrajectory: Phase A produced a constant-angle log (the
            message carries the experiment label).
    """
    out_dir = Path(out_dir)
    traces_dir = out_dir / TRACES_SUBDIR
    traces_dir.mkdir(parents=True, exist_ok=True)

    traj_a = run(spec.to_sim_config())
    try:
        diag = fit_optimal(traj_a, model)
    except DegenerateTrajectory as exc:
        raise DegenerateTrajectory(f"{spec.label}: {exc}") from exc

    clamped = not (diag.physical and diag.alpha0_defined)
    spring = None if clamped else SpringParams(diag.mu_star, diag.alpha0_star)
    traj_b = run(spec.to_sim_config(spring=spring))

    e0 = energy(traj_a, model)
    ea = energy(traj_b, model)
    path_a = traces_dir / f"{spec.label}_no_spring.csv"
    path_b = traces_dir / f"{spec.label}_with_spring.csv"
    save_trajectory(traj_a, path_a)
    save_trajectory(traj_b, path_b)
    return ExperimentResult(
        spec=spec,
        e0=e0,
        ea=ea,
        mu_star=diag.mu_star,
        alpha0_star=diag.alpha0_star,
        ratio=ea / e0,
        trace_no_spring=path_a,
        trace_with_spring=path_b,
        fit=diag,
        clamped=clamped,
    )


@dataclass(frozen=True, slots=True)
class GridReport:
    results: list[ExperimentResult]
    failures: list[tuple[str, str]]
    report_path: Path

    @property
    def ok(self) -> bool:
        return not self.failures


def _fmt(x: float) -> str:
    return repr(float(x))


def _atomic_write(path: Path, payload: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run_grid(
    specs: list[ExperimentSpec],
    out_dir,
    model: EnergyModel = EnergyModel(),
) -> GridReport:
    """Run every spec, then write report.csv (+ specs.ini, failures.csv).

    Failed specs are recorded (label, error string) and do not stop the
    remaining rows. Rerunning into the same out_dir reproduces identical
    bytes.

    Raises:
        ValueError: Empty spec list or duplicate labels.
    """
    if not specs:
        raise EmptySpecList("spec list is empty")
    labels = [s.label for s in specs]
    if len(set(labels)) != len(labels):
        raise ValueError(f"duplicate labels in spec list: {labels}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    results: list[ExperimentResult] = []
    failures: list[tuple[str, str]] = []
    for spec in specs:
        try:
            results.append(run_experiment(spec, out_dir, model))
        except Exception as exc:
            failures.append((spec.label, f"{type(exc).__name__}: {exc}"))

    lines = [REPORT_HEADER]
    for r in results:
        s = r.spec
        lines.append(
            ",".join(
                [
                    s.label,
                    _fmt(s.mass),
                    _fmt(s.t_period),
                    _fmt(s.amplitude),
                    _fmt(s.h0),
                    _fmt(r.e0),
                    _fmt(r.ea),
                    _fmt(r.mu_star),
                    _fmt(r.alpha0_star),
                    _fmt(r.ratio),
                ]
            )
        )
    report_path = out_dir / "report.csv"
    _atomic_write(report_path, "\n".join(lines) + "\n")
    save_specs_file(specs, out_dir / SPECS_FILENAME)
    if failures:
        fail_lines = ["label,error"] + [f"{lbl},{msg}" for lbl, msg in failures]
        _atomic_write(out_dir / "failures.csv", "\n".join(fail_lines) + "\n")
    return GridReport(results=results, failures=failures, report_path=report_path)


def load_report(path) -> list[dict]:
    """Parse report.csv back into one dict per row (floats restored)."""
    path = Path(path)
    if not path.is_file():
        raise MissingTrace(path)
    lines = path.read_text().splitlines()
    if not lines or lines[0] != REPORT_HEADER:
        raise ConfigError(f"{path}: not a grid report (bad header)")
    cols = REPORT_HEADER.split(",")
    rows = []
    for line in lines[1:]:
        if not line.strip():
            continue
        vals = line.split(",")
        row: dict = {"label": vals[0]}
        for name, raw in zip(cols[1:], vals[1:]):
            row[name] = float(raw)
        rows.append(row)
    return rows


# --- torque traces ------------------------------------------------------------


def export_torque_traces(result: ExperimentResult, out_dir) -> tuple[Path, Path]:
    """Extract one reference period of both torque logs, CSV + SVG overlay.

    The window is the last complete period, so its start time is an
    integer multiple of the period (phase-aligned with the reference).

    Returns:
        (csv_path, svg_path).

    Raises:
        MissingTrace: A persisted trace file is gone.
    """
    for p in (result.trace_no_spring, result.trace_with_spring):
        if not Path(p).is_file():
            raise MissingTrace(p)
    traj_a = load_trajectory(result.trace_no_spring)
    traj_b = load_trajectory(result.trace_with_spring)
    spec = result.spec
    cfg = spec.to_sim_config()
    return _write_period_overlay(
        traj_a, traj_b, spec.label, spec.t_period, cfg.controller.control_rate, out_dir
    )


def _write_period_overlay(
    traj_a: Trajectory,
    traj_b: Trajectory,
    label: str,
    t_period: float,
    control_rate: float,
    out_dir,
) -> tuple[Path, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    n = len(traj_a)
    n_period = round(t_period * control_rate)
    if n_period < 2 or n_period > n or len(traj_b) != n:
        raise ConfigError(
            f"{label}: cannot cut a {n_period}-sample period from {n}/{len(traj_b)} samples"
        )
    k0 = (n // n_period - 1) * n_period
    sl = slice(k0, k0 + n_period)
    t_rel = traj_a.t[sl] - traj_a.t[k0]
    tau_a = traj_a.tau[sl]
    tau_b = traj_b.tau[sl]

    lines = ["t,tau_no_spring_Nm,tau_with_spring_Nm"]
    for i in range(n_period):
        lines.append(f"{_fmt(t_rel[i])},{_fmt(tau_a[i])},{_fmt(tau_b[i])}")
    csv_path = out_dir / f"{label}_torques.csv"
    _atomic_write(csv_path, "\n".join(lines) + "\n")

    svg_path = out_dir / f"{label}_torques.svg"
    line_plot(
        svg_path,
        [
            ("no spring", list(t_rel), list(tau_a)),
            ("with spring", list(t_rel), list(tau_b)),
        ],
        title=f"Knee motor torque over one period: {label}",
        xlabel="time within period [s]",
        ylabel="motor torque [N m]",
    )
    return csv_path, svg_path


def export_traces_from_dir(result_dir, out_dir) -> list[tuple[Path, Path]]:
    """Recreate per-row period overlays from a finished grid directory."""
    result_dir = Path(result_dir)
    rows = load_report(result_dir / "report.csv")
    specs = {s.label: s for s in load_specs_file(result_dir / SPECS_FILENAME)}
    outputs = []
    for row in rows:
        label = row["label"]
        spec = specs.get(label)
        if spec is None:
            raise ConfigError(f"{result_dir}: spec for report row {label!r} missing")
        path_a = result_dir / TRACES_SUBDIR / f"{label}_no_spring.csv"
        path_b = result_dir / TRACES_SUBDIR / f"{label}_with_spring.csv"
        for p in (path_a, path_b):
            if not p.is_file():
                raise MissingTrace(p)
        traj_a = load_trajectory(path_a)
        traj_b = load_trajectory(path_b)
        cfg = spec.to_sim_config()
        outputs.append(
            _write_period_overlay(
                traj_a, traj_b, label, spec.t_period, cfg.controller.control_rate, out_dir
            )
        )
    return outputs


# --- external-log fitting -----------------------------------------------------


def fit_external(log_path, model: EnergyModel = EnergyModel()) -> dict:
    """Fit a spring to an arbitrary trajectory CSV; summary as a dict.

    Propagates load/fit errors (they carry file/line context).
    """
    traj = load_trajectory(log_path)
    diag = fit_optimal(traj, model)
    e0 = energy(traj, model)
    return {
        "path": str(log_path),
        "n_samples": len(traj),
        "dt": traj.dt,
        "mu_star": diag.mu_star,
        # undefined equilibria stay flagged, not numeric (also keeps the
        # --json output strict: NaN is not valid JSON)
        "alpha0_star": diag.alpha0_star if diag.alpha0_defined else None,
        "e0": e0,
        "ea": diag.residual_energy,
        "ratio": diag.residual_energy / e0 if e0 > 0 else 0.0,
        "physical": diag.physical,
        "alpha0_defined": diag.alpha0_defined,
    }


# --- config files ---------------------------------------------------------------


def _read_ini(path) -> configparser.ConfigParser:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser()
    try:
        parser.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    if "springsim" not in parser:
        raise ConfigError(f"{path}: missing [springsim] section")
    schema = parser["springsim"].get("schema")
    if schema != SCHEMA_VERSION:
        raise ConfigError(
            f"{path}: unsupported schema {schema!r} (expected {SCHEMA_VERSION!r})"
        )
    return parser


def _spec_from_section(name: str, sec) -> ExperimentSpec:
    try:
        required = {k: float(sec[k]) for k in ("mass", "t_period", "amplitude", "h0")}
    except KeyError as exc:
        raise ConfigError(f"[{name}]: missing required key {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"[{name}]: {exc}") from exc
    overrides: dict = {}
    for key in sec:
        if key in ("mass", "t_period", "amplitude", "h0"):
            continue
        if key not in OVERRIDE_KEYS:
            raise ConfigError(f"[{name}]: unknown key {key!r}")
        overrides[key] = sec[key] if key == "sine_convention" else float(sec[key])
    try:
        return ExperimentSpec(label=name, overrides=overrides, **required)
    except ValueError as exc:
        raise ConfigError(f"[{name}]: {exc}") from exc


def load_specs_file(path) -> list[ExperimentSpec]:
    """Read an experiment list (INI, one section per spec)."""
    parser = _read_ini(path)
    specs = [
        _spec_from_section(name, parser[name])
        for name in parser.sections()
        if name != "springsim"
    ]
    if not specs:
        raise EmptySpecList(f"{path}: no experiment sections")
    return specs


def save_specs_file(specs: list[ExperimentSpec], path) -> None:
    """Write the resolved spec list in the --specs input format."""
    lines = ["[springsim]", f"schema = {SCHEMA_VERSION}", ""]
    for s in specs:
        lines.append(f"[{s.label}]")
        lines.append(f"mass = {_fmt(s.mass)}")
        lines.append(f"t_period = {_fmt(s.t_period)}")
        lines.append(f"amplitude = {_fmt(s.amplitude)}")
        lines.append(f"h0 = {_fmt(s.h0)}")
        for key in OVERRIDE_KEYS:
            if key in s.overrides:
                v = s.overrides[key]
                lines.append(f"{key} = {v if isinstance(v, str) else _fmt(v)}")
        lines.append("")
    _atomic_write(Path(path), "\n".join(lines))


def load_run_config(path) -> SimConfig:
    """Read a single-run config ([run] section; optional spring_mu/alpha0)."""
    parser = _read_ini(path)
    if "run" not in parser:
        raise ConfigError(f"{path}: missing [run] section")
    sec = parser["run"]
    keys = set(sec)
    spring = None
    if "spring_mu" in keys or "spring_alpha0" in keys:
        if not {"spring_mu", "spring_alpha0"} <= keys:
            raise ConfigError(f"{path}: spring_mu and spring_alpha0 must both be set")
        try:
            spring = SpringParams(float(sec["spring_mu"]), float(sec["spring_alpha0"]))
        except ValueError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        keys -= {"spring_mu", "spring_alpha0"}
    try:
        spec = _spec_from_section("run", {k: sec[k] for k in keys})
    except ConfigError:
        raise
    try:
        return spec.to_sim_config(spring=spring)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
