"""Exception types shared across the package.

Constructor/type-invariant violations raise plain ``ValueError``;
everything that can go wrong during an *operation* (I/O, fitting,
integration, experiment orchestration) derives from ``SpringSimError``
so the CLI can map it to exit code 1.
"""


class SpringSimError(Exception):
    """Base class for all domain errors."""


# --- trajectory I/O ---------------------------------------------------------


class TrajectoryError(SpringSimError):
    """Base class for trajectory construction / file errors."""


class MissingFile(TrajectoryError):
    def __init__(self, path):
        super().__init__(f"trajectory file not found: {path}")
        self.path = path


class EmptyFile(TrajectoryError):
    def __init__(self, path, detail="no data rows"):
        super().__init__(f"{path}: {detail}")
        self.path = path


class MalformedRow(TrajectoryError):
    def __init__(self, path, line_no, detail):
        super().__init__(f"{path}:{line_no}: {detail}")
        self.path = path
        self.line_no = line_no


class NonUniformTimestep(TrajectoryError):
    """Timestamp i+1 deviates from the uniform grid by more than 1e-9 s."""

    def __init__(self, index, detail=""):
        msg = f"non-uniform timestep at sample index {index}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
        self.index = index


class IoFailure(TrajectoryError):
    def __init__(self, path, cause):
        super().__init__(f"could not write {path}: {cause}")
        self.path = path


# --- fitting ----------------------------------------------------------------


class DegenerateTrajectory(SpringSimError):
    """Angle variance is ~0: the spring parameters are underdetermined."""


# --- kinematics -------------------------------------------------------------


class OutOfRange(SpringSimError):
    """Knee angle outside the valid interior range (0, pi]."""

    def __init__(self, theta):
        super().__init__(f"knee angle {theta!r} outside (0, pi]")
        self.theta = theta


class Unreachable(SpringSimError):
    """Requested base height outside (0, 2L]."""

    def __init__(self, h, max_h):
        super().__init__(f"height {h!r} unreachable (must be in (0, {max_h}])")
        self.h = h


# --- simulation -------------------------------------------------------------


class SimulationError(SpringSimError):
    """Base class for integration failures."""


class SingularConfiguration(SimulationError):
    """|dh/dtheta| below tolerance: reflected inertia degenerates."""

    def __init__(self, theta, t):
        super().__init__(
            f"singular/invalid configuration theta={theta!r} at t={t:.6f} s"
        )
        self.theta = theta
        self.t = t


class NonFiniteState(SimulationError):
    def __init__(self, t):
        super().__init__(f"state became non-finite at t={t:.6f} s")
        self.t = t


# --- experiment harness -----------------------------------------------------


class HarnessError(SpringSimError):
    """Base class for experiment orchestration errors."""


class MissingTrace(HarnessError):
    def __init__(self, path):
        super().__init__(f"trace file not found: {path}")
        self.path = path


class ConfigError(HarnessError):
    """Malformed experiment/run configuration file."""


class EmptySpecList(ConfigError):
    """No experiments to run: a usage error (CLI exit code 2)."""
