"""Planar kinematics of the symmetric two-link leg on a vertical rail.

The leg has equal thigh and shin lengths L and its hip is constrained
to move on a vertical line above the foot, so a single coordinate -- the
interior knee angle ``theta`` in (0, pi], straight leg at pi -- fully
determines the configuration:

    h(theta) = 2 L sin(theta / 2)        (hip height above the foot)

The links are treated as massless; the supported mass ``m`` lumps the
base plus payload. The torque sign convention *of this module* is
extension-positive: ``gravity_knee_torque`` is the (positive) knee
torque needed to statically hold the load, and it decreases as the leg
straightens. (Trajectory logs flip this sign; see
:mod:`springsim.trajectory`.)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import OutOfRange, Unreachable

SINE_CONVENTIONS = ("period", "paper-literal")


@dataclass(frozen=True, slots=True)
class LegGeometry:
    """Geometry and load of the reduced one-DoF leg.

    Attributes:
        link_len: Thigh = shin length L [m].
        mass: Supported vertical load [kg].
        g: Gravitational acceleration [m/s^2].
    """

    link_len: float = 0.28
    mass: float = 4.1
    g: float = 9.81

    def __post_init__(self) -> None:
        if not (math.isfinite(self.link_len) and self.link_len > 0):
            raise ValueError(f"link_len must be > 0, got {self.link_len!r}")
        if not (math.isfinite(self.mass) and self.mass > 0):
            raise ValueError(f"mass must be > 0, got {self.mass!r}")
        if not (math.isfinite(self.g) and self.g > 0):
            raise ValueError(f"g must be > 0, got {self.g!r}")

    @property
    def max_height(self) -> float:
        """Hip height with the leg fully extended (2L)."""
        return 2.0 * self.link_len


def _check_theta(theta: float) -> None:
    if not (math.isfinite(theta) and 0.0 < theta <= math.pi):
        raise OutOfRange(theta)


def fk_height(geom: LegGeometry, theta: float) -> float:
    """Hip height above the foot for interior knee angle ``theta``.

    h = 2 L sin(theta / 2), for theta in (0, pi].
    """
    _check_theta(theta)
    return 2.0 * geom.link_len * math.sin(0.5 * theta)


def ik_angle(geom: LegGeometry, h: float) -> float:
    """Interior knee angle that places the hip at height ``h``.

    theta = 2 asin(h / (2L)), for h in (0, 2L].

    Raises:
        Unreachable: ``h`` outside (0, 2L].
    """
    two_l = geom.max_height
    if not (math.isfinite(h) and 0.0 < h <= two_l):
        raise Unreachable(h, two_l)
    return 2.0 * math.asin(h / two_l)


def jacobian(geom: LegGeometry, theta: float) -> float:
    """dh/dtheta = L cos(theta / 2). Zero at the straight-leg singularity."""
    _check_theta(theta)
    return geom.link_len * math.cos(0.5 * theta)


def gravity_knee_torque(geom: LegGeometry, theta: float) -> float:
    """Knee torque statically supporting the load at angle ``theta``.

    By virtual work: tau_g = m g dh/dtheta. Extension-positive (positive
    torque raises the base); monotonically decreasing on (0, pi] and
    exactly zero for the straight leg.
    """
    return geom.mass * geom.g * jacobian(geom, theta)


def reference_height(
    h0: float,
    amplitude: float,
    t_period: float,
    t: float,
    sine_convention: str = "period",
) -> float:
    """Sinusoidal base-height reference.

    With the default ``period`` convention,
    ``h(t) = h0 + A sin(2 pi t / T)`` where T is the motion period.
    The ``paper-literal`` convention uses ``sin(t / T)`` instead (T then
    acts as an inverse rate, not a period).
    """
    if not (math.isfinite(t_period) and t_period > 0):
        raise ValueError(f"t_period must be > 0, got {t_period!r}")
    omega = sine_omega(t_period, sine_convention)
    return h0 + amplitude * math.sin(omega * t)


def sine_omega(t_period: float, sine_convention: str) -> float:
    """Angular rate implied by ``t_period`` under a sine convention."""
    if sine_convention == "period":
        return 2.0 * math.pi / t_period
    if sine_convention == "paper-literal":
        return 1.0 / t_period
    raise ValueError(
        f"sine_convention must be one of {SINE_CONVENTIONS}, got {sine_convention!r}"
    )
