"""Motor-energy accounting and closed-form torsion-spring fitting.

Energy model
------------
Over a uniformly sampled torque log the motor's resistive losses are

    E = K * sum_i tau_i^2 * dt

with a motor-specific constant K. A parallel torsion spring with
stiffness ``mu`` and equilibrium ``alpha0`` carries ``mu (alpha_i -
alpha0)`` of the torque, leaving the motor

    E_spring = K * sum_i (tau_i - mu (alpha_i - alpha0))^2 * dt.

Setting both partial derivatives to zero gives the closed-form optimum

    mu*     = (Sa St - N Sat) / (Sa^2 - N Saa)
    alpha0* = (St Saa - Sat Sa) / (Sa St - N Sat)

where Sa, St, Saa, Sat are the raw sums of alpha, tau, alpha^2 and
alpha*tau over the N samples. ``mu*`` equals the ordinary least-squares
slope of tau on alpha; ``(mu*, mu* alpha0*)`` is the OLS solution of
``tau ~ mu alpha - c``.

Two degeneracies are handled explicitly:

* zero angle variance  -> :class:`~springsim.errors.DegenerateTrajectory`
  (the spring is underdetermined);
* zero angle-torque covariance with nonzero mean torque -> ``mu* = 0``
  but no finite equilibrium exists; the fit returns ``mu_star = 0`` with
  ``alpha0_defined = False`` (``alpha0_star`` is NaN).

The sliding-window fitter maintains the same four sums (plus ``sum
tau^2`` for the energy report) incrementally so the spring can be
re-fitted online; it recomputes the sums exactly from the retained
samples every ``capacity`` pushes to cap floating-point drift from
incremental subtraction.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateTrajectory
from .trajectory import Sample, SpringParams, Trajectory

#: Relative scale below which the angle variance counts as zero.
VARIANCE_TOL = 1e-12
#: Relative scale below which the mu* numerator (covariance) counts as zero.
COVARIANCE_TOL = 1e-12


@dataclass(frozen=True, slots=True)
class EnergyModel:
    """Resistive-loss model: energy = k_motor * sum(tau^2) * dt.

    Attributes:
        k_motor: Motor constant K [J / (N*m)^2 / s]. Scales squared
            torque-time to energy; the fitted optimum and the energy
            ratio are both independent of it.
    """

    k_motor: float = 1.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.k_motor) and self.k_motor > 0):
            raise ValueError(f"k_motor must be > 0, got {self.k_motor!r}")


@dataclass(frozen=True, slots=True)
class FitDiagnostics:
    """Result of a closed-form spring fit.

    Attributes:
        mu_star: Fitted stiffness [N*m/rad]; may be negative (see
            ``physical``).
        alpha0_star: Fitted equilibrium [rad]; NaN when
            ``alpha0_defined`` is False.
        residual_energy: Spring-compensated energy at the optimum [J].
        grad_mu: dE/dmu at the reported optimum (NaN when the
            equilibrium is undefined).
        grad_alpha0: dE/dalpha0 at the reported optimum.
        physical: True iff ``mu_star >= 0`` (realizable passive spring).
        alpha0_defined: False when the tau-alpha covariance is ~0 and no
            finite equilibrium exists (``mu_star`` is then 0).
        n: Number of samples the fit used.
    """

    mu_star: float
    alpha0_star: float
    residual_energy: float
    grad_mu: float
    grad_alpha0: float
    physical: bool
    alpha0_defined: bool = True
    n: int = 0

    def spring(self) -> SpringParams:
        """The fit as SpringParams; requires a physical, defined optimum."""
        if not (self.physical and self.alpha0_defined):
            raise ValueError(f"fit is not a realizable spring: {self}")
        return SpringParams(self.mu_star, self.alpha0_star)


# --- energy accounting -------------------------------------------------------


def energy(traj: Trajectory, model: EnergyModel = EnergyModel()) -> float:
    """Motor energy K * sum(tau^2) * dt over the trajectory [J]."""
    return model.k_motor * float(traj.tau @ traj.tau) * traj.dt


def energy_with_spring(
    traj: Trajectory, spring: SpringParams, model: EnergyModel = EnergyModel()
) -> float:
    """Motor energy with the spring carrying mu*(alpha - alpha0) of tau."""
    return _energy_raw(traj.alpha, traj.tau, traj.dt, model.k_motor, spring.mu, spring.alpha0)


def _energy_raw(alpha, tau, dt, k, mu, alpha0) -> float:
    # Raw-parameter variant: fitters must evaluate candidate (mu, alpha0)
    # pairs that SpringParams would reject (negative stiffness).
    r = tau - mu * (alpha - alpha0)
    return k * float(r @ r) * dt


def stationarity_residual(
    traj: Trajectory, spring: SpringParams, model: EnergyModel = EnergyModel()
) -> tuple[float, float]:
    """Partial derivatives (dE/dmu, dE/dalpha0) of the spring energy.

    Both vanish at a fitted optimum; the second carries an overall
    factor of mu and is exactly zero whenever mu = 0.
    """
    return _gradient_raw(
        traj.alpha, traj.tau, traj.dt, model.k_motor, spring.mu, spring.alpha0
    )


def _gradient_raw(alpha, tau, dt, k, mu, alpha0) -> tuple[float, float]:
    d = alpha0 - alpha
    r = tau + mu * d
    g_mu = 2.0 * k * float(r @ d) * dt
    g_alpha0 = 2.0 * k * mu * float(np.sum(r)) * dt
    return g_mu, g_alpha0


# --- closed-form fit ---------------------------------------------------------


def fit_optimal(traj: Trajectory, model: EnergyModel = EnergyModel()) -> FitDiagnostics:
    """Closed-form optimal spring for a logged trajectory.

    Raises:
        DegenerateTrajectory: Fewer than 2 samples or ~zero angle
            variance (constant-angle log).
    """
    alpha, tau = traj.alpha, traj.tau
    n = alpha.size
    sums = (
        float(np.sum(alpha)),
        float(np.sum(tau)),
        float(alpha @ alpha),
        float(alpha @ tau),
    )
    mu, alpha0, defined = _solve_normal_equations(n, *sums)
    return _diagnostics(alpha, tau, traj.dt, model.k_motor, n, mu, alpha0, defined)


def _solve_normal_equations(
    n: int, s_a: float, s_t: float, s_aa: float, s_at: float
) -> tuple[float, float, bool]:
    """Specialize the stationarity system to (mu, alpha0) from raw sums.

    Returns (mu, alpha0, alpha0_defined); raises DegenerateTrajectory on
    ~zero angle variance.
    """
    if n < 2:
        raise DegenerateTrajectory(f"need >= 2 samples to fit a spring, got {n}")
    mean_sq = s_aa / n
    variance = mean_sq - (s_a / n) ** 2
    if variance <= VARIANCE_TOL * max(1.0, mean_sq):
        raise DegenerateTrajectory(
            f"angle variance {variance!r} is ~0: spring parameters underdetermined"
        )
    num_mu = s_a * s_t - n * s_at
    den_mu = s_a * s_a - n * s_aa
    mu = num_mu / den_mu
    if abs(num_mu) <= COVARIANCE_TOL * max(1.0, abs(s_a * s_t), abs(n * s_at)):
        # Zero covariance: the best slope is 0, but alpha0 multiplies it,
        # so no finite equilibrium exists (unless tau is identically 0).
        return 0.0, math.nan, False
    alpha0 = (s_t * s_aa - s_at * s_a) / num_mu
    return mu, alpha0, True


def _diagnostics(alpha, tau, dt, k, n, mu, alpha0, defined) -> FitDiagnostics:
    if defined:
        res = _energy_raw(alpha, tau, dt, k, mu, alpha0)
        g_mu, g_a0 = _gradient_raw(alpha, tau, dt, k, mu, alpha0)
    else:
        res = k * float(tau @ tau) * dt
        g_mu, g_a0 = math.nan, 0.0
    return FitDiagnostics(
        mu_star=float(mu),
        alpha0_star=float(alpha0),
        residual_energy=res,
        grad_mu=g_mu,
        grad_alpha0=g_a0,
        physical=bool(mu >= 0.0),
        alpha0_defined=bool(defined),
        n=int(n),
    )


# --- sliding-window streaming fit --------------------------------------------


@dataclass
class WindowState:
    """Fixed-capacity sliding window of (alpha, tau) with running sums.

    Single-writer: call :meth:`push` from one thread; take a
    :meth:`copy` to read concurrently. The equations only ever consume
    the five sums, so a fit is O(1) regardless of capacity.

    Attributes:
        capacity: Window length in samples.
        dt: Sampling interval of the stream [s] (energy reporting).
        model: Energy model used by :meth:`fit`.
    """

    capacity: int
    dt: float
    model: EnergyModel = field(default_factory=EnergyModel)

    def __post_init__(self) -> None:
        if self.capacity < 2:
            raise ValueError(f"capacity must be >= 2, got {self.capacity}")
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ValueError(f"dt must be > 0, got {self.dt!r}")
        self._samples: deque[tuple[float, float]] = deque(maxlen=self.capacity)
        self.s_a = 0.0
        self.s_t = 0.0
        self.s_aa = 0.0
        self.s_at = 0.0
        self.s_tt = 0.0
        self._pushes_since_rebuild = 0

    @property
    def n(self) -> int:
        """Number of samples currently in the window."""
        return len(self._samples)

    def push(self, sample: Sample) -> None:
        """Add a sample; the oldest one leaves once at capacity."""
        a, t = float(sample.alpha), float(sample.tau)
        if len(self._samples) == self.capacity:
            old_a, old_t = self._samples[0]
            self.s_a -= old_a
            self.s_t -= old_t
            self.s_aa -= old_a * old_a
            self.s_at -= old_a * old_t
            self.s_tt -= old_t * old_t
        self._samples.append((a, t))
        self.s_a += a
        self.s_t += t
        self.s_aa += a * a
        self.s_at += a * t
        self.s_tt += t * t
        self._pushes_since_rebuild += 1
        if self._pushes_since_rebuild >= self.capacity:
            self._rebuild_sums()

    def _rebuild_sums(self) -> None:
        # Exact recomputation caps drift from incremental +/- cycles.
        s_a = s_t = s_aa = s_at = s_tt = 0.0
        for a, t in self._samples:
            s_a += a
            s_t += t
            s_aa += a * a
            s_at += a * t
            s_tt += t * t
        self.s_a, self.s_t, self.s_aa, self.s_at, self.s_tt = s_a, s_t, s_aa, s_at, s_tt
        self._pushes_since_rebuild = 0

    def fit(self) -> FitDiagnostics:
        """Closed-form fit on the current window contents.

        Same contract (and errors) as :func:`fit_optimal` restricted to
        the retained samples; computed from the running sums.
        """
        n = len(self._samples)
        mu, alpha0, defined = _solve_normal_equations(
            n, self.s_a, self.s_t, self.s_aa, self.s_at
        )
        k = self.model.k_motor
        if defined:
            res = k * self._residual_sq(mu, alpha0) * self.dt
            g_mu, g_a0 = self._gradient_sums(mu, alpha0)
        else:
            res = k * self.s_tt * self.dt
            g_mu, g_a0 = math.nan, 0.0
        return FitDiagnostics(
            mu_star=float(mu),
            alpha0_star=float(alpha0),
            residual_energy=res,
            grad_mu=g_mu,
            grad_alpha0=g_a0,
            physical=bool(mu >= 0.0),
            alpha0_defined=bool(defined),
            n=n,
        )

    def _residual_sq(self, mu: float, alpha0: float) -> float:
        # sum (tau - mu(alpha - alpha0))^2 expanded in the running sums.
        n = len(self._samples)
        return (
            self.s_tt
            - 2.0 * mu * (self.s_at - alpha0 * self.s_t)
            + mu * mu * (self.s_aa - 2.0 * alpha0 * self.s_a + n * alpha0 * alpha0)
        )

    def _gradient_sums(self, mu: float, alpha0: float) -> tuple[float, float]:
        n = len(self._samples)
        sum_r = self.s_t - mu * self.s_a + mu * alpha0 * n
        sum_r_alpha = self.s_at - mu * self.s_aa + mu * alpha0 * self.s_a
        g_mu = 2.0 * self.model.k_motor * (alpha0 * sum_r - sum_r_alpha) * self.dt
        g_alpha0 = 2.0 * self.model.k_motor * mu * sum_r * self.dt
        return g_mu, g_alpha0

    def contents(self) -> list[tuple[float, float]]:
        """Snapshot of the retained (alpha, tau) pairs, oldest first."""
        return list(self._samples)

    def copy(self) -> "WindowState":
        """Independent snapshot safe to hand to another thread."""
        dup = WindowState(self.capacity, self.dt, self.model)
        dup._samples.extend(self._samples)
        dup.s_a, dup.s_t = self.s_a, self.s_t
        dup.s_aa, dup.s_at, dup.s_tt = self.s_aa, self.s_at, self.s_tt
        dup._pushes_since_rebuild = self._pushes_since_rebuild
        return dup


def window_push(state: WindowState, sample: Sample) -> WindowState:
    """Functional-style push: mutates ``state`` and returns it."""
    state.push(sample)
    return state


def window_fit(state: WindowState) -> FitDiagnostics:
    """Fit the spring to the window contents (see :meth:`WindowState.fit`)."""
    return state.fit()
