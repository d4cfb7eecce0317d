"""Dipole phase-space dynamics: Hamiltonian field, free flow, integration.

The phase state is X = (x, xi) with center of mass x and travel direction
xi; the two vortices sit at x + perp(xi) and x - perp(xi).  The Hamiltonian
is (1/2pi) log|xi| + (Q(x + perp(xi)) + Q(x - perp(xi))) / 2, so |xi| = 0 is
a genuine singularity and is rejected up front.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .potential import Potential, perp

TWO_PI = 2.0 * np.pi

COLLISION_TOL = 1e-9


class SingularDirectionError(ValueError):
    """Travel direction xi = 0: the log term in the Hamiltonian blows up."""


class CollisionError(ValueError):
    """Two vortices closer than the collision tolerance."""


class StepFailureError(RuntimeError):
    """The adaptive integrator could not complete the requested interval."""


class NotExitedError(RuntimeError):
    """A vortex is still inside the ball at the trajectory's final time."""


@dataclass(frozen=True)
class PhaseState:
    """Center of mass x and travel direction xi, both 2-vectors."""

    x: np.ndarray
    xi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        object.__setattr__(self, "xi", np.asarray(self.xi, dtype=float))

    @property
    def vortices(self):
        """The unordered vortex pair (x + perp(xi), x - perp(xi))."""
        p = perp(self.xi)
        return self.x + p, self.x - p

    def as_array(self):
        return np.concatenate((self.x, self.xi))

    @staticmethod
    def from_array(y):
        y = np.asarray(y, dtype=float)
        return PhaseState(y[:2], y[2:])


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = np.inf
    initial_step: float | None = None

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0 or self.max_step <= 0:
            raise ValueError("tolerances and max_step must be positive")

    def tightened(self, factor: float) -> "IntegratorConfig":
        return IntegratorConfig(self.rel_tol / factor, self.abs_tol / factor,
                                self.max_step, self.initial_step)


def _check_direction(xi):
    if not np.all(np.isfinite(xi)) or float(np.hypot(xi[0], xi[1])) == 0.0:
        raise SingularDirectionError("travel direction xi must be nonzero")


def hamiltonian(state: PhaseState, pot: Potential) -> float:
    _check_direction(state.xi)
    a, b = state.vortices
    return (np.log(np.hypot(*state.xi)) / TWO_PI
            + 0.5 * (float(pot.value(a)) + float(pot.value(b))))


def vector_field(state: PhaseState, pot: Potential):
    """Hamiltonian vector field (dx/ds, dxi/ds) of the dipole system."""
    _check_direction(state.xi)
    a, b = state.vortices
    n2 = float(state.xi @ state.xi)
    dx = state.xi / (TWO_PI * n2) - 0.5 * (pot.gradient_perp(a) - pot.gradient_perp(b))
    dxi = -0.5 * (pot.gradient(a) + pot.gradient(b))
    return dx, dxi


def free_flow(s: float, state: PhaseState) -> PhaseState:
    """Straight-line motion at speed 1/(2 pi |xi|); xi is constant."""
    _check_direction(state.xi)
    n2 = float(state.xi @ state.xi)
    return PhaseState(state.x + (s / TWO_PI) * state.xi / n2, state.xi)


def direction_curvature_matrix(xi) -> np.ndarray:
    """E(xi) = (1/2pi) (I/|xi|^2 - 2 xi xi^T / |xi|^4), the xi-derivative
    of the free-flow velocity."""
    xi = np.asarray(xi, dtype=float)
    _check_direction(xi)
    n2 = float(xi @ xi)
    return (np.eye(2) / n2 - 2.0 * np.outer(xi, xi) / n2**2) / TWO_PI


def free_flow_jacobian(s: float, xi) -> np.ndarray:
    """d X_e(s, X0) / d X0 as a 4x4 matrix [[I, s E(xi)], [0, I]]."""
    jac = np.eye(4)
    jac[:2, 2:] = s * direction_curvature_matrix(xi)
    return jac


class Trajectory:
    """Accepted steps of an adaptive integration plus the dense interpolant."""

    def __init__(self, times, states, sol):
        self.times = np.asarray(times)
        self.states = np.asarray(states)  # (n, 4)
        self._sol = sol

    @property
    def final_time(self) -> float:
        return float(self.times[-1])

    @property
    def initial_state(self) -> PhaseState:
        return PhaseState.from_array(self.states[0])

    @property
    def final_state(self) -> PhaseState:
        return PhaseState.from_array(self.states[-1])

    def at(self, s):
        """Dense-output phase vector(s) at time(s) s, shape (4,) or (4, n)."""
        return self._sol(s)

    def state(self, s: float) -> PhaseState:
        return PhaseState.from_array(self._sol(s))

    def sample(self, n: int):
        """(times, states) on n uniformly spaced dense-output points."""
        ts = np.linspace(0.0, self.final_time, n)
        return ts, self.at(ts).T


def integrate(state0: PhaseState, pot: Potential, T: float,
              cfg: IntegratorConfig = IntegratorConfig()) -> Trajectory:
    """Adaptive RK5(4) solution of the dipole system on [0, T]."""
    if T < 0:
        raise ValueError("T must be nonnegative")
    _check_direction(state0.xi)

    def rhs(_s, y):
        st = PhaseState(y[:2], y[2:])
        dx, dxi = vector_field(st, pot)
        return np.concatenate((dx, dxi))

    if T == 0.0:
        y0 = state0.as_array()
        return Trajectory([0.0], [y0], lambda s: np.repeat(
            y0[:, None], np.size(s), axis=1).squeeze())

    res = solve_ivp(rhs, (0.0, T), state0.as_array(), method="RK45",
                    rtol=cfg.rel_tol, atol=cfg.abs_tol, max_step=cfg.max_step,
                    first_step=cfg.initial_step, dense_output=True)
    if not res.success:
        raise StepFailureError(res.message)
    return Trajectory(res.t, res.y.T, res.sol)


def exit_time(traj: Trajectory, rho: float, time_tol: float = 1e-10,
              scan_points: int = 4096) -> float:
    """Last time either vortex is inside the closed ball of radius rho/2pi.

    Returns 0.0 if neither vortex ever enters.  Located by scanning the
    dense output and bisecting the final inside-to-outside crossing.
    """
    radius = rho / TWO_PI

    def depth(s):
        y = traj.at(s)
        x, xi = y[:2], y[2:]
        p = perp(xi)
        return max(np.hypot(*(x + p)), np.hypot(*(x - p))) - radius

    T = traj.final_time
    if depth(T) <= 0.0:
        raise NotExitedError("a vortex is still inside the ball at final time")

    ts = np.linspace(0.0, T, scan_points)
    inside = np.array([depth(s) for s in ts]) <= 0.0
    idx = np.nonzero(inside)[0]
    if idx.size == 0:
        return 0.0
    lo, hi = ts[idx[-1]], ts[idx[-1] + 1]
    while hi - lo > time_tol:
        mid = 0.5 * (lo + hi)
        if depth(mid) <= 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def dipole_pair_rhs(a_plus, a_minus, pot: Potential):
    """Velocities of the raw vortex pair (positive and negative degree)."""
    a_plus = np.asarray(a_plus, dtype=float)
    a_minus = np.asarray(a_minus, dtype=float)
    d = a_plus - a_minus
    sep2 = float(d @ d)
    if sep2 < COLLISION_TOL**2:
        raise CollisionError("vortex pair within collision tolerance")
    drive = perp(d) / (np.pi * sep2)
    return drive + pot.gradient_perp(a_plus), drive - pot.gradient_perp(a_minus)


def n_vortex_rhs(positions, degrees, pot: Potential):
    """Velocities of n signed point vortices in the background potential.

    Vortex j follows (1/(pi d_j)) perp-grad of the Coulomb energy
    -sum_{j<k} d_j d_k log|a_j - a_k| plus pi sum_k Q(a_k).
    """
    a = np.asarray(positions, dtype=float)
    d = np.asarray(degrees, dtype=float)
    if not np.all(np.abs(d) == 1):
        raise ValueError("degrees must be +1 or -1")
    n = len(a)
    vel = np.zeros_like(a)
    for j in range(n):
        grad = np.zeros(2)
        for k in range(n):
            if k == j:
                continue
            diff = a[j] - a[k]
            sep2 = float(diff @ diff)
            if sep2 < COLLISION_TOL**2:
                raise CollisionError("vortices within collision tolerance")
            grad += -d[j] * d[k] * diff / sep2
        grad += np.pi * pot.gradient(a[j])
        vel[j] = perp(grad) / (np.pi * d[j])
    return vel


def integrate_pair(a_plus0, a_minus0, pot: Potential, T: float,
                   cfg: IntegratorConfig = IntegratorConfig()):
    """Integrate the raw pair ODE; returns (times, a_plus, a_minus) arrays."""

    def rhs(_s, y):
        vp, vm = dipole_pair_rhs(y[:2], y[2:], pot)
        return np.concatenate((vp, vm))

    y0 = np.concatenate((np.asarray(a_plus0, float), np.asarray(a_minus0, float)))
    res = solve_ivp(rhs, (0.0, T), y0, method="RK45", rtol=cfg.rel_tol,
                    atol=cfg.abs_tol, max_step=cfg.max_step, dense_output=True)
    if not res.success:
        raise StepFailureError(res.message)
    return res.t, res.y[:2].T, res.y[2:].T
