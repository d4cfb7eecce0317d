"""Structural checks: the exact scattering identity, linearization order,
energy conservation, and rotation/scaling covariance."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad_vec

from .dynamics import (IntegratorConfig, PhaseState, Trajectory,
                       direction_curvature_matrix, free_flow, hamiltonian,
                       integrate)
from .potential import Potential
from .scattering import ScatteringTable, launch, scattering_sample

RESIDUAL_FLOOR = 1e-14


@dataclass(frozen=True)
class IdentityReport:
    theta: float
    alpha: float
    lhs: np.ndarray
    rhs: np.ndarray
    residual: float
    relative_residual: float


def _field_difference(state: PhaseState, pot: Potential):
    """(V - V_e)(X): the free-flow field differs only through the potential."""
    a, b = state.vortices
    top = -0.5 * (pot.gradient_perp(a) - pot.gradient_perp(b))
    bottom = -0.5 * (pot.gradient(a) + pot.gradient(b))
    return np.concatenate((top, bottom))


def identity_residual(pot: Potential, theta, alpha, sigma, rho, tau=None,
                         cfg: IntegratorConfig = IntegratorConfig(),
                         quad_tol: float = 1e-10) -> IdentityReport:
    """Residual of the exact identity
    int_0^tau dXe/dX0(tau-s, X(s)) (V - V_e)(X(s)) ds = X(tau) - X_e(tau).

    The free-flow Jacobian is the closed form [[I, (tau-s) E(xi(s))], [0, I]]
    evaluated at the perturbed state, so the identity holds exactly and the
    residual measures only ODE and quadrature error.
    """
    if tau is None:
        tau = 2.0 * sigma * rho
    x0 = launch(theta, alpha, sigma, rho)
    traj = integrate(x0, pot, tau, cfg)

    def integrand(s):
        y = traj.at(s)
        state = PhaseState(y[:2], y[2:])
        diff = _field_difference(state, pot)
        top = diff[:2] + (tau - s) * direction_curvature_matrix(state.xi) @ diff[2:]
        return np.concatenate((top, diff[2:]))

    lhs, _err = quad_vec(integrand, 0.0, tau, epsabs=quad_tol, epsrel=quad_tol)
    free = free_flow(tau, x0)
    final = traj.final_state
    rhs = np.concatenate((final.x - free.x, final.xi - free.xi))
    residual = float(np.linalg.norm(lhs - rhs))
    rel = residual / max(float(np.linalg.norm(rhs)), RESIDUAL_FLOOR)
    return IdentityReport(theta, alpha, lhs, rhs, residual, rel)


def linearized_prediction(pot: Potential, theta, alpha, sigma, rho, tau,
                          quad_tol: float = 1e-12) -> np.ndarray:
    """The identity's left side evaluated along the free flow with the
    frozen Jacobian [[I, (tau-s) E(xi0)], [0, I]]."""
    x0 = launch(theta, alpha, sigma, rho)
    E0 = direction_curvature_matrix(x0.xi)

    def integrand(s):
        diff = _field_difference(free_flow(s, x0), pot)
        return np.concatenate((diff[:2] + (tau - s) * E0 @ diff[2:], diff[2:]))

    val, _err = quad_vec(integrand, 0.0, tau, epsabs=quad_tol, epsrel=quad_tol)
    return val


def linearization_order(potential_for: Callable[[float], Potential],
                        theta, alpha, sigma, rho, tau=None,
                        cfg: IntegratorConfig = IntegratorConfig(),
                        eps_list: Sequence[float] = (0.02, 0.01, 0.005)):
    """err(eps) = |linearized prediction - S_eps| for a strength ladder.

    The remainder is quadratic, so consecutive dyadic ratios approach 4.
    """
    if tau is None:
        tau = 2.0 * sigma * rho
    out = []
    for eps in eps_list:
        pot = potential_for(eps)
        pred = linearized_prediction(pot, theta, alpha, sigma, rho, tau)
        samp = scattering_sample(theta, alpha, sigma, rho, pot, tau, cfg)
        out.append((eps, float(np.linalg.norm(pred - samp.vector()))))
    return out


def conservation_report(traj: Trajectory, pot: Potential,
                        n_samples: int = 1000) -> float:
    """Max Hamiltonian drift over dense-output samples of the trajectory."""
    _ts, states = traj.sample(max(n_samples, 2))
    h = np.array([hamiltonian(PhaseState(y[:2], y[2:]), pot) for y in states])
    return float(np.max(np.abs(h - h[0])))


@dataclass(frozen=True)
class CovarianceReport:
    rotation_residual: float
    scaling_residual: float

    @property
    def worst(self) -> float:
        return max(self.rotation_residual, self.scaling_residual)


def covariance_report(pot: Potential, table: ScatteringTable,
                      cfg: IntegratorConfig = IntegratorConfig(),
                      scale_factor: float = 2.0,
                      scale_alpha: float = 0.2) -> CovarianceReport:
    """Rotation covariance of a radial potential's table plus the scaling law.

    Rotation: S(theta, alpha) must equal R_theta applied blockwise to
    S(0, alpha).  Scaling: the trajectory for (c sigma, c rho, c alpha) with
    the potential dilated by c is (c x(s/c^2), c xi(s/c^2)).
    """
    rot_res = 0.0
    for k, th in enumerate(table.thetas):
        c, s = np.cos(th), np.sin(th)
        rot = np.array([[c, -s], [s, c]])
        dx = table.S_x[k] - table.S_x[0] @ rot.T
        dxi = table.S_xi[k] - table.S_xi[0] @ rot.T
        rot_res = max(rot_res, float(np.max(np.hypot(
            np.linalg.norm(dx, axis=-1), np.linalg.norm(dxi, axis=-1)))))

    c = scale_factor
    sigma, rho = table.sigma, table.rho
    tau = 2.0 * sigma * rho
    base = integrate(launch(0.0, scale_alpha, sigma, rho), pot, tau, cfg)
    scaled = integrate(launch(0.0, c * scale_alpha, c * sigma, c * rho),
                       pot.dilated(c), c**2 * tau, cfg)
    ts = np.linspace(0.0, tau, 64)
    diff = scaled.at(c**2 * ts) - c * base.at(ts)
    scale_res = float(np.max(np.abs(diff)))
    return CovarianceReport(rot_res, scale_res)
