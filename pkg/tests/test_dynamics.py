import numpy as np
import pytest

from dipoletomo.dynamics import (TWO_PI, CollisionError, IntegratorConfig,
                                 NotExitedError, PhaseState,
                                 SingularDirectionError,
                                 direction_curvature_matrix, dipole_pair_rhs,
                                 exit_time, free_flow, free_flow_jacobian,
                                 hamiltonian, integrate, integrate_pair,
                                 n_vortex_rhs, vector_field)
from dipoletomo.potential import ZERO, CompactBump, GaussianBump, GaussianSum, perp
from dipoletomo.scattering import launch
from dipoletomo.verification import conservation_report

SIGMA, RHO = 0.1, 2.0 * np.pi
POT = CompactBump(0.01, 0.5, 8.0)


def test_vortex_positions():
    st = PhaseState(np.zeros(2), np.array([0.0, 0.1]))
    a, b = st.vortices
    # xi_perp = (xi2, -xi1): vortices sit at (+-0.1, 0)
    assert np.allclose(sorted([a[0], b[0]]), [-0.1, 0.1])
    assert np.allclose([a[1], b[1]], 0.0)


def test_vector_field_direction_equation():
    st = PhaseState(np.zeros(2), np.array([0.0, 0.1]))
    _dx, dxi = vector_field(st, POT)
    expected = -0.5 * (POT.gradient(np.array([-0.1, 0.0]))
                       + POT.gradient(np.array([0.1, 0.0])))
    assert np.max(np.abs(dxi - expected)) < 1e-14


def test_vector_field_matches_hamiltonian_finite_difference():
    st = PhaseState(np.array([0.05, -0.02]), np.array([0.03, 0.1]))
    dx, dxi = vector_field(st, POT)
    h = 1e-6
    grad_x = np.zeros(2)
    grad_xi = np.zeros(2)
    for i in range(2):
        e = np.zeros(2)
        e[i] = h
        grad_x[i] = (hamiltonian(PhaseState(st.x + e, st.xi), POT)
                     - hamiltonian(PhaseState(st.x - e, st.xi), POT)) / (2 * h)
        grad_xi[i] = (hamiltonian(PhaseState(st.x, st.xi + e), POT)
                      - hamiltonian(PhaseState(st.x, st.xi - e), POT)) / (2 * h)
    # Hamiltonian form: dx = dH/dxi, dxi = -dH/dx
    assert np.max(np.abs(dx - grad_xi)) < 1e-7
    assert np.max(np.abs(dxi + grad_x)) < 1e-7


def test_zero_direction_rejected():
    with pytest.raises(SingularDirectionError):
        vector_field(PhaseState(np.zeros(2), np.zeros(2)), ZERO)


def test_free_flow_speed():
    st = launch(0.0, 0.0, SIGMA, RHO)
    moved = free_flow(1.0, st)
    assert np.allclose(moved.xi, st.xi)
    assert np.isclose(np.linalg.norm(moved.x - st.x), 1.0 / (TWO_PI * SIGMA))


def test_integration_reduces_to_free_flow_for_zero_potential():
    st = launch(0.0, 0.2, SIGMA, RHO)
    traj = integrate(st, ZERO, 1.0)
    err = traj.final_state.as_array() - free_flow(1.0, st).as_array()
    assert np.max(np.abs(err)) < 1e-9


def test_direction_curvature_matrix():
    xi = np.array([0.6, 0.8])  # unit vector
    E = direction_curvature_matrix(xi)
    # E(xi) xi = -(1/2pi) xi for unit xi
    assert np.max(np.abs(E @ xi + xi / TWO_PI)) < 1e-14
    # finite-difference check of the free-flow velocity derivative
    h = 1e-7
    for i in range(2):
        e = np.zeros(2)
        e[i] = h
        col = (free_flow(1.0, PhaseState(np.zeros(2), xi + e)).x
               - free_flow(1.0, PhaseState(np.zeros(2), xi - e)).x) / (2 * h)
        assert np.max(np.abs(E[:, i] - col)) < 1e-6


def test_free_flow_jacobian_blocks():
    xi = np.array([0.05, 0.1])
    jac = free_flow_jacobian(0.7, xi)
    assert np.allclose(jac[:2, :2], np.eye(2))
    assert np.allclose(jac[2:, 2:], np.eye(2))
    assert np.allclose(jac[2:, :2], 0.0)
    assert np.allclose(jac[:2, 2:], 0.7 * direction_curvature_matrix(xi))


def test_free_flow_exit_time_closed_form():
    # chord geometry: exit at sigma rho + 2 pi sigma sqrt((rho/2pi)^2 - sigma^2)
    st = launch(0.0, 0.0, SIGMA, RHO)
    traj = integrate(st, ZERO, 2.0 * SIGMA * RHO)
    expected = SIGMA * RHO + TWO_PI * SIGMA * np.sqrt((RHO / TWO_PI) ** 2 - SIGMA**2)
    assert np.isclose(exit_time(traj, RHO), expected, atol=1e-8)
    assert np.isclose(expected, 1.25349, atol=5e-6)


def test_exit_time_not_exited():
    st = launch(0.0, 0.0, SIGMA, RHO)
    traj = integrate(st, ZERO, 0.1)  # still inside the ball
    with pytest.raises(NotExitedError):
        exit_time(traj, RHO)


def test_energy_conservation_default_tolerances():
    traj = integrate(launch(0.0, 0.2, SIGMA, RHO), POT, 2.0 * SIGMA * RHO)
    assert conservation_report(traj, POT) <= 1e-9


def test_energy_drift_shrinks_with_tolerance():
    st = launch(0.0, 0.2, SIGMA, RHO)
    loose = conservation_report(
        integrate(st, POT, 2.0 * SIGMA * RHO, IntegratorConfig(1e-6, 1e-8)), POT)
    tight = conservation_report(
        integrate(st, POT, 2.0 * SIGMA * RHO, IntegratorConfig(1e-10, 1e-12)), POT)
    assert tight < loose / 10


def test_pair_rhs_collision():
    with pytest.raises(CollisionError):
        dipole_pair_rhs(np.zeros(2), np.zeros(2), ZERO)


def test_n_vortex_dipole_specialization():
    a_plus = np.array([0.3, -0.1])
    a_minus = np.array([0.1, 0.2])
    vp, vm = dipole_pair_rhs(a_plus, a_minus, POT)
    vel = n_vortex_rhs([a_plus, a_minus], [1, -1], POT)
    assert np.max(np.abs(vel[0] - vp)) < 1e-12
    assert np.max(np.abs(vel[1] - vm)) < 1e-12


def test_n_vortex_same_sign_co_rotation():
    a = np.array([[1.0, 0.0], [-1.0, 0.0]])
    vel = n_vortex_rhs(a, [1, 1], ZERO)
    assert np.max(np.abs(vel[0] + vel[1])) < 1e-14     # equal and opposite
    assert abs(vel[0] @ a[0]) < 1e-14                  # tangent to the circle
    assert abs(vel[1] @ a[1]) < 1e-14


def test_change_of_variables_consistency():
    # (x, xi) = ((a+ + a-)/2, perp((a+ - a-)/2)) turns the pair ODE into
    # the reduced Hamiltonian system
    st = PhaseState(np.array([0.05, -0.1]), np.array([0.04, 0.09]))
    a_minus, a_plus = st.vortices  # x + xi_perp = x - p
    vp, vm = dipole_pair_rhs(a_plus, a_minus, POT)
    dx, dxi = vector_field(st, POT)
    assert np.max(np.abs(0.5 * (vp + vm) - dx)) < 1e-12
    assert np.max(np.abs(perp(0.5 * (vp - vm)) - dxi)) < 1e-12


def test_integrate_pair_two_gaussians():
    pot = GaussianSum([GaussianBump(0.01, 10.0, (0.3, 0.2)),
                       GaussianBump(0.01, 10.0, (-0.2, -0.4))])
    times, a_plus, a_minus = integrate_pair((0.05, -1.0), (-0.05, -1.0), pot, 5.0)
    assert times[-1] == 5.0
    x = 0.5 * (a_plus + a_minus)
    xi = perp(0.5 * (a_plus - a_minus))
    h = np.array([hamiltonian(PhaseState(xx, xx_i), pot)
                  for xx, xx_i in zip(x, xi)])
    assert np.max(np.abs(h - h[0])) <= 1e-8
