import numpy as np
import pytest

from dipoletomo.potential import ZERO, CompactBump
from dipoletomo.scattering import (S0Series, launch, load_table,
                                   load_table_json, radial_table,
                                   rotate_sample, s0_series, save_table,
                                   save_table_json, scattering_sample,
                                   synthesize_angular_table, table_from_text,
                                   table_to_text)

SIGMA, RHO = 0.1, 2.0 * np.pi
BETA = SIGMA + RHO / (2.0 * np.pi)
POT = CompactBump(0.01, 0.5, 8.0)


@pytest.fixture(scope="module")
def small_table():
    return radial_table(POT, SIGMA, RHO, 24)


def test_launch_geometry_theta_zero():
    st = launch(0.0, 0.2, SIGMA, RHO)
    assert np.allclose(st.xi, [0.0, SIGMA])
    assert np.allclose(st.x, [0.2, -RHO / (2.0 * np.pi)])


def test_launch_geometry_rotates():
    theta = 0.9
    st = launch(theta, 0.2, SIGMA, RHO)
    c, s = np.cos(theta), np.sin(theta)
    rot = np.array([[c, -s], [s, c]])
    base = launch(0.0, 0.2, SIGMA, RHO)
    assert np.max(np.abs(st.x - rot @ base.x)) < 1e-15
    assert np.max(np.abs(st.xi - rot @ base.xi)) < 1e-15


def test_zero_potential_scatters_trivially():
    s = scattering_sample(0.0, 0.2, SIGMA, RHO, ZERO)
    assert np.max(np.abs(s.vector())) < 1e-10


def test_tau_below_exit_time_rejected():
    with pytest.raises(ValueError):
        scattering_sample(0.0, 0.2, SIGMA, RHO, POT, tau=SIGMA * RHO)


def test_table_grid(small_table):
    t = small_table
    assert t.alphas.shape == (2 * t.N + 1,)
    assert np.isclose(t.alphas[0], -BETA)
    assert np.isclose(t.alphas[-1], BETA)
    assert np.isclose(t.beta, BETA)
    assert t.S_x.shape == (1, 2 * t.N + 1, 2)


def test_out_of_support_columns_vanish(small_table):
    t = small_table
    outside = np.abs(t.alphas) >= BETA - 1e-12
    assert np.all(t.S_x[:, outside] == 0.0)
    assert np.all(t.S_xi[:, outside] == 0.0)
    # and a directly simulated boundary launch agrees
    s = scattering_sample(0.0, BETA, SIGMA, RHO, POT)
    assert np.max(np.abs(s.vector())) < 1e-10


def test_rotation_covariance_of_samples():
    s0 = scattering_sample(0.0, 0.2, SIGMA, RHO, POT)
    s1 = scattering_sample(1.1, 0.2, SIGMA, RHO, POT)
    pred = rotate_sample(s0, 1.1)
    assert np.max(np.abs(s1.vector() - pred.vector())) < 1e-8


def test_synthesized_angular_table(small_table):
    ang = synthesize_angular_table(small_table, 4)
    assert len(ang.thetas) == 4
    k = 2  # theta = pi
    rot = np.array([[-1.0, 0.0], [0.0, -1.0]])
    assert np.max(np.abs(ang.S_x[k] - small_table.S_x[0] @ rot.T)) < 1e-12


def test_s0_series_shapes_and_radial_invariance(small_table):
    ang = synthesize_angular_table(small_table, 4)
    s0 = s0_series(ang)
    assert isinstance(s0, S0Series)
    assert s0.values.shape == (4, len(small_table.alphas))
    # radial potentials give a theta-independent S0
    spread = np.max(np.abs(s0.values - s0.values[0]))
    assert spread < 1e-12


def test_text_round_trip(small_table):
    text = table_to_text(small_table)
    clone = table_from_text(text)
    assert np.array_equal(clone.S_x, small_table.S_x)
    assert np.array_equal(clone.S_xi, small_table.S_xi)
    assert np.array_equal(clone.alphas, small_table.alphas)
    assert clone.sigma == small_table.sigma
    assert clone.rho == small_table.rho
    assert clone.potential == small_table.potential
    assert clone.rel_tol == small_table.rel_tol
    assert table_to_text(clone) == text


def test_file_round_trips(tmp_path, small_table):
    p_txt = tmp_path / "t.txt"
    p_json = tmp_path / "t.json"
    save_table(small_table, p_txt)
    save_table_json(small_table, p_json)
    for clone in (load_table(p_txt), load_table_json(p_json)):
        assert np.array_equal(clone.S_x, small_table.S_x)
        assert np.array_equal(clone.S_xi, small_table.S_xi)


def test_table_build_is_deterministic():
    a = radial_table(POT, SIGMA, RHO, 6)
    b = radial_table(POT, SIGMA, RHO, 6)
    assert table_to_text(a) == table_to_text(b)


def test_parallel_build_matches_serial():
    serial = radial_table(POT, SIGMA, RHO, 6, workers=1)
    parallel = radial_table(POT, SIGMA, RHO, 6, workers=2)
    assert table_to_text(serial) == table_to_text(parallel)
