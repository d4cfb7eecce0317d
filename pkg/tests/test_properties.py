import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from dipoletomo.dynamics import PhaseState, free_flow
from dipoletomo.potential import perp
from dipoletomo.reconstruction import lambda_kernel, simpson_weights
from dipoletomo.scattering import ScatteringTable, table_from_text, table_to_text

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
unit_range = st.floats(-1.0, 1.0, allow_nan=False, allow_infinity=False)


@given(finite, finite)
def test_perp_is_a_quarter_rotation(u1, u2):
    u = np.array([u1, u2])
    assert abs(np.dot(perp(u), u)) <= 1e-12 * (u @ u + 1.0)
    assert np.array_equal(perp(perp(u)), -u)


@given(st.floats(0.1, 10.0), st.floats(0.0, 5.0), st.floats(0.0, 5.0),
       finite, finite)
@settings(max_examples=50)
def test_free_flow_is_a_semigroup(speed, s, t, x1, x2):
    st0 = PhaseState(np.array([x1, x2]), np.array([0.0, speed]))
    once = free_flow(s + t, st0)
    twice = free_flow(t, free_flow(s, st0))
    assert np.allclose(once.as_array(), twice.as_array(), rtol=0, atol=1e-9)


@given(st.floats(0.0, 2.0), unit_range, st.floats(0.01, 0.5))
def test_lambda_kernel_bounds(r, alpha, sigma):
    a = abs(alpha + sigma)
    if r == 0.0 and a == 0.0:
        return
    lam = lambda_kernel(r, alpha, sigma)
    assert lam >= 0.5 * max(r * (a <= r), 0.0)
    assert lam <= 0.5 * (a + r) + 1e-12 or a > r


@given(st.integers(1, 12), st.floats(0.01, 1.0))
def test_simpson_weights_integrate_constants(half, h):
    w = simpson_weights(2 * half + 1, h)
    assert np.isclose(w.sum(), 2 * half * h)


@given(st.integers(1, 4), st.data())
@settings(max_examples=25)
def test_table_text_round_trip_exact(n, data):
    L = 2 * n + 1
    vals = data.draw(st.lists(st.floats(-1.0, 1.0, allow_nan=False, width=64),
                              min_size=4 * L, max_size=4 * L))
    arr = np.array(vals).reshape(1, L, 4)
    table = ScatteringTable(
        sigma=0.1, rho=2 * np.pi, N=n, thetas=np.zeros(1),
        alphas=1.1 * np.arange(-n, n + 1) / n,
        S_x=arr[..., :2].copy(), S_xi=arr[..., 2:].copy(),
        tau=0.4 * np.pi, potential="zero", rel_tol=1e-10, abs_tol=1e-12)
    clone = table_from_text(table_to_text(table))
    assert np.array_equal(clone.S_x, table.S_x)
    assert np.array_equal(clone.S_xi, table.S_xi)
    assert np.array_equal(clone.alphas, table.alphas)
