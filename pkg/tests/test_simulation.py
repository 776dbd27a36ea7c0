import numpy as np
import pytest
from scipy.linalg import expm

from polplace import Divergence, StateSpaceModel, error_envelope_check, simulate
from polplace.errors import DimensionMismatch
from polplace.simulation import closed_loop_matrix, default_dt

K_DI = [[1.0, 2.0]]
L_DI = [[4.0], [4.0]]


@pytest.fixture
def di_trace(double_integrator):
    return simulate(double_integrator, K_DI, L_DI, [1, 0], [0, 0], dt=1e-3, duration=10.0)


def test_matches_matrix_exponential(double_integrator, di_trace, backend):
    trace = simulate(double_integrator, K_DI, L_DI, [1, 0], [0, 0], dt=1e-3, duration=10.0)
    F = closed_loop_matrix(double_integrator, np.array(K_DI), np.array(L_DI))
    w0 = np.array([1.0, 0, 0, 0])
    for k in (0, 1000, 5000, 10000):
        w = expm(F * trace.t[k]) @ w0
        np.testing.assert_allclose(trace.x[k], w[:2], atol=1e-9)
        np.testing.assert_allclose(trace.z[k], w[2:], atol=1e-9)


def test_final_state_values(double_integrator, di_trace):
    F = closed_loop_matrix(double_integrator, np.array(K_DI), np.array(L_DI))
    w10 = expm(10 * F) @ np.array([1.0, 0, 0, 0])
    # the oracle gives ||x(10)|| of about 3.6e-3: slow t*exp(-t) terms from the B K e coupling
    assert np.linalg.norm(di_trace.x[-1]) == pytest.approx(np.linalg.norm(w10[:2]), rel=1e-6)
    assert np.linalg.norm(di_trace.e[-1]) <= 1e-3


def test_trace_shape_and_error_column(di_trace):
    assert di_trace.t.shape == (10001,)
    np.testing.assert_allclose(np.diff(di_trace.t), 1e-3, rtol=1e-9)
    assert np.array_equal(di_trace.e, di_trace.x - di_trace.z)
    np.testing.assert_array_equal(di_trace.u, -di_trace.z @ np.array(K_DI).T)
    np.testing.assert_array_equal(di_trace.y, di_trace.x[:, :1])
    assert di_trace.table().shape == (10001, 1 + 2 + 2 + 1 + 1 + 2)
    assert di_trace.columns() == ["t", "x1", "x2", "z1", "z2", "u1", "y1", "e1", "e2"]


def test_identical_dynamics_symmetry():
    m = StateSpaceModel([[-1, 0.5], [0, -2]], [[0], [1]], [[1, 0]])
    tr = simulate(m, [[0, 0]], [[0], [0]], [1, -1], [1, -1], dt=1e-2, duration=3)
    assert np.array_equal(tr.x, tr.z)


def test_unstable_open_loop_diverges():
    m = StateSpaceModel([[5.0]], [[1]], [[1]])
    with pytest.raises(Divergence) as info:
        simulate(m, [[0]], [[0]], [1], [1], dt=1e-2, duration=10)
    assert info.value.step > 0


def test_argument_checks(double_integrator):
    with pytest.raises(DimensionMismatch):
        simulate(double_integrator, [[1, 2, 3]], L_DI, [1, 0], [0, 0])
    with pytest.raises(DimensionMismatch):
        simulate(double_integrator, K_DI, L_DI, [1, 0, 0], [0, 0])
    with pytest.raises(ValueError):
        simulate(double_integrator, K_DI, L_DI, [1, 0], [0, 0], dt=0)
    with pytest.raises(ValueError):
        simulate(double_integrator, K_DI, L_DI, [1, 0], [0, 0], dt=0.1, duration=0.01)


def test_default_dt():
    assert default_dt([-1, -2]) == 1e-3
    assert default_dt([-100]) == pytest.approx(1e-4)
    assert default_dt([0j]) == 1e-3


# --- error_envelope_check -------------------------------------------------

def test_envelope_passes(di_trace):
    ok, ratio = error_envelope_check(di_trace, [-2, -2])
    assert ok and ratio < 1e-3
    # oracle: e(5) = expm(5 (A - L C)) e(0)
    G = np.array([[-4.0, 1.0], [-4.0, 0.0]])
    assert ratio == pytest.approx(np.linalg.norm(expm(5 * G) @ [1.0, 0.0]), rel=1e-6)


def test_envelope_zero_initial_error(double_integrator):
    tr = simulate(double_integrator, K_DI, L_DI, [1, 0], [1, 0], duration=5)
    assert error_envelope_check(tr, [-2, -2]) == (True, 0.0)


def test_envelope_fails_without_correction():
    # neutrally stable oscillator, no observer correction
    m = StateSpaceModel([[0, 1], [-1, 0]], [[0], [1]], [[1, 0]])
    tr = simulate(m, [[0, 0]], [[0], [0]], [1, 0], [0, 0], dt=1e-2, duration=10)
    ok, ratio = error_envelope_check(tr, [-1, -1])
    assert not ok
    assert ratio == pytest.approx(1.0, abs=1e-6)


def test_envelope_trace_too_short(double_integrator):
    tr = simulate(double_integrator, K_DI, L_DI, [1, 0], [0, 0], duration=1)
    with pytest.raises(ValueError):
        error_envelope_check(tr, [-2, -2])


# --- properties -----------------------------------------------------------

@pytest.mark.parametrize("seed", range(6))
def test_error_decouples(seed, fixture3):
    from polplace import design_controller, design_observer

    rng = np.random.default_rng(seed)
    K = design_controller(fixture3, [-1, -1.5, -2]).gain
    L = design_observer(fixture3, [-3, -3.5, -4]).gain
    x0, z0 = rng.normal(size=3), rng.normal(size=3)
    tr = simulate(fixture3, K, L, x0, z0, dt=1e-3, duration=4)
    G = fixture3.A - L @ fixture3.C
    e0 = x0 - z0
    step = expm(G * 1e-3)
    e = e0.copy()
    worst = 0.0
    for k in range(len(tr.t)):
        worst = max(worst, np.max(np.abs(tr.e[k] - e)))
        e = step @ e
    assert worst <= 1e-6 * np.linalg.norm(e0)


def test_rk4_order(double_integrator):
    F = closed_loop_matrix(double_integrator, np.array(K_DI), np.array(L_DI))
    exact = expm(2.0 * F) @ np.array([1.0, 0, 0, 0])
    errs = []
    for dt in (0.04, 0.02):
        tr = simulate(double_integrator, K_DI, L_DI, [1, 0], [0, 0], dt=dt, duration=2.0)
        errs.append(np.max(np.abs(np.concatenate([tr.x[-1], tr.z[-1]]) - exact)))
    ratio = errs[0] / errs[1]
    # fourth order: halving dt shrinks the error by about 16
    assert 16 / 4 <= ratio <= 16 * 4
