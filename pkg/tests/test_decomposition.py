import numpy as np
import pytest

from polplace import (
    FormViolation,
    NotControllable,
    NotObservable,
    StateSpaceModel,
    assemble_transform,
    build_chains,
    char_poly,
    controllability_matrix,
    observability_matrix,
    rank_revealing,
    validate_special_forms,
)
from polplace.decomposition import form_residual
from polplace.errors import DimensionMismatch
from polplace.matrix import Polynomial, relative_deviation

from conftest import random_integer_model


def test_model_dimension_checks():
    with pytest.raises(DimensionMismatch):
        StateSpaceModel([[0, 1]], [[1]], [[1]])
    with pytest.raises(DimensionMismatch):
        StateSpaceModel(np.eye(2), [[1], [0], [0]], [[1, 0]])
    with pytest.raises(ValueError):
        StateSpaceModel([[np.nan]], [[1]], [[1]])


# --- controllability / observability --------------------------------------

def test_controllability_double_integrator(double_integrator):
    np.testing.assert_array_equal(controllability_matrix(double_integrator), [[0, 1], [1, 0]])


def test_controllability_uncontrollable():
    m = StateSpaceModel(np.eye(2), [[1], [0]], [[1, 0]])
    M = controllability_matrix(m)
    np.testing.assert_array_equal(M, [[1, 1], [0, 0]])
    assert rank_revealing(M)[0] == 1


def test_controllability_fixture(fixture3):
    AB = [[1, 0], [0, 0], [0, -1]]
    A2B = [[0, 0], [0, 0], [0, 1]]
    expected = np.hstack([fixture3.B, AB, A2B])
    np.testing.assert_array_equal(controllability_matrix(fixture3), expected)


def test_observability_double_integrator(double_integrator):
    np.testing.assert_array_equal(observability_matrix(double_integrator), [[1, 0], [0, 1]])


def test_observability_zero_output():
    m = StateSpaceModel([[0, 1], [0, 0]], [[0], [1]], [[0, 0]])
    assert rank_revealing(observability_matrix(m).T)[0] == 0


def test_observability_is_transposed_controllability(fixture3):
    dual = StateSpaceModel(fixture3.A.T, fixture3.C.T, fixture3.B.T)
    n, q = fixture3.n, fixture3.q
    M = controllability_matrix(dual)
    reblocked = np.vstack([M[:, k * q:(k + 1) * q].T for k in range(n)])
    np.testing.assert_array_equal(observability_matrix(fixture3), reblocked)


# --- build_chains ---------------------------------------------------------

def test_chains_siso(double_integrator):
    ch = build_chains(double_integrator)
    assert ch.chains == ((0, 2),)


def test_chains_fixture(fixture3):
    ch = build_chains(fixture3, "controller", [0, 1])
    assert ch.chains == ((0, 2), (1, 1))
    assert ch.total == 3 and ch.used_count == 2
    # incremental-rank oracle: b1, Ab1, b2 independent; A^2 b1 = 0 is not
    b1, b2 = fixture3.B[:, 0], fixture3.B[:, 1]
    A = fixture3.A
    assert rank_revealing(np.column_stack([b1, A @ b1]))[0] == 2
    assert rank_revealing(np.column_stack([b1, A @ b1, A @ A @ b1]))[0] == 2
    assert rank_revealing(np.column_stack([b1, A @ b1, b2]))[0] == 3


def test_chains_reordered(fixture3):
    ch = build_chains(fixture3, "controller", [1, 0])
    assert ch.total == 3
    assert ch.chains[0][0] == 1


def test_chains_not_controllable():
    m = StateSpaceModel(np.eye(2), [[1], [0]], [[1, 0]])
    with pytest.raises(NotControllable) as info:
        build_chains(m)
    assert info.value.achieved == 1
    assert info.value.lengths == [1]
    assert "rank 1 of 2" in str(info.value)


def test_chains_not_observable():
    m = StateSpaceModel(np.eye(2), [[1], [0]], [[1, 0]])
    with pytest.raises(NotObservable):
        build_chains(m, "observer")


def test_chains_skip_dependent_source():
    m = StateSpaceModel([[0, 1], [0, 0]], [[0, 0], [1, 2]], [[1, 0]])
    assert build_chains(m).chains == ((0, 2),)


def test_chains_bad_order(fixture3):
    with pytest.raises(ValueError):
        build_chains(fixture3, "controller", [0, 0])


@pytest.mark.parametrize("seed", range(60))
def test_chains_complete_iff_full_rank(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 9))
    m = random_integer_model(rng, n, int(rng.integers(1, 4)), 1)
    full = rank_revealing(controllability_matrix(m))[0] == n
    try:
        ch = build_chains(m)
        assert full and ch.total == n
    except NotControllable:
        assert not full


# --- assemble_transform ---------------------------------------------------

def test_transform_double_integrator_controller(double_integrator):
    t = assemble_transform(double_integrator, build_chains(double_integrator))
    np.testing.assert_array_equal(t.T, np.eye(2))
    np.testing.assert_array_equal(t.transformed_A, [[0, 1], [0, 0]])
    np.testing.assert_array_equal(t.transformed_B, [[0], [1]])
    assert t.block_boundaries == [0, 2]


def test_transform_fixture(fixture3):
    t = assemble_transform(fixture3, build_chains(fixture3))
    P = np.array([[0, 1, 0], [0, 0, 1], [1, 0, 0]])
    np.testing.assert_array_equal(t.T, P)
    # P is a permutation: P^-1 = P^T
    np.testing.assert_array_equal(t.transformed_A, P.T @ fixture3.A @ P)
    np.testing.assert_array_equal(t.transformed_A, [[-1, 0, 0], [0, 0, 1], [0, 0, 0]])
    np.testing.assert_array_equal(t.transformed_B, [[0, 1], [0, 0], [1, 0]])
    assert t.block_boundaries == [0, 1, 3]
    assert t.block_sources == [1, 0]
    assert t.form_residual == 0.0


def test_transform_double_integrator_observer(double_integrator):
    t = assemble_transform(double_integrator, build_chains(double_integrator, "observer"))
    np.testing.assert_array_equal(t.T, np.eye(2))
    np.testing.assert_array_equal(t.transformed_A, [[0, 1], [0, 0]])
    np.testing.assert_array_equal(t.transformed_C, [[1, 0]])


def test_observer_transform_is_block_upper_triangular():
    # c2 = [0,0,1] spans an invariant row space; c1 A^2 = c2 couples into it
    m = StateSpaceModel([[0, 1, 0], [0, 0, 0], [0, 0, -1]], [[0], [1], [1]],
                        [[1, 0, 1], [0, 0, 1]])
    t = assemble_transform(m, build_chains(m, "observer"))
    b = t.block_boundaries
    assert b == [0, 2, 3]
    np.testing.assert_allclose(t.T, [[1, 0, 1], [0, 1, -1], [0, 0, 1]])
    # the starred block above the diagonal is nonzero
    assert abs(t.transformed_A[1, 2]) > 0.5
    np.testing.assert_allclose(t.transformed_C, [[1, 0, 0], [0, 0, 1]], atol=1e-14)
    for i in range(len(b) - 1):
        assert np.all(np.abs(t.transformed_A[b[i + 1]:, b[i]:b[i + 1]]) <= t.form_tolerance)
    # first output sits on the top block
    assert t.block_sources[0] == 0


def test_t_inverse_consistency(fixture3):
    t = assemble_transform(fixture3, build_chains(fixture3, "observer"))
    np.testing.assert_allclose(t.T @ t.T_inverse, np.eye(3), atol=1e-12)


def test_form_violation_on_corrupted_transform(fixture3):
    t = assemble_transform(fixture3, build_chains(fixture3))
    t.transformed_A[0, 2] = 1e-3
    residual, where = form_residual(t)
    assert residual == pytest.approx(1e-3) and where == (0, 2)


# --- validate_special_forms -----------------------------------------------

def test_special_forms_double_integrator(double_integrator):
    for kind in ("controller", "observer"):
        t = assemble_transform(double_integrator, build_chains(double_integrator, kind))
        assert validate_special_forms(t).deviation == 0.0


def test_special_forms_fixture(fixture3):
    t = assemble_transform(fixture3, build_chains(fixture3))
    assert validate_special_forms(t).deviation == 0.0


def test_special_forms_injected_fault(double_integrator):
    t = assemble_transform(double_integrator, build_chains(double_integrator))
    t.transformed_B[0, 0] += 1e-3
    with pytest.raises(FormViolation):
        validate_special_forms(t)


def test_special_forms_unused_sources_reported():
    m = StateSpaceModel([[0, 1], [0, 0]], [[0, 1], [1, 0]], [[1, 0]])
    t = assemble_transform(m, build_chains(m))
    report = validate_special_forms(t)
    assert list(report.unused) == [1]
    assert report.deviation == 0.0


# --- invariants on random ensembles ---------------------------------------

def _random_transforms(seed, kind):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 9))
    m = random_integer_model(rng, n, int(rng.integers(1, 4)), int(rng.integers(1, 4)))
    count = m.p if kind == "controller" else m.q
    order = list(rng.permutation(count))
    try:
        ch = build_chains(m, kind, order)
    except (NotControllable, NotObservable):
        return None, None
    return m, assemble_transform(m, ch, check=False)


@pytest.mark.parametrize("kind", ["controller", "observer"])
@pytest.mark.parametrize("seed", range(40))
def test_block_triangular_companion_invariant(kind, seed):
    m, t = _random_transforms(seed, kind)
    if t is None or t.condition >= 1e8:
        pytest.skip("uncontrollable/unobservable or ill-conditioned draw")
    b = t.block_boundaries
    cf = max(1.0, t.condition / 1e6)
    for i in range(len(b) - 1):
        s = slice(b[i], b[i + 1])
        if kind == "controller":
            off = t.transformed_A[s, b[i + 1]:]
        else:
            off = t.transformed_A[b[i + 1]:, s]
        assert np.all(np.abs(off) <= 1e-8 * (1 + np.max(np.abs(m.A))) * cf)
        block = t.transformed_A[s, s]
        lower = -block[::-1, 0] if kind == "controller" else -block[-1, :]
        structural = Polynomial.monic_from_lower(lower)
        assert relative_deviation(structural, char_poly(block)) <= 1e-8
    assert t.form_residual <= t.form_tolerance
    assert validate_special_forms(t).deviation <= t.form_tolerance
