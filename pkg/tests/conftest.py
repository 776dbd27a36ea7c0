import numpy as np
import pytest

import polplace._kernels as kernels
from polplace import StateSpaceModel
import polplace._pykernels as pykernels

KERNEL_NAMES = ["lu_factor", "lu_solve", "hessenberg", "hessenberg_charpoly",
                "faddeev_leverrier", "durand_kerner", "rk4_linear"]

# criterion number -> (passed, detail); filled by tests/test_acceptance.py
ACCEPTANCE_RESULTS = {}


@pytest.fixture(params=["default", "python"])
def backend(request, monkeypatch):
    """Run a test with the selected kernels and again with the pure-Python ones."""
    if request.param == "python":
        for name in KERNEL_NAMES:
            monkeypatch.setattr(kernels, name, getattr(pykernels, name))
    return request.param


@pytest.fixture
def double_integrator():
    return StateSpaceModel([[0, 1], [0, 0]], [[0], [1]], [[1, 0]])


@pytest.fixture
def fixture3():
    """3-state, 2-input system with hand-computable chains."""
    return StateSpaceModel(
        [[0, 1, 0], [0, 0, 0], [0, 0, -1]],
        [[0, 0], [1, 0], [0, 1]],
        [[1, 0, 0], [0, 0, 1]],
    )


def random_stable_poles(rng, n, max_pairs=None):
    """Conjugate-closed stable pole set of size ``n``."""
    if max_pairs is None:
        max_pairs = n // 2
    pairs = int(rng.integers(0, max_pairs + 1))
    poles = []
    for _ in range(pairs):
        re, im = -rng.uniform(0.5, 4.0), rng.uniform(0.2, 3.0)
        poles += [complex(re, im), complex(re, -im)]
    poles += [complex(-rng.uniform(0.5, 4.0)) for _ in range(n - 2 * pairs)]
    return poles


def random_integer_model(rng, n, p, q, lo=-3, hi=3):
    return StateSpaceModel(
        rng.integers(lo, hi + 1, (n, n)),
        rng.integers(lo, hi + 1, (n, p)),
        rng.integers(lo, hi + 1, (q, n)),
    )


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        passed, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if passed else 'FAIL'}  {detail}")


def fraction_det(rows):
    """Exact determinant of a rational matrix (Gaussian elimination)."""
    from fractions import Fraction

    m = [[Fraction(v) for v in r] for r in rows]
    n = len(m)
    det = Fraction(1)
    for k in range(n):
        piv = next((i for i in range(k, n) if m[i][k] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != k:
            m[k], m[piv] = m[piv], m[k]
            det = -det
        det *= m[k][k]
        for i in range(k + 1, n):
            f = m[i][k] / m[k][k]
            for j in range(k, n):
                m[i][j] -= f * m[k][j]
    return det


def as_int_array(x):
    return np.asarray(x, dtype=np.int64)
