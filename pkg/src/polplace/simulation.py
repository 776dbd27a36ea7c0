"""Fixed-step simulation of the observer-based closed loop.

Plant ``x' = A x + B u``, observer ``z' = A z + B u + L (y - C z)``,
feedback ``u = -K z``, ``y = C x``, reference held at zero.
"""
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DimensionMismatch, Divergence

#: State magnitude treated as divergence.
DIVERGENCE_LIMIT = 1e12


@dataclass(eq=False)
class SimulationTrace:
    t: np.ndarray
    x: np.ndarray
    z: np.ndarray
    u: np.ndarray
    y: np.ndarray
    e: np.ndarray

    def columns(self):
        n, p, q = self.x.shape[1], self.u.shape[1], self.y.shape[1]
        return (["t"] + [f"x{i + 1}" for i in range(n)] + [f"z{i + 1}" for i in range(n)]
                + [f"u{i + 1}" for i in range(p)] + [f"y{i + 1}" for i in range(q)]
                + [f"e{i + 1}" for i in range(n)])

    def table(self):
        return np.column_stack([self.t, self.x, self.z, self.u, self.y, self.e])


def closed_loop_matrix(m, K, L):
    """Generator of the stacked state ``(x, z)``."""
    BK = m.B @ K
    LC = L @ m.C
    return np.block([[m.A, -BK], [LC, m.A - BK - LC]])


def default_dt(poles):
    """``min(1e-3, 0.01 / max |re(pole)|)``."""
    fastest = max((abs(complex(z).real) for z in poles), default=0.0)
    return 1e-3 if fastest == 0.0 else min(1e-3, 0.01 / fastest)


def simulate(m, K, L, x0, z0, dt=1e-3, duration=10.0):
    """Integrate the closed loop with classical RK4 at a fixed step.

    The time grid is ``k * dt`` for ``k = 0..round(duration / dt)``.

    Raises
    ------
    Divergence
        When any state component exceeds 1e12 in magnitude (or goes NaN).
    """
    K = np.asarray(K, dtype=np.float64)
    L = np.asarray(L, dtype=np.float64)
    x0 = np.asarray(x0, dtype=np.float64).reshape(-1)
    z0 = np.asarray(z0, dtype=np.float64).reshape(-1)
    n = m.n
    if K.shape != (m.p, n) or L.shape != (n, m.q):
        raise DimensionMismatch(f"gain shapes K{K.shape}, L{L.shape} do not fit the model")
    if x0.size != n or z0.size != n:
        raise DimensionMismatch(f"initial states must have {n} entries")
    if not dt > 0:
        raise ValueError("dt must be positive")
    if not duration >= dt:
        raise ValueError("duration must be at least dt")
    nsteps = int(round(duration / dt))
    f = closed_loop_matrix(m, K, L)
    w, bad = _kernels.rk4_linear(f, np.concatenate([x0, z0]), float(dt), nsteps, DIVERGENCE_LIMIT)
    if bad >= 0:
        raise Divergence(f"state magnitude exceeded {DIVERGENCE_LIMIT:g} at step {bad} "
                         f"(t = {bad * dt:g})", step=bad)
    x = w[:, :n]
    z = w[:, n:]
    return SimulationTrace(
        t=np.arange(nsteps + 1) * dt,
        x=x,
        z=z,
        u=-(z @ K.T),
        y=x @ m.C.T,
        e=x - z,
    )


def error_envelope_check(trace, observer_poles, threshold=1e-3):
    """Decay of ``||e||`` over ``10 / min |re(observer pole)|`` seconds.

    Returns ``(passed, ratio)``.  A zero initial error gives ratio 0.
    """
    e0 = float(np.linalg.norm(trace.e[0]))
    if e0 == 0.0:
        return True, 0.0
    slowest = min(abs(complex(z).real) for z in observer_poles)
    if slowest == 0.0:
        return False, float("inf")
    horizon = 10.0 / slowest
    if horizon > trace.t[-1] + 1e-12:
        raise ValueError(f"trace ends at t={trace.t[-1]:g}, check needs t={horizon:g}")
    k = int(np.argmin(np.abs(trace.t - horizon)))
    ratio = float(np.linalg.norm(trace.e[k])) / e0
    return ratio <= threshold, ratio
