"""Independent checks of a synthesized controller/observer pair."""
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, NoConvergence
from .matrix import (
    Stability,
    char_poly,
    poly_from_roots,
    poly_roots,
    relative_deviation,
    routh_hurwitz_stable,
)

#: Residual at or below which a design counts as verified.
RESIDUAL_THRESHOLD = 1e-6


@dataclass(eq=False)
class VerificationReport:
    controller_char_achieved: object
    controller_char_desired: object
    observer_char_achieved: object
    observer_char_desired: object
    controller_hurwitz: Stability
    observer_hurwitz: Stability
    controller_residual: float
    observer_residual: float
    controller_poles: list
    observer_poles: list
    warnings: list = field(default_factory=list)

    @property
    def max_coefficient_residual(self):
        return max(self.controller_residual, self.observer_residual)

    @property
    def passed(self):
        return self.max_coefficient_residual <= RESIDUAL_THRESHOLD

    def to_dict(self):
        def pts(zs):
            return [[z.real, z.imag] for z in zs]

        return {
            "max_coefficient_residual": self.max_coefficient_residual,
            "passed": self.passed,
            "controller": {
                "achieved": self.controller_char_achieved.coeffs.tolist(),
                "desired": self.controller_char_desired.coeffs.tolist(),
                "residual": self.controller_residual,
                "hurwitz": str(self.controller_hurwitz),
                "poles": pts(self.controller_poles),
            },
            "observer": {
                "achieved": self.observer_char_achieved.coeffs.tolist(),
                "desired": self.observer_char_desired.coeffs.tolist(),
                "residual": self.observer_residual,
                "hurwitz": str(self.observer_hurwitz),
                "poles": pts(self.observer_poles),
            },
            "warnings": list(self.warnings),
        }


def _check_gains(m, K, L):
    K = np.asarray(K, dtype=np.float64)
    L = np.asarray(L, dtype=np.float64)
    if K.shape != (m.p, m.n):
        raise DimensionMismatch(f"K must be {m.p}x{m.n}, got {K.shape}")
    if L.shape != (m.n, m.q):
        raise DimensionMismatch(f"L must be {m.n}x{m.q}, got {L.shape}")
    return K, L


def _roots_or_warn(poly, label, warnings):
    try:
        return poly_roots(poly)
    except NoConvergence as exc:
        warnings.append(f"{label} roots: {exc}")
        return exc.best or []


def verify_design(m, K, L, desired_ctrl, desired_obs):
    """Compare the achieved closed-loop polynomials with the desired ones.

    A failed placement shows up in the report (residual, verdicts), never
    as an exception.
    """
    K, L = _check_gains(m, K, L)
    warnings = []
    ctrl = char_poly(m.A - m.B @ K)
    obs = char_poly(m.A - L @ m.C)
    ctrl_want = poly_from_roots(desired_ctrl)
    obs_want = poly_from_roots(desired_obs)
    for label, want in (("controller", ctrl_want), ("observer", obs_want)):
        if want.degree != m.n:
            raise DimensionMismatch(f"{label}: {want.degree} desired poles for n={m.n}")
    report = VerificationReport(
        controller_char_achieved=ctrl,
        controller_char_desired=ctrl_want,
        observer_char_achieved=obs,
        observer_char_desired=obs_want,
        controller_hurwitz=routh_hurwitz_stable(ctrl),
        observer_hurwitz=routh_hurwitz_stable(obs),
        controller_residual=relative_deviation(ctrl, ctrl_want),
        observer_residual=relative_deviation(obs, obs_want),
        controller_poles=_roots_or_warn(ctrl, "controller", warnings),
        observer_poles=_roots_or_warn(obs, "observer", warnings),
        warnings=warnings,
    )
    if not report.passed:
        warnings.append(
            f"coefficient residual {report.max_coefficient_residual:.3g} "
            f"exceeds {RESIDUAL_THRESHOLD:g}"
        )
    return report


def separation_matrix(m, K, L):
    """The ``2n x 2n`` matrix ``[[A - BK, BK], [0, A - LC]]`` acting on ``(x, e)``."""
    K, L = _check_gains(m, K, L)
    n = m.n
    out = np.zeros((2 * n, 2 * n))
    BK = m.B @ K
    out[:n, :n] = m.A - BK
    out[:n, n:] = BK
    out[n:, n:] = m.A - L @ m.C
    return out
