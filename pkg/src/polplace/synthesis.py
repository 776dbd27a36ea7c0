"""State-feedback and observer gain synthesis on the canonical forms.

Each diagonal block of the transformed state matrix is a companion block
with its own characteristic coefficients ``a_1..a_m``.  Writing the
block's desired polynomial as ``s^m + alpha_m s^(m-1) + ... + alpha_1``,
the block gain coefficients ``g_1..g_m`` satisfy

    alpha_i = sum_{j=i}^{m+1} g_j * a_{m+1+i-j},   a_{m+1} = g_{m+1} = 1,

which is triangular with a unit diagonal and is solved by back-substitution.
The same relation serves the controller (``g`` = row of K-hat) and the
observer (``g`` = column of L-tilde, stored bottom-up).
"""
from dataclasses import dataclass, field

import numpy as np

from .decomposition import (
    CONTROLLER,
    OBSERVER,
    assemble_transform,
    build_chains,
    validate_special_forms,
)
from .errors import DimensionMismatch, FormViolation, UnsatisfiablePartition
from .matrix import (
    Polynomial,
    char_poly,
    pair_conjugates,
    poly_from_roots,
    relative_deviation,
    solve_linear,
)

#: Structural read and char_poly of a diagonal block must agree this closely.
BLOCK_COEFF_TOL = 1e-8


@dataclass
class PolePartition:
    """Desired poles per diagonal block, in matrix layout order."""

    blocks: list

    @property
    def sizes(self):
        return [len(b) for b in self.blocks]


@dataclass(eq=False)
class GainSynthesisResult:
    kind: str
    #: K-hat (p x n) or L-tilde (n x q)
    structured_gain: np.ndarray
    #: K = K-hat P^-1 or L = Q^-1 L-tilde
    gain: np.ndarray
    per_block_desired: list
    per_block_coefficients: list
    transform: object
    partition: PolePartition
    #: relative coefficient deviation of the achieved closed loop
    residual: float
    warnings: list = field(default_factory=list)


def _pole_key(z):
    return (z.real, abs(z.imag), -z.imag)


def partition_poles(poles, block_sizes):
    """Deterministically assign poles to blocks without splitting conjugate pairs.

    Poles are sorted by real part (then ``|im|``, upper member first) and
    poured into the blocks in order.  When the next item cannot go into the
    current block, either because a pair would straddle the block boundary
    or because taking a real pole would starve a later odd-sized block, the
    nearest following item that keeps the fill feasible is taken instead.

    Raises
    ------
    UnsatisfiablePartition
        When no assignment keeps every pair inside one block.
    """
    poles = [complex(z) for z in poles]
    block_sizes = [int(s) for s in block_sizes]
    if len(poles) != sum(block_sizes):
        raise DimensionMismatch(f"{len(poles)} poles for blocks of total size {sum(block_sizes)}")
    reals, pairs = pair_conjugates(poles)
    items = [(complex(r, 0.0),) for r in reals] + [(u, u.conjugate()) for u in pairs]
    items.sort(key=lambda it: _pole_key(it[0]))
    n_reals = len(reals)
    odd_sizes = [s % 2 for s in block_sizes]
    if n_reals < sum(odd_sizes):
        raise UnsatisfiablePartition(
            f"{len(odd_sizes) and sum(odd_sizes)} odd-sized blocks need a real pole each, "
            f"only {n_reals} real poles given (conjugate pairs cannot be split)"
        )
    blocks = []
    for b, size in enumerate(block_sizes):
        odd_later = sum(odd_sizes[b + 1:])
        cap = size
        block = []
        while cap > 0:
            for i, item in enumerate(items):
                if len(item) == 1:
                    ok = n_reals - 1 >= (cap - 1) % 2 + odd_later
                else:
                    ok = cap >= 2 and n_reals >= cap % 2 + odd_later
                if ok:
                    break
            else:  # pragma: no cover - excluded by the feasibility check above
                raise UnsatisfiablePartition(f"cannot fill block {b} of size {size}")
            items.pop(i)
            block.extend(item)
            cap -= len(item)
            if len(item) == 1:
                n_reals -= 1
        blocks.append(block)
    return PolePartition(blocks)


def partition_from_assignment(assignment, block_sizes, poles=None):
    """Validate an explicit per-block pole assignment."""
    blocks = [[complex(z) for z in blk] for blk in assignment]
    sizes = [len(b) for b in blocks]
    if sizes != list(block_sizes):
        raise DimensionMismatch(f"assignment block sizes {sizes} != transform blocks {list(block_sizes)}")
    for blk in blocks:
        pair_conjugates(blk)
    if poles is not None:
        flat = sorted((complex(z) for z in poles), key=_pole_key)
        given = sorted((z for blk in blocks for z in blk), key=_pole_key)
        if not np.allclose(flat, given, rtol=0, atol=1e-12):
            raise ValueError("assignment poles differ from the requested pole set")
    return PolePartition(blocks)


def extract_block_coefficients(t, block_index):
    """Characteristic coefficients of one diagonal block, read structurally.

    Controller blocks carry ``-a_m..-a_1`` down their first column, observer
    blocks ``-a_1..-a_m`` along their last row.  The read is cross-checked
    against ``char_poly`` of the block.

    Raises
    ------
    FormViolation
        If the two disagree by more than 1e-8 relative.
    """
    block = t.diagonal_block(block_index)
    if t.kind == CONTROLLER:
        lower = -block[::-1, 0]
    else:
        lower = -block[-1, :]
    structural = Polynomial.monic_from_lower(lower)
    direct = char_poly(block)
    dev = relative_deviation(structural, direct)
    if dev > BLOCK_COEFF_TOL:
        raise FormViolation(
            f"block {block_index}: companion read differs from char_poly by {dev:.3g}",
            residual=dev, tolerance=BLOCK_COEFF_TOL,
        )
    return structural


def _lower(coeffs):
    if isinstance(coeffs, Polynomial):
        return coeffs.normalized().coeffs[:-1]
    return np.asarray(coeffs, dtype=np.float64)


def solve_gain_coefficients(a, desired):
    """Solve the triangular coefficient-matching relation for ``g_1..g_m``.

    ``a`` and ``desired`` are the non-leading coefficients ``a_1..a_m`` and
    ``alpha_1..alpha_m`` (or monic :class:`Polynomial` objects).
    """
    a = _lower(a)
    alpha = _lower(desired)
    m = a.size
    if alpha.size != m or m < 1:
        raise DimensionMismatch(f"need matching degrees >= 1, got {m} and {alpha.size}")
    # 1-based views: a1[k] = a_k, g1[k] = g_k, with a_{m+1} = g_{m+1} = 1
    a1 = np.concatenate([[0.0], a, [1.0]])
    g1 = np.zeros(m + 2)
    g1[m + 1] = 1.0
    for i in range(m, 0, -1):
        acc = alpha[i - 1]
        for j in range(i + 1, m + 2):
            acc -= g1[j] * a1[m + 1 + i - j]
        g1[i] = acc
    return g1[1:m + 1]


def assemble_structured_gain(kind, per_block_coeffs, block_sources, block_boundaries, source_count):
    """Place per-block coefficients into K-hat (p x n) or L-tilde (n x q).

    Controller row ``j`` holds ``k_1..k_{n_j}`` left to right across its
    block's columns.  Observer column ``j`` holds ``l_{m_j}`` on its block's
    top row down to ``l_1`` on the bottom row.  Unused sources stay zero.
    """
    n = block_boundaries[-1]
    if kind == CONTROLLER:
        gain = np.zeros((source_count, n))
    else:
        gain = np.zeros((n, source_count))
    if not (len(per_block_coeffs) == len(block_sources) == len(block_boundaries) - 1):
        raise DimensionMismatch("block lists disagree in length")
    for b, (g, source) in enumerate(zip(per_block_coeffs, block_sources)):
        s, e = block_boundaries[b], block_boundaries[b + 1]
        g = np.asarray(g, dtype=np.float64)
        if g.size != e - s:
            raise DimensionMismatch(f"block {b} has size {e - s} but {g.size} coefficients")
        if kind == CONTROLLER:
            gain[source, s:e] = g
        else:
            gain[s:e, source] = g[::-1]
    return gain


def default_observer_poles(controller_poles, factor=3.0):
    """Controller poles pushed left: real parts scaled by ``factor``."""
    return [complex(factor * complex(z).real, complex(z).imag) for z in controller_poles]


def _design(m, kind, poles, source_order, assignment, tol):
    poles = [complex(z) for z in poles]
    if len(poles) != m.n:
        raise DimensionMismatch(f"{len(poles)} poles requested for an order-{m.n} system")
    target = poly_from_roots(poles)
    chains = build_chains(m, kind, source_order, tol)
    t = assemble_transform(m, chains)
    validate_special_forms(t)
    if assignment is not None:
        partition = partition_from_assignment(assignment, t.block_sizes, poles)
    else:
        partition = partition_poles(poles, t.block_sizes)
    desired, coeffs = [], []
    for b, block_poles in enumerate(partition.blocks):
        a = extract_block_coefficients(t, b)
        d = poly_from_roots(block_poles)
        desired.append(d)
        coeffs.append(solve_gain_coefficients(a, d))
    structured = assemble_structured_gain(
        kind, coeffs, t.block_sources, t.block_boundaries, m.sources(kind))
    if kind == CONTROLLER:
        gain = solve_linear(t.T.T, structured.T).T
        achieved = char_poly(m.A - m.B @ gain)
    else:
        gain = solve_linear(t.T, structured)
        achieved = char_poly(m.A - gain @ m.C)
    return GainSynthesisResult(
        kind=kind,
        structured_gain=structured,
        gain=gain,
        per_block_desired=desired,
        per_block_coefficients=coeffs,
        transform=t,
        partition=partition,
        residual=relative_deviation(achieved, target),
        warnings=list(t.warnings),
    )


def design_controller(m, poles, source_order=None, assignment=None, tol=None):
    """State-feedback gain ``K`` placing the spectrum of ``A - B K`` at ``poles``.

    Parameters
    ----------
    m : StateSpaceModel
    poles : sequence of complex
        Conjugate-closed, one per state.
    source_order : sequence of int, optional
        Order in which the inputs seed chains (default natural order).
    assignment : list of lists of complex, optional
        Explicit poles per block in layout order, overriding the automatic
        partition.
    tol : float, optional
        Rank tolerance for the chain search.

    Returns
    -------
    GainSynthesisResult
    """
    return _design(m, CONTROLLER, poles, source_order, assignment, tol)


def design_observer(m, poles, source_order=None, assignment=None, tol=None):
    """Observer gain ``L`` placing the spectrum of ``A - L C`` at ``poles``."""
    return _design(m, OBSERVER, poles, source_order, assignment, tol)


def place_siso(A, b, poles):
    """Single-input controller gain from ``P = [A^{n-1} b, ..., A b, b]``."""
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64).reshape(-1)
    n = A.shape[0]
    cols = [b]
    for _ in range(n - 1):
        cols.append(A @ cols[-1])
    P = np.column_stack(cols[::-1])
    A_hat = solve_linear(P, A @ P)
    k_hat = solve_gain_coefficients(-A_hat[::-1, 0], poly_from_roots(poles))
    return solve_linear(P.T, k_hat.reshape(1, -1).T).T


def observe_siso(A, c, poles):
    """Single-output observer gain from ``Q = [c; c A; ...; c A^{n-1}]``."""
    A = np.asarray(A, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64).reshape(-1)
    n = A.shape[0]
    rows = [c]
    for _ in range(n - 1):
        rows.append(rows[-1] @ A)
    Q = np.vstack(rows)
    A_tilde = solve_linear(Q.T, (Q @ A).T).T
    l = solve_gain_coefficients(-A_tilde[-1, :], poly_from_roots(poles))
    return solve_linear(Q, l[::-1].reshape(-1, 1))
