"""Cyclic-subspace chains and the block-triangular canonical transforms.

Controller side: the input columns ``b_j`` are extended into Krylov chains
``b_j, A b_j, A^2 b_j, ...``.  Each chain stops as soon as its next vector is
dependent on everything collected so far, so ``A^{n_j} b_j`` always lies in
the span of the chain itself plus the chains collected before it.  Placing
the chains last-first from left to right, highest power leftmost inside a
chain, makes ``P^-1 A P`` block lower triangular with controller-companion
diagonal blocks and ``P^-1 B`` an anti-diagonal unit pattern.

Observer side: the output rows ``c_j`` are extended into ``c_j, c_j A, ...``
and stacked with ascending powers inside each chain and the first output
(in caller order) on top.  For ``Q A Q^-1`` to come out block *upper*
triangular, the bottom chain must be the one grown first, so the observer
greedy scans the outputs in reverse of the caller's order.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatch,
    FormViolation,
    NotControllable,
    NotObservable,
    SingularMatrix,
    SingularTransform,
)
from .matrix import (
    Basis,
    as_matrix,
    condition_estimate,
    default_rank_tol,
    inverse,
    solve_linear,
)

CONTROLLER = "controller"
OBSERVER = "observer"

#: Transform condition number above which a warning is attached.
ILL_CONDITIONED = 1e12


@dataclass(eq=False)
class StateSpaceModel:
    """``x' = A x + B u``, ``y = C x``."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        self.A = as_matrix(self.A, "A")
        self.B = as_matrix(self.B, "B")
        self.C = as_matrix(self.C, "C")
        n = self.A.shape[0]
        if n < 1 or self.A.shape[1] != n:
            raise DimensionMismatch(f"A must be square with n >= 1, got {self.A.shape}")
        if self.B.shape[0] != n or self.B.shape[1] < 1:
            raise DimensionMismatch(f"B must be {n}xp with p >= 1, got {self.B.shape}")
        if self.C.shape[1] != n or self.C.shape[0] < 1:
            raise DimensionMismatch(f"C must be qx{n} with q >= 1, got {self.C.shape}")

    @property
    def n(self):
        return self.A.shape[0]

    @property
    def p(self):
        return self.B.shape[1]

    @property
    def q(self):
        return self.C.shape[0]

    def sources(self, kind):
        return self.p if kind == CONTROLLER else self.q


@dataclass(frozen=True)
class ChainDecomposition:
    """Chains in discovery order as ``(source_index, length)`` pairs."""

    kind: str
    chains: tuple
    n: int

    @property
    def total(self):
        return sum(length for _, length in self.chains)

    @property
    def used_count(self):
        return len(self.chains)

    @property
    def lengths(self):
        return [length for _, length in self.chains]

    def layout(self):
        """Chains in matrix layout order (left-to-right for P, top-to-bottom for Q)."""
        return list(reversed(self.chains))


@dataclass(eq=False)
class CanonicalTransform:
    kind: str
    T: np.ndarray
    T_inverse: np.ndarray
    transformed_A: np.ndarray
    transformed_B: np.ndarray = None
    transformed_C: np.ndarray = None
    #: block start offsets plus a final ``n``, in matrix layout order
    block_boundaries: list = field(default_factory=list)
    #: source (input/output) index of each block, in matrix layout order
    block_sources: list = field(default_factory=list)
    condition: float = 1.0
    form_tolerance: float = 0.0
    form_residual: float = 0.0
    chains: ChainDecomposition = None
    warnings: list = field(default_factory=list)

    @property
    def block_sizes(self):
        b = self.block_boundaries
        return [b[i + 1] - b[i] for i in range(len(b) - 1)]

    def block_slice(self, index):
        return slice(self.block_boundaries[index], self.block_boundaries[index + 1])

    def diagonal_block(self, index):
        s = self.block_slice(index)
        return self.transformed_A[s, s]


def controllability_matrix(m):
    """``[B, AB, ..., A^{n-1} B]``."""
    blocks = [m.B]
    for _ in range(m.n - 1):
        blocks.append(m.A @ blocks[-1])
    return np.hstack(blocks)


def observability_matrix(m):
    """``[C; CA; ...; CA^{n-1}]``."""
    blocks = [m.C]
    for _ in range(m.n - 1):
        blocks.append(blocks[-1] @ m.A)
    return np.vstack(blocks)


def _check_order(order, count, what):
    if order is None:
        return list(range(count))
    order = [int(j) for j in order]
    if sorted(order) != list(range(count)):
        raise ValueError(f"{what} order {order} is not a permutation of 0..{count - 1}")
    return order


def build_chains(m, kind=CONTROLLER, source_order=None, tol=None):
    """Greedy maximal-first chain extraction.

    Each source in turn is extended while its next Krylov vector stays
    independent of every vector collected so far; a source whose first
    vector is already dependent is skipped.  Controller chains follow
    ``source_order``; observer chains scan it in reverse (see module notes).

    Raises
    ------
    NotControllable, NotObservable
        When the chains cannot reach dimension ``n``.
    """
    if kind not in (CONTROLLER, OBSERVER):
        raise ValueError(f"unknown chain kind {kind!r}")
    n = m.n
    if kind == CONTROLLER:
        order = _check_order(source_order, m.p, "input")
        vectors = m.B.T
        step = m.A
        krylov = controllability_matrix(m)
    else:
        order = _check_order(source_order, m.q, "output")[::-1]
        vectors = m.C
        step = m.A.T
        krylov = observability_matrix(m).T
    if tol is None:
        tol = default_rank_tol(krylov)
    basis = Basis(n, tol)
    chains = []
    for j in order:
        v = vectors[j]
        length = 0
        while length < n and basis.add(v):
            length += 1
            v = step @ v
        if length:
            chains.append((j, length))
    decomposition = ChainDecomposition(kind, tuple(chains), n)
    if decomposition.total < n:
        lengths = {j: length for j, length in chains}
        per_source = [lengths.get(j, 0) for j in range(m.sources(kind))]
        label = "controllability" if kind == CONTROLLER else "observability"
        msg = (f"{label} rank {decomposition.total} of {n} "
               f"(chain lengths per source {per_source})")
        exc = NotControllable if kind == CONTROLLER else NotObservable
        raise exc(msg, achieved=decomposition.total, lengths=per_source)
    return decomposition


def _chain_vectors(m, kind, source, length):
    if kind == CONTROLLER:
        v = m.B[:, source]
        out = [v]
        for _ in range(length - 1):
            v = m.A @ v
            out.append(v)
        return out[::-1]
    v = m.C[source]
    out = [v]
    for _ in range(length - 1):
        v = v @ m.A
        out.append(v)
    return out


def form_tolerance(m, condition):
    return 1e-8 * (1.0 + float(np.max(np.abs(m.A)))) * max(1.0, condition / 1e6)


def form_residual(t):
    """Largest deviation of ``t.transformed_A`` from its block template.

    Returns ``(residual, (row, col))``.
    """
    a = t.transformed_A
    bounds = t.block_boundaries
    worst, where = 0.0, None
    for bi in range(len(bounds) - 1):
        r0, r1 = bounds[bi], bounds[bi + 1]
        size = r1 - r0
        for r in range(r0, r1):
            for c in range(a.shape[1]):
                if r0 <= c < r1:
                    lr, lc = r - r0, c - r0
                    if t.kind == CONTROLLER and lc == 0:
                        continue
                    if t.kind == OBSERVER and lr == size - 1:
                        continue
                    expect = 1.0 if lc == lr + 1 else 0.0
                elif (t.kind == CONTROLLER and c >= r1) or (t.kind == OBSERVER and c < r0):
                    expect = 0.0
                else:
                    continue
                dev = abs(a[r, c] - expect)
                if dev > worst:
                    worst, where = dev, (r, c)
    return worst, where


def assemble_transform(m, chains, check=True):
    """Build P (controller) or Q (observer) and the transformed model.

    Raises
    ------
    SingularTransform
        If the assembled matrix is numerically singular.
    FormViolation
        If ``check`` and the transformed state matrix misses its
        block-triangular companion template by more than the form tolerance.
    """
    kind = chains.kind
    layout = chains.layout()
    vecs = []
    for source, length in layout:
        vecs.extend(_chain_vectors(m, kind, source, length))
    T = np.column_stack(vecs) if kind == CONTROLLER else np.vstack(vecs)
    try:
        T_inv = inverse(T)
        if kind == CONTROLLER:
            A_t = solve_linear(T, m.A @ T)
            B_t = solve_linear(T, m.B)
            C_t = None
        else:
            A_t = solve_linear(T.T, (T @ m.A).T).T
            C_t = solve_linear(T.T, m.C.T).T
            B_t = None
    except SingularMatrix as exc:
        raise SingularTransform(f"{kind} transform is singular: {exc}") from exc
    bounds = [0]
    for _, length in layout:
        bounds.append(bounds[-1] + length)
    cond = condition_estimate(T)
    t = CanonicalTransform(
        kind=kind,
        T=T,
        T_inverse=T_inv,
        transformed_A=A_t,
        transformed_B=B_t,
        transformed_C=C_t,
        block_boundaries=bounds,
        block_sources=[source for source, _ in layout],
        condition=cond,
        form_tolerance=form_tolerance(m, cond),
        chains=chains,
    )
    if cond > ILL_CONDITIONED:
        t.warnings.append(f"{kind} transform condition {cond:.3g} exceeds {ILL_CONDITIONED:.0e}")
    t.form_residual, where = form_residual(t)
    if check and t.form_residual > t.form_tolerance:
        raise FormViolation(
            f"{kind} form residual {t.form_residual:.3g} at entry {where} "
            f"exceeds tolerance {t.form_tolerance:.3g}",
            entry=where, residual=t.form_residual, tolerance=t.form_tolerance,
        )
    return t


@dataclass
class SpecialFormReport:
    deviation: float
    tolerance: float
    #: unused source index -> its transformed column (controller) or row (observer)
    unused: dict


def validate_special_forms(t, raise_on_violation=True):
    """Check the unit pattern of ``P^-1 B`` or ``C Q^-1`` on the used sources.

    Controller: input ``j`` of a block must map to the unit vector on the
    block's last row.  Observer: output ``j`` must map to the unit row on the
    block's first column.  Unused sources are reported, not constrained.
    """
    if t.kind == CONTROLLER:
        mat = t.transformed_B.T
        anchors = [t.block_boundaries[i + 1] - 1 for i in range(len(t.block_sources))]
    else:
        mat = t.transformed_C
        anchors = t.block_boundaries[:-1]
    deviation = 0.0
    for source, anchor in zip(t.block_sources, anchors):
        target = np.zeros(mat.shape[1])
        target[anchor] = 1.0
        deviation = max(deviation, float(np.max(np.abs(mat[source] - target))))
    used = set(t.block_sources)
    unused = {j: mat[j].copy() for j in range(mat.shape[0]) if j not in used}
    report = SpecialFormReport(deviation, t.form_tolerance, unused)
    if raise_on_violation and deviation > t.form_tolerance:
        which = "P^-1 B" if t.kind == CONTROLLER else "C Q^-1"
        raise FormViolation(
            f"{which} deviates from its unit pattern by {deviation:.3g} "
            f"(tolerance {t.form_tolerance:.3g})",
            residual=deviation, tolerance=t.form_tolerance,
        )
    return report
