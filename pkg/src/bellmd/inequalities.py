"""CHSH and KCBS inequality evaluation with brute-force classical bounds.

The CHSH statistic is symmetrized over the eight sign/relabeling
placements of the minus term, so it does not depend on which correlator
combination convention a table was produced under.  The KCBS statistic is
the five-cycle correlator sum on a qutrit; its noncontextual bound (-3)
comes from exhaustive enumeration of +/-1 assignments.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .hilbert import OperatorMatrix, StateVector, expectation, tensor_op
from .lhv import CorrelationTable, SettingSpace
from .tolerances import DEFAULT_TOLERANCES

KCBS_QUANTUM_OPTIMAL = 5.0 - 4.0 * math.sqrt(5.0)


@dataclass(frozen=True, eq=False)
class ChshScenario:
    """Two +/-1 observables per party and a shared two-qubit state."""

    alice_observables: tuple[OperatorMatrix, OperatorMatrix]
    bob_observables: tuple[OperatorMatrix, OperatorMatrix]
    state: StateVector

    def __post_init__(self) -> None:
        alice = tuple(self.alice_observables)
        bob = tuple(self.bob_observables)
        if len(alice) != 2 or len(bob) != 2:
            raise InputError("each party needs exactly two observables")
        for label, ops in (("alice", alice), ("bob", bob)):
            for k, op in enumerate(ops):
                if op.dim != 2:
                    raise InputError(f"{label} observable {k} must act on a qubit")
                if not op.is_hermitian():
                    raise InputError(f"{label} observable {k} must be hermitian")
                square = op.entries @ op.entries
                if float(np.max(np.abs(square - np.eye(2)))) > DEFAULT_TOLERANCES.operator:
                    raise InputError(f"{label} observable {k} must square to the identity")
        if self.state.dim != 4:
            raise InputError("shared state must live in the 4-dimensional two-qubit space")
        object.__setattr__(self, "alice_observables", alice)
        object.__setattr__(self, "bob_observables", bob)


def chsh_value(t: CorrelationTable) -> float:
    """Symmetrized CHSH statistic: max_i |E_sum - 2 E_i| over the four correlators."""
    if t.shape != (2, 2):
        raise InputError(f"CHSH needs a 2x2 correlation table, got {t.shape}")
    e = t.correlators
    total = float(e.sum())
    return float(np.max(np.abs(total - 2.0 * e)))


def outcome_projectors(op: OperatorMatrix) -> tuple[OperatorMatrix, OperatorMatrix]:
    """Eigenprojectors (1 +/- A)/2 of a +/-1-valued observable."""
    eye = np.eye(op.dim)
    plus = OperatorMatrix((eye + op.entries) / 2.0, hermitian=True)
    minus = OperatorMatrix((eye - op.entries) / 2.0, hermitian=True)
    return plus, minus


def chsh_quantum(s: ChshScenario) -> CorrelationTable:
    """Quantum correlation table E(a_i, b_j) = <state| A_i (x) B_j |state>."""
    corr = np.zeros((2, 2))
    joint = np.zeros((2, 2, 2, 2))
    for i, a_op in enumerate(s.alice_observables):
        a_projs = outcome_projectors(a_op)
        for j, b_op in enumerate(s.bob_observables):
            b_projs = outcome_projectors(b_op)
            corr[i, j] = expectation(tensor_op(a_op, b_op), s.state)
            for x, pa in enumerate(a_projs):
                for y, pb in enumerate(b_projs):
                    joint[i, j, x, y] = max(expectation(tensor_op(pa, pb), s.state), 0.0)
            joint[i, j] /= joint[i, j].sum()
    return CorrelationTable(corr, joint)


def lhv_chsh_max(setting_space: SettingSpace | None = None) -> float:
    """Brute-force CHSH maximum over all 16 deterministic setting-independent strategies.

    The bound does not depend on the setting marginal; the argument is
    accepted only to assert the 2x2 shape.
    """
    if setting_space is not None and (
        setting_space.alice_settings != 2 or setting_space.bob_settings != 2
    ):
        raise InputError("deterministic CHSH enumeration needs 2x2 settings")
    best = 0.0
    for fa in itertools.product((1.0, -1.0), repeat=2):
        for fb in itertools.product((1.0, -1.0), repeat=2):
            table = CorrelationTable.from_correlators(np.outer(fa, fb))
            best = max(best, chsh_value(table))
    return best


def bell_optimal_scenario() -> ChshScenario:
    """Canonical maximal-violation configuration: S = 2 sqrt(2) on (|00>+|11>)/sqrt(2)."""
    from .hilbert import pauli_x, pauli_z, rotated_zx

    state = StateVector(np.array([1, 0, 0, 1], dtype=np.complex128) / math.sqrt(2.0))
    return ChshScenario(
        alice_observables=(pauli_z(), pauli_x()),
        bob_observables=(rotated_zx(math.pi / 4.0), rotated_zx(-math.pi / 4.0)),
        state=state,
    )


@dataclass(frozen=True, eq=False)
class KcbsScenario:
    """Five unit vectors in real 3-space, cyclically orthogonal, plus a qutrit state."""

    vectors: np.ndarray
    state: StateVector

    def __post_init__(self) -> None:
        vecs = np.array(self.vectors, dtype=float)
        if vecs.shape != (5, 3):
            raise InputError(f"need five 3-vectors, got shape {vecs.shape}")
        if not np.all(np.isfinite(vecs)):
            raise InputError("vectors must be finite")
        tol = DEFAULT_TOLERANCES.operator
        lengths = np.linalg.norm(vecs, axis=1)
        if np.any(np.abs(lengths - 1.0) > tol):
            raise InputError("all five vectors must be unit length")
        for i in range(5):
            dot = float(vecs[i] @ vecs[(i + 1) % 5])
            if abs(dot) > tol:
                raise InputError(f"vectors {i} and {(i + 1) % 5} must be orthogonal")
        if self.state.dim != 3:
            raise InputError("state must be a qutrit")
        vecs.setflags(write=False)
        object.__setattr__(self, "vectors", vecs)

    def observable(self, i: int) -> OperatorMatrix:
        """A_i = 2 |v_i><v_i| - 1, a +/-1-valued observable."""
        v = self.vectors[i % 5]
        return OperatorMatrix(2.0 * np.outer(v, v) - np.eye(3), hermitian=True)


def kcbs_pentagram(state: StateVector | None = None) -> KcbsScenario:
    """Closed-form five-cycle configuration with the apex state along z.

    The five directions share the polar angle whose cosine squared is
    cos(pi/5) / (1 + cos(pi/5)); successive azimuths differ by 4 pi / 5,
    which makes neighbors exactly orthogonal.  With the apex state (0,0,1)
    the correlator sum reaches the quantum optimum 5 - 4 sqrt(5).
    """
    cos_sq = math.cos(math.pi / 5.0) / (1.0 + math.cos(math.pi / 5.0))
    cos_t = math.sqrt(cos_sq)
    sin_t = math.sqrt(1.0 - cos_sq)
    vecs = np.array(
        [
            [sin_t * math.cos(4.0 * math.pi * k / 5.0),
             sin_t * math.sin(4.0 * math.pi * k / 5.0),
             cos_t]
            for k in range(5)
        ]
    )
    # kill float residue in the orthogonality so construction meets the 1e-10 gate
    for i in range(5):
        vecs[i] /= np.linalg.norm(vecs[i])
    if state is None:
        state = StateVector(np.array([0, 0, 1], dtype=np.complex128))
    return KcbsScenario(vecs, state)


def kcbs_value(s: KcbsScenario) -> float:
    """Five-cycle correlator sum: sum_i <state| A_i A_{i+1} |state>."""
    total = 0.0
    for i in range(5):
        product = s.observable(i).entries @ s.observable(i + 1).entries
        # neighbor projectors are orthogonal, so the product is hermitian
        total += expectation(OperatorMatrix(product, hermitian=True), s.state)
    return total


def kcbs_classical_min() -> float:
    """Minimum of sum_i x_i x_{i+1} over all 2^5 fixed +/-1 assignments (equals -3)."""
    best = math.inf
    for signs in itertools.product((1, -1), repeat=5):
        value = sum(signs[i] * signs[(i + 1) % 5] for i in range(5))
        best = min(best, value)
    return float(best)
