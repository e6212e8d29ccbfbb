"""Dense complex linear algebra for small Hilbert spaces.

State vectors, hermitian observables, and projective measurements with
Born-rule statistics.  Everything is validated eagerly and immutable
afterwards, so values can be shared freely across threads.  All spaces in
this package are tiny (dimension at most 8 for two-qubit-plus-ancilla work,
3 for qutrit work), so a dense numpy representation is used throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import InputError, InvariantError
from .tolerances import DEFAULT_TOLERANCES

MAX_TENSOR_DIM = 64


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def _as_complex_vector(values) -> np.ndarray:
    arr = np.array(values, dtype=np.complex128).reshape(-1)
    if arr.size == 0:
        raise InputError("state vector needs at least one amplitude")
    if not np.all(np.isfinite(arr)):
        raise InputError("state vector amplitudes must be finite")
    return _freeze(arr)


@dataclass(frozen=True, eq=False)
class StateVector:
    """Complex amplitude vector, unit length unless an explicit norm is recorded.

    The default constructor enforces sum(|amplitude|^2) == 1 within the
    normalization tolerance.  Non-unitary maps produce vectors with an
    explicit ``norm`` field instead (see :func:`apply`).
    """

    amplitudes: np.ndarray
    norm: float = 1.0

    def __post_init__(self) -> None:
        arr = _as_complex_vector(self.amplitudes)
        object.__setattr__(self, "amplitudes", arr)
        object.__setattr__(self, "norm", float(self.norm))
        if self.norm < 0.0 or not math.isfinite(self.norm):
            raise InputError("norm must be a finite nonnegative real")
        actual = float(np.sum(np.abs(arr) ** 2))
        if abs(actual - self.norm**2) > DEFAULT_TOLERANCES.normalization:
            raise InputError(
                f"amplitudes have squared norm {actual:.12g}, "
                f"expected {self.norm ** 2:.12g}"
            )

    @property
    def dim(self) -> int:
        return int(self.amplitudes.size)

    def overlap(self, other: StateVector) -> complex:
        """Inner product <self|other>."""
        if other.dim != self.dim:
            raise InputError(f"dimension mismatch: {self.dim} vs {other.dim}")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity(self, other: StateVector) -> float:
        """|<self|other>|^2 -- insensitive to global phase."""
        return float(abs(self.overlap(other)) ** 2)


def basis_state(dim: int, index: int) -> StateVector:
    if not 0 <= index < dim:
        raise InputError(f"basis index {index} out of range for dimension {dim}")
    amps = np.zeros(dim, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(amps)


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Square complex matrix; ``hermitian`` asserts entries == entries^dagger."""

    entries: np.ndarray
    hermitian: bool = False

    def __post_init__(self) -> None:
        arr = np.array(self.entries, dtype=np.complex128)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise InputError(f"operator must be a nonempty square matrix, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InputError("operator entries must be finite")
        object.__setattr__(self, "entries", _freeze(arr))
        if self.hermitian:
            residue = float(np.max(np.abs(arr - arr.conj().T)))
            if residue > DEFAULT_TOLERANCES.arithmetic:
                raise InputError(f"hermitian flag set but max |A - A^dagger| = {residue:.3g}")

    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])

    def is_hermitian(self, tol: float | None = None) -> bool:
        tol = DEFAULT_TOLERANCES.arithmetic if tol is None else tol
        return float(np.max(np.abs(self.entries - self.entries.conj().T))) <= tol

    def is_unitary(self, tol: float | None = None) -> bool:
        tol = DEFAULT_TOLERANCES.operator if tol is None else tol
        gram = self.entries @ self.entries.conj().T
        return float(np.max(np.abs(gram - np.eye(self.dim)))) <= tol


def identity(dim: int) -> OperatorMatrix:
    return OperatorMatrix(np.eye(dim, dtype=np.complex128), hermitian=True)


def pauli_x() -> OperatorMatrix:
    return OperatorMatrix(np.array([[0, 1], [1, 0]], dtype=np.complex128), hermitian=True)


def pauli_y() -> OperatorMatrix:
    return OperatorMatrix(np.array([[0, -1j], [1j, 0]], dtype=np.complex128), hermitian=True)


def pauli_z() -> OperatorMatrix:
    return OperatorMatrix(np.array([[1, 0], [0, -1]], dtype=np.complex128), hermitian=True)


def rotated_zx(angle: float) -> OperatorMatrix:
    """cos(angle) sigma_z + sin(angle) sigma_x: a +/-1-valued spin observable in the zx plane."""
    c, s = math.cos(angle), math.sin(angle)
    return OperatorMatrix(np.array([[c, s], [s, -c]], dtype=np.complex128), hermitian=True)


@dataclass(frozen=True, eq=False)
class ProjectiveMeasurement:
    """Complete set of orthogonal projectors (idempotent, pairwise orthogonal, summing to 1)."""

    projectors: tuple[OperatorMatrix, ...]

    def __post_init__(self) -> None:
        projs = tuple(self.projectors)
        if not projs:
            raise InputError("measurement needs at least one projector")
        object.__setattr__(self, "projectors", projs)
        dim = projs[0].dim
        tol = DEFAULT_TOLERANCES.operator
        total = np.zeros((dim, dim), dtype=np.complex128)
        for i, p in enumerate(projs):
            if p.dim != dim:
                raise InputError("projectors must share one dimension")
            m = p.entries
            if float(np.max(np.abs(m - m.conj().T))) > tol:
                raise InputError(f"projector {i} is not hermitian")
            if float(np.max(np.abs(m @ m - m))) > tol:
                raise InputError(f"projector {i} is not idempotent")
            total += m
        for i in range(len(projs)):
            for j in range(i + 1, len(projs)):
                cross = projs[i].entries @ projs[j].entries
                if float(np.max(np.abs(cross))) > tol:
                    raise InputError(f"projectors {i} and {j} are not orthogonal")
        if float(np.max(np.abs(total - np.eye(dim)))) > tol:
            raise InputError("projectors do not sum to the identity")

    @property
    def dim(self) -> int:
        return self.projectors[0].dim

    @property
    def outcome_count(self) -> int:
        return len(self.projectors)

    @classmethod
    def from_basis(cls, states: Iterable[StateVector]) -> ProjectiveMeasurement:
        """Rank-1 projectors |s><s| for an orthonormal basis."""
        projs = []
        for s in states:
            v = s.amplitudes
            projs.append(OperatorMatrix(np.outer(v, v.conj()), hermitian=True))
        return cls(tuple(projs))


def tensor(u: StateVector, v: StateVector, max_dim: int = MAX_TENSOR_DIM) -> StateVector:
    """Kronecker product u (x) v with the left factor as the high-order index."""
    out_dim = u.dim * v.dim
    if out_dim > max_dim:
        raise InputError(f"tensor product dimension {out_dim} exceeds the configured max {max_dim}")
    return StateVector(np.kron(u.amplitudes, v.amplitudes))


def tensor_op(a: OperatorMatrix, b: OperatorMatrix) -> OperatorMatrix:
    return OperatorMatrix(np.kron(a.entries, b.entries), hermitian=a.hermitian and b.hermitian)


def apply(op: OperatorMatrix, s: StateVector) -> StateVector:
    """Matrix-vector product.

    Unitary operators return a unit vector (renormalized to absorb float
    drift); anything else returns the raw image with its norm recorded in
    the ``norm`` field.
    """
    if op.dim != s.dim:
        raise InputError(f"operator dimension {op.dim} does not match state dimension {s.dim}")
    image = op.entries @ s.amplitudes
    length = float(np.linalg.norm(image))
    if op.is_unitary():
        return StateVector(image / length)
    return StateVector(image, norm=length)


def born_probabilities(m: ProjectiveMeasurement, s: StateVector) -> list[float]:
    """Outcome probabilities <s|P_i|s>; clamped against float residue, sum checked."""
    if m.dim != s.dim:
        raise InputError(f"measurement dimension {m.dim} does not match state dimension {s.dim}")
    if abs(s.norm - 1.0) > DEFAULT_TOLERANCES.normalization:
        raise InputError("Born probabilities need a normalized state")
    probs = []
    for p in m.projectors:
        value = float(np.vdot(s.amplitudes, p.entries @ s.amplitudes).real)
        if value < -DEFAULT_TOLERANCES.arithmetic:
            raise InvariantError(f"negative Born probability {value:.3g}")
        probs.append(min(max(value, 0.0), 1.0))
    total = sum(probs)
    if abs(total - 1.0) > DEFAULT_TOLERANCES.normalization:
        raise InvariantError(f"Born probabilities sum to {total:.12g}")
    return probs


def expectation(op: OperatorMatrix, s: StateVector) -> float:
    """<s|op|s> for a hermitian operator."""
    if op.dim != s.dim:
        raise InputError(f"operator dimension {op.dim} does not match state dimension {s.dim}")
    if not op.is_hermitian():
        raise InputError("expectation requires a hermitian operator")
    value = complex(np.vdot(s.amplitudes, op.entries @ s.amplitudes))
    if abs(value.imag) > DEFAULT_TOLERANCES.operator:
        raise InvariantError(f"expectation has imaginary residue {value.imag:.3g}")
    return float(value.real)
