"""Single-qubit teleportation over a shared maximally entangled pair.

The sender holds an unknown qubit a|0> + b|1> and half of the pair
(|00> + |11>)/sqrt(2).  A four-outcome entangled-basis measurement on the
sender's two qubits collapses the receiver's qubit into one of four images
of the input, each with probability exactly 1/4; the outcome index selects
the Pauli correction that restores the input state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .hilbert import (
    ProjectiveMeasurement,
    StateVector,
    identity,
    pauli_x,
    pauli_z,
    tensor,
)
from .tolerances import DEFAULT_TOLERANCES

_SQRT2_INV = 1.0 / math.sqrt(2.0)

# Entangled-basis order: (|00>+|11>), (|00>-|11>), (|01>+|10>), (|01>-|10>), all /sqrt(2)
BELL_LABELS = ("phi_plus", "phi_minus", "psi_plus", "psi_minus")
_BELL_VECTORS = (
    np.array([1, 0, 0, 1], dtype=np.complex128) * _SQRT2_INV,
    np.array([1, 0, 0, -1], dtype=np.complex128) * _SQRT2_INV,
    np.array([0, 1, 1, 0], dtype=np.complex128) * _SQRT2_INV,
    np.array([0, 1, -1, 0], dtype=np.complex128) * _SQRT2_INV,
)

CORRECTION_LABELS = ("identity", "sigma_z", "sigma_x", "sigma_z.sigma_x")


def bell_state(index: int) -> StateVector:
    if not 0 <= index < 4:
        raise InputError(f"entangled-basis index {index} must be in 0..3")
    return StateVector(_BELL_VECTORS[index])


def bell_measurement() -> ProjectiveMeasurement:
    return ProjectiveMeasurement.from_basis(bell_state(k) for k in range(4))


def _correction_matrices() -> tuple[np.ndarray, ...]:
    i2 = identity(2).entries
    z = pauli_z().entries
    x = pauli_x().entries
    return (i2, z, x, z @ x)


@dataclass(frozen=True)
class TeleportInput:
    """Amplitudes of the qubit to send; |a|^2 + |b|^2 must equal 1."""

    a: complex
    b: complex

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "b", complex(self.b))
        total = abs(self.a) ** 2 + abs(self.b) ** 2
        if abs(total - 1.0) > DEFAULT_TOLERANCES.normalization:
            raise InputError(f"input amplitudes have squared norm {total:.12g}, expected 1")

    def state(self) -> StateVector:
        return StateVector(np.array([self.a, self.b], dtype=np.complex128))


@dataclass(frozen=True)
class TeleportTranscript:
    """One protocol run: measured branch, applied correction, receiver state, fidelity."""

    outcome_index: int
    outcome_probability: float
    correction_applied: str
    bob_final: StateVector
    fidelity: float

    def to_json_dict(self) -> dict:
        return {
            "outcome_index": self.outcome_index,
            "outcome_probability": self.outcome_probability,
            "correction_applied": self.correction_applied,
            "bob_final": [[z.real, z.imag] for z in self.bob_final.amplitudes],
            "fidelity": self.fidelity,
        }


class TeleportationProtocol:
    """Static description of the protocol; it exposes exactly one measurement."""

    name = "teleportation"

    @property
    def measurements(self) -> tuple[ProjectiveMeasurement, ...]:
        return (bell_measurement(),)


def branch_decomposition(inp: TeleportInput) -> list[tuple[float, StateVector]]:
    """Exact (probability, receiver pre-correction state) for each of the 4 outcomes.

    Probabilities are branch norms of the combined three-qubit state and
    equal 1/4 for every normalized input.
    """
    total = tensor(inp.state(), bell_state(0), max_dim=8)
    grid = total.amplitudes.reshape(4, 2)  # leading two qubits major
    branches = []
    for k in range(4):
        raw = _BELL_VECTORS[k].conj() @ grid
        prob = float(np.sum(np.abs(raw) ** 2))
        branches.append((prob, StateVector(raw / math.sqrt(prob))))
    return branches


def run_teleportation(
    inp: TeleportInput,
    forced_outcome: int | None = None,
    seed: int = 0,
) -> TeleportTranscript:
    """Execute one teleportation round.

    The measurement outcome is sampled from the exact branch probabilities
    under the given seed, unless ``forced_outcome`` selects a branch
    deterministically.
    """
    branches = branch_decomposition(inp)
    probs = [p for p, _ in branches]
    if forced_outcome is None:
        rng = np.random.default_rng(seed)
        outcome = int(rng.choice(4, p=np.asarray(probs) / sum(probs)))
    else:
        if forced_outcome not in (0, 1, 2, 3):
            raise InputError(f"forced outcome {forced_outcome} must be in 0..3")
        outcome = int(forced_outcome)
    pre = branches[outcome][1]
    corrected = _correction_matrices()[outcome] @ pre.amplitudes
    bob_final = StateVector(corrected)
    return TeleportTranscript(
        outcome_index=outcome,
        outcome_probability=probs[outcome],
        correction_applied=CORRECTION_LABELS[outcome],
        bob_final=bob_final,
        fidelity=min(bob_final.fidelity(inp.state()), 1.0),
    )


def sample_outcome_counts(inp: TeleportInput, trials: int, seed: int = 0) -> np.ndarray:
    """Outcome histogram over many rounds, sampled from the exact branch probabilities."""
    if trials <= 0:
        raise InputError("trials must be positive")
    probs = np.array([p for p, _ in branch_decomposition(inp)])
    rng = np.random.default_rng(seed)
    outcomes = rng.choice(4, size=trials, p=probs / probs.sum())
    return np.bincount(outcomes, minlength=4)


def verify_no_setting_choice(scenario: object | None = None) -> dict:
    """Machine-readable inventory of how many measurements each party can choose from.

    With no argument this reports on the teleportation protocol, which
    offers exactly one measurement and therefore no setting choice.  A
    two-party scenario object exposing ``alice_observables`` and
    ``bob_observables`` (such as a CHSH scenario) is reported per party.
    """
    if scenario is None:
        scenario = TeleportationProtocol()
    if hasattr(scenario, "alice_observables") and hasattr(scenario, "bob_observables"):
        alice = len(scenario.alice_observables)
        bob = len(scenario.bob_observables)
        return {
            "protocol": type(scenario).__name__,
            "measurement_count": max(alice, bob),
            "measurements_per_party": {"alice": alice, "bob": bob},
            "setting_choice_required": alice > 1 or bob > 1,
        }
    measurements = tuple(scenario.measurements)
    return {
        "protocol": getattr(scenario, "name", type(scenario).__name__),
        "measurement_count": len(measurements),
        "measurements_per_party": {"alice": len(measurements)},
        "setting_choice_required": len(measurements) > 1,
    }
