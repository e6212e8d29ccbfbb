"""Central numeric tolerances: one knob for every constructor and consistency check."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    """Absolute tolerances used throughout the package.

    normalization: state norms and Born-rule probability sums
    operator: idempotence, orthogonality, unitarity of matrices
    arithmetic: hermiticity, probability-table sums, correlator identities
    """

    normalization: float = 1e-9
    operator: float = 1e-10
    arithmetic: float = 1e-12


DEFAULT_TOLERANCES = Tolerances()
