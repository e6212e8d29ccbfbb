"""Discrete entropy and mutual information in bits, plus the setting-dependence score.

The dependence of a hidden-variable model on its measurement settings is
scored as the mutual information, in bits, between the hidden variable and
the joint setting; a normalized companion (raw bits divided by the setting
entropy) is reported alongside so fully deterministic settings score 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, InvariantError
from .lhv import LhvModel
from .tolerances import DEFAULT_TOLERANCES

_ATOL = DEFAULT_TOLERANCES.arithmetic
_CLAMP = 1e-12


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """Joint probability table over two discrete variables (rows x cols)."""

    probabilities: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.probabilities, dtype=float)
        if arr.ndim != 2 or arr.size == 0:
            raise InputError("joint distribution must be a nonempty 2-d table")
        if not np.all(np.isfinite(arr)):
            raise InputError("joint distribution entries must be finite")
        if np.any(arr < -_ATOL):
            raise InputError("joint distribution entries must be nonnegative")
        total = float(arr.sum())
        if abs(total - 1.0) > _ATOL:
            raise InputError(f"joint distribution sums to {total:.15g}, expected 1")
        arr = np.clip(arr, 0.0, None)
        arr.setflags(write=False)
        object.__setattr__(self, "probabilities", arr)

    @property
    def rows(self) -> int:
        return int(self.probabilities.shape[0])

    @property
    def cols(self) -> int:
        return int(self.probabilities.shape[1])

    def row_marginal(self) -> np.ndarray:
        return self.probabilities.sum(axis=1)

    def col_marginal(self) -> np.ndarray:
        return self.probabilities.sum(axis=0)

    def transpose(self) -> JointDistribution:
        return JointDistribution(self.probabilities.T)


def entropy_bits(distribution) -> float:
    """Shannon entropy in bits, with the 0 log 0 = 0 convention."""
    p = np.asarray(distribution, dtype=float).reshape(-1)
    mask = p > 0.0
    return float(-(p[mask] * np.log2(p[mask])).sum()) if mask.any() else 0.0


def _mutual_information_bits(joint: np.ndarray, row_m: np.ndarray, col_m: np.ndarray) -> float:
    mask = joint > 0.0
    if not mask.any():
        return 0.0
    outer = np.outer(row_m, col_m)
    value = float((joint[mask] * np.log2(joint[mask] / outer[mask])).sum())
    if value < -_CLAMP:
        raise InvariantError(f"mutual information {value:.3g} below the float-residue clamp")
    return max(value, 0.0)


def mutual_information(j: JointDistribution) -> float:
    """I(row; col) = sum p(x,y) log2[ p(x,y) / (p(x) p(y)) ] in bits."""
    return _mutual_information_bits(j.probabilities, j.row_marginal(), j.col_marginal())


def conditional_entropy(j: JointDistribution) -> float:
    """H(col | row) in bits: joint entropy minus row entropy."""
    value = entropy_bits(j.probabilities) - entropy_bits(j.row_marginal())
    if value < -_CLAMP:
        raise InvariantError(f"conditional entropy {value:.3g} below the float-residue clamp")
    return max(value, 0.0)


@dataclass(frozen=True)
class CmdReport:
    """Setting-dependence score of a model.

    raw_bits: mutual information between the hidden variable and the joint
    setting; normalized: raw bits divided by the setting entropy (0 when
    that entropy vanishes); setting_entropy_bits: entropy of the setting
    marginal.
    """

    raw_bits: float
    normalized: float
    setting_entropy_bits: float

    def to_json_dict(self) -> dict:
        return {
            "raw_bits": self.raw_bits,
            "normalized": self.normalized,
            "setting_entropy_bits": self.setting_entropy_bits,
        }


def setting_lambda_joint(model: LhvModel) -> JointDistribution:
    """Joint distribution of (hidden variable, joint setting) implied by a model."""
    weights = model.setting_space.marginal[:, None] * model.lambda_given_settings
    return JointDistribution(weights.T)  # rows: lambda, cols: joint setting


def cmd(model: LhvModel) -> CmdReport:
    """Score a model's measurement dependence in bits (raw and normalized)."""
    joint = setting_lambda_joint(model)
    raw = mutual_information(joint)
    setting_entropy = entropy_bits(model.setting_space.marginal)
    lambda_entropy = entropy_bits(joint.row_marginal())
    if raw > min(setting_entropy, lambda_entropy) + DEFAULT_TOLERANCES.normalization:
        raise InvariantError(
            f"mutual information {raw:.12g} exceeds the entropy bound "
            f"{min(setting_entropy, lambda_entropy):.12g}"
        )
    normalized = raw / setting_entropy if setting_entropy > 0.0 else 0.0
    return CmdReport(raw_bits=raw, normalized=normalized, setting_entropy_bits=setting_entropy)
