"""Finite local hidden-variable models with tunable setting dependence.

A model is a finite hidden-variable space, a conditional distribution
p(lambda | joint setting), and local response tables p(+1 | setting, lambda)
for each party.  Joint outcome statistics are always computed as

    p(x, y | a, b) = sum_lambda p(lambda | a, b) p(x | a, lambda) p(y | b, lambda)

so outcome independence and parameter independence hold by construction;
only the independence of lambda from the settings can be violated, through
the shape of p(lambda | a, b).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .tolerances import DEFAULT_TOLERANCES

_ATOL = DEFAULT_TOLERANCES.arithmetic


def _distribution_rows(name: str, table, columns: int | None = None) -> np.ndarray:
    arr = np.array(table, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise InputError(f"{name} must be a 2-d table")
    if columns is not None and arr.shape[1] != columns:
        raise InputError(f"{name} must have {columns} columns, got {arr.shape[1]}")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} entries must be finite")
    if np.any(arr < -_ATOL):
        raise InputError(f"{name} entries must be nonnegative")
    sums = arr.sum(axis=1)
    if np.any(np.abs(sums - 1.0) > _ATOL):
        raise InputError(f"{name} rows must each sum to 1 within {_ATOL:g}")
    arr = np.clip(arr, 0.0, None)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SettingSpace:
    """Joint measurement settings for two parties, with a marginal over them.

    Joint settings are indexed row-major: index = a * bob_settings + b.
    """

    alice_settings: int = 2
    bob_settings: int = 2
    marginal: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.alice_settings < 1 or self.bob_settings < 1:
            raise InputError("setting counts must be positive")
        n = self.alice_settings * self.bob_settings
        marginal = self.marginal
        if marginal is None:
            marginal = np.full(n, 1.0 / n)
        marginal = _distribution_rows("setting marginal", marginal, columns=n)[0]
        object.__setattr__(self, "marginal", marginal)

    @property
    def n_joint(self) -> int:
        return self.alice_settings * self.bob_settings

    def joint_index(self, a: int, b: int) -> int:
        if not (0 <= a < self.alice_settings and 0 <= b < self.bob_settings):
            raise InputError(f"setting pair ({a}, {b}) out of range")
        return a * self.bob_settings + b


def _response_table(name: str, table, settings: int, lambda_count: int) -> np.ndarray:
    arr = np.array(table, dtype=float)
    if arr.shape != (settings, lambda_count):
        raise InputError(f"{name} must have shape ({settings}, {lambda_count}), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} entries must be finite")
    if np.any(arr < -_ATOL) or np.any(arr > 1.0 + _ATOL):
        raise InputError(f"{name} entries must lie in [0, 1]")
    arr = np.clip(arr, 0.0, 1.0)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class LhvModel:
    """Hidden-variable distribution plus factorizable +/-1 response tables.

    lambda_given_settings has one row per joint setting (each a distribution
    over lambda); alice_response[a, l] and bob_response[b, l] give the
    probability of outcome +1.
    """

    setting_space: SettingSpace
    lambda_given_settings: np.ndarray
    alice_response: np.ndarray
    bob_response: np.ndarray

    def __post_init__(self) -> None:
        space = self.setting_space
        lgs = _distribution_rows("lambda_given_settings", self.lambda_given_settings)
        if lgs.shape[0] != space.n_joint:
            raise InputError(
                f"lambda_given_settings needs {space.n_joint} rows, got {lgs.shape[0]}"
            )
        lam = lgs.shape[1]
        object.__setattr__(self, "lambda_given_settings", lgs)
        object.__setattr__(
            self, "alice_response",
            _response_table("alice_response", self.alice_response, space.alice_settings, lam),
        )
        object.__setattr__(
            self, "bob_response",
            _response_table("bob_response", self.bob_response, space.bob_settings, lam),
        )

    @property
    def lambda_count(self) -> int:
        return int(self.lambda_given_settings.shape[1])


@dataclass(frozen=True, eq=False)
class CorrelationTable:
    """Per-setting correlators E(a, b) plus joint outcome probabilities.

    joint[a, b, i, j] is p(x, y | a, b) with index 0 meaning outcome +1 and
    index 1 meaning outcome -1.
    """

    correlators: np.ndarray
    joint: np.ndarray

    def __post_init__(self) -> None:
        corr = np.array(self.correlators, dtype=float)
        joint = np.array(self.joint, dtype=float)
        if corr.ndim != 2:
            raise InputError("correlators must be a 2-d table indexed by settings")
        if joint.shape != corr.shape + (2, 2):
            raise InputError(
                f"joint table must have shape {corr.shape + (2, 2)}, got {joint.shape}"
            )
        if not (np.all(np.isfinite(corr)) and np.all(np.isfinite(joint))):
            raise InputError("correlation table entries must be finite")
        if np.any(np.abs(corr) > 1.0 + _ATOL):
            raise InputError("correlators must lie in [-1, 1]")
        if np.any(joint < -_ATOL):
            raise InputError("joint outcome probabilities must be nonnegative")
        sums = joint.sum(axis=(2, 3))
        if np.any(np.abs(sums - 1.0) > _ATOL):
            raise InputError("each joint outcome table must sum to 1")
        signs = np.array([[1.0, -1.0], [-1.0, 1.0]])
        implied = np.einsum("abij,ij->ab", joint, signs)
        if np.max(np.abs(implied - corr)) > _ATOL:
            raise InputError("correlators are inconsistent with the joint outcome tables")
        corr.setflags(write=False)
        joint.setflags(write=False)
        object.__setattr__(self, "correlators", corr)
        object.__setattr__(self, "joint", joint)

    @classmethod
    def from_correlators(cls, correlators) -> CorrelationTable:
        """Fill in the unique unbiased-marginal joint table for given correlators."""
        corr = np.array(correlators, dtype=float)
        same = (1.0 + corr) / 4.0
        diff = (1.0 - corr) / 4.0
        joint = np.stack(
            [np.stack([same, diff], axis=-1), np.stack([diff, same], axis=-1)], axis=-2
        )
        return cls(corr, joint)

    @property
    def shape(self) -> tuple[int, int]:
        return (int(self.correlators.shape[0]), int(self.correlators.shape[1]))


def predict(model: LhvModel) -> CorrelationTable:
    """Exact outcome statistics of a model, marginalizing over the hidden variable."""
    space = model.setting_space
    n_a, n_b = space.alice_settings, space.bob_settings
    w = model.lambda_given_settings.reshape(n_a, n_b, model.lambda_count)
    pa = model.alice_response  # p(+1 | a, lambda)
    pb = model.bob_response
    pa2 = np.stack([pa, 1.0 - pa])  # outcome-indexed: [x, a, lambda]
    pb2 = np.stack([pb, 1.0 - pb])
    joint = np.einsum("abl,ial,jbl->abij", w, pa2, pb2)
    da, db = 2.0 * pa - 1.0, 2.0 * pb - 1.0
    corr = np.einsum("abl,al,bl->ab", w, da, db)
    return CorrelationTable(corr, joint)


def brans_construct(target: CorrelationTable, setting_space: SettingSpace | None = None) -> LhvModel:
    """Fully setting-determined model reproducing an arbitrary correlation table.

    The hidden variable enumerates (joint setting, outcome pair); its
    distribution under setting s is supported only on lambdas whose first
    component is s, so the hidden variable determines the settings outright
    and the responses can be deterministic.  ``predict`` returns the target
    exactly, and the information between lambda and the settings saturates
    the setting entropy.
    """
    n_a, n_b = target.shape
    if setting_space is None:
        setting_space = SettingSpace(n_a, n_b)
    if (setting_space.alice_settings, setting_space.bob_settings) != (n_a, n_b):
        raise InputError("setting space does not match the target table shape")
    n_joint = setting_space.n_joint
    outcome_pairs = ((0, 0), (0, 1), (1, 0), (1, 1))  # index 0 -> +1, 1 -> -1
    lam = n_joint * 4
    lgs = np.zeros((n_joint, lam))
    alice = np.zeros((n_a, lam))
    bob = np.zeros((n_b, lam))
    for a in range(n_a):
        for b in range(n_b):
            s = setting_space.joint_index(a, b)
            for k, (i, j) in enumerate(outcome_pairs):
                l = s * 4 + k
                lgs[s, l] = target.joint[a, b, i, j]
                alice[:, l] = 1.0 if i == 0 else 0.0
                bob[:, l] = 1.0 if j == 0 else 0.0
    # guard against float residue in the target rows
    lgs /= lgs.sum(axis=1, keepdims=True)
    return LhvModel(setting_space, lgs, alice, bob)


def measurement_independent(model: LhvModel, tolerance: float = 1e-9) -> bool:
    """True iff p(lambda | a, b) is the same distribution for every joint setting."""
    lgs = model.lambda_given_settings
    spread = float(np.max(lgs.max(axis=0) - lgs.min(axis=0))) if lgs.shape[0] > 1 else 0.0
    return spread <= tolerance
