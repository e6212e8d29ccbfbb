"""File formats: model/scenario JSON documents, CSV curves, config files.

All floats are serialized with 17 significant digits, which round-trips
IEEE-754 doubles bit-exactly; readers therefore reconstruct exactly the
values that were written.
"""

from __future__ import annotations

import hashlib
import json
import math
from json.encoder import _make_iterencode, encode_basestring, encode_basestring_ascii
from pathlib import Path

import numpy as np

from .errors import InputError
from .hilbert import OperatorMatrix, StateVector
from .inequalities import ChshScenario, KcbsScenario
from .lhv import LhvModel, SettingSpace
from .mdsearch import SearchConfig


def format_float(x: float) -> str:
    return format(float(x), ".17g")


def _to_plain(obj):
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return _to_plain(obj.tolist())
    if isinstance(obj, Path):
        return str(obj)
    if isinstance(obj, dict):
        return {k: _to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_plain(v) for v in obj]
    return obj


class _Float17Encoder(json.JSONEncoder):
    """json.JSONEncoder with floats rendered at 17 significant digits."""

    def iterencode(self, o, _one_shot: bool = False):
        markers: dict | None = {} if self.check_circular else None
        encoder = encode_basestring_ascii if self.ensure_ascii else encode_basestring

        def floatstr(x):
            if not math.isfinite(x):
                raise ValueError(f"non-finite float {x!r} is not serializable")
            return format_float(x)

        iterator = _make_iterencode(
            markers, self.default, encoder, self.indent, floatstr,
            self.key_separator, self.item_separator, self.sort_keys,
            self.skipkeys, False,
        )
        return iterator(o, 0)


def dumps_json(obj, indent: int | None = 2) -> str:
    return json.dumps(_to_plain(obj), cls=_Float17Encoder, indent=indent)


def dump_json(path: Path | str, obj, indent: int | None = 2) -> None:
    Path(path).write_text(dumps_json(obj, indent=indent) + "\n", encoding="utf-8")


def load_json(path: Path | str):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: not valid JSON ({exc})") from exc


def sha256_file(path: Path | str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _field(doc: dict, name: str, context: str):
    if not isinstance(doc, dict) or name not in doc:
        raise InputError(f"{context}: missing field '{name}'")
    return doc[name]


# --- complex payloads --------------------------------------------------------

def _pairs_to_complex(data, context: str) -> np.ndarray:
    try:
        arr = np.array(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{context}: expected numeric [re, im] pairs") from exc
    if arr.ndim < 1 or arr.shape[-1] != 2:
        raise InputError(f"{context}: expected [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def _complex_to_pairs(arr: np.ndarray) -> list:
    stacked = np.stack([arr.real, arr.imag], axis=-1)
    return stacked.tolist()


def state_to_doc(state: StateVector) -> list:
    return _complex_to_pairs(state.amplitudes)


def state_from_doc(data, context: str) -> StateVector:
    values = _pairs_to_complex(data, context)
    if values.ndim != 1:
        raise InputError(f"{context}: state must be a flat list of [re, im] pairs")
    return StateVector(values)


def operator_to_doc(op: OperatorMatrix) -> list:
    return _complex_to_pairs(op.entries)


def operator_from_doc(data, context: str, hermitian: bool) -> OperatorMatrix:
    values = _pairs_to_complex(data, context)
    if values.ndim != 2:
        raise InputError(f"{context}: operator must be a matrix of [re, im] pairs")
    return OperatorMatrix(values, hermitian=hermitian)


# --- hidden-variable models --------------------------------------------------

def model_to_doc(model: LhvModel) -> dict:
    space = model.setting_space
    return {
        "lambda_count": model.lambda_count,
        "settings": {
            "alice": space.alice_settings,
            "bob": space.bob_settings,
            "marginal": space.marginal.tolist(),
        },
        "lambda_given_settings": model.lambda_given_settings.tolist(),
        "alice_response": model.alice_response.tolist(),
        "bob_response": model.bob_response.tolist(),
    }


def write_model(path: Path | str, model: LhvModel) -> None:
    dump_json(path, model_to_doc(model))


def model_from_doc(doc: dict, context: str = "model") -> LhvModel:
    settings = _field(doc, "settings", context)
    space = SettingSpace(
        alice_settings=int(_field(settings, "alice", f"{context}.settings")),
        bob_settings=int(_field(settings, "bob", f"{context}.settings")),
        marginal=np.array(_field(settings, "marginal", f"{context}.settings"), dtype=float),
    )
    lgs = np.array(_field(doc, "lambda_given_settings", context), dtype=float)
    declared = int(_field(doc, "lambda_count", context))
    if lgs.ndim != 2 or lgs.shape[1] != declared:
        raise InputError(
            f"{context}: lambda_given_settings shape {lgs.shape} does not match "
            f"lambda_count {declared}"
        )
    return LhvModel(
        setting_space=space,
        lambda_given_settings=lgs,
        alice_response=np.array(_field(doc, "alice_response", context), dtype=float),
        bob_response=np.array(_field(doc, "bob_response", context), dtype=float),
    )


def read_model(path: Path | str) -> LhvModel:
    return model_from_doc(load_json(path), context=str(path))


# --- inequality scenarios ----------------------------------------------------

def chsh_scenario_to_doc(scenario: ChshScenario) -> dict:
    return {
        "alice_observables": [operator_to_doc(o) for o in scenario.alice_observables],
        "bob_observables": [operator_to_doc(o) for o in scenario.bob_observables],
        "state": state_to_doc(scenario.state),
    }


def write_chsh_scenario(path: Path | str, scenario: ChshScenario) -> None:
    dump_json(path, chsh_scenario_to_doc(scenario))


def chsh_scenario_from_doc(doc: dict, context: str = "scenario") -> ChshScenario:
    alice = _field(doc, "alice_observables", context)
    bob = _field(doc, "bob_observables", context)
    if not isinstance(alice, list) or len(alice) != 2:
        raise InputError(f"{context}: alice_observables must list exactly 2 matrices")
    if not isinstance(bob, list) or len(bob) != 2:
        raise InputError(f"{context}: bob_observables must list exactly 2 matrices")
    return ChshScenario(
        alice_observables=tuple(
            operator_from_doc(m, f"{context}.alice_observables[{k}]", hermitian=True)
            for k, m in enumerate(alice)
        ),
        bob_observables=tuple(
            operator_from_doc(m, f"{context}.bob_observables[{k}]", hermitian=True)
            for k, m in enumerate(bob)
        ),
        state=state_from_doc(_field(doc, "state", context), f"{context}.state"),
    )


def read_chsh_scenario(path: Path | str) -> ChshScenario:
    return chsh_scenario_from_doc(load_json(path), context=str(path))


def kcbs_scenario_to_doc(scenario: KcbsScenario) -> dict:
    return {
        "vectors": scenario.vectors.tolist(),
        "state": state_to_doc(scenario.state),
    }


def write_kcbs_scenario(path: Path | str, scenario: KcbsScenario) -> None:
    dump_json(path, kcbs_scenario_to_doc(scenario))


def kcbs_scenario_from_doc(doc: dict, context: str = "scenario") -> KcbsScenario:
    vectors = np.array(_field(doc, "vectors", context), dtype=float)
    return KcbsScenario(
        vectors=vectors,
        state=state_from_doc(_field(doc, "state", context), f"{context}.state"),
    )


def read_kcbs_scenario(path: Path | str) -> KcbsScenario:
    return kcbs_scenario_from_doc(load_json(path), context=str(path))


# --- search configuration ----------------------------------------------------

_CONFIG_FIELDS = {
    "lambda_count": int,
    "restarts": int,
    "max_iterations": int,
    "initial_temperature": float,
    "temperature_decay": float,
    "penalty_weight": float,
    "seed": int,
    "tolerance_s": float,
    "tolerance_cmd": float,
}


def read_search_config(path: Path | str) -> SearchConfig:
    """Parse a flat key=value config file; every field is optional."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in _CONFIG_FIELDS:
            raise InputError(f"{path}:{lineno}: unknown config key '{key}'")
        try:
            values[key] = _CONFIG_FIELDS[key](value.strip())
        except ValueError as exc:
            raise InputError(f"{path}:{lineno}: bad value for '{key}': {value.strip()!r}") from exc
    return SearchConfig(**values)


def write_curve_csv(path: Path | str, rows: list[tuple[float, float, str]]) -> None:
    """Curve CSV with stable header: budget_bits, best_chsh, model_file."""
    lines = ["budget_bits,best_chsh,model_file"]
    for budget, best_chsh, model_file in rows:
        lines.append(f"{format_float(budget)},{format_float(best_chsh)},{model_file}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
