"""Command-line front end.

One subcommand per capability: ``teleport`` runs the protocol, ``chsh`` and
``kcbs`` evaluate inequalities, ``mi`` computes mutual information, and
``optimize`` drives the dependence/CHSH search.  Data outputs are
byte-reproducible under a fixed seed; every run that writes data files also
writes a manifest referencing them (the manifest itself carries wall-clock
timing and is the one file excluded from byte reproducibility).

Exit codes: 0 success, 2 usage or input error, 3 internal invariant breach.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .errors import InputError, InvariantError
from .infotheory import JointDistribution, cmd, mutual_information
from .inequalities import (
    KCBS_QUANTUM_OPTIMAL,
    chsh_quantum,
    chsh_value,
    kcbs_classical_min,
    kcbs_pentagram,
    kcbs_value,
    lhv_chsh_max,
)
from .lhv import predict
from .mdsearch import SearchConfig, max_chsh_under_budget, min_cmd_for_chsh, tradeoff_curve
from .serialize import (
    dump_json,
    dumps_json,
    read_chsh_scenario,
    read_kcbs_scenario,
    read_model,
    read_search_config,
    sha256_file,
    write_curve_csv,
    write_model,
)
from .teleport import (
    TeleportInput,
    branch_decomposition,
    run_teleportation,
    verify_no_setting_choice,
)

CONFIG_ENV_VAR = "BELLMD_CONFIG"


def asset_path(name: str) -> Path:
    """Path of a canned scenario file shipped with the package."""
    return Path(str(resources.files("bellmd") / "assets" / name))


class _Manifest:
    """Collects inputs/outputs of one subcommand run and writes the manifest file."""

    def __init__(self, subcommand: str, config: dict, seed: int | None):
        self.subcommand = subcommand
        self.config = config
        self.seed = seed
        self.inputs: dict[str, str] = {}
        self.outputs: list[str] = []
        self._started = time.monotonic()

    def add_input(self, path: Path | str) -> None:
        self.inputs[str(path)] = sha256_file(path)

    def add_output(self, path: Path | str) -> None:
        self.outputs.append(str(path))

    def write(self, path: Path | str) -> None:
        doc = {
            "subcommand": self.subcommand,
            "configuration": self.config,
            "input_digests": self.inputs,
            "output_files": self.outputs,
            "seed": self.seed,
            "tool_version": __version__,
            "duration_seconds": time.monotonic() - self._started,
        }
        dump_json(path, doc)


def _resolve_input(inp_args) -> TeleportInput:
    if inp_args.random:
        rng = np.random.default_rng(inp_args.seed)
        raw = rng.normal(size=4)
        raw /= np.linalg.norm(raw)
        return TeleportInput(complex(raw[0], raw[1]), complex(raw[2], raw[3]))
    return TeleportInput(
        complex(inp_args.a_re, inp_args.a_im), complex(inp_args.b_re, inp_args.b_im)
    )


def cmd_teleport(args) -> int:
    manifest = _Manifest(
        "teleport",
        {
            "a_re": args.a_re, "a_im": args.a_im, "b_re": args.b_re, "b_im": args.b_im,
            "random": args.random, "trials": args.trials,
            "force_outcome": args.force_outcome,
        },
        args.seed,
    )
    inp = _resolve_input(args)
    if args.trials <= 0:
        raise InputError("--trials must be positive")

    # the four possible transcripts are fixed by the input; trials only
    # resample which branch occurred
    canonical = [run_teleportation(inp, forced_outcome=k) for k in range(4)]
    if args.force_outcome is not None:
        if args.force_outcome not in (0, 1, 2, 3):
            raise InputError("--force-outcome must be in 0..3")
        outcomes = np.full(args.trials, args.force_outcome)
    else:
        probs = np.array([p for p, _ in branch_decomposition(inp)])
        rng = np.random.default_rng(args.seed)
        outcomes = rng.choice(4, size=args.trials, p=probs / probs.sum())
    counts = np.bincount(outcomes, minlength=4)
    summary = {
        "input": [[inp.a.real, inp.a.imag], [inp.b.real, inp.b.imag]],
        "trials": args.trials,
        "outcome_counts": counts.tolist(),
        "outcome_frequencies": (counts / args.trials).tolist(),
        "min_fidelity": min(t.fidelity for t in canonical),
        "measurement_report": verify_no_setting_choice(),
    }
    doc = {
        "summary": summary,
        "transcripts": [canonical[k].to_json_dict() for k in outcomes],
    }
    if args.out:
        dump_json(args.out, doc)
        manifest.add_output(args.out)
        manifest.write(str(args.out) + ".manifest.json")
    print(dumps_json(summary))
    return 0


def cmd_chsh(args) -> int:
    modes = [args.scenario is not None, args.model is not None, args.deterministic_max]
    if sum(modes) != 1:
        raise InputError("choose exactly one of --scenario, --model, --deterministic-max")
    manifest = _Manifest(
        "chsh",
        {"scenario": args.scenario, "model": args.model,
         "deterministic_max": args.deterministic_max},
        None,
    )
    if args.deterministic_max:
        doc = {"chsh_value": lhv_chsh_max(), "source": "deterministic_enumeration"}
    else:
        if args.scenario is not None:
            manifest.add_input(args.scenario)
            table = chsh_quantum(read_chsh_scenario(args.scenario))
            source = "quantum_scenario"
        else:
            manifest.add_input(args.model)
            table = predict(read_model(args.model))
            source = "lhv_model"
        doc = {
            "chsh_value": chsh_value(table),
            "source": source,
            "correlators": table.correlators.tolist(),
            "joint_outcome_probabilities": table.joint.tolist(),
        }
    if args.out:
        dump_json(args.out, doc)
        manifest.add_output(args.out)
        manifest.write(str(args.out) + ".manifest.json")
    print(dumps_json(doc if args.deterministic_max else {"chsh_value": doc["chsh_value"]}))
    return 0


def cmd_mi(args) -> int:
    if (args.table is None) == (args.model is None):
        raise InputError("choose exactly one of --table, --model")
    if args.table is not None:
        try:
            values = [float(v) for v in args.table.split(",")]
        except ValueError as exc:
            raise InputError(f"--table must be comma-separated numbers: {exc}") from exc
        if len(values) != 4:
            raise InputError(f"--table needs 4 entries p00,p01,p10,p11, got {len(values)}")
        total = sum(values)
        if abs(total - 1.0) > 1e-9:
            raise InputError(f"--table sums to {total:.12g}, expected 1 within 1e-9")
        if min(values) < 0.0:
            raise InputError("--table entries must be nonnegative")
        table = np.array(values, dtype=float).reshape(2, 2) / total
        bits = mutual_information(JointDistribution(table))
        print(dumps_json({"mutual_information_bits": bits}))
    else:
        report = cmd(read_model(args.model))
        print(dumps_json(report.to_json_dict()))
    return 0


def _load_config(args) -> SearchConfig:
    path = args.config or os.environ.get(CONFIG_ENV_VAR)
    config = read_search_config(path) if path else SearchConfig()
    if args.seed is not None:
        config = SearchConfig(**{**config.__dict__, "seed": args.seed})
    return config


def cmd_optimize(args) -> int:
    modes = [args.target_s is not None, args.budget is not None, args.curve is not None]
    if sum(modes) != 1:
        raise InputError("choose exactly one of --target-s, --budget, --curve")
    config = _load_config(args)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = _Manifest(
        "optimize",
        {**config.__dict__, "target_s": args.target_s, "budget": args.budget,
         "curve": args.curve},
        config.seed,
    )
    if args.config:
        manifest.add_input(args.config)

    if args.target_s is not None:
        outcome = min_cmd_for_chsh(args.target_s, config)
        model_path = out_dir / "min_cmd_model.json"
        write_model(model_path, outcome.model)
        report_path = out_dir / "min_cmd_report.json"
        dump_json(report_path, {
            "target_s": args.target_s,
            "chsh_value": outcome.chsh,
            "cmd": outcome.cmd_report.to_json_dict(),
            "feasible": outcome.feasible,
            "budget_exhausted": not outcome.feasible,
        })
        manifest.add_output(model_path)
        manifest.add_output(report_path)
        print(dumps_json({
            "chsh_value": outcome.chsh,
            "raw_bits": outcome.cmd_report.raw_bits,
            "feasible": outcome.feasible,
        }))
    elif args.budget is not None:
        outcome = max_chsh_under_budget(args.budget, config)
        model_path = out_dir / "budget_model.json"
        write_model(model_path, outcome.model)
        report_path = out_dir / "budget_report.json"
        dump_json(report_path, {
            "budget_bits": args.budget,
            "best_chsh": outcome.chsh,
            "cmd": outcome.cmd_report.to_json_dict(),
        })
        manifest.add_output(model_path)
        manifest.add_output(report_path)
        print(dumps_json({"best_chsh": outcome.chsh,
                          "raw_bits": outcome.cmd_report.raw_bits}))
    else:
        try:
            budgets = [float(v) for v in args.curve.split(",")]
        except ValueError as exc:
            raise InputError(f"--curve must be comma-separated numbers: {exc}") from exc
        curve = tradeoff_curve(budgets, config)
        rows = []
        for k, point in enumerate(curve.points):
            model_file = f"curve_model_{k}.json"
            write_model(out_dir / model_file, point.model)
            manifest.add_output(out_dir / model_file)
            rows.append((point.budget_bits, point.best_chsh, model_file))
        csv_path = out_dir / "curve.csv"
        write_curve_csv(csv_path, rows)
        manifest.add_output(csv_path)
        print(dumps_json({"points": [
            {"budget_bits": p.budget_bits, "best_chsh": p.best_chsh}
            for p in curve.points
        ]}))
    manifest.write(out_dir / "manifest.json")
    return 0


def cmd_kcbs(args) -> int:
    modes = [args.classical_min, args.quantum_optimal, args.scenario is not None]
    if sum(modes) != 1:
        raise InputError("choose exactly one of --classical-min, --quantum-optimal, --scenario")
    if args.classical_min:
        doc = {"kcbs_value": kcbs_classical_min(), "source": "noncontextual_enumeration"}
    elif args.quantum_optimal:
        value = kcbs_value(kcbs_pentagram())
        doc = {"kcbs_value": value, "source": "pentagram_apex_state",
               "closed_form": KCBS_QUANTUM_OPTIMAL}
    else:
        doc = {"kcbs_value": kcbs_value(read_kcbs_scenario(args.scenario)),
               "source": "scenario_file"}
    print(dumps_json(doc))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bellmd",
        description="Measurement-dependence toolkit for Bell-type experiments",
    )
    parser.add_argument("--version", action="version", version=f"bellmd {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("teleport", help="run the teleportation protocol")
    p.add_argument("--a-re", type=float, default=1.0)
    p.add_argument("--a-im", type=float, default=0.0)
    p.add_argument("--b-re", type=float, default=0.0)
    p.add_argument("--b-im", type=float, default=0.0)
    p.add_argument("--random", action="store_true", help="draw a random normalized input")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--force-outcome", type=int, default=None)
    p.add_argument("--out", type=Path, default=None)
    p.set_defaults(func=cmd_teleport)

    p = sub.add_parser("chsh", help="evaluate the CHSH statistic")
    p.add_argument("--scenario", type=Path, default=None)
    p.add_argument("--model", type=Path, default=None)
    p.add_argument("--deterministic-max", action="store_true")
    p.add_argument("--out", type=Path, default=None)
    p.set_defaults(func=cmd_chsh)

    p = sub.add_parser("mi", help="mutual information of a 2x2 table or a model")
    p.add_argument("--table", type=str, default=None, help='"p00,p01,p10,p11"')
    p.add_argument("--model", type=Path, default=None)
    p.set_defaults(func=cmd_mi)

    p = sub.add_parser("optimize", help="search models trading dependence against CHSH")
    p.add_argument("--target-s", type=float, default=None)
    p.add_argument("--budget", type=float, default=None)
    p.add_argument("--curve", type=str, default=None, help='"b1,b2,..."')
    p.add_argument("--config", type=Path, default=None,
                   help=f"key=value config file (default ${CONFIG_ENV_VAR})")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out-dir", type=Path, default=Path("."))
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("kcbs", help="evaluate the five-cycle contextuality statistic")
    p.add_argument("--classical-min", action="store_true")
    p.add_argument("--quantum-optimal", action="store_true")
    p.add_argument("--scenario", type=Path, default=None)
    p.set_defaults(func=cmd_kcbs)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InvariantError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 3


def run() -> None:
    raise SystemExit(main())
