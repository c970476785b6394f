"""Command-line front door: canned experiments, JSON input, JSON/CSV output.

Every run echoes its configuration and the library version, numeric output is
checked finite before writing, and identical seed + configuration produces
byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass

import numpy as np
from jsonschema import ValidationError, validate

from . import __version__
from .chains import Chain, CorrelationSet, lemma1_check, prop2_verify, random_chain, verify_chain
from .correlation_engine import Correlation, normalize
from .hardy import HardyConfig, OptimizerConfig, build_hardy, max_hardy_probability, schmidt_state, sensitivity
from .reality_inference import (
    ConstraintSystem,
    ExclusionConstraint,
    derive_contradiction,
    ghsz_correlations,
    lhv_search,
    replay_trace,
)
from .spin_observables import Direction, observable_from_direction

__all__ = ["RunConfig", "main", "run"]

_DIRECTION_SCHEMA = {
    "type": "object",
    "properties": {"theta": {"type": "number"}, "phi": {"type": "number"}},
    "required": ["theta", "phi"],
}

_STATE_SCHEMA = {
    "type": "object",
    "properties": {
        "dim": {"type": "integer", "minimum": 2},
        "entries": {
            "type": "array",
            "items": {
                "type": "array",
                "items": {"type": "number"},
                "minItems": 2,
                "maxItems": 2,
            },
        },
    },
    "required": ["dim", "entries"],
}

_CHAIN_INPUT_SCHEMA = {
    "type": "object",
    "properties": {
        "psi": _STATE_SCHEMA,
        "chain": {
            "type": "array",
            "minItems": 2,
            "items": {
                "type": "object",
                "properties": {
                    "party": {"enum": [1, 2]},
                    "direction": _DIRECTION_SCHEMA,
                },
                "required": ["party", "direction"],
            },
        },
    },
    "required": ["psi", "chain"],
}

_HARDY_INPUT_SCHEMA = {
    "type": "object",
    "properties": {"psi": _STATE_SCHEMA, "n1": _DIRECTION_SCHEMA},
    "required": ["psi", "n1"],
}

_CONSTRAINT_SET_SCHEMA = {
    "type": "object",
    "properties": {
        "n_parties": {"type": "integer", "minimum": 2},
        "observables": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "party": {"type": "integer", "minimum": 1},
                    "direction": _DIRECTION_SCHEMA,
                },
                "required": ["party", "direction"],
            },
        },
        "correlations": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {"source": {"type": "integer"}, "target": {"type": "integer"}},
                "required": ["source", "target"],
            },
        },
        "exclusions": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "observables": {"type": "array", "items": {"type": "integer"}},
                    "forbidden_outcome": {"type": "array", "items": {"enum": [0, 1]}},
                },
                "required": ["observables", "forbidden_outcome"],
            },
        },
    },
    "required": ["observables"],
}

COMMANDS = (
    "hardy",
    "hardy-optimize",
    "sensitivity",
    "chain-verify",
    "prop2-check",
    "ghsz",
    "lhv-closure",
)


@dataclass
class RunConfig:
    command: str
    seed: int = 0
    tol: float = 1e-10
    input_path: str | None = None
    output_path: str | None = None
    format: str = "json"
    k: int = 3
    trials: int = 100
    starts: int = 32
    eps_min: float = 1e-6
    eps_max: float = 1e-2
    num_eps: int = 13


class InputError(ValueError):
    """Invalid command-line input or input file (exit code 2)."""


def _load_json(path: str, schema) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc
    try:
        validate(data, schema)
    except ValidationError as exc:
        raise InputError(f"{path} violates the input schema: {exc.message}") from exc
    return data


def _parse_state(obj) -> np.ndarray:
    entries = [complex(re, im) for re, im in obj["entries"]]
    if len(entries) != obj["dim"]:
        raise InputError("state entry count does not match dim")
    try:
        return normalize(np.array(entries))
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _parse_direction(obj) -> Direction:
    try:
        return Direction(float(obj["theta"]), float(obj["phi"]))
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _direction_json(d: Direction) -> dict:
    return {"theta": d.theta, "phi": d.phi}


def _default_hardy(tol: float) -> HardyConfig:
    return build_hardy(schmidt_state(0.8), Direction(1.0, 0.0), tol)


def _cmd_hardy(cfg: RunConfig) -> dict:
    if cfg.input_path:
        data = _load_json(cfg.input_path, _HARDY_INPUT_SCHEMA)
        config = build_hardy(_parse_state(data["psi"]), _parse_direction(data["n1"]), cfg.tol)
    else:
        config = _default_hardy(cfg.tol)
    return {
        "directions": {
            name: _direction_json(d)
            for name, d in zip(("n1", "n2", "n3", "n4"), (config.n1, config.n2, config.n3, config.n4))
        },
        "p_violation": config.p_violation,
        "degenerate_pairs": list(config.degenerate_pairs),
    }


def _cmd_hardy_optimize(cfg: RunConfig) -> dict:
    opt = max_hardy_probability(OptimizerConfig(n_starts=cfg.starts, seed=cfg.seed))
    return {
        "p_max": opt.p_max,
        "lambda": opt.schmidt_coefficient,
        "theta": opt.direction.theta,
        "phi": opt.direction.phi,
        "converged": opt.converged,
    }


def _cmd_sensitivity(cfg: RunConfig) -> dict:
    if cfg.input_path:
        data = _load_json(cfg.input_path, _HARDY_INPUT_SCHEMA)
        config = build_hardy(_parse_state(data["psi"]), _parse_direction(data["n1"]), cfg.tol)
    else:
        config = _default_hardy(cfg.tol)
    if cfg.num_eps < 2 or cfg.eps_min <= 0 or cfg.eps_max <= cfg.eps_min:
        raise InputError("sensitivity needs 0 < eps-min < eps-max and num-eps >= 2")
    eps = np.logspace(math.log10(cfg.eps_min), math.log10(cfg.eps_max), cfg.num_eps)
    report = sensitivity(config, eps)
    return {
        "epsilons": list(report.epsilons),
        "leak_probabilities": list(report.leak_probabilities),
        "fitted_exponent": report.fitted_exponent,
    }


def _cmd_chain_verify(cfg: RunConfig) -> dict:
    if not cfg.input_path:
        raise InputError("chain-verify requires --input")
    data = _load_json(cfg.input_path, _CHAIN_INPUT_SCHEMA)
    psi = _parse_state(data["psi"])
    if psi.size != 4:
        raise InputError("chain-verify expects a two-qubit state")
    try:
        chain = Chain(
            tuple(
                observable_from_direction(_parse_direction(o["direction"]), o["party"], 2)
                for o in data["chain"]
            )
        )
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    verified = verify_chain(chain, psi, cfg.tol)
    lemma1: bool | None = None
    if verified:
        try:
            lemma1 = lemma1_check(chain, psi, cfg.tol)
        except ValueError:
            lemma1 = None
    return {"verified": verified, "lemma1": lemma1}


def _cmd_prop2_check(cfg: RunConfig) -> dict:
    if cfg.k < 1 or cfg.trials < 1:
        raise InputError("prop2-check needs k >= 1 and trials >= 1")
    rng = np.random.default_rng(cfg.seed)
    max_residual = 0.0
    annihilated = 0
    for _ in range(cfg.trials):
        chain, _psi = random_chain(2 * cfg.k + 1, rng)
        report = prop2_verify(chain, cfg.k, cfg.tol)
        max_residual = max(max_residual, report.max_head_norm)
        annihilated += int(report.head_annihilated)
    return {
        "k": cfg.k,
        "trials": cfg.trials,
        "max_residual": max_residual,
        "all_annihilated": annihilated == cfg.trials,
    }


def _contradiction_json(system, contradiction) -> dict | None:
    if contradiction is None:
        return None
    return {
        "observable": repr(contradiction.observable),
        "derived_correlations": list(contradiction.derived_correlations),
        "trace": [
            {"seed": seed, "events": [list(map(str, ev)) for ev in events]}
            for seed, events in contradiction.trace
        ],
        "replay_ok": replay_trace(system, contradiction),
    }


def _cmd_ghsz(cfg: RunConfig) -> dict:
    _psi, system = ghsz_correlations()
    models = lhv_search(system)
    contradiction = derive_contradiction(system, system.observables[0])
    return {
        "n_constraints": len(system.exclusions),
        "lhv_models": len(models),
        "contradiction": _contradiction_json(system, contradiction),
    }


def _parse_constraint_system(data) -> ConstraintSystem:
    n_parties = int(data.get("n_parties", 2))
    observables = []
    for o in data["observables"]:
        if not 1 <= o["party"] <= n_parties:
            raise InputError(f"party {o['party']} out of range for {n_parties} parties")
        observables.append(
            observable_from_direction(_parse_direction(o["direction"]), o["party"], n_parties)
        )

    def at(idx: int):
        if not 0 <= idx < len(observables):
            raise InputError(f"observable index {idx} out of range")
        return observables[idx]

    try:
        correlations = tuple(
            Correlation(at(c["source"]), at(c["target"]))
            for c in data.get("correlations", ())
        )
        exclusions = tuple(
            ExclusionConstraint(
                tuple(at(i) for i in e["observables"]),
                tuple(e["forbidden_outcome"]),
            )
            for e in data.get("exclusions", ())
        )
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    if correlations:
        # Logical rules assume duality closure of the binary part.
        correlations = CorrelationSet.closure(correlations).correlations
    return ConstraintSystem(tuple(observables), correlations, exclusions)


def _cmd_lhv_closure(cfg: RunConfig) -> dict:
    if cfg.input_path:
        system = _parse_constraint_system(_load_json(cfg.input_path, _CONSTRAINT_SET_SCHEMA))
    else:
        _psi, system = ghsz_correlations()
    if not system.observables:
        raise InputError("constraint set has no observables")
    models = lhv_search(system)
    contradiction = derive_contradiction(system, system.observables[0])
    return {
        "n_observables": len(system.observables),
        "n_correlations": len(system.correlations),
        "n_exclusions": len(system.exclusions),
        "lhv_models": len(models),
        "contradiction": _contradiction_json(system, contradiction),
    }


_RUNNERS = {
    "hardy": _cmd_hardy,
    "hardy-optimize": _cmd_hardy_optimize,
    "sensitivity": _cmd_sensitivity,
    "chain-verify": _cmd_chain_verify,
    "prop2-check": _cmd_prop2_check,
    "ghsz": _cmd_ghsz,
    "lhv-closure": _cmd_lhv_closure,
}


def _check_finite(obj, path="results") -> None:
    if isinstance(obj, float):
        if not math.isfinite(obj):
            raise ArithmeticError(f"non-finite numeric at {path}")
    elif isinstance(obj, dict):
        for k, v in obj.items():
            _check_finite(v, f"{path}.{k}")
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            _check_finite(v, f"{path}[{i}]")


def _render(cfg: RunConfig, results: dict) -> str:
    if cfg.format == "csv":
        if cfg.command != "sensitivity":
            raise InputError("csv output is only defined for the sensitivity command")
        lines = ["epsilon,leak_probability"]
        lines += [
            f"{e!r},{l!r}"
            for e, l in zip(results["epsilons"], results["leak_probabilities"])
        ]
        return "\n".join(lines) + "\n"
    echo = asdict(cfg)
    echo.pop("output_path")  # not part of the result identity
    payload = {
        "command": cfg.command,
        "version": __version__,
        "config": echo,
        "results": results,
    }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def run(cfg: RunConfig) -> int:
    """Execute one command; returns the process exit code."""
    try:
        if cfg.command not in _RUNNERS:
            raise InputError(f"unknown command {cfg.command!r}")
        if cfg.tol <= 0:
            raise InputError("tol must be positive")
        if cfg.format not in ("json", "csv"):
            raise InputError(f"unknown format {cfg.format!r}")
        results = _RUNNERS[cfg.command](cfg)
        _check_finite(results)
        text = _render(cfg, results)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # internal failure
        print(f"internal error: {exc}", file=sys.stderr)
        return 1
    if cfg.output_path:
        try:
            with open(cfg.output_path, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"error: cannot write {cfg.output_path}: {exc}", file=sys.stderr)
            return 2
    else:
        sys.stdout.write(text)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nonlocality-lab",
        description="Numerical and logical experiments on nonlocality arguments "
        "without inequalities for small spin-1/2 systems.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--tol", type=float, default=1e-10)
    parser.add_argument("--input", dest="input_path", default=None)
    parser.add_argument("--output", dest="output_path", default=None)
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument("--k", type=int, default=3, help="closure index for prop2-check")
    parser.add_argument("--trials", type=int, default=100)
    parser.add_argument("--starts", type=int, default=32, help="optimizer restarts")
    parser.add_argument("--eps-min", type=float, default=1e-6)
    parser.add_argument("--eps-max", type=float, default=1e-2)
    parser.add_argument("--num-eps", type=int, default=13)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    cfg = RunConfig(
        command=args.command,
        seed=args.seed,
        tol=args.tol,
        input_path=args.input_path,
        output_path=args.output_path,
        format=args.format,
        k=args.k,
        trials=args.trials,
        starts=args.starts,
        eps_min=args.eps_min,
        eps_max=args.eps_max,
        num_eps=args.num_eps,
    )
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
