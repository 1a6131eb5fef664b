"""Command-line entry point.

Exit codes: 0 success, 1 bad input (parse or validation), 2 numerical
contract failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import fermion, gaussian
from .errors import CCRFlowError, ContractFailure, ParseError, ValidationError
from .flow import flow, flow_trajectory
from .matrixio import dumps, matrix_to_json, parse_grid, read_matrix, trajectory_csv
from .starlinalg import TOL_SPEC, classify, make_form, normal_form
from .verify import report, run_verify

COMMANDS = ("flow", "trajectory", "normal-form", "classify", "density-power", "verify", "fermion")
DEFAULT_GRID = tuple(2.0 ** k for k in range(11))


@dataclass
class RunConfig:
    command: str
    input: str | None = None
    r: float | None = None
    r_grid: tuple[float, ...] = DEFAULT_GRID
    measure: str = gaussian.LIOUVILLE
    output: str | None = None
    format: str = "json"
    seed: int = 42
    tolerances: dict[str, float] = field(default_factory=dict)

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ValidationError(f"unknown command {self.command!r}")
        if self.r is not None and not self.r > 0:
            raise ValidationError(f"--r must be positive, got {self.r}")
        if not self.r_grid:
            raise ValidationError("--r-grid is empty")
        if any(r <= 0 for r in self.r_grid):
            raise ValidationError("--r-grid values must be positive")
        if any(b <= a for a, b in zip(self.r_grid, self.r_grid[1:])):
            raise ValidationError("--r-grid must be strictly ascending")
        if self.measure not in gaussian.MEASURES:
            raise ValidationError(f"--measure must be one of {gaussian.MEASURES}")
        if self.format not in ("json", "csv"):
            raise ValidationError("--format must be json or csv")
        if self.command not in ("verify",) and self.input is None:
            raise ValidationError(f"{self.command} needs --input")
        if self.command in ("flow", "density-power", "fermion") and self.r is None:
            raise ValidationError(f"{self.command} needs --r")


def _load_form(path: str):
    S = read_matrix(path)
    return make_form(S.shape[0], S)


def _json(obj) -> str:
    return dumps(obj) + "\n"


def _cmd_flow(cfg: RunConfig) -> str:
    return _json(matrix_to_json(flow(_load_form(cfg.input), cfg.r).form.S))


def _cmd_trajectory(cfg: RunConfig) -> str:
    tr = flow_trajectory(_load_form(cfg.input), cfg.r_grid)
    if cfg.format == "csv":
        return trajectory_csv(tr.rows)
    rows = [
        {
            "r": row.r,
            "eigenvalues": list(row.eigenvalues),
            "dist_to_limit": row.dist_to_limit,
            "extremality_residual": row.extremality_residual,
        }
        for row in tr.rows
    ]
    return _json({"rows": rows, "limit": matrix_to_json(tr.limit.S)})


def _cmd_normal_form(cfg: RunConfig) -> str:
    nf = normal_form(_load_form(cfg.input))
    return _json({"mus": nf.mus.tolist(), "degenerate_dim": nf.degenerate_dim, "B": matrix_to_json(nf.B)})


def _cmd_classify(cfg: RunConfig) -> str:
    c = classify(_load_form(cfg.input), cfg.tolerances.get("spec", TOL_SPEC))
    return _json({"extremal": c.is_extremal, "center_free": c.is_center_free, "non_boundary": c.is_non_boundary})


def _cmd_density_power(cfg: RunConfig) -> str:
    return _json(gaussian.density_power(_load_form(cfg.input), cfg.r, cfg.measure).record())


def _cmd_fermion(cfg: RunConfig) -> str:
    cov = fermion.make_covariance(read_matrix(cfg.input))
    out = {"r": cfg.r, "C_r": matrix_to_json(fermion.fermion_flow(cov, cfg.r).C)}
    if cov.is_standard:
        lim = fermion.fermion_limits(cov)
        out["low_temp"] = matrix_to_json(lim.low_temp)
        out["high_temp"] = matrix_to_json(lim.high_temp)
        out["near_threshold"] = list(lim.near_threshold)
    return _json(out)


def _cmd_verify(cfg: RunConfig) -> str:
    try:
        results = run_verify(cfg.seed, tolerances=cfg.tolerances)
    except ValueError as exc:
        raise ValidationError(str(exc)) from None
    text = report(results, cfg.seed)
    if not all(r.passed for r in results):
        raise ContractFailure(text)
    return text


HANDLERS = {
    "flow": _cmd_flow,
    "trajectory": _cmd_trajectory,
    "normal-form": _cmd_normal_form,
    "classify": _cmd_classify,
    "density-power": _cmd_density_power,
    "verify": _cmd_verify,
    "fermion": _cmd_fermion,
}


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def run(cfg: RunConfig) -> int:
    try:
        cfg.validate()
        text = HANDLERS[cfg.command](cfg)
    except ContractFailure as exc:
        _emit(str(exc), cfg.output)
        print("error: numerical contract failure", file=sys.stderr)
        return 2
    except (ValidationError, ParseError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except CCRFlowError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    _emit(text, cfg.output)
    return 0


def _tolerance(text: str) -> tuple[str, float]:
    key, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError("expected NAME=VALUE")
    try:
        return key.strip(), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad tolerance value {value!r}") from None


def _grid(text: str) -> tuple[float, ...]:
    try:
        return tuple(parse_grid(text))
    except ParseError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ccrflow", description="Scaling flows of quasi-free covariance forms.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--input", help="JSON matrix file")
    p.add_argument("--r", type=float)
    p.add_argument("--r-grid", type=_grid, default=DEFAULT_GRID, help="e.g. 1,2,4,...,1024")
    p.add_argument("--measure", choices=gaussian.MEASURES, default=gaussian.LIOUVILLE)
    p.add_argument("--output", help="write here instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--tol", type=_tolerance, action="append", default=[], metavar="NAME=VALUE",
                   help="tolerance override (verify check name, or 'spec' for classify)")
    return p


def config_from_args(argv: Sequence[str] | None = None) -> RunConfig:
    a = build_parser().parse_args(argv)
    return RunConfig(
        command=a.command,
        input=a.input,
        r=a.r,
        r_grid=a.r_grid,
        measure=a.measure,
        output=a.output,
        format=a.format,
        seed=a.seed,
        tolerances=dict(a.tol),
    )


def main(argv: Sequence[str] | None = None) -> int:
    return run(config_from_args(argv))


if __name__ == "__main__":
    sys.exit(main())
