"""Command-line front end.

Three subcommands:

* ``sweep``   -- run a seeded Monte Carlo grid over non-null fractions,
  procedures, and discount sequences; emit the result table as CSV.
* ``stream``  -- gatekeeper mode: read p-values one per line (file or stdin)
  and print one decision record per line, before reading the next line.
* ``offline`` -- one-shot batch testing of a p-value file with the step-up
  procedures.

Options may come from flags or from a flat ``key = value`` config file
(``--config``); explicit flags win.  Unknown config keys are rejected by
name.  Exit codes: 0 success, 1 usage error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from typing import Callable, Sequence, TypeVar

from . import gamma as gamma_mod
from . import offline as offline_mod
from .procedures import PROCEDURE_NAMES
from .records import validate_pvalue
from .simulation import (
    DataModel,
    ProcedureSpec,
    SimConfig,
    grid,
    model_spec,
    parse_model,
    sweep,
    write_csv,
)

STREAM_HEADER = "t,alpha,lambda,reject,candidate"
OFFLINE_HEADER = "index,p,rejected"


class UsageError(Exception):
    """Bad flags or config contents; exits with status 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


_SWEEP_KEYS = (
    "model", "pi1", "procedure", "gamma", "alpha", "w0", "lambda",
    "T", "trials", "seed", "jobs", "precision",
)
_STREAM_KEYS = ("procedure", "gamma", "alpha", "w0", "lambda", "precision")
_OFFLINE_KEYS = ("method", "alpha", "lambda", "precision")

_DEST = {"lambda": "lam", "pi1": "pi1"}

DEFAULT_MODEL = "gaussian:3.0"
DEFAULT_PI1_GRID = tuple(round(0.1 * k, 1) for k in range(1, 10))


def _dest(key: str) -> str:
    return _DEST.get(key, key)


def _build_parser() -> _Parser:
    parser = _Parser(prog="onlinefdr", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: _Parser, keys: Sequence[str]) -> None:
        p.add_argument("--config", help="flat key = value config file")
        p.add_argument("--out", help="output path (default: stdout)")
        for key in keys:
            p.add_argument(f"--{key}", dest=_dest(key), metavar=key.upper())

    p_sweep = sub.add_parser("sweep", help="run a Monte Carlo grid, emit CSV")
    add_common(p_sweep, _SWEEP_KEYS)
    p_sweep.add_argument(
        "--dump-config", action="store_true",
        help="print the canonical config instead of running",
    )
    p_sweep.set_defaults(handler=_handle_sweep)

    p_stream = sub.add_parser("stream", help="decide p-values line by line")
    add_common(p_stream, _STREAM_KEYS)
    p_stream.add_argument("--input", help="p-value file, one per line (default: stdin)")
    p_stream.add_argument(
        "--dump-config", action="store_true",
        help="print the canonical config instead of running",
    )
    p_stream.set_defaults(handler=_handle_stream)

    p_off = sub.add_parser("offline", help="batch step-up testing of a p-value file")
    add_common(p_off, _OFFLINE_KEYS)
    p_off.add_argument("--input", help="p-value file, one per line (default: stdin)")
    p_off.set_defaults(handler=_handle_offline)

    return parser


def parse_config_text(text: str, allowed: Sequence[str]) -> dict[str, str]:
    """Parse flat ``key = value`` lines; reject keys outside ``allowed``."""
    values: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, sep, value = stripped.partition("=")
        if not sep:
            raise UsageError(f"config line {lineno}: expected 'key = value', got {stripped!r}")
        key = key.strip()
        value = value.strip().strip("\"'")
        if key not in allowed:
            raise UsageError(f"unknown config key {key!r} (line {lineno})")
        values[key] = value
    return values


T = TypeVar("T")


def _resolve(
    args: argparse.Namespace,
    file_cfg: dict[str, str],
    key: str,
    parse: Callable[[str], T],
    default: T | None = None,
    required: bool = False,
) -> T:
    raw = getattr(args, _dest(key), None)
    if raw is None:
        raw = file_cfg.get(key)
    if raw is None:
        if required:
            raise UsageError(f"missing required option --{key}")
        return default
    try:
        return parse(raw)
    except ValueError as exc:
        raise UsageError(f"bad value for {key}: {exc}") from None


def _positive_int(name: str) -> Callable[[str], int]:
    def parse(raw: str) -> int:
        value = int(raw)
        if value < 1:
            raise ValueError(f"{name} must be >= 1, got {value}")
        return value

    return parse


def _seed(raw: str) -> int:
    value = int(raw)
    if value < 0:
        raise ValueError(f"seed must be non-negative, got {value}")
    return value


def _unit_open(name: str) -> Callable[[str], float]:
    def parse(raw: str) -> float:
        value = float(raw)
        if not 0.0 < value < 1.0:
            raise ValueError(f"{name} must lie in (0, 1), got {value}")
        return value

    return parse


def _pi1_list(raw: str) -> tuple[float, ...]:
    values = tuple(float(v) for v in raw.split(","))
    for v in values:
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"pi1 values must lie in [0, 1], got {v}")
    if not values:
        raise ValueError("need at least one pi1 value")
    return values


def _procedure_list(raw: str) -> tuple[str, ...]:
    names = tuple(v.strip() for v in raw.split(","))
    for name in names:
        if name not in PROCEDURE_NAMES:
            raise ValueError(f"unknown procedure {name!r} (known: {', '.join(PROCEDURE_NAMES)})")
    return names


def _gamma_list(raw: str) -> tuple[str, ...]:
    return tuple(gamma_mod.canonical_spec(v.strip()) for v in raw.split(","))


def _load_file_cfg(args: argparse.Namespace, allowed: Sequence[str]) -> dict[str, str]:
    if not getattr(args, "config", None):
        return {}
    try:
        with open(args.config) as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from None
    return parse_config_text(text, allowed)


@dataclass(frozen=True)
class SweepSettings:
    model: str
    pi1: tuple[float, ...]
    procedures: tuple[str, ...]
    gammas: tuple[str, ...]
    alpha: float
    w0: float
    lam: float
    T: int
    trials: int
    seed: int
    jobs: int
    precision: int

    def canonical(self) -> str:
        lines = [
            f"model = {self.model}",
            f"pi1 = {','.join(repr(v) for v in self.pi1)}",
            f"procedure = {','.join(self.procedures)}",
            f"gamma = {','.join(self.gammas)}",
            f"alpha = {self.alpha!r}",
            f"w0 = {self.w0!r}",
            f"lambda = {self.lam!r}",
            f"T = {self.T}",
            f"trials = {self.trials}",
            f"seed = {self.seed}",
            f"jobs = {self.jobs}",
            f"precision = {self.precision}",
        ]
        return "\n".join(lines) + "\n"

    def configs(self) -> list[SimConfig]:
        base = SimConfig(
            model=DataModel(parse_model(self.model), self.pi1[0], self.T),
            procedure=ProcedureSpec(
                self.procedures[0], self.alpha, self.w0, self.lam, self.gammas[0]
            ),
            trials=self.trials,
            seed=self.seed,
        )
        procs = [
            ProcedureSpec(name, self.alpha, self.w0, self.lam, g)
            for name in self.procedures
            for g in self.gammas
        ]
        return grid(base, self.pi1, procs)


def _resolve_sweep(args: argparse.Namespace) -> SweepSettings:
    cfg = _load_file_cfg(args, _SWEEP_KEYS)
    alpha = _resolve(args, cfg, "alpha", _unit_open("alpha"), required=True)
    w0 = _resolve(args, cfg, "w0", float, default=alpha / 2.0)
    if not 0.0 < w0 <= alpha:
        raise UsageError(f"bad value for w0: must lie in (0, alpha], got {w0}")
    model = _resolve(args, cfg, "model", parse_model, default=parse_model(DEFAULT_MODEL))
    return SweepSettings(
        model=model_spec(model),
        pi1=_resolve(args, cfg, "pi1", _pi1_list, default=DEFAULT_PI1_GRID),
        procedures=_resolve(args, cfg, "procedure", _procedure_list, default=("saffron",)),
        gammas=_resolve(args, cfg, "gamma", _gamma_list, default=("power:1.6",)),
        alpha=alpha,
        w0=w0,
        lam=_resolve(args, cfg, "lambda", _unit_open("lambda"), default=0.5),
        T=_resolve(args, cfg, "T", _positive_int("T"), default=1000),
        trials=_resolve(args, cfg, "trials", _positive_int("trials"), default=200),
        seed=_resolve(args, cfg, "seed", _seed, default=0),
        jobs=_resolve(args, cfg, "jobs", _positive_int("jobs"), default=1),
        precision=_resolve(args, cfg, "precision", _positive_int("precision"), default=6),
    )


def _open_out(args: argparse.Namespace):
    if getattr(args, "out", None):
        return open(args.out, "w"), True
    return sys.stdout, False


def _handle_sweep(args: argparse.Namespace) -> int:
    settings = _resolve_sweep(args)
    out, close = _open_out(args)
    try:
        if args.dump_config:
            out.write(settings.canonical())
            return 0
        rows = sweep(settings.configs(), jobs=settings.jobs)
        write_csv(rows, out, precision=settings.precision)
        return 0
    finally:
        if close:
            out.close()


@dataclass(frozen=True)
class StreamSettings:
    procedure: str
    gamma: str
    alpha: float
    w0: float
    lam: float
    precision: int

    def canonical(self) -> str:
        lines = [
            f"procedure = {self.procedure}",
            f"gamma = {self.gamma}",
            f"alpha = {self.alpha!r}",
            f"w0 = {self.w0!r}",
            f"lambda = {self.lam!r}",
            f"precision = {self.precision}",
        ]
        return "\n".join(lines) + "\n"

    def spec(self) -> ProcedureSpec:
        return ProcedureSpec(self.procedure, self.alpha, self.w0, self.lam, self.gamma)


def _resolve_stream(args: argparse.Namespace) -> StreamSettings:
    cfg = _load_file_cfg(args, _STREAM_KEYS)
    alpha = _resolve(args, cfg, "alpha", _unit_open("alpha"), required=True)
    w0 = _resolve(args, cfg, "w0", float, default=alpha / 2.0)
    if not 0.0 < w0 <= alpha:
        raise UsageError(f"bad value for w0: must lie in (0, alpha], got {w0}")
    procedures = _resolve(args, cfg, "procedure", _procedure_list, default=("saffron",))
    if len(procedures) != 1:
        raise UsageError("stream mode takes exactly one procedure")
    gammas = _resolve(args, cfg, "gamma", _gamma_list, default=("power:1.6",))
    if len(gammas) != 1:
        raise UsageError("stream mode takes exactly one gamma sequence")
    return StreamSettings(
        procedure=procedures[0],
        gamma=gammas[0],
        alpha=alpha,
        w0=w0,
        lam=_resolve(args, cfg, "lambda", _unit_open("lambda"), default=0.5),
        precision=_resolve(args, cfg, "precision", _positive_int("precision"), default=6),
    )


def _open_input(args: argparse.Namespace):
    if getattr(args, "input", None):
        return open(args.input), True
    return sys.stdin, False


def _handle_stream(args: argparse.Namespace) -> int:
    settings = _resolve_stream(args)
    out, close_out = _open_out(args)
    try:
        if args.dump_config:
            out.write(settings.canonical())
            return 0
        proc = settings.spec().build()
        fin, close_in = _open_input(args)
        fmt = f".{settings.precision}g"
        errors = 0
        try:
            out.write(STREAM_HEADER + "\n")
            out.flush()
            lineno = 0
            # readline-based loop: each decision is printed (and flushed)
            # before the next input line is read
            for line in iter(fin.readline, ""):
                lineno += 1
                text = line.strip()
                if not text:
                    continue
                try:
                    p = validate_pvalue(float(text))
                except ValueError:
                    print(
                        f"error: line {lineno}: not a p-value in [0, 1]: {text!r}",
                        file=sys.stderr,
                    )
                    errors += 1
                    continue
                record = proc.step(p)
                out.write(
                    f"{record.index},{record.alpha:{fmt}},{record.lam:{fmt}},"
                    f"{record.rejected:d},{record.candidate:d}\n"
                )
                out.flush()
        finally:
            if close_in:
                fin.close()
        return 2 if errors else 0
    finally:
        if close_out:
            out.close()


def _handle_offline(args: argparse.Namespace) -> int:
    cfg = _load_file_cfg(args, _OFFLINE_KEYS)
    alpha = _resolve(args, cfg, "alpha", _unit_open("alpha"), required=True)
    method = _resolve(args, cfg, "method", str, default="bh")
    if method not in ("bh", "storey-bh"):
        raise UsageError(f"unknown method {method!r} (known: bh, storey-bh)")
    lam = _resolve(args, cfg, "lambda", _unit_open("lambda"), default=0.5)
    precision = _resolve(args, cfg, "precision", _positive_int("precision"), default=6)

    fin, close_in = _open_input(args)
    try:
        pvalues = []
        for lineno, line in enumerate(fin, start=1):
            text = line.strip()
            if not text:
                continue
            try:
                pvalues.append(validate_pvalue(float(text)))
            except ValueError:
                raise ValueError(f"line {lineno}: not a p-value in [0, 1]: {text!r}") from None
    finally:
        if close_in:
            fin.close()
    if not pvalues:
        raise ValueError("no p-values in input")

    if method == "bh":
        result = offline_mod.bh(pvalues, alpha)
    else:
        result = offline_mod.storey_bh(pvalues, alpha, lam)

    out, close_out = _open_out(args)
    fmt = f".{precision}g"
    try:
        print(f"threshold: {result.threshold:{fmt}}", file=sys.stderr)
        out.write(OFFLINE_HEADER + "\n")
        for i, p in enumerate(pvalues):
            out.write(f"{i + 1},{p:{fmt}},{int(i in result.rejected)}\n")
        return 0
    finally:
        if close_out:
            out.close()


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
