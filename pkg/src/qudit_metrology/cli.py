"""
Command-line front end.

    qudit-metrology qfi --state ghz --d 6
    qudit-metrology sweep-dicke --d 8 --output dicke.csv
    qudit-metrology sweep-ghz --d 8 --format json --output ghz.json
    qudit-metrology decoherence --d-list 2 3 4 5 --gamma 0.1 --t-list 0 0.5 1
    qudit-metrology equivalence --d 5 --output eq.json
    qudit-metrology reproduce --figure 1 --output fig1/

Exit codes: 0 success, 2 usage error, 3 I/O failure, 4 invariant violation.
Grid evaluation uses ``QUDIT_METROLOGY_WORKERS`` threads (default: CPU count).
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import math
import os
import sys
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .decoherence import DephasingChannel, ghz_dephased, power_decay_curve
from .exceptions import InvariantViolation, QuditError
from .multiqubit import MAX_QUBITS, qfi_equivalence_check
from .protocols import (
    ThetaGrid,
    default_dicke_index,
    format_number,
    jz_view,
    run_dicke_protocol,
    run_ghz_protocol,
)
from .qfi import qfi_report
from .qudit import MAX_DIM, basis_state, ghz_like, random_pure_state, spin_coherent

COMMANDS = ("qfi", "sweep-dicke", "sweep-ghz", "decoherence", "equivalence", "reproduce")
FIGURE_DIMS = (4, 8)


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    d: int | None = None
    d_list: list[int] = field(default_factory=list)
    i: int | None = None
    state: str = "ghz"
    polar: float = 0.0
    azimuth: float = 0.0
    gamma_t: float = 0.0
    theta_start: float = 0.0
    theta_stop: float = math.pi
    theta_count: int = 721
    gamma: float = 1.0
    t_list: list[float] = field(default_factory=list)
    output: str | None = None
    format: str = "csv"
    derivative_mode: str = "analytic"
    h: float = 1e-5
    m: int = 1
    figure: int | None = None
    n_random: int = 50
    seed: int = 0

    @property
    def grid(self) -> ThetaGrid:
        return ThetaGrid(self.theta_start, self.theta_stop, self.theta_count)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qudit-metrology", description=__doc__.split("\n\n")[0].strip())
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def common(p):
        # defaults are None so config-file values can fill the gaps
        p.add_argument("--config", help="JSON file with RunConfig fields")
        p.add_argument("--output", "-o")
        p.add_argument("--format", choices=("csv", "json"))

    def grid(p):
        p.add_argument("--theta-start", type=float)
        p.add_argument("--theta-stop", type=float)
        p.add_argument("--theta-count", type=int)
        p.add_argument("--derivative-mode", choices=("analytic", "finite_difference"))
        p.add_argument("--h", type=float, help="finite-difference step")
        p.add_argument("--m", type=int, help="number of measurements in the CRB column")

    p = sub.add_parser("qfi", help="QFI report for a probe state")
    common(p)
    p.add_argument("--state", choices=("ghz", "dicke", "coherent", "ghz-dephased"))
    p.add_argument("--d", type=int)
    p.add_argument("--i", type=int)
    p.add_argument("--polar", type=float)
    p.add_argument("--azimuth", type=float)
    p.add_argument("--gamma-t", type=float)
    p.add_argument("--m", type=int)

    p = sub.add_parser("sweep-dicke", help="Dicke-like protocol over a theta grid")
    common(p)
    grid(p)
    p.add_argument("--d", type=int)
    p.add_argument("--i", type=int)

    p = sub.add_parser("sweep-ghz", help="GHZ-like protocol over a theta grid")
    common(p)
    grid(p)
    p.add_argument("--d", type=int)

    p = sub.add_parser("decoherence", help="dephased GHZ-like QFI and power table")
    common(p)
    p.add_argument("--d-list", type=int, nargs="+")
    p.add_argument("--gamma", type=float)
    p.add_argument("--t-list", type=float, nargs="+")

    p = sub.add_parser("equivalence", help="qudit vs symmetric multi-qubit QFI check")
    common(p)
    p.add_argument("--d", type=int)
    p.add_argument("--n-random", type=int)
    p.add_argument("--seed", type=int)

    p = sub.add_parser("reproduce", help="data behind the Dicke (1) and GHZ (2) figures")
    common(p)
    p.add_argument("--figure", type=int, choices=(1, 2))
    grid(p)
    return parser


def _load_config_file(path: str) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise UsageError("config file must hold a JSON object")
    known = {f.name for f in dataclasses.fields(RunConfig)}
    unknown = set(doc) - known
    if unknown:
        raise UsageError(f"unknown config fields: {sorted(unknown)}")
    return doc


def parse_config(argv=None) -> RunConfig:
    """Parse command-line flags (over an optional ``--config`` JSON file)."""
    ns = _build_parser().parse_args(argv)
    if ns.command is None:
        raise UsageError(f"a command is required: {', '.join(COMMANDS)}")
    values = {}
    if getattr(ns, "config", None):
        values.update(_load_config_file(ns.config))
    for key, val in vars(ns).items():
        if key != "config" and val is not None:
            values[key] = val
    values["command"] = ns.command
    try:
        cfg = RunConfig(**values)
    except TypeError as exc:
        raise UsageError(str(exc)) from exc
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig) -> None:
    def need_d(cap=MAX_DIM):
        if cfg.d is None:
            raise UsageError(f"{cfg.command} requires --d")
        if not 2 <= cfg.d <= cap:
            raise UsageError(f"--d must be in 2..{cap}, got {cfg.d}")

    if cfg.theta_count < 2:
        raise UsageError("--theta-count must be >= 2")
    if not cfg.theta_stop > cfg.theta_start:
        raise UsageError("--theta-stop must exceed --theta-start")
    if cfg.m < 1:
        raise UsageError("--m must be >= 1")
    if cfg.derivative_mode == "finite_difference" and not cfg.h > 0:
        raise UsageError("--h must be positive")

    if cfg.command in ("qfi", "sweep-dicke", "sweep-ghz"):
        need_d()
    if cfg.command == "sweep-dicke" or (cfg.command == "qfi" and cfg.state == "dicke"):
        if cfg.i is None:
            cfg.i = default_dicke_index(cfg.d)
        if not 0 <= cfg.i < cfg.d:
            raise UsageError(f"--i must be in 0..{cfg.d - 1}")
    if cfg.command == "qfi" and cfg.gamma_t < 0:
        raise UsageError("--gamma-t must be non-negative")
    if cfg.command == "decoherence":
        if not cfg.d_list:
            raise UsageError("decoherence requires --d-list")
        if any(not 2 <= d <= MAX_DIM for d in cfg.d_list):
            raise UsageError(f"--d-list entries must be in 2..{MAX_DIM}")
        if not cfg.t_list:
            raise UsageError("decoherence requires --t-list")
        if cfg.gamma < 0 or any(t < 0 for t in cfg.t_list):
            raise UsageError("--gamma and --t-list must be non-negative")
    if cfg.command == "equivalence":
        need_d(MAX_QUBITS + 1)
        if cfg.n_random < 0:
            raise UsageError("--n-random must be >= 0")
    if cfg.command == "reproduce" and cfg.figure is None:
        raise UsageError("reproduce requires --figure 1 or 2")


# --------------------------------------------------------------------------
# output


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _manifest(cfg: RunConfig, files: dict[Path, str], wall_time: float) -> str:
    doc = {
        "config": dataclasses.asdict(cfg),
        "tool": "qudit-metrology",
        "version": __version__,
        "files": {p.name: hashlib.sha256(t.encode()).hexdigest() for p, t in sorted(files.items())},
        "wall_time_s": wall_time,
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _emit(cfg: RunConfig, outputs: dict[str, str], started: float, manifest_path: Path | None) -> None:
    """Write named outputs (or print a single one to stdout) plus the manifest."""
    if manifest_path is None:
        for text in outputs.values():
            sys.stdout.write(text)
        return
    files = {}
    for name, text in outputs.items():
        path = Path(name)
        _atomic_write(path, text)
        files[path] = text
    _atomic_write(manifest_path, _manifest(cfg, files, time.perf_counter() - started))


def _single_output(cfg: RunConfig, text: str) -> tuple[dict[str, str], Path | None]:
    if cfg.output is None:
        return {"-": text}, None
    out = Path(cfg.output)
    return {str(out): text}, out.with_name(out.name + ".manifest.json")


def _qfi_state(cfg: RunConfig):
    if cfg.state == "ghz":
        return ghz_like(cfg.d)
    if cfg.state == "dicke":
        return basis_state(cfg.d, cfg.i)
    if cfg.state == "coherent":
        return spin_coherent(cfg.d, cfg.polar, cfg.azimuth)
    return ghz_dephased(cfg.d, DephasingChannel(cfg.gamma_t))


def _protocol_text(result, fmt: str) -> str:
    return result.to_json() if fmt == "json" else result.to_csv()


def _jz_csv(result) -> str:
    lines = ["theta,jz_expectation,precision_sq"]
    for th, jz, p in zip(result.theta, jz_view(result), result.precision_sq):
        lines.append(",".join(format_number(float(x)) for x in (th, jz, p)))
    return "\n".join(lines) + "\n"


def _run_reproduce(cfg: RunConfig, started: float) -> None:
    out_dir = Path(cfg.output or f"figure{cfg.figure}")
    outputs = {}
    for d in FIGURE_DIMS:
        if cfg.figure == 1:
            res = run_dicke_protocol(d, default_dicke_index(d), cfg.grid, cfg.derivative_mode, cfg.h, cfg.m)
            outputs[str(out_dir / f"dicke_d{d}.csv")] = res.to_csv()
        else:
            res = run_ghz_protocol(d, cfg.grid, cfg.derivative_mode, cfg.h, cfg.m)
            outputs[str(out_dir / f"ghz_d{d}.csv")] = res.to_csv()
            outputs[str(out_dir / f"ghz_jz_d{d}.csv")] = _jz_csv(res)
    _emit(cfg, outputs, started, out_dir / "manifest.json")


def run(cfg: RunConfig) -> int:
    started = time.perf_counter()
    if cfg.command == "reproduce":
        _run_reproduce(cfg, started)
        return 0

    if cfg.command == "qfi":
        text = json.dumps(qfi_report(_qfi_state(cfg), cfg.m).to_dict(), indent=2) + "\n"
    elif cfg.command == "sweep-dicke":
        res = run_dicke_protocol(cfg.d, cfg.i, cfg.grid, cfg.derivative_mode, cfg.h, cfg.m)
        text = _protocol_text(res, cfg.format)
    elif cfg.command == "sweep-ghz":
        res = run_ghz_protocol(cfg.d, cfg.grid, cfg.derivative_mode, cfg.h, cfg.m)
        text = _protocol_text(res, cfg.format)
    elif cfg.command == "decoherence":
        curve = power_decay_curve(cfg.d_list, [cfg.gamma * t for t in cfg.t_list])
        if cfg.format == "json":
            text = json.dumps({"columns": ["d", "gamma_t", "f_q", "d_eff", "metrological_power"],
                               "rows": [list(r) for r in curve.rows]}, indent=2) + "\n"
        else:
            text = curve.to_csv()
    elif cfg.command == "equivalence":
        text = _equivalence(cfg).to_json()
    else:  # pragma: no cover - argparse restricts the choices
        raise UsageError(f"unknown command {cfg.command}")

    outputs, manifest = _single_output(cfg, text)
    _emit(cfg, outputs, started, manifest)
    return 0


def _equivalence(cfg: RunConfig):
    rng = np.random.default_rng(cfg.seed)
    d = cfg.d
    directions = ["x", "y", "z"] + [tuple(v) for v in rng.normal(size=(3, 3))]
    report = qfi_equivalence_check(ghz_like(d), directions, label="ghz")
    for i in range(d):
        report = report.merge(qfi_equivalence_check(basis_state(d, i), directions, label=f"dicke_{i}"))
    for k in range(cfg.n_random):
        report = report.merge(qfi_equivalence_check(random_pure_state(d, rng), directions,
                                                    label=f"random_{k}"))
    if not report.passed:
        raise InvariantViolation(f"equivalence residual {report.max_residual!r} above tolerance")
    return report


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
    except UsageError as exc:
        print(f"qudit-metrology: usage error: {exc}", file=sys.stderr)
        return 2
    try:
        return run(cfg)
    except UsageError as exc:
        print(f"qudit-metrology: usage error: {exc}", file=sys.stderr)
        return 2
    except InvariantViolation as exc:
        print(f"qudit-metrology: invariant violation: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"qudit-metrology: I/O failure: {exc}", file=sys.stderr)
        return 3
    except QuditError as exc:
        print(f"qudit-metrology: usage error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
