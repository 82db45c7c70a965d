"""Command-line front end: ``trace``, ``sweep`` and ``threshold``.

Exit codes: 0 success, 1 numerical failure, 2 configuration error.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from dataclasses import dataclass

from .analysis import (MODELS, SweepGrid, ThresholdError, bell_trace, find_threshold,
                       sweep)
from .integrate import IntegrationError, IntegratorConfig
from .params import ParameterError

log = logging.getLogger(__name__)

COMMANDS = ("trace", "sweep", "threshold")
FORMATS = ("csv", "json")

# r1 grid defaults differ per command
_R1_GRID_DEFAULTS = {
    "trace": (0.01, 0.99, 99),
    "sweep": (0.01, 0.99, 99),
    "threshold": (0.05, 0.95, 19),
}
THRESHOLD_BRACKET = (0.0, 0.3)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    model: str
    S: float = 10.0
    r1: float = 0.4
    gammaS: float = 0.0  # in units of gamma0
    tau_max: float = 20.0
    tau_steps: int = 2000
    r1_min: float = 0.01
    r1_max: float = 0.99
    r1_steps: int = 99
    rel_tol: float = 1e-9
    fock_cutoff: int = 1
    out: str = "-"
    format: str = "csv"

    @property
    def grid(self) -> SweepGrid:
        return SweepGrid.from_range(self.r1_min, self.r1_max, self.r1_steps, self.tau_max, self.tau_steps)

    @property
    def integrator(self) -> IntegratorConfig:
        return IntegratorConfig(rel_tol=self.rel_tol)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


_FIELDS = {f.name: f for f in dataclasses.fields(RunConfig)}
_INT_FIELDS = {"tau_steps", "r1_steps", "fock_cutoff"}
_FLOAT_FIELDS = {"S", "r1", "gammaS", "tau_max", "r1_min", "r1_max", "rel_tol"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="chsh-reservoir",
                description="CHSH violation dynamics of two qubits in a common lossy cavity.")
    p.add_argument("command", nargs="?", choices=COMMANDS)
    p.add_argument("--model", choices=MODELS)
    p.add_argument("--S", dest="S", type=float, help="coupling strength R/lambda (default 10)")
    p.add_argument("--r1", type=float, help="relative coupling of qubit 1 (trace only)")
    p.add_argument("--gammaS", type=float, help="spontaneous emission rate in units of gamma0")
    p.add_argument("--tau-max", dest="tau_max", type=float)
    p.add_argument("--tau-steps", dest="tau_steps", type=int)
    p.add_argument("--r1-min", dest="r1_min", type=float)
    p.add_argument("--r1-max", dest="r1_max", type=float)
    p.add_argument("--r1-steps", dest="r1_steps", type=int)
    p.add_argument("--rel-tol", dest="rel_tol", type=float)
    p.add_argument("--fock-cutoff", dest="fock_cutoff", type=int)
    p.add_argument("--out", help="output path, '-' for stdout")
    p.add_argument("--format", choices=FORMATS)
    p.add_argument("--config", help="JSON file with RunConfig keys")
    p.add_argument("--dump-config", action="store_true",
                   help="print the resolved configuration as JSON and exit")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _load_file(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"--config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"--config {path}: expected a JSON object")
    unknown = sorted(set(data) - set(_FIELDS))
    if unknown:
        raise ConfigError(f"--config {path}: unknown key(s) {', '.join(unknown)}")
    return data


def _coerce(key, value):
    try:
        if key in _INT_FIELDS:
            if isinstance(value, bool) or float(value) != int(value):
                raise ValueError
            return int(value)
        if key in _FLOAT_FIELDS:
            if isinstance(value, bool):
                raise ValueError
            return float(value)
        return str(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: invalid value {value!r}") from None


def _validate(cfg: RunConfig) -> None:
    flag = {k: "--" + k.replace("_", "-") for k in _FIELDS}
    flag.update(S="--S", r1="--r1", gammaS="--gammaS")

    def bad(key, why):
        raise ConfigError(f"{flag[key]}: {why} (got {getattr(cfg, key)!r})")

    if cfg.command not in COMMANDS:
        bad("command", f"expected one of {COMMANDS}")
    if cfg.model not in MODELS:
        bad("model", f"expected one of {MODELS}")
    if cfg.format not in FORMATS:
        bad("format", f"expected one of {FORMATS}")
    if not cfg.S > 0:
        bad("S", "must be positive")
    if not 0.0 <= cfg.r1 <= 1.0:
        bad("r1", "must lie in [0, 1]")
    if not cfg.gammaS >= 0:
        bad("gammaS", "must be non-negative")
    if not cfg.tau_max > 0:
        bad("tau_max", "must be positive")
    if cfg.tau_steps < 2:
        bad("tau_steps", "must be at least 2")
    if not 0.0 < cfg.r1_min < 1.0:
        bad("r1_min", "must lie strictly inside (0, 1)")
    if not 0.0 < cfg.r1_max < 1.0:
        bad("r1_max", "must lie strictly inside (0, 1)")
    if cfg.r1_steps < 1 or (cfg.r1_steps > 1 and not cfg.r1_max > cfg.r1_min):
        bad("r1_steps", "needs r1_steps >= 1 and r1_max > r1_min")
    if not 1e-14 <= cfg.rel_tol < 1:
        bad("rel_tol", "must lie in [1e-14, 1)")
    if not 1 <= cfg.fock_cutoff <= 4:
        bad("fock_cutoff", "must lie in [1, 4]")
    if cfg.model == "analytic" and cfg.gammaS != 0:
        bad("gammaS", "the analytic model has no spontaneous emission; use --model lindblad")
    if cfg.command == "threshold" and cfg.model != "lindblad":
        bad("model", "threshold needs the lindblad model")


def parse_config(argv=None) -> tuple[RunConfig, argparse.Namespace]:
    """Resolve defaults < config file < flags into a validated RunConfig."""
    ns = build_parser().parse_args(argv)
    values = _load_file(ns.config) if ns.config else {}
    for key in _FIELDS:
        v = getattr(ns, key, None)
        if v is not None:
            values[key] = v
    command = values.get("command")
    if command is None:
        raise ConfigError("command: one of trace, sweep, threshold is required")
    if command not in COMMANDS:
        raise ConfigError(f"command: expected one of {COMMANDS}, got {command!r}")
    values.setdefault("model", "lindblad" if command == "threshold" else "analytic")
    r1_min, r1_max, r1_steps = _R1_GRID_DEFAULTS[command]
    values.setdefault("r1_min", r1_min)
    values.setdefault("r1_max", r1_max)
    values.setdefault("r1_steps", r1_steps)
    cfg = RunConfig(**{k: _coerce(k, v) for k, v in values.items()})
    _validate(cfg)
    return cfg, ns


# --- output ----------------------------------------------------------------

def fmt(x: float) -> str:
    """Shortest round-trip representation."""
    return repr(float(x))


def _csv(header, rows) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def _json_table(header, rows) -> str:
    return json.dumps({"columns": list(header), "rows": [[float(v) for v in r] for r in rows]}) + "\n"


def _render(cfg: RunConfig, header, rows) -> str:
    return _csv(header, rows) if cfg.format == "csv" else _json_table(header, rows)


def render_trace(cfg: RunConfig) -> str:
    tr = bell_trace(cfg.model, cfg.S, cfg.r1, cfg.grid.taus, cfg.gammaS,
                    cfg=cfg.integrator, fock_cutoff=cfg.fock_cutoff)
    rows = ((t, b, max(0.0, b - 2.0)) for t, b in zip(tr.taus.tolist(), tr.B.tolist()))
    return _render(cfg, ("tau", "B", "violation"), rows)


def render_sweep(cfg: RunConfig) -> str:
    res = sweep(cfg.model, cfg.grid, cfg.S, cfg.gammaS, cfg=cfg.integrator,
                fock_cutoff=cfg.fock_cutoff)
    return _render(cfg, ("tau", "r1", "B", "violation"), res.rows())


def render_threshold(cfg: RunConfig) -> str:
    grid = cfg.grid
    res = find_threshold(cfg.S, grid, THRESHOLD_BRACKET, cfg=cfg.integrator,
                         fock_cutoff=cfg.fock_cutoff)
    record = {
        "gamma_star_over_gamma0": res.gamma_star_over_gamma0,
        "bracket_width": res.bracket_width,
        "grid": {"tau_max": grid.tau_max, "tau_steps": grid.tau_steps,
                 "r1_values": list(grid.r1_values)},
    }
    if cfg.format == "csv":
        return _csv(("gamma_star_over_gamma0", "bracket_width"),
                    [(res.gamma_star_over_gamma0, res.bracket_width)])
    return json.dumps(record, indent=2) + "\n"


_RENDERERS = {"trace": render_trace, "sweep": render_sweep, "threshold": render_threshold}


def _write(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def run(cfg: RunConfig) -> int:
    try:
        text = _RENDERERS[cfg.command](cfg)
    except (IntegrationError, ThresholdError, ArithmeticError) as exc:
        where = f"r1 = {cfg.r1}" if cfg.command == "trace" else f"r1 in [{cfg.r1_min}, {cfg.r1_max}]"
        print(f"error: numerical failure ({where}): {exc}", file=sys.stderr)
        return 1
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        _write(cfg.out, text)
    except OSError as exc:
        print(f"error: --out {cfg.out}: {exc}", file=sys.stderr)
        return 2
    return 0


def main(argv=None) -> int:
    try:
        cfg, ns = parse_config(argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    logging.basicConfig(level=logging.DEBUG if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if ns.dump_config:
        sys.stdout.write(json.dumps(cfg.to_dict(), indent=2) + "\n")
        return 0
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
