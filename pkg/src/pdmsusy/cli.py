"""Command-line interface: ``pdm list | spectrum | wavefunction | verify | sweep``.

Every verb emits one table in csv, json or plain form. Floats are printed
with 15 significant digits in lowercase e-notation, so an identical
configuration always yields byte-identical output.

Exit codes: 0 success, 2 usage error, 3 parameter-window violation,
4 verification failure.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import catalog
from .deformation import AmbiguityParams
from .errors import ParameterError, PDMError
from .numeric import DEFAULT_GRID, DEFAULT_TOL, verify_model

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONSTRAINT = 3
EXIT_VERIFY = 4

FORMATS = ("csv", "json", "plain")
VERBS = ("list", "spectrum", "wavefunction", "verify", "sweep")
DEFAULT_LEVELS = 4
DEFAULT_SAMPLES = 201


class UsageError(Exception):
    """Malformed command line or configuration file."""


# -- configuration -------------------------------------------------------------------

@dataclass
class RunConfig:
    verb: str
    model: str | None = None
    params: dict = field(default_factory=dict)
    xi: float = 0.0
    zeta: float = 0.0
    n: int | None = None
    levels: int | None = None
    grid: int | None = None
    tol: float = DEFAULT_TOL
    format: str = "plain"
    out: str | None = None
    sweep: tuple[str, tuple[float, ...]] | None = None
    corrupt: float | None = None  # test hook: scales analytic energies before verification

    @property
    def ambiguity(self) -> AmbiguityParams:
        return AmbiguityParams(self.xi, self.zeta)


def _assignment(text: str) -> tuple[str, str]:
    if "=" not in text:
        raise UsageError(f"expected name=value, got {text!r}")
    name, value = text.split("=", 1)
    name, value = name.strip(), value.strip()
    if not name or not value:
        raise UsageError(f"expected name=value, got {text!r}")
    return name, value


def _float(text: str, what: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise UsageError(f"{what}: not a number: {text!r}") from None


def _int(text: str, what: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise UsageError(f"{what}: not an integer: {text!r}") from None


def parse_sweep(text: str) -> tuple[str, tuple[float, ...]]:
    """``name=v1,v2,...`` or ``name=start:stop:count`` (inclusive linspace)."""
    name, spec = _assignment(text)
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise UsageError(f"sweep range must be start:stop:count, got {spec!r}")
        start, stop = _float(parts[0], "sweep"), _float(parts[1], "sweep")
        count = _int(parts[2], "sweep")
        if count < 1:
            raise UsageError("sweep count must be >= 1")
        values = tuple(float(v) for v in np.linspace(start, stop, count))
    else:
        values = tuple(_float(v, "sweep") for v in spec.split(",") if v.strip())
    if not values:
        raise UsageError("empty sweep")
    return name, values


def read_config_file(path: str) -> dict:
    """Plain ``key=value`` lines; ``#`` starts a comment.

    Keys are option names (``model``, ``xi``, ``levels``, ...), ``param``
    (repeatable, value ``name=value``), or a bare model-parameter name.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc.strerror}") from None
    options: dict = {"param": {}}
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = _assignment(line)
        key = key.replace("-", "_")
        if key == "param":
            name, v = _assignment(value)
            options["param"][name] = v
        elif key in _OPTION_KEYS:
            options[key] = value
        else:
            options["param"][key] = value
    return options


_OPTION_KEYS = ("model", "xi", "zeta", "n", "levels", "grid", "tol", "format", "out", "sweep")


def build_config(args: argparse.Namespace) -> RunConfig:
    """Merge the optional config file with command-line flags (flags win)."""
    file_opts = read_config_file(args.config) if args.config else {"param": {}}

    def pick(key):
        flag = getattr(args, key, None)
        return flag if flag is not None else file_opts.get(key)

    params = {k: _float(v, f"parameter {k}") for k, v in file_opts["param"].items()}
    for text in args.param or ():
        name, value = _assignment(text)
        params[name] = _float(value, f"parameter {name}")

    fmt = pick("format") or "plain"
    if fmt not in FORMATS:
        raise UsageError(f"unknown format {fmt!r}; choose from {', '.join(FORMATS)}")
    cfg = RunConfig(verb=args.verb, model=pick("model"), params=params, format=fmt, out=pick("out"))
    for key, conv in (("xi", _float), ("zeta", _float), ("tol", _float)):
        value = pick(key)
        if value is not None:
            setattr(cfg, key, conv(str(value), key))
    for key in ("n", "levels", "grid"):
        value = pick(key)
        if value is not None:
            setattr(cfg, key, _int(str(value), key))
    sweep = pick("sweep")
    if sweep is not None:
        cfg.sweep = parse_sweep(sweep)
    cfg.corrupt = getattr(args, "corrupt_spectrum", None)

    if cfg.verb != "list" and not cfg.model:
        raise UsageError(f"{cfg.verb}: --model is required")
    if cfg.verb == "wavefunction" and cfg.n is None:
        raise UsageError("wavefunction: --n is required")
    if cfg.verb == "sweep" and cfg.sweep is None:
        raise UsageError("sweep: --sweep name=values is required")
    if cfg.n is not None and cfg.n < 0:
        raise UsageError("--n must be >= 0")
    if cfg.levels is not None and cfg.levels < 1:
        raise UsageError("--levels must be >= 1")
    if cfg.grid is not None and cfg.grid < (2 if cfg.verb == "wavefunction" else 64):
        raise UsageError("--grid too small")
    if not cfg.tol > 0:
        raise UsageError("--tol must be positive")
    return cfg


# -- formatting ----------------------------------------------------------------------

def fmt_float(value: float) -> str:
    """15 significant digits, lowercase e-notation; infinities as ``inf``."""
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if value == 0.0:
        value = 0.0  # drop the sign of negative zero
    return format(value, ".14e")


def _scalar_text(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return fmt_float(value)
    return str(value)


def _json_value(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return json.dumps(fmt_float(v)) if not math.isfinite(v) else fmt_float(v)
    if isinstance(value, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_json_value(v)}" for k, v in value.items()) + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_json_value(v) for v in value) + "]"
    return json.dumps(str(value))


@dataclass
class Table:
    """Output of one verb: metadata, column names, rows and trailer entries."""

    meta: dict
    columns: list[str]
    rows: list[list]
    trailer: dict = field(default_factory=dict)

    def render(self, fmt: str) -> str:
        if fmt == "json":
            meta = dict(self.meta)
            meta.update(self.trailer)
            rows = [dict(zip(self.columns, r)) for r in self.rows]
            return _json_value({"meta": meta, "rows": rows}) + "\n"
        if fmt == "csv":
            lines = [f"# {k}={_flat(v)}" for k, v in self.meta.items()]
            lines.append(",".join(self.columns))
            lines += [",".join(_csv_cell(c) for c in r) for r in self.rows]
            lines += [f"# {k}={_flat(v)}" for k, v in self.trailer.items()]
            return "\n".join(lines) + "\n"
        lines = [f"{k}: {_flat(v)}" for k, v in self.meta.items()]
        cells = [[_scalar_text(c) for c in r] for r in self.rows]
        widths = [max([len(h)] + [len(r[i]) for r in cells]) for i, h in enumerate(self.columns)]
        lines.append("  ".join(h.rjust(w) for h, w in zip(self.columns, widths)))
        lines += ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells]
        lines += [f"{k}: {_flat(v)}" for k, v in self.trailer.items()]
        return "\n".join(lines) + "\n"


def _flat(value) -> str:
    if isinstance(value, dict):
        return ";".join(f"{k}={_flat(v)}" for k, v in value.items())
    if isinstance(value, (list, tuple)):
        return ";".join(_flat(v) for v in value)
    return _scalar_text(value)


def _csv_cell(value) -> str:
    text = _scalar_text(value)
    if any(ch in text for ch in ',"\n'):
        text = '"' + text.replace('"', '""') + '"'
    return text


# -- verbs ---------------------------------------------------------------------------

def _model_meta(model, params: dict, cfg: RunConfig) -> dict:
    amb = cfg.ambiguity
    meta = {"model": model.id, "params": dict(params)}
    derived = model.derived(params)
    if derived:
        meta["derived"] = derived
    meta["ambiguity"] = {"xi": amb.xi, "eta": amb.eta, "zeta": amb.zeta, "rho": amb.rho, "sigma": amb.sigma}
    return meta


def cmd_list(cfg: RunConfig) -> Table:
    cols = ["id", "active", "domain", "params", "windows", "count_kind", "reason"]
    rows = []
    for entry in catalog.list_models():
        if entry.active:
            rows.append([
                entry.id, True, str(entry.domain), " ".join(entry.param_names),
                "; ".join(w.text for w in entry.windows), entry.count_kind, "",
            ])
        else:
            rows.append([entry.id, False, "", "", "", "", entry.reason + ": " + entry.note])
    return Table({"verb": "list", "models": len(rows)}, cols, rows)


def _spectrum_rows(model, params: dict, levels: int):
    result = model.spectrum_result(params, levels)
    return result, [[n, e] for n, e in enumerate(result.energies)]


def cmd_spectrum(cfg: RunConfig) -> Table:
    model = catalog.get_model(cfg.model)
    p = model.validate(cfg.params)
    result, rows = _spectrum_rows(model, p, cfg.levels or DEFAULT_LEVELS)
    meta = _model_meta(model, p, cfg)
    return Table({"verb": "spectrum", **meta}, ["n", "E"], rows, {"count": result.count})


def cmd_wavefunction(cfg: RunConfig) -> Table:
    from .wavefunctions import assemble_psi

    model = catalog.get_model(cfg.model)
    p = model.validate(cfg.params)
    bundle = assemble_psi(model, p, cfg.n, grid=cfg.grid or DEFAULT_SAMPLES)
    psi = bundle.normalized()
    meta = _model_meta(model, p, cfg)
    meta = {"verb": "wavefunction", **meta, "n": cfg.n, "energy": bundle.energy}
    trailer = {
        "norm": bundle.norm,
        "l2_ok": bundle.l2_ok,
        "hermiticity_ok": bundle.hermiticity_ok,
        "boundary_limit_lo": bundle.boundary_values[0],
        "boundary_limit_hi": bundle.boundary_values[1],
        "nodes": bundle.nodes,
    }
    rows = [[float(x), float(v)] for x, v in zip(bundle.x, psi)]
    return Table(meta, ["x", "psi"], rows, trailer)


def cmd_verify(cfg: RunConfig) -> Table:
    model = catalog.get_model(cfg.model)
    p = model.validate(cfg.params)
    N = cfg.grid or DEFAULT_GRID
    report, num = verify_model(model, p, cfg.levels or DEFAULT_LEVELS, N, cfg.tol)
    analytic = report.analytic
    if cfg.corrupt is not None and analytic:
        from .numeric import compare_spectra
        from .si_engine import SpectrumResult

        bad = SpectrumResult(tuple(e * cfg.corrupt for e in analytic), model.bound_state_count(p), {})
        report = compare_spectra(bad, num, cfg.tol, num.below_threshold)
    rows = [
        [n, a, v, r, r <= cfg.tol]
        for n, a, v, r in zip(report.levels, report.analytic, report.numeric, report.rel_errors)
    ]
    meta = {"verb": "verify", **_model_meta(model, p, cfg), "grid": N, "tol": cfg.tol}
    trailer = {
        "count": model.bound_state_count(p),
        "numeric_below_threshold": None if num is None else num.below_threshold,
        "count_ok": report.count_ok,
        "truncation": "" if num is None else num.truncation,
        "max_rel_error": report.max_error,
        "passed": report.passed,
    }
    table = Table(meta, ["n", "analytic", "numeric", "rel_error", "pass"], rows, trailer)
    table.passed = report.passed
    return table


def cmd_sweep(cfg: RunConfig) -> Table:
    model = catalog.get_model(cfg.model)
    name, values = cfg.sweep
    if name not in model.param_names:
        raise ParameterError(f"unknown parameter {name} for model {model.id}; expected {', '.join(model.param_names)}")
    levels = cfg.levels or DEFAULT_LEVELS
    points = []
    for v in values:  # validate every point before emitting anything
        p = model.validate({**cfg.params, name: v})
        points.append(p)
    cols = [name, "count"] + [f"E{k}" for k in range(levels)]
    rows = []
    for v, p in zip(values, points):
        result, spec_rows = _spectrum_rows(model, p, levels)
        energies = [e for _, e in spec_rows]
        rows.append([v, result.count] + energies + [None] * (levels - len(energies)))
    base = {k: x for k, x in points[0].items() if k != name}
    meta = {"verb": "sweep", "model": model.id, "params": base, "sweep": name}
    return Table(meta, cols, rows)


COMMANDS = {
    "list": cmd_list,
    "spectrum": cmd_spectrum,
    "wavefunction": cmd_wavefunction,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
}


# -- entry point -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pdm", description="Exactly solvable position-dependent-mass models: spectra, wavefunctions, checks."
    )
    parser.add_argument("verb", choices=VERBS)
    parser.add_argument("--model", help="catalog model id (see 'pdm list')")
    parser.add_argument("--param", action="append", metavar="NAME=VALUE", help="model parameter (repeatable)")
    parser.add_argument("--xi", type=float, help="ordering parameter xi (default 0)")
    parser.add_argument("--zeta", type=float, help="ordering parameter zeta (default 0)")
    parser.add_argument("--n", type=int, help="level index for 'wavefunction'")
    parser.add_argument("--levels", type=int, help=f"number of levels (default {DEFAULT_LEVELS})")
    parser.add_argument("--grid", type=int,
                        help=f"grid size: samples for 'wavefunction' (default {DEFAULT_SAMPLES}), "
                             f"intervals for 'verify' (default {DEFAULT_GRID})")
    parser.add_argument("--tol", type=float, help=f"relative tolerance for 'verify' (default {DEFAULT_TOL:g})")
    parser.add_argument("--format", choices=FORMATS, help="output format (default plain)")
    parser.add_argument("--out", help="write output to this file instead of stdout")
    parser.add_argument("--config", help="key=value configuration file; flags win on conflict")
    parser.add_argument("--sweep", metavar="NAME=V1,V2,...|NAME=START:STOP:COUNT",
                        help="swept parameter for 'sweep'")
    parser.add_argument("--corrupt-spectrum", type=float, help=argparse.SUPPRESS)
    return parser


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed the usage message
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = build_config(args)
        table = COMMANDS[cfg.verb](cfg)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"pdm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParameterError as exc:
        print(f"pdm: constraint violation: {exc}", file=sys.stderr)
        return EXIT_CONSTRAINT
    except PDMError as exc:
        print(f"pdm: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VERIFY if args.verb == "verify" else EXIT_CONSTRAINT
    _emit(table.render(cfg.format), cfg.out)
    if getattr(table, "passed", True) is False:
        print("pdm: verification failed", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
