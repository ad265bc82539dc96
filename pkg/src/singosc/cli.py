"""Command-line interface.

Every command writes a delimited table (CSV by default) with a header row;
diagnostics go to comment lines starting with ``#``.  Options can come from
an INI-style ``--config`` file with ``[model]``, ``[profile]``, ``[task]``
and ``[output]`` sections; command-line flags override it.

Exit codes: 0 ok, 2 configuration error, 3 solver or oracle failure,
4 domain error (``rho`` out of range, generating-function pole).
"""

from __future__ import annotations

import argparse
import configparser
import sys

import numpy as np

from . import oracle, reflection, transitions
from .errors import (
    AsymptoteNotReached,
    CollapseError,
    PoleError,
    RangeError,
    SingularOscillatorError,
    SolverError,
)
from .reflection import FrequencyProfile, SolverSettings, load_profile_table
from .su11 import make_model

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_DOMAIN = 0, 2, 3, 4

# option name -> (config section, parser)
_FIELDS = {
    "g": ("model", float),
    "allow_boundary": ("model", "bool"),
    "kind": ("profile", str),
    "omega": ("profile", float),
    "omega_minus": ("profile", float),
    "omega_plus": ("profile", float),
    "tau": ("profile", float),
    "t_start": ("profile", float),
    "t_end": ("profile", float),
    "t_center": ("profile", float),
    "table": ("profile", str),
    "rho": ("task", float),
    "m": ("task", int),
    "n": ("task", int),
    "max": ("task", int),
    "max_m": ("task", int),
    "max_n": ("task", int),
    "z": ("task", str),
    "level_omega": ("task", float),
    "tol": ("task", float),
    "basis_size": ("task", int),
    "format": ("output", str),
    "out": ("output", str),
    "precision": ("output", int),
}


class ConfigError(SingularOscillatorError):
    pass


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    d = argparse.SUPPRESS
    g = common.add_argument_group("global")
    g.add_argument("--config", default=d, help="INI-style configuration file")
    g.add_argument("--format", choices=("csv", "tsv"), default=d)
    g.add_argument("--out", default=d, help="write output to this path instead of stdout")
    g.add_argument("--precision", type=int, default=d, help="significant digits (default 17)")
    mdl = common.add_argument_group("model")
    mdl.add_argument("--g", type=float, default=d, help="inverse-square coupling, g > -1")
    mdl.add_argument("--allow-boundary", action="store_true", default=d, help="admit g = -1")
    prof = common.add_argument_group("profile")
    prof.add_argument("--profile", dest="kind", choices=reflection.KINDS, default=d)
    prof.add_argument("--omega", type=float, default=d, help="frequency of a constant profile")
    prof.add_argument("--omega-minus", type=float, default=d)
    prof.add_argument("--omega-plus", type=float, default=d)
    prof.add_argument("--tau", type=float, default=d, help="switching time (tanh) or ramp width (jump)")
    prof.add_argument("--t-start", type=float, default=d)
    prof.add_argument("--t-end", type=float, default=d)
    prof.add_argument("--t-center", type=float, default=d)
    prof.add_argument("--table", default=d, help="two-column 't omega' profile file")
    task = common.add_argument_group("task")
    task.add_argument("--rho", type=float, default=d, help="use this rho instead of a profile")
    task.add_argument("--m", type=int, default=d, help="initial level")
    task.add_argument("--n", type=int, default=d, help="final level")
    task.add_argument("--max", type=int, default=d, help="largest m and n")
    task.add_argument("--max-m", type=int, default=d)
    task.add_argument("--max-n", type=int, default=d)
    task.add_argument("--z", default=d, help="comma-separated sample points (Python complex syntax)")
    task.add_argument("--level-omega", type=float, default=d, help="frequency for 'levels'")
    task.add_argument("--tol", type=float, default=d, help="verify tolerance (default 1e-4)")
    task.add_argument("--basis-size", type=int, default=d, help="oracle truncation N (default 200)")

    parser = argparse.ArgumentParser(prog="singosc", parents=[common],
                                     description="Singular oscillator transition probabilities.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in [
        ("rho", "reflection parameter from the classical trajectory"),
        ("levels", "instantaneous energy levels"),
        ("wmn", "single transition probability"),
        ("table", "transition probability table"),
        ("gen", "generating functions G_0, G_1"),
        ("invariant", "adiabatic invariant ratio"),
        ("verify", "closed form against Schrodinger propagation"),
    ]:
        sub.add_parser(name, parents=[common], help=text)
    return parser


def _parse_bool(text: str) -> bool:
    value = text.strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _read_config(path: str) -> dict:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {' '.join(str(exc).split())}") from None
    known_sections = {sec for sec, _ in _FIELDS.values()}
    out = {}
    for section in cp.sections():
        if section not in known_sections:
            raise ConfigError(f"{path}: unknown section [{section}]")
        for key, raw in cp.items(section):
            field = _FIELDS.get(key)
            if field is None or field[0] != section:
                raise ConfigError(f"{path}: [{section}] {key}: unknown field")
            conv = _parse_bool if field[1] == "bool" else field[1]
            try:
                out[key] = conv(raw)
            except ValueError:
                raise ConfigError(f"{path}: [{section}] {key}: invalid value {raw!r}") from None
    return out


def _options(args: argparse.Namespace) -> dict:
    flags = vars(args)
    opts = _read_config(flags["config"]) if "config" in flags else {}
    opts.update({k: v for k, v in flags.items() if k not in ("config", "command")})
    if "max" in opts:
        opts.setdefault("max_m", opts["max"])
        opts.setdefault("max_n", opts["max"])
    if opts.get("format", "csv") not in ("csv", "tsv"):
        raise ConfigError(f"[output] format: expected csv or tsv, got {opts['format']!r}")
    if opts.get("precision", 17) < 1:
        raise ConfigError("[output] precision: must be a positive integer")
    return opts


def _require(opts: dict, key: str):
    if key not in opts:
        section = _FIELDS[key][0]
        raise ConfigError(f"[{section}] {key}: required (flag --{key.replace('_', '-')})")
    return opts[key]


def _model(opts):
    g = _require(opts, "g")
    try:
        return make_model(g, allow_boundary=bool(opts.get("allow_boundary", False)))
    except CollapseError as exc:
        raise ConfigError(f"[model] g: {exc}") from None


def _profile(opts) -> FrequencyProfile:
    kind = opts.get("kind")
    window = {k: opts[k] for k in ("t_start", "t_end") if k in opts}
    try:
        if "table" in opts:
            kind = kind or "table"
            if kind not in ("table", "piecewise_linear"):
                raise ConfigError(f"[profile] kind: {kind!r} cannot be read from a table file")
            return load_profile_table(opts["table"], kind=kind, **window)
        if kind is None:
            raise ConfigError("[profile] kind: required when rho is not given (flag --profile)")
        center = opts.get("t_center", 0.0)
        if kind == "constant":
            omega = opts.get("omega", opts.get("omega_minus"))
            if omega is None:
                raise ConfigError("[profile] omega: required for a constant profile")
            return FrequencyProfile.constant(omega, **window)
        wm, wp = _require(opts, "omega_minus"), _require(opts, "omega_plus")
        if kind == "sudden_jump":
            return FrequencyProfile.sudden_jump(wm, wp, t_jump=center, width=opts.get("tau", 0.0), **window)
        if kind == "tanh_step":
            return FrequencyProfile.tanh_step(wm, wp, _require(opts, "tau"), t_center=center, **window)
        raise ConfigError(f"[profile] kind: {kind!r} needs a --table file")
    except (ValueError, OSError) as exc:
        raise ConfigError(f"[profile] {exc}") from None


def _rho(opts) -> float:
    if "rho" in opts:
        return transitions.check_rho(opts["rho"])
    return reflection.compute_rho(_profile(opts)).rho


class _Writer:
    def __init__(self, opts):
        self.sep = "\t" if opts.get("format", "csv") == "tsv" else ","
        self.prec = opts.get("precision", 17)
        self.lines: list[str] = []

    def fmt(self, x) -> str:
        if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
            return str(int(x))
        if isinstance(x, str):
            return x
        return f"{float(x):.{self.prec}g}"

    def row(self, *values):
        self.lines.append(self.sep.join(self.fmt(v) for v in values))

    def comment(self, text: str):
        self.lines.append(f"# {text}")

    def text(self) -> str:
        return "".join(line + "\n" for line in self.lines)


def cmd_rho(opts, out: _Writer):
    res = reflection.compute_rho(_profile(opts))
    out.row("rho", "C_abs2", "D_abs2", "wronskian_defect", "solver_steps")
    out.row(res.rho, res.C_abs2, res.D_abs2, res.wronskian_defect, res.solver_steps)


def cmd_levels(opts, out: _Writer):
    model = _model(opts)
    omega = opts.get("level_omega", opts.get("omega", 1.0))
    if not omega > 0:
        raise ConfigError(f"[task] level_omega: must be positive, got {omega!r}")
    out.row("n", "E")
    for n in range(opts.get("max_n", 10) + 1):
        out.row(n, transitions.energy_level(model, n, omega))


def cmd_wmn(opts, out: _Writer):
    model = _model(opts)
    m, n = _require(opts, "m"), _require(opts, "n")
    rho = _rho(opts)
    out.row("m", "n", "w")
    out.row(m, n, transitions.transition_probability(model, m, n, rho))


def cmd_table(opts, out: _Writer):
    model = _model(opts)
    rho = _rho(opts)
    max_n = opts.get("max_n", 10)
    if "m" in opts:
        rows = [opts["m"]]
    else:
        rows = range(opts.get("max_m", 10) + 1)
    table = transitions.build_table(model, rho, max(rows), max_n)
    out.row("m", "n", "w")
    for m in rows:
        for n in range(max_n + 1):
            w = table.w[m, n]
            if w != 0.0:
                # clamped for display only
                out.row(m, n, min(max(w, 0.0), 1.0))
    for m in rows:
        out.comment(f"tail_mass m={m} {out.fmt(table.row_tail_mass[m])}")


def _z_values(opts):
    raw = _require(opts, "z")
    try:
        return [complex(item.strip().replace(" ", "")) for item in raw.split(",") if item.strip()]
    except ValueError:
        raise ConfigError(f"[task] z: cannot parse {raw!r}") from None


def cmd_gen(opts, out: _Writer):
    model = _model(opts)
    rho = _rho(opts)
    m = opts.get("m", 0)
    funcs = {0: transitions.generating_g0, 1: transitions.generating_g1}
    if m not in funcs:
        raise ConfigError(f"[task] m: generating functions exist for m = 0, 1 only, got {m}")
    out.row("z_re", "z_im", "G_re", "G_im")
    for z in _z_values(opts):
        val = funcs[m](model, rho, z)
        out.row(z.real, z.imag, val.real, val.imag)


def cmd_invariant(opts, out: _Writer):
    model = _model(opts)
    rho = _rho(opts)
    m = opts.get("m", 0)
    diag = transitions.adiabatic_invariant_diagnostic(model, m, rho)
    out.row("m", "ratio", "summed", "residual")
    out.row(m, diag.closed_form, diag.summed, diag.residual)


def cmd_verify(opts, out: _Writer) -> int:
    model = _model(opts)
    profile = _profile(opts)
    m_max = opts.get("max_m", 5)
    n_max = opts.get("max_n", 5)
    tol = opts.get("tol", 1e-4)
    report = oracle.compare(model, profile, m_max, n_max, SolverSettings(),
                            basis_size=opts.get("basis_size", 200))
    out.row("m", "n", "w_numeric", "w_closed", "abs_diff")
    for m in range(m_max + 1):
        for n in range(n_max + 1):
            a, b = report.w_numeric[m, n], report.w_closed[m, n]
            out.row(m, n, a, b, abs(a - b))
    ok = report.max_abs_diff <= tol
    out.comment(f"rho {out.fmt(report.rho)}")
    out.comment(f"N {report.N}")
    out.comment(f"leakage {out.fmt(report.leakage)}")
    out.comment(f"max_abs_diff {out.fmt(report.max_abs_diff)}")
    out.comment(f"status {'pass' if ok else 'fail'} tol={out.fmt(tol)}")
    return EXIT_OK if ok else EXIT_SOLVER


COMMANDS = {
    "rho": cmd_rho,
    "levels": cmd_levels,
    "wmn": cmd_wmn,
    "table": cmd_table,
    "gen": cmd_gen,
    "invariant": cmd_invariant,
    "verify": cmd_verify,
}


def _fail(code: int, kind: str, exc: Exception) -> int:
    msg = " ".join(str(exc).split())
    print(f"singosc: {kind}: {type(exc).__name__}: {msg}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        opts = _options(args)
        out = _Writer(opts)
        code = COMMANDS[args.command](opts, out) or EXIT_OK
    except (RangeError, PoleError) as exc:
        return _fail(EXIT_DOMAIN, "domain error", exc)
    except (ConfigError, CollapseError, AsymptoteNotReached) as exc:
        return _fail(EXIT_CONFIG, "config error", exc)
    except SolverError as exc:
        return _fail(EXIT_SOLVER, "solver error", exc)
    except ValueError as exc:
        return _fail(EXIT_CONFIG, "config error", exc)
    text = out.text()
    if "out" in opts:
        with open(opts["out"], "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
