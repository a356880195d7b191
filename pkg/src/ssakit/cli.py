"""Command-line interface: simulate, ssa, diagnose, screeplot, evaluate.

Every command is deterministic given its flags; seeds are explicit.  Options
may also come from a plain ``key=value`` config file (``--config``), with
command-line flags taking precedence.  Exit codes: 0 success, 1 usage error,
2 data or numeric error.  With ``--json``, errors go to stderr as a JSON
object instead of plain text.
"""

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .evaluation import (
    DEFAULT_COMB_LAGS,
    DEFAULT_COR_LAG,
    DEFAULT_K_GRID,
    DEFAULT_T_GRID,
    METHODS,
    aggregate_results,
    run_experiment,
    write_aggregate_csv,
    write_results_csv,
)
from .moments import SingularCovarianceError, interval_diagnostics
from .series import (
    CsvFormatError,
    custom_segmentation,
    equal_segmentation,
    format_float,
    read_csv,
    write_csv,
)
from .simulation import MIN_SCENARIO_LENGTH, SETTINGS, make_setting
from .ssa import SsaResult, screeplot_data, ssa_comb, ssa_single, transform
from .svgplot import render_diagnostics_svg, render_screeplot_svg

__all__ = ["main"]


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class Opt:
    """One CLI option: name doubles as the config-file key."""

    name: str
    kind: str  # int | str | ints | strs | flag
    default: object = None
    required: bool = False
    help: str = ""

    @property
    def flag(self):
        return "--" + self.name.replace("_", "-")


_COMMON = (
    Opt("out", "str", default=".", help="output directory (created if missing)"),
    Opt("config", "str", help="key=value file supplying option defaults"),
    Opt("json", "flag", default=False, help="machine-readable errors on stderr"),
    Opt("verbose", "flag", default=False, help="progress notes on stderr"),
)

_SEGMENT = (
    Opt("K", "int", help="number of equal-length intervals"),
    Opt("breakpoints", "ints",
        help="comma-separated start indices of intervals 2..K (1-based)"),
)

SCHEMAS = {
    "simulate": (
        Opt("setting", "int", required=True, help="scenario id in 1..4"),
        Opt("T", "int", required=True, help="series length"),
        Opt("seed", "int", required=True, help="generator seed"),
    ) + _COMMON,
    "ssa": (
        Opt("in", "str", required=True, help="input series CSV"),
        Opt("method", "str", required=True,
            help="one of " + ", ".join(METHODS)),
        Opt("k", "int", default=1, help="number of nonstationary components"),
        Opt("lags", "ints", default=(1,),
            help="autocovariance lags (one unless method=comb)"),
        Opt("center", "str", default="interval",
            help="interval moment centering: interval or global"),
    ) + _SEGMENT + _COMMON,
    "diagnose": (
        Opt("in", "str", required=True, help="input series CSV"),
        Opt("lag", "int", default=1, help="autocovariance lag"),
        Opt("plot", "flag", default=False, help="also render an SVG figure"),
    ) + _SEGMENT + _COMMON,
    "screeplot": (
        Opt("in", "str", required=True, help="result JSON produced by ssa"),
        Opt("plot", "flag", default=False, help="also render an SVG figure"),
    ) + _COMMON,
    "evaluate": (
        Opt("settings", "ints", default=(1, 2, 3, 4), help="scenario ids"),
        Opt("methods", "strs", default=METHODS, help="estimators to score"),
        Opt("T_grid", "ints", default=DEFAULT_T_GRID, help="series lengths"),
        Opt("K_grid", "ints", default=DEFAULT_K_GRID, help="interval counts"),
        Opt("replicates", "int", default=100, help="replicates per cell"),
        Opt("seed", "int", required=True, help="master seed"),
        Opt("cor_lag", "int", default=DEFAULT_COR_LAG,
            help="lag used by the cor estimator"),
        Opt("comb_lags", "ints", default=DEFAULT_COMB_LAGS,
            help="lags used by the comb estimator"),
        Opt("center", "str", default="interval",
            help="interval moment centering: interval or global"),
    ) + _COMMON,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser():
    parser = _Parser(prog="ssakit", description=__doc__.splitlines()[0])
    subs = parser.add_subparsers(dest="command", metavar="command")
    for command, schema in SCHEMAS.items():
        sub = subs.add_parser(command, add_help=True)
        for opt in schema:
            if opt.kind == "flag":
                sub.add_argument(opt.flag, dest=opt.name, action="store_const",
                                 const=True, default=None, help=opt.help)
            else:
                sub.add_argument(opt.flag, dest=opt.name, default=None,
                                 help=opt.help)
    return parser


def _coerce(opt, value):
    if isinstance(value, str):
        try:
            if opt.kind == "int":
                return int(value)
            if opt.kind == "ints":
                return tuple(int(v) for v in value.split(",") if v.strip())
            if opt.kind == "strs":
                return tuple(v.strip() for v in value.split(",") if v.strip())
            if opt.kind == "flag":
                if value.lower() in ("1", "true", "yes"):
                    return True
                if value.lower() in ("0", "false", "no"):
                    return False
                raise ValueError(value)
        except ValueError:
            raise UsageError(f"invalid value for {opt.flag}: {value!r}") from None
    return value


def _read_config(path):
    values = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from None
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values


def _resolve(schema, namespace):
    """Merge CLI values, config values and builtin defaults."""
    options = {}
    config = {}
    if getattr(namespace, "config", None):
        config = _read_config(namespace.config)
    by_name = {opt.name: opt for opt in schema}
    unknown = set(config) - set(by_name)
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    for opt in schema:
        value = getattr(namespace, opt.name)
        if value is None and opt.name in config:
            value = config[opt.name]
        value = _coerce(opt, value)
        if value is None:
            if opt.required:
                raise UsageError(f"{opt.flag} is required")
            value = opt.default
        options[opt.name] = value
    return options


def _positive(options, key, minimum=1, each=False):
    values = options[key] if each else (options[key],)
    for v in values:
        if v < minimum:
            flag = "--" + key.replace("_", "-")
            raise UsageError(f"{flag} values must be at least {minimum}, got {v}")


def _validate(command, options):
    if command == "simulate":
        if options["setting"] not in SETTINGS:
            raise UsageError(f"--setting must be in {sorted(SETTINGS)}")
        _positive(options, "T", MIN_SCENARIO_LENGTH)
    elif command in ("ssa", "diagnose"):
        if (options["K"] is None) == (options["breakpoints"] is None):
            raise UsageError("exactly one of --K and --breakpoints is required")
        if options["K"] is not None:
            _positive(options, "K", 2)
        if command == "ssa":
            if options["method"] not in METHODS:
                raise UsageError(f"--method must be one of {', '.join(METHODS)}")
            _positive(options, "k", 1)
            if not options["lags"]:
                raise UsageError("--lags must name at least one lag")
            _positive(options, "lags", 1, each=True)
            if options["method"] != "comb" and len(options["lags"]) != 1:
                raise UsageError(
                    f"method {options['method']} uses a single lag; "
                    "multiple --lags need method comb"
                )
            if options["center"] not in ("interval", "global"):
                raise UsageError("--center must be interval or global")
        else:
            _positive(options, "lag", 1)
    elif command == "evaluate":
        for key, allowed in (("settings", set(SETTINGS)), ("methods", set(METHODS))):
            if not options[key] or set(options[key]) - allowed:
                raise UsageError(
                    f"--{key} must be a non-empty subset of "
                    f"{sorted(allowed)}"
                )
        if not options["T_grid"] or not options["K_grid"]:
            raise UsageError("--T-grid and --K-grid must be non-empty")
        _positive(options, "T_grid", MIN_SCENARIO_LENGTH, each=True)
        _positive(options, "K_grid", 2, each=True)
        _positive(options, "replicates", 1)
        _positive(options, "cor_lag", 1)
        _positive(options, "comb_lags", 1, each=True)
        if options["center"] not in ("interval", "global"):
            raise UsageError("--center must be interval or global")


def _outdir(options):
    path = Path(options["out"])
    path.mkdir(parents=True, exist_ok=True)
    return path


def _note(options, message):
    if options["verbose"]:
        print(message, file=sys.stderr)


def _segmentation(options, n_samples):
    if options["breakpoints"] is not None:
        return custom_segmentation(n_samples, options["breakpoints"])
    return equal_segmentation(n_samples, options["K"])


def cmd_simulate(options):
    scenario = make_setting(options["setting"], options["T"], options["seed"])
    out = _outdir(options)
    write_csv(scenario.observed, out / "observed.csv")
    (out / "manifest.json").write_text(scenario.to_manifest() + "\n",
                                       encoding="utf-8")
    _note(options, f"wrote {out / 'observed.csv'} and {out / 'manifest.json'}")


def cmd_ssa(options):
    series = read_csv(options["in"])
    segmentation = _segmentation(options, series.n_samples)
    k = options["k"]
    if options["method"] == "sir" and segmentation.n_intervals <= k:
        print(
            f"warning: method sir needs more intervals than nonstationary "
            f"components; K={segmentation.n_intervals} with k={k} cannot "
            f"separate the full subspace",
            file=sys.stderr,
        )
    if options["method"] == "comb":
        result = ssa_comb(series, segmentation, k, lags=options["lags"],
                          center=options["center"])
    else:
        result = ssa_single(series, segmentation, options["method"], k,
                            lag=options["lags"][0], center=options["center"])
    for message in result.warnings:
        print(f"warning: {message}", file=sys.stderr)
    out = _outdir(options)
    (out / "result.json").write_text(result.to_json() + "\n", encoding="utf-8")
    write_csv(transform(result, series), out / "components.csv")
    if result.method == "comb":
        table = np.atleast_2d(result.eigen_table)
        header = "matrix," + ",".join(f"d_{j + 1}" for j in range(result.p))
        lines = [header]
        for label, row in zip(result.row_labels, table):
            lines.append(label + "," + ",".join(format_float(v) for v in row))
        (out / "pseudo_eigenvalues.csv").write_text("\n".join(lines) + "\n",
                                                    encoding="utf-8")
    _note(options, f"wrote estimation outputs to {out}")


def cmd_diagnose(options):
    series = read_csv(options["in"])
    segmentation = _segmentation(options, series.n_samples)
    lag = options["lag"]
    diagnostics = interval_diagnostics(series, segmentation, lag)
    out = _outdir(options)
    columns = ("channel", "interval_index", "start", "end", "mean", "variance",
               "autocov")
    header = ("channel,interval,start,end,mean,variance," f"autocov_lag_{lag}")
    lines = [header]
    for row in diagnostics:
        cells = [
            str(row[c]) if c in ("channel", "interval_index", "start", "end")
            else format_float(row[c])
            for c in columns
        ]
        lines.append(",".join(cells))
    (out / "interval_stats.csv").write_text("\n".join(lines) + "\n",
                                            encoding="utf-8")
    if options["plot"]:
        (out / "diagnostics.svg").write_text(
            render_diagnostics_svg(diagnostics, lag), encoding="utf-8")
    _note(options, f"wrote interval diagnostics to {out}")


def cmd_screeplot(options):
    result = SsaResult.from_json(Path(options["in"]).read_text(encoding="utf-8"))
    pairs = screeplot_data(result)
    out = _outdir(options)
    lines = ["component,value"]
    for index, value in pairs:
        lines.append(f"{index},{format_float(value)}")
    (out / "screeplot.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    if options["plot"]:
        (out / "screeplot.svg").write_text(render_screeplot_svg(pairs),
                                           encoding="utf-8")
    _note(options, f"wrote screeplot data to {out}")


def cmd_evaluate(options):
    _note(options, "running benchmark grid (this can take a while)")
    rows = run_experiment(
        settings=options["settings"],
        methods=options["methods"],
        T_grid=options["T_grid"],
        K_grid=options["K_grid"],
        replicates=options["replicates"],
        seed=options["seed"],
        cor_lag=options["cor_lag"],
        comb_lags=options["comb_lags"],
        center=options["center"],
    )
    out = _outdir(options)
    write_results_csv(rows, out / "results.csv")
    write_aggregate_csv(aggregate_results(rows), out / "aggregate.csv")
    _note(options, f"wrote {out / 'results.csv'} and {out / 'aggregate.csv'}")


_COMMANDS = {
    "simulate": cmd_simulate,
    "ssa": cmd_ssa,
    "diagnose": cmd_diagnose,
    "screeplot": cmd_screeplot,
    "evaluate": cmd_evaluate,
}


def _emit_error(kind, message, as_json):
    if as_json:
        print(json.dumps({"error": kind, "message": message}, sort_keys=True),
              file=sys.stderr)
    else:
        print(f"ssakit: error: {message}", file=sys.stderr)


def main(argv=None):
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    as_json = "--json" in argv
    try:
        namespace = _build_parser().parse_args(argv)
        if namespace.command is None:
            raise UsageError("a command is required (see ssakit --help)")
        options = _resolve(SCHEMAS[namespace.command], namespace)
        as_json = options["json"]
        _validate(namespace.command, options)
    except UsageError as exc:
        _emit_error("usage", str(exc), as_json)
        return 1
    try:
        _COMMANDS[namespace.command](options)
    except (CsvFormatError, SingularCovarianceError, ValueError,
            ArithmeticError, OSError, np.linalg.LinAlgError) as exc:
        _emit_error(type(exc).__name__, str(exc), as_json)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
