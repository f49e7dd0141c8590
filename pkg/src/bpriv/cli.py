"""Command-line entry point: ``bpriv {sweep,optimize,verify,plot}``.

Configuration is resolved as defaults < ``--config`` file < ``BPRIV_*`` environment
variables < command-line flags. The config file holds flat ``key=value`` lines
(``#`` starts a comment); keys are the long flag names with ``-`` or ``_``.

Exit codes: 0 success, 1 verification failure, 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from dataclasses import asdict, dataclass, field, fields

from bpriv import __version__
from bpriv.channel import ChannelParams, InputPolicy, max_entanglement
from bpriv.errors import OracleRegimeError
from bpriv.plotting import CsvFormatError, fmt, plot_sweep, write_sweep_csv
from bpriv.privacy import SweepGrid, maximize_over_r, sweep

ENV_PREFIX = "BPRIV_"


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    eta: list = field(default_factory=lambda: [0.8])
    s: list = field(default_factory=lambda: [0.0, 1.0, 2.0, 3.0])
    n_eff: list = field(default_factory=lambda: [2.0])
    r: list = field(default_factory=lambda: [0.0, 0.3])
    r_min: float | None = None
    r_max: float | None = None
    r_steps: int = 229
    n_uses: int = 2
    d: int = 12
    quad: int = 7
    oracle: bool = False
    oracle_tol: float = 5e-3
    tuples: int = 200
    seed: int = 0
    grid_points: int = 201
    workers: int = 1
    trace: str | None = None
    out: str | None = None

    def header(self, command: str) -> dict:
        items = {k: _render(v) for k, v in asdict(self).items()}
        items["command"] = command
        items["version"] = __version__
        return items


# subcommand-specific defaults layered on top of RunConfig's
COMMAND_DEFAULTS = {
    "verify": {"eta": [0.3, 0.7], "s": [0.0, 0.3], "n_eff": [0.5]},
    "optimize": {"s": [0.0]},
}

LIST_KEYS = {"eta", "s", "n_eff", "r"}


def _render(v) -> str:
    if isinstance(v, list):
        return ",".join(fmt(float(x)) for x in v)
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return fmt(v)
    return str(v)


def _coerce(key: str, raw):
    types = {f.name: f.type for f in fields(RunConfig)}
    if key not in types:
        raise UsageError(f"unknown configuration key {key!r}")
    if not isinstance(raw, str):
        return raw
    raw = raw.strip()
    try:
        if key in LIST_KEYS:
            values = [float(x) for x in raw.split(",") if x.strip()]
            if not values:
                raise ValueError("empty list")
            return values
        t = types[key]
        if t == "bool":
            if raw.lower() in ("1", "true", "yes", "on"):
                return True
            if raw.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(f"not a boolean: {raw!r}")
        if "None" in t and raw == "":
            return None
        if t.startswith("int"):
            return int(raw)
        if t.startswith("float"):
            return float(raw)
        return raw
    except ValueError as exc:
        raise UsageError(f"invalid value for {key!r}: {exc}") from None


def read_config_file(path) -> dict:
    values = {}
    try:
        with open(path) as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                key, sep, value = line.partition("=")
                if not sep:
                    raise UsageError(f"{path}:{lineno}: expected key=value")
                key = key.strip().replace("-", "_")
                values[key] = _coerce(key, value)
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from None
    return values


def resolve_config(command: str, args: argparse.Namespace, environ=None) -> RunConfig:
    environ = os.environ if environ is None else environ
    cfg = asdict(RunConfig())
    cfg.update(COMMAND_DEFAULTS.get(command, {}))
    if getattr(args, "config", None):
        cfg.update(read_config_file(args.config))
    for name, value in environ.items():
        if name.startswith(ENV_PREFIX):
            key = name[len(ENV_PREFIX):].lower()
            cfg[key] = _coerce(key, value)
    for key in cfg:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = _coerce(key, value)
    return RunConfig(**cfg)


def _open_out(path):
    if path in (None, "", "-"):
        return sys.stdout, False
    try:
        return open(path, "w", newline=""), True
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}") from None


def _validate_params(cfg: RunConfig):
    for eta in cfg.eta:
        if not 0.0 <= eta <= 1.0:
            raise UsageError(f"eta: value {eta} outside [0, 1]")
    for n_eff in cfg.n_eff:
        if n_eff < 0:
            raise UsageError(f"n_eff: value {n_eff} is negative")
    if cfg.n_uses < 2:
        raise UsageError(f"n_uses: must be >= 2, got {cfg.n_uses}")


def cmd_sweep(cfg: RunConfig) -> int:
    _validate_params(cfg)
    widest = max_entanglement(max(cfg.n_eff))
    r_min = -widest if cfg.r_min is None else cfg.r_min
    r_max = widest if cfg.r_max is None else cfg.r_max
    if cfg.r_steps < 1:
        raise UsageError(f"r_steps: must be >= 1, got {cfg.r_steps}")
    if r_max < r_min:
        raise UsageError(f"r_max: {r_max} is below r_min {r_min}")
    grid = SweepGrid(cfg.eta, cfg.s, cfg.n_eff, r_min, r_max, cfg.r_steps, cfg.n_uses)
    rows = sweep(grid, workers=cfg.workers)
    header = cfg.header("sweep")
    header["r_min"], header["r_max"] = fmt(r_min), fmt(r_max)
    stream, close = _open_out(cfg.out)
    try:
        write_sweep_csv(stream, rows, header)
    finally:
        if close:
            stream.close()
    return 0


def cmd_optimize(cfg: RunConfig) -> int:
    _validate_params(cfg)
    stream, close = _open_out(cfg.out)
    trace_rows = []
    try:
        for key, value in sorted(cfg.header("optimize").items()):
            stream.write(f"# {key}={value}\n")
        for eta in cfg.eta:
            for s in cfg.s:
                for n_eff in cfg.n_eff:
                    params = ChannelParams(eta, s, cfg.n_uses)
                    trace = []
                    r_star, rep = maximize_over_r(params, n_eff, grid_points=cfg.grid_points, trace=trace)
                    trace_rows.extend((eta, s, n_eff, r, y) for r, y in trace)
                    stream.write(
                        f"eta={fmt(eta)} s={fmt(s)} n_eff={fmt(n_eff)} r_star={fmt(r_star)} "
                        f"i_p={fmt(rep.i_p)} n={fmt(rep.policy.n)} chi_out={fmt(rep.chi_out)} "
                        f"chi_eve={fmt(rep.chi_eve)}\n"
                    )
                    for name, spec in rep.spectra.items():
                        stream.write(f"  spectrum_{name}=" + ",".join(fmt(float(v)) for v in spec) + "\n")
    finally:
        if close:
            stream.close()
    if cfg.trace:
        tstream, tclose = _open_out(cfg.trace)
        try:
            writer = csv.writer(tstream, lineterminator="\n")
            writer.writerow(("eta", "s", "n_eff", "r", "i_p"))
            for row in trace_rows:
                writer.writerow([fmt(x) for x in row])
        finally:
            if tclose:
                tstream.close()
    return 0


def cmd_verify(cfg: RunConfig) -> int:
    from bpriv import verify

    _validate_params(cfg)
    results = verify.closed_form_suite(cfg.tuples, cfg.seed)
    results += verify.symmetry_suite(seed=cfg.seed + 1)
    if cfg.n_uses > 2:
        results += verify.n_use_suite(cfg.n_uses, seed=cfg.seed + 2)
    if cfg.oracle:
        from bpriv.fock import check_oracle_regime

        points = []
        for eta in cfg.eta:
            for n_eff in cfg.n_eff:
                for r in cfg.r:
                    for s in cfg.s:
                        try:
                            policy = InputPolicy(r, n_eff)
                            params = ChannelParams(eta, s)
                            check_oracle_regime(policy, params, cfg.d, cfg.quad)
                        except (OracleRegimeError, ValueError) as exc:
                            raise UsageError(f"oracle regime: {exc}") from None
                        points.append((policy, params))
        results += verify.oracle_suite(points, cfg.d, cfg.quad, cfg.oracle_tol, workers=cfg.workers)
    stream, close = _open_out(cfg.out)
    try:
        for key, value in sorted(cfg.header("verify").items()):
            stream.write(f"# {key}={value}\n")
        for res in results:
            stream.write(res.line() + "\n")
        failed = [r for r in results if not r.informational and not r.passed]
        stream.write(f"overall={'FAIL' if failed else 'PASS'} suites={len(results)} failed={len(failed)}\n")
    finally:
        if close:
            stream.close()
    return 1 if failed else 0


def cmd_plot(csv_path: str, cfg: RunConfig) -> int:
    out_dir = cfg.out or "."
    try:
        written = plot_sweep(csv_path, out_dir)
    except CsvFormatError as exc:
        raise UsageError(f"malformed CSV: {exc}") from None
    except OSError as exc:
        raise UsageError(str(exc)) from None
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    for path in written:
        print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value configuration file")
    common.add_argument("--eta", help="comma-separated transmissivities")
    common.add_argument("--s", help="comma-separated memory parameters")
    common.add_argument("--n-eff", dest="n_eff", help="comma-separated photon budgets")
    common.add_argument("--r", help="comma-separated entanglement values (verify --oracle points)")
    common.add_argument("--r-min", dest="r_min", help="lower end of the r grid")
    common.add_argument("--r-max", dest="r_max", help="upper end of the r grid")
    common.add_argument("--r-steps", dest="r_steps", help="number of r grid points")
    common.add_argument("--n-uses", dest="n_uses", help="number of channel uses")
    common.add_argument("--d", help="Fock cutoff per mode")
    common.add_argument("--quad", help="Gauss-Hermite order per real dimension")
    common.add_argument("--oracle", action="store_const", const="true", help="run the Fock oracle suite")
    common.add_argument("--oracle-tol", dest="oracle_tol", help="oracle |dI_p| tolerance")
    common.add_argument("--tuples", help="random tuples for the closed-form suite")
    common.add_argument("--seed", help="seed for random test tuples")
    common.add_argument("--grid-points", dest="grid_points", help="coarse grid size for optimize")
    common.add_argument("--workers", help="threads for sweep/oracle evaluation")
    common.add_argument("--trace", help="CSV path for the optimizer trace")
    common.add_argument("--out", help="output file (sweep/optimize/verify) or directory (plot)")

    parser = argparse.ArgumentParser(prog="bpriv", description="Privacy of a lossy bosonic memory channel")
    parser.add_argument("--version", action="version", version=f"bpriv {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("sweep", parents=[common], help="I_p over an (eta, s, n_eff, r) grid to CSV")
    sub.add_parser("optimize", parents=[common], help="maximize I_p over r")
    sub.add_parser("verify", parents=[common], help="closed-form, symmetry and oracle suites")
    plot = sub.add_parser("plot", parents=[common], help="SVG plots from a sweep CSV")
    plot.add_argument("csv", help="CSV produced by 'bpriv sweep'")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args.command, args)
        if args.command == "sweep":
            return cmd_sweep(cfg)
        if args.command == "optimize":
            return cmd_optimize(cfg)
        if args.command == "verify":
            return cmd_verify(cfg)
        return cmd_plot(args.csv, cfg)
    except UsageError as exc:
        print(f"bpriv {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
