"""Command-line front end.

Usage:
    spectral-hirota deriv --alpha 0.5 --func gaussian --L 20 --n 2048 --compare-marchaud
    spectral-hirota bilinear --alpha 0.5 --func gaussian --func2 sech --form symbol
    spectral-hirota soliton --alpha 0.5 --k -1 --k -3 --out-dir run1/
    spectral-hirota kp --alpha 1 --k -1 --ell 0.5 --sigma 1
    spectral-hirota suite --alpha-sweep 0.1:1.0:0.1 --json report.json
    spectral-hirota limit-check --func gaussian --func2 sech
    spectral-hirota sobolev-probe --s 1 --alpha 0.5 --trials 100

Every subcommand accepts ``--config FILE`` with flat ``key = value`` lines;
flags given on the command line override the file. Exit codes: 0 ok, 1 gate
failure, 2 usage or configuration error, 3 numerical-quality flag in
``--strict`` mode.
"""

import argparse
import contextlib
import logging
import math
import sys
from collections.abc import Callable, Iterator, Sequence
from pathlib import Path
from typing import IO, Any

import anyio
import numpy as np

from ._errors import ConfigError, SpectralHirotaError
from ._internal.config import RunConfig, load_config_file
from ._internal.serialization import (
    dumps,
    read_csv_columns,
    residual_report_to_json,
    sobolev_report_to_json,
    suite_report_to_json,
    write_csv,
    write_json,
)
from ._version import __version__
from .bilinear import hirota_frac, sobolev_bound_probe
from .exp_sum import (
    ExpSum,
    bilinear_residual_symbolic,
    kp_one_soliton,
    soliton_params,
    tau_from_params,
)
from .functions import by_name, fits_box, sample_on_grid
from .grid import limit_convergence_check, spectral_frac_derivative
from .kdv import field_to_csv, pde_residual, u_from_tau
from .marchaud import marchaud_on_grid
from .suite import format_table, run_suite
from .types import (
    AnalyticFunction,
    BilinearForm,
    BilinearOperatorSpec,
    GridFunction,
    ProbeFamily,
    ProbeKind,
    ResidualReport,
    SpaceTimeGrid,
    SuiteOptions,
    grid_nodes,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_GATE = 1
EXIT_USAGE = 2
EXIT_QUALITY = 3

DEFAULT_HALF_LENGTH = 30.0
DEFAULT_N = 1024
DEFAULT_SOLITON_N = 256
CLOSED_FORM_TOL = 1e-10


class _UsageError(ConfigError):
    """A required setting is missing; reported with the usage line."""


def _require(value: Any, key: str) -> Any:
    if value is None:
        raise _UsageError("Missing required setting", key)
    return value


# Inputs


def _half_length(config: RunConfig, handle: AnalyticFunction | None) -> float:
    if config.half_length is not None:
        return config.half_length
    if handle is not None and handle.period is not None:
        return math.pi if fits_box(handle, math.pi) else handle.period / 2.0
    return DEFAULT_HALF_LENGTH


def _function_from_csv(path: Path | None) -> GridFunction:
    if path is None:
        raise ConfigError("from-csv needs an input file", "input")
    try:
        columns = read_csv_columns(path)
    except OSError as e:
        raise ConfigError(f"Cannot read input ({e.strerror})", str(path)) from e
    try:
        x = np.asarray(columns["x"])
        real = np.asarray(columns["f_re"] if "f_re" in columns else columns["f"])
    except KeyError as e:
        raise ConfigError(f"Input CSV lacks column {e}", str(path)) from e
    imag = np.asarray(columns.get("f_im", np.zeros_like(real)))
    half_length = -float(x[0])
    if half_length <= 0 or not np.allclose(x, grid_nodes(half_length, x.size)):
        raise ConfigError("x column is not a grid -L + jh on [-L, L)", str(path))
    return GridFunction(real + 1j * imag, half_length)


def _load_function(
    name: str, config: RunConfig
) -> tuple[GridFunction, AnalyticFunction | None]:
    if name == "from-csv":
        return _function_from_csv(config.input), None
    handle = by_name(name)
    grid_function = sample_on_grid(
        handle, _half_length(config, handle), config.n or DEFAULT_N
    )
    return grid_function, handle


def _bilinear_form(text: str) -> BilinearForm:
    match text:
        case "commutator":
            return "commutator"
        case "symbol":
            return "symbol"
        case "kernel":
            return "kernel"
        case _:
            raise ConfigError("form must be commutator, symbol or kernel", text)


def _probe_kind(text: str) -> ProbeKind:
    match text:
        case "band-limited":
            return "band-limited"
        case "single-mode":
            return "single-mode"
        case _:
            raise ConfigError("family must be band-limited or single-mode", text)


# Outputs


@contextlib.contextmanager
def _output(path: Path | None) -> Iterator[IO[str]]:
    if path is None:
        yield sys.stdout
        return
    with path.open("w", encoding="utf-8", newline="") as handle:
        yield handle


def _emit_columns(
    config: RunConfig, columns: dict[str, Any], meta: dict[str, Any]
) -> None:
    arrays = {name: np.asarray(values, dtype=np.float64) for name, values in columns.items()}
    with _output(config.out) as stream:
        match config.format:
            case "csv":
                write_csv(stream, list(arrays), zip(*arrays.values(), strict=True))
            case "json":
                document = {
                    "meta": meta,
                    "columns": {name: values.tolist() for name, values in arrays.items()},
                }
                stream.write(dumps(document))


def _write_run_dir(
    out_dir: Path,
    tau: ExpSum,
    u: Any,
    grid: SpaceTimeGrid,
    residual: ResidualReport,
    pde: ResidualReport | None,
) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    write_json(out_dir / "tau.json", tau.to_json())
    with (out_dir / "field.csv").open("w", encoding="utf-8", newline="") as stream:
        field_to_csv(u, grid, stream)
    write_json(out_dir / "residual.json", residual_report_to_json(residual))
    if pde is not None:
        write_json(out_dir / "pde_residual.json", residual_report_to_json(pde))
    logger.debug("Wrote soliton run to %s", out_dir)


def _report_soliton(
    config: RunConfig,
    tau: ExpSum,
    grid: SpaceTimeGrid,
    residual: ResidualReport,
    pde: ResidualReport | None,
    y: float = 0.0,
) -> int:
    u = u_from_tau(tau, grid, y)
    if config.out_dir is not None:
        _write_run_dir(config.out_dir, tau, u, grid, residual, pde)
    else:
        document: dict[str, Any] = {
            "tau": tau.to_json(),
            "residual": residual_report_to_json(residual),
        }
        if pde is not None:
            document["pde_residual"] = residual_report_to_json(pde)
        sys.stdout.write(dumps(document))
    failed = residual.passed is False or (pde is not None and pde.passed is False)
    return EXIT_GATE if failed else EXIT_OK


def _space_time_grid(config: RunConfig) -> SpaceTimeGrid:
    return SpaceTimeGrid(
        config.half_length or DEFAULT_HALF_LENGTH,
        config.n or DEFAULT_SOLITON_N,
        tuple(config.t),
    )


# Subcommands


def cmd_deriv(config: RunConfig) -> int:
    """Spectral D^alpha of a test function, optionally against Marchaud."""
    alpha = _require(config.alpha, "alpha")
    f, handle = _load_function(config.func, config)
    derivative = spectral_frac_derivative(f, alpha).values
    columns: dict[str, Any] = {
        "x": f.nodes,
        "d_re": derivative.real,
        "d_im": derivative.imag,
    }
    meta: dict[str, Any] = {"alpha": alpha, "L": f.half_length, "N": f.n, "func": config.func}
    quality_ok = True
    if config.compare_marchaud:
        if handle is None:
            raise ConfigError("Marchaud comparison needs an analytic test function", "func")
        if alpha >= 1.0:
            logger.warning("Marchaud form needs alpha < 1; comparison skipped")
        else:
            result = marchaud_on_grid(handle, f.half_length, f.n, alpha, config.quad)
            columns["marchaud_re"] = result.values.real
            columns["marchaud_im"] = result.values.imag
            columns["discrepancy"] = np.abs(result.values - derivative)
            meta["error_estimate"] = result.error_estimate
            meta["converged"] = result.converged
            quality_ok = result.converged
    _emit_columns(config, columns, meta)
    return EXIT_QUALITY if config.strict and not quality_ok else EXIT_OK


def cmd_bilinear(config: RunConfig) -> int:
    """Fractional Hirota operator of two test functions in one of its forms."""
    alpha = _require(config.alpha, "alpha")
    form = _bilinear_form(config.form)
    f, f_handle = _load_function(config.func, config)
    g, g_handle = _load_function(config.func2, config)
    quality_ok = True
    if form == "kernel":
        if f_handle is None or g_handle is None:
            raise ConfigError("the kernel form needs analytic test functions", "func")
        result = hirota_frac(
            f_handle,
            g_handle,
            alpha,
            "kernel",
            half_length=f.half_length,
            n=f.n,
            quad=config.quad,
        )
        if result.diagnostics is not None:
            quality_ok = result.diagnostics.converged
    else:
        result = hirota_frac(f, g, alpha, form)
    values = (
        result.values.values
        if isinstance(result.values, GridFunction)
        else np.asarray(result.values)
    )
    _emit_columns(
        config,
        {"x": f.nodes, "b_re": values.real, "b_im": values.imag},
        {"alpha": alpha, "form": form, "L": f.half_length, "N": f.n},
    )
    return EXIT_QUALITY if config.strict and not quality_ok else EXIT_OK


def cmd_soliton(config: RunConfig) -> int:
    """KdV one- or two-soliton tau-function, field and residuals."""
    alpha = _require(config.alpha, "alpha")
    if len(config.k) not in (1, 2):
        raise _UsageError("one or two wavenumbers required", "k")
    deltas = config.delta or [0.0] * len(config.k)
    params = soliton_params(config.k, deltas, alpha)
    tau = tau_from_params(params)
    residual = bilinear_residual_symbolic(BilinearOperatorSpec.kdv(), tau)
    grid = _space_time_grid(config)
    pde = pde_residual(tau, alpha, grid, config.quad) if config.pde_residual else None
    return _report_soliton(config, tau, grid, residual, pde)


def cmd_kp(config: RunConfig) -> int:
    """KP one-soliton tau-function, field at fixed y and symbolic residual."""
    alpha = _require(config.alpha, "alpha")
    if len(config.k) != 1:
        raise _UsageError("exactly one wavenumber required", "k")
    delta = config.delta[0] if config.delta else 0.0
    tau = kp_one_soliton(config.k[0], config.ell, config.sigma_sign, delta, alpha)
    residual = bilinear_residual_symbolic(BilinearOperatorSpec.kp(config.sigma_sign), tau)
    return _report_soliton(config, tau, _space_time_grid(config), residual, None, config.y)


def cmd_suite(config: RunConfig) -> int:
    """Acceptance battery."""
    options = SuiteOptions(
        seed=config.seed,
        alpha_sweep=list(config.alpha_sweep),
        quadrature=config.quad,
        max_workers=config.workers,
        include_diagnostics=config.diagnostics,
    )
    report = anyio.run(run_suite, options)
    print(format_table(report))
    if config.json is not None:
        write_json(config.json, suite_report_to_json(__version__, config.seed, report.checks))
    if not report.passed:
        for failure in report.failures:
            logger.error("Gate failed: %s (%s)", failure.name, failure.detail or failure.value)
        return EXIT_GATE
    return EXIT_OK


def cmd_limit_check(config: RunConfig) -> int:
    """H^(s-1) distance of D^alpha f.g from D f.g over a list of orders."""
    f, _ = _load_function(config.func, config)
    g, _ = _load_function(config.func2, config)
    rows = limit_convergence_check(f, g, config.s, config.alphas)
    _emit_columns(
        config,
        {"alpha": [r.alpha for r in rows], "distance": [r.distance for r in rows]},
        {"s": config.s, "L": f.half_length, "N": f.n},
    )
    return EXIT_OK


def cmd_sobolev_probe(config: RunConfig) -> int:
    """Empirical Sobolev bound ratio; gate on stability under refinement."""
    family = ProbeFamily(
        kind=_probe_kind(config.family),
        half_length=config.half_length or ProbeFamily().half_length,
    )
    alpha = config.alpha if config.alpha is not None else 0.5
    report = sobolev_bound_probe(
        family, config.s, alpha, config.trials, seed=config.seed, sizes=tuple(config.sizes)
    )
    with _output(config.out) as stream:
        stream.write(dumps(sobolev_report_to_json(report)))
    if not report.stable:
        return EXIT_GATE
    # single-mode ratios must match their closed form relative to the largest ratio
    scale = max(1.0, *report.max_ratio.values())
    error = report.closed_form_error
    quality_ok = error is None or error <= CLOSED_FORM_TOL * scale
    return EXIT_QUALITY if config.strict and not quality_ok else EXIT_OK


COMMANDS: dict[str, Callable[[RunConfig], int]] = {
    "deriv": cmd_deriv,
    "bilinear": cmd_bilinear,
    "soliton": cmd_soliton,
    "kp": cmd_kp,
    "suite": cmd_suite,
    "limit-check": cmd_limit_check,
    "sobolev-probe": cmd_sobolev_probe,
}


# Parser


def _add_grid(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--L", dest="L", help="half box length")
    parser.add_argument("--n", dest="n", help="grid points (power of two)")


def _add_output(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", help="output file (default stdout)")
    parser.add_argument("--format", choices=["csv", "json"])


def _add_quadrature(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("quadrature")
    for name in ("y0", "inner_nodes", "tail_nodes", "y_max", "inner_rule", "tolerance"):
        group.add_argument(f"--quad-{name.replace('_', '-')}", dest=f"quad.{name}")


def _add_soliton_grid(parser: argparse.ArgumentParser) -> None:
    _add_grid(parser)
    parser.add_argument(
        "--t", help="times as start:stop:count or comma list (use --t=-2:2:9)"
    )
    parser.add_argument("--delta", action="append", help="phase constant (repeatable)")
    parser.add_argument("--out-dir", help="write tau.json, field.csv, residual.json")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", help="flat key = value settings file")
    common.add_argument("--verbose", action="store_true", help="debug logging on stderr")
    common.add_argument(
        "--strict", action="store_true", help="exit 3 on numerical-quality flags"
    )

    parser = argparse.ArgumentParser(
        prog="spectral-hirota",
        description="Spectral fractional derivatives and fractional Hirota operators.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        return subparsers.add_parser(
            name,
            help=help_text,
            parents=[common],
            argument_default=argparse.SUPPRESS,
        )

    deriv = add("deriv", "spectral fractional derivative of a test function")
    deriv.add_argument("--alpha")
    deriv.add_argument("--func", help="gaussian | x-gaussian | sech | mode:k | from-csv")
    deriv.add_argument("--input", help="CSV with columns x, f_re[, f_im] for from-csv")
    deriv.add_argument("--compare-marchaud", action="store_true")
    _add_grid(deriv)
    _add_output(deriv)
    _add_quadrature(deriv)

    bilinear = add("bilinear", "fractional Hirota operator of two test functions")
    bilinear.add_argument("--alpha")
    bilinear.add_argument("--func")
    bilinear.add_argument("--func2")
    bilinear.add_argument("--form", choices=["commutator", "symbol", "kernel"])
    _add_grid(bilinear)
    _add_output(bilinear)
    _add_quadrature(bilinear)

    soliton = add("soliton", "KdV soliton tau-function, field and residuals")
    soliton.add_argument("--alpha")
    soliton.add_argument("--k", action="append", help="wavenumber (repeat for two)")
    soliton.add_argument("--pde-residual", action="store_true")
    _add_soliton_grid(soliton)
    _add_quadrature(soliton)

    kp = add("kp", "KP one-soliton tau-function and residual")
    kp.add_argument("--alpha")
    kp.add_argument("--k", action="append")
    kp.add_argument("--ell")
    kp.add_argument("--sigma", dest="sigma", help="+1 or -1")
    kp.add_argument("--y", help="transverse coordinate of the field slice")
    _add_soliton_grid(kp)

    suite = add("suite", "run the acceptance battery")
    suite.add_argument("--seed")
    suite.add_argument("--alpha-sweep", help="start:stop:step or comma list")
    suite.add_argument("--json", help="write the machine-readable report")
    suite.add_argument("--workers")
    suite.add_argument("--no-diagnostics", dest="diagnostics", action="store_false")
    _add_quadrature(suite)

    limit = add("limit-check", "distance to the classical Hirota derivative")
    limit.add_argument("--func")
    limit.add_argument("--func2")
    limit.add_argument("--s")
    limit.add_argument("--alphas", help="comma list of orders")
    _add_grid(limit)
    _add_output(limit)

    probe = add("sobolev-probe", "empirical Sobolev bound of the fractional operator")
    probe.add_argument("--alpha")
    probe.add_argument("--s")
    probe.add_argument("--trials")
    probe.add_argument("--seed")
    probe.add_argument("--family", choices=["band-limited", "single-mode"])
    probe.add_argument("--sizes", help="comma list of grid sizes")
    probe.add_argument("--L", dest="L")
    probe.add_argument("--out")
    return parser


def _raw_values(namespace: dict[str, Any]) -> dict[str, str | list[str]]:
    raw: dict[str, str | list[str]] = {}
    for key, value in namespace.items():
        match value:
            case bool():
                raw[key] = "true" if value else "false"
            case list():
                raw[key] = [str(v) for v in value]
            case _:
                raw[key] = str(value)
    return raw


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point of the ``spectral-hirota`` console script."""
    parser = build_parser()
    namespace = vars(parser.parse_args(argv))
    command = namespace.pop("command")
    verbose = namespace.pop("verbose", False)
    config_path = namespace.pop("config", None)
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    config = RunConfig()
    try:
        if config_path is not None:
            config.apply(load_config_file(Path(config_path)), config_path)
        config.apply(_raw_values(namespace), "command line")
        return COMMANDS[command](config)
    except _UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"error: {command}: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SpectralHirotaError as e:
        print(f"error: {command}: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
