"""JSON and CSV plumbing for tau-functions, reports and fields."""

import csv
import json
import logging
from collections.abc import Iterable, Mapping, Sequence
from pathlib import Path
from typing import IO, TYPE_CHECKING, Any, cast

from .._errors import ExpSumParseError
from ..types import (
    CheckResult,
    CheckResultJSON,
    PhaseTermJSON,
    PhaseVector,
    ResidualReport,
    ResidualReportJSON,
    SobolevProbeReport,
    SuiteReportJSON,
)

if TYPE_CHECKING:
    from ..exp_sum import ExpSum

logger = logging.getLogger(__name__)

_PHASE_FIELDS = ("k", "ell", "omega", "delta")


def pair(z: complex) -> list[float]:
    """A complex number as [re, im]."""
    z = complex(z)
    return [z.real, z.imag]


def format_float(value: float) -> str:
    """17 significant digits, enough to round-trip a double."""
    return format(value, ".17g")


def exp_sum_to_json(terms: Iterable[tuple[complex, PhaseVector]]) -> list[PhaseTermJSON]:
    """Serialize exponential-sum terms in their stored order."""
    return [
        {
            "coeff": pair(c),
            "k": pair(p.k),
            "ell": pair(p.ell),
            "omega": pair(p.omega),
            "sigma": None if p.sigma is None else pair(p.sigma),
            "delta": pair(p.delta),
        }
        for c, p in terms
    ]


def _parse_pair(value: Any, name: str, data: Any) -> complex:
    match value:
        case [re, im] if all(
            isinstance(v, int | float) and not isinstance(v, bool) for v in (re, im)
        ):
            return complex(float(re), float(im))
        case _:
            raise ExpSumParseError(
                f"Field '{name}' must be a [re, im] pair, got {value!r}", data
            )


def parse_exp_sum(data: Any) -> "ExpSum":
    """
    Parse a tau-function document into an ExpSum.

    Args:
        data: List of term objects as produced by ``ExpSum.to_json``

    Returns:
        Canonical ExpSum

    Raises:
        ExpSumParseError: If the document is malformed
    """
    from ..exp_sum import ExpSum  # noqa: F811

    if not isinstance(data, list):
        raise ExpSumParseError(
            f"Invalid tau document type (expected list, got {type(data).__name__})",
            data,
        )

    terms = []
    for index, entry in enumerate(data):
        if not isinstance(entry, dict):
            raise ExpSumParseError(f"Term {index} is not an object", data)
        try:
            coefficient = _parse_pair(entry["coeff"], "coeff", data)
            fields = {name: _parse_pair(entry[name], name, data) for name in _PHASE_FIELDS}
            raw_sigma = entry["sigma"]
        except KeyError as e:
            raise ExpSumParseError(
                f"Missing required field in term {index}: {e}", data
            ) from e
        sigma = None if raw_sigma is None else _parse_pair(raw_sigma, "sigma", data)
        terms.append((coefficient, PhaseVector(sigma=sigma, **fields)))
    logger.debug("Parsed tau document with %d terms", len(terms))
    return ExpSum.of(*terms)


# Key order of written reports; absent optional keys are skipped.
RESIDUAL_REPORT_KEYS = ("max_abs", "l2", "pass", "tolerance", "notes", "grid", "relative")
CHECK_RESULT_KEYS = ("name", "value", "tolerance", "passed", "gate", "detail")
SUITE_REPORT_KEYS = ("version", "seed", "passed", "checks")
SOBOLEV_REPORT_KEYS = (
    "s",
    "alpha",
    "trials",
    "seed",
    "family",
    "max_ratio",
    "growth",
    "stable",
    "closed_form_error",
)


def in_key_order(document: Mapping[str, Any], keys: Sequence[str]) -> dict[str, Any]:
    """Copy ``document`` with its keys in the order of ``keys``.

    Raises:
        ValueError: If the document has a key outside ``keys``.
    """
    unknown = set(document) - set(keys)
    if unknown:
        raise ValueError(f"Unexpected document keys: {sorted(unknown)}")
    return {key: document[key] for key in keys if key in document}


def residual_report_to_json(report: ResidualReport) -> ResidualReportJSON:
    document: dict[str, Any] = {
        "max_abs": report.max_abs,
        "l2": report.l2,
        "pass": report.passed,
        "tolerance": report.tolerance,
        "notes": report.notes,
    }
    if report.grid is not None:
        document["grid"] = report.grid
    if report.relative is not None:
        document["relative"] = report.relative
    return cast(ResidualReportJSON, in_key_order(document, RESIDUAL_REPORT_KEYS))


def check_result_to_json(result: CheckResult) -> CheckResultJSON:
    document: dict[str, Any] = {
        "name": result.name,
        "value": result.value,
        "tolerance": result.tolerance,
        "passed": result.passed,
        "gate": result.gate,
    }
    if result.detail:
        document["detail"] = result.detail
    return cast(CheckResultJSON, in_key_order(document, CHECK_RESULT_KEYS))


def suite_report_to_json(
    version: str, seed: int, results: Sequence[CheckResult]
) -> SuiteReportJSON:
    document = {
        "version": version,
        "seed": seed,
        "passed": all(r.passed for r in results if r.gate),
        "checks": [check_result_to_json(r) for r in results],
    }
    return cast(SuiteReportJSON, in_key_order(document, SUITE_REPORT_KEYS))


def sobolev_report_to_json(report: SobolevProbeReport) -> dict[str, Any]:
    """Sobolev probe report; grid sizes become string keys, coarsest first."""
    document = {
        "s": report.s,
        "alpha": report.alpha,
        "trials": report.trials,
        "seed": report.seed,
        "family": report.family.kind,
        "max_ratio": {str(n): report.max_ratio[n] for n in sorted(report.max_ratio)},
        "growth": report.growth,
        "stable": report.stable,
        "closed_form_error": report.closed_form_error,
    }
    return in_key_order(document, SOBOLEV_REPORT_KEYS)


def dumps(document: Any) -> str:
    """UTF-8 JSON with two-space indent.

    Keys are written as the mapping orders them; the report builders above fix
    that order with their key tuples.
    """
    return json.dumps(document, indent=2, ensure_ascii=False, allow_nan=True) + "\n"


def write_json(path: Path, document: Any) -> None:
    path.write_text(dumps(document), encoding="utf-8")


def write_csv(
    stream: IO[str], header: Sequence[str], rows: Iterable[Sequence[float]]
) -> None:
    """Header row then one line per row, floats with 17 significant digits."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_float(float(v)) for v in row])


def read_csv_columns(path: Path) -> dict[str, list[float]]:
    """Read a headed numeric CSV into columns."""
    with path.open(encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        columns: dict[str, list[float]] = {name: [] for name in reader.fieldnames or []}
        for row in reader:
            for name, value in row.items():
                columns[name].append(float(value))
    return columns
