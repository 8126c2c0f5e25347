"""Flat key = value run configuration shared by config files and CLI flags."""

import logging
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

import numpy as np

from .._errors import ConfigError, SpectralHirotaError
from ..types import OutputFormat, QuadratureSpec

logger = logging.getLogger(__name__)

RawValue = str | list[str]


def _scalar(raw: RawValue) -> str:
    if isinstance(raw, list):
        if not raw:
            raise ValueError("empty value")
        return raw[-1]
    return raw


def _items(raw: RawValue) -> list[str]:
    parts = raw if isinstance(raw, list) else [raw]
    items = [item.strip() for part in parts for item in part.split(",")]
    return [item for item in items if item]


def _float(raw: RawValue) -> float:
    return float(_scalar(raw))


def _int(raw: RawValue) -> int:
    return int(_scalar(raw))


def _text(raw: RawValue) -> str:
    return _scalar(raw).strip()


def _bool(raw: RawValue) -> bool:
    match _scalar(raw).strip().lower():
        case "1" | "true" | "yes" | "on":
            return True
        case "0" | "false" | "no" | "off":
            return False
        case other:
            raise ValueError(f"not a boolean: {other!r}")


def _float_list(raw: RawValue) -> list[float]:
    return [float(item) for item in _items(raw)]


def _int_list(raw: RawValue) -> list[int]:
    return [int(item) for item in _items(raw)]


def _path(raw: RawValue) -> Path:
    return Path(_scalar(raw).strip())


def _format(raw: RawValue) -> OutputFormat:
    match _scalar(raw).strip():
        case "csv":
            return "csv"
        case "json":
            return "json"
        case other:
            raise ValueError(f"format must be csv or json, got {other!r}")


def _sign(raw: RawValue) -> int:
    value = int(float(_scalar(raw)))
    if value not in (1, -1):
        raise ValueError(f"sigma must be +1 or -1, got {value}")
    return value


def parse_times(raw: RawValue) -> list[float]:
    """Sample times as ``start:stop:count`` (inclusive) or a comma list."""
    text = _scalar(raw) if not isinstance(raw, list) or len(raw) == 1 else None
    if text is not None and text.count(":") == 2:
        start, stop, count = text.split(":")
        return [float(v) for v in np.linspace(float(start), float(stop), int(count))]
    return sorted(_float_list(raw))


def parse_sweep(raw: RawValue) -> list[float]:
    """Orders as ``start:stop:step`` (inclusive) or a comma list."""
    text = _scalar(raw) if not isinstance(raw, list) or len(raw) == 1 else None
    if text is not None and text.count(":") == 2:
        start, stop, step = (float(v) for v in text.split(":"))
        if step <= 0:
            raise ValueError("step must be positive")
        count = int(round((stop - start) / step)) + 1
        return [round(start + j * step, 12) for j in range(count)]
    return _float_list(raw)


_QUAD_KEYS: dict[str, Callable[[RawValue], Any]] = {
    "y0": _float,
    "inner_nodes": _int,
    "tail_nodes": _int,
    "y_max": _float,
    "inner_rule": _text,
    "panel_order": _int,
    "tolerance": _float,
    "chunk_size": _int,
}

_ALIASES = {"L": "half_length", "N": "n", "sigma": "sigma_sign"}


@dataclass
class RunConfig:
    """Settings of one CLI run after config file and flags are merged."""

    alpha: float | None = None
    func: str = "gaussian"
    func2: str = "sech"
    input: Path | None = None
    form: str = "commutator"
    half_length: float | None = None
    n: int | None = None
    k: list[float] = field(default_factory=list)
    delta: list[float] = field(default_factory=list)
    ell: float = 0.0
    sigma_sign: int = 1
    y: float = 0.0
    t: list[float] = field(default_factory=lambda: [-1.0, 0.0, 1.0])
    s: float = 1.0
    alphas: list[float] = field(default_factory=lambda: [0.9, 0.99, 0.999, 1.0])
    trials: int = 100
    family: str = "band-limited"
    sizes: list[int] = field(default_factory=lambda: [1024, 2048])
    seed: int = 42
    alpha_sweep: list[float] = field(default_factory=list)
    workers: int = 4
    diagnostics: bool = True
    compare_marchaud: bool = False
    pde_residual: bool = False
    out: Path | None = None
    out_dir: Path | None = None
    json: Path | None = None
    format: OutputFormat = "csv"
    strict: bool = False
    quad: QuadratureSpec = field(default_factory=QuadratureSpec)

    def apply(self, values: Mapping[str, RawValue], source: str = "flags") -> None:
        """Overwrite settings from raw string values.

        Raises:
            ConfigError: For unknown keys or values that do not parse.
        """
        quad_overrides: dict[str, Any] = {}
        for raw_key, raw in values.items():
            key = raw_key.strip().replace("-", "_")
            key = _ALIASES.get(key, key)
            if key.startswith("quad."):
                name = key.removeprefix("quad.")
                parser = _QUAD_KEYS.get(name)
                if parser is None:
                    raise ConfigError(f"Unknown quadrature key in {source}", raw_key)
                quad_overrides[name] = _convert(parser, raw, raw_key)
                continue
            parser = _PARSERS.get(key)
            if parser is None:
                raise ConfigError(f"Unknown key in {source}", raw_key)
            setattr(self, key, _convert(parser, raw, raw_key))
        if quad_overrides:
            try:
                self.quad = replace(self.quad, **quad_overrides)
            except SpectralHirotaError as e:
                raise ConfigError(f"Invalid quadrature settings in {source} ({e})") from e
        logger.debug("Applied %d settings from %s", len(values), source)


def _convert(parser: Callable[[RawValue], Any], raw: RawValue, key: str) -> Any:
    try:
        return parser(raw)
    except ValueError as e:
        raise ConfigError(f"Invalid value {raw!r} ({e})", key) from e


_PARSERS: dict[str, Callable[[RawValue], Any]] = {
    "alpha": _float,
    "func": _text,
    "func2": _text,
    "input": _path,
    "form": _text,
    "half_length": _float,
    "n": _int,
    "k": _float_list,
    "delta": _float_list,
    "ell": _float,
    "sigma_sign": _sign,
    "y": _float,
    "t": parse_times,
    "s": _float,
    "alphas": _float_list,
    "trials": _int,
    "family": _text,
    "sizes": _int_list,
    "seed": _int,
    "alpha_sweep": parse_sweep,
    "workers": _int,
    "diagnostics": _bool,
    "compare_marchaud": _bool,
    "pde_residual": _bool,
    "out": _path,
    "out_dir": _path,
    "json": _path,
    "format": _format,
    "strict": _bool,
}


def parse_config_text(text: str, source: str = "<config>") -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment.

    Raises:
        ConfigError: For a line without ``=`` or with an empty key.
    """
    values: dict[str, str] = {}
    for number, line in enumerate(text.splitlines(), start=1):
        content = line.split("#", 1)[0].strip()
        if not content:
            continue
        key, sep, value = content.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigError(f"{source}:{number}: expected 'key = value'", key or None)
        if key in values:
            logger.debug("%s:%d: %s set again, last value wins", source, number, key)
        values[key] = value.strip()
    return values


def load_config_file(path: Path) -> dict[str, str]:
    """Read a config file.

    Raises:
        ConfigError: If the file cannot be read or does not parse.
    """
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"Cannot read config file ({e.strerror})", str(path)) from e
    return parse_config_text(text, str(path))
