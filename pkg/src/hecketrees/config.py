"""Defaults for the command line: built-ins < config file < environment.

The config file is plain ``key = value`` lines (``#`` starts a comment).
Its path comes from ``--config`` or ``$HECKETREES_CONFIG``.  Each key can be
overridden by ``HECKETREES_<KEY>`` in the environment, e.g.
``HECKETREES_DEFAULT_PRECISION=64``.  Command-line flags beat all three.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Mapping

from .padic import DEFAULT_PRECISION

ENV_PREFIX = "HECKETREES_"
FORMATS = ("json", "csv")


@dataclass(frozen=True)
class Config:
    default_precision: int = DEFAULT_PRECISION
    default_format: str = "json"
    output_dir: Path = Path(".")

    def __post_init__(self):
        if self.default_precision < 1:
            raise ValueError("default_precision must be >= 1")
        if self.default_format not in FORMATS:
            raise ValueError(f"default_format must be one of {FORMATS}")


def _coerce(values: Mapping[str, str], source: str) -> dict:
    known = {f.name for f in fields(Config)}
    out = {}
    for key, raw in values.items():
        if key not in known:
            raise ValueError(f"{source}: unknown key {key!r}")
        if key == "default_precision":
            out[key] = int(raw)
        elif key == "output_dir":
            out[key] = Path(raw)
        else:
            out[key] = raw
    return out


def parse_config_text(text: str, source: str = "<config>") -> dict[str, str]:
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"{source}:{lineno}: expected key=value")
        values[key.strip()] = value.strip()
    return values


def load_config(path: str | os.PathLike | None = None, environ: Mapping[str, str] | None = None) -> Config:
    environ = os.environ if environ is None else environ
    config = Config()
    path = path or environ.get(ENV_PREFIX + "CONFIG")
    if path:
        text = Path(path).read_text()
        config = replace(config, **_coerce(parse_config_text(text, str(path)), str(path)))
    env = {
        f.name: environ[ENV_PREFIX + f.name.upper()]
        for f in fields(Config)
        if ENV_PREFIX + f.name.upper() in environ
    }
    if env:
        config = replace(config, **_coerce(env, "environment"))
    return config
