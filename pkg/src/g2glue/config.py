"""Run configuration: INI files, environment overrides and command-line values.

Precedence, lowest first: built-in defaults, environment (and .env), the INI file,
explicit overrides from the command line.
"""

import configparser
import logging
import os
from pathlib import Path
from typing import Any, Optional, Union

from dotenv import load_dotenv
from pydantic import ValidationError

from .errors import ConfigParse
from .schemas.config import RunConfig
from .schemas.params import RegionConstants

logger = logging.getLogger(__name__)

ENV_PREFIX = "G2GLUE_"
SECTIONS = ("run", "glue", "rates", "feasibility", "gate", "tolerances")
DEFAULT_LOG_LEVEL = "WARNING"


def env_overrides() -> dict[str, Any]:
    """Values from G2GLUE_SEED, G2GLUE_OUTPUT_DIR and G2GLUE_WORKERS, after loading .env."""
    load_dotenv()
    values: dict[str, Any] = {}
    for key in ("seed", "output_dir", "workers"):
        raw = os.getenv(f"{ENV_PREFIX}{key.upper()}")
        if raw:
            values[key] = raw
    return values


def log_level(explicit: Optional[str] = None) -> str:
    load_dotenv()
    return (explicit or os.getenv(f"{ENV_PREFIX}LOG_LEVEL") or DEFAULT_LOG_LEVEL).upper()


def read_config_file(path: Union[str, Path]) -> dict[str, Any]:
    """Parse an INI run file into nested config values.

    Raises:
        ConfigParse: unreadable file, malformed INI or unknown section.
    """
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        with open(path, encoding="utf-8") as handle:
            parser.read_file(handle)
    except OSError as exc:
        raise ConfigParse(f"cannot read config file {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigParse(f"malformed config file {path}: {exc}") from exc

    if parser.defaults():
        raise ConfigParse(f"{path}: keys outside a section: {sorted(parser.defaults())}")
    unknown = [name for name in parser.sections() if name not in SECTIONS]
    if unknown:
        raise ConfigParse(f"{path}: unknown sections {unknown}")

    values: dict[str, Any] = {}
    for name in parser.sections():
        section = dict(parser.items(name))
        if name == "run":
            values.update(section)
        elif name == "gate":
            values["gate"] = _split_gate(section)
        else:
            values[name] = section
    return values


def _split_gate(section: dict[str, str]) -> dict[str, Any]:
    """Region-constant keys live flat in [gate]; nest them for GateOptions."""
    region_keys = set(RegionConstants.model_fields)
    gate: dict[str, Any] = {k: v for k, v in section.items() if k not in region_keys}
    constants = {k: v for k, v in section.items() if k in region_keys}
    if constants:
        gate["constants"] = constants
    return gate


def _merge(base: dict[str, Any], extra: dict[str, Any]) -> dict[str, Any]:
    merged = dict(base)
    for key, value in extra.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        elif value is not None:
            merged[key] = value
    return merged


def build_config(
    path: Optional[Union[str, Path]] = None, overrides: Optional[dict[str, Any]] = None
) -> RunConfig:
    """Assemble and validate a RunConfig.

    Raises:
        ConfigParse: the file cannot be read or any value fails validation.
    """
    values = _merge(RunConfig().model_dump(), env_overrides())
    if path is not None:
        values = _merge(values, read_config_file(path))
    values = _merge(values, overrides or {})
    try:
        config = RunConfig.model_validate(values)
    except ValidationError as exc:
        raise ConfigParse(f"invalid configuration: {exc}") from exc
    logger.debug("run config: %s", config.model_dump_json())
    return config
