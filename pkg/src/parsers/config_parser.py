"""
Config Parser - reads the TOML experiment file into a validated SuiteConfig

    [experiment]
    name = "dormancy-shift"
    variants = ["baseline", "hr"]
    activations = ["tanh", "relu"]
    seeds = [0, 1, 2]

    [train]
    total_steps = 60000
"""

import hashlib
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, Union

from pydantic import ValidationError

from src.errors import ConfigError
from src.models.config import SuiteConfig

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

logger = logging.getLogger(__name__)


def _format_validation_error(e: ValidationError) -> str:
    problems = []
    for err in e.errors():
        where = ".".join(str(part) for part in err["loc"]) or "<root>"
        problems.append(f"{where}: {err['msg']}")
    return "; ".join(problems)


def parse_config(data: Dict[str, Any]) -> SuiteConfig:
    try:
        return SuiteConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"Invalid config: {_format_validation_error(e)}") from e


def parse_config_text(text: str) -> SuiteConfig:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"Config is not valid TOML: {e}") from e
    return parse_config(data)


def load_config(path: Union[str, Path]) -> SuiteConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"Cannot read config {path}: {e}") from e
    config = parse_config_text(text)
    logger.debug("Loaded config %s (%s)", path, config.experiment.name)
    return config


def config_hash(config: SuiteConfig) -> str:
    """SHA-256 of the canonical JSON form: sorted keys, compact separators."""
    canonical = json.dumps(config.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
