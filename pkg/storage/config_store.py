from enum import Enum
from pathlib import Path
from typing import Iterable

from dotenv import dotenv_values

from exception.errors import SchemaError, UnknownParameterError
from logger.logging import get_logger
from schema.config_schema import ExperimentConfig

# Shipped configuration encoding every parameter of the experiment
DEFAULT_CONFIG_PATH = Path(__file__).resolve().parent.parent / "config" / "experiment_defaults.env"

logger = get_logger()


def parse_overrides(items: Iterable[str]) -> dict[str, str]:
    """
    Turn ``section.key=value`` strings into a flat mapping.

    Raises
    ------
    SchemaError
        If an item has no ``=`` or no section prefix.
    """
    overrides = {}
    for item in items:
        if "=" not in item:
            raise SchemaError(f"override '{item}' is not of the form section.key=value")
        key, value = item.split("=", 1)
        key = key.strip()
        if "." not in key:
            raise SchemaError(f"override key '{key}' needs a section prefix")
        overrides[key] = value.strip()
    return overrides


def _nest(flat: dict[str, str | None]) -> dict:
    nested: dict = {}
    for key, value in flat.items():
        if "." not in key:
            # Rejected by the top-level model as an unknown key
            nested[key] = value
            continue
        section, field = key.split(".", 1)
        if value is not None and value.strip() == "":
            value = None
        nested.setdefault(section, {})
        if not isinstance(nested[section], dict):
            raise SchemaError(f"key '{section}' is used both as a value and as a section")
        nested[section][field] = value
    return nested


def config_from_flat(flat: dict[str, str | None]) -> ExperimentConfig:
    """Validate a flat dotted mapping; pydantic reports failures with their key path."""
    return ExperimentConfig.model_validate(_nest(flat))


def read_flat(path: str | Path) -> dict[str, str | None]:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"configuration file not found: {path}")
    return dict(dotenv_values(path))


def load_config(path: str | Path | None = None, overrides: dict[str, str] | None = None) -> ExperimentConfig:
    """
    Load the sectioned key=value file and apply overrides (overrides win).

    Parameters
    ----------
    path : str or Path, optional
        Configuration file; the shipped defaults when omitted.
    overrides : dict, optional
        Flat ``section.key`` -> string value mapping.
    """
    path = DEFAULT_CONFIG_PATH if path is None else Path(path)
    flat = read_flat(path)
    if overrides:
        flat.update(overrides)
    config = config_from_flat(flat)
    logger.info(f"Configuration loaded from {path} with {len(overrides or {})} override(s)")
    return config


def with_overrides(config: ExperimentConfig, overrides: dict[str, str]) -> ExperimentConfig:
    """Re-validate ``config`` with extra flat overrides applied."""
    flat = flatten(config)
    for key in overrides:
        if key not in flat:
            raise UnknownParameterError(f"unknown configuration key '{key}'")
    flat.update(overrides)
    return config_from_flat(flat)


def _format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ",".join(_format_value(item) for item in value)
    return str(value)


def flatten(config: ExperimentConfig) -> dict[str, str]:
    flat = {}
    for section_name in type(config).model_fields:
        section = getattr(config, section_name)
        for field_name in type(section).model_fields:
            flat[f"{section_name}.{field_name}"] = _format_value(getattr(section, field_name))
    return flat


def dump_config(config: ExperimentConfig) -> str:
    """Flat text that reloads to an identical validated configuration."""
    lines = []
    current = None
    for key, value in flatten(config).items():
        section = key.split(".", 1)[0]
        if section != current:
            if current is not None:
                lines.append("")
            lines.append(f"# {section}")
            current = section
        lines.append(f"{key}={value}")
    return "\n".join(lines) + "\n"
