"""One module per command; each exposes a ``cmd_*`` click command registered in ``main``."""
import click

from schema.config_schema import ExperimentConfig
from storage.config_store import flatten, with_overrides
from utils.helpers import comment_header


def current_config(ctx: click.Context, overrides: dict[str, str] | None = None) -> ExperimentConfig:
    """Configuration loaded by the group, with command-level convenience flags applied."""
    config = ctx.obj["config"]
    if overrides:
        config = with_overrides(config, overrides)
    return config


def csv_header(title: str, config: ExperimentConfig, **extra) -> list[str]:
    params = dict(flatten(config))
    params.update(extra)
    return comment_header(title, params)
