from datetime import datetime, timezone
from typing import Any, Iterable

import numpy as np

# round-trips every IEEE double
FLOAT_FORMAT = "%.17g"


def format_float(value: float) -> str:
    return FLOAT_FORMAT % value


def comment_header(title: str, params: dict[str, Any]) -> list[str]:
    """
    Build the ``#``-prefixed header written above every CSV body.

    The timestamp lives only here so CSV bodies stay byte-identical
    between reruns with the same configuration and seed.
    """
    lines = [f"# {title}", f"# generated_at: {datetime.now(timezone.utc).isoformat()}"]
    for key in sorted(params):
        value = params[key]
        if isinstance(value, float):
            value = format_float(value)
        lines.append(f"# {key}: {value}")
    return lines


def angle_grid(start_deg: float, stop_deg: float, step_deg: float) -> list[float]:
    """Inclusive angle list ``start..stop`` in ``step`` increments."""
    if step_deg <= 0:
        raise ValueError("angle step must be positive")
    count = int(np.floor((stop_deg - start_deg) / step_deg + 1e-9)) + 1
    return [float(start_deg + k * step_deg) for k in range(max(count, 0))]


def parse_float_list(value: str | Iterable[float]) -> list[float]:
    """Accept ``"0,15,30"`` or an iterable of numbers."""
    if isinstance(value, str):
        items = [item.strip() for item in value.split(",")]
        return [float(item) for item in items if item]
    return [float(item) for item in value]
