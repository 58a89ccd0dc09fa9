"""Residual records shared by every verification routine."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any


class Tier(str, Enum):
    EXACT = "exact"
    CONVERGENT = "convergent"
    REPORT_ONLY = "report_only"


@dataclass(frozen=True)
class ResidualRecord:
    """A named identity-defect measurement.

    ``residual`` is the headline number; ``components`` holds the named
    sub-measurements and ``table`` the rows of any convergence study.
    """
    name: str
    tier: Tier
    residual: float
    components: dict[str, Any] = field(default_factory=dict)
    table: tuple[dict[str, Any], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "tier", Tier(self.tier))
        object.__setattr__(self, "table", tuple(self.table))


def empirical_orders(xs, ys) -> list[float | None]:
    """Successive log-ratio slopes ``log(y_i/y_{i+1}) / log(x_i/x_{i+1})``.

    Returns ``None`` where either ratio is degenerate.
    """
    import math

    out: list[float | None] = []
    for (x0, y0), (x1, y1) in zip(zip(xs, ys), zip(xs[1:], ys[1:])):
        if x0 <= 0 or x1 <= 0 or x0 == x1 or y0 <= 0 or y1 <= 0:
            out.append(None)
        else:
            out.append(math.log(y0 / y1) / math.log(x0 / x1))
    return out


def convergence_orders(dims, ys) -> list[float | None]:
    """Orders ``p`` in ``y ~ N^-p`` between consecutive dimensions."""
    return [None if o is None else -o for o in empirical_orders(dims, ys)]
