from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

from .constants import to_si


class Method(str, Enum):
    QUADRATURE = "quadrature"
    CLOSED_FORM = "closed_form"
    MONTE_CARLO = "monte_carlo"


@dataclass(frozen=True)
class RateResult:
    """A computed rate or coefficient with its unit tag and error estimate.

    ``checks`` holds values of the same quantity from independent routes,
    keyed by route name, in the same unit.
    """

    value: float
    unit: str
    err_estimate: float
    method: Method
    checks: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not math.isfinite(self.err_estimate) or self.err_estimate < 0:
            raise ValueError(f"err_estimate must be finite and >= 0, got {self.err_estimate}")
        object.__setattr__(self, "method", Method(self.method))

    @property
    def rel_err(self) -> float:
        return self.err_estimate / abs(self.value) if self.value else math.inf

    def scaled(self, factor: float, unit: str) -> "RateResult":
        return RateResult(
            self.value * factor,
            unit,
            self.err_estimate * abs(factor),
            self.method,
            {k: v * factor for k, v in self.checks.items()},
        )

    def to_si(self) -> "RateResult":
        factor, unit = to_si(1.0, self.unit)
        return replace(
            self,
            value=self.value * factor,
            unit=unit,
            err_estimate=self.err_estimate * abs(factor),
            checks={k: v * factor for k, v in self.checks.items()},
        )

    def to_dict(self, name: str | None = None) -> dict:
        d = {
            "value": self.value,
            "unit": self.unit,
            "method": self.method.value,
            "err_estimate": self.err_estimate,
        }
        if name is not None:
            d = {"name": name, **d}
        if self.checks:
            d["checks"] = dict(self.checks)
        return d
