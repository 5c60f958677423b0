"""Result records shared by the moment routines."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field


class Method(str, enum.Enum):
    CF_EVEN_KERNEL_DENSITY = "thm1prime_eq9"
    CF_EVEN_RESIDUAL = "thm1prime_eq10"
    CF_ODD_RESIDUAL = "thm2"
    LST_KERNEL_DENSITY = "thm5_eq19"
    LST_RESIDUAL = "thm5_eq20"
    LST_NEGATIVE = "eq28"
    COEFFICIENT_FUNCTION = "ramanujan"
    CF_DERIVATIVE = "eq5"
    ORACLE = "oracle"


@dataclass
class MomentResult:
    """An absolute moment ``E|X|^s`` (or ``E[X^s]`` for ``X >= 0``).

    ``infinite`` marks a moment that is infinite, in which case ``value`` is
    ``math.inf``.
    """

    s: float
    value: float
    method: Method
    error_estimate: float = 0.0
    infinite: bool = False
    evals: int = 0
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.infinite:
            self.value = math.inf
            self.error_estimate = 0.0

    @classmethod
    def infinity(cls, s: float, method: Method, reason: str, evals: int = 0) -> "MomentResult":
        return cls(s, math.inf, method, 0.0, True, evals, {"reason": reason})

    @property
    def formula_ref(self) -> str:
        """Name of the formula that produced the value, e.g. ``lst-residual``."""
        return self.method.name.lower().replace("_", "-")

    def as_dict(self) -> dict:
        return {
            "s": self.s,
            "value": None if self.infinite else self.value,
            "infinite": self.infinite,
            "error_estimate": self.error_estimate,
            "method": self.method.value,
            "formula_ref": self.formula_ref,
            "evals": self.evals,
        }
