"""Extended reals: finite floats plus semantic +/- infinity, with NaN forbidden."""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class ExtReal:
    """A real number extended with +inf / -inf.

    Arithmetic never produces NaN: the indeterminate form inf - inf raises
    instead of silently propagating garbage.
    """

    value: float

    def __post_init__(self):
        v = float(self.value)
        if math.isnan(v):
            raise ValueError("ExtReal cannot hold NaN")
        object.__setattr__(self, "value", v)

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.value)

    def __float__(self) -> float:
        return self.value

    def __neg__(self) -> "ExtReal":
        return ExtReal(-self.value)

    def __add__(self, other) -> "ExtReal":
        a, b = self.value, _as_float(other)
        if math.isinf(a) and math.isinf(b) and (a > 0) != (b > 0):
            raise ArithmeticError("inf - inf is undefined")
        return ExtReal(a + b)

    __radd__ = __add__

    def __sub__(self, other) -> "ExtReal":
        return self + ExtReal(-_as_float(other))

    def __rsub__(self, other) -> "ExtReal":
        return ExtReal(_as_float(other)) + (-self)

    def __mul__(self, other) -> "ExtReal":
        a, b = self.value, _as_float(other)
        if (a == 0.0 and math.isinf(b)) or (b == 0.0 and math.isinf(a)):
            raise ArithmeticError("0 * inf is undefined")
        return ExtReal(a * b)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "ExtReal":
        a, b = self.value, _as_float(other)
        if b == 0.0:
            raise ZeroDivisionError("ExtReal division by zero")
        if math.isinf(a) and math.isinf(b):
            raise ArithmeticError("inf / inf is undefined")
        return ExtReal(a / b)

    def __lt__(self, other) -> bool:
        return self.value < _as_float(other)

    def __le__(self, other) -> bool:
        return self.value <= _as_float(other)

    def __gt__(self, other) -> bool:
        return self.value > _as_float(other)

    def __ge__(self, other) -> bool:
        return self.value >= _as_float(other)

    def __eq__(self, other) -> bool:
        try:
            return self.value == _as_float(other)
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash(self.value)

    def __repr__(self) -> str:
        if self.value == math.inf:
            return "ExtReal(inf)"
        if self.value == -math.inf:
            return "ExtReal(-inf)"
        return f"ExtReal({self.value!r})"


def _as_float(x) -> float:
    v = float(x)
    if math.isnan(v):
        raise ValueError("NaN is not an extended real")
    return v


POS_INF = ExtReal(math.inf)
NEG_INF = ExtReal(-math.inf)
