"""Complex numbers carried as ``mantissa * exp(exponent)``.

Bessel values in this package routinely reach ``e^{|Im z|}`` or
``(z/2)^nu / Gamma(nu+1)`` magnitudes far outside the double range, so
every evaluator works on a (mantissa, exponent) pair.  The scalar type is
:class:`ScaledComplex`; the ``arr_*`` helpers do the same arithmetic on
numpy arrays of mantissas and exponents.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ScaledComplex:
    """The value ``mantissa * exp(exponent)``.

    After normalization either ``mantissa == 0`` or ``|mantissa| == 1`` up
    to rounding, which sits inside the documented band [1/2, 2].
    """

    mantissa: complex
    exponent: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.exponent):
            raise ValueError(f"exponent must be finite, got {self.exponent}")

    @classmethod
    def normalized(cls, mantissa, exponent=0.0) -> "ScaledComplex":
        m = complex(mantissa)
        a = abs(m)
        if a == 0.0:
            return cls(0j, 0.0)
        if not math.isfinite(a):
            raise ValueError("mantissa must be finite")
        return cls(m / a, float(exponent) + math.log(a))

    @classmethod
    def from_complex(cls, value) -> "ScaledComplex":
        return cls.normalized(value, 0.0)

    @classmethod
    def from_log(cls, logvalue) -> "ScaledComplex":
        """Build ``exp(logvalue)``; ``-inf`` real part means zero."""
        lv = complex(logvalue)
        if lv.real == -math.inf:
            return cls(0j, 0.0)
        return cls(cmath.exp(1j * lv.imag), lv.real)

    def is_zero(self) -> bool:
        return self.mantissa == 0

    def log_abs(self) -> float:
        if self.is_zero():
            return -math.inf
        return self.exponent + math.log(abs(self.mantissa))

    def log(self) -> complex:
        if self.is_zero():
            return complex(-math.inf, 0.0)
        return complex(self.log_abs(), cmath.phase(self.mantissa))

    def value(self) -> complex:
        """Plain complex value; may overflow to inf or underflow to 0."""
        if self.is_zero():
            return 0j
        try:
            return self.mantissa * math.exp(self.exponent)
        except OverflowError:
            return complex(
                math.copysign(math.inf, self.mantissa.real) if self.mantissa.real else 0.0,
                math.copysign(math.inf, self.mantissa.imag) if self.mantissa.imag else 0.0,
            )

    def __complex__(self):
        return self.value()

    def __abs__(self):
        if self.is_zero():
            return 0.0
        try:
            return abs(self.mantissa) * math.exp(self.exponent)
        except OverflowError:
            return math.inf

    def __neg__(self):
        return ScaledComplex(-self.mantissa, self.exponent)

    def _coerce(self, other) -> "ScaledComplex":
        if isinstance(other, ScaledComplex):
            return other
        return ScaledComplex.from_complex(other)

    def __mul__(self, other):
        o = self._coerce(other)
        if self.is_zero() or o.is_zero():
            return ScaledComplex(0j, 0.0)
        return ScaledComplex.normalized(self.mantissa * o.mantissa, self.exponent + o.exponent)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o.is_zero():
            raise ZeroDivisionError("division by a zero ScaledComplex")
        if self.is_zero():
            return ScaledComplex(0j, 0.0)
        return ScaledComplex.normalized(self.mantissa / o.mantissa, self.exponent - o.exponent)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __add__(self, other):
        o = self._coerce(other)
        if self.is_zero():
            return o
        if o.is_zero():
            return self
        e = max(self.exponent, o.exponent)
        m = self.mantissa * math.exp(self.exponent - e) + o.mantissa * math.exp(o.exponent - e)
        return ScaledComplex.normalized(m, e)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def ratio(self, other) -> complex:
        """``self / other`` as a plain complex (exponents cancel first)."""
        return (self / other).value()


# ----------------------------------------------------------------------------
# array helpers: values are (m, e) with m complex ndarray, e float ndarray


def arr_normalize(m, e):
    m = np.asarray(m, dtype=complex)
    e = np.asarray(e, dtype=float)
    a = np.abs(m)
    nz = a > 0
    safe = np.where(nz, a, 1.0)
    m_out = np.where(nz, m / safe, 0j)
    e_out = np.where(nz, e + np.log(safe), 0.0)
    return m_out, e_out


def arr_from_log(logv):
    logv = np.asarray(logv, dtype=complex)
    zero = np.isneginf(logv.real)
    m = np.where(zero, 0j, np.exp(1j * np.where(zero, 0.0, logv.imag)))
    e = np.where(zero, 0.0, logv.real)
    return m, e


def arr_log_abs(m, e):
    a = np.abs(m)
    with np.errstate(divide="ignore"):
        return np.where(a > 0, e + np.log(np.where(a > 0, a, 1.0)), -np.inf)


def arr_mul(m1, e1, m2, e2):
    return arr_normalize(m1 * m2, e1 + e2)


def arr_div(m1, e1, m2, e2):
    with np.errstate(divide="ignore", invalid="ignore"):
        return arr_normalize(m1 / m2, e1 - e2)


def arr_add(m1, e1, m2, e2):
    z1 = np.abs(m1) == 0
    z2 = np.abs(m2) == 0
    e = np.maximum(np.where(z1, -np.inf, e1), np.where(z2, -np.inf, e2))
    e = np.where(np.isfinite(e), e, 0.0)
    with np.errstate(under="ignore"):
        m = np.where(z1, 0j, m1 * np.exp(np.minimum(e1 - e, 0.0))) + np.where(
            z2, 0j, m2 * np.exp(np.minimum(e2 - e, 0.0))
        )
    return arr_normalize(m, e)


def arr_value(m, e):
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        return m * np.exp(e)


def arr_to_scalar(m, e, i=()) -> ScaledComplex:
    return ScaledComplex.normalized(complex(np.asarray(m)[i]), float(np.asarray(e)[i]))
