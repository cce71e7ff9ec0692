"""Truncated complex power series in one variable ``z``."""

from __future__ import annotations

import numbers

import numpy as np

from .errors import SingularSeriesError

INV_TOL = 1e-14
SQRT_TOL = 1e-12


class Series:
    """Power series ``sum_{n <= N} coeffs[n] z^n`` truncated at order ``N``.

    Arithmetic with another series or a scalar returns a new series of the
    same order; mixing orders truncates to the smaller one.

    Examples
    --------
    >>> z = Series.z(4)
    >>> ((1 + z) * (1 - z)).coeffs.real.tolist()
    [1.0, 0.0, -1.0, 0.0, 0.0]
    """

    __slots__ = ("coeffs",)
    __array_priority__ = 100

    def __init__(self, coeffs, order: int | None = None):
        c = np.asarray(coeffs, dtype=complex).ravel()
        if order is not None:
            out = np.zeros(order + 1, dtype=complex)
            n = min(order + 1, c.size)
            out[:n] = c[:n]
            c = out
        if c.size == 0:
            raise ValueError("a series needs at least one coefficient")
        self.coeffs = c

    @property
    def order(self) -> int:
        return self.coeffs.size - 1

    @classmethod
    def const(cls, value: complex, order: int) -> "Series":
        c = np.zeros(order + 1, dtype=complex)
        c[0] = value
        return cls(c)

    @classmethod
    def z(cls, order: int, power: int = 1) -> "Series":
        """The monomial ``z**power`` (zero if ``power > order``)."""
        c = np.zeros(order + 1, dtype=complex)
        if power <= order:
            c[power] = 1.0
        return cls(c)

    def _coerce(self, other):
        if isinstance(other, Series):
            n = min(self.order, other.order)
            return self.coeffs[: n + 1], other.coeffs[: n + 1]
        if isinstance(other, numbers.Number):
            c = np.zeros_like(self.coeffs)
            c[0] = other
            return self.coeffs, c
        return NotImplemented

    def __add__(self, other):
        pair = self._coerce(other)
        if pair is NotImplemented:
            return NotImplemented
        return Series(pair[0] + pair[1])

    __radd__ = __add__

    def __neg__(self):
        return Series(-self.coeffs)

    def __sub__(self, other):
        pair = self._coerce(other)
        if pair is NotImplemented:
            return NotImplemented
        return Series(pair[0] - pair[1])

    def __rsub__(self, other):
        pair = self._coerce(other)
        if pair is NotImplemented:
            return NotImplemented
        return Series(pair[1] - pair[0])

    def __mul__(self, other):
        if isinstance(other, numbers.Number):
            return Series(self.coeffs * other)
        if not isinstance(other, Series):
            return NotImplemented
        n = min(self.order, other.order)
        return Series(np.convolve(self.coeffs[: n + 1], other.coeffs[: n + 1])[: n + 1])

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, numbers.Number):
            return Series(self.coeffs / other)
        if not isinstance(other, Series):
            return NotImplemented
        return self * other.invert()

    def __rtruediv__(self, other):
        if isinstance(other, numbers.Number):
            return self.invert() * other
        return NotImplemented

    def __pow__(self, k: int):
        if int(k) != k or k < 0:
            raise ValueError("only non-negative integer powers are supported")
        out = Series.const(1.0, self.order)
        base = self
        k = int(k)
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def invert(self) -> "Series":
        """Multiplicative inverse; needs ``|coeffs[0]| > 1e-14``."""
        c = self.coeffs
        if abs(c[0]) <= INV_TOL:
            raise SingularSeriesError(f"cannot invert a series with constant term {c[0]}")
        n = self.order
        r = np.zeros(n + 1, dtype=complex)
        r[0] = 1.0 / c[0]
        for k in range(1, n + 1):
            r[k] = -np.dot(c[1 : k + 1], r[k - 1 :: -1][:k]) / c[0]
        return Series(r)

    def sqrt(self) -> "Series":
        """Square root with constant term 1; needs ``coeffs[0] == 1``."""
        c = self.coeffs
        if abs(c[0] - 1.0) > SQRT_TOL:
            raise SingularSeriesError(f"square root needs constant term 1, got {c[0]}")
        n = self.order
        r = np.zeros(n + 1, dtype=complex)
        r[0] = 1.0
        for k in range(1, n + 1):
            r[k] = (c[k] - np.dot(r[1:k], r[k - 1 : 0 : -1])) / 2.0
        return Series(r)

    def shift(self, k: int) -> "Series":
        """Multiply by ``z**k`` (``k >= 0``) or divide by ``z**-k`` (``k < 0``).

        Division requires the dropped low coefficients to vanish.
        """
        c = self.coeffs
        n = self.order
        if k >= 0:
            out = np.zeros(n + 1, dtype=complex)
            if k <= n:
                out[k:] = c[: n + 1 - k]
            return Series(out)
        m = -k
        if np.any(np.abs(c[:m]) > INV_TOL * max(1.0, np.abs(c).max())):
            raise SingularSeriesError(f"series is not divisible by z^{m}")
        out = np.zeros(n + 1, dtype=complex)
        out[: n + 1 - m] = c[m:]
        return Series(out)

    def __call__(self, z):
        """Evaluate the truncated polynomial at ``z`` (Horner)."""
        z = np.asarray(z, dtype=complex)
        acc = np.zeros_like(z)
        for v in self.coeffs[::-1]:
            acc = acc * z + v
        return acc

    def allclose(self, other, atol: float = 1e-12) -> bool:
        a, b = self._coerce(other)
        return bool(np.max(np.abs(a - b)) <= atol)

    def __getitem__(self, n):
        return self.coeffs[n]

    def __repr__(self) -> str:
        head = ", ".join(f"{v:.4g}" for v in self.coeffs[:6])
        tail = ", ..." if self.order > 5 else ""
        return f"Series([{head}{tail}], order={self.order})"
