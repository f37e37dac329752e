"""Truncated second-order jets for exact diagonal second derivatives.

A :class:`Jet2` carries a value, its gradient and the *diagonal* of its
Hessian with respect to ``n`` seeded coordinates.  Cross terms are never
needed: the Laplace-type operators in this package only sum ``d^2/dx_c^2``.
"""
from __future__ import annotations

import cmath
import math
import numbers

import mpmath
import numpy as np


class Jet2:
    __slots__ = ("val", "d1", "d2")
    # make numpy scalars defer to our reflected operators
    __array_ufunc__ = None

    def __init__(self, val, d1, d2):
        self.val = val
        self.d1 = d1
        self.d2 = d2

    @classmethod
    def variable(cls, value, index: int, n: int) -> "Jet2":
        d1 = np.zeros(n)
        d1[index] = 1.0
        return cls(value, d1, np.zeros(n))

    @classmethod
    def constant(cls, value, n: int) -> "Jet2":
        return cls(value, np.zeros(n), np.zeros(n))

    @classmethod
    def seed(cls, values) -> list["Jet2"]:
        """One independent variable per entry of ``values``."""
        n = len(values)
        return [cls.variable(v, i, n) for i, v in enumerate(values)]

    def __repr__(self):
        return f"Jet2({self.val!r}, d1={self.d1!r}, d2={self.d2!r})"

    def _chain(self, f0, f1, f2) -> "Jet2":
        # h = phi(g): h' = phi' g', h'' = phi'' g'^2 + phi' g''
        return Jet2(f0, f1 * self.d1, f2 * self.d1 * self.d1 + f1 * self.d2)

    def __add__(self, other):
        if isinstance(other, Jet2):
            return Jet2(self.val + other.val, self.d1 + other.d1, self.d2 + other.d2)
        if isinstance(other, numbers.Number):
            return Jet2(self.val + other, self.d1, self.d2)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return Jet2(-self.val, -self.d1, -self.d2)

    def __pos__(self):
        return self

    def __sub__(self, other):
        if isinstance(other, (Jet2, numbers.Number)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet2):
            a, b = self, other
            return Jet2(a.val * b.val,
                        a.val * b.d1 + a.d1 * b.val,
                        a.d2 * b.val + 2 * a.d1 * b.d1 + a.val * b.d2)
        if isinstance(other, numbers.Number):
            return Jet2(self.val * other, self.d1 * other, self.d2 * other)
        return NotImplemented

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet2":
        v = self.val
        return self._chain(1 / v, -1 / (v * v), 2 / (v * v * v))

    def __truediv__(self, other):
        if isinstance(other, Jet2):
            return self * other.reciprocal()
        if isinstance(other, numbers.Number):
            return self * (1 / other)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, numbers.Number):
            return self.reciprocal() * other
        return NotImplemented

    def __pow__(self, k):
        if not isinstance(k, numbers.Integral):
            return NotImplemented
        if k < 0:
            return (self ** (-k)).reciprocal()
        out = Jet2.constant(1.0, len(self.d1))
        for _ in range(k):
            out = out * self
        return out

    def sin(self):
        s, c = _sin(self.val), _cos(self.val)
        return self._chain(s, c, -s)

    def cos(self):
        s, c = _sin(self.val), _cos(self.val)
        return self._chain(c, -s, -c)

    def exp(self):
        e = _exp(self.val)
        return self._chain(e, e, e)


_MP = (mpmath.mpf, mpmath.mpc)


def _sin(x):
    if isinstance(x, _MP):
        return mpmath.sin(x)
    return cmath.sin(x) if isinstance(x, complex) else math.sin(x)


def _cos(x):
    if isinstance(x, _MP):
        return mpmath.cos(x)
    return cmath.cos(x) if isinstance(x, complex) else math.cos(x)


def _exp(x):
    if isinstance(x, _MP):
        return mpmath.exp(x)
    return cmath.exp(x) if isinstance(x, complex) else math.exp(x)


def sin(x):
    return x.sin() if isinstance(x, Jet2) else _sin(x)


def cos(x):
    return x.cos() if isinstance(x, Jet2) else _cos(x)


def exp(x):
    return x.exp() if isinstance(x, Jet2) else _exp(x)


def value(x):
    return x.val if isinstance(x, Jet2) else x


def determinant(rows):
    """Determinant of a square matrix of numbers or jets.

    Sizes up to 3 use cofactor expansion; larger ones LU with partial
    pivoting (numpy's LAPACK path when every entry is a plain float or
    complex; jets and mpmath numbers go through the generic LU).
    The empty determinant is 1.
    """
    n = len(rows)
    if n == 0:
        return 1.0
    if any(len(r) != n for r in rows):
        raise ValueError("determinant needs a square matrix")
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    if n == 3:
        (a, b, c), (d, e, f), (g, h, i) = rows
        return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)
    if not any(isinstance(x, (Jet2,) + _MP) for r in rows for x in r):
        return complex(np.linalg.det(np.array(rows, dtype=complex)))
    return _lu_det([list(r) for r in rows])


def _lu_det(a):
    n = len(a)
    det = 1.0
    for k in range(n):
        piv = max(range(k, n), key=lambda i: abs(value(a[i][k])))
        if value(a[piv][k]) == 0:
            return 0.0 * a[k][k]
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            det = -det
        pivot = a[k][k]
        det = pivot * det
        for i in range(k + 1, n):
            factor = a[i][k] / pivot
            for j in range(k + 1, n):
                a[i][j] = a[i][j] - factor * a[k][j]
    return det
