"""Truncated univariate Taylor series ("jets").

A :class:`Jet` of order ``N`` at base point ``x0`` stores the normalized
Taylor coefficients ``c[i] = f^(i)(x0) / i!`` for ``i = 0..N``.  Arithmetic is
exact up to truncation, so derivatives of composed expressions come out to
machine precision without step-size tuning.

Binary operations between jets of different order silently truncate to the
smaller order; mixing base points is an error.
"""

from dataclasses import dataclass
from math import factorial
from typing import Optional

import numpy as np

from . import kernels
from .errors import (
    DivisionBySingularJet,
    NormalizeZeroVector,
    OrderExceeded,
    SqrtOfNonpositive,
)

#: Default zero tolerance, applied after scaling by ``max(1, max|coeff|)``.
ZERO_TOL = 1e-9
#: Default truncation order.
DEFAULT_ORDER = 12


def jet_scale(coeffs):
    """Local scale used by the zero test: ``max(1, max |coeff|)``."""
    if len(coeffs) == 0:
        return 1.0
    return max(1.0, float(np.max(np.abs(coeffs))))


class Jet:
    __slots__ = ("x0", "c")

    def __init__(self, coeffs, x0=0.0):
        c = np.array(coeffs, dtype=float)
        if c.ndim != 1 or c.shape[0] == 0:
            raise ValueError("jet needs a non-empty 1-D coefficient array")
        c.setflags(write=False)
        self.c = c
        self.x0 = float(x0)

    @classmethod
    def _raw(cls, c, x0):
        # trusted constructor: c is a fresh float array
        j = object.__new__(cls)
        c.setflags(write=False)
        j.c = c
        j.x0 = x0
        return j

    @classmethod
    def constant(cls, value, x0=0.0, order=DEFAULT_ORDER):
        c = np.zeros(order + 1)
        c[0] = value
        return cls._raw(c, float(x0))

    @classmethod
    def variable(cls, x0=0.0, order=DEFAULT_ORDER):
        c = np.zeros(order + 1)
        c[0] = x0
        if order >= 1:
            c[1] = 1.0
        return cls._raw(c, float(x0))

    @property
    def order(self):
        return self.c.shape[0] - 1

    @property
    def coeffs(self):
        return self.c

    @property
    def value(self):
        return float(self.c[0])

    def __repr__(self):
        return f"Jet({self.c.tolist()!r}, x0={self.x0!r})"

    def __len__(self):
        return self.c.shape[0]

    # -- alignment --------------------------------------------------------
    def _pair(self, other):
        if isinstance(other, Jet):
            if other.x0 != self.x0:
                raise ValueError(f"base points differ: {self.x0} vs {other.x0}")
            n = min(self.c.shape[0], other.c.shape[0])
            return self.c[:n], other.c[:n]
        c = np.zeros(self.c.shape[0])
        c[0] = float(other)
        return self.c, c

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        a, b = self._pair(other)
        return Jet._raw(a + b, self.x0)

    __radd__ = __add__

    def __sub__(self, other):
        a, b = self._pair(other)
        return Jet._raw(a - b, self.x0)

    def __rsub__(self, other):
        a, b = self._pair(other)
        return Jet._raw(b - a, self.x0)

    def __neg__(self):
        return Jet._raw(-self.c, self.x0)

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet._raw(self.c * float(other), self.x0)
        a, b = self._pair(other)
        return Jet._raw(kernels.mul(a, b), self.x0)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            other = float(other)
            if other == 0.0:
                raise DivisionBySingularJet("division by zero constant")
            return Jet._raw(self.c / other, self.x0)
        a, b = self._pair(other)
        if abs(b[0]) <= ZERO_TOL:
            raise DivisionBySingularJet(
                f"denominator vanishes at x0={self.x0} (leading coefficient {b[0]:.3e})"
            )
        return Jet._raw(kernels.div(np.ascontiguousarray(a), np.ascontiguousarray(b)), self.x0)

    def __rtruediv__(self, other):
        return Jet.constant(other, self.x0, self.order) / self

    def __pow__(self, n):
        if not isinstance(n, (int, np.integer)) or n < 0:
            raise ValueError("jets support non-negative integer powers only")
        result = Jet.constant(1.0, self.x0, self.order)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- elementary functions ---------------------------------------------
    def sqrt(self, tol=ZERO_TOL):
        if self.c[0] <= tol:
            raise SqrtOfNonpositive(
                f"sqrt of jet with leading coefficient {self.c[0]:.3e} at x0={self.x0}"
            )
        return Jet._raw(kernels.sqrt(np.ascontiguousarray(self.c)), self.x0)

    def exp(self):
        return Jet._raw(kernels.exp(np.ascontiguousarray(self.c)), self.x0)

    def sin(self):
        s, _ = kernels.sincos(np.ascontiguousarray(self.c))
        return Jet._raw(s, self.x0)

    def cos(self):
        _, c = kernels.sincos(np.ascontiguousarray(self.c))
        return Jet._raw(c, self.x0)

    # -- calculus / structure ---------------------------------------------
    def deriv(self):
        """Derivative jet; its order is one less."""
        n = self.c.shape[0]
        if n < 2:
            raise OrderExceeded("cannot differentiate an order-0 jet")
        return Jet._raw(self.c[1:] * np.arange(1, n), self.x0)

    def derivative(self, n):
        return derivative_coefficient(self, n)

    def shift_down(self, m):
        """Divide by ``(x - x0)^m``, dropping the first ``m`` coefficients."""
        if m == 0:
            return self
        if m > self.order:
            raise OrderExceeded(f"shift by {m} exceeds order {self.order}")
        return Jet._raw(self.c[m:].copy(), self.x0)

    def mul_xpow(self, m):
        """Multiply by ``(x - x0)^m``; the order grows by ``m``."""
        if m == 0:
            return self
        return Jet._raw(np.concatenate([np.zeros(m), self.c]), self.x0)

    def truncate(self, order):
        if order > self.order:
            raise OrderExceeded(f"cannot raise order {self.order} to {order}")
        return Jet._raw(self.c[: order + 1].copy(), self.x0)

    def evaluate(self, x):
        """Evaluate the Taylor polynomial at ``x`` (scalar or array)."""
        h = np.asarray(x, dtype=float) - self.x0
        acc = np.zeros_like(h) + self.c[-1]
        for ci in self.c[-2::-1]:
            acc = acc * h + ci
        return acc if acc.ndim else float(acc)

    def scale(self):
        return jet_scale(self.c)


def make_variable(x0, N):
    """Jet of the identity function at ``x0``."""
    if N < 0:
        raise ValueError("order must be non-negative")
    return Jet.variable(x0, N)


_ARITH = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
    "div": lambda a, b: a / b,
}


def arith(op, a, b):
    return _ARITH[op](a, b)


def elementary(fn, a):
    if fn not in ("sqrt", "sin", "cos", "exp"):
        raise ValueError(f"unknown elementary function {fn!r}")
    return getattr(a, fn)()


def derivative_coefficient(a, n):
    """``f^(n)(x0) = n! * c[n]``."""
    if n < 0 or n > a.order:
        raise OrderExceeded(f"derivative order {n} exceeds jet order {a.order}")
    return factorial(n) * float(a.c[n])


@dataclass(frozen=True)
class Valuation:
    """Order of vanishing ``m`` and cofactor, or the zero-to-order-N flag (``m is None``)."""

    m: Optional[int]
    unit_part: Optional[object]
    order: int

    @property
    def is_zero(self):
        return self.m is None

    @property
    def label(self):
        return "zero-to-order-N" if self.m is None else self.m

    def at_least(self, k):
        """True when the valuation is >= ``k`` (infinite counts as >= anything)."""
        return self.m is None or self.m >= k

    @property
    def leading(self):
        """Leading value of the cofactor (a float, or a vector for vector valuations)."""
        if self.m is None:
            return None
        u = self.unit_part
        if isinstance(u, Jet):
            return u.value
        return u.value()


def valuation(a, tol=ZERO_TOL):
    scale = jet_scale(a.c)
    nz = np.nonzero(np.abs(a.c) > tol * scale)[0]
    if nz.size == 0:
        return Valuation(None, None, a.order)
    m = int(nz[0])
    return Valuation(m, a.shift_down(m), a.order)


class Vec3Jet:
    __slots__ = ("x", "y", "z")

    def __init__(self, x, y, z):
        if not (x.x0 == y.x0 == z.x0):
            raise ValueError("components must share a base point")
        n = min(x.order, y.order, z.order)
        if not (x.order == y.order == z.order):
            x, y, z = x.truncate(n), y.truncate(n), z.truncate(n)
        self.x, self.y, self.z = x, y, z

    @classmethod
    def constant(cls, v, x0=0.0, order=DEFAULT_ORDER):
        return cls(*(Jet.constant(float(c), x0, order) for c in v))

    @classmethod
    def from_matrix(cls, m, x0):
        return cls(Jet(m[0], x0), Jet(m[1], x0), Jet(m[2], x0))

    def __iter__(self):
        return iter((self.x, self.y, self.z))

    def __repr__(self):
        return f"Vec3Jet({self.x!r}, {self.y!r}, {self.z!r})"

    @property
    def order(self):
        return self.x.order

    @property
    def x0(self):
        return self.x.x0

    def matrix(self):
        """Coefficients as a ``(3, order + 1)`` array."""
        return np.vstack([self.x.c, self.y.c, self.z.c])

    def value(self):
        return np.array([self.x.c[0], self.y.c[0], self.z.c[0]])

    def derivative_vector(self, n):
        return np.array([derivative_coefficient(c, n) for c in self])

    def evaluate(self, s):
        return np.array([c.evaluate(s) for c in self])

    def __add__(self, o):
        return Vec3Jet(self.x + o.x, self.y + o.y, self.z + o.z)

    def __sub__(self, o):
        return Vec3Jet(self.x - o.x, self.y - o.y, self.z - o.z)

    def __neg__(self):
        return Vec3Jet(-self.x, -self.y, -self.z)

    def scale(self, s):
        """Multiply every component by a jet or a float."""
        return Vec3Jet(self.x * s, self.y * s, self.z * s)

    def dot(self, o):
        return self.x * o.x + self.y * o.y + self.z * o.z

    def cross(self, o):
        return Vec3Jet(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )

    def norm(self, tol=ZERO_TOL):
        n2 = self.dot(self)
        if n2.c[0] <= tol * tol:
            raise NormalizeZeroVector(f"vector jet vanishes at x0={self.x0}")
        return n2.sqrt(tol * tol)

    def normalize(self, tol=ZERO_TOL):
        n = self.norm(tol)
        return Vec3Jet(self.x / n, self.y / n, self.z / n)

    def deriv(self):
        return Vec3Jet(self.x.deriv(), self.y.deriv(), self.z.deriv())

    def shift_down(self, m):
        return Vec3Jet(self.x.shift_down(m), self.y.shift_down(m), self.z.shift_down(m))

    def truncate(self, order):
        return Vec3Jet(self.x.truncate(order), self.y.truncate(order), self.z.truncate(order))


def vec_valuation(v, tol=ZERO_TOL):
    """Joint valuation of the three components: ``v = x^m * u`` with ``u(x0) != 0``."""
    mat = v.matrix()
    scale = max(1.0, float(np.max(np.abs(mat))))
    nz = np.nonzero(np.any(np.abs(mat) > tol * scale, axis=0))[0]
    if nz.size == 0:
        return Valuation(None, None, v.order)
    m = int(nz[0])
    return Valuation(m, v.shift_down(m), v.order)


def det3(a, b, c):
    """Determinant of three vector jets (triple product)."""
    return a.dot(b.cross(c))


def vec_ops(op, a, b=None):
    if op == "dot":
        return a.dot(b)
    if op == "cross":
        return a.cross(b)
    if op == "norm":
        return a.norm()
    if op == "normalize":
        return a.normalize()
    raise ValueError(f"unknown vector op {op!r}")
