"""Truncated Laurent series and order-by-order solution of analytic ODEs.

A :class:`Ser` stores coefficients of t^v, t^(v+1), ... up to a fixed
truncation order. Only the operations needed by the local expansions and
the formal solutions at irregular points are provided.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .errors import NoConvergence


@dataclass
class Ser:
    val: int
    c: np.ndarray  # coefficient of t**(val + k) is c[k]

    @property
    def top(self) -> int:
        """One past the highest stored power."""
        return self.val + len(self.c)

    @staticmethod
    def const(x: complex, top: int) -> "Ser":
        n = max(top, 1)
        c = np.zeros(n, dtype=complex)
        c[0] = x
        return Ser(0, c)

    @staticmethod
    def monomial(x: complex, power: int, top: int) -> "Ser":
        n = max(top - power, 1)
        c = np.zeros(n, dtype=complex)
        c[0] = x
        return Ser(power, c)

    def coef(self, power: int) -> complex:
        k = power - self.val
        if 0 <= k < len(self.c):
            return complex(self.c[k])
        return 0j

    def truncate(self, top: int) -> "Ser":
        n = max(top - self.val, 0)
        if n >= len(self.c):
            return self
        return Ser(self.val, self.c[:n].copy())

    def _align(self, other: "Ser"):
        val = min(self.val, other.val)
        top = min(self.top, other.top)
        n = max(top - val, 0)
        a = np.zeros(n, dtype=complex)
        b = np.zeros(n, dtype=complex)
        for src, dst in ((self, a), (other, b)):
            lo = src.val - val
            m = min(len(src.c), n - lo)
            if m > 0:
                dst[lo:lo + m] = src.c[:m]
        return val, a, b

    def __add__(self, other):
        if not isinstance(other, Ser):
            other = Ser.const(other, self.top)
        val, a, b = self._align(other)
        return Ser(val, a + b)

    __radd__ = __add__

    def __neg__(self):
        return Ser(self.val, -self.c)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Ser) else -complex(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Ser):
            return Ser(self.val, self.c * complex(other))
        val = self.val + other.val
        top = min(self.top + other.val, other.top + self.val)
        n = max(top - val, 0)
        prod = np.convolve(self.c, other.c)[:n]
        if len(prod) < n:
            prod = np.concatenate([prod, np.zeros(n - len(prod), dtype=complex)])
        return Ser(val, prod)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = Ser.const(1.0, self.top - self.val)
        for _ in range(k):
            out = out * self
        return out

    def inverse(self) -> "Ser":
        """Reciprocal; the leading stored coefficient must be nonzero."""
        if abs(self.c[0]) == 0:
            raise ZeroDivisionError("leading coefficient vanishes")
        n = len(self.c)
        inv = np.zeros(n, dtype=complex)
        inv[0] = 1.0 / self.c[0]
        for k in range(1, n):
            inv[k] = -np.dot(self.c[1:k + 1], inv[k - 1::-1][:k]) / self.c[0]
        return Ser(-self.val, inv)

    def __truediv__(self, other):
        if not isinstance(other, Ser):
            return Ser(self.val, self.c / complex(other))
        return self * other.inverse()

    def deriv(self) -> "Ser":
        powers = np.arange(self.val, self.top)
        return Ser(self.val - 1, self.c * powers)

    def __call__(self, t: complex) -> complex:
        powers = np.arange(self.val, self.top)
        return complex(np.sum(self.c * np.power(complex(t), powers)))


def solve_series(
    residual: Callable[[Ser], Ser],
    val: int,
    leading: complex,
    order: int,
    free: Mapping[int, complex] | None = None,
    resonance_tol: float = 1e-9,
    base: int | None = None,
) -> tuple[Ser, list[int]]:
    """Determine a series solution term by term.

    ``residual`` maps a trial series y (valuation ``val``, ``order`` stored
    terms) to the series of the equation's residual. The coefficient c_k is
    fixed from the lowest residual coefficient in which it enters linearly.
    Positions listed in ``free`` are resonances whose value is imposed.
    The residual position where c_k enters is ``base + k``; by default it is
    found by perturbing c_1.
    Returns the series and the list of resonant positions encountered.
    """
    free = dict(free or {})
    c = np.zeros(order, dtype=complex)
    c[0] = leading
    probe = residual(Ser(val, c.copy()))
    # The offset is where c_0 first acts, unless the lowest balance vanishes
    # identically (free leading coefficient); then c_1 enters one order
    # earlier than c_0 does. Taking the smaller estimate covers both cases.
    bump = 1e-3 * max(1.0, abs(leading))
    ref = 1.0
    found = []
    for j in ((0, 1) if order > 1 else (0,)):
        cj = c.copy()
        cj[j] += bump
        diff = residual(Ser(val, cj)) - probe
        nz = np.nonzero(np.abs(diff.c) > 1e-12 * max(1.0, float(np.max(np.abs(diff.c)))))[0]
        if len(nz):
            p = diff.val + int(nz[0])
            found.append((p - j, abs(diff.coef(p)) / bump))
    if not found:
        raise NoConvergence("leading coefficients do not enter the residual")
    if base is None:
        base = min(f[0] for f in found)
    ref = max(1.0, max(f[1] for f in found))
    resonances: list[int] = []
    for k in range(1, order):
        c[k] = 0.0
        r0 = residual(Ser(val, c.copy())).coef(base + k)
        h = max(1.0, abs(r0))
        c[k] = h
        r1 = residual(Ser(val, c.copy())).coef(base + k)
        lin = (r1 - r0) / h
        if abs(lin) <= resonance_tol * ref:
            resonances.append(k)
            if k not in free:
                size = max(1.0, float(np.max(np.abs(c[:k])))) ** 2
                if abs(r0) > 1e-7 * size:
                    raise NoConvergence(f"incompatible resonance at order {k}")
                c[k] = 0.0
            else:
                c[k] = free[k]
            continue
        if k in free:
            raise NoConvergence(f"position {k} is not a resonance of this expansion")
        c[k] = -r0 / lin
    return Ser(val, c), resonances
