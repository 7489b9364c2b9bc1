"""Complex-plane numerics shared by every other module.

Contents: 2x2 matrix helpers, piecewise paths built from line and arc
segments, an adaptive Dormand-Prince 5(4) integrator that follows such a
path, and a Lanczos implementation of the complex log-gamma function.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import NonFiniteState, NumericError, PathError, PoleOfGamma, StepUnderflow

# ---------------------------------------------------------------------------
# 2x2 matrices

IDENTITY = np.eye(2, dtype=complex)
SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA3 = np.array([[1, 0], [0, -1]], dtype=complex)

INVERTIBILITY_FLOOR = 1e-12


def mat2(a11: complex, a12: complex, a21: complex, a22: complex) -> np.ndarray:
    m = np.array([[a11, a12], [a21, a22]], dtype=complex)
    if not np.all(np.isfinite(m)):
        raise NonFiniteState("matrix entries must be finite")
    return m


def det2(m: np.ndarray) -> complex:
    return complex(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])


def is_invertible(m: np.ndarray, floor: float = INVERTIBILITY_FLOOR) -> bool:
    """True when |det m| clears ``floor * ||m||^2`` (Frobenius norm)."""
    scale = float(np.sum(np.abs(m) ** 2))
    return abs(det2(m)) > floor * scale


def inv2(m: np.ndarray, floor: float = INVERTIBILITY_FLOOR) -> np.ndarray:
    if not is_invertible(m, floor):
        raise NumericError("matrix is numerically singular")
    d = det2(m)
    return np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]], dtype=complex) / d


def exp_sigma3(c: complex) -> np.ndarray:
    """The diagonal matrix exp(c * sigma3)."""
    return np.diag([cmath.exp(c), cmath.exp(-c)]).astype(complex)


def lower(s: complex) -> np.ndarray:
    return np.array([[1, 0], [s, 1]], dtype=complex)


def upper(s: complex) -> np.ndarray:
    return np.array([[1, s], [0, 1]], dtype=complex)


# ---------------------------------------------------------------------------
# paths

EXCLUSION_RADIUS = 1e-3


@dataclass(frozen=True)
class LineSegment:
    start: complex
    end: complex

    def point(self, s: float) -> complex:
        return self.start + (self.end - self.start) * s

    def tangent(self, s: float) -> complex:
        return self.end - self.start

    @property
    def length(self) -> float:
        return abs(self.end - self.start)

    def reversed(self) -> "LineSegment":
        return LineSegment(self.end, self.start)

    def distance_to(self, p: complex) -> float:
        d = self.end - self.start
        if d == 0:
            return abs(p - self.start)
        t = ((p - self.start) * d.conjugate()).real / abs(d) ** 2
        t = min(1.0, max(0.0, t))
        return abs(p - self.point(t))


@dataclass(frozen=True)
class ArcSegment:
    """Circular arc ``center + radius * exp(i*theta)`` for theta from theta0 to theta1."""

    center: complex
    radius: float
    theta0: float
    theta1: float

    def point(self, s: float) -> complex:
        th = self.theta0 + (self.theta1 - self.theta0) * s
        return self.center + self.radius * cmath.exp(1j * th)

    def tangent(self, s: float) -> complex:
        th = self.theta0 + (self.theta1 - self.theta0) * s
        return 1j * (self.theta1 - self.theta0) * self.radius * cmath.exp(1j * th)

    @property
    def start(self) -> complex:
        return self.point(0.0)

    @property
    def end(self) -> complex:
        return self.point(1.0)

    @property
    def length(self) -> float:
        return abs(self.theta1 - self.theta0) * self.radius

    def reversed(self) -> "ArcSegment":
        return ArcSegment(self.center, self.radius, self.theta1, self.theta0)

    def distance_to(self, p: complex) -> float:
        w = p - self.center
        lo, hi = sorted((self.theta0, self.theta1))
        if abs(w) > 0:
            phi = cmath.phase(w)
            # bring phi into [lo, lo + 2pi)
            k = math.floor((phi - lo) / (2 * math.pi))
            phi -= 2 * math.pi * k
            if phi <= hi:
                return abs(abs(w) - self.radius)
        return min(abs(p - self.start), abs(p - self.end))


Segment = LineSegment | ArcSegment


@dataclass(frozen=True)
class Path:
    """Ordered chain of segments sharing endpoints."""

    segments: tuple[Segment, ...]

    def __post_init__(self):
        segs = tuple(self.segments)
        object.__setattr__(self, "segments", segs)
        for a, b in zip(segs, segs[1:]):
            gap = abs(a.end - b.start)
            if gap > 1e-9 * max(1.0, abs(a.end)):
                raise PathError(f"segments do not join: gap {gap:.3e}")

    @staticmethod
    def line(z0: complex, z1: complex) -> "Path":
        return Path((LineSegment(complex(z0), complex(z1)),))

    @staticmethod
    def arc(center: complex, radius: float, theta0: float, theta1: float) -> "Path":
        return Path((ArcSegment(complex(center), float(radius), float(theta0), float(theta1)),))

    @staticmethod
    def polyline(points: Sequence[complex]) -> "Path":
        pts = [complex(p) for p in points]
        return Path(tuple(LineSegment(a, b) for a, b in zip(pts, pts[1:])))

    def __add__(self, other: "Path") -> "Path":
        return Path(self.segments + other.segments)

    @property
    def start(self) -> complex:
        return self.segments[0].start

    @property
    def end(self) -> complex:
        return self.segments[-1].end

    @property
    def length(self) -> float:
        return float(sum(s.length for s in self.segments))

    def reversed(self) -> "Path":
        return Path(tuple(s.reversed() for s in reversed(self.segments)))

    def distance_to(self, p: complex) -> float:
        return min(s.distance_to(p) for s in self.segments)

    def check_clear(self, points: Iterable[complex], radius: float = EXCLUSION_RADIUS) -> None:
        for p in points:
            d = self.distance_to(p)
            if d < radius:
                raise PathError(f"path passes within {d:.2e} of singular point {p}")


# ---------------------------------------------------------------------------
# adaptive integration

@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = 0.5
    min_step: float = 1e-13
    dense_output: bool = False

    def __post_init__(self):
        if not (0 < self.rel_tol < 1 and 0 < self.abs_tol < 1):
            raise ValueError("tolerances must lie in (0, 1)")
        if not (0 < self.min_step <= self.max_step):
            raise ValueError("need 0 < min_step <= max_step")


@dataclass
class IntegrationResult:
    final: np.ndarray
    z_end: complex
    accepted: int
    rejected: int
    evaluations: int
    samples_z: list[complex] = field(default_factory=list)
    samples_y: list[np.ndarray] = field(default_factory=list)
    stopped: bool = False


# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)

_BETA = 0.04
_EXPO = 0.2 - 0.75 * _BETA


def integrate(
    system: Callable[[complex, np.ndarray], np.ndarray],
    path: Path,
    y0,
    cfg: IntegratorConfig | None = None,
    stop: Callable[[complex, np.ndarray], bool] | None = None,
) -> IntegrationResult:
    """Integrate dY/dz = system(z, Y) along ``path`` starting from ``y0``.

    The state may be a vector or a matrix; the derivative must have the same
    shape. ``stop``, when given, is called after every accepted step and halts
    the integration early when it returns True.
    """
    cfg = cfg or IntegratorConfig()
    y = np.array(y0, dtype=complex)
    shape = y.shape
    y = y.ravel().copy()
    if not np.all(np.isfinite(y)):
        raise NonFiniteState("initial state is not finite")

    def f(z, yy):
        return np.asarray(system(z, yy.reshape(shape)), dtype=complex).ravel()

    res = IntegrationResult(final=y, z_end=path.start, accepted=0, rejected=0, evaluations=0)
    if cfg.dense_output:
        res.samples_z.append(path.start)
        res.samples_y.append(y.reshape(shape).copy())

    for seg in path.segments:
        length = seg.length
        if length == 0:
            continue
        y, halted = _integrate_segment(f, seg, y, cfg, res, shape, stop)
        res.z_end = seg.end if not halted else res.z_end
        if halted:
            res.stopped = True
            break
    res.final = y.reshape(shape)
    return res


def _integrate_segment(f, seg, y, cfg, res, shape, stop):
    length = seg.length
    line = isinstance(seg, LineSegment)
    if line:
        z0 = seg.start
        dz = seg.end - seg.start

        def point(s):
            return z0 + dz * s

        def tangent(s):
            return dz
    else:
        point, tangent = seg.point, seg.tangent

    hmax = min(1.0, cfg.max_step / length)
    hmin = cfg.min_step / length
    rtol, atol = cfg.rel_tol, cfg.abs_tol

    s = 0.0
    z = point(0.0)
    k1 = f(z, y) * tangent(0.0)
    res.evaluations += 1
    # initial step from the usual derivative-based heuristic
    sc = atol + rtol * np.abs(y)
    d0 = float(np.max(np.abs(y) / sc))
    d1 = float(np.max(np.abs(k1) / sc))
    h = 0.01 * d0 / d1 if d0 > 1e-5 and d1 > 1e-5 else 1e-6
    h = min(max(h, hmin), hmax, 1.0)
    facold = 1e-4
    reject_last = False
    A, C, E = _A, _C, _E
    while s < 1.0:
        if s + h > 1.0:
            h = 1.0 - s
        ks = [k1]
        for i in range(1, 7):
            row = A[i]
            acc = y.copy()
            for j, aij in enumerate(row):
                if aij != 0.0:
                    acc += (h * aij) * ks[j]
            si = s + C[i] * h
            if i == 6:
                ynew = acc
            ks.append(f(point(si), acc) * tangent(si))
        res.evaluations += 6
        err_vec = h * (E[0] * ks[0] + E[2] * ks[2] + E[3] * ks[3] + E[4] * ks[4] + E[5] * ks[5] + E[6] * ks[6])
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(ynew))
        err = float(np.max(np.abs(err_vec) / scale))
        if not np.isfinite(err):
            if h <= hmin:
                raise NonFiniteState(f"non-finite state near z={point(s)}")
            h *= 0.1
            res.rejected += 1
            reject_last = True
            continue
        fac11 = err ** _EXPO if err > 0 else 0.0
        fac = fac11 / facold ** _BETA
        fac = max(0.1, min(5.0, fac / 0.9))
        hnew = h / fac if fac > 0 else h * 10.0
        if err <= 1.0:
            facold = max(err, 1e-4)
            s += h
            y = ynew
            k1 = ks[6]
            res.accepted += 1
            if not np.all(np.isfinite(y)):
                raise NonFiniteState(f"non-finite state near z={point(s)}")
            zc = point(s) if s < 1.0 else seg.end
            if res.samples_z is not None and cfg.dense_output:
                res.samples_z.append(zc)
                res.samples_y.append(y.reshape(shape).copy())
            if stop is not None and stop(zc, y.reshape(shape)):
                res.z_end = zc
                return y, True
            if reject_last:
                hnew = min(hnew, h)
            reject_last = False
            h = min(hnew, hmax)
        else:
            res.rejected += 1
            reject_last = True
            h = h / min(10.0, fac11 / 0.9)
        if h < hmin and s < 1.0 - 1e-15:
            raise StepUnderflow(f"step size underflow near z={point(s)}")
    return y, False


def integrate_linear_with_trace(
    matrix: Callable[[complex], np.ndarray],
    path: Path,
    y0: np.ndarray,
    cfg: IntegratorConfig | None = None,
) -> tuple[np.ndarray, complex]:
    """Integrate Y' = A(z) Y and, alongside it, the integral of tr A.

    Returns the final fundamental matrix and the accumulated trace integral,
    which together allow checking det Y = det Y0 * exp(int tr A).
    """
    y0 = np.asarray(y0, dtype=complex)
    n = y0.size

    def rhs(z, st):
        a = matrix(z)
        yy = st[:n].reshape(y0.shape)
        out = np.empty(n + 1, dtype=complex)
        out[:n] = (a @ yy).ravel()
        out[n] = a[0, 0] + a[1, 1]
        return out

    st0 = np.concatenate([y0.ravel(), [0.0]])
    r = integrate(rhs, path, st0, cfg)
    return r.final[:n].reshape(y0.shape), complex(r.final[n])


def abel_defect(y0: np.ndarray, y1: np.ndarray, trace_integral: complex) -> float:
    """Relative violation of det Y1 = det Y0 * exp(trace_integral)."""
    lhs = det2(y1)
    rhs = det2(y0) * cmath.exp(trace_integral)
    return abs(lhs - rhs) / max(abs(rhs), 1e-300)


# ---------------------------------------------------------------------------
# log-gamma

_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2 * math.pi)


def _lanczos_log_gamma(z: complex) -> complex:
    # valid for Re z >= 1/2
    zm = z - 1.0
    acc = _LANCZOS[0]
    for k in range(1, 9):
        acc += _LANCZOS[k] / (zm + k)
    t = zm + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (zm + 0.5) * cmath.log(t) - t + cmath.log(acc)


def log_gamma(z: complex) -> complex:
    """log Gamma(z) on the branch continuous from the positive real axis.

    This is the same branch as the standard ``loggamma`` special function:
    exp(log_gamma(z)) = Gamma(z) and log_gamma(z+1) = log_gamma(z) + log z away
    from the non-positive real axis.
    """
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise PoleOfGamma("argument must be finite")
    if z.imag == 0 and z.real <= 0 and z.real == math.floor(z.real):
        raise PoleOfGamma(f"Gamma has a pole at {z.real:g}")
    if z.real >= 0.5:
        return _lanczos_log_gamma(z)
    # reflection gives the value, the recurrence picks the branch
    val = math.log(math.pi) - cmath.log(cmath.sin(math.pi * z)) - _lanczos_log_gamma(1.0 - z)
    n = math.ceil(0.5 - z.real)
    arg_ref = _lanczos_log_gamma(z + n).imag - sum(cmath.phase(z + k) for k in range(n))
    turns = round((arg_ref - val.imag) / (2 * math.pi))
    return complex(val.real, val.imag + 2 * math.pi * turns)


def gamma(z: complex) -> complex:
    return cmath.exp(log_gamma(z))


def arg_gamma(z: complex) -> float:
    """Continuous argument of Gamma(z), i.e. Im log_gamma(z)."""
    return log_gamma(z).imag
