"""Painleve equations: Hamiltonian systems, continuation through movable
singularities and classification of local expansions.

Each equation is integrated as a first-order system in (y, v, T) where v is
the canonical momentum of the Hamiltonian system and T is the Hamiltonian,
equal to m(x) * d/dx log tau with m = 1, x or x(x-1). Carrying T along avoids
the cancellation that evaluating the Hamiltonian directly suffers near poles.

When the solution approaches a pole, zero, one-point (y = 1) or the fixed
point y = x, the path is deformed around it on a small circle. Samples taken
on rays into the event on both sides are fitted with the family's local
expansion, generated to high order from the second-order equation itself.
"""
from __future__ import annotations

import cmath
import csv
import io
import json
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence

import numpy as np

from .complex_core import (
    ArcSegment,
    IntegratorConfig,
    LineSegment,
    Path,
    integrate,
)
from .errors import (
    AmbiguousBranch,
    DivisionByZeroState,
    FixedSingularityHit,
    InputError,
    NoConvergence,
    NumericError,
    PathError,
    UnclassifiableEvent,
)
from .series import Ser, solve_series

PARAM_NAMES: dict[str, tuple[str, ...]] = {
    "P1": (),
    "P2": ("mu",),
    "P34": ("two_alpha",),
    "P3": ("theta0", "thetainf"),
    "P4": ("theta0", "thetainf"),
    "P5": ("theta0", "theta1", "thetainf"),
    "P6": ("theta0", "theta1", "theta2", "thetainf"),
}

# values of y whose attainment is an event, besides poles
_TARGETS: dict[str, tuple[str, ...]] = {
    "P1": (),
    "P2": (),
    "P34": ("zero",),
    "P3": ("zero",),
    "P4": ("zero",),
    "P5": ("zero", "one_point"),
    "P6": ("zero", "one_point", "fixed_point"),
}

FIXED_TOL = 1e-12


@dataclass(frozen=True)
class PainleveKind:
    """A Painleve equation together with its parameters.

    For P34 the stored parameter is 2*alpha.
    """

    name: str
    params: tuple[complex, ...] = ()

    def __post_init__(self):
        if self.name not in PARAM_NAMES:
            raise InputError(f"unknown Painleve equation {self.name!r}")
        ps = tuple(complex(p) for p in self.params)
        if len(ps) != len(PARAM_NAMES[self.name]):
            raise InputError(f"{self.name} takes parameters {PARAM_NAMES[self.name]}")
        if not all(cmath.isfinite(p) for p in ps):
            raise InputError("Painleve parameters must be finite")
        object.__setattr__(self, "params", ps)

    @classmethod
    def make(cls, name: str, **kw) -> "PainleveKind":
        names = PARAM_NAMES.get(name)
        if names is None:
            raise InputError(f"unknown Painleve equation {name!r}")
        extra = set(kw) - set(names)
        missing = [n for n in names if n not in kw]
        if extra or missing:
            raise InputError(f"{name} takes parameters {names}")
        return cls(name, tuple(kw[n] for n in names))

    def __getattr__(self, item):
        names = PARAM_NAMES.get(object.__getattribute__(self, "name"), ())
        if item in names:
            return object.__getattribute__(self, "params")[names.index(item)]
        raise AttributeError(item)

    def as_dict(self) -> dict[str, complex]:
        return dict(zip(PARAM_NAMES[self.name], self.params))

    @property
    def fixed_points(self) -> tuple[complex, ...]:
        return {"P3": (0j,), "P5": (0j,), "P6": (0j, 1 + 0j)}.get(self.name, ())

    @property
    def targets(self) -> tuple[str, ...]:
        return _TARGETS[self.name]

    def tau_multiplier(self, x):
        if self.name in ("P3", "P5"):
            return x
        if self.name == "P6":
            return x * (x - 1)
        return 1.0

    def to_json(self) -> dict:
        return {"name": self.name, "params": {k: [v.real, v.imag] for k, v in self.as_dict().items()}}

    @classmethod
    def from_json(cls, d: dict) -> "PainleveKind":
        ps = {k: complex(*v) if isinstance(v, (list, tuple)) else complex(v) for k, v in d.get("params", {}).items()}
        return cls.make(d["name"], **ps)

    # -- P5 / P6 derived constants
    def pv_coefficients(self) -> tuple[complex, complex, complex]:
        t0, t1, ti = self.params
        return (t0 - t1 + ti) ** 2 / 8, -((t0 - t1 - ti) ** 2) / 8, 1 - t0 - t1

    def pvi_coefficients(self) -> tuple[complex, complex, complex, complex]:
        t0, t1, t2, ti = self.params
        return (ti - 1) ** 2 / 2, -(t0**2) / 2, t1**2 / 2, (1 - t2**2) / 2

    def kappas(self) -> tuple[complex, complex]:
        t0, t1, t2, ti = self.params
        return -(t0 + t1 + t2 - ti) / 2, -(t0 + t1 + t2 + ti) / 2


# ---------------------------------------------------------------------------
# Hamiltonian systems: (y', v', T') given (x, y, v)

def _rhs_p1(x, y, v, p):
    return v, 6 * y * y + x, -y


def _rhs_p2(x, y, v, p):
    (mu,) = p
    return y * y + v + x / 2, -2 * y * v - 0.5 + mu, v / 2


def _rhs_p34(x, y, v, p):
    (ta,) = p
    return 2 * y * v + ta, -v * v + x + 2 * y, -y


def _rhs_p3(x, y, v, p):
    t0, ti = p
    yp = ((4 * v - x) * y * y + (2 * ti - 1) * y + x) / x
    vp = (-4 * y * v * v + (2 * x * y - 2 * ti + 1) * v + (t0 + ti) * x / 2) / x
    return yp, vp, 2 * v - x / 2


def _rhs_p4(x, y, v, p):
    t0, ti = p
    yp = -4 * v + y * y + 2 * x * y + 4 * t0
    vp = -(v - t0 - ti) * y - 2 * v * (v - 2 * t0) / y
    return yp, vp, 2 * (t0 + ti - v)


def _rhs_p5(x, y, v, p):
    t0, t1, ti = p
    A = (t0 - t1 + ti) / 2
    B = (3 * t0 + t1 + ti) / 2
    S = (t0 + t1 + ti) / 2
    yp = (x * y - 2 * v * (y - 1) ** 2 - (y - 1) * (A * y - B)) / x
    vp = (y * v * (v + A) - (v + t0) * (v + S) / y) / x
    return yp, vp, -(t0 + ti + 2 * v) / 2


def _p6_tprime(x, y, v, p):
    t0, t1, t2, ti = p
    A = 4 * y * (x - y) ** 2 * (y - 1)
    B = -4 * (x - y) * (
        t0 * x * y - t0 * x - t0 * y * y + t0 * y + t1 * x * y - t1 * y * y
        - t2 * y * y + t2 * y + ti * y * y - ti * y
    )
    d = x - y
    C = (
        t0**2 * d * (d + 1)
        - ti**2 * d * (x + y - 1)
        + t1**2 * d * (d - 1)
        + t2**2 * (x * x - x + y * y - y)
        + 2 * t0 * ti * d * (y - 1)
        - 2 * t0 * t2 * (x * x + x * y - 2 * x - y * y + y)
        - 2 * t1 * t2 * (x * x + x * y - x - y * y)
        + 2 * t1 * ti * y * d
        - 2 * t2 * ti * y * (y - 1)
        + 2 * t0 * t1 * d * d
    )
    return -(A * v * v + B * v + C) / (4 * x * (x - 1))


def _rhs_p6(x, y, v, p):
    t0, t1, t2, ti = p
    k1 = -(t0 + t1 + t2 - ti) / 2
    k2 = -(t0 + t1 + t2 + ti) / 2
    xx = x * (x - 1)
    yp = (
        2 * v * y * (y - 1) * (y - x)
        - t0 * (y - 1) * (y - x)
        - t1 * y * (y - x)
        - (t2 - 1) * y * (y - 1)
    ) / xx
    vp = (
        (-3 * y * y + 2 * (1 + x) * y - x) * v * v
        + ((2 * y - 1 - x) * t0 + (2 * y - x) * t1 + (2 * y - 1) * (t2 - 1)) * v
        - k1 * (k2 + 1)
    ) / xx
    return yp, vp, _p6_tprime(x, y, v, p)


_RHS = {"P1": _rhs_p1, "P2": _rhs_p2, "P34": _rhs_p34, "P3": _rhs_p3,
        "P4": _rhs_p4, "P5": _rhs_p5, "P6": _rhs_p6}


# ---------------------------------------------------------------------------
# Hamiltonians T = m(x) d/dx log tau

def hamiltonian(kind: PainleveKind, x: complex, y: complex, v: complex) -> complex:
    """The Hamiltonian, i.e. m(x) times the log-derivative of tau."""
    p = kind.params
    n = kind.name
    if n == "P1":
        return 0.5 * v * v - 2 * y**3 - x * y
    if n == "P2":
        (mu,) = p
        return 0.5 * v * v + (y * y + x / 2) * v + (0.5 - mu) * y
    if n == "P34":
        (ta,) = p
        return -y * y + (v * v - x) * y + ta * v
    if n == "P3":
        t0, ti = p
        return (2 * y * y * v * v + (-x * y * y + 2 * ti * y + x) * v
                - (t0 + ti) * x * y / 2 - x * x / 4 - (t0**2 - ti**2) / 4)
    if n == "P4":
        t0, ti = p
        if y == 0:
            raise DivisionByZeroState("the PIV Hamiltonian divides by y")
        return (2 / y) * v * v - (y + 2 * x + 4 * t0 / y) * v + (t0 + ti) * (y + 2 * x)
    if n == "P5":
        t0, t1, ti = p
        if y == 0:
            raise DivisionByZeroState("the PV Hamiltonian divides by y")
        A = (t0 - t1 + ti) / 2
        S = (t0 + t1 + ti) / 2
        return -(v - (v + S) / y) * (v + t0 - y * (v + A)) - (v + (t0 + ti) / 2) * x
    t0, t1, t2, ti = p
    k1, k2 = kind.kappas()
    return (y * (y - 1) * (y - x) * v * v
            - (t0 * (y - 1) * (y - x) + t1 * y * (y - x) + t2 * y * (y - 1)) * v
            + k1 * k2 * (y - x) + t0 * t2 * (x - 1) + t1 * t2 * x)


def p3_tau_from_y(kind: PainleveKind, x, y, yp) -> complex:
    """x d/dx log tau for PIII written through y and y' only."""
    t0, ti = kind.params
    if y == 0:
        raise DivisionByZeroState("the y-only PIII form divides by y")
    return (x * x * yp * yp / (8 * y * y) + x * yp / (4 * y) - x * x / (8 * y * y)
            - x * x * y * y / 8 - ti * x / (2 * y) - t0 * x * y / 2 + 0.125
            - (t0**2 + ti**2) / 4)


def yprime(kind: PainleveKind, x, y, v):
    return _RHS[kind.name](x, y, v, kind.params)[0]


def v_from_yprime(kind: PainleveKind, x, y, yp):
    """Invert the first Hamilton equation for the momentum v."""
    p = kind.params
    n = kind.name
    try:
        if n == "P1":
            return yp
        if n == "P2":
            return yp - y * y - x / 2
        if n == "P34":
            return (yp - p[0]) / (2 * y)
        if n == "P3":
            t0, ti = p
            return (x * yp + x * y * y - (2 * ti - 1) * y - x) / (4 * y * y)
        if n == "P4":
            return (y * y + 2 * x * y + 4 * p[0] - yp) / 4
        if n == "P5":
            t0, t1, ti = p
            A = (t0 - t1 + ti) / 2
            B = (3 * t0 + t1 + ti) / 2
            return (x * y - (y - 1) * (A * y - B) - x * yp) / (2 * (y - 1) ** 2)
        t0, t1, t2, ti = p
        return 0.5 * (yp * x * (x - 1) / (y * (y - 1) * (y - x)) + t0 / y + t1 / (y - 1) + (t2 - 1) / (y - x))
    except ZeroDivisionError:
        raise DivisionByZeroState(f"cannot recover v for {n} at y={y}") from None


# ---------------------------------------------------------------------------
# second-order equations in polynomial form: the terms sum to zero

def ode_terms(kind: PainleveKind, x, y, yp, ypp) -> list:
    """Terms of the second-order equation cleared of denominators.

    Works on numbers and on :class:`Ser` objects alike.
    """
    p = kind.params
    n = kind.name
    if n == "P1":
        return [ypp, -6 * y * y, -x]
    if n == "P2":
        return [ypp, -2 * y * y * y, -x * y, -p[0] * (0 * y + 1)]
    if n == "P34":
        ta = p[0]
        return [2 * y * ypp, -yp * yp, -8 * y * y * y, -4 * x * y * y, ta * ta * (0 * y + 1)]
    if n == "P3":
        t0, ti = p
        return [x * y * ypp, -x * yp * yp, y * yp, -2 * t0 * y * y * y, -(2 - 2 * ti) * y,
                -x * y * y * y * y, x]
    if n == "P4":
        t0, ti = p
        return [2 * y * ypp, -yp * yp, -3 * y * y * y * y, -8 * x * y * y * y,
                -4 * (x * x + 1 - 2 * ti) * y * y, 16 * t0 * t0 * (0 * y + 1)]
    if n == "P5":
        al, be, ga = kind.pv_coefficients()
        y1 = y - 1
        return [2 * x * x * y * y1 * ypp, -x * x * (3 * y - 1) * yp * yp, 2 * x * y * y1 * yp,
                -2 * y1 * y1 * y1 * (al * y * y + be), -2 * ga * x * y * y * y1,
                x * x * y * y * (y + 1)]
    a0, b0, g0, d0 = kind.pvi_coefficients()
    y1 = y - 1
    yx = y - x
    xx = x * (x - 1)
    return [
        2 * xx * xx * y * y1 * yx * ypp,
        -xx * xx * (y1 * yx + y * yx + y * y1) * yp * yp,
        2 * xx * y * y1 * ((2 * x - 1) * yx + xx) * yp,
        -2 * a0 * y * y * y1 * y1 * yx * yx,
        -2 * b0 * x * y1 * y1 * yx * yx,
        -2 * g0 * (x - 1) * y * y * yx * yx,
        -2 * d0 * xx * y * y * y1 * y1,
    ]


def ode_relative_residual(kind: PainleveKind, x, y, yp, ypp) -> float:
    terms = [complex(t) for t in ode_terms(kind, x, y, yp, ypp)]
    scale = max(abs(t) for t in terms)
    return abs(sum(terms)) / scale if scale > 0 else 0.0


def second_derivative(kind: PainleveKind, x, y, yp) -> complex:
    """y'' solved from the polynomial form (which is linear in y'')."""
    g0 = sum(complex(t) for t in ode_terms(kind, x, y, yp, 0))
    g1 = sum(complex(t) for t in ode_terms(kind, x, y, yp, 1))
    lin = g1 - g0
    if lin == 0:
        raise DivisionByZeroState("second derivative undefined at this state")
    return -g0 / lin


def second_derivative_chain(kind: PainleveKind, x, y, v) -> complex:
    """y'' obtained from the Hamiltonian system by the chain rule.

    Partial derivatives of y'(x, y, v) are taken by central differences;
    the result is independent of the polynomial second-order form.
    """
    f = _RHS[kind.name]
    p = kind.params
    yp, vp, _ = f(x, y, v, p)

    def d(i, z0):
        h = 1e-5 * max(1.0, abs(z0))
        args_p = [x, y, v]
        args_m = [x, y, v]
        args_p[i] = z0 + h
        args_m[i] = z0 - h
        return (f(*args_p, p)[0] - f(*args_m, p)[0]) / (2 * h)

    return d(0, x) + d(1, y) * yp + d(2, v) * vp


# ---------------------------------------------------------------------------
# local expansion hypotheses

@dataclass(frozen=True)
class Branch:
    """One admissible local behaviour at an event.

    ``val`` is the valuation of y - c(x) in (x - a), where c is 0 for poles
    and zeros, 1 at one-points and x at fixed points. When ``free`` is None
    the leading coefficient itself is the free parameter.
    """

    event: str
    label: str
    val: int
    lead: Callable[[complex, complex], complex]
    free: int | None
    datum: Callable[[complex], complex]


def _near0(z) -> bool:
    return abs(z) < FIXED_TOL


def branches(kind: PainleveKind, event: str) -> list[Branch]:
    n = kind.name
    p = kind.params
    out: list[Branch] = []

    def pm(label, val, lead_fn, free):
        for s, tag in ((1, "+"), (-1, "-")):
            out.append(Branch(event, f"{label}{tag}", val,
                              (lambda a, b, s=s: s * lead_fn(a)) if free is not None else None,
                              free, lambda a, s=s: s * lead_fn(a)))

    def leadfree(label, val, scale=lambda a: 1.0):
        out.append(Branch(event, label, val, lambda a, b: scale(a) * b, None, lambda a: 0j))

    if event == "pole":
        if n == "P1":
            out.append(Branch(event, "pole", -2, lambda a, b: 1.0, 6, lambda a: 1.0))
        elif n == "P2":
            pm("eps", -1, lambda a: 1.0, 4)
        elif n == "P34":
            out.append(Branch(event, "pole", -2, lambda a, b: 1.0, 4, lambda a: 1.0))
        elif n == "P3":
            pm("eps", -1, lambda a: 1.0, 2)
        elif n == "P4":
            pm("sigma", -1, lambda a: 1.0, 3)
        elif n == "P5":
            t0, t1, ti = p
            c = t0 - t1 + ti
            if _near0(c):
                leadfree("double", -2, lambda a: a)
            else:
                pm("eps", -1, lambda a: 2 * a / c, 1)
        elif n == "P6":
            ti = p[3]
            if _near0(ti - 1):
                leadfree("double", -2)
            else:
                pm("eps", -1, lambda a: a * (a - 1) / (ti - 1), 1)
    elif event == "zero":
        if n == "P34":
            if _near0(p[0]):
                leadfree("double", 2)
            else:
                pm("eps", 1, lambda a: p[0], 1)
        elif n == "P3":
            pm("sigma", 1, lambda a: 1.0, 2)
        elif n == "P4":
            if _near0(p[0]):
                leadfree("double", 2)
            else:
                pm("eps", 1, lambda a: 4 * p[0], 1)
        elif n == "P5":
            t0, t1, ti = p
            c = t0 - t1 - ti
            if _near0(c):
                leadfree("double", 2)
            else:
                pm("delta", 1, lambda a: c / (2 * a), 1)
        elif n == "P6":
            t0 = p[0]
            if _near0(t0):
                leadfree("double", 2)
            else:
                pm("lambda", 1, lambda a: t0 / (a - 1), 1)
    elif event == "one_point":
        if n == "P5":
            pm("omega", 1, lambda a: 1.0, _P5_ONE_FREE)
        elif n == "P6":
            t1 = p[1]
            if _near0(t1):
                leadfree("double", 2)
            else:
                pm("omega", 1, lambda a: t1 / a, 1)
    elif event == "fixed_point" and n == "P6":
        t2 = p[2]
        if _near0(t2):
            leadfree("double", 2)
        else:
            pm("kappa", 1, lambda a: t2, _P6_FIXED_FREE)
    if not out:
        raise InputError(f"{n} has no {event} events")
    return out


# positions of the free coefficient (relative to the leading term) for the
# expansions the second-order equation leaves partly undetermined
_P5_ONE_FREE = 2
_P6_FIXED_FREE = 1

SERIES_ORDER = 20


def _offset(event: str):
    if event == "one_point":
        return lambda x: 1.0
    if event == "fixed_point":
        return lambda x: x
    return lambda x: 0.0


def local_series(kind: PainleveKind, branch: Branch, a: complex, b: complex,
                 order: int = SERIES_ORDER) -> Ser:
    """Series of y - c(x) in powers of (x - a) for the given branch."""
    top = order + abs(branch.val) + 10
    xs = Ser(0, np.array([a, 1.0] + [0.0] * (top - 2), dtype=complex))
    shift = {"one_point": Ser.const(1.0, top), "fixed_point": xs}.get(branch.event)

    def residual(g: Ser) -> Ser:
        y = g if shift is None else g + shift
        yp = y.deriv()
        ypp = yp.deriv()
        total = None
        for t in ode_terms(kind, xs, y, yp, ypp):
            if not isinstance(t, Ser):
                t = Ser.const(t, top)
            total = t if total is None else total + t
        return total

    if branch.free is None:
        lead = branch.lead(a, b)
        free = None
    else:
        lead = branch.lead(a, b)
        free = {branch.free: b}
    # two extra orders so that truncation never masquerades as a resonance
    ser, _ = solve_series(residual, branch.val, lead, order + 2, free)
    return Ser(ser.val, ser.c[:order].copy())


# ---------------------------------------------------------------------------
# expansion fits

@dataclass
class Crossing:
    """Circle used to pass an event, with the states where the path met it."""

    center: complex
    radius: float
    entry_x: complex
    entry_state: np.ndarray
    exit_x: complex
    exit_state: np.ndarray


@dataclass
class LocalExpansion:
    event: str
    branch: str
    order: int
    a: complex
    b: complex
    residual: float
    datum: complex
    runner_up: float = math.inf
    crossing: Crossing | None = field(default=None, repr=False, compare=False)
    kind: PainleveKind | None = field(default=None, repr=False, compare=False)

    def series(self, order: int = SERIES_ORDER) -> Ser:
        br = next(b for b in branches(self.kind, self.event) if b.label == self.branch)
        return local_series(self.kind, br, self.a, self.b, order)

    def to_json(self) -> dict:
        return {
            "kind": self.event,
            "branch": self.branch,
            "order": self.order,
            "a": [self.a.real, self.a.imag],
            "b": [self.b.real, self.b.imag],
            "datum": [complex(self.datum).real, complex(self.datum).imag],
            "residual": self.residual,
        }


def _fit_one(kind, branch, xs, ys, a0, offset, weights, max_iter=30):
    h0 = xs - a0
    inner = int(np.argmin(np.abs(h0)))
    g = ys - np.array([offset(x) for x in xs])

    def model(a, b):
        ser = local_series(kind, branch, a, b)
        return np.array([ser(x - a) for x in xs]) + np.array([offset(x) for x in xs])

    def resid(a, b):
        return (model(a, b) - ys) / weights

    if branch.free is None:
        b = g[inner] / h0[inner] ** branch.val / branch.lead(a0, 1.0)
    else:
        r0 = resid(a0, 0.0)
        r1 = resid(a0, 1.0)
        d = r1 - r0
        b = -np.vdot(d, r0) / np.vdot(d, d)
    a = complex(a0)
    b = complex(b)
    r = resid(a, b)
    cost = float(np.vdot(r, r).real)
    span = float(np.max(np.abs(h0)))
    for _ in range(max_iter):
        da = 1e-6 * span
        db = 1e-6 * max(1.0, abs(b))
        ja = (resid(a + da, b) - resid(a - da, b)) / (2 * da)
        jb = (resid(a, b + db) - resid(a, b - db)) / (2 * db)
        J = np.column_stack([ja, jb])
        step = np.linalg.lstsq(J, -r, rcond=None)[0]
        lam = 1.0
        while lam > 1e-4:
            an, bn = a + lam * step[0], b + lam * step[1]
            try:
                rn = resid(an, bn)
            except NoConvergence:
                lam *= 0.5
                continue
            cn = float(np.vdot(rn, rn).real)
            if np.isfinite(cn) and cn <= cost:
                break
            lam *= 0.5
        else:
            break
        a, b, r, cost = an, bn, rn, cn
        if abs(lam * step[0]) < 1e-14 * span and abs(lam * step[1]) < 1e-13 * max(1.0, abs(b)):
            break
    rms = math.sqrt(cost / len(xs))
    return a, b, rms


def fit_local_expansion(
    kind: PainleveKind,
    xs: Sequence[complex],
    ys: Sequence[complex],
    event: str,
    a0: complex | None = None,
) -> LocalExpansion:
    """Fit every admissible branch of ``event`` to samples near it.

    The location a and the free coefficient b are found by Gauss-Newton on
    the relative residual; all other coefficients are forced by the
    equation. The branch with the smallest residual wins.
    """
    xs = np.asarray(xs, dtype=complex)
    ys = np.asarray(ys, dtype=complex)
    if len(xs) < 4:
        raise InputError("need at least four samples to fit (a, b)")
    offset = _offset(event)
    g = ys - np.array([offset(x) for x in xs])
    if a0 is None:
        a0 = _newton_guess(xs, g, branches(kind, event)[0].val)
    if np.min(np.abs(xs - a0)) == 0:
        raise InputError("samples must exclude the event location")
    weights = np.abs(ys) if event == "pole" else np.abs(g)
    weights = np.where(weights > 0, weights, 1.0)
    # integration error relative to y grows like 1/|x - a| on the way in
    dist = np.abs(xs - a0)
    weights = weights * np.max(dist) / np.maximum(dist, 1e-300)
    results = []
    for br in branches(kind, event):
        try:
            a, b, rms = _fit_one(kind, br, xs, ys, a0, offset, weights)
        except (NoConvergence, ZeroDivisionError, np.linalg.LinAlgError, FloatingPointError):
            continue
        if np.isfinite(rms):
            results.append((rms, br, a, b))
    if not results:
        raise NoConvergence(f"no {event} expansion could be fitted")
    results.sort(key=lambda t: t[0])
    rms, br, a, b = results[0]
    runner = results[1][0] if len(results) > 1 else math.inf
    exp = LocalExpansion(event, br.label, abs(br.val), complex(a), complex(b), rms,
                         complex(br.datum(a)) if br.free is not None else complex(b),
                         runner, kind=kind)
    if runner < 2 * rms:
        raise AmbiguousBranch(
            f"{event} branches {br.label} and {results[1][1].label} fit equally well "
            f"({rms:.2e} vs {runner:.2e})"
        )
    return exp


def _newton_guess(xs, g, n):
    """Location estimate assuming g ~ c (x - a)^n near the innermost sample.

    The log-derivative is taken against the nearest other sample, which lies
    on the same side of a when samples bracket the event.
    """
    i = int(np.argmax(np.abs(g)) if n < 0 else np.argmin(np.abs(g)))
    d = np.abs(xs - xs[i])
    d[i] = np.inf
    j = int(np.argmin(d))
    lr = cmath.log(g[i] / g[j])
    if abs(lr) == 0:
        return xs[i]
    dlog = lr / (xs[i] - xs[j])
    return xs[i] - n / dlog


# ---------------------------------------------------------------------------
# trajectories

@dataclass
class InitialData:
    x0: complex
    y0: complex
    yp0: complex | None = None
    v0: complex | None = None

    @classmethod
    def coerce(cls, init) -> "InitialData":
        if isinstance(init, InitialData):
            return init
        if isinstance(init, dict):
            return cls(complex(init["x"]), complex(init["y"]),
                       None if init.get("yp") is None else complex(init["yp"]),
                       None if init.get("v") is None else complex(init["v"]))
        x0, y0, yp0 = init[:3]
        return cls(complex(x0), complex(y0), complex(yp0))


def seed_from_series(kind: PainleveKind, branch: Branch, a: complex, b: complex,
                     h: complex, order: int = SERIES_ORDER) -> InitialData:
    """Initial data at x = a + h on the solution with local data (a, b)."""
    ser = local_series(kind, branch, a, b, order)
    shift = _offset(branch.event)
    x0 = a + h
    y0 = ser(h) + shift(x0)
    yp0 = ser.deriv()(h) + (1.0 if branch.event == "fixed_point" else 0.0)
    return InitialData(complex(x0), complex(y0), complex(yp0))


@dataclass
class DetourOptions:
    """Geometry of event handling, in units of the local scale s.

    s is 1 away from fixed singularities and half the distance to the
    nearest one otherwise. The fit window spans [window_lo, window_hi] * s.
    window_hi defaults to 0.3 for PI, PII and PXXXIV, whose free coefficient
    sits four to six orders above the leading term and needs the wider lever
    arm, and to 0.1 otherwise.
    """

    window_lo: float = 1e-3
    window_hi: float | None = None
    samples_per_side: int = 12
    residual_cap: float = 1e-6
    crossing: str = "detour"
    pole_threshold: float = 1e6
    zero_threshold: float = 1e-6
    max_events: int = 200


_WIDE_WINDOW = ("P1", "P2", "P34")

DEFAULT_CFG = IntegratorConfig(rel_tol=1e-12, abs_tol=1e-14, max_step=0.5)


@dataclass
class PainleveTrajectory:
    kind: PainleveKind
    path: Path
    cfg: IntegratorConfig
    options: DetourOptions
    xs: list[complex] = field(default_factory=list)
    states: list[np.ndarray] = field(default_factory=list)
    events: list[LocalExpansion] = field(default_factory=list)
    final_x: complex = 0j
    final_state: np.ndarray | None = None
    aux: dict = field(default_factory=dict)

    @property
    def y(self) -> np.ndarray:
        return np.array([s[0] for s in self.states])

    @property
    def v(self) -> np.ndarray:
        return np.array([s[1] for s in self.states])

    @property
    def T(self) -> np.ndarray:
        return np.array([s[2] for s in self.states])

    def yprime(self) -> np.ndarray:
        return np.array([yprime(self.kind, x, s[0], s[1]) for x, s in zip(self.xs, self.states)])

    def to_csv(self, fh=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["x_re", "x_im", "y_re", "y_im", "v_re", "v_im"])
        for x, s in zip(self.xs, self.states):
            x, y, v = complex(x), complex(s[0]), complex(s[1])
            w.writerow([repr(x.real), repr(x.imag), repr(y.real), repr(y.imag), repr(v.real), repr(v.imag)])
        text = buf.getvalue()
        if fh is not None:
            fh.write(text)
        return text

    def events_json(self) -> str:
        return json.dumps([e.to_json() for e in self.events])


def _system(kind: PainleveKind):
    f = _RHS[kind.name]
    p = kind.params

    def rhs(x, s):
        return np.array(f(complex(x), complex(s[0]), complex(s[1]), p), dtype=complex)

    return rhs


def _to_lines(path: Path) -> list[LineSegment]:
    # arcs are replaced by fine chords; the solution is single valued away
    # from the fixed singularities, so only the endpoints matter
    out = []
    for seg in path.segments:
        if isinstance(seg, LineSegment):
            out.append(seg)
            continue
        n = max(8, int(math.ceil(abs(seg.theta1 - seg.theta0) / (2 * math.pi) * 256)))
        pts = [seg.point(k / n) for k in range(n + 1)]
        pts[0], pts[-1] = seg.start, seg.end
        out.extend(LineSegment(p, q) for p, q in zip(pts, pts[1:]))
    return out


class _Runner:
    def __init__(self, kind, cfg, opts):
        self.kind = kind
        self.cfg = cfg
        self.opts = opts
        self.rhs = _system(kind)
        self.fixed = kind.fixed_points
        self.handled: list[complex] = []

    def scale(self, z) -> float:
        if not self.fixed:
            return 1.0
        return min(1.0, 0.5 * min(abs(z - f) for f in self.fixed))

    def step_cfg(self, z) -> IntegratorConfig:
        ms = min(self.cfg.max_step, 0.4 * self.opts.window_hi * self.scale(z))
        return IntegratorConfig(self.cfg.rel_tol, self.cfg.abs_tol, ms,
                                min(self.cfg.min_step, ms), False)

    def run(self, z0, z1, state):
        """Integrate a straight piece without event handling."""
        if z0 == z1:
            return np.array(state, dtype=complex)
        res = integrate(self.rhs, Path.line(z0, z1), state, self.step_cfg(z0))
        return res.final

    # -- event prediction
    def candidates(self, x, s):
        y, v = complex(s[0]), complex(s[1])
        k = self.kind
        yp = yprime(k, x, y, v)
        out = []
        try:
            ypp = second_derivative(k, x, y, yp)
        except (DivisionByZeroState, ZeroDivisionError):
            return out
        # pole: y ~ c (x-a)^-n
        den = y * ypp - yp * yp
        if den != 0 and yp != 0 and (abs(y) > 1.0 or abs(y) > self.opts.pole_threshold):
            m = yp * yp / den
            n = round(m.real)
            if n in (1, 2) and abs(m - n) < 0.25:
                out.append(("pole", x + n * y / yp))
        for t in k.targets:
            c, cp = {"zero": (0.0, 0.0), "one_point": (1.0, 0.0), "fixed_point": (x, 1.0)}[t]
            g, gp = y - c, yp - cp
            if gp == 0:
                continue
            den = gp * gp - g * ypp
            if den == 0:
                continue
            m = gp * gp / den
            n = round(m.real)
            if n in (1, 2) and abs(m - n) < 0.25:
                out.append((t, x - n * g / gp))
            elif abs(g) < self.opts.zero_threshold:
                out.append((t, x - g / gp))
        return out


def integrate_painleve(
    kind: PainleveKind,
    init,
    xpath: Path,
    cfg: IntegratorConfig | None = None,
    options: DetourOptions | None = None,
) -> PainleveTrajectory:
    """Continue a Painleve solution along ``xpath`` through its events."""
    cfg = cfg or DEFAULT_CFG
    opts = options or DetourOptions()
    if opts.window_hi is None:
        opts = replace(opts, window_hi=0.3 if kind.name in _WIDE_WINDOW else 0.1)
    if opts.crossing not in ("detour", "expansion"):
        raise InputError("crossing must be 'detour' or 'expansion'")
    ini = InitialData.coerce(init)
    if abs(ini.x0 - xpath.start) > 1e-12 * max(1.0, abs(ini.x0)):
        raise PathError("path must start at the initial point")
    for f in kind.fixed_points:
        # relative, so paths seeded close to a fixed point may leave it
        if xpath.distance_to(f) < 1e-3 * min(1.0, abs(xpath.start - f)):
            raise FixedSingularityHit(f"path meets the fixed singular point x={f}")
    if ini.v0 is not None:
        v0 = ini.v0
    elif ini.yp0 is not None:
        v0 = v_from_yprime(kind, ini.x0, ini.y0, ini.yp0)
    else:
        raise InputError("initial data needs y' or v")
    T0 = hamiltonian(kind, ini.x0, ini.y0, v0)
    state = np.array([ini.y0, v0, T0], dtype=complex)
    if not np.all(np.isfinite(state)):
        raise InputError("initial state is not finite")

    traj = PainleveTrajectory(kind, xpath, cfg, opts)
    traj.xs.append(ini.x0)
    traj.states.append(state.copy())
    runner = _Runner(kind, cfg, opts)
    segs = _to_lines(xpath)
    for seg in segs:
        z = seg.start
        while True:
            state, z, found = _advance(runner, traj, z, seg.end, state)
            if found is None:
                break
            state, z = _handle_event(runner, traj, z, seg.end, state, found)
            if len(traj.events) > opts.max_events:
                raise NumericError("too many events along the path")
    traj.final_x = segs[-1].end if segs else ini.x0
    traj.final_state = state
    return traj


def _advance(runner, traj, z, end, state):
    """Integrate toward ``end`` until an event lies ahead within reach."""
    if z == end:
        return state, z, None
    d = (end - z) / abs(end - z)
    found = {}

    def stop(x, s):
        traj.xs.append(x)
        traj.states.append(np.array(s, dtype=complex))
        rd = runner.opts.window_hi * runner.scale(x)
        for ev, a in runner.candidates(x, s):
            if not cmath.isfinite(a):
                continue
            w = x - a
            if abs(w) >= rd:
                continue
            if any(abs(a - h) < 0.5 * rd for h in runner.handled):
                continue
            proj = -(w * d.conjugate()).real
            perp = abs((w * d.conjugate()).imag)
            if proj > 0 and perp < 0.9 * rd:
                found["ev"] = (ev, a)
                return True
        return False

    while z != end:
        # chunks keep the step cap matched to the local scale
        length = abs(end - z)
        chunk = min(length, max(40 * runner.step_cfg(z).max_step, 1e-3))
        zn = end if chunk >= length else z + d * chunk
        res = integrate(runner.rhs, Path.line(z, zn), state, runner.step_cfg(z), stop)
        state = res.final
        if res.stopped:
            return state, res.z_end, found["ev"]
        z = zn
    return state, z, None


def _ray(runner, z_start, state, center, radii, refine=False, event=None):
    """Integrate from z_start inward toward center, sampling at the radii.

    With ``refine`` the center is re-estimated at every sample.
    """
    xs, ss = [], []
    z, s = z_start, state
    for r in radii:
        u = (z - center) / abs(z - center)
        zn = center + r * u
        s = runner.run(z, zn, s)
        z = zn
        xs.append(z)
        ss.append(s.copy())
        if refine:
            for ev, a in runner.candidates(z, s):
                if ev == event and abs(a - center) < 0.5 * abs(z - center):
                    center = a
                    break
    return xs, ss, center


def _handle_event(runner, traj, z, end, state, found):
    event, a_est = found
    opts = runner.opts
    kind = runner.kind
    s_loc = runner.scale(a_est)
    r_in = opts.window_lo * s_loc
    r_entry = abs(z - a_est)
    if r_entry <= 2 * r_in:
        raise UnclassifiableEvent(f"event near x={a_est} detected too late")
    nsamp = opts.samples_per_side
    radii = np.geomspace(r_entry * 0.9, r_in, nsamp)
    xs_in, ss_in, a_ref = _ray(runner, z, state, a_est, radii, refine=True, event=event)

    # exit point: the second intersection of the path line with the circle
    center = a_ref
    r = abs(z - center)
    d = (end - z) / abs(end - z)
    w = z - center
    u_exit = -2 * (w * d.conjugate()).real
    seg_len = abs(end - z)
    tail = None
    if u_exit >= seg_len:
        if abs(end - center) < 2 * r_in:
            raise PathError(f"path ends at the event x={center}")
        x_out = center + r * (end - center) / abs(end - center)
        tail = end
    else:
        x_out = z + u_exit * d

    th0 = cmath.phase(z - center)
    th1 = cmath.phase(x_out - center)
    dth = (th1 - th0) % (2 * math.pi)
    if dth > math.pi + 1e-9:
        dth -= 2 * math.pi
    elif abs(dth - math.pi) <= 1e-9:
        dth = -math.pi  # pass on the left of the direction of travel
    for f in kind.fixed_points:
        if abs(f - center) < 1.5 * r:
            raise FixedSingularityHit(f"event at {center} too close to fixed point {f}")

    if opts.crossing == "detour":
        arc = Path((ArcSegment(center, r, th0, th0 + dth),))
        res = integrate(runner.rhs, arc, state, _dense(runner.step_cfg(center)))
        traj.xs.extend(res.samples_z[1:])
        traj.states.extend(np.array(s) for s in res.samples_y[1:])
        exit_state = res.final
        xs_out, ss_out, _ = _ray(runner, x_out, exit_state, center, radii)
        xs_fit = xs_in + xs_out
        ys_fit = [s[0] for s in ss_in + ss_out]
    else:
        xs_fit = xs_in
        ys_fit = [s[0] for s in ss_in]

    try:
        exp = fit_local_expansion(kind, xs_fit, ys_fit, event, a0=center)
    except NoConvergence as e:
        raise UnclassifiableEvent(f"{event} at x~{center}: {e}") from None
    if exp.residual > opts.residual_cap:
        raise UnclassifiableEvent(
            f"{event} at x~{center}: best fit residual {exp.residual:.2e} above cap"
        )
    if opts.crossing == "expansion":
        ser = exp.series()
        h = x_out - exp.a
        c, cp = {"one_point": (1.0, 0.0), "fixed_point": (x_out, 1.0)}.get(event, (0.0, 0.0))
        y = ser(h) + c
        yp = ser.deriv()(h) + cp
        v = v_from_yprime(kind, x_out, y, yp)
        exit_state = np.array([y, v, hamiltonian(kind, x_out, y, v)], dtype=complex)
        traj.xs.append(x_out)
        traj.states.append(exit_state.copy())

    exp.crossing = Crossing(center, r, z, np.array(state), x_out, np.array(exit_state))
    traj.events.append(exp)
    runner.handled.append(exp.a)
    if tail is not None:
        st = runner.run(x_out, tail, exit_state)
        traj.xs.append(tail)
        traj.states.append(st.copy())
        return st, end
    return exit_state, x_out


def _dense(cfg: IntegratorConfig) -> IntegratorConfig:
    return IntegratorConfig(cfg.rel_tol, cfg.abs_tol, cfg.max_step, cfg.min_step, True)


# ---------------------------------------------------------------------------
# scans

def pole_field_scan(
    kind: PainleveKind,
    init,
    interval: tuple[float, float],
    cfg: IntegratorConfig | None = None,
    options: DetourOptions | None = None,
    verify: bool = True,
) -> list[LocalExpansion]:
    """Events of a real solution on a real interval, ordered by position.

    The solution is continued from x0 to both ends of the interval. When
    ``verify`` is set every crossing is integrated backwards and must
    reproduce the state before the event.
    """
    return scan_trajectories(kind, init, interval, cfg, options, verify)[0]


def scan_trajectories(kind, init, interval, cfg=None, options=None, verify=True):
    lo, hi = (float(interval[0]), float(interval[1]))
    if hi < lo:
        lo, hi = hi, lo
    if hi == lo:
        return [], []
    ini = InitialData.coerce(init)
    x0 = ini.x0
    for f in kind.fixed_points:
        if lo <= f.real <= hi and abs(f.imag) < 1e-3:
            raise FixedSingularityHit(f"interval contains the fixed point {f}")
    trajs = []
    if x0.real < hi:
        trajs.append(integrate_painleve(kind, ini, Path.line(x0, complex(hi, x0.imag)), cfg, options))
    if x0.real > lo:
        trajs.append(integrate_painleve(kind, ini, Path.line(x0, complex(lo, x0.imag)), cfg, options))
    events = []
    for t in trajs:
        for e in t.events:
            if lo - 1e-12 <= e.a.real <= hi + 1e-12:
                events.append(e)
            if verify:
                _verify_crossing(t, e)
    events.sort(key=lambda e: e.a.real)
    return events, trajs


def _verify_crossing(traj: PainleveTrajectory, e: LocalExpansion, tol: float | None = None):
    c = e.crossing
    if c is None or traj.options.crossing != "detour":
        return 0.0
    th0 = cmath.phase(c.entry_x - c.center)
    th1 = cmath.phase(c.exit_x - c.center)
    dth = (th1 - th0) % (2 * math.pi)
    if dth > math.pi + 1e-9:
        dth -= 2 * math.pi
    elif abs(dth - math.pi) <= 1e-9:
        dth = -math.pi
    back = Path((ArcSegment(c.center, c.radius, th0 + dth, th0),))
    res = integrate(_system(traj.kind), back, c.exit_state, traj.cfg)
    err = float(np.max(np.abs(res.final[:2] - c.entry_state[:2]) / (np.abs(c.entry_state[:2]) + 1e-300)))
    limit = tol if tol is not None else max(1e-6, 1e4 * traj.cfg.rel_tol)
    if err > limit:
        raise NumericError(f"backward check across the event at {e.a} failed: {err:.2e}")
    return err


def states_near(traj: PainleveTrajectory, e: LocalExpansion, offsets: Iterable[float], side: str = "entry"):
    """States on the ray from the crossing circle to the event at the given distances."""
    c = e.crossing
    if c is None:
        raise InputError("event carries no crossing data")
    runner = _Runner(traj.kind, traj.cfg, traj.options)
    x0, s0 = (c.entry_x, c.entry_state) if side == "entry" else (c.exit_x, c.exit_state)
    offs = sorted(offsets, reverse=True)
    xs, ss, _ = _ray(runner, x0, s0, e.a, offs)
    return xs, ss


def pv_apparent_points(kind: PainleveKind, x, y, v) -> tuple[complex, complex]:
    """Apparent singularities of the two scalar PV Lax equations.

    Returns complex infinity where a denominator vanishes.
    """
    if kind.name != "P5":
        raise InputError("apparent points are defined for P5 only")
    t0, t1, ti = kind.params
    A = (t0 - t1 + ti) / 2
    S = (t0 + t1 + ti) / 2
    inf = complex(math.inf, 0)
    try:
        d1 = 1 - y * (v + A) / (v + t0)
    except ZeroDivisionError:
        d1 = inf
    try:
        d2 = 1 - (v + S) / (y * v)
    except ZeroDivisionError:
        d2 = inf
    l1 = 0j if d1 == inf else (inf if d1 == 0 else x / d1)
    l2 = 0j if d2 == inf else (inf if d2 == 0 else x / d2)
    return l1, l2
