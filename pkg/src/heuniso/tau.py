"""Logarithmic derivatives of Painleve tau functions and their regularized
limits at movable singularities."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    DivisionByZeroState,
    ExtrapolationDiverges,
    InputError,
    IntervalContainsPole,
)
from .painleve import (
    LocalExpansion,
    PainleveKind,
    PainleveTrajectory,
    hamiltonian,
    p3_tau_from_y,
    states_near,
    yprime,
)


@dataclass(frozen=True)
class TauSample:
    x: complex
    dlogtau: complex
    subtracted: complex = 0j  # c in c/(x - a), zero when no regularization

    def __post_init__(self):
        if not (np.isfinite(self.dlogtau) and np.isfinite(self.subtracted)):
            raise DivisionByZeroState("tau sample is not finite")


def tau_logderiv(kind: PainleveKind, x: complex, y: complex, v: complex) -> complex:
    """d/dx log tau evaluated from the Hamiltonian at the state (x, y, v)."""
    m = kind.tau_multiplier(x)
    if m == 0:
        raise DivisionByZeroState(f"{kind.name} tau multiplier vanishes at x={x}")
    return complex(hamiltonian(kind, x, y, v)) / m


def tau_logderiv_p3_y_only(kind: PainleveKind, x: complex, y: complex, yp: complex) -> complex:
    """Cross-check form for PIII that eliminates v in favour of y'."""
    if kind.name != "P3":
        raise InputError("the y-only form exists for P3 only")
    if x == 0:
        raise DivisionByZeroState("x = 0 is a fixed singular point")
    return complex(p3_tau_from_y(kind, x, y, yp)) / x


def sigma_form_residual(x, sigma, y, v) -> np.ndarray:
    """Pointwise residual of the sigma form of PI.

    With s' = -y and s'' = -v (chain rule through the Hamiltonian system)
    the residual is (s'')^2 + 4 (s')^3 + 2 x s' - 2 s.
    """
    x, sigma, y, v = (np.asarray(t, dtype=complex) for t in (x, sigma, y, v))
    s1 = -y
    s2 = -v
    return s2 * s2 + 4 * s1**3 + 2 * x * s1 - 2 * sigma


def sigma_form_residual_P1(traj: PainleveTrajectory, lo: float | None = None, hi: float | None = None) -> float:
    """Largest sigma-form residual over trajectory samples with lo <= Re x <= hi.

    The sigma values are the integrated Hamiltonian, so the check is not an
    algebraic tautology.
    """
    if traj.kind.name != "P1":
        raise InputError("sigma form residual is defined for P1")
    xs = np.array(traj.xs)
    lo = float(np.min(xs.real)) if lo is None else lo
    hi = float(np.max(xs.real)) if hi is None else hi
    for e in traj.events:
        if e.event == "pole" and lo <= e.a.real <= hi:
            raise IntervalContainsPole(f"pole at {e.a} inside [{lo}, {hi}]")
    st = np.array(traj.states)
    mask = (xs.real >= lo) & (xs.real <= hi)
    if not np.any(mask):
        raise InputError("no samples in the requested interval")
    r = sigma_form_residual(xs[mask], st[mask, 2], st[mask, 0], st[mask, 1])
    return float(np.max(np.abs(r)))


@dataclass(frozen=True)
class LimitRecipe:
    """lim_{x->a} (factor * m(x) dlog tau - subtract / (x - a))."""

    factor: complex = 1.0
    subtract: complex = 0.0


@dataclass
class LimitResult:
    value: complex
    error: float
    sides: dict = field(default_factory=dict)
    h0: float = 0.0
    samples: list[TauSample] = field(default_factory=list)


def _neville0(hs: Sequence[float], fs: Sequence[complex]) -> complex:
    """Value at 0 of the interpolating polynomial through (hs, fs)."""
    p = [complex(f) for f in fs]
    n = len(hs)
    for k in range(1, n):
        for i in range(n - k):
            p[i] = (hs[i + k] * p[i] - hs[i] * p[i + 1]) / (hs[i + k] - hs[i])
    return p[0]


def extrapolate(hs: Sequence[float], fs: Sequence[complex]) -> tuple[complex, float]:
    """Cubic extrapolation to h = 0 with the change from the quadratic one as error."""
    if len(hs) != 4:
        raise InputError("extrapolation uses four offsets")
    l3 = _neville0(hs, fs)
    l2 = _neville0(hs[1:], fs[1:])
    scale = max(1.0, max(abs(f) for f in fs))
    d = [abs(fs[i + 1] - fs[i]) for i in range(3)]
    noise = 1e-9 * scale
    # a remainder analytic in h shrinks its increments as h halves; a
    # leftover c/h term doubles them
    if d[2] > noise and d[1] > noise and d[2] > 1.5 * d[1]:
        raise ExtrapolationDiverges("increments grow as h shrinks: the subtraction does not match the singularity")
    return l3, abs(l3 - l2)


def regularized_limit(
    traj: PainleveTrajectory,
    event: LocalExpansion,
    recipe: LimitRecipe = LimitRecipe(),
    h: float | None = None,
    tol: float = 1e-3,
) -> LimitResult:
    """Richardson-extrapolated limit of factor*T - c/(x-a) at an event.

    T is the integrated Hamiltonian (m(x) times the log-derivative of tau).
    Offsets h, h/2, h/4, h/8 are taken on the ray from each side of the
    crossing circle; both sides are averaged when available.
    """
    c = event.crossing
    if c is None:
        raise InputError("event has no crossing data; it was not produced by a trajectory")
    a = event.a
    h0 = h if h is not None else min(1e-2 * max(1.0, abs(a)), 0.5 * c.radius)
    offs = [h0, h0 / 2, h0 / 4, h0 / 8]
    sides = {}
    samples: list[TauSample] = []
    errs = []
    for side in ("entry", "exit"):
        xs, ss = states_near(traj, event, offs, side)
        fs = []
        for x, s in zip(xs, ss):
            val = recipe.factor * s[2] - recipe.subtract / (x - a)
            fs.append(val)
            m = traj.kind.tau_multiplier(x)
            samples.append(TauSample(x, complex(s[2] / m), complex(recipe.subtract)))
        hs = [abs(x - a) for x in xs]
        L, err = extrapolate(hs, fs)
        sides[side] = L
        errs.append(err)
    value = 0.5 * (sides["entry"] + sides["exit"])
    err = max(max(errs), 0.5 * abs(sides["entry"] - sides["exit"]))
    if not math.isfinite(err) or err > tol * max(1.0, abs(value)):
        raise ExtrapolationDiverges(
            f"limit at {a} unstable: sides {sides['entry']:.6g} / {sides['exit']:.6g}, error {err:.2e}"
        )
    return LimitResult(complex(value), float(err), sides, h0, samples)


def tau_sample_at(traj: PainleveTrajectory, index: int) -> TauSample:
    x = traj.xs[index]
    s = traj.states[index]
    return TauSample(x, tau_logderiv(traj.kind, x, s[0], s[1]))


def p3_form_gap(traj: PainleveTrajectory) -> float:
    """Largest relative gap between the two PIII tau expressions on the samples."""
    gaps = []
    for x, s in zip(traj.xs, traj.states):
        if s[0] == 0:
            continue
        t1 = tau_logderiv(traj.kind, x, s[0], s[1])
        t2 = tau_logderiv_p3_y_only(traj.kind, x, s[0], yprime(traj.kind, x, s[0], s[1]))
        gaps.append(abs(t1 - t2) / max(1.0, abs(t1)))
    return max(gaps) if gaps else 0.0
