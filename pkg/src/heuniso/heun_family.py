"""The seven Heun class equations w'' + P(z) w' + Q(z) w = 0.

Each family is described by rational coefficient data (a polynomial part
plus pole terms), from which we derive companion systems, Frobenius series at
regular singular points and formal solutions at irregular singular points.

Formal solutions are generated through the Riccati equation satisfied by
u = w'/w, expanded in a root t = z^(-1/r) of 1/z, so that half-integer
ranks need no special treatment.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from math import comb, pi
from typing import Callable

import numpy as np

from .errors import (
    EvaluationAtSingularity,
    InputError,
    RadiusTooSmall,
    ResonantExponents,
    UnknownSingularity,
)
from .series import Ser, solve_series

FAMILIES = ("he", "che", "dhe", "bhe", "the", "rthe", "rbhe")

PARAM_NAMES: dict[str, tuple[str, ...]] = {
    "he": ("alpha", "beta", "gamma", "delta", "epsilon"),
    "che": ("gamma", "delta", "p"),
    "dhe": ("gamma", "p"),
    "bhe": ("gamma", "p"),
    "the": ("p",),
    "rthe": (),
    "rbhe": ("two_alpha",),
}

INF = "inf"


def _cplx(x) -> complex:
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise InputError(f"complex value must be [re, im], got {x!r}")
        x = complex(float(x[0]), float(x[1]))
    try:
        z = complex(x)
    except (TypeError, ValueError) as exc:
        raise InputError(f"not a number: {x!r}") from exc
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise InputError(f"parameter must be finite, got {x!r}")
    return z


def cjson(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


@dataclass(frozen=True)
class HeunSpec:
    family: str
    params: dict = field(default_factory=dict)
    a: complex = 0j
    q: complex = 0j

    def __post_init__(self):
        fam = str(self.family).lower()
        if fam not in FAMILIES:
            raise InputError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        object.__setattr__(self, "family", fam)
        names = PARAM_NAMES[fam]
        given = dict(self.params)
        extra = set(given) - set(names)
        if extra:
            raise InputError(f"unexpected parameters for {fam}: {sorted(extra)}")
        missing = [n for n in names if n not in given]
        if missing:
            raise InputError(f"missing parameters for {fam}: {missing}")
        object.__setattr__(self, "params", {n: _cplx(given[n]) for n in names})
        object.__setattr__(self, "a", _cplx(self.a))
        object.__setattr__(self, "q", _cplx(self.q))
        if fam in ("he", "che", "dhe") and self.a == 0:
            raise InputError(f"{fam} requires a != 0")
        if fam == "he":
            if self.a == 1:
                raise InputError("he requires a not in {0, 1}")
            p = self.params
            lhs = p["alpha"] + p["beta"] + 1
            rhs = p["gamma"] + p["delta"] + p["epsilon"]
            if abs(lhs - rhs) > 1e-12 * max(1.0, abs(lhs), abs(rhs)):
                raise InputError("he parameters violate alpha + beta + 1 = gamma + delta + epsilon")

    def __getitem__(self, name: str) -> complex:
        return self.params[name]

    def replace(self, **changes) -> "HeunSpec":
        kw = dict(family=self.family, params=dict(self.params), a=self.a, q=self.q)
        kw.update(changes)
        return HeunSpec(**kw)

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "params": {k: cjson(v) for k, v in self.params.items()},
            "a": cjson(self.a),
            "q": cjson(self.q),
        }

    @staticmethod
    def from_json(obj: dict) -> "HeunSpec":
        if not isinstance(obj, dict):
            raise InputError("HeunSpec JSON must be an object")
        extra = set(obj) - {"family", "params", "a", "q"}
        if extra:
            raise InputError(f"unknown HeunSpec keys: {sorted(extra)}")
        if "family" not in obj:
            raise InputError("HeunSpec JSON needs a family")
        return HeunSpec(obj["family"], dict(obj.get("params", {})), obj.get("a", 0), obj.get("q", 0))

    # exponent constants used throughout the monodromy relations
    @property
    def thetas(self) -> dict[str, complex]:
        p, fam = self.params, self.family
        if fam == "he":
            return {"0": 1 - p["gamma"], "1": 1 - p["delta"], "2": 1 - p["epsilon"], "inf": p["beta"] - p["alpha"]}
        if fam == "che":
            return {"0": p["gamma"], "1": p["delta"] - 1, "inf": 2 * p["p"] - p["gamma"] - p["delta"] + 1}
        if fam == "dhe":
            return {"0": p["gamma"] - 1, "inf": 4 * p["p"] - p["gamma"] + 1}
        if fam == "bhe":
            return {"0": (p["gamma"] - 1) / 2, "inf": (p["p"] - p["gamma"] - 1) / 2}
        if fam == "the":
            return {"mu": (3 - p["p"]) / 2}
        if fam == "rbhe":
            return {"alpha": p["two_alpha"] / 2}
        return {}


# ---------------------------------------------------------------------------
# rational coefficient data

@dataclass(frozen=True)
class Rational:
    """poly[0] + poly[1] z + ... + sum c / (z - b)^m over poles (b, m, c)."""

    poly: tuple[complex, ...] = ()
    poles: tuple[tuple[complex, int, complex], ...] = ()

    def __call__(self, z: complex) -> complex:
        v = 0j
        for c in reversed(self.poly):
            v = v * z + c
        for b, m, c in self.poles:
            v += c / (z - b) ** m
        return v

    def pole_points(self) -> set[complex]:
        return {b for b, _, c in self.poles if c != 0}

    def local_series(self, z0: complex, top: int) -> Ser:
        """Laurent series in zeta = z - z0, stored up to zeta^(top-1)."""
        lo = min([0] + [-m for b, m, c in self.poles if b == z0 and c != 0])
        c = np.zeros(max(top - lo, 1), dtype=complex)
        # polynomial part: Taylor shift
        for j, pj in enumerate(self.poly):
            for n in range(j + 1):
                if n - lo < len(c):
                    c[n - lo] += pj * comb(j, n) * z0 ** (j - n)
        for b, m, cc in self.poles:
            if cc == 0:
                continue
            if b == z0:
                c[-m - lo] += cc
                continue
            d = z0 - b
            for n in range(top):
                # binom(-m, n) = (-1)^n binom(m+n-1, n)
                c[n - lo] += cc * (-1) ** n * comb(m + n - 1, n) * d ** (-m - n)
        return Ser(lo, c)

    def infinity_series(self, r: int, top: int) -> Ser:
        """Series in t with z = t^(-r), stored up to t^(top-1)."""
        deg = len(self.poly) - 1
        lo = -r * deg if deg > 0 else 0
        c = np.zeros(max(top - lo, 1), dtype=complex)
        for j, pj in enumerate(self.poly):
            if -r * j - lo < len(c):
                c[-r * j - lo] += pj
        for b, m, cc in self.poles:
            n = 0
            while r * (m + n) < top:
                c[r * (m + n) - lo] += cc * comb(m + n - 1, n) * b ** n
                n += 1
                if b == 0:
                    break
        return Ser(lo, c)


def coefficients(spec: HeunSpec) -> tuple[Rational, Rational]:
    """P and Q of w'' + P w' + Q w = 0 for the given equation."""
    p, a, q, fam = spec.params, spec.a, spec.q, spec.family
    if fam == "he":
        ab = p["alpha"] * p["beta"]
        P = Rational((), ((0j, 1, p["gamma"]), (1 + 0j, 1, p["delta"]), (a, 1, p["epsilon"])))
        Q = Rational((), (
            (0j, 1, -q / a),
            (1 + 0j, 1, (ab - q) / (1 - a)),
            (a, 1, (ab * a - q) / (a * (a - 1))),
        ))
    elif fam == "che":
        P = Rational((1,), ((0j, 1, p["gamma"]), (a, 1, p["delta"])))
        Q = Rational((), ((0j, 1, q / a), (a, 1, (p["p"] * a - q) / a)))
    elif fam == "dhe":
        P = Rational((0.5,), ((0j, 1, p["gamma"]), (0j, 2, -a * a / 2)))
        Q = Rational((), ((0j, 1, p["p"]), (0j, 2, -q)))
    elif fam == "bhe":
        P = Rational((2 * a, 2), ((0j, 1, p["gamma"]),))
        Q = Rational((p["p"],), ((0j, 1, -q),))
    elif fam == "the":
        P = Rational((a, 0, 2), ())
        Q = Rational((-q, p["p"]), ())
    elif fam == "rthe":
        P = Rational((), ())
        Q = Rational((-q, -2 * a, 0, -4), ())
    else:  # rbhe
        P = Rational((), ((0j, 1, p["two_alpha"]),))
        Q = Rational((-a, -1), ((0j, 1, -q),))
    return P, Q


def _dhe_origin_coefficients(spec: HeunSpec) -> tuple[Rational, Rational]:
    """Coefficients of the doubly confluent equation in t = a^2 / z."""
    p, a, q = spec.params, spec.a, spec.q
    c = a * a
    P = Rational((0.5,), ((0j, 1, 2 - p["gamma"]), (0j, 2, -c / 2)))
    Q = Rational((), ((0j, 3, p["p"] * c), (0j, 2, -q)))
    return P, Q


def finite_singular_points(spec: HeunSpec) -> list[complex]:
    P, Q = coefficients(spec)
    pts = sorted(P.pole_points() | Q.pole_points(), key=lambda z: (abs(z), z.real))
    base = {"he": [0j, 1 + 0j, spec.a], "che": [0j, spec.a], "dhe": [0j], "bhe": [0j], "rbhe": [0j]}
    out = list(base.get(spec.family, []))
    for z in pts:
        if all(abs(z - w) > 0 for w in out):
            out.append(z)
    return out


def first_order_system(spec: HeunSpec) -> Callable[[complex], np.ndarray]:
    """Companion matrix A(z) with (w, w')' = A (w, w')."""
    P, Q = coefficients(spec)
    sing = finite_singular_points(spec)

    def matrix(z: complex) -> np.ndarray:
        for s in sing:
            if abs(z - s) < 1e-14 * max(1.0, abs(s)):
                raise EvaluationAtSingularity(f"z={z} is a singular point of {spec.family}")
        return np.array([[0, 1], [-Q(z), -P(z)]], dtype=complex)

    return matrix


# ---------------------------------------------------------------------------
# singularity inventory and exponents

@dataclass(frozen=True)
class IrregularExponents:
    rank: float
    phases: tuple[dict[float, complex], dict[float, complex]]  # power -> coefficient
    prefactors: tuple[complex, complex]

    def phase(self, j: int, z: complex, arg: float | None = None) -> complex:
        lz = _log(z, arg)
        return sum(c * cmath.exp(e * lz) for e, c in self.phases[j].items())


@dataclass(frozen=True)
class SingularityInfo:
    location: complex | str
    kind: str  # "regular" | "irregular"
    rank: float = 0.0
    exponents: tuple[complex, complex] | IrregularExponents | None = None


_RANK_AT_INF = {"che": 1.0, "dhe": 1.0, "bhe": 2.0, "the": 3.0, "rthe": 2.5, "rbhe": 1.5}


def _is_inf(point) -> bool:
    return isinstance(point, str) and point.lower() in ("inf", "infinity", "oo") or (
        isinstance(point, float) and math.isinf(point)
    )


def singularities(spec: HeunSpec) -> list[SingularityInfo]:
    out = []
    for z in finite_singular_points(spec):
        if spec.family == "dhe":
            out.append(SingularityInfo(z, "irregular", 1.0, characteristic_exponents(spec, z)))
        else:
            out.append(SingularityInfo(z, "regular", 0.0, characteristic_exponents(spec, z)))
    if spec.family == "he":
        out.append(SingularityInfo(INF, "regular", 0.0, characteristic_exponents(spec, INF)))
    else:
        out.append(SingularityInfo(INF, "irregular", _RANK_AT_INF[spec.family],
                                   characteristic_exponents(spec, INF)))
    return out


def _indicial(spec: HeunSpec, z0: complex) -> tuple[complex, complex]:
    P, Q = coefficients(spec)
    ps = P.local_series(z0, 2)
    qs = Q.local_series(z0, 2)
    if ps.val < -1 or qs.val < -2:
        raise UnknownSingularity(f"{z0} is not a regular singular point of {spec.family}")
    p0, q0 = ps.coef(-1), qs.coef(-2)
    # s^2 + (p0 - 1) s + q0 = 0
    b, c = p0 - 1, q0
    disc = cmath.sqrt(b * b - 4 * c)
    r1, r2 = (-b + disc) / 2, (-b - disc) / 2
    # order so that an exponent 0 comes first, as the usual inventory does
    if abs(r2) < abs(r1):
        r1, r2 = r2, r1
    return r1, r2


def characteristic_exponents(spec: HeunSpec, point):
    """Local exponents at a singular point.

    Regular points return the pair of exponents. Irregular points return an
    :class:`IrregularExponents` with the exponential phase polynomial and the
    algebraic prefactor power of each canonical column.
    """
    if _is_inf(point):
        if spec.family == "he":
            return spec["alpha"], spec["beta"]
        data = _formal_columns(spec, "inf", 24)
        return IrregularExponents(
            _RANK_AT_INF[spec.family],
            tuple(col.phase_terms for col in data),
            tuple(col.rho for col in data),
        )
    z0 = _cplx(point)
    sing = finite_singular_points(spec)
    if not any(abs(z0 - s) < 1e-12 * max(1.0, abs(s)) for s in sing):
        raise UnknownSingularity(f"{point} is not a singular point of {spec.family}")
    z0 = min(sing, key=lambda s: abs(s - z0))
    if spec.family == "dhe":
        data = _formal_columns(spec, "zero", 24)
        return IrregularExponents(1.0, tuple(col.phase_terms for col in data), tuple(col.rho for col in data))
    return _indicial(spec, z0)


# ---------------------------------------------------------------------------
# Frobenius series

def _log(z: complex, arg: float | None = None) -> complex:
    if arg is None:
        return cmath.log(z)
    return complex(math.log(abs(z)), arg)


@dataclass(frozen=True)
class FrobeniusSeed:
    point: complex
    exponent: complex
    coeffs: np.ndarray
    radius: float

    @property
    def order(self) -> int:
        return len(self.coeffs)

    def value(self, z: complex, arg: float | None = None) -> tuple[complex, complex]:
        """(w, w') at z; the power uses arg(z - point) = ``arg`` if given."""
        zeta = z - self.point
        n = np.arange(self.order)
        poly = complex(np.polynomial.polynomial.polyval(zeta, self.coeffs))
        dpoly = complex(np.polynomial.polynomial.polyval(zeta, self.coeffs[1:] * n[1:])) if self.order > 1 else 0j
        if self.exponent == 0:
            return poly, dpoly
        pw = cmath.exp(self.exponent * _log(zeta, arg))
        return pw * poly, pw * (dpoly + self.exponent * poly / zeta)


def frobenius_seed(spec: HeunSpec, point: complex, exponent: complex | int = 0, order: int = 20) -> FrobeniusSeed:
    """Truncated Frobenius solution (z - z0)^rho * sum c_n (z - z0)^n, c_0 = 1.

    ``exponent`` is either the exponent itself or an index (0 or 1) into the
    pair returned by :func:`characteristic_exponents`.
    """
    if order < 1:
        raise InputError("order must be at least 1")
    z0 = _cplx(point)
    sing = finite_singular_points(spec)
    match = [s for s in sing if abs(s - z0) < 1e-12 * max(1.0, abs(s))]
    if not match:
        raise UnknownSingularity(f"{point} is not a finite singular point of {spec.family}")
    z0 = match[0]
    if spec.family == "dhe":
        raise UnknownSingularity("the origin of the doubly confluent equation is irregular")
    exps = _indicial(spec, z0)
    if isinstance(exponent, int) and exponent in (0, 1) and not any(abs(e - exponent) < 1e-14 for e in exps):
        rho = exps[exponent]
    else:
        rho = _cplx(exponent)
        if min(abs(rho - e) for e in exps) > 1e-9 * max(1.0, abs(rho)):
            raise InputError(f"{rho} is not a local exponent at {z0}; exponents are {exps}")
        rho = min(exps, key=lambda e: abs(e - rho))
    P, Q = coefficients(spec)
    ph = P.local_series(z0, order + 1) * Ser.monomial(1.0, 1, order + 2)
    qh = Q.local_series(z0, order + 1) * Ser.monomial(1.0, 2, order + 3)
    pc = np.array([ph.coef(k) for k in range(order)])
    qc = np.array([qh.coef(k) for k in range(order)])

    def indicial(s):
        return s * (s - 1) + pc[0] * s + qc[0]

    c = np.zeros(order, dtype=complex)
    c[0] = 1.0
    for n in range(1, order):
        f = indicial(rho + n)
        acc = 0j
        for k in range(1, n + 1):
            acc += ((rho + n - k) * pc[k] + qc[k]) * c[n - k]
        if abs(f) < 1e-12 * max(1.0, abs(rho + n) ** 2):
            raise ResonantExponents(
                f"exponent {rho} at {z0} meets a resonance at order {n}; the logarithmic case is unsupported")
        c[n] = -acc / f
    others = [abs(s - z0) for s in sing if s != z0]
    radius = min(others) if others else math.inf
    return FrobeniusSeed(z0, rho, c, radius)


def ode_residual(spec: HeunSpec, z: complex, w: complex, dw: complex, d2w: complex) -> complex:
    P, Q = coefficients(spec)
    return d2w + P(z) * dw + Q(z) * w


# ---------------------------------------------------------------------------
# formal solutions at irregular points


@dataclass(frozen=True)
class SectorTable:
    ramification: int
    indices: tuple[int, ...]
    bounds: Callable[[int], tuple[float, float]]
    # leading data of u = w'/w per column: (valuation in t, coefficient, constant)
    columns: Callable[[HeunSpec], tuple[tuple[int, complex, complex], tuple[int, complex, complex]]]
    # orientation assigned to S_k ("L" lower / "U" upper)
    orientation: Callable[[int], str]


def _dhe_zero_const(spec: HeunSpec) -> complex:
    theta0 = spec.thetas["0"]
    return cmath.exp((1 - theta0) * 2 * cmath.log(spec.a))


SECTORS: dict[tuple[str, str], SectorTable] = {
    ("rthe", "inf"): SectorTable(
        2, tuple(range(-1, 5)),
        lambda k: ((2 * k - 5) * pi / 5, (2 * k - 1) * pi / 5),
        lambda s: ((-3, 2.0, 1.0), (-3, -2.0, 1.0)),
        lambda k: "L" if k % 2 else "U",
    ),
    ("the", "inf"): SectorTable(
        1, tuple(range(1, 8)),
        lambda k: ((2 * k - 3) * pi / 6, (2 * k + 1) * pi / 6),
        lambda s: ((1, -s["p"] / 2, 1.0), (-2, -2.0, 1.0)),
        lambda k: "U" if k % 2 else "L",
    ),
    ("rbhe", "inf"): SectorTable(
        2, tuple(range(-1, 3)),
        lambda k: ((2 * k - 3) * pi / 3, (2 * k + 1) * pi / 3),
        lambda s: ((-1, -1.0, 1.0), (-1, 1.0, 1j)),
        lambda k: "L" if k % 2 else "U",
    ),
    ("bhe", "inf"): SectorTable(
        1, tuple(range(1, 6)),
        lambda k: ((2 * k - 5) * pi / 4, (2 * k - 1) * pi / 4),
        lambda s: ((1, -s["p"] / 2, 1.0), (-1, -2.0, 1.0)),
        lambda k: "L" if k % 2 else "U",
    ),
    ("dhe", "inf"): SectorTable(
        1, (1, 2, 3),
        lambda k: ((-2 * k + 1) * pi / 2, (-2 * k + 5) * pi / 2),
        lambda s: ((1, -2 * s["p"], 1.0), (0, -0.5, 1.0)),
        lambda k: "L" if k % 2 else "U",
    ),
    ("dhe", "zero"): SectorTable(
        1, (1, 2, 3),
        lambda k: ((-2 * k + 1) * pi / 2, (-2 * k + 5) * pi / 2),
        lambda s: ((2, 2 * s.q, 1.0), (0, -0.5, _dhe_zero_const(s))),
        lambda k: "L" if k % 2 else "U",
    ),
    ("che", "inf"): SectorTable(
        1, (1, 2, 3),
        lambda k: ((-2 * k + 1) * pi / 2, (-2 * k + 5) * pi / 2),
        lambda s: ((1, -s["p"], 1.0), (0, -1.0, 1.0)),
        lambda k: "L" if k % 2 else "U",
    ),
}


def sector_table(spec: HeunSpec, side: str = "inf") -> SectorTable:
    try:
        return SECTORS[(spec.family, side)]
    except KeyError:
        raise UnknownSingularity(f"{spec.family} has no irregular point '{side}'") from None


@dataclass(frozen=True)
class FormalColumn:
    """w = const * z^rho * exp(phi(z) + E(z)), with u = w'/w a series in t.

    Powers of z are listed as (exponent, coefficient) pairs.
    """

    const: complex
    u_terms: tuple[tuple[float, complex], ...]
    phase_terms: dict[float, complex]
    rho: complex
    tail_terms: tuple[tuple[float, complex], ...]

    def log_value(self, lz: complex) -> tuple[complex, complex]:
        """(log w, u) at the point whose logarithm is ``lz``."""
        logw = cmath.log(self.const) + self.rho * lz
        for e, c in self.phase_terms.items():
            logw += c * cmath.exp(e * lz)
        for e, c in self.tail_terms:
            logw += c * cmath.exp(e * lz)
        u = sum(c * cmath.exp(e * lz) for e, c in self.u_terms)
        return logw, u

    def relative_tail(self, radius: float) -> float:
        """Size of the last two retained terms of u relative to the first."""
        mags = [abs(c) * radius ** e for e, c in self.u_terms]
        lead = max(mags[0], 1e-300) if mags[0] > 0 else max(max(mags), 1e-300)
        return max(mags[-2:]) / lead


def _formal_columns(spec: HeunSpec, side: str, order: int) -> list[FormalColumn]:
    table = sector_table(spec, side)
    r = table.ramification
    P, Q = coefficients(spec) if side == "inf" else _dhe_origin_coefficients(spec)
    cols = []
    # ``order`` counts powers of 1/z, so the series in t holds r * order terms
    order = order * r
    for val, lead, const in table.columns(spec):
        top = val + order + 4 * r + 4
        Ps = P.infinity_series(r, top - val)
        Qs = Q.infinity_series(r, top)
        lift = Ser.monomial(-1.0 / r, r + 1, top + r + 2)

        def residual(u: Ser, Ps=Ps, Qs=Qs, lift=lift) -> Ser:
            return lift * u.deriv() + u * u + Ps * u + Qs

        u, _ = solve_series(residual, val, lead, order)
        base = residual(Ser(val, u.c.copy()))
        scale = max(1.0, max(abs(x) for x in u.c[:3]))
        if abs(base.coef(base.val)) > 1e-8 * scale ** 2 and base.val < 2 * val:
            raise UnknownSingularity("leading formal data inconsistent with the equation")
        u_terms, phase, tail = [], {}, []
        rho = 0j
        for k, ck in enumerate(u.c):
            e = -(val + k) / r  # power of z
            u_terms.append((e, complex(ck)))
            if val + k == r:
                rho = complex(ck)
            elif e + 1 > 0:
                if ck != 0:
                    phase[e + 1] = complex(ck) / (e + 1)
            else:
                tail.append((e + 1, complex(ck) / (e + 1)))
        cols.append(FormalColumn(complex(const), tuple(u_terms), phase, rho, tuple(tail)))
    return cols


@dataclass(frozen=True)
class FormalSeed:
    """Truncated formal fundamental solution normalized in sector k."""

    spec: HeunSpec
    sector: int
    radius: float
    order: int
    side: str
    columns: tuple[FormalColumn, FormalColumn]

    @property
    def bounds(self) -> tuple[float, float]:
        return sector_table(self.spec, self.side).bounds(self.sector)

    def branch(self, z: complex) -> float:
        """arg z placed inside this sector's range (for the origin: arg of t)."""
        lo, hi = self.bounds
        th = cmath.phase(z)
        while th <= lo:
            th += 2 * pi
        while th >= hi:
            th -= 2 * pi
        if th <= lo:
            raise InputError(f"direction of {z} is not inside sector {self.sector}")
        return th

    def log_columns(self, z: complex, arg: float | None = None) -> list[tuple[complex, complex, complex]]:
        """Per column (log scale L, w e^-L, w' e^-L) at z; w' is d/dz (or d/dt)."""
        th = self.branch(z) if arg is None else arg
        lz = complex(math.log(abs(z)), th)
        out = []
        for col in self.columns:
            logw, u = col.log_value(lz)
            out.append((logw, 1.0 + 0j, u))
        return out

    def matrix(self, z: complex, arg: float | None = None) -> np.ndarray:
        """The fundamental matrix [[w1, w2], [w1', w2']] at z."""
        m = np.empty((2, 2), dtype=complex)
        for j, (lw, w, dw) in enumerate(self.log_columns(z, arg)):
            s = cmath.exp(lw)
            m[0, j] = s * w
            m[1, j] = s * dw
        return m

    def truncation_error(self, radius: float | None = None) -> float:
        R = self.radius if radius is None else radius
        return max(col.relative_tail(R) for col in self.columns)


SEED_TOL = 1e-12
MAX_RADIUS = 4096.0


def seeding_radius(spec: HeunSpec, order: int = 20, side: str = "inf", start: float = 8.0,
                   tol: float = SEED_TOL) -> float:
    """Smallest R = start * 2^j whose truncation estimate is below ``tol``."""
    cols = _formal_columns(spec, side, order)
    R = start
    while R <= MAX_RADIUS:
        if max(col.relative_tail(R) for col in cols) < tol:
            return R
        R *= 2
    raise RadiusTooSmall(f"no radius up to {MAX_RADIUS} meets truncation tolerance {tol}")


def asymptotic_seed(spec: HeunSpec, sector: int, radius: float | None = None, order: int = 20,
                    side: str = "inf", tol: float = SEED_TOL) -> FormalSeed:
    """Formal fundamental solution in sector ``sector`` of the irregular point.

    ``side`` is "inf" for the point at infinity and "zero" for the origin of
    the doubly confluent equation, which is handled in t = a^2 / z.
    """
    table = sector_table(spec, side)
    if sector not in table.indices:
        raise InputError(f"sector {sector} not among {table.indices}")
    cols = _formal_columns(spec, side, order)
    if radius is None:
        radius = seeding_radius(spec, order, side, tol=tol)
    else:
        err = max(col.relative_tail(radius) for col in cols)
        if err > tol:
            raise RadiusTooSmall(f"truncation estimate {err:.2e} at R={radius} exceeds {tol:.0e}")
    return FormalSeed(spec, sector, float(radius), order, side, (cols[0], cols[1]))
