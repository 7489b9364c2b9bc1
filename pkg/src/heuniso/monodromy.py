"""Stokes multipliers, local monodromies and cyclic-condition residuals.

Canonical solutions are built column by column. Column j of Y_k is the
unique solution that is maximally recessive on one ray inside the sector
Omega_k; it is seeded on that ray at radius R from the formal series, carried
inward by integrating the Riccati equation for u = w'/w (whose solution is
smooth where w is exponentially large or small), and finally transported
along a circle of moderate radius r0 with the linear system. Adjacent
sectors share exactly one recessive ray, and the multiplier of the
corresponding unit-triangular Stokes matrix is a ratio of Wronskians.

Large exponentials are carried as separate complex logarithms so that no
state ever overflows.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from math import pi

import numpy as np

from .complex_core import (
    IDENTITY,
    IntegratorConfig,
    Path,
    abel_defect,
    det2,
    exp_sigma3,
    integrate,
    integrate_linear_with_trace,
    inv2,
    lower,
    upper,
)
from .errors import (
    DegenerateParameterization,
    FamilyMismatch,
    IllConditionedMatch,
    IncompleteData,
    InputError,
    LoopThroughSingularity,
    NumericError,
    SeedFailure,
)
from .heun_family import (
    HeunSpec,
    Rational,
    _dhe_origin_coefficients,
    _formal_columns,
    cjson,
    coefficients,
    finite_singular_points,
    seeding_radius,
    sector_table,
)

CONDITION_CAP = 1e10


def _mjson(m: np.ndarray) -> list:
    return [[cjson(x) for x in row] for row in np.asarray(m)]


def _mfrom(obj) -> np.ndarray:
    return np.array([[complex(x[0], x[1]) for x in row] for row in obj], dtype=complex)


@dataclass
class MonodromyData:
    family: str
    thetas: dict[str, complex]
    stokes: list[tuple[str, complex]] = field(default_factory=list)
    monodromy: dict[str, np.ndarray] = field(default_factory=dict)
    connection: dict[str, np.ndarray] = field(default_factory=dict)
    gauge: str = ""
    traces: list[tuple[str, complex]] = field(default_factory=list)
    residual: float | None = None
    diagnostics: dict = field(default_factory=dict)

    def multiplier(self, label) -> complex:
        label = str(label)
        for k, v in self.stokes:
            if k == label:
                return v
        raise IncompleteData(f"no Stokes multiplier labelled {label!r}")

    @property
    def exponent_constants(self) -> dict[str, complex]:
        return {k: cmath.exp(1j * pi * v) for k, v in self.thetas.items()}

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "thetas": {k: cjson(v) for k, v in self.thetas.items()},
            "stokes": [[k, cjson(v)] for k, v in self.stokes],
            "monodromy": {k: _mjson(v) for k, v in self.monodromy.items()},
            "connection": {k: _mjson(v) for k, v in self.connection.items()},
            "gauge": self.gauge,
            "traces": [[k, cjson(v)] for k, v in self.traces],
            "residual": self.residual,
            "diagnostics": self.diagnostics,
        }

    @staticmethod
    def from_json(obj: dict) -> "MonodromyData":
        return MonodromyData(
            family=obj["family"],
            thetas={k: complex(*v) for k, v in obj["thetas"].items()},
            stokes=[(k, complex(*v)) for k, v in obj["stokes"]],
            monodromy={k: _mfrom(v) for k, v in obj.get("monodromy", {}).items()},
            connection={k: _mfrom(v) for k, v in obj.get("connection", {}).items()},
            gauge=obj.get("gauge", ""),
            traces=[(k, complex(*v)) for k, v in obj.get("traces", [])],
            residual=obj.get("residual"),
            diagnostics=obj.get("diagnostics", {}),
        )


@dataclass(frozen=True)
class MatchPlan:
    """Geometry of the matching computation.

    ``seed_radius`` None means the radius rule picks R; ``inner_radius`` None
    means r0 = max(1, 1.5 * largest finite singular point), or max(1, |a|) for
    the doubly confluent equation. For Fuchsian loops, ``basepoint`` None
    means i * max(2, |a|), and ``loops`` maps labels to closed paths.
    """

    seed_radius: float | None = None
    inner_radius: float | None = None
    order: int = 20
    basepoint: complex | None = None
    loops: dict | None = None


_RIC_CFG = IntegratorConfig(rel_tol=1e-11, abs_tol=1e-13, max_step=10.0)


class _SideSolver:
    """Canonical solutions at one irregular point (z = inf, or t = a^2/z = inf)."""

    def __init__(self, spec: HeunSpec, side: str, plan: MatchPlan, cfg: IntegratorConfig):
        self.spec, self.side, self.cfg = spec, side, cfg
        self.table = sector_table(spec, side)
        self.P, self.Q = coefficients(spec) if side == "inf" else _dhe_origin_coefficients(spec)
        self.cols = _formal_columns(spec, side, plan.order)
        if side == "zero" or spec.family == "dhe":
            sing_scale = abs(spec.a)
            r0 = max(1.0, sing_scale)
        else:
            pts = finite_singular_points(spec)
            r0 = max([1.0] + [1.5 * abs(p) for p in pts])
        self.r0 = plan.inner_radius or r0
        if plan.seed_radius is None:
            self.R = seeding_radius(spec, plan.order, side, start=max(8.0, 4 * self.r0))
        else:
            self.R = float(plan.seed_radius)
        # leading phase difference between the two columns
        ph0, ph1 = self.cols[0].phase_terms, self.cols[1].phase_terms
        m = max(list(ph0) + list(ph1))
        self.rank = m
        self.lead = ph0.get(m, 0) - ph1.get(m, 0)
        self._cache: dict = {}

    # -- geometry ----------------------------------------------------------
    def recessive_ray(self, k: int, j: int) -> float:
        lo, hi = self.table.bounds(k)
        d = self.lead if j == 0 else -self.lead
        base = (pi - cmath.phase(d)) / self.rank
        step = 2 * pi / self.rank
        n = math.floor((lo - base) / step) - 1
        cands = []
        while base + n * step < hi + step:
            th = base + n * step
            if lo < th < hi:
                cands.append(th)
            n += 1
        if not cands:
            raise SeedFailure(f"no recessive direction for column {j} in sector {k}")
        mid = 0.5 * (lo + hi)
        return min(cands, key=lambda th: abs(th - mid))

    # -- ODE pieces --------------------------------------------------------
    def _phase0(self, col, lz: complex) -> tuple[complex, complex]:
        """Polynomial part rho*log z + phi(z) and its derivative."""
        z = cmath.exp(lz)
        val = col.rho * lz
        der = col.rho / z
        for e, c in col.phase_terms.items():
            ze = cmath.exp(e * lz)
            val += c * ze
            der += c * e * ze / z
        return val, der

    def _linear(self, z, y):
        return np.array([y[1], -self.Q(z) * y[0] - self.P(z) * y[1]])

    def _seed_on_ray(self, j: int, theta: float):
        """log scale L and scaled state (w, w') e^-L at r0 e^{i theta}."""
        key = (j, round(theta, 12))
        if key in self._cache:
            return self._cache[key]
        col = self.cols[j]
        lzR = complex(math.log(self.R), theta)
        logw, u = col.log_value(lzR)
        ph, _ = self._phase0(col, lzR)
        v0 = logw - ph  # const, tail and nothing else
        zR = self.R * cmath.exp(1j * theta)
        z0 = self.r0 * cmath.exp(1j * theta)
        P, Q = self.P, self.Q

        def ric(z, y):
            lz = complex(math.log(abs(z)), theta)
            _, d = self._phase0(col, lz)
            uu = y[0]
            return np.array([-uu * uu - P(z) * uu - Q(z), uu - d])

        result = None
        try:
            r = integrate(ric, Path.line(zR, z0), np.array([u, v0]), _RIC_CFG)
            uu, vv = r.final
            ph1, _ = self._phase0(col, complex(math.log(self.r0), theta))
            L = ph1 + vv
            result = (L, np.array([1.0 + 0j, uu]))
        except NumericError:
            result = None
        if result is None:
            # Riccati hit a zero of w; fall back to the linear system inward
            r_sw = max(self.r0, self.R / 4)
            zs = r_sw * cmath.exp(1j * theta)
            r = integrate(ric, Path.line(zR, zs), np.array([u, v0]), _RIC_CFG)
            uu, vv = r.final
            ph1, _ = self._phase0(col, complex(math.log(r_sw), theta))
            L = ph1 + vv
            L, st = self._transport_linear(L, np.array([1.0 + 0j, uu]), Path.line(zs, z0))
            result = (L, st)
        self._cache[key] = result
        return result

    def _transport_linear(self, L: complex, state: np.ndarray, path: Path, pieces: int = 8):
        segs = []
        for seg in path.segments:
            segs.extend(_split(seg, pieces))
        for seg in segs:
            r = integrate(self._linear, Path((seg,)), state, self.cfg)
            state = r.final
            n = float(np.max(np.abs(state)))
            if n == 0 or not math.isfinite(n):
                raise SeedFailure("solution vanished or overflowed during transport")
            state = state / n
            L = L + math.log(n)
        return L, state

    def solution_at(self, j: int, theta_ray: float, theta_to: float):
        """Column j recessive on theta_ray, continued along |z| = r0 to theta_to."""
        L, st = self._seed_on_ray(j, theta_ray)
        if abs(theta_to - theta_ray) < 1e-15:
            return L, st
        arc = Path.arc(0j, self.r0, theta_ray, theta_to)
        return self._transport_linear(L, st, arc)

    # -- Stokes matrices ---------------------------------------------------
    def stokes(self, k: int) -> tuple[complex, str, float, float]:
        """(multiplier, orientation, unit-diagonal defect, condition) of S_k."""
        rays_k = [self.recessive_ray(k, j) for j in (0, 1)]
        rays_n = [self.recessive_ray(k + 1, j) for j in (0, 1)]
        shared = [j for j in (0, 1) if abs(rays_k[j] - rays_n[j]) < 1e-9]
        if len(shared) != 1:
            raise SeedFailure(f"sectors {k} and {k + 1} do not share exactly one recessive ray")
        js = shared[0]
        jo = 1 - js
        th = rays_k[js]
        ys = self.solution_at(js, th, th)
        yk = self.solution_at(jo, rays_k[jo], th)
        yn = self.solution_at(jo, rays_n[jo], th)
        orient = "L" if js == 1 else "U"
        if orient != self.table.orientation(k):
            raise SeedFailure(f"S_{k} came out {orient}, expected {self.table.orientation(k)}")

        def wr(a, b):
            return a[1][0] * b[1][1] - a[1][1] * b[1][0], a[0] + b[0]

        # columns ordered (col0, col1) for Y_k
        y_k = {js: ys, jo: yk}
        base, lb = wr(y_k[0], y_k[1])
        cond = (abs(y_k[0][1][0] * y_k[1][1][1]) + abs(y_k[0][1][1] * y_k[1][1][0])) / max(abs(base), 1e-300)
        if cond > CONDITION_CAP:
            raise IllConditionedMatch(f"Wronskian condition {cond:.2e} at S_{k}")
        if orient == "L":
            num, ln = wr(y_k[0], yn)          # W(y_k0, y_{k+1,0})
            diag, ld = wr(yn, y_k[1])         # W(y_{k+1,0}, y_k1)
        else:
            num, ln = wr(yn, y_k[1])          # W(y_{k+1,1}, y_k1)
            diag, ld = wr(y_k[0], yn)         # W(y_k0, y_{k+1,1})
        s = num / base * cmath.exp(ln - lb)
        defect = abs(diag / base * cmath.exp(ld - lb) - 1.0)
        return s, orient, defect, cond

    def fundamental_at(self, k: int, theta: float):
        """Scaled fundamental matrix of Y_k at r0 e^{i theta} and its log scales."""
        F = np.empty((2, 2), dtype=complex)
        Ls = []
        for j in (0, 1):
            L, st = self.solution_at(j, self.recessive_ray(k, j), theta)
            F[:, j] = st
            Ls.append(L)
        return F, np.array(Ls)


def _split(seg, n: int):
    from .complex_core import ArcSegment, LineSegment
    if isinstance(seg, LineSegment):
        pts = [seg.start + (seg.end - seg.start) * i / n for i in range(n + 1)]
        return [LineSegment(a, b) for a, b in zip(pts, pts[1:])]
    th = [seg.theta0 + (seg.theta1 - seg.theta0) * i / n for i in range(n + 1)]
    return [ArcSegment(seg.center, seg.radius, a, b) for a, b in zip(th, th[1:])]


def _transfer(matrix, path: Path, cfg: IntegratorConfig) -> tuple[np.ndarray, float]:
    """Transfer matrix of (w, w')' = A (w, w') along ``path`` and its Abel defect."""
    T, tr = integrate_linear_with_trace(matrix, path, IDENTITY.copy(), cfg)
    return T, abel_defect(IDENTITY, T, tr)


def _companion(P: Rational, Q: Rational):
    def matrix(z):
        return np.array([[0, 1], [-Q(z), -P(z)]], dtype=complex)
    return matrix


def lasso(base: complex, center: complex, radius: float) -> Path:
    """Straight tail from base to the circle around center, one ccw turn, back."""
    d = base - center
    phi = cmath.phase(d)
    touch = center + radius * cmath.exp(1j * phi)
    tail = Path.line(base, touch)
    loop = Path.arc(center, radius, phi, phi + 2 * pi)
    return tail + loop + tail.reversed()


# ---------------------------------------------------------------------------
# public operations

_GAUGE = {
    "rthe": "Y_k normalized at infinity; multipliers are gauge-free",
    "the": "Y_k normalized at infinity; multipliers are gauge-free",
    "rbhe": "Y_k normalized at infinity; multipliers are gauge-free",
    "bhe": "Y_k normalized at infinity; E (not computed) is defined up to a left diagonal factor",
    "dhe": "origin multipliers use the branch (a^2)^(1-theta0) = exp(2(1-theta0) log a), principal log",
    "che": "M0, M1 expressed in the basis Y_1 normalized at infinity; E_k only up to left diagonal factors",
}


def compute_stokes(spec: HeunSpec, plan: MatchPlan | None = None, cfg: IntegratorConfig | None = None) -> MonodromyData:
    """Stokes multipliers of an equation with an irregular singular point."""
    if spec.family == "he":
        raise InputError("the Heun equation is Fuchsian; use compute_fuchsian_monodromy")
    plan = plan or MatchPlan()
    cfg = cfg or IntegratorConfig()
    sides = ["inf", "zero"] if spec.family == "dhe" else ["inf"]
    data = MonodromyData(spec.family, dict(spec.thetas), gauge=_GAUGE[spec.family])
    diag = {"defect": 0.0, "condition": 0.0}
    solvers = {}
    for side in sides:
        sol = _SideSolver(spec, side, plan, cfg)
        solvers[side] = sol
        diag[f"R_{side}"] = sol.R
        diag[f"r0_{side}"] = sol.r0
        idx = sol.table.indices
        for k in idx[:-1]:
            s, _, defect, cond = sol.stokes(k)
            label = str(k) if len(sides) == 1 else f"{'inf' if side == 'inf' else '0'}:{k}"
            data.stokes.append((label, s))
            diag["defect"] = max(diag["defect"], defect)
            diag["condition"] = max(diag["condition"], cond)
    diag["abel"] = max(_transfer(_companion(sol.P, sol.Q), Path.arc(0j, sol.r0, 0.0, 2 * pi), cfg)[1]
                       for sol in solvers.values())
    data.diagnostics = diag
    if spec.family == "che":
        _che_local_monodromy(spec, solvers["inf"], data, cfg)
    data.residual = cyclic_residual(data)
    return data


def _che_local_monodromy(spec: HeunSpec, sol: _SideSolver, data: MonodromyData, cfg: IntegratorConfig):
    a = spec.a
    th = spec.thetas
    lo, hi = sol.table.bounds(1)
    # base point chosen so that the loop around 0 precedes the loop around a
    theta_b = cmath.phase(a) + pi / 2
    while theta_b <= lo:
        theta_b += 2 * pi
    while theta_b >= hi:
        theta_b -= 2 * pi
    base = sol.r0 * cmath.exp(1j * theta_b)
    F, L = sol.fundamental_at(1, theta_b)
    A = _companion(sol.P, sol.Q)
    rad = 0.3 * min(abs(a), 1.0)
    Finv = inv2(F)
    for label, center in (("0", 0j), ("1", a)):
        path = lasso(base, center, rad)
        other = a if label == "0" else 0j
        if path.distance_to(other) < 0.5 * rad:
            raise LoopThroughSingularity(f"loop around {center} passes near {other}")
        T, ab = _transfer(A, path, cfg)
        data.diagnostics["abel"] = max(data.diagnostics.get("abel", 0.0), ab)
        raw = Finv @ T @ F
        scale = np.exp(L[None, :] - L[:, None])
        raw = raw * scale
        data.monodromy[label] = cmath.exp(1j * pi * th[label]) * raw
    data.diagnostics["basepoint"] = [base.real, base.imag]


def compute_fuchsian_monodromy(spec: HeunSpec, basepoint: complex | None = None, loops: dict | None = None,
                               cfg: IntegratorConfig | None = None) -> MonodromyData:
    """Monodromy matrices of the Heun equation in the basis equal to I at the basepoint.

    Without ``loops``, lassos around 0, 1, a and a large circle around infinity
    are used. M_k = e^{-pi i theta_k} (raw monodromy) for finite points, and
    M_inf is taken along the loop positively oriented around infinity, so that
    M_inf M_(3) M_(2) M_(1) = I in the geometric order of the lassos.
    """
    if spec.family != "he":
        raise InputError("Fuchsian monodromy is defined here for the Heun equation only")
    # monodromy entries can reach 1e2-1e3, so the loops are integrated tighter
    # than the default to keep the absolute product residual small
    cfg = cfg or IntegratorConfig(rel_tol=1e-12, abs_tol=1e-14)
    a = spec.a
    pts = {"0": 0j, "1": 1 + 0j, "2": a}
    b = complex(basepoint) if basepoint is not None else 1j * max(2.0, abs(a))
    P, Q = coefficients(spec)
    A = _companion(P, Q)
    th = spec.thetas
    data = MonodromyData("he", dict(th), gauge="fundamental matrix equal to the identity at the basepoint")
    for z in pts.values():
        if abs(b - z) < 1e-3:
            raise LoopThroughSingularity("basepoint coincides with a singular point")
    if loops is None:
        loops = {}
        for label, z in pts.items():
            others = [abs(z - w) for k, w in pts.items() if k != label]
            rad = min(0.4 * min(others), 0.5 * abs(b - z), 0.5)
            loops[label] = lasso(b, z, rad)
        big = 2.0 * max(abs(b), 2.0, abs(a))
        up = b / abs(b) * big
        ph = cmath.phase(b)
        tail = Path.line(b, up)
        loops["inf"] = tail + Path.arc(0j, big, ph, ph - 2 * pi) + tail.reversed()
    raw, abel = {}, {}
    for label, path in loops.items():
        if abs(path.start - b) > 1e-9 or abs(path.end - b) > 1e-9:
            raise InputError(f"loop {label!r} must start and end at the basepoint")
        for z in pts.values():
            if path.distance_to(z) < 1e-3:
                raise LoopThroughSingularity(f"loop {label!r} passes within 1e-3 of {z}")
        raw[label], abel[label] = _transfer(A, path, cfg)
    alpha, beta = spec["alpha"], spec["beta"]
    for label, m in raw.items():
        if label in ("0", "1", "2"):
            data.monodromy[label] = cmath.exp(-1j * pi * th[label]) * m
        elif label == "inf":
            data.monodromy[label] = cmath.exp(-1j * pi * (alpha + beta)) * m
        else:
            data.monodromy[label] = m
    order = sorted(("0", "1", "2"), key=lambda k: (cmath.phase(pts[k] - b) - cmath.phase(b)) % (2 * pi))
    data.diagnostics = {"order": order, "basepoint": [b.real, b.imag], "abel": max(abel.values())}
    he_traces(data)
    if all(k in data.monodromy for k in ("0", "1", "2", "inf")):
        data.residual = cyclic_residual(data)
    return data


def he_traces(data: MonodromyData):
    M = data.monodromy
    tr = []
    for k in ("0", "1", "2", "inf"):
        if k in M:
            tr.append((f"Tr M{k}", complex(np.trace(M[k]))))
    for j, k in (("0", "1"), ("0", "2"), ("1", "2")):
        if j in M and k in M:
            tr.append((f"Tr M{j}M{k}", complex(np.trace(M[j] @ M[k]))))
    data.traces = tr


def _needs(data: MonodromyData, labels):
    have = {k for k, _ in data.stokes}
    missing = [str(x) for x in labels if str(x) not in have]
    if missing:
        raise IncompleteData(f"{data.family}: missing multipliers {missing}")
    return [data.multiplier(x) for x in labels]


def cyclic_residual(data: MonodromyData) -> float:
    """Largest violation of the family's cyclic condition."""
    fam, th = data.family, data.thetas
    e = cmath.exp
    if fam == "rthe":
        idx = [-1, 0, 1, 2, 3]
        s = dict(zip(idx, _needs(data, idx)))

        def S(k):
            return s[(k + 1) % 5 - 1]

        return max(abs(S(k) - 1j * (1 + S(k + 2) * S(k + 3))) for k in idx)
    if fam == "the":
        s1, s2, s3, s4, s5, s6 = _needs(data, range(1, 7))
        mu = th["mu"]
        w = e(2j * pi * mu)
        r = [
            1 + s1 * s2 + w * (1 + s4 * s5),
            1 + s2 * s3 + (1 / w) * (1 + s5 * s6),
            s1 + s3 + s1 * s2 * s3 - w * s5,
        ]
        return max(abs(x) for x in r)
    if fam == "rbhe":
        sm, s0, sp = _needs(data, (-1, 0, 1))
        return abs(sm * s0 * sp + sm + sp - s0 + 2 * cmath.cos(2 * pi * th["alpha"]))
    if fam == "bhe":
        s1, s2, s3, s4 = _needs(data, range(1, 5))
        ti, t0 = th["inf"], th["0"]
        lhs = e(2j * pi * ti) * (1 + s2 * s3) + e(-2j * pi * ti) * (s1 * s4 + (1 + s1 * s2) * (1 + s3 * s4))
        return abs(lhs - 2 * cmath.cos(2 * pi * t0))
    if fam == "dhe":
        a1, a2, o1, o2 = _needs(data, ("inf:1", "inf:2", "0:1", "0:2"))
        ti, t0 = th["inf"], th["0"]
        lhs = e(1j * pi * ti) * a1 * a2 + 2 * cmath.cos(pi * ti)
        rhs = e(1j * pi * t0) * o1 * o2 + 2 * cmath.cos(pi * t0)
        return abs(lhs - rhs)
    if fam == "che":
        s1, s2 = _needs(data, (1, 2))
        if "0" not in data.monodromy or "1" not in data.monodromy:
            raise IncompleteData("che: local monodromies M0, M1 missing")
        lhs = data.monodromy["1"] @ data.monodromy["0"]
        rhs = lower(s1) @ upper(s2) @ exp_sigma3(-1j * pi * th["inf"])
        return float(np.max(np.abs(lhs - rhs)))
    if fam == "he":
        M = data.monodromy
        if not all(k in M for k in ("0", "1", "2", "inf")):
            raise IncompleteData("he: need M0, M1, M2 and M_inf")
        order = data.diagnostics.get("order", ["0", "1", "2"])
        prod = M["inf"]
        for k in reversed(order):
            prod = prod @ M[k]
        return float(np.max(np.abs(prod - IDENTITY)))
    raise IncompleteData(f"unknown family {fam}")


def invariants_distance(d1: MonodromyData, d2: MonodromyData, theta_tol: float = 1e-9) -> float:
    """Distance between basis-independent monodromy invariants."""
    if d1.family != d2.family:
        raise FamilyMismatch(f"{d1.family} vs {d2.family}")
    for k in set(d1.thetas) | set(d2.thetas):
        if abs(d1.thetas.get(k, math.nan) - d2.thetas.get(k, math.nan)) > theta_tol or k not in d1.thetas:
            raise FamilyMismatch(f"fixed exponent {k} differs")
    if d1.family == "he":
        t1, t2 = dict(d1.traces), dict(d2.traces)
        keys = sorted(set(t1) & set(t2))
        if not keys:
            raise IncompleteData("no common trace invariants")
        return max(abs(t1[k] - t2[k]) for k in keys)
    s1, s2 = dict(d1.stokes), dict(d2.stokes)
    if set(s1) != set(s2):
        raise IncompleteData("multiplier sets differ")
    dist = max(abs(s1[k] - s2[k]) for k in s1)
    if d1.family == "che":
        for k in ("0", "1"):
            if k in d1.monodromy and k in d2.monodromy:
                dist = max(dist, float(np.max(np.abs(d1.monodromy[k] - d2.monodromy[k]))))
    return dist


def che_connection_parameterization(sigma: complex, s: complex, theta0: complex, theta1: complex,
                                    theta_inf: complex) -> tuple[np.ndarray, np.ndarray]:
    """Connection matrices (E0, E1) in the sigma, s parameterization.

    The diagonal factors D0, D1, D are set to the identity; any other choice
    changes E_k only by left/right diagonal factors.
    """
    sig, s = complex(sigma), complex(s)
    if sig == 0 or s == 0:
        raise DegenerateParameterization("sigma and s must be nonzero")
    sn = cmath.sin
    h = pi / 2
    right = np.array([
        [cmath.exp(-1j * h * sig), sn(h * (theta_inf + sig))],
        [cmath.exp(1j * h * sig), sn(h * (theta_inf - sig))],
    ])
    left1 = np.array([
        [sn(h * (theta1 + theta0 + sig)) * sn(h * (theta1 - theta0 + sig)),
         -s * sn(h * (theta1 + theta0 - sig)) * sn(h * (theta1 - theta0 - sig))],
        [-1 / s, 1],
    ])
    left0 = np.array([
        [sn(h * (theta1 + theta0 + sig)), -s * cmath.exp(-1j * pi * sig) * sn(h * (theta1 + theta0 - sig))],
        [-cmath.exp(1j * pi * sig) / s * sn(h * (theta1 - theta0 + sig)), sn(h * (theta1 - theta0 - sig))],
    ])
    E1, E0 = left1 @ right, left0 @ right
    for name, E in (("E0", E0), ("E1", E1)):
        if abs(det2(E)) < 1e-12 * max(1.0, float(np.sum(np.abs(E) ** 2))):
            raise DegenerateParameterization(f"{name} is singular for these parameters")
    return E0, E1


def local_monodromy(E: np.ndarray, theta: complex) -> np.ndarray:
    """M = E^{-1} e^{pi i theta sigma3} E."""
    return inv2(E) @ exp_sigma3(1j * pi * theta) @ E


def sigma_from_stokes(s1: complex, s2: complex, theta_inf: complex) -> complex:
    """sigma with 2 cos(pi sigma) = 2 cos(pi theta_inf) + s1 s2 e^{pi i theta_inf}, 0 <= Re sigma <= 1."""
    c = cmath.cos(pi * theta_inf) + 0.5 * s1 * s2 * cmath.exp(1j * pi * theta_inf)
    sig = cmath.acos(c) / pi
    if sig.real < 0:
        sig = -sig
    if sig.real > 1:
        sig = 2 - sig
    return sig
