"""Accessory parameters of Heun class equations from Painleve local data.

Every entry of the dictionary takes a classified event (a, b, branch) of a
Painleve solution and produces the Heun equation of the matching family:
its fixed parameters (with the exponent shifts the case requires), the
point a and the accessory parameter q. Where a case admits a closed
expression of q in the free coefficient b, it is primary and the tau-function
limit is an independent cross-check; otherwise q comes from the limit.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

from .errors import (
    EventShortfall,
    InputError,
    MissingTrajectory,
    UnsupportedCase,
)
from .heun_family import HeunSpec, cjson
from .painleve import (
    InitialData,
    LocalExpansion,
    PainleveKind,
    PainleveTrajectory,
    scan_trajectories,
)
from .tau import LimitRecipe, regularized_limit


@dataclass(frozen=True)
class TauRoute:
    """q = lim(factor * T - subtract/(x - a)) + const, T = m(x) dlog tau."""

    factor: Callable[[PainleveKind, complex], complex]
    subtract: Callable[[PainleveKind, complex], complex]
    const: Callable[[PainleveKind, complex], complex]


@dataclass(frozen=True)
class CaseEntry:
    label: str
    family: str
    painleve: str
    event: str
    branches: tuple[str, ...]
    params: Callable[[PainleveKind, complex], dict]
    closed: Callable[[PainleveKind, complex, complex], complex] | None
    tau: TauRoute
    heun_a: Callable[[complex], complex] = lambda a: a
    variant: str | None = None
    note: str = ""


def _c(v):
    return lambda k, a: v


_ZERO = _c(0.0)
_ONE = _c(1.0)


def _tau(factor=_ONE, subtract=_ZERO, const=_ZERO) -> TauRoute:
    return TauRoute(factor, subtract, const)


# --- helpers on Painleve parameters ---------------------------------------

def _p3(k):
    return k.params  # theta0, thetainf


def _p5(k):
    t0, t1, ti = k.params
    sig = t0 + t1 + ti
    K = ((t0 + t1) ** 2 - ti**2) / 4
    return t0, t1, ti, sig, K


def _p6(k):
    t0, t1, t2, ti = k.params
    k1, k2 = k.kappas()
    return t0, t1, t2, ti, t0 + t1 + t2, k1, k2


def _he_params(gamma, delta, eps, X, Y):
    """HE fixed parameters from the exponents and p = X*Y/4.

    alpha and beta are -X/2, -Y/2 or X/2, Y/2, whichever satisfies
    alpha + beta + 1 = gamma + delta + epsilon.
    """
    target = gamma + delta + eps - 1
    if abs((-X - Y) / 2 - target) <= abs((X + Y) / 2 - target):
        al, be = -X / 2, -Y / 2
    else:
        al, be = X / 2, Y / 2
    return {"alpha": al, "beta": be, "gamma": gamma, "delta": delta, "epsilon": eps}


# --- the dictionary -----------------------------------------------------------

def _build() -> list[CaseEntry]:
    E: list[CaseEntry] = []

    # RTHE from PI poles
    E.append(CaseEntry(
        "RTHE/pole", "rthe", "P1", "pole", ("pole",),
        lambda k, a: {},
        lambda k, a, b: -28 * b,
        _tau(_c(2.0), _c(2.0)),
    ))

    # THE from PII poles
    E.append(CaseEntry(
        "THE/pole/eps+", "the", "P2", "pole", ("eps+",),
        lambda k, a: {"p": 3 - 2 * k.mu},
        lambda k, a, b: -a * a / 18 - 10 * b,
        _tau(_c(2.0), _c(2.0)),
    ))
    E.append(CaseEntry(
        "THE/pole/eps-", "the", "P2", "pole", ("eps-",),
        lambda k, a: {"p": 1 - 2 * k.mu},
        lambda k, a, b: -a * a / 18 + 10 * b,
        _tau(_c(2.0)),
    ))

    # RBHE from PXXXIV poles and zeros
    E.append(CaseEntry(
        "RBHE/pole", "rbhe", "P34", "pole", ("pole",),
        lambda k, a: {"two_alpha": k.two_alpha + 1},
        lambda k, a, b: a * a / 3 - 5 * b,
        _tau(subtract=_ONE),
    ))
    E.append(CaseEntry(
        "RBHE/zero/eps+", "rbhe", "P34", "zero", ("eps+",),
        lambda k, a: {"two_alpha": k.two_alpha},
        lambda k, a, b: b,
        _tau(),
    ))
    E.append(CaseEntry(
        "RBHE/zero/eps-", "rbhe", "P34", "zero", ("eps-",),
        lambda k, a: {"two_alpha": k.two_alpha + 2},
        lambda k, a, b: b,
        _tau(),
    ))

    # DHE from PIII poles and zeros (s = a z absorbed into the spec)
    def dhe_base(k, a):
        t0, ti = _p3(k)
        return a * a / 8 - (t0**2 - ti**2) / 8

    E.append(CaseEntry(
        "DHE/pole/eps+", "dhe", "P3", "pole", ("eps+",),
        lambda k, a: {"gamma": 1 + k.theta0, "p": (k.thetainf + k.theta0) / 4},
        lambda k, a, b: -3 * a * a * b / 8 + a * a / 8 + (2 * k.theta0 + 1) * (2 * k.theta0 + 5) / 32,
        _tau(_c(0.5), _ZERO, dhe_base),
        note="variable rescaled as s = a z",
    ))
    E.append(CaseEntry(
        "DHE/zero/sigma+", "dhe", "P3", "zero", ("sigma+",),
        lambda k, a: {"gamma": 2 + k.theta0, "p": (k.thetainf + k.theta0) / 4},
        None,
        _tau(_c(0.5), _ZERO, lambda k, a: dhe_base(k, a) - (k.theta0 + k.thetainf) / 2),
        note="variable rescaled as s = a z",
    ))
    E.append(CaseEntry(
        "DHE/zero/sigma-", "dhe", "P3", "zero", ("sigma-",),
        lambda k, a: {"gamma": 2 + k.theta0, "p": (k.thetainf + k.theta0 + 2) / 4},
        None,
        _tau(_c(0.5), lambda k, a: a / 2, lambda k, a: dhe_base(k, a) - k.theta0 / 2 - 0.75),
        note="variable rescaled as s = a z",
    ))
    E.append(CaseEntry(
        "DHE/pole/eps-", "dhe", "P3", "pole", ("eps-",),
        lambda k, a: {"gamma": 1 - k.theta0, "p": (k.thetainf - k.theta0) / 4},
        None,
        _tau(_c(0.5), _ZERO, lambda k, a: -a * a / 8 - (k.theta0**2 - k.thetainf**2) / 8),
        heun_a=lambda a: 1j * a,
        note="variable rescaled as s = a z; the a^2/(2 s^2) term has the opposite sign, so the canonical point is i*a",
    ))

    # BHE from PIV zeros and poles
    E.append(CaseEntry(
        "BHE/zero/eps+", "bhe", "P4", "zero", ("eps+",),
        lambda k, a: {"gamma": 2 * k.theta0, "p": 2 * (k.theta0 + k.thetainf)},
        None,
        _tau(const=lambda k, a: -2 * (k.theta0 + k.thetainf) * a),
    ))
    E.append(CaseEntry(
        "BHE/zero/eps-", "bhe", "P4", "zero", ("eps-",),
        lambda k, a: {"gamma": 2 * k.theta0 + 2, "p": 2 * (k.theta0 + k.thetainf + 1)},
        None,
        _tau(const=lambda k, a: -2 * (k.theta0 + k.thetainf + 1) * a),
    ))
    E.append(CaseEntry(
        "BHE/pole/sigma+", "bhe", "P4", "pole", ("sigma+",),
        lambda k, a: {"gamma": 2 * k.theta0 + 1, "p": 2 * (k.theta0 + k.thetainf + 1)},
        lambda k, a, b: -b - (2 * k.theta0 + 2 * k.thetainf - 0.5) * a,
        _tau(subtract=_ONE, const=lambda k, a: -(2 * k.theta0 + 2 * k.thetainf + 1) * a),
    ))
    E.append(CaseEntry(
        "BHE/pole/sigma-", "bhe", "P4", "pole", ("sigma-",),
        lambda k, a: {"gamma": 2 * k.theta0 + 1, "p": 2 * (k.theta0 + k.thetainf)},
        lambda k, a, b: -b - (2 * k.theta0 + 2 * k.thetainf + 0.5) * a,
        _tau(const=lambda k, a: -2 * (k.theta0 + k.thetainf) * a),
    ))

    # CHE from PV poles, zeros and one-points
    def che_q1(k, a):
        t0, t1, ti, sig, K = _p5(k)
        return (t0 + ti) * a / 2 - K

    def che_q2(k, a):
        t0, t1, ti, sig, K = _p5(k)
        return (t0 + ti + 2) * a / 2 - K

    def che_params(g_shift, d_shift, p_shift):
        def f(k, a):
            t0, t1, ti, sig, K = _p5(k)
            return {"gamma": t0 + g_shift, "delta": t1 + d_shift, "p": (sig + p_shift) / 2}
        return f

    def che_closed(k, a, b):
        t0, t1, ti, sig, K = _p5(k)
        c = t0 - t1 + ti
        return a * c / 4 - b * c * c / 4 + (ti + 1) * c / 4 - t0 * t1

    E.append(CaseEntry("CHE/pole/eps+", "che", "P5", "pole", ("eps+",),
                       che_params(0, 1, 0), che_closed, _tau(const=che_q1)))
    E.append(CaseEntry("CHE/pole/eps-", "che", "P5", "pole", ("eps-",),
                       che_params(1, 0, 2), None, _tau(const=che_q2)))
    E.append(CaseEntry("CHE/zero/delta+", "che", "P5", "zero", ("delta+",),
                       che_params(0, 1, 2), None, _tau(const=che_q1)))
    E.append(CaseEntry("CHE/zero/delta-", "che", "P5", "zero", ("delta-",),
                       che_params(1, 0, 0), None, _tau(const=che_q1)))
    E.append(CaseEntry(
        "CHE/one_point/omega-/phi1", "che", "P5", "one_point", ("omega-",),
        che_params(1, 1, 2), None,
        _tau(subtract=lambda k, a: a,
             const=lambda k, a: che_q1(k, a) + 1 - k.theta0 - k.theta1),
        variant="phi1",
    ))
    E.append(CaseEntry(
        "CHE/one_point/omega-/phi2", "che", "P5", "one_point", ("omega-",),
        che_params(1, 1, 2), None,
        _tau(subtract=lambda k, a: a,
             const=lambda k, a: che_q2(k, a) + 1 - k.theta0 - k.theta1),
        variant="phi2",
    ))

    # HE from PVI fixed points, poles, zeros and one-points
    def he_corr(k, a):
        t0, t1, t2, ti, S, k1, k2 = _p6(k)
        return t0 * t2 * (a - 1) + t1 * t2 * a

    def he1_params(k, a):
        t0, t1, t2, ti, S, k1, k2 = _p6(k)
        return _he_params(1 - t0, 1 - t1, -t2, S + ti - 2, S - ti)

    E.append(CaseEntry(
        "HE/fixed_point", "he", "P6", "fixed_point", ("kappa+", "kappa-", "double"),
        he1_params, None,
        _tau(const=lambda k, a: k.kappas()[0] * (k.kappas()[1] + 1) * a - he_corr(k, a)),
    ))

    def case1_params(k, a):
        t0, t1, t2, ti, S, k1, k2 = _p6(k)
        return _he_params(1 - t0, 1 - t1, 1 - t2, S + ti - 4, S - ti)

    def case1_const(k, a):
        t0, t1, t2, ti, S, k1, k2 = _p6(k)
        return (k1 * (k2 + 2) * a
                - (k1 * k1 * (a - 1) + k1 * k2 * a + k1 * (a * t0 + (a - 1) * t1)) / ti
                - (1 - 1 / ti) * he_corr(k, a))

    def case1_closed(k, a, b):
        t0, t1, t2, ti, S, k1, k2 = _p6(k)
        lim = (ti * (1 - ti) * b
               - ti * (-t0 + (t2 - 1) * (a - 1) - 2 * a + 1 - (ti - 1) * a) / 2
               - k1 * k1 * (a - 1) - k1 * k2 * a - k1 * (a * t0 + (a - 1) * t1)
               + he_corr(k, a))
        return (1 - 1 / ti) * lim + case1_const(k, a)

    E.append(CaseEntry(
        "HE/pole/eps+", "he", "P6", "pole", ("eps+",),
        case1_params, case1_closed,
        _tau(factor=lambda k, a: 1 - 1 / k.thetainf, const=case1_const),
        note="requires theta_inf != 0",
    ))

    def case3_params(k, a):
        t0, t1, t2, ti, S, k1, k2 = _p6(k)
        return _he_params(1 - t0, 1 - t1, 1 - t2, S + ti - 2, S - ti - 2)

    def case3_closed(k, a, b):
        t0, t1, t2, ti, S, k1, k2 = _p6(k)
        s01 = t0 + t1
        return (-(1 - ti) ** 2 * b
                - (2 * s01 - s01**2 + t2**2 - (ti - 2) ** 2 + 4 * (ti - 1)) * a / 4
                - (t0 + t2) / 2 + ti - 1
                + ((t0 + t2) ** 2 - t1**2 + (ti - 2) ** 2) / 4)

    def case3_const(k, a):
        t0, t1, t2, ti, S, k1, k2 = _p6(k)
        return ((k1 + 1) * (k2 + 1) * a + (t0 + t1 + 2 * t2 - 4) * a / 2
                + 1 - (t0 + t2) / 2 - he_corr(k, a))

    E.append(CaseEntry(
        "HE/pole/eps-", "he", "P6", "pole", ("eps-",),
        case3_params, case3_closed,
        _tau(subtract=lambda k, a: a * (a - 1), const=case3_const),
    ))

    def case4_params(k, a):
        t0, t1, t2, ti, S, k1, k2 = _p6(k)
        return _he_params(1 - t0, 1 - t1, 1 - t2, S - 1, S - 3)

    def case4_closed(k, a, b):
        t0, t1, t2, ti, S, k1, k2 = _p6(k)
        return a * a * (a - 1) ** 2 / b + (k1 * (k2 + t2 + 3) + 3) * a + (k1 * (k2 + t1 + 1) - 1)

    def case4_const(k, a):
        t0, t1, t2, ti, S, k1, k2 = _p6(k)
        return k1 * (k2 + 2) * a - (t0 + t1 - 4) * a / 2 - (t0 + t2) / 2 - he_corr(k, a)

    E.append(CaseEntry(
        "HE/pole/double", "he", "P6", "pole", ("double",),
        case4_params, case4_closed,
        _tau(subtract=lambda k, a: a * (a - 1), const=case4_const),
    ))

    def t3(g, d, e, X, Y, const, note=""):
        def params(k, a):
            t0, t1, t2, ti, S, k1, k2 = _p6(k)
            return _he_params(g(k), d(k), e(k), X(k), Y(k))
        return params, _tau(const=const)

    def P(k):
        return _p6(k)

    zero_cases = [
        ("HE/zero/lambda+", "zero", "lambda+",
         lambda k: k.theta0, lambda k: 1 - k.theta1, lambda k: 1 - k.theta2,
         lambda k: k.theta0 - k.theta1 - k.theta2 + k.thetainf,
         lambda k: k.theta0 - k.theta1 - k.theta2 - k.thetainf + 2,
         lambda k, a: (k.theta0 * (k.theta2 - 1)
                       + (P(k)[5] * P(k)[6] + k.theta0 - k.theta0 * k.theta1
                          - k.theta1 * k.theta2 - 2 * k.theta0 * k.theta2) * a),
         "w = z^(-theta0) times the Lax component"),
        ("HE/zero/lambda-", "zero", "lambda-",
         lambda k: -k.theta0, lambda k: 1 - k.theta1, lambda k: 1 - k.theta2,
         lambda k: P(k)[4] - k.thetainf, lambda k: P(k)[4] + k.thetainf - 2,
         lambda k, a: (k.theta0 * k.theta2
                       + (P(k)[5] * P(k)[6] - k.theta0 * k.theta2 - k.theta1 * k.theta2) * a),
         ""),
        ("HE/zero/double", "zero", "double",
         lambda k: 0.0, lambda k: 1 - k.theta1, lambda k: 1 - k.theta2,
         lambda k: k.theta1 + k.theta2 - k.thetainf, lambda k: k.theta1 + k.theta2 + k.thetainf - 2,
         lambda k, a: (P(k)[5] * P(k)[6] - k.theta1 * k.theta2) * a,
         ""),
        ("HE/one_point/omega+", "one_point", "omega+",
         lambda k: 1 - k.theta0, lambda k: -k.theta1, lambda k: 1 - k.theta2,
         lambda k: P(k)[4] - k.thetainf, lambda k: P(k)[4] + k.thetainf - 2,
         lambda k, a: (P(k)[5] + k.theta0 * k.theta2
                       + (P(k)[5] * P(k)[6] - k.theta0 * k.theta2 - k.theta1 * k.theta2) * a),
         ""),
        ("HE/one_point/omega-", "one_point", "omega-",
         lambda k: 1 - k.theta0, lambda k: k.theta1, lambda k: 1 - k.theta2,
         lambda k: k.theta1 - k.theta0 - k.theta2 + k.thetainf,
         lambda k: k.theta1 - k.theta0 - k.theta2 - k.thetainf + 2,
         lambda k, a: (k.theta1 + k.theta0 * k.theta2 + P(k)[5]
                       + (P(k)[5] * P(k)[6] + k.theta1 - k.theta0 * k.theta1
                          - k.theta0 * k.theta2 - k.theta1 * k.theta2) * a),
         "w = (z-1)^(-theta1) times the Lax component"),
        ("HE/one_point/double", "one_point", "double",
         lambda k: 1 - k.theta0, lambda k: 0.0, lambda k: 1 - k.theta2,
         lambda k: k.theta0 + k.theta2 - k.thetainf, lambda k: k.theta0 + k.theta2 + k.thetainf - 2,
         lambda k, a: (P(k)[5] + k.theta0 * k.theta2
                       + (P(k)[5] * P(k)[6] - k.theta0 * k.theta2) * a),
         ""),
    ]
    for label, ev, br, g, d, e, X, Y, const, note in zero_cases:
        params, tau = t3(g, d, e, X, Y, const)
        E.append(CaseEntry(label, "he", "P6", ev, (br,), params, None, tau, note=note))
    return E


DICTIONARY: tuple[CaseEntry, ...] = tuple(_build())

EXPECTED_COUNTS = {"rthe": 1, "the": 2, "rbhe": 3, "dhe": 4, "bhe": 4, "che": 6, "he": 10}


def _check_totality() -> None:
    counts: dict[str, int] = {}
    seen = set()
    for e in DICTIONARY:
        counts[e.family] = counts.get(e.family, 0) + 1
        for br in e.branches:
            key = (e.painleve, e.event, br, e.variant)
            if key in seen:
                raise AssertionError(f"duplicate dictionary entry for {key}")
            seen.add(key)
    if counts != EXPECTED_COUNTS:
        raise AssertionError(f"accessory dictionary incomplete: {counts}")


_check_totality()


def lookup(kind: PainleveKind, event: str, branch: str, variant: str | None = None) -> CaseEntry:
    if kind.name == "P6" and event == "pole" and branch == "eps+" and abs(kind.thetainf) < 1e-12:
        raise UnsupportedCase("simple pole with eps+ and theta_inf = 0 needs a Schlesinger shift")
    matches = [e for e in DICTIONARY
               if e.painleve == kind.name and e.event == event and branch in e.branches]
    if not matches:
        raise UnsupportedCase(f"no Heun reduction for {kind.name} {event} {branch}")
    if len(matches) > 1:
        v = variant or matches[0].variant
        matches = [e for e in matches if e.variant == v]
        if not matches:
            raise UnsupportedCase(f"unknown variant {variant!r}")
    return matches[0]


# ---------------------------------------------------------------------------

@dataclass
class AccessoryPair:
    family: str
    case: str
    a: complex
    q: complex
    params: dict
    b: complex
    route: str
    err_est: float = 0.0
    q_closed: complex | None = None
    q_tau: complex | None = None
    painleve_a: complex = 0j
    note: str = ""
    invariants: object = field(default=None, repr=False)

    def spec(self) -> HeunSpec:
        return HeunSpec(self.family, dict(self.params), self.a, self.q)

    @property
    def route_gap(self) -> float | None:
        if self.q_closed is None or self.q_tau is None:
            return None
        return abs(self.q_closed - self.q_tau)

    def to_json(self) -> dict:
        d = {
            "a": cjson(self.a),
            "q": cjson(self.q),
            "p": {k: cjson(v) for k, v in self.params.items()},
            "family": self.family,
            "case": self.case,
            "b": cjson(self.b),
            "route": self.route,
            "err_est": self.err_est,
        }
        if self.q_closed is not None:
            d["q_closed"] = cjson(self.q_closed)
        if self.q_tau is not None:
            d["q_tau"] = cjson(self.q_tau)
        if self.note:
            d["note"] = self.note
        return d


_NONZERO_A = {"P3", "P4", "P6"}


def accessory_from_expansion(
    kind: PainleveKind,
    exp: LocalExpansion,
    trajectory: PainleveTrajectory | None = None,
    variant: str | None = None,
) -> AccessoryPair:
    """Heun equation attached to one classified Painleve event.

    ``trajectory`` is needed for cases whose q is known only as a limit of
    the tau function, and is used as a cross-check otherwise.
    """
    entry = lookup(kind, exp.event, exp.branch, variant)
    a, b = exp.a, exp.b
    needs_a = kind.name in _NONZERO_A and not (kind.name == "P4" and exp.event != "pole")
    if needs_a and abs(a) < 1e-14:
        raise InputError(f"{entry.label} needs a != 0")
    if kind.name == "P6" and abs(a - 1) < 1e-14:
        raise InputError(f"{entry.label} needs a != 1")
    params = entry.params(kind, a)
    q_closed = entry.closed(kind, a, b) if entry.closed is not None else None
    q_tau = None
    err = 0.0
    if trajectory is not None:
        t = entry.tau
        lim = regularized_limit(trajectory, exp, LimitRecipe(t.factor(kind, a), t.subtract(kind, a)))
        q_tau = lim.value + t.const(kind, a)
        err = lim.error
    elif q_closed is None:
        raise MissingTrajectory(f"{entry.label} gives q only as a tau limit; pass the trajectory")
    if q_closed is not None:
        q, route = q_closed, "closed"
        if q_tau is not None:
            err = max(err, abs(q_closed - q_tau))
    else:
        q, route = q_tau, "tau"
    return AccessoryPair(
        entry.family, entry.label, entry.heun_a(a), complex(q), params, b, route, float(err),
        None if q_closed is None else complex(q_closed),
        None if q_tau is None else complex(q_tau),
        painleve_a=a, note=entry.note,
    )


# ---------------------------------------------------------------------------
# parameter dictionaries

def heun_to_painleve_params(spec: HeunSpec) -> PainleveKind:
    """Painleve equation whose isomonodromy family carries the Heun equation."""
    p = spec.params
    fam = spec.family
    if fam == "rthe":
        return PainleveKind("P1")
    if fam == "the":
        return PainleveKind.make("P2", mu=(3 - p["p"]) / 2)
    if fam == "rbhe":
        return PainleveKind.make("P34", two_alpha=p["two_alpha"])
    if fam == "dhe":
        return PainleveKind.make("P3", theta0=p["gamma"] - 1, thetainf=4 * p["p"] - p["gamma"] + 1)
    if fam == "bhe":
        return PainleveKind.make("P4", theta0=(p["gamma"] - 1) / 2, thetainf=(p["p"] - p["gamma"] - 1) / 2)
    if fam == "che":
        return PainleveKind.make("P5", theta0=p["gamma"], theta1=p["delta"] - 1,
                                 thetainf=2 * p["p"] - p["gamma"] - p["delta"] + 1)
    return PainleveKind.make("P6", theta0=1 - p["gamma"], theta1=1 - p["delta"],
                             theta2=1 - p["epsilon"], thetainf=p["beta"] - p["alpha"])


def painleve_to_heun_params(kind: PainleveKind) -> tuple[str, dict]:
    """Inverse of :func:`heun_to_painleve_params` on the fixed parameters."""
    n = kind.name
    if n == "P1":
        return "rthe", {}
    if n == "P2":
        return "the", {"p": 3 - 2 * kind.mu}
    if n == "P34":
        return "rbhe", {"two_alpha": kind.two_alpha}
    if n == "P3":
        t0, ti = kind.params
        return "dhe", {"gamma": t0 + 1, "p": (ti + t0) / 4}
    if n == "P4":
        t0, ti = kind.params
        g = 2 * t0 + 1
        return "bhe", {"gamma": g, "p": 2 * ti + g + 1}
    if n == "P5":
        t0, t1, ti = kind.params
        return "che", {"gamma": t0, "delta": t1 + 1, "p": (ti + t0 + t1) / 2}
    t0, t1, t2, ti = kind.params
    s = 2 - t0 - t1 - t2
    return "he", {"alpha": (s - ti) / 2, "beta": (s + ti) / 2,
                  "gamma": 1 - t0, "delta": 1 - t1, "epsilon": 1 - t2}


# ---------------------------------------------------------------------------
# isomonodromy sets

def _same_equation(pair: AccessoryPair, spec: HeunSpec, tol: float) -> bool:
    if pair.family != spec.family:
        return False
    return all(abs(pair.params[k] - spec.params[k]) <= tol * max(1.0, abs(spec.params[k]))
               for k in spec.params)


def isomonodromy_set(
    spec: HeunSpec,
    source,
    n: int,
    *,
    kind: PainleveKind | None = None,
    interval: tuple[float, float] | None = None,
    variant: str | None = None,
    tol: float = 1e-6,
    check_first: bool = True,
) -> list[AccessoryPair]:
    """The first ``n`` accessory pairs sharing the monodromy of ``spec``.

    ``source`` is a trajectory, a list of trajectories, or initial data for
    the Painleve equation (then ``interval`` is scanned). Only events whose
    reduction reproduces the fixed parameters of ``spec`` are used. When
    ``check_first`` is set, the first pair must reproduce (a, q) of spec.
    """
    if n < 0:
        raise InputError("count must be non-negative")
    if n == 0:
        return []
    if kind is None:
        if isinstance(source, PainleveTrajectory):
            kind = source.kind
        elif isinstance(source, (list, tuple)) and source and isinstance(source[0], PainleveTrajectory):
            kind = source[0].kind
        else:
            kind = heun_to_painleve_params(spec)
    if isinstance(source, PainleveTrajectory):
        trajs = [source]
    elif isinstance(source, (list, tuple)) and source and isinstance(source[0], PainleveTrajectory):
        trajs = list(source)
    else:
        if interval is None:
            raise InputError("initial data needs an interval to scan")
        _, trajs = scan_trajectories(kind, InitialData.coerce(source), interval)
    events = []
    for t in trajs:
        for e in t.events:
            events.append((t, e))
    x0 = trajs[0].xs[0] if trajs and trajs[0].xs else 0
    events.sort(key=lambda te: abs(te[1].a - x0))
    out: list[AccessoryPair] = []
    for t, e in events:
        try:
            pair = accessory_from_expansion(kind, e, t, variant)
        except UnsupportedCase:
            continue
        if not _same_equation(pair, spec, tol):
            continue
        out.append(pair)
        if len(out) == n:
            break
    if check_first and out:
        first = out[0]
        scale = max(1.0, abs(spec.q))
        if abs(first.a - spec.a) > tol * max(1.0, abs(spec.a)) or abs(first.q - spec.q) > max(tol * scale, 10 * first.err_est):
            raise InputError(
                f"first event gives (a, q) = ({first.a:.8g}, {first.q:.8g}), not the spec's ({spec.a}, {spec.q})"
            )
    if len(out) < n:
        raise EventShortfall(f"found {len(out)} of {n} events", partial=out)
    return out


def attach_invariants(pairs: Sequence[AccessoryPair], **kw) -> None:
    """Compute the monodromy data of every pair (stored on ``invariants``)."""
    from .monodromy import compute_fuchsian_monodromy, compute_stokes

    for p in pairs:
        spec = p.spec()
        if spec.family == "he":
            p.invariants = compute_fuchsian_monodromy(spec, **kw)
        else:
            p.invariants = compute_stokes(spec, **kw)
