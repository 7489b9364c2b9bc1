"""Self-checks run by ``heuniso verify``.

Each check returns (name, passed, detail). The quick suite takes a few
seconds; the full suite adds the isomonodromy and Stokes-residual runs.
"""
from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .complex_core import IntegratorConfig, Path, gamma, integrate


def check_gamma():
    e1 = abs(gamma(1) - 1)
    e2 = abs(gamma(0.5) - math.sqrt(math.pi))
    e3 = abs(abs(gamma(1j)) ** 2 - math.pi / math.sinh(math.pi))
    return "gamma", e1 < 1e-12 and e2 < 1e-12 and e3 < 1e-10, f"{e1:.1e} {e2:.1e} {e3:.1e}"


def _rk4(f, x0, x1, y, h):
    n = int(round(abs(x1 - x0) / h))
    h = (x1 - x0) / n
    x = x0
    y = np.array(y, dtype=complex)
    for _ in range(n):
        k1 = f(x, y)
        k2 = f(x + h / 2, y + h / 2 * k1)
        k3 = f(x + h / 2, y + h / 2 * k2)
        k4 = f(x + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        x += h
    return y


def check_integrator():
    f = lambda x, s: np.array([s[1], 6 * s[0] ** 2 + x])
    ref = _rk4(f, 0.0, 0.5, [0.1, 0.2], 1e-4)
    res = integrate(f, Path.line(0, 0.5), np.array([0.1, 0.2], dtype=complex),
                    IntegratorConfig(rel_tol=1e-12, abs_tol=1e-14))
    err = float(np.max(np.abs(res.final - ref) / np.abs(ref)))
    return "integrator", err < 1e-8, f"{err:.1e}"


def check_pii_rational():
    from .accessory import accessory_from_expansion
    from .painleve import PainleveKind, integrate_painleve

    k = PainleveKind.make("P2", mu=1)
    tr = integrate_painleve(k, (1, -1, 1), Path.line(1, -1))
    e = tr.events[0]
    pair = accessory_from_expansion(k, e, tr)
    ok = abs(e.a) < 1e-9 and abs(e.b) < 1e-9 and abs(pair.params["p"] + 1) == 0 and abs(pair.q) < 1e-8
    return "pii-rational", ok, f"a={e.a:.1e} b={e.b:.1e} q={pair.q:.1e}"


def check_piv_rational():
    from .accessory import accessory_from_expansion
    from .painleve import PainleveKind, integrate_painleve

    k = PainleveKind.make("P4", theta0=0.5, thetainf=0.5)
    tr = integrate_painleve(k, (1, -2, -2), Path.line(1, -1))
    e = tr.events[0]
    pair = accessory_from_expansion(k, e, tr)
    ok = (e.event == "zero" and abs(e.datum + 2) < 1e-9 and pair.params["p"] == 4
          and pair.err_est < 1e-5 and abs(pair.q) < 1e-5)
    return "piv-rational", ok, f"{pair.case} p={pair.params['p'].real:g} q={pair.q:.1e} err={pair.err_est:.1e}"


def check_p1_routes():
    from .accessory import accessory_from_expansion
    from .painleve import PainleveKind, integrate_painleve

    k = PainleveKind("P1")
    tr = integrate_painleve(k, (0, 0, 0), Path.line(0, 7))
    gaps = [accessory_from_expansion(k, e, tr).route_gap for e in tr.events]
    return "p1-two-route", bool(gaps) and max(gaps) < 1e-4, " ".join(f"{g:.1e}" for g in gaps)


def check_he_cyclic():
    from .heun_family import HeunSpec
    from .monodromy import compute_fuchsian_monodromy

    s = HeunSpec("he", dict(alpha=0.3, beta=0.7, gamma=0.6, delta=0.55, epsilon=0.85), a=2.0 + 0.5j, q=0.3 - 0.2j)
    d = compute_fuchsian_monodromy(s)
    return "he-cyclic", d.residual < 1e-6, f"{d.residual:.1e}"


def check_p1_isoset():
    from .accessory import accessory_from_expansion, attach_invariants, isomonodromy_set
    from .monodromy import invariants_distance
    from .painleve import PainleveKind, integrate_painleve

    k = PainleveKind("P1")
    tr = integrate_painleve(k, (0, 0, 0), Path.line(0, 7))
    first = accessory_from_expansion(k, tr.events[0], tr)
    pairs = isomonodromy_set(first.spec(), tr, 2)
    attach_invariants(pairs)
    d = invariants_distance(pairs[0].invariants, pairs[1].invariants)
    return "p1-isoset", d < 1e-3, f"{d:.1e}"


def check_stokes_residuals():
    from .heun_family import HeunSpec
    from .monodromy import compute_stokes

    specs = [
        HeunSpec("rthe", {}, 0.5, -0.3),
        HeunSpec("the", {"p": 1.2}, 0.3, 0.2),
        HeunSpec("rbhe", {"two_alpha": 0.6}, -0.4, 0.1),
        HeunSpec("bhe", {"gamma": 1.3, "p": 0.7}, 0.4, -0.2),
        HeunSpec("dhe", {"gamma": 1.2, "p": 0.3}, 1.1, 0.25),
        HeunSpec("che", {"gamma": 0.7, "delta": 1.3, "p": 0.4}, 1.2, 0.3),
    ]
    worst = max(compute_stokes(s).residual for s in specs)
    return "stokes-residuals", worst < 1e-6, f"{worst:.1e}"


QUICK: list[Callable] = [check_gamma, check_integrator, check_pii_rational, check_piv_rational, check_p1_routes]
FULL: list[Callable] = QUICK + [check_he_cyclic, check_p1_isoset, check_stokes_residuals]


def run(suite: str = "quick"):
    checks = {"quick": QUICK, "full": FULL}[suite]
    out = []
    for c in checks:
        try:
            out.append(c())
        except Exception as e:  # a crashing check is a failed check
            out.append((c.__name__.removeprefix("check_").replace("_", "-"), False, f"{type(e).__name__}: {e}"))
    return out
