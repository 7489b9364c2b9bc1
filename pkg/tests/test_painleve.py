import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import P1_POLES
from heuniso.complex_core import Path
from heuniso.errors import FixedSingularityHit, InputError
from heuniso.painleve import (
    PainleveKind,
    branches,
    fit_local_expansion,
    integrate_painleve,
    local_series,
    ode_relative_residual,
    pole_field_scan,
    second_derivative,
    second_derivative_chain,
    seed_from_series,
    states_near,
    v_from_yprime,
    yprime,
)
from heuniso.tau import extrapolate

P2_1 = PainleveKind.make("P2", mu=1)
P4_HALF = PainleveKind.make("P4", theta0=0.5, thetainf=0.5)
P5 = PainleveKind.make("P5", theta0=0.3, theta1=0.45, thetainf=0.7)
P6 = PainleveKind.make("P6", theta0=0.3, theta1=0.45, theta2=0.2, thetainf=0.7)

KINDS = [
    PainleveKind("P1"),
    PainleveKind.make("P2", mu=0.3),
    PainleveKind.make("P34", two_alpha=0.7),
    PainleveKind.make("P3", theta0=0.3, thetainf=0.6),
    PainleveKind.make("P4", theta0=0.35, thetainf=0.2),
    P5,
    P6,
]


def test_pii_rational_pole():
    tr = integrate_painleve(P2_1, (1, -1, 1), Path.line(1, -1))
    (e,) = tr.events
    assert e.event == "pole" and e.branch == "eps-" and e.datum == -1
    assert abs(e.a) < 1e-9 and abs(e.b) < 1e-9 and e.residual < 1e-9


def test_pii_rational_state_away_from_pole():
    # y = -1/x solves y'' = 2y^3 + xy + 1
    tr = integrate_painleve(P2_1, (1, -1, 1), Path.line(1, -1))
    assert abs(tr.final_x + 1) < 1e-12 and abs(tr.final_state[0] - 1) < 1e-8


def test_piv_rational_zero():
    tr = integrate_painleve(P4_HALF, (1, -2, -2), Path.line(1, -1))
    (e,) = tr.events
    assert e.event == "zero" and e.datum == pytest.approx(-4 * 0.5)
    assert abs(e.a) < 1e-9


def test_p1_poles_against_oracle(p1_traj):
    assert len(p1_traj.events) >= 2
    for e, (a, b) in zip(p1_traj.events, P1_POLES):
        assert e.residual < 1e-6
        assert abs(e.a - a) < 1e-9
        assert abs(e.b - b) < 1e-6


def test_fit_recovers_own_model():
    k = PainleveKind("P1")
    ser = local_series(k, branches(k, "pole")[0], 2, 0.3)
    xs = 2 + np.r_[np.linspace(-0.2, -0.05, 8), np.linspace(0.05, 0.2, 8)]
    e = fit_local_expansion(k, xs, [ser(x - 2) for x in xs], "pole")
    assert abs(e.a - 2) < 1e-10 and abs(e.b - 0.3) < 1e-10


def test_fit_exact_rational_samples():
    xs = np.r_[np.linspace(-0.2, -0.05, 8), np.linspace(0.05, 0.2, 8)]
    e = fit_local_expansion(P2_1, xs, -1 / xs, "pole")
    assert abs(e.a) < 1e-12 and e.datum == -1 and abs(e.b) < 1e-12


def test_fit_needs_samples():
    with pytest.raises(InputError):
        fit_local_expansion(P2_1, [0.1, 0.2], [1, 2], "pole")


def test_scan_rational_single_pole_and_empty_interval():
    poles = pole_field_scan(P2_1, (1, -1, 1), (-3, 3))
    assert len(poles) == 1 and abs(poles[0].a) < 1e-9
    assert pole_field_scan(P2_1, (1, -1, 1), (1, 1)) == []


def test_scan_refuses_fixed_singularity():
    k = PainleveKind.make("P3", theta0=0.3, thetainf=0.6)
    with pytest.raises(FixedSingularityHit):
        pole_field_scan(k, (1, 0.5, 0.1), (-1, 2))


@pytest.mark.parametrize("kind", KINDS, ids=lambda k: k.name)
@given(x=st.complex_numbers(min_magnitude=0.3, max_magnitude=2), y=st.complex_numbers(min_magnitude=0.2, max_magnitude=2),
       v=st.complex_numbers(max_magnitude=2))
def test_hamiltonian_flow_matches_second_order_equation(kind, x, y, v):
    if any(abs(x - f) < 0.2 for f in kind.fixed_points) or any(abs(y - c) < 0.2 for c in (0, 1, x)):
        return
    yp = yprime(kind, x, y, v)
    assert abs(v_from_yprime(kind, x, y, yp) - v) < 1e-9 * max(1, abs(v))
    ypp = second_derivative_chain(kind, x, y, v)
    assert abs(ypp - second_derivative(kind, x, y, yp)) < 1e-8 * max(1, abs(ypp))
    # rational right-hand sides cancel to ~1e-10 in double precision
    assert ode_relative_residual(kind, x, y, yp, ypp) < 1e-8


# Behaviour of v at PV events (Table 1), theta = (0.3, 0.45, 0.7)
PV_V_LIMITS = {
    ("pole", "eps+"): 0.0,
    ("pole", "eps-"): -0.5 * (0.3 - 0.45 + 0.7),
    ("zero", "delta+"): -0.3,
    ("zero", "delta-"): -0.5 * (0.3 + 0.45 + 0.7),
}


def _v_at(kind, ev, label, a, h):
    br = next(b for b in branches(kind, ev) if b.label == label)
    ser = local_series(kind, br, a, 0.15 - 0.1j)
    shift = 1.0 if ev == "one_point" else 0.0
    return v_from_yprime(kind, a + h, ser(h) + shift, ser.deriv()(h))


@pytest.mark.parametrize("ev,label", list(PV_V_LIMITS))
def test_pv_v_limits_from_series(ev, label):
    a = 1.3 + 0.2j
    assert abs(_v_at(P5, ev, label, a, 1e-7) - PV_V_LIMITS[ev, label]) < 1e-5


def test_pv_double_pole_and_zero_v_limits():
    # double pole needs theta0 - theta1 + theta_inf = 0, double zero theta0 - theta1 - theta_inf = 0
    k = PainleveKind.make("P5", theta0=0.3, theta1=1.0, thetainf=0.7)
    assert abs(_v_at(k, "pole", "double", 1.3, 1e-7)) < 1e-5
    k = PainleveKind.make("P5", theta0=0.3, theta1=-0.4, thetainf=0.7)
    assert abs(_v_at(k, "zero", "double", 1.3, 1e-7) + 0.5 * (0.3 - 0.4 + 0.7)) < 1e-5


def test_pv_one_point_minus_v_blows_up_like_a_over_h2():
    a = 1.3 + 0.2j
    for h in (1e-3, 1e-4):
        assert abs(_v_at(P5, "one_point", "omega-", a, h) * h * h - a) < 10 * h


@pytest.mark.parametrize("label", ["eps+", "eps-", "delta+", "delta-"])
def test_pv_integrated_v_matches_table(label):
    ev = "pole" if label.startswith("eps") else "zero"
    a = 1.3 + 0.2j
    br = next(b for b in branches(P5, ev) if b.label == label)
    init = seed_from_series(P5, br, a, 0.15 - 0.1j, -0.12)
    tr = integrate_painleve(P5, init, Path.line(a - 0.12, a + 0.12))
    e = next(x for x in tr.events if x.event == ev)
    assert e.branch == label
    hs = [0.02, 0.01, 0.005, 0.0025]
    _, ss = states_near(tr, e, hs)
    lim, err = extrapolate(hs, [s[1] for s in ss])
    assert abs(lim - PV_V_LIMITS[ev, label]) < 1e-4


def test_pv_leading_coefficients():
    a = 1.3 + 0.2j
    t0, t1, ti = 0.3, 0.45, 0.7
    lead = {b.label: b.lead(a, 0.0) for ev in ("pole", "zero", "one_point") for b in branches(P5, ev)}
    assert lead["eps+"] == pytest.approx(2 * a / (t0 - t1 + ti))
    assert lead["delta-"] == pytest.approx(-(t0 - t1 - ti) / (2 * a))
    assert lead["omega+"] == 1 and lead["omega-"] == -1


@pytest.mark.parametrize("label,omega", [("omega+", 1), ("omega-", -1)])
def test_pv_one_point_second_coefficient(label, omega):
    a = 1.3 + 0.2j
    br = next(b for b in branches(P5, "one_point") if b.label == label)
    ser = local_series(P5, br, a, 0.15)
    assert ser.coef(2) == pytest.approx(0.5 + (omega - 1 + 0.3 + 0.45) / (2 * a))


def test_pvi_leading_coefficients():
    a = 0.6 + 0.25j
    lead = {b.label: b.lead(a, 0.0) for ev in ("zero", "one_point") for b in branches(P6, ev)}
    assert lead["lambda+"] == pytest.approx(0.3 / (a - 1))
    assert lead["lambda-"] == pytest.approx(-0.3 / (a - 1))
    assert lead["omega+"] == pytest.approx(0.45 / a)
    assert lead["omega-"] == pytest.approx(-0.45 / a)


def test_trajectory_csv_and_events_json(p1_traj):
    text = p1_traj.to_csv()
    head, first = text.splitlines()[:2]
    assert head.startswith("x_re,x_im") and "np." not in first
    assert p1_traj.events_json().startswith("[")


def test_auxiliary_relation_at_samples():
    k = PainleveKind.make("P2", mu=0.3)
    tr = integrate_painleve(k, (0, 0.2, 0.1), Path.line(0, 1.5))
    for x, s in zip(tr.xs[::10], tr.states[::10]):
        yp = yprime(k, x, s[0], s[1])
        assert yp == pytest.approx(s[0] ** 2 + s[1] + x / 2, abs=1e-12)
