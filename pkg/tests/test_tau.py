import numpy as np
import pytest

from heuniso.complex_core import Path
from heuniso.errors import DivisionByZeroState, ExtrapolationDiverges, InputError, IntervalContainsPole
from heuniso.painleve import PainleveKind, integrate_painleve
from heuniso.tau import (
    LimitRecipe,
    extrapolate,
    p3_form_gap,
    regularized_limit,
    sigma_form_residual,
    sigma_form_residual_P1,
    tau_logderiv,
    tau_logderiv_p3_y_only,
    tau_sample_at,
)

P1 = PainleveKind("P1")
P2_1 = PainleveKind.make("P2", mu=1)


def test_p1_logderiv_arithmetic():
    assert tau_logderiv(P1, 0, 1, 2) == 0


def test_p2_logderiv_arithmetic():
    # the Hamiltonian evaluated at v = 1
    assert tau_logderiv(P2_1, 1, -1, 1) == pytest.approx(2.5)


@pytest.mark.parametrize("x", [0.5, 1.0, 2.0 + 1j])
def test_p2_logderiv_on_rational_solution(x):
    # y = -1/x has v = y' - y^2 - x/2 = -x/2, H = -x^2/8, tau = exp(-x^3/24)
    y = -1 / x
    v = -x / 2
    assert tau_logderiv(P2_1, x, y, v) == pytest.approx(-x * x / 8, abs=1e-14)


def test_p2_integrated_hamiltonian_matches_rational_tau():
    tr = integrate_painleve(P2_1, (1, -1, 1), Path.line(1, 2))
    x, s = tr.xs[-1], tr.states[-1]
    assert abs(s[1] + x / 2) < 1e-10
    assert abs(tau_sample_at(tr, len(tr.xs) - 1).dlogtau + x * x / 8) < 1e-10


def test_fixed_singularity_multiplier_is_rejected():
    k = PainleveKind.make("P5", theta0=0.3, theta1=0.45, thetainf=0.7)
    with pytest.raises(DivisionByZeroState):
        tau_logderiv(k, 0, 0.5, 0.1)


def test_p3_two_forms_agree_along_trajectory():
    k = PainleveKind.make("P3", theta0=0.3, thetainf=0.6)
    tr = integrate_painleve(k, (1, 0.5, 0.1), Path.line(1, 2.5))
    assert p3_form_gap(tr) < 1e-8
    with pytest.raises(InputError):
        tau_logderiv_p3_y_only(P1, 1, 1, 1)
    with pytest.raises(DivisionByZeroState):
        tau_logderiv_p3_y_only(k, 1, 0, 1)


def test_sigma_form_on_pole_free_interval(p1_traj):
    a1, a2 = (e.a.real for e in p1_traj.events[:2])
    assert sigma_form_residual_P1(p1_traj, a1 + 0.6, a2 - 0.6) < 1e-8


def test_sigma_form_refuses_interval_with_pole(p1_traj):
    with pytest.raises(IntervalContainsPole):
        sigma_form_residual_P1(p1_traj, 1.0, 4.0)
    with pytest.raises(InputError):
        sigma_form_residual_P1(integrate_painleve(P2_1, (1, -1, 1), Path.line(1, 2)))


@pytest.mark.parametrize("c", [0.0, 0.3, -2.0 + 1j])
def test_sigma_form_constant_input(c):
    r = sigma_form_residual([0.1, 0.7], [c, c], [0, 0], [0, 0])
    assert np.allclose(np.abs(r), 2 * abs(c))


def test_sigma_form_residual_grows_with_perturbation(p1_traj):
    xs = np.array(p1_traj.xs)
    st = np.array(p1_traj.states)
    m = (xs.real > 3.2) & (xs.real < 5.2)
    base = np.abs(sigma_form_residual(xs[m], st[m, 2], st[m, 0], st[m, 1])).max()
    out = []
    for eps in (1e-6, 1e-5, 1e-4):
        r = np.abs(sigma_form_residual(xs[m], st[m, 2], st[m, 0], st[m, 1] + eps)).max()
        out.append(r)
        assert r > 100 * base
    assert out[1] / out[0] == pytest.approx(10, rel=0.05)
    assert out[2] / out[1] == pytest.approx(10, rel=0.05)


def test_extrapolate_polynomial_exact():
    hs = [0.1, 0.05, 0.025, 0.0125]
    val, err = extrapolate(hs, [3 + 2 * h - h**2 for h in hs])
    assert abs(val - 3) < 1e-13 and err < 1e-12


def test_extrapolate_detects_unsubtracted_pole():
    hs = [0.1, 0.05, 0.025, 0.0125]
    with pytest.raises(ExtrapolationDiverges):
        extrapolate(hs, [1 + 0.5 / h for h in hs])
    with pytest.raises(InputError):
        extrapolate(hs[:3], [1, 2, 3])


def test_p1_tau_limit_matches_laurent_coefficient(p1_traj):
    for e in p1_traj.events:
        res = regularized_limit(p1_traj, e, LimitRecipe(factor=2, subtract=2))
        assert abs(res.value + 28 * e.b) < 1e-4
        assert res.error < 1e-4
        assert set(res.sides) == {"entry", "exit"}
        assert len(res.samples) == 8


def test_wrong_subtraction_constant_is_detected(p1_traj):
    with pytest.raises(ExtrapolationDiverges):
        regularized_limit(p1_traj, p1_traj.events[0], LimitRecipe(factor=2, subtract=1))


def test_limit_needs_trajectory_event(p1_traj):
    from dataclasses import replace

    e = replace(p1_traj.events[0], crossing=None)
    with pytest.raises(InputError):
        regularized_limit(p1_traj, e)
