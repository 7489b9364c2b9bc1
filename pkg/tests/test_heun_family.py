import cmath

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from heuniso.errors import InputError, ResonantExponents, UnknownSingularity
from heuniso.heun_family import (
    FAMILIES,
    HeunSpec,
    IrregularExponents,
    asymptotic_seed,
    characteristic_exponents,
    first_order_system,
    frobenius_seed,
    ode_residual,
    sector_table,
    singularities,
)

HE = HeunSpec("he", dict(alpha=0.3, beta=0.7, gamma=0.6, delta=0.55, epsilon=0.85), a=2 + 0.5j, q=0.3 - 0.2j)

SAMPLES = [
    HeunSpec("rthe", {}, 0.5, -0.3),
    HeunSpec("the", {"p": 1.2}, 0.3, 0.2),
    HeunSpec("rbhe", {"two_alpha": 0.6}, -0.4, 0.1),
    HeunSpec("bhe", {"gamma": 1.3, "p": 0.7}, 0.4, -0.2),
    HeunSpec("dhe", {"gamma": 1.2, "p": 0.3}, 1.1, 0.25),
    HeunSpec("che", {"gamma": 0.7, "delta": 1.3, "p": 0.4}, 1.2, 0.3),
]


def test_fuchs_relation_enforced():
    with pytest.raises(InputError):
        HeunSpec("he", dict(alpha=0.3, beta=0.7, gamma=0.6, delta=0.55, epsilon=0.5), a=2, q=0)


def test_unknown_family_and_missing_parameter():
    with pytest.raises(InputError):
        HeunSpec("nope", {}, 0, 0)
    with pytest.raises(InputError):
        HeunSpec("the", {}, 0, 0)


def test_json_roundtrip():
    for s in SAMPLES + [HE]:
        assert HeunSpec.from_json(s.to_json()) == s


def test_he_exponents_at_zero():
    e = characteristic_exponents(HE, 0)
    assert sorted(e, key=abs) == pytest.approx([0, 1 - 0.6])


def test_rbhe_exponents_at_zero():
    s = HeunSpec("rbhe", {"two_alpha": 0.6}, 0.2, 0.1)
    e = characteristic_exponents(s, 0)
    assert sorted(e, key=abs) == pytest.approx([0, 1 - 0.6])


def test_he_exponents_at_infinity_are_alpha_beta():
    assert characteristic_exponents(HE, "inf") == pytest.approx((0.3, 0.7))


def test_the_phase_at_infinity():
    s = HeunSpec("the", {"p": 1.2}, 0.3, 0.2)
    e = characteristic_exponents(s, "inf")
    assert isinstance(e, IrregularExponents) and e.rank == 3
    assert e.phases[0] == {}
    assert e.phases[1][3.0] == pytest.approx(-2 / 3) and e.phases[1][1.0] == pytest.approx(-0.3)
    mu = (3 - 1.2) / 2
    # relative algebraic twist between the two columns is z^(2 mu - 1)
    assert e.prefactors[0] - e.prefactors[1] == pytest.approx(2 * mu - 1)


def test_rthe_phase_and_prefactor():
    e = characteristic_exponents(HeunSpec("rthe", {}, 0.3, 0.2), "inf")
    assert e.rank == 2.5
    assert e.phases[0][2.5] == pytest.approx(0.8) and e.phases[0][0.5] == pytest.approx(0.3)
    assert e.phases[1][2.5] == pytest.approx(-0.8)
    assert e.prefactors == pytest.approx((-0.75, -0.75))


def test_ranks_at_infinity():
    want = {"rthe": 2.5, "rbhe": 1.5, "the": 3.0, "bhe": 2.0, "dhe": 1.0, "che": 1.0}
    for s in SAMPLES:
        info = {str(i.location): i for i in singularities(s)}
        assert info["inf"].rank == want[s.family]
    dhe = {str(i.location): i for i in singularities(SAMPLES[4])}
    assert dhe["0j"].rank == 1.0 and dhe["0j"].kind == "irregular"


def test_not_a_singular_point():
    with pytest.raises(UnknownSingularity):
        characteristic_exponents(HE, 0.5)


def test_companion_forms():
    A = first_order_system(HeunSpec("rthe", {}, 0.5, 0.7))(1.5)
    assert np.allclose(A, [[0, 1], [4 * 1.5**3 + 2 * 0.5 * 1.5 + 0.7, 0]])
    A = first_order_system(HeunSpec("the", {"p": 0}, 0, 0))(1)
    assert np.allclose(A, [[0, 1], [0, -2]])


def heun_recurrence(al, be, ga, de, ep, a, q, n_terms):
    # three-term recurrence of the local Heun series at 0 (exponent 0)
    c = [1.0 + 0j, q / (a * ga)]
    for n in range(1, n_terms - 1):
        R = a * (n + 1) * (n + ga)
        Q = n * ((n - 1 + ga) * (1 + a) + a * de + ep)
        P = (n - 1 + al) * (n - 1 + be)
        c.append(((Q + q) * c[n] - P * c[n - 1]) / R)
    return np.array(c)


def test_frobenius_he_matches_recurrence():
    fs = frobenius_seed(HE, 0, 0, 14)
    ref = heun_recurrence(0.3, 0.7, 0.6, 0.55, 0.85, HE.a, HE.q, 14)
    assert np.max(np.abs(fs.coeffs - ref)) < 1e-14


def _series_residual(fs, z):
    w, dw = fs.value(z)
    n = np.arange(fs.order)
    d2 = complex(np.polynomial.polynomial.polyval(z, fs.coeffs[2:] * n[2:] * n[1:-1]))
    return abs(ode_residual(HE, z, w, dw, d2))


def test_frobenius_he_residual():
    # eight terms leave a truncation residual near 2e-8 at |z| = 0.05; twelve reach 1e-10
    fs = frobenius_seed(HE, 0, 0, 12)
    for ang in np.linspace(0, 2 * np.pi, 7)[:-1]:
        assert _series_residual(fs, 0.05 * cmath.exp(1j * ang)) < 1e-10
    r = [_series_residual(frobenius_seed(HE, 0, 0, n), 0.05) for n in (6, 8, 10)]
    assert r[0] > r[1] > r[2]


def test_frobenius_che_at_a_and_nonzero_exponent():
    s = SAMPLES[5]
    fs = frobenius_seed(s, s.a, 0, 10)
    assert fs.coeffs[0] == 1 and fs.exponent == 0
    fs1 = frobenius_seed(s, 0, 1, 1)
    assert fs1.order == 1
    z = 0.01 + 0.02j
    w, _ = fs1.value(z)
    assert abs(w - z ** fs1.exponent) < 1e-14


def test_resonant_exponents_rejected():
    s = HeunSpec("he", dict(alpha=0.3, beta=0.7, gamma=-1.0, delta=1.0, epsilon=2.0), a=2, q=0.1)
    with pytest.raises(ResonantExponents):
        frobenius_seed(s, 0, 0, 8)


@pytest.mark.parametrize("spec", SAMPLES, ids=lambda s: s.family)
def test_formal_seed_solves_the_equation(spec):
    # derivative of the seeded fundamental matrix against A(z) Y at the seeding radius
    tab = sector_table(spec)
    k = tab.indices[0]
    seed = asymptotic_seed(spec, k)
    lo, hi = seed.bounds
    th = 0.5 * (lo + hi)
    z = seed.radius * cmath.exp(1j * th)
    # radial five-point stencil keeps arg z fixed
    eps = 1e-6
    Y = seed.matrix(z, th)
    M = lambda t: seed.matrix(z * (1 + t * eps), th)
    dY = (-M(2) + 8 * M(1) - 8 * M(-1) + M(-2)) / (12 * eps * z)
    A = first_order_system(spec)(z)
    rel = np.max(np.abs(dY - A @ Y)) / np.max(np.abs(A @ Y))
    assert rel < 1e-6


def test_sector_orientation_alternates_for_rthe():
    tab = sector_table(HeunSpec("rthe", {}, 0, 0))
    orients = [tab.orientation(k) for k in tab.indices[:-1]]
    assert all(a != b for a, b in zip(orients, orients[1:]))


@given(st.sampled_from(FAMILIES))
def test_every_family_has_singularities(fam):
    params = {
        "he": dict(alpha=0.3, beta=0.7, gamma=0.6, delta=0.55, epsilon=0.85),
        "che": {"gamma": 0.7, "delta": 1.3, "p": 0.4},
        "dhe": {"gamma": 1.2, "p": 0.3},
        "bhe": {"gamma": 1.3, "p": 0.7},
        "the": {"p": 1.2},
        "rthe": {},
        "rbhe": {"two_alpha": 0.6},
    }[fam]
    s = HeunSpec(fam, params, 2.0, 0.1)
    assert any(str(i.location) == "inf" for i in singularities(s))
