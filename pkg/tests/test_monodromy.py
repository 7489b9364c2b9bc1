import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heuniso.errors import FamilyMismatch, IncompleteData, InputError
from heuniso.heun_family import HeunSpec
from heuniso.monodromy import (
    MatchPlan,
    MonodromyData,
    che_connection_parameterization,
    compute_fuchsian_monodromy,
    compute_stokes,
    cyclic_residual,
    he_traces,
    invariants_distance,
    lasso,
    local_monodromy,
    sigma_from_stokes,
)


def rthe_solution(s0, s1):
    # two free multipliers; the other three follow from s_k = i(1 + s_{k+2} s_{k+3})
    s3 = 1j * (1 + s0 * s1)
    s2 = (s0 / 1j - 1) / s3
    sm1 = 1j * (1 + s1 * s2)
    return MonodromyData("rthe", {}, stokes=[("-1", sm1), ("0", s0), ("1", s1), ("2", s2), ("3", s3)])


def test_synthetic_rthe_multipliers_have_zero_residual():
    assert cyclic_residual(rthe_solution(0.3 + 0.2j, -0.7 + 0.1j)) < 1e-13


def test_perturbed_multiplier_residual_is_lipschitz():
    d = rthe_solution(0.3 + 0.2j, -0.7 + 0.1j)
    st_ = dict(d.stokes)
    st_["1"] += 1e-4
    r = cyclic_residual(MonodromyData("rthe", {}, stokes=list(st_.items())))
    assert 1e-5 <= r <= 1e-3


def test_missing_multipliers_reported():
    with pytest.raises(IncompleteData):
        cyclic_residual(MonodromyData("rthe", {}, stokes=[("0", 1j)]))


@pytest.fixture(scope="module")
def rthe00():
    return compute_stokes(HeunSpec("rthe", {}, 0, 0))


def test_rthe_origin_five_multipliers(rthe00):
    assert len(rthe00.stokes) == 5
    assert rthe00.residual < 1e-6
    assert rthe00.diagnostics["abel"] < 1e-8


def test_rthe_doubled_radius_agrees(rthe00):
    R = rthe00.diagnostics["R_inf"]
    d2 = compute_stokes(HeunSpec("rthe", {}, 0, 0), MatchPlan(seed_radius=2 * R))
    assert invariants_distance(rthe00, d2) < 1e-8


def test_bhe_residual_end_to_end():
    d = compute_stokes(HeunSpec("bhe", {"gamma": 1.3, "p": 0.7}, 0.4, -0.2))
    assert d.residual < 1e-6 and len(d.stokes) == 4


def test_distance_zero_to_itself_and_sensitive_to_q(rthe00):
    assert invariants_distance(rthe00, rthe00) == 0
    other = compute_stokes(HeunSpec("rthe", {}, 0, 0.1))
    assert invariants_distance(rthe00, other) > 1e-3


def test_distance_refuses_mixed_families(rthe00):
    d = compute_stokes(HeunSpec("rbhe", {"two_alpha": 0.6}, -0.4, 0.1))
    with pytest.raises(FamilyMismatch):
        invariants_distance(rthe00, d)


def test_json_roundtrip_is_exact(rthe00):
    back = MonodromyData.from_json(rthe00.to_json())
    assert back.stokes == rthe00.stokes and back.residual == rthe00.residual


def test_stokes_rejects_fuchsian_family():
    s = HeunSpec("he", dict(alpha=0.3, beta=0.7, gamma=0.6, delta=0.55, epsilon=0.85), a=2, q=0)
    with pytest.raises(InputError):
        compute_stokes(s)


HE = HeunSpec("he", dict(alpha=0.3, beta=0.7, gamma=0.6, delta=0.55, epsilon=0.85), a=2 + 0.5j, q=0.3 - 0.2j)


def test_loop_around_no_singularity_is_identity():
    b = 2j
    d = compute_fuchsian_monodromy(HE, b, loops={"empty": lasso(b, -3 + 3j, 0.5)})
    assert np.max(np.abs(d.monodromy["empty"] - np.eye(2))) < 1e-10


def test_hypergeometric_reduction_trace():
    # epsilon = 0 and q = alpha beta a: the point a is regular and the
    # equation is Gauss's, whose rigidity fixes Tr M0 M1 = -2 cos pi(beta - alpha)
    al, be, ga, de, a = 0.3, 0.55, 0.6, 1.25, 2 + 0.5j
    s = HeunSpec("he", dict(alpha=al, beta=be, gamma=ga, delta=de, epsilon=0), a=a, q=al * be * a)
    d = compute_fuchsian_monodromy(s)
    tr = dict(d.traces)
    assert abs(tr["Tr M0M1"] + 2 * math.cos(math.pi * (be - al))) < 1e-9
    assert np.max(np.abs(d.monodromy["2"] + np.eye(2))) < 1e-9
    off = compute_fuchsian_monodromy(s.replace(q=s.q + 0.3))
    assert abs(dict(off.traces)["Tr M0M1"] - tr["Tr M0M1"]) > 1e-2


def random_he(rng):
    while True:
        al, be, ga, de = rng.uniform(0.1, 0.9, 4)
        ep = al + be + 1 - ga - de
        th = [1 - ga, 1 - de, 1 - ep, be - al]
        if all(abs(t - round(t)) > 0.05 for t in th):
            break
    a = complex(rng.uniform(1.5, 3), rng.uniform(-1, 1))
    q = complex(*rng.uniform(-1, 1, 2))
    return HeunSpec("he", dict(alpha=al, beta=be, gamma=ga, delta=de, epsilon=ep), a=a, q=q)


@settings(max_examples=3)
@given(st.integers(0, 2**31))
def test_he_cyclic_and_gauge_stability(seed):
    rng = np.random.default_rng(seed)
    d = compute_fuchsian_monodromy(random_he(rng))
    assert d.residual < 1e-6
    assert d.diagnostics["abel"] < 1e-8
    G = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    Gi = np.linalg.inv(G)
    moved = MonodromyData("he", d.thetas, monodromy={k: Gi @ m @ G for k, m in d.monodromy.items()})
    he_traces(moved)
    scale = max(1.0, max(abs(v) for _, v in d.traces))
    assert invariants_distance(d, moved) < 1e-10 * scale


@given(
    st.complex_numbers(min_magnitude=0.05, max_magnitude=0.9),
    st.complex_numbers(min_magnitude=0.3, max_magnitude=3),
    st.floats(0.05, 0.45), st.floats(0.05, 0.45), st.floats(0.05, 0.45),
)
def test_che_parameterization_local_and_product_traces(sig, s, t0, t1, ti):
    try:
        E0, E1 = che_connection_parameterization(sig, s, t0, t1, ti)
    except InputError:
        return
    if abs(np.linalg.det(E0)) < 1e-6 or abs(np.linalg.det(E1)) < 1e-6:
        return
    M0, M1 = local_monodromy(E0, t0), local_monodromy(E1, t1)
    assert abs(np.trace(M0) - 2 * math.cos(math.pi * t0)) < 1e-8
    assert abs(np.trace(M1) - 2 * math.cos(math.pi * t1)) < 1e-8
    assert abs(np.trace(M1 @ M0) - 2 * cmath.cos(math.pi * sig)) < 1e-7 * max(1, np.linalg.cond(E0) * np.linalg.cond(E1))


@given(st.floats(0.05, 0.95), st.floats(-0.8, 0.8), st.floats(0.05, 0.9), st.complex_numbers(min_magnitude=0.2, max_magnitude=3))
def test_sigma_from_stokes_inverts_trace_relation(sr, si, ti, s1):
    sig = complex(sr, si)
    prod = (2 * cmath.cos(math.pi * sig) - 2 * cmath.cos(math.pi * ti)) * cmath.exp(-1j * math.pi * ti)
    got = sigma_from_stokes(s1, prod / s1, ti)
    assert abs(cmath.cos(math.pi * got) - cmath.cos(math.pi * sig)) < 1e-10
    assert 0 <= got.real <= 1
