import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dlimit import (
    BOUNDED,
    INFINITY,
    EscapeSpec,
    PerturbedPower,
    PowerPoly,
    RealPower,
    apply_map,
    classify,
    critical_data,
    critical_values,
    escape_radius,
    iterate_orbit,
    principal_power,
)


def oracle_power(z: complex, t: float) -> complex:
    # cmath.log puts -0.0 imaginary parts on the lower branch; normalize first
    z = complex(z.real, z.imag + 0.0)
    return cmath.exp(t * cmath.log(z))


# -- constructors -------------------------------------------------------------


@pytest.mark.parametrize("bad", [1, 0, -3, 2.5])
def test_power_poly_rejects_bad_degree(bad):
    with pytest.raises(ValueError):
        PowerPoly(bad, 0)


@pytest.mark.parametrize("t", [1.0, 0.5, -2.0, math.inf, math.nan])
def test_real_power_rejects_bad_exponent(t):
    with pytest.raises(ValueError):
        RealPower(t, 0)


def test_perturbed_rejects_zero_a():
    with pytest.raises(ValueError):
        PerturbedPower(3, 0, 0)


# -- principal_power ----------------------------------------------------------


@pytest.mark.parametrize(
    "z,t,expected",
    [(1, 7.3, 1), (-1, 2.5, 1j), (2j, 2, -4)],
)
def test_principal_power_examples(z, t, expected):
    assert abs(principal_power(z, t) - expected) < 1e-14


def test_principal_power_zero():
    assert principal_power(0, 3.1) == 0
    with pytest.raises(ValueError):
        principal_power(0, 0)
    with pytest.raises(ValueError):
        principal_power(0, -1.5)


def test_negative_axis_uses_upper_branch():
    # Arg(-4 - 0j) is pi, not -pi
    assert abs(principal_power(complex(-4, -0.0), 0.5) - 2j) < 1e-15


def test_just_below_negative_axis_stays_below():
    # atan2 rounds to -pi here, yet the point is in the lower half-plane
    w = principal_power(complex(-1, -1e-69), 1.5)
    assert abs(w - 1j) < 1e-12


def test_modulus_identity_bulk():
    rng = np.random.default_rng(7)
    r = 10 ** rng.uniform(-3, 1, 10_000)
    th = rng.uniform(-math.pi, math.pi, 10_000)
    t = rng.uniform(1.0001, 12.0, 10_000)
    worst = 0.0
    for ri, thi, ti in zip(r, th, t):
        z = complex(ri * math.cos(thi), ri * math.sin(thi))
        w = principal_power(z, ti)
        expected = abs(z) ** ti
        worst = max(worst, abs(abs(w) - expected) / expected)
    assert worst < 1e-12


@given(
    st.complex_numbers(min_magnitude=1e-3, max_magnitude=1e3, allow_nan=False, allow_infinity=False),
    st.floats(1.01, 8.0),
)
def test_principal_power_matches_cmath(z, t):
    w = principal_power(z, t)
    ref = oracle_power(z, t)
    assert abs(w - ref) <= 1e-12 * max(1.0, abs(ref))


@pytest.mark.parametrize("n", range(2, 33))
def test_integer_exponent_matches_repeated_product(n):
    rng = np.random.default_rng(n)
    for _ in range(50):
        z = complex(*rng.uniform(-1.3, 1.3, 2))
        prod = 1 + 0j
        for _ in range(n):
            prod *= z
        w = principal_power(z, n)
        assert abs(w - prod) <= 1e-10 * max(abs(prod), 1e-300)


# -- apply_map ----------------------------------------------------------------


def test_apply_map_examples():
    assert apply_map(PowerPoly(2, 1), 1) == 2
    assert apply_map(PerturbedPower(2, 0, 1), 1) == 2
    assert abs(apply_map(RealPower(2.5, 0), -1) - 1j) < 1e-15


def test_pole_and_infinity_sentinel():
    f = PerturbedPower(3, 0, 1)
    assert apply_map(f, 0) == INFINITY or math.isinf(apply_map(f, 0).real)
    w = apply_map(f, 0)
    for g in (f, PowerPoly(2, 1), RealPower(3.5, 0.2)):
        assert math.isinf(abs(apply_map(g, w)))


@pytest.mark.parametrize("n", [2, 3, 5, 8])
def test_rotation_symmetry(n):
    rng = np.random.default_rng(100 + n)
    fs = [PerturbedPower(n, 0.3 - 0.2j, 0.05 + 0.01j), PowerPoly(n, 0.4 + 0.1j)]
    for f in fs:
        for _ in range(200):
            z = complex(*rng.uniform(-1.2, 1.2, 2))
            base = apply_map(f, z)
            for j in range(1, n):
                w = cmath.exp(2j * math.pi * j / n)
                assert abs(apply_map(f, w * z) - base) <= 1e-12 * max(1.0, abs(base))


# -- escape radius ------------------------------------------------------------


def test_escape_radius_examples():
    assert escape_radius(PowerPoly(2, 0)) == pytest.approx(2.000001, abs=1e-12)
    assert escape_radius(PowerPoly(11, 0)) == pytest.approx(2 ** 0.1 + 1e-6, abs=1e-12)
    assert escape_radius(PowerPoly(11, 0)) == pytest.approx(1.0718, abs=1e-4)
    assert escape_radius(PerturbedPower(4, 1, 1)) == pytest.approx(
        max(2 ** (1 / 3), 6 ** 0.25) + 1e-6, abs=1e-12)
    assert escape_radius(PerturbedPower(4, 1, 1)) == pytest.approx(1.5651, abs=1e-4)


@pytest.mark.parametrize(
    "f",
    [PowerPoly(2, 0), PowerPoly(11, 0), PowerPoly(5, 2 - 1j), RealPower(2.5, 0.5j),
     RealPower(25.0, -1.3), PerturbedPower(4, 1, 1), PerturbedPower(3, 0, -0.125),
     PerturbedPower(20, 0.25, 0.2 + 0.1j)],
    ids=repr,
)
def test_expansion_outside_escape_radius(f):
    rng = np.random.default_rng(11)
    r_esc = escape_radius(f)
    r = rng.uniform(r_esc, 4 * r_esc, 10_000)
    th = rng.uniform(-math.pi, math.pi, 10_000)
    for ri, thi in zip(r, th):
        z = cmath.rect(ri, thi)
        assert abs(apply_map(f, z)) > abs(z)


def test_escape_spec_validation():
    with pytest.raises(ValueError):
        EscapeSpec(1.0, 10)
    with pytest.raises(ValueError):
        EscapeSpec(2.0, 0)


# -- iterate_orbit ------------------------------------------------------------


def test_orbit_examples():
    assert iterate_orbit(PowerPoly(2, -1), 0, EscapeSpec(2.000001, 1000)) == BOUNDED
    assert iterate_orbit(PowerPoly(2, 2), 0, EscapeSpec(2.1, 100)).step == 2
    f = PerturbedPower(3, 0, 1)
    assert iterate_orbit(f, 0, EscapeSpec.for_family(f)).step == 1


def test_orbit_start_outside_is_step_zero():
    assert iterate_orbit(PowerPoly(2, 0), 3, EscapeSpec(2.1, 5)).step == 0


def test_overflow_counts_as_escape():
    f = RealPower(200.0, 0)
    out = iterate_orbit(f, 1.5, EscapeSpec(1e300, 10))
    assert out.escaped and out.step <= 10


@settings(max_examples=200, deadline=None)
@given(
    st.complex_numbers(max_magnitude=2.5, allow_nan=False, allow_infinity=False),
    st.complex_numbers(max_magnitude=1.5, allow_nan=False, allow_infinity=False),
    st.integers(2, 6),
    st.integers(1, 60),
    st.integers(0, 200),
)
def test_escape_step_is_monotone_in_max_iter(z0, c, n, m_small, extra):
    f = PowerPoly(n, c)
    r = escape_radius(f)
    out = iterate_orbit(f, z0, EscapeSpec(r, m_small))
    longer = iterate_orbit(f, z0, EscapeSpec(r, m_small + extra))
    if out.escaped:
        assert out.step <= m_small
        assert longer == out
    elif longer.escaped:
        assert longer.step > m_small


# -- critical data and classification -------------------------------------------


def test_critical_data_examples():
    assert critical_values(PowerPoly(5, 0.3)) == (0.3 + 0j,)
    assert critical_data(PowerPoly(5, 0.3)).critical_points == (0j,)
    vp, vm = critical_values(PerturbedPower(3, 0, -1 / 8))
    assert abs(vp - 1j / math.sqrt(2)) < 1e-15 and abs(vm + 1j / math.sqrt(2)) < 1e-15
    assert set(critical_values(PerturbedPower(2, 1, 1))) == {3 + 0j, -1 + 0j}


@settings(max_examples=100)
@given(st.complex_numbers(min_magnitude=1e-3, max_magnitude=5, allow_nan=False, allow_infinity=False),
       st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False))
def test_critical_values_are_images_of_critical_points(a, c):
    n = 3
    f = PerturbedPower(n, c, a)
    # critical points are the 2n-th roots of a; images are c +- 2 sqrt(a) as a set
    cps = [cmath.rect(abs(a) ** (1 / (2 * n)), (cmath.phase(a) + 2 * math.pi * j) / (2 * n))
           for j in range(2 * n)]
    images = [apply_map(f, w) for w in cps]
    vals = critical_values(f)
    for im in images:
        assert min(abs(im - v) for v in vals) < 1e-9 * max(1, abs(c) + abs(a))
    for v in vals:
        assert min(abs(im - v) for im in images) < 1e-9 * max(1, abs(c) + abs(a))


def test_classify_examples():
    spec = lambda f: EscapeSpec.for_family(f, 512)  # noqa: E731
    assert classify(PowerPoly(2, 2), spec(PowerPoly(2, 2))).tag == "Cantor"
    assert classify(PowerPoly(2, 0), spec(PowerPoly(2, 0))).tag == "Connected"
    f = PerturbedPower(4, 0, 10.0)
    assert classify(f, spec(f)).tag == "Cantor"


def test_mcmullen_from_small_degree_on():
    # frozen by direct orbit computation: a = 0.1 is McMullen for every n >= 5 and
    # Connected below that
    tags = {n: classify(PerturbedPower(n, 0, 0.1), EscapeSpec.for_family(PerturbedPower(n, 0, 0.1))).tag
            for n in range(2, 65)}
    assert [tags[n] for n in (2, 3, 4)] == ["Connected"] * 3
    assert all(tags[n] == "McMullen" for n in range(5, 65))


def test_classification_tags_exclusive_and_orbit_driven():
    f = PerturbedPower(8, 0, 0.1)
    cl = classify(f, EscapeSpec.for_family(f))
    vp = critical_values(f)[0]
    direct = iterate_orbit(f, vp, EscapeSpec.for_family(f))
    assert cl.orbits == (direct,)
    assert cl.tag == "McMullen" and direct.step > 0


def test_classify_untagged_families_report_orbits():
    f = RealPower(2.5, 0.1)
    cl = classify(f, EscapeSpec.for_family(f))
    assert cl.tag is None and cl.bounded_orbits == 1
    g = PerturbedPower(4, 0.5, 0.01)
    cl = classify(g, EscapeSpec.for_family(g))
    assert cl.tag is None and len(cl.orbits) == 2
