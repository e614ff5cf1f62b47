import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dlimit import PerturbedPower, PowerPoly, apply_map
from dlimit.geometry import (
    Circle,
    ClosedAnnulus,
    ClosedDisk,
    Limacon,
    RootFindingError,
    aberth_roots,
    annulus_bounds,
    bisect,
    critical_fixed_solutions,
    distance_to_target,
    limacon_point,
    limacon_samples,
    parse_complex,
    parse_target,
    radial_roots,
    roots_of_minus_one,
    superattracting_center,
    target_label,
    verify_center_dynamics,
)

C_ABS = (0.25, 0.5, 1.0, 1.5, 2.0, 3.0)


def positive_real_roots(coeffs):
    r = np.roots(coeffs)
    return sorted(x.real for x in r if abs(x.imag) < 1e-9 and x.real > 0)


# -- targets and parsing ----------------------------------------------------------


@pytest.mark.parametrize("bad", [lambda: Circle(0), lambda: ClosedDisk(-1),
                                 lambda: ClosedAnnulus(2, 1), lambda: ClosedAnnulus(1, 1)])
def test_target_validation(bad):
    with pytest.raises(ValueError):
        bad()


@pytest.mark.parametrize("text,expected", [
    ("1+2i", 1 + 2j), ("1-2i", 1 - 2j), ("-0.5", -0.5), ("3i", 3j), ("-i", -1j),
    ("1e-3+2.5e2i", 0.001 + 250j), ("0.0157+0.072i", 0.0157 + 0.072j),
])
def test_parse_complex(text, expected):
    assert parse_complex(text) == expected


@pytest.mark.parametrize("text", ["", "1 + 2i", "abc", "1+2k"])
def test_parse_complex_rejects(text):
    with pytest.raises(ValueError):
        parse_complex(text)


@pytest.mark.parametrize("text,expected", [
    ("circle:1.0", Circle(1.0)), ("disk:2", ClosedDisk(2.0)),
    ("annulus:0.5,1.5", ClosedAnnulus(0.5, 1.5)), ("limacon:0.25", Limacon(0.25)),
])
def test_parse_target_roundtrip(text, expected):
    t = parse_target(text)
    assert t == expected
    assert parse_target(target_label(t)) == t


@pytest.mark.parametrize("text", ["square:1", "circle:", "annulus:1", "circle:-1"])
def test_parse_target_rejects(text):
    with pytest.raises(ValueError):
        parse_target(text)


# -- distance_to_target ----------------------------------------------------------------


def test_distance_examples():
    assert distance_to_target(0, Circle(1)) == 1
    assert distance_to_target(0.5, ClosedDisk(1)) == 0
    assert distance_to_target(0, Limacon(0)) == pytest.approx(0.25, abs=1e-12)


@settings(max_examples=200)
@given(st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False),
       st.floats(0.1, 3), st.floats(0.1, 3))
def test_distance_closed_forms(z, r1, r2):
    lo, hi = sorted((r1, r2))
    m = abs(z)
    assert distance_to_target(z, Circle(r1)) == pytest.approx(abs(m - r1), abs=1e-15)
    assert distance_to_target(z, ClosedDisk(r1)) == pytest.approx(max(0.0, m - r1), abs=1e-15)
    if hi > lo:
        assert distance_to_target(z, ClosedAnnulus(lo, hi)) == pytest.approx(
            max(0.0, lo - m, m - hi), abs=1e-15)


def test_limacon_distance_against_dense_brute_force():
    rng = np.random.default_rng(3)
    for c in (0.25, 1.0, 1.5 + 0.5j, -0.8j):
        dense = limacon_samples(c, 1 << 20)
        z = rng.uniform(-2, 2, 64) + 1j * rng.uniform(-2, 2, 64)
        got = distance_to_target(z, Limacon(c))
        ref = np.array([np.abs(dense - zi).min() for zi in z])
        # dense sampling over-estimates by at most half the sample spacing
        spacing = np.abs(np.diff(dense)).max()
        assert np.all(got <= ref + 1e-9)
        assert np.all(ref - got <= spacing)


def test_distance_accepts_arrays():
    z = np.array([0, 0.5, 2])
    assert np.allclose(distance_to_target(z, Circle(1)), [1, 0.5, 1])


# -- limaçon ------------------------------------------------------------------------


def test_limacon_examples():
    th = np.linspace(0, 2 * np.pi, 17)
    assert np.allclose(limacon_point(0, th), np.exp(2j * th) / 4, atol=1e-15)
    assert abs(limacon_point(1, 0) - 1) < 1e-15
    assert abs(1 - 2 * cmath.sqrt(limacon_point(1, 0))) == pytest.approx(1, abs=1e-15)
    assert abs(limacon_point(1, math.pi)) < 1e-15


def test_limacon_defining_identity():
    rng = np.random.default_rng(8)
    rad = 3 * np.sqrt(rng.uniform(0, 1, 10_000))
    c = rad * np.exp(1j * rng.uniform(-np.pi, np.pi, 10_000))
    th = rng.uniform(0, 2 * np.pi, 10_000)
    a = np.array([limacon_point(ci, ti) for ci, ti in zip(c, th)])
    s = np.sqrt(a)
    err = np.minimum(np.abs(np.abs(c + 2 * s) - 1), np.abs(np.abs(c - 2 * s) - 1))
    assert err.max() < 1e-10


@pytest.mark.parametrize("c", [0.3 + 0.4j, -1.2j, 2 * cmath.exp(2.5j)])
def test_limacon_rotation_covariance(c):
    rot = cmath.exp(2j * cmath.phase(c))
    a = limacon_samples(c, 4096)
    b = rot * limacon_samples(abs(c), 4096)
    # same set, parametrized with shifted angle: match every point of one in the other
    d_ab = max(np.abs(b - p).min() for p in a)
    assert d_ab < 2 * math.pi * (1 + abs(c)) ** 2 / 4096  # within one sample step
    # exact: the point at theta for c equals rot times the point at theta - Arg c for |c|
    th = np.linspace(0, 2 * np.pi, 101)
    assert np.allclose(limacon_point(c, th), rot * limacon_point(abs(c), th - cmath.phase(c)), atol=1e-12)


@pytest.mark.parametrize("c_abs", [0, 0.25, 0.5, 1, 1.7, 3])
def test_limacon_modulus_within_annulus_bounds(c_abs):
    lo, hi = annulus_bounds(c_abs)
    m = np.abs(limacon_samples(c_abs * cmath.exp(0.7j), 8192))
    assert m.min() >= lo - 1e-15 and m.max() <= hi + 1e-15


def test_annulus_bounds_examples():
    assert annulus_bounds(1) == (0, 1)
    assert annulus_bounds(0) == (0.25, 0.25)
    assert annulus_bounds(3) == (1, 4)


# -- centers -------------------------------------------------------------------------


def test_center_examples():
    assert superattracting_center(5, 0) == pytest.approx(2 ** -2.5, abs=1e-15)
    assert abs(superattracting_center(5, 0) - 0.1767767) < 1e-7
    assert abs(superattracting_center(3, 1) + 1 / 8) < 1e-15


@pytest.mark.parametrize("n,k", [(2, 0), (3, 2), (3, -1), (8, 7)])
def test_center_rejects(n, k):
    with pytest.raises(ValueError):
        superattracting_center(n, k)


def test_center_modulus_tends_to_quarter():
    mods = [abs(superattracting_center(n, 0)) for n in range(3, 400)]
    assert all(abs(m - 2 ** (-2 * n / (n - 1))) < 1e-15 for n, m in zip(range(3, 400), mods))
    assert all(b > a for a, b in zip(mods, mods[1:]))
    assert abs(mods[-1] - 0.25) < 2e-3


def test_center_dynamics_examples():
    r = verify_center_dynamics(3, 1)
    assert abs(r.v_plus - 1j / math.sqrt(2)) < 1e-15
    assert r.case == "n odd, k odd" and r.residual < 1e-12
    assert abs(r.image_plus - r.v_minus) < 1e-12
    r = verify_center_dynamics(4, 0)
    assert abs(r.image_plus - r.v_plus) < 1e-12 and abs(r.image_minus - r.v_plus) < 1e-12
    r = verify_center_dynamics(3, 0)
    assert abs(r.image_plus - r.v_plus) < 1e-12 and abs(r.image_minus - r.v_minus) < 1e-12


@pytest.mark.parametrize("n", range(3, 17))
def test_center_table_residuals(n):
    for k in range(n - 1):
        r = verify_center_dynamics(n, k)
        # the pair {v+, v-} is the critical value set c +- 2 sqrt(a)
        assert abs(r.v_plus ** 2 / 4 - r.a) < 1e-15
        assert r.residual < 1e-9


# -- roots of -1 ---------------------------------------------------------------------


def test_roots_of_minus_one_examples():
    assert np.allclose(roots_of_minus_one(2), [-1])
    assert sorted(roots_of_minus_one(3), key=lambda z: z.imag) == pytest.approx([-1j, 1j], abs=1e-15)
    r5 = roots_of_minus_one(5)
    assert len(r5) == 4 and np.allclose(np.abs(r5), 1)
    gaps = np.diff(np.sort(np.mod(np.angle(r5), 2 * np.pi)))
    assert np.allclose(gaps, np.pi / 2)


@pytest.mark.parametrize("n", range(2, 25))
def test_roots_of_minus_one_match_numpy(n):
    ours = np.array(roots_of_minus_one(n))
    ref = np.roots([1] + [0] * (n - 2) + [1])  # c^(n-1) + 1
    assert len(ours) == n - 1
    for z in ref:
        assert np.abs(ours - z).min() < 1e-10
    assert np.all(np.abs(ours ** n + ours) < 1e-12)


# -- radial roots --------------------------------------------------------------------


def test_bisect_basic():
    assert bisect(lambda x: x * x - 2, 0, 2) == pytest.approx(math.sqrt(2), abs=1e-12)
    with pytest.raises(ValueError):
        bisect(lambda x: x * x + 1, 0, 1)


def test_radial_roots_quadratic_case():
    b = radial_roots(2, 1.0)
    assert abs(b.u - 0.5) < 1e-12 and abs(b.v - 1.0) < 1e-12
    assert b.x is None and b.y is None


def test_radial_roots_h_dip_example():
    n, c = 4, 0.25
    rc = (1 / (2 * n)) ** (1 / (n - 1))
    assert rc == pytest.approx(0.5)
    assert rc ** n - rc / 2 + c / 2 == pytest.approx(-0.0625)
    b = radial_roots(n, c)
    assert 0.25 < b.x < 0.5 < b.y < 1


@pytest.mark.parametrize("c", C_ABS)
@pytest.mark.parametrize("n", range(2, 65))
def test_radial_root_orderings_and_oracle(n, c):
    b = radial_roots(n, c)
    f_roots = positive_real_roots([1] + [0] * (n - 2) + [0.5, -c / 2])
    g_roots = positive_real_roots([1] + [0] * (n - 2) + [-0.5, -c / 2])
    assert len(f_roots) == 1 and len(g_roots) == 1
    assert abs(b.u - f_roots[0]) < 1e-9 and abs(b.v - g_roots[0]) < 1e-9
    assert 0 < b.u < b.v
    h_roots = positive_real_roots([1] + [0] * (n - 2) + [-0.5, c / 2])
    if b.x is None:
        assert len(h_roots) == 0 or c >= 1
    else:
        assert len(h_roots) == 2
        assert abs(b.x - h_roots[0]) < 1e-9 and abs(b.y - h_roots[1]) < 1e-9
        assert b.x < b.y
        # u < |c| < x holds exactly because f(|c|) = h(|c|) = |c|^n > 0 with f
        # increasing and h decreasing below its critical point
        rc = (1 / (2 * n)) ** (1 / (n - 1))
        assert c < rc and c ** n > 0
        if 2 * c ** n > 4 * math.ulp(c):
            assert b.u < c < b.x
        else:
            # gap below double resolution: the values collapse onto |c|
            assert b.u <= c <= b.x


@pytest.mark.parametrize("c", [1.0, 1.5, 2.0, 3.0])
def test_radial_roots_approach_one(c):
    us = [radial_roots(n, c).u for n in range(2, 65)]
    vs = [radial_roots(n, c).v for n in range(2, 65)]
    assert all(abs(b - 1) <= abs(a - 1) + 1e-15 for a, b in zip(us, us[1:]))
    assert all(abs(b - 1) <= abs(a - 1) + 1e-15 for a, b in zip(vs, vs[1:]))


def test_radial_roots_validation():
    with pytest.raises(ValueError):
        radial_roots(1, 1.0)
    with pytest.raises(ValueError):
        radial_roots(4, 0.0)


# -- sector solutions ------------------------------------------------------------------


@pytest.mark.parametrize("n", [2, 5, 9, 17, 40])
def test_aberth_matches_numpy_roots(n):
    c = 0.7 - 0.3j
    ours = aberth_roots(n, c, radial_roots(n, abs(c)).v)
    ref = np.roots([2] + [0] * (n - 2) + [-1, c])
    for z in ref:
        assert np.abs(ours - z).min() < 1e-9


def test_sector_solutions_small_c_limit():
    # 2 w^n = w: nonzero roots have |w| = 2^{-1/(n-1)}, so |a| is the center modulus
    n, c = 7, 1e-13
    sols = critical_fixed_solutions(n, c)
    big = [s for s in sols if abs(s.w) > 1e-6]
    assert len(big) == n - 1
    for s in big:
        assert abs(abs(s.w) - 2 ** (-1 / (n - 1))) < 1e-10
        assert abs(abs(s.a) - abs(superattracting_center(n, 0))) < 1e-10
    centers = [superattracting_center(n, k) for k in range(n - 1)]
    for s in big:
        assert min(abs(s.a - a) for a in centers) < 1e-9


def test_sector_solutions_c15_n9():
    sols = critical_fixed_solutions(9, 1.5)
    b = radial_roots(9, 1.5)
    assert sorted(s.k for s in sols) == list(range(9))
    assert all(b.u <= abs(s.w) <= b.v for s in sols)


def test_sector_solutions_n4_quarter():
    # three roots in the T-band [y_n, v_n], one inside |w| <= x_n
    sols = critical_fixed_solutions(4, 0.25)
    b = radial_roots(4, 0.25)
    assert [s.k for s in sols] == [0, 1, 2, None]
    for s in sols[:3]:
        assert b.y * (1 - 1e-6) <= abs(s.w) <= b.v * (1 + 1e-6)
    assert abs(sols[3].w) <= b.x * (1 + 1e-6)
    # for real positive c the small root is x_n itself and y_n is the k=0 root
    assert abs(sols[3].w - b.x) < 1e-10
    assert abs(sols[0].w - b.y) < 1e-10


@pytest.mark.parametrize("c", [0.25, 1.5, 2.0, 1j])
@pytest.mark.parametrize("n", range(4, 13))
def test_sector_solutions_invariants(n, c):
    sols = critical_fixed_solutions(n, c)
    b = radial_roots(n, abs(c))
    assert len(sols) == n
    ref = np.roots([2] + [0] * (n - 2) + [-1, c])
    for z in ref:
        assert min(abs(s.w - z) for s in sols) < 1e-9
    for s in sols:
        assert s.residual < 1e-10
        assert abs(2 * s.w ** n - s.w + c) < 1e-10
        assert b.u * (1 - 1e-9) <= abs(s.w) <= b.v * (1 + 1e-9)
        assert s.fixed_residual < 1e-8
        assert abs(apply_map(PerturbedPower(n, c, s.a), s.w) - s.w) < 1e-8
        assert abs(s.a - s.w ** (2 * n)) <= 1e-15 * max(1.0, abs(s.a))
    ks = [s.k for s in sols if s.k is not None]
    if abs(c) >= 1:
        assert sorted(ks) == list(range(n))
    else:
        assert sorted(ks) == list(range(n - 1))
        assert sum(s.k is None for s in sols) == 1


@pytest.mark.parametrize("n", [3, 6, 11])
def test_f_positive_inside_u_band(n):
    # Claim-1 shape: f(r) = r^n + r/2 - |c|/2 is negative below u and positive above
    for c in C_ABS:
        u = radial_roots(n, c).u
        rs = np.linspace(0, 3, 2001)
        f = rs ** n + rs / 2 - c / 2
        assert np.all(f[rs < u - 1e-9] < 0) and np.all(f[rs > u + 1e-9] > 0)


def test_sector_solutions_rejects():
    with pytest.raises(ValueError):
        critical_fixed_solutions(4, 0)
    with pytest.raises(ValueError):
        critical_fixed_solutions(1, 1)


def test_aberth_nonconvergence_reports():
    with pytest.raises(RootFindingError, match="did not converge"):
        aberth_roots(12, 0.3, 0.9, max_iter=1)


@pytest.mark.parametrize("c", [0.25, 0.5, 1.5, 2.0, 1j])
def test_solutions_approach_limacon(c):
    # frozen gap bound: the a_{n,k} lie within 1.5/n of L_c for n >= 16
    for n in (16, 32, 64):
        sols = [s for s in critical_fixed_solutions(n, c) if s.k is not None]
        gap = max(distance_to_target(s.a, Limacon(c)) for s in sols)
        assert gap <= 1.5 / n


def test_sector_solutions_match_polynomial_family_orbit():
    # a fixed critical point means the critical orbit is bounded: the parameter is in M^1
    from dlimit import EscapeSpec, iterate_orbit, escape_radius
    for s in critical_fixed_solutions(10, 0.25):
        f = PerturbedPower(10, 0.25, s.a)
        assert iterate_orbit(f, s.w, EscapeSpec(escape_radius(f), 200)).bounded
    assert PowerPoly(3, 0)  # sanity import
