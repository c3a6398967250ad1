from fractions import Fraction

import numpy as np
import pytest

from qline import repspace as rs
from qline.algebra import AlgebraElement, DoubledElement
from qline.geometry import (ConnectionSpec, MetricSpec, connection_check, covariant_derivative,
                            curvature, distance, expected_flat_D_dx, g_prime_upper,
                            metric_frame_component, nonbilinearity_witness, raising_map_defect,
                            raising_map_derived, raising_map_display, real_nonlocal_star_check,
                            root_g_prime)
from qline.params import Params

FLAVORS = ["plain", "bar", "real"]


@pytest.mark.parametrize("flavor", FLAVORS)
def test_flat_connection(q, flavor):
    c = ConnectionSpec.flat(q, flavor)
    rep = connection_check(c, metric_frame_component("flat", q, flavor), expected_flat_D_dx(q, flavor))
    assert rep.passed, rep.checks


def test_flat_D_dx_value():
    q = Fraction(3, 2)
    L, x = AlgebraElement.gen("L", q), AlgebraElement.gen("x", q)
    assert expected_flat_D_dx(q) == q * q * L * L * x


@pytest.mark.parametrize("flavor", FLAVORS)
def test_nonlocal_connection(q, flavor):
    c = ConnectionSpec.nonlocal_(q, flavor)
    g = metric_frame_component("nonLocal", q, flavor)
    rep = connection_check(c, g, g - g)
    assert rep.passed, rep.checks


def test_real_nonlocal_star(q):
    assert real_nonlocal_star_check(q)


def test_perturbed_connection_fails(q):
    # falsification control: omega = L + 1 breaks compatibility and D1 dx = 0
    base = ConnectionSpec.nonlocal_(q, "plain")
    bad = ConnectionSpec(base.omega + AlgebraElement.one(q), base.S, "plain")
    g = metric_frame_component("nonLocal", q, "plain")
    rep = connection_check(bad, g, g - g)
    assert not rep.passed
    failed = {c["check"] for c in rep.checks if not c["passed"]}
    assert "metric compatibility" in failed
    assert "D(coordinate differential)" in failed


def test_curvature_is_top_form(q):
    assert curvature(ConnectionSpec.nonlocal_(q), q).degree == 2


def test_nonbilinearity_factor(q):
    assert nonbilinearity_witness(q, "nonLocal").factor == q**2
    assert nonbilinearity_witness(q, "localReal").factor == 1


def test_nonbilinearity_commutative_limit():
    assert nonbilinearity_witness(1, "nonLocal").factor == 1


def test_g_prime_values():
    q = Fraction(3, 2)
    L, x = AlgebraElement.gen("L", q), AlgebraElement.gen("x", q)
    assert g_prime_upper("localReal", q) == DoubledElement(q**3 * L**2 * x**2, L**-2 * x**2 * (1 / q))
    root = root_g_prime("localReal", q)
    assert root * root == g_prime_upper("localReal", q)
    assert root.star() == root


W = rs.Window(-16, 16, "open", Fraction(3, 2))


@pytest.mark.parametrize("k", range(-4, 5))
def test_local_distance(k):
    assert abs(distance("local", k, W).value - 1) <= 1e-12
    wl = rs.Window(-16, 16, "open", Fraction(3, 2), "laboratory")
    assert abs(distance("local", k, wl).value - 1 / 3) <= 1e-12


@pytest.mark.parametrize("k", range(-4, 5))
def test_nonlocal_distance(k):
    assert abs(distance("nonlocal", k, W).value - 1.5 ** (k + 1)) <= 1e-9 * 1.5 ** (k + 1)


@pytest.mark.parametrize("k", range(-4, 5))
def test_hermitian_distance_measured(k):
    # the matrices give 1/q; the printed value is q (see the acceptance suite)
    rep = distance("hermitian", k, W)
    assert abs(rep.value - 2 / 3) <= 1e-12
    assert abs(rep.alternatives["root on the right"] - 1) <= 1e-12


def test_distance_rejects_boundary_and_unknown():
    with pytest.raises(ValueError):
        distance("local", 16, W)
    with pytest.raises(ValueError):
        distance("spherical", 0, W)


@pytest.mark.parametrize("k", range(-4, 5))
def test_raising_map_matches_hand_derivation(k):
    p = Params(q=Fraction(2))
    w = rs.Window(-16, 16, "open", p.q)
    got = raising_map_defect(k, w, p)
    want = raising_map_derived(k, p)
    assert set(got) == set(want)
    for key in want:
        assert abs(got[key] - want[key]) <= 1e-12 * abs(want[key])


def test_raising_map_display_differs():
    p = Params(q=Fraction(2))
    w = rs.Window(-16, 16, "open", p.q)
    got = raising_map_defect(0, w, p)
    shown = raising_map_display(0, p)
    assert got[2] == pytest.approx(8) and shown[2] == pytest.approx(8)
    assert got[1] == pytest.approx(-2) and shown[1] == pytest.approx(-3)
