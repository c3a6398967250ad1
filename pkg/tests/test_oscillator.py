import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qline import oscillator as osc
from qline import repspace as rs


@pytest.fixture(scope="module")
def sweep():
    return osc.run_sweep()


@pytest.fixture(scope="module", params=osc.Z_SWEEP, ids=lambda z: f"z={z}")
def ops(request):
    return osc.build_phase_space(request.param)


def test_exact_identities(ops):
    res = osc.identity_residuals(ops)
    for name in ("cr", "a-a*", "a-h", "H"):
        assert res[name] <= 1e-12, (name, res[name])


def test_window_centred_near_vacuum(ops):
    k0 = round(1 / ops.z**2)
    assert (ops.window.kmin + ops.window.kmax) // 2 == k0
    assert ops.window.cyclic and ops.window.dim % 2 == 1


def test_h_unitary_componentwise(ops):
    for blk in (ops.h.first, ops.h.second):
        assert np.allclose(blk.matrix @ blk.adjoint().matrix, np.eye(ops.window.dim))


def test_stars_are_twisted_adjoints(ops):
    assert np.allclose(ops.a_star.block(), ops.a.star().block())
    assert np.allclose(ops.b_star.first.matrix, ops.b.second.matrix.conj().T)


def test_undressed_commutator_closed_form(ops):
    # with Lambda^s y Lambda^-s = y - s z one finds
    # [h^-1/2 a, (h^-1/2 a)*] = 1/2 + (z^2/8) h^-1 exactly on the lattice
    z = ops.z
    bare = osc.build_phase_space(z, quarter=False, cubic=False)
    C = bare.b @ bare.b_star - bare.b_star @ bare.b
    w = bare.window
    hinv = rs.DoubledRep(rs.shift(w, -1), rs.shift(w, 1))
    target = bare.one * 0.5 + hinv * (z * z / 8)
    assert rs.interior_residual(C.first, target.first, bare.probes()) <= 1e-11


def test_mirror_symmetry(sweep):
    for p in sweep.points:
        assert p.mirror <= 1e-12
        assert p.dressing[1] == pytest.approx(p.dressing[2], rel=1e-9)
        assert p.number[1] == pytest.approx(p.number[2], rel=1e-9)


@pytest.mark.parametrize("z, hw", [(0.1, 40), (0.2, 10)])
def test_halfwidth_too_small(z, hw):
    with pytest.raises(ValueError, match="too small"):
        osc.build_phase_space(z, hw)


@pytest.mark.parametrize("z", [0.0, 0.3, -0.1])
def test_z_range(z):
    with pytest.raises(ValueError):
        osc.build_phase_space(z)


def test_vacuum_normalized_and_nondegenerate():
    ops = osc.build_phase_space(0.1, 120)
    ns = osc.vacuum_and_number_states(ops, 5)
    assert np.linalg.norm(ns.vacuum) == pytest.approx(1.0)
    assert not ns.degenerate
    assert len(ns.states) == 6


def test_nmax_limit():
    with pytest.raises(ValueError):
        osc.vacuum_and_number_states(osc.build_phase_space(0.2), 9)


@pytest.mark.xfail(strict=True, reason="[b, b*] tends to 1/2, not 1, with the displayed dressing")
def test_dressing_drop_factor(sweep):
    r = {p.z: p.dressing[1] for p in sweep.points}
    assert r[0.2] / r[0.1] >= 11


@pytest.mark.xfail(strict=True, reason="dressing residual is O(1); see the closed-form test above")
def test_dressing_exponent(sweep):
    assert sweep.exponents["dressing"] >= 3.5


@pytest.mark.xfail(strict=True, reason="[N, h] identity residual does not shrink with z")
def test_number_exponent(sweep):
    assert sweep.exponents["number"] >= 3.5


@pytest.mark.xfail(strict=True, reason="b has no near-kernel vector on the window")
def test_vacuum_kernel_quality():
    ops = osc.build_phase_space(0.1, 120)
    assert osc.vacuum_and_number_states(ops, 5).smin_rel <= 1e-6


@pytest.mark.xfail(strict=True, reason="H|0> coefficients follow the failed dressing")
def test_c0_tends_to_half(sweep):
    assert sweep.coefficient_checks()["bounds"]


def test_undressed_controls_recorded(sweep):
    # b -> h^-1/2 a and the cubic-free variant are measured and reported
    assert set(sweep.exponents) >= {"dressing_undressed", "dressing_no_cubic", "number_undressed"}
    for p in sweep.points:
        assert p.dressing_undressed == pytest.approx(0.5 - p.z**2 / 8, abs=1e-3)


@given(st.floats(0.5, 6), st.floats(1e-3, 10))
def test_fit_exponent_recovers_power(power, scale):
    zs = [0.2, 0.1, 0.05]
    assert osc.fit_exponent(zs, [scale * z**power for z in zs]) == pytest.approx(power, rel=1e-9)


def test_fit_exponent_needs_three():
    with pytest.raises(ValueError):
        osc.fit_exponent([0.1, 0.2], [1, 2])


def test_worker_count(monkeypatch):
    monkeypatch.setenv("QLINE_THREADS", "1")
    assert osc.worker_count(3) == 1
    monkeypatch.setenv("QLINE_THREADS", "8")
    assert osc.worker_count(3) == 3


def test_report_json(sweep):
    js = json.loads(json.dumps(sweep.to_json()))
    assert js["z"] == [0.2, 0.1, 0.05]
    assert {"residuals", "exponents", "coefficients", "passed"} <= set(js)


def test_sweep_order_independent_of_threads(monkeypatch):
    monkeypatch.setenv("QLINE_THREADS", "1")
    a = osc.run_sweep([0.2, 0.1, 0.25]).to_json()
    monkeypatch.setenv("QLINE_THREADS", "3")
    b = osc.run_sweep([0.25, 0.1, 0.2]).to_json()
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
