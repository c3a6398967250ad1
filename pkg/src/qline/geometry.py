"""Metrics, distances and linear connections.

Metric evaluation convention: for ``g(omega ⊗ eta)`` the coefficient of
``omega`` is pulled out on the left and the coefficient of ``eta`` on the
right.  In a frame basis this is unambiguous because frames are central.
For the coordinate basis ``dx`` the right coefficient is obtained by moving
it through ``dx`` with the module rule, which is exactly where two-sided
linearity breaks down for the non-local metric.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from .algebra import AlgebraElement, DoubledElement, derive_e1, derive_e1bar, derive_eR1, involute
from .calculus import COORD, FAMILY, FRAME, FormElement, coord_to_frame, differential
from .exactnum import CplxRat, z_of
from .params import Params

Coeff = Union[AlgebraElement, DoubledElement]

METRIC_KINDS = ("localReal", "hermitian", "formalNonReal", "nonLocal")


def _gen(name, q, p=1):
    return AlgebraElement.gen(name, q, p)


@dataclass(frozen=True)
class MetricSpec:
    """A metric fixed by its value on one pair of basis 1-forms."""

    kind: str
    q: Fraction
    basis: Tuple[str, str]
    component: object
    sigma: Tuple[object, object] = (1, 1)

    @classmethod
    def make(cls, kind: str, q) -> "MetricSpec":
        q = Fraction(q)
        one = AlgebraElement.one(q)
        if kind == "localReal":
            return cls(kind, q, ("thetaR", "thetaR"), DoubledElement.diag(one))
        if kind == "hermitian":
            return cls(kind, q, ("thetabar", "theta"), one)
        if kind == "formalNonReal":
            return cls(kind, q, ("theta", "theta"), one)
        if kind == "nonLocal":
            return cls(kind, q, ("dx", "dx"), one, (1 / q, q))
        raise ValueError(f"unknown metric kind {kind!r}")


def _right_coeff(eta: FormElement) -> Coeff:
    """``h`` with ``eta = B h`` for the basis form ``B`` of ``eta``."""
    fam = eta.family
    if eta.basis == FRAME[fam]:
        return eta.coeff
    # c B = B sigma^-1(c); undo the twist q^(a-b) (dx) or q^(a+b) (dxbar)
    c = eta.coeff

    def untwist(f, sign):
        return AlgebraElement({k: v * f.q ** -(k[0] + sign * k[1]) for k, v in f.items()}, f.q)

    if fam == "d":
        return untwist(c, -1)
    if fam == "dbar":
        return untwist(c, +1)
    return DoubledElement(untwist(c.first, -1), untwist(c.second, +1))


def _to_basis(omega: FormElement, basis: str) -> FormElement:
    if FAMILY[basis] != omega.family:
        raise ValueError(f"basis mismatch: form in {omega.basis}, metric declared on {basis}")
    return omega.to_frame_basis() if basis == FRAME[omega.family] else omega.to_dx_basis()


def metric_eval(g: MetricSpec, omega: FormElement, eta: FormElement) -> Coeff:
    """``g(f B1 ⊗ B2 h) = f g(B1 ⊗ B2) h``."""
    a = _to_basis(omega, g.basis[0])
    b = _to_basis(eta, g.basis[1])
    return a.coeff * g.component * _right_coeff(b)


def metric_component_frame(g: MetricSpec) -> Coeff:
    """``g(theta ⊗ theta)`` in the frame basis of the metric's calculus."""
    fam = FAMILY[g.basis[0]]
    th = FormElement.basis_form(FRAME[fam], g.q)
    th2 = FormElement.basis_form(FRAME[FAMILY[g.basis[1]]], g.q)
    return metric_eval(g, th, th2)


def inverse_monomial(f: Coeff) -> Coeff:
    """Inverse of a single-monomial component (componentwise when doubled)."""
    if isinstance(f, DoubledElement):
        return DoubledElement(inverse_monomial(f.first), inverse_monomial(f.second))
    if len(f) != 1:
        raise ValueError("component is not a single monomial; no inverse available")
    return f.inverse()


def g_prime_upper(kind: str, q) -> Coeff:
    """``g'^11``: the metric on the coordinate differentials."""
    q = Fraction(q)
    x = _gen("x", q)
    g = MetricSpec.make(kind, q)
    if kind == "localReal":
        d = differential(DoubledElement.diag(x), "dR")
        return metric_eval(g, d, d)
    if kind == "hermitian":
        return metric_eval(g, differential(x, "dbar"), differential(x, "d"))
    if kind == "formalNonReal":
        d = differential(x, "d")
        return metric_eval(g, d, d)
    d = FormElement.basis_form("dx", q)
    return metric_eval(g, d, d)


def root_g_prime(kind: str, q) -> Coeff:
    """``sqrt(g'^11)`` for the local metric: ``e_R1 x``."""
    if kind != "localReal":
        raise ValueError("square root only tabulated for the local real metric")
    return derive_eR1(DoubledElement.diag(_gen("x", q)))


# -----------------------------------------------------------------------------
# distances
# -----------------------------------------------------------------------------

@dataclass
class DistanceReport:
    metric: str
    q: Fraction
    k: int
    units: str
    value: float
    alternatives: Dict[str, float] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"metric": self.metric, "q": str(self.q), "k": self.k, "units": self.units,
                "value": self.value, "alternatives": self.alternatives}


def distance(kind: str, k: int, window, params: Optional[Params] = None) -> DistanceReport:
    """Line element ``ds(k)`` from the matrix representations.

    * ``local``: ``||sqrt(g'_11) dRx v|| / ||v||`` with ``v = |k> ⊕ |k>``
      on the two copies, times the spacing of ``y`` in the window's units
    * ``hermitian``: ``||sqrt(g'_11) dx |k>||`` with ``g'_11 = q^-2 x^-2``
    * ``nonlocal``: ``||dx |k>||`` since ``g(dx ⊗ dx) = 1``
    """
    from . import repspace as rs

    p = params or Params(q=window.q)
    w = window
    if not (w.kmin + 2 <= k <= w.kmax - 2):
        raise ValueError(f"k={k} is at the window boundary")
    alias = {"local": "localReal", "localReal": "localReal", "hermitian": "hermitian",
             "nonlocal": "nonLocal", "nonLocal": "nonLocal"}
    if kind not in alias:
        raise ValueError(f"unknown metric {kind!r}")
    kind = alias[kind]
    q = p.q
    ek = w.basis(k)
    dx = rs.rep_generator("dx", w, p)
    dbx = rs.rep_generator("dbarx", w, p)
    alts: Dict[str, float] = {}
    if kind == "localReal":
        root_inv = inverse_monomial(root_g_prime("localReal", q))
        R = rs.rep_of(root_inv, w, p)
        v1 = R.first.matrix @ (dx.matrix @ ek)
        v2 = R.second.matrix @ (dbx.matrix @ ek)
        val = float(np.sqrt(np.linalg.norm(v1) ** 2 + np.linalg.norm(v2) ** 2) / np.sqrt(2.0))
        ys = rs.y_values(w)
        spacing = float(ys[w.index(k) + 1] - ys[w.index(k)])
        alts["unnormalized"] = float(val * np.sqrt(2.0) * spacing)
        val *= spacing
    elif kind == "hermitian":
        gp = g_prime_upper("hermitian", q)
        # g'_11 = q^-2 x^-2 is diagonal and positive; its root is q^-1 x^-1
        root = rs.rep_of(_gen("x", q, -1) * (1 / q), w, p)
        check = rs.rep_of(inverse_monomial(gp), w, p)
        assert np.allclose(root.matrix @ root.matrix, check.matrix)
        val = float(np.linalg.norm(root.matrix @ (dx.matrix @ ek)))
        alts["root on the right"] = float(np.linalg.norm(dx.matrix @ (root.matrix @ ek)))
    else:
        val = float(np.linalg.norm(dx.matrix @ ek))
    return DistanceReport(kind, q, k, w.units, val, alts)


# -----------------------------------------------------------------------------
# raising map
# -----------------------------------------------------------------------------

def raising_map_defect(k: int, window, params: Optional[Params] = None) -> Dict[int, complex]:
    """Components of ``(dx - g'^11 d1)|k>`` with ``g'^11 = (q L x)^2``,
    computed from the matrices.  Keys are basis labels."""
    from . import repspace as rs

    p = params or Params(q=window.q)
    w = window
    if not (w.kmin + 3 <= k <= w.kmax - 3):
        raise ValueError("k needs a margin of at least 2 from the boundary")
    g = g_prime_upper("formalNonReal", p.q)
    op = rs.rep_generator("dx", w, p) - rs.rep_of(g, w, p) @ rs.rep_generator("d1", w, p)
    col = op.column(k)
    return {int(kk): complex(col[w.index(kk)]) for kk in w.ks if abs(col[w.index(kk)]) > 0}


def raising_map_display(k: int, params: Optional[Params] = None) -> Dict[int, complex]:
    """The closed-form stencil as printed:
    ``q^2 z^-1 q^(2k) |k+2> + (alpha - beta q z^-1) q^k |k+1>``."""
    p = params or Params()
    q, zi = float(p.q), 1 / float(p.z)
    return {k + 2: q**2 * zi * q ** (2 * k),
            k + 1: (complex(p.alpha) - complex(p.beta) * q * zi) * q**k}


def raising_map_derived(k: int, params: Optional[Params] = None) -> Dict[int, complex]:
    """Stencil obtained by composing the generator stencils by hand:
    ``z^-1 q^(k+2) |k+2> + (alpha - beta z^-1) q^(k+1) |k+1>``."""
    p = params or Params()
    q, zi = float(p.q), 1 / float(p.z)
    return {k + 2: zi * q ** (k + 2),
            k + 1: (complex(p.alpha) - complex(p.beta) * zi) * q ** (k + 1)}


# -----------------------------------------------------------------------------
# connections
# -----------------------------------------------------------------------------

@dataclass(frozen=True)
class ConnectionSpec:
    """``D theta = -omega theta ⊗ theta`` with flip ``sigma(theta⊗theta) = S theta⊗theta``."""

    omega: Coeff
    S: object
    flavor: str = "plain"

    @classmethod
    def flat(cls, q, flavor="plain") -> "ConnectionSpec":
        z = DoubledElement.diag(AlgebraElement.zero(q)) if flavor == "real" else AlgebraElement.zero(q)
        return cls(z, 1, flavor)

    @classmethod
    def nonlocal_(cls, q, flavor="plain") -> "ConnectionSpec":
        q = Fraction(q)
        if flavor == "plain":
            return cls(_gen("L", q), 1 / q, "plain")
        if flavor == "bar":
            return cls(q * _gen("L", q, -1), q, "bar")
        return cls(DoubledElement(_gen("L", q), q * _gen("L", q, -1)), (1 / q, q), "real")


def _family(flavor):
    return {"plain": "d", "bar": "dbar", "real": "dR"}[flavor]


def _deriv(flavor):
    return {"plain": derive_e1, "bar": derive_e1bar, "real": derive_eR1}[flavor]


def _scalar(S, q, flavor):
    if flavor == "real":
        if isinstance(S, tuple):
            return DoubledElement.scalars(S[0], S[1], q)
        return DoubledElement.scalars(S, S, q)
    return AlgebraElement.scalar(S, q)


def covariant_derivative(c: ConnectionSpec, form: FormElement) -> Coeff:
    """Coefficient of ``theta ⊗ theta`` in ``D(f theta) = df ⊗ theta - f omega theta ⊗ theta``."""
    f = form.to_frame_basis().coeff
    return _deriv(c.flavor)(f) - f * c.omega


def curvature(c: ConnectionSpec, q) -> FormElement:
    """Curvature is a 2-form; there are none, so it is the zero top form."""
    return FormElement.top(q)


def metric_frame_component(kind: str, q, flavor: str = "plain") -> Coeff:
    """``g^11`` in the frame basis for the metrics paired with connections."""
    q = Fraction(q)
    L, x, Li = _gen("L", q), _gen("x", q), _gen("L", q, -1)
    if kind == "flat":
        one = AlgebraElement.one(q)
        return DoubledElement.diag(one) if flavor == "real" else one
    if kind == "nonLocal":
        if flavor == "plain":
            return inverse_monomial((q * L * x) ** 2)
        if flavor == "bar":
            return inverse_monomial((Li * x) ** 2)
        return DoubledElement(inverse_monomial((q * L * x) ** 2), inverse_monomial((Li * x) ** 2))
    raise ValueError(kind)


@dataclass
class ConnectionReport:
    passed: bool
    checks: List[dict]
    D_dx: str

    def to_json(self) -> dict:
        return {"passed": self.passed, "checks": self.checks, "D_dx": self.D_dx}


def connection_check(c: ConnectionSpec, g11: Coeff,
                     expected_D_dx: Optional[Coeff] = None) -> ConnectionReport:
    """Verify metric compatibility, the value of ``D`` on the coordinate
    differential, and agreement of the left and right Leibniz rules on
    ``L theta`` and ``x theta``."""
    q = g11.q
    flavor = c.flavor
    fam = _family(flavor)
    e = _deriv(flavor)
    S = _scalar(c.S, q, flavor)
    checks = []
    # metric compatibility: d g^11 = -(1 + S) omega g^11 theta
    lhs = e(g11)
    rhs = -((S + 1) * c.omega * g11)
    checks.append({"check": "metric compatibility", "passed": lhs == rhs,
                   "residual": str(lhs - rhs)})
    # Leibniz: (1 - S) e(f) = [f, omega]
    L, x = _gen("L", q), _gen("x", q)
    for f in (L, x):
        F = DoubledElement.diag(f) if flavor == "real" else f
        left = (1 - S) * e(F) if flavor == "real" else e(F) * (1 - S)
        right = F * c.omega - c.omega * F
        checks.append({"check": f"left/right Leibniz on {f} theta", "passed": left == right,
                       "residual": str(left - right)})
    x_ = DoubledElement.diag(x) if flavor == "real" else x
    dxf = differential(x_, fam)
    Ddx = covariant_derivative(c, dxf)
    if expected_D_dx is not None:
        checks.append({"check": "D(coordinate differential)", "passed": Ddx == expected_D_dx,
                       "residual": str(Ddx - expected_D_dx)})
    return ConnectionReport(all(ch["passed"] for ch in checks), checks, str(Ddx))


def expected_flat_D_dx(q, flavor="plain") -> Coeff:
    q = Fraction(q)
    L, x, Li = _gen("L", q), _gen("x", q), _gen("L", q, -1)
    if flavor == "plain":
        return q * q * L * L * x
    if flavor == "bar":
        return Li * Li * x
    return DoubledElement(q * q * L * L * x, Li * Li * x)


def real_nonlocal_star_check(q) -> bool:
    """``omega_R* = (q, q^-1) omega_R`` for ``omega_R = (L, q L^-1)``."""
    w = ConnectionSpec.nonlocal_(q, "real").omega
    return w.star() == DoubledElement.scalars(q, 1 / Fraction(q), q) * w


# -----------------------------------------------------------------------------
# non-bilinearity
# -----------------------------------------------------------------------------

@dataclass
class WitnessReport:
    metric: str
    q: Fraction
    left_value: str
    right_value: str
    factor: Fraction

    def to_json(self) -> dict:
        return {"metric": self.metric, "q": str(self.q), "left": self.left_value,
                "right": self.right_value, "factor": str(self.factor)}


def nonbilinearity_witness(q=Fraction(3, 2), metric: str = "nonLocal") -> WitnessReport:
    """Evaluate ``g(x B ⊗ B)`` two ways.

    Left: pull ``x`` out on the left, giving ``x g(B ⊗ B)``.  Right: move
    ``x`` through both factors with the module rules
    (``x B ⊗ B = B ⊗ B sigma(sigma(x))``) and pull it out on the right.
    The ratio is ``q^2`` for ``B = dx`` and 1 for a central frame.  ``q``
    may be any positive rational here, including 1.
    """
    q = Fraction(q)
    x = AlgebraElement.gen("x", q)
    if metric == "nonLocal":
        basis, comp = "dx", AlgebraElement.one(q)
    elif metric == "localReal":
        basis, comp = "thetaR", DoubledElement.diag(AlgebraElement.one(q))
        x = DoubledElement.diag(x)
    else:
        raise ValueError(metric)
    B = FormElement.basis_form(basis, q)
    left = x * comp
    # x B = B h1, then h1 moves into the second factor: B ⊗ (h1 B) = B ⊗ B h2
    h1 = _right_coeff(B.lmul(x))
    h2 = _right_coeff(B.lmul(h1))
    right = comp * h2
    if isinstance(left, DoubledElement):
        lf, rf = left.first, right.first
    else:
        lf, rf = left, right
    (k1, v1), = lf.items()
    (k2, v2), = rf.items()
    assert k1 == k2
    factor = (v2 / v1).re
    return WitnessReport(metric, q, str(left), str(right), factor)
