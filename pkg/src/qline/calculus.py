"""Differential calculi as rank-one modules of 1-forms.

Three calculi share one representation: a 1-form is ``coeff * basis`` with
the coefficient on the left.  Each calculus has a coordinate basis with a
twisted right action and a frame basis that commutes with everything.

========  ==========  ===========  ================================
family    coordinate  frame        coordinate in terms of frame
========  ==========  ===========  ================================
``d``     ``dx``      ``theta``    ``dx = q L x theta``
``dbar``  ``dxbar``   ``thetabar`` ``dxbar = L^-1 x thetabar``
``dR``    ``dRx``     ``thetaR``   ``dRx = (q L x, L^-1 x) thetaR``
========  ==========  ===========  ================================

Moving an element ``L^a x^b`` from the right of ``dx`` to its left gives a
factor ``q^(a-b)``; for ``dxbar`` the factor is ``q^(a+b)``.  The real
calculus uses the pair of factors.  Products of two 1-forms vanish.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Union

import numpy as np

from .algebra import (
    AlgebraElement,
    DoubledElement,
    derive_e1,
    derive_e1bar,
    derive_eR1,
    involute,
)
from .exactnum import z_of
from .params import Params

Coeff = Union[AlgebraElement, DoubledElement]

FAMILY = {"dx": "d", "theta": "d", "dxbar": "dbar", "thetabar": "dbar",
          "dRx": "dR", "thetaR": "dR"}
FRAME = {"d": "theta", "dbar": "thetabar", "dR": "thetaR"}
COORD = {"d": "dx", "dbar": "dxbar", "dR": "dRx"}
STAR_FAMILY = {"d": "dbar", "dbar": "d", "dR": "dR"}
TOP = "top"


def _gen(name, q, p=1):
    return AlgebraElement.gen(name, q, p)


def coord_to_frame(family: str, q) -> Coeff:
    """Coefficient ``C`` with ``coordinate = C * frame``."""
    L, x, Li = _gen("L", q), _gen("x", q), _gen("L", q, -1)
    if family == "d":
        return q * L * x
    if family == "dbar":
        return Li * x
    if family == "dR":
        return DoubledElement(q * L * x, Li * x)
    raise ValueError(family)


def frame_to_coord(family: str, q) -> Coeff:
    """Coefficient ``C`` with ``frame = C * coordinate``."""
    L, xi, Li = _gen("L", q), _gen("x", q, -1), _gen("L", q, -1)
    if family == "d":
        return Li * xi
    if family == "dbar":
        return L * xi * (1 / q)
    if family == "dR":
        return DoubledElement(Li * xi, L * xi * (1 / q))
    raise ValueError(family)


def _twist_plain(f: AlgebraElement, sign: int) -> AlgebraElement:
    q = f.q
    return AlgebraElement({k: v * q ** (k[0] + sign * k[1]) for k, v in f.items()}, q)


def twist(family: str, h: Coeff) -> Coeff:
    """``sigma`` with ``coordinate * h = sigma(h) * coordinate``."""
    if family == "d":
        return _twist_plain(h, -1)
    if family == "dbar":
        return _twist_plain(h, +1)
    if family == "dR":
        if isinstance(h, AlgebraElement):
            h = DoubledElement.diag(h)
        return DoubledElement(_twist_plain(h.first, -1), _twist_plain(h.second, +1))
    raise ValueError(family)


def _lift(family: str, c, q) -> Coeff:
    if family == "dR":
        if isinstance(c, DoubledElement):
            return c
        if isinstance(c, AlgebraElement):
            return DoubledElement.diag(c)
        s = AlgebraElement.scalar(c, q)
        return DoubledElement(s, s)
    if isinstance(c, DoubledElement):
        raise TypeError("doubled coefficient outside the real calculus")
    if isinstance(c, AlgebraElement):
        return c
    return AlgebraElement.scalar(c, q)


class FormElement:
    """A 1-form ``coeff * basis``, or the zero 2-form (tag ``"top"``)."""

    __slots__ = ("coeff", "basis", "degree")

    def __init__(self, coeff, basis: str, degree: int = 1):
        if degree == 2:
            self.coeff, self.basis, self.degree = coeff, TOP, 2
            return
        if degree != 1:
            raise ValueError("FormElement holds 1-forms and the zero 2-form only")
        if basis not in FAMILY:
            raise ValueError(f"unknown basis {basis!r}")
        q = coeff.q if hasattr(coeff, "q") else None
        self.coeff = _lift(FAMILY[basis], coeff, q)
        self.basis = basis
        self.degree = 1

    @classmethod
    def top(cls, q, family: str = "d") -> "FormElement":
        return cls(AlgebraElement.zero(q), TOP, 2)

    @classmethod
    def basis_form(cls, basis: str, q) -> "FormElement":
        return cls(AlgebraElement.one(q), basis)

    @property
    def q(self):
        return self.coeff.q

    @property
    def family(self) -> str:
        return FAMILY.get(self.basis, TOP)

    def is_zero(self) -> bool:
        return self.degree == 2 or self.coeff.is_zero()

    # basis changes -------------------------------------------------------
    def to_frame_basis(self) -> "FormElement":
        if self.degree != 1:
            return self
        fam = self.family
        if self.basis == FRAME[fam]:
            return self
        return FormElement(self.coeff * coord_to_frame(fam, self.q), FRAME[fam])

    def to_dx_basis(self) -> "FormElement":
        if self.degree != 1:
            return self
        fam = self.family
        if self.basis == COORD[fam]:
            return self
        return FormElement(self.coeff * frame_to_coord(fam, self.q), COORD[fam])

    # module structure ----------------------------------------------------
    def lmul(self, f) -> "FormElement":
        if self.degree == 2:
            return self
        return FormElement(_lift(self.family, f, self.q) * self.coeff, self.basis)

    def rmul(self, h) -> "FormElement":
        if self.degree == 2:
            return self
        fam = self.family
        h = _lift(fam, h, self.q)
        if self.basis == FRAME[fam]:
            return FormElement(self.coeff * h, self.basis)
        return FormElement(self.coeff * twist(fam, h), self.basis)

    def rmul_via_coordinates(self, h) -> "FormElement":
        """Right action computed through the coordinate-basis module rules,
        then expressed back in the original basis."""
        out = self.to_dx_basis().rmul(h)
        return out.to_frame_basis() if self.basis == FRAME.get(self.family) else out

    def __mul__(self, other):
        if isinstance(other, FormElement):
            if self.degree + other.degree > 2 or self.degree == 2 or other.degree == 2:
                raise ValueError("form degree exceeds 2")
            return FormElement.top(self.q)
        return self.rmul(other)

    def __rmul__(self, other):
        return self.lmul(other)

    def __add__(self, other):
        if not isinstance(other, FormElement):
            if other == 0:
                return self
            return NotImplemented
        if self.degree == 2 and other.degree == 2:
            return self
        if self.degree != other.degree:
            raise ValueError("cannot add forms of different degree")
        if self.family != other.family:
            if self.is_zero():
                return other
            if other.is_zero():
                return self
            raise ValueError(f"cannot add forms of calculi {self.family} and {other.family}")
        if self.basis == other.basis:
            return FormElement(self.coeff + other.coeff, self.basis)
        a, b = self.to_frame_basis(), other.to_frame_basis()
        return FormElement(a.coeff + b.coeff, a.basis)

    __radd__ = __add__

    def __neg__(self):
        if self.degree == 2:
            return self
        return FormElement(-self.coeff, self.basis)

    def __sub__(self, other):
        return self + (-other)

    def star(self) -> "FormElement":
        """``(c B)* = B* c*`` with ``dx* = dxbar``, ``theta* = thetabar``,
        ``dRx* = dRx`` and ``thetaR* = thetaR``."""
        if self.degree == 2:
            return self
        fam = self.family
        target = STAR_FAMILY[fam]
        is_frame = self.basis == FRAME[fam]
        new_basis = FRAME[target] if is_frame else COORD[target]
        cstar = self.coeff.star() if isinstance(self.coeff, DoubledElement) else involute(self.coeff)
        return FormElement.basis_form(new_basis, self.q).rmul(cstar)

    def __eq__(self, other):
        if not isinstance(other, FormElement):
            if other == 0:
                return self.is_zero()
            return NotImplemented
        if self.is_zero() and other.is_zero():
            return True
        if self.degree != other.degree or self.family != other.family:
            return False
        return self.to_frame_basis().coeff == other.to_frame_basis().coeff

    def __hash__(self):
        return hash((self.degree, self.family, self.to_frame_basis().coeff))

    def __str__(self):
        if self.degree == 2:
            return "0 (degree 2)"
        return f"{self.coeff} ⊗ {self.basis}"

    def __repr__(self):
        return f"FormElement({self})"


# -----------------------------------------------------------------------------
# differentials and distinguished forms
# -----------------------------------------------------------------------------

def differential(f, which: str = "d") -> FormElement:
    """``df = (e1 f) theta``, ``dbar f = (eb1 f) thetabar``,
    ``dR F = (e_R1 F) thetaR``."""
    if isinstance(f, FormElement):
        return FormElement.top(f.q)
    if which == "d":
        return FormElement(derive_e1(f), "theta")
    if which in ("dbar", "db"):
        return FormElement(derive_e1bar(f), "thetabar")
    if which == "dR":
        return FormElement(derive_eR1(f), "thetaR")
    raise ValueError(f"unknown differential {which!r}")


def dirac_form(q, family: str = "d") -> FormElement:
    """``theta = -lambda theta^1`` for each calculus."""
    zi = 1 / z_of(q)
    L, Li = _gen("L", q), _gen("L", q, -1)
    if family == "d":
        return FormElement(L * zi, "theta")
    if family == "dbar":
        return FormElement(Li * (-zi), "thetabar")
    if family == "dR":
        return FormElement(DoubledElement(L * zi, Li * (-zi)), "thetaR")
    raise ValueError(family)


@dataclass
class CheckReport:
    name: str
    passed: bool
    details: List[dict]

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "details": self.details}


def check_centrality(omega: FormElement, sample: Iterable) -> CheckReport:
    """Check ``f omega = omega f`` for each ``f``; the right action goes
    through the coordinate-basis module rules."""
    details = []
    ok = True
    for f in sample:
        left = omega.lmul(f)
        right = omega.rmul_via_coordinates(f)
        res = left - right
        if omega.basis == COORD.get(omega.family):
            res = res.to_dx_basis()
        passed = res.is_zero()
        ok &= passed
        details.append({"element": str(f), "passed": passed, "residual": str(res)})
    return CheckReport("centrality", ok, details)


def check_reality(f) -> CheckReport:
    """``(df)* = dbar(f*)`` through the coordinate basis, and
    ``(dR F)* = dR(F*)``."""
    details = []
    if isinstance(f, AlgebraElement):
        lhs = differential(f, "d").to_dx_basis().star()
        rhs = differential(involute(f), "dbar")
        details.append({"check": "(df)* = dbar(f*)", "passed": lhs == rhs,
                        "lhs": str(lhs.to_frame_basis()), "rhs": str(rhs)})
        F = DoubledElement.diag(f)
    else:
        F = f
    lhs = differential(F, "dR").to_dx_basis().star()
    rhs = differential(F.star(), "dR")
    details.append({"check": "(dR F)* = dR(F*)", "passed": lhs == rhs,
                    "lhs": str(lhs.to_frame_basis()), "rhs": str(rhs)})
    return CheckReport("reality", all(d["passed"] for d in details), details)


def dirac_identity_check(f, which: str = "d") -> CheckReport:
    """Compare ``df`` with ``-[theta, f]``; ``theta f`` uses the coordinate
    module rules."""
    fam = {"d": "d", "dbar": "dbar", "db": "dbar", "dR": "dR"}[which]
    th = dirac_form(f.q, fam)
    g = f if fam != "dR" or isinstance(f, DoubledElement) else DoubledElement.diag(f)
    comm = th.rmul_via_coordinates(g) - th.lmul(g)
    lhs = differential(g, which)
    passed = lhs == -comm
    return CheckReport("dirac", passed, [{"which": which, "element": str(f), "passed": passed,
                                          "df": str(lhs), "-[theta,f]": str(-comm)}])


def check_module_relations(q) -> CheckReport:
    """``x dx = q dx x``, ``x dxbar = q^-1 dxbar x``,
    ``x dRx = (q, q^-1) dRx x`` and ``dx L = q L dx`` for all three."""
    x, L = _gen("x", q), _gen("L", q)
    details = []
    for fam in ("d", "dbar", "dR"):
        b = FormElement.basis_form(COORD[fam], q)
        dxf = differential(x if fam != "dR" else DoubledElement.diag(x), fam).to_dx_basis()
        s = {"d": q, "dbar": 1 / q}.get(fam)
        scal = DoubledElement.scalars(q, 1 / q, q) if fam == "dR" else s
        lhs, rhs = dxf.lmul(x), dxf.rmul(x).lmul(scal)
        details.append({"relation": f"x {COORD[fam]} = s {COORD[fam]} x", "passed": lhs == rhs})
        lhs, rhs = b.rmul(L), b.lmul(L).lmul(q)
        details.append({"relation": f"{COORD[fam]} L = q L {COORD[fam]}", "passed": lhs == rhs})
        details.append({"relation": f"d x = 1*{COORD[fam]}",
                        "passed": dxf == b})
    return CheckReport("module", all(d["passed"] for d in details), details)


# -----------------------------------------------------------------------------
# matrix-level exactness witnesses
# -----------------------------------------------------------------------------

def K_element(q) -> DoubledElement:
    """``K = z (L^-1, L)``; ``thetaR = dR(K y)``."""
    z = z_of(q)
    return DoubledElement(_gen("L", q, -1) * z, _gen("L", q) * z)


def exactness_witnesses(params: Optional[Params] = None, window=None) -> Dict[str, dict]:
    """Verify ``theta = d(z L^-1 y)``, ``thetabar = dbar(z L y)``,
    ``thetaR = dR(K y)``, the frame values ``theta = alpha``,
    ``thetabar = alphabar``, ``thetaR = (alpha, alphabar)`` and ``K* = K``."""
    from . import repspace as rs

    p = params or Params()
    w = window or rs.Window(-16, 16, "open", p.q, "planck")
    if w.units != "planck":
        raise ValueError("exactness witnesses use integer y (planck units)")
    zf = float(p.z)
    L, Li = rs.rep_generator("L", w, p), rs.rep_generator("L^-1", w, p)
    x, xi = rs.rep_generator("x", w, p), rs.rep_generator("x^-1", w, p)
    y = rs.rep_generator("y", w, p)
    one = rs.identity(w)
    lam1, lam1b = L * (-1 / zf), Li * (1 / zf)

    def comm(a, b):
        return a @ b - b @ a

    out = {}
    r = rs.interior_residual(comm(lam1, Li @ y * zf), one, method="rows")
    out["theta = d(z L^-1 y)"] = r
    r = rs.interior_residual(comm(lam1b, L @ y * zf), one, method="rows")
    out["thetabar = dbar(z L y)"] = r
    lamR = rs.DoubledRep(lam1, lam1b)
    Ky = rs.DoubledRep(Li @ y * zf, L @ y * zf)
    out["thetaR = dR(K y)"] = rs.interior_residual(lamR @ Ky - Ky @ lamR, one, method="rows")
    th = Li @ xi @ rs.rep_generator("dx", w, p)
    thb = L @ xi @ rs.rep_generator("dbarx", w, p) * (1 / float(p.q))
    out["theta = alpha"] = rs.interior_residual(th, one * complex(p.alpha), method="rows")
    out["thetabar = alphabar"] = rs.interior_residual(thb, one * complex(p.alphabar), method="rows")
    thR = rs.DoubledRep(th, thb)
    out["thetaR = (alpha, alphabar)"] = rs.interior_residual(
        thR, rs.DoubledRep(one * complex(p.alpha), one * complex(p.alphabar)), method="rows")
    K = K_element(p.q)
    report = {name: {"residual": float(v), "passed": bool(v <= 1e-12)} for name, v in out.items()}
    report["K* = K"] = {"residual": 0.0 if K.star() == K else float("inf"), "passed": K.star() == K}
    return report
