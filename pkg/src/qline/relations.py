"""Catalog of exact operator identities and their verification.

Each entry builds one or more ``(label, lhs, rhs)`` triples from a
:class:`~qline.params.Params`.  Identities that involve starred twisted
derivatives are evaluated after eliminating the derivatives, since the
involution is only defined on derivative-free elements.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Tuple

from .algebra import (
    AlgebraElement,
    DoubledElement,
    derive_e1,
    derive_e1bar,
    involute,
    lambda1,
    lambda1bar,
    lambda_R1,
    partial1,
    partial1bar,
)
from .exactnum import CplxRat, format_cplx
from .params import Params

Triple = Tuple[str, object, object]


@dataclass
class RelationReport:
    name: str
    passed: bool
    checks: List[dict] = field(default_factory=list)
    constants: Dict[str, str] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "checks": self.checks,
                "constants": self.constants}


def _gens(q):
    return (AlgebraElement.gen("x", q), AlgebraElement.gen("L", q),
            AlgebraElement.gen("x", q, -1), AlgebraElement.gen("L", q, -1))


def e1_operator(p: Params) -> AlgebraElement:
    """``e1 = z^-1 gamma + lambda_1`` as an operator, with ``gamma = beta``."""
    return lambda1(p.q) + AlgebraElement.scalar(p.gamma * (1 / p.z), p.q)


def e1bar_operator(p: Params) -> AlgebraElement:
    return lambda1bar(p.q) + AlgebraElement.scalar(p.gammabar * (1 / p.z), p.q)


def c1_of(p: Params) -> CplxRat:
    return (p.beta.conj() + p.betabar * (1 / p.q)) * (1 / p.z)


def c2_of(p: Params) -> CplxRat:
    return (p.gamma.conj() + p.gammabar) * (1 / p.z)


def _lambdax(p):
    q = p.q
    x, L, xi, Li = _gens(q)
    return [("x L = q L x", x * L, q * L * x),
            ("x^2 L = q^2 L x^2", x * x * L, q * q * L * x * x),
            ("x^-1 L = q^-1 L x^-1", xi * L, L * xi * (1 / q))]


def _comrel(p):
    q = p.q
    x, L, _, _ = _gens(q)
    d1 = AlgebraElement.gen("d1", q)
    e1 = partial1(q, p.beta)
    return [("d1 x = 1 + q x d1", d1 * x, 1 + q * x * d1),
            ("d1 L = q^-1 L d1", d1 * L, L * d1 * (1 / q)),
            ("eliminated d1 x = 1 + q x d1", e1 * x, 1 + q * x * e1),
            ("eliminated d1 L = q^-1 L d1", e1 * L, L * e1 * (1 / q))]


def _barcomrel(p):
    q = p.q
    x, L, _, _ = _gens(q)
    db = AlgebraElement.gen("db1", q)
    eb = partial1bar(q, p.betabar)
    return [("db1 x = 1 + q^-1 x db1", db * x, 1 + x * db * (1 / q)),
            ("db1 L = q^-1 L db1", db * L, L * db * (1 / q)),
            ("eliminated db1 x = 1 + q^-1 x db1", eb * x, 1 + x * eb * (1 / q)),
            ("eliminated db1 L = q^-1 L db1", eb * L, L * eb * (1 / q))]


def _ecomrel(p):
    q = p.q
    x, L, _, Li = _gens(q)
    e1, eb = e1_operator(p), e1bar_operator(p)
    return [("e1 x = q L x + x e1", e1 * x, q * L * x + x * e1),
            ("e1 L = L e1", e1 * L, L * e1),
            ("eb1 x = L^-1 x + x eb1", eb * x, Li * x + x * eb),
            ("eb1 L = L eb1", eb * L, L * eb)]


def _lambda(p):
    # the operator forms e1, eb1 fix d1 and db1; check the displayed
    # relations against the frame relation d1 = L^-1 x^-1 e1
    q, z = p.q, p.z
    x, L, xi, Li = _gens(q)
    d1 = Li * xi * e1_operator(p)
    db = L * xi * e1bar_operator(p) * (1 / q)
    return [("beta L^-1 = 1 + q z x d1", Li * p.beta, 1 + q * z * x * d1),
            ("betabar L = -1 + z x db1", L * p.betabar, -1 + z * x * db)]


def _starbar(p):
    q = p.q
    _, L, xi, _ = _gens(q)
    d1s = involute(partial1(q, p.beta))
    return [("q d1* + db1 = c1 L x^-1", q * d1s + partial1bar(q, p.betabar),
             (L * xi).scale(c1_of(p)))]


def _defect(p):
    q = p.q
    x, L, _, _ = _gens(q)
    lhs = x * (involute(partial1(q, p.beta)) + partial1bar(q, p.betabar))
    rhs = 1 + L.scale((p.beta.conj() + p.betabar) * (1 / p.z))
    return [("x(d1* + db1) = 1 + z^-1(beta* + betabar) L", lhs, rhs)]


def _transfor(p):
    q = p.q
    _, L, xi, Li = _gens(q)
    return [("d1 = L^-1 x^-1 e1", partial1(q, p.beta), Li * xi * e1_operator(p)),
            ("db1 = q^-1 L x^-1 eb1", partial1bar(q, p.betabar),
             L * xi * e1bar_operator(p) * (1 / q))]


def _c2(p):
    q = p.q
    lhs = involute(e1_operator(p)) + e1bar_operator(p)
    return [("e1* + eb1 = c2", lhs, AlgebraElement.scalar(c2_of(p), q))]


def _eR(p):
    # e_R1 acts as ad(lambda_R1); as an operator it is lambda_R1 + c_R and
    # for beta = -betabar = +-1 it equals +-(x db1, q x d1)
    q, z = p.q, p.z
    x, L, _, Li = _gens(q)
    out = []
    lam = lambda_R1(q)
    for f in (x, x * x, L * x, Li):
        lhs = lam * DoubledElement.diag(f) - DoubledElement.diag(f) * lam
        rhs = DoubledElement(derive_e1(f), derive_e1bar(f))
        out.append((f"[lambda_R1, {f}] = e_R1 {f}", lhs, rhs))
    sign = None
    if p.beta == 1 and p.betabar == -1:
        sign = 1
    elif p.beta == -1 and p.betabar == 1:
        sign = -1
    if sign is not None:
        cR = DoubledElement.scalars(sign / z, -sign / z, q)
        xd = DoubledElement(x * partial1bar(q, p.betabar), q * x * partial1(q, p.beta))
        out.append(("lambda_R1 + c_R = +-(x db1, q x d1)", lam + cR, xd * sign))
    return out


def d_R1(p: Params) -> AlgebraElement:
    """``d_R1 = (d1 - d1*)/2`` after elimination."""
    d1 = partial1(p.q, p.beta)
    return (d1 - involute(d1)) * Fraction(1, 2)


def _dR1(p):
    q = p.q
    x, L, _, Li = _gens(q)
    dr = d_R1(p)
    half = Fraction(1, 2)
    return [("q dR1 x = (q+1)/2 beta L^-1 + x dR1", q * dr * x,
             Li.scale(p.beta * (half * (q + 1))) + x * dr),
            ("L dR1 = q dR1 L", L * dr, q * dr * L),
            ("x dR1 = z^-1/2 (beta q^-1 L^-1 - beta* L)", x * dr,
             (Li.scale(p.beta / q) - L.scale(p.beta.conj())) * (half / p.z)),
            ("dR1 x = (q+1)/(2q) beta L^-1 + q^-1 x dR1", dr * x,
             Li.scale(p.beta * ((q + 1) / (2 * q))) + x * dr * (1 / q))]


CATALOG: Dict[str, Callable[[Params], List[Triple]]] = {
    "lambdax": _lambdax,
    "comrel": _comrel,
    "barcomrel": _barcomrel,
    "e-comrel": _ecomrel,
    "lambda": _lambda,
    "starbar": _starbar,
    "defect": _defect,
    "transfor": _transfor,
    "c2": _c2,
    "eR": _eR,
    "dR1": _dR1,
}


def relation_names() -> List[str]:
    return list(CATALOG)


def verify_relation(name: str, params: Params | None = None) -> RelationReport:
    """Evaluate both sides of a registered identity and compare exactly."""
    if name not in CATALOG:
        raise KeyError(f"unknown relation {name!r}; known: {', '.join(CATALOG)}")
    p = params or Params()
    checks = []
    ok = True
    for label, lhs, rhs in CATALOG[name](p):
        res = lhs - rhs
        passed = res.is_zero()
        ok &= passed
        checks.append({"label": label, "passed": passed, "lhs": str(lhs), "rhs": str(rhs),
                       "residual": str(res)})
    consts = {}
    if name == "starbar":
        consts["c1"] = format_cplx(c1_of(p))
    if name == "c2":
        consts["c2"] = format_cplx(c2_of(p))
    return RelationReport(name, ok, checks, consts)
