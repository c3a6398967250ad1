"""Trace integrals over the calculi.

``∫ f theta = Tr(f)``.  Traces of algebra elements are computed exactly:
only monomials with no shift contribute, each as a finite geometric sum
over the window.  Divergence is reported from partial sums, never from
floating overflow.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .algebra import AlgebraElement, DoubledElement, involute, lambda1
from .calculus import FRAME, FormElement
from .exactnum import CplxRat, format_cplx

RADII = (8, 16, 32)
GROWTH = 1.5


@dataclass
class TraceResult:
    value: Union[CplxRat, str]
    partials: List[CplxRat] = field(default_factory=list)
    radii: Tuple[int, ...] = RADII
    window: Optional[object] = None

    @property
    def divergent(self) -> bool:
        return self.value == "divergent"

    def to_json(self) -> dict:
        v = self.value if isinstance(self.value, str) else format_cplx(self.value)
        return {"value": v, "partials": [format_cplx(p) for p in self.partials],
                "radii": list(self.radii)}


def trace_exact(f: AlgebraElement, kmin: int, kmax: int) -> CplxRat:
    """``sum_{k=kmin..kmax} <k| f |k>`` in exact arithmetic."""
    if f.has_derivatives():
        raise ValueError("trace needs a derivative-free element")
    q = f.q
    total = CplxRat(0)
    for (a, b, _, _), v in f.items():
        if a:
            continue
        s = sum((q ** (b * k) for k in range(kmin, kmax + 1)), Fraction(0))
        total = total + v * s
    return total


def _trace_coeff(c, kmin, kmax) -> CplxRat:
    if isinstance(c, DoubledElement):
        return trace_exact(c.first, kmin, kmax) + trace_exact(c.second, kmin, kmax)
    return trace_exact(c, kmin, kmax)


def _center(w) -> int:
    return (w.kmin + w.kmax) // 2


def _classify(c, w) -> TraceResult:
    m = c.band()
    center = _center(w)
    partials = [_trace_coeff(c, center - r + m, center + r - m) for r in RADII]
    mags = [abs(complex(p)) for p in partials]
    grows = all(mags[i + 1] > GROWTH * mags[i] and mags[i] > 0 for i in range(len(mags) - 1))
    value = "divergent" if grows else _trace_coeff(c, w.kmin + m, w.kmax - m)
    return TraceResult(value, partials, RADII, w)


def integrate(omega: FormElement, w) -> TraceResult:
    """``∫ f theta = Tr(f)``; doubled coefficients sum both copies."""
    if omega.degree == 2:
        return TraceResult(CplxRat(0), [CplxRat(0)] * len(RADII), RADII, w)
    if omega.basis != FRAME[omega.family]:
        raise ValueError("integrate expects a frame-basis form; convert with to_frame_basis()")
    return _classify(omega.coeff, w)


def partial_sums(omega: FormElement, center: int, radii: Sequence[int]) -> List[CplxRat]:
    """Exact ``Tr`` over ``[center - r, center + r]`` for each radius."""
    c = omega.to_frame_basis().coeff
    return [_trace_coeff(c, center - r, center + r) for r in radii]


def inner_product(f: AlgebraElement, g: AlgebraElement, w) -> TraceResult:
    """``<f|g> = Tr(f* g)``."""
    return _classify(involute(f) * g, w)


# -----------------------------------------------------------------------------
# exactness
# -----------------------------------------------------------------------------

Sparse = Dict[Tuple[int, int], CplxRat]


def _sparse(f: AlgebraElement, rows: Tuple[int, int], cols: Tuple[int, int]) -> Sparse:
    """Exact matrix entries ``<k+a| f |k>`` restricted to row and column ranges."""
    out: Sparse = {}
    q = f.q
    for (a, b, c, d), v in f.items():
        if c or d:
            raise ValueError("derivative-free element required")
        for k in range(cols[0], cols[1] + 1):
            r = k + a
            if rows[0] <= r <= rows[1]:
                out[(r, k)] = out.get((r, k), CplxRat(0)) + v * q ** (b * k)
    return out


def _matmul(A: Sparse, B: Sparse) -> Sparse:
    byrow: Dict[int, List[Tuple[int, CplxRat]]] = {}
    for (i, j), v in B.items():
        byrow.setdefault(i, []).append((j, v))
    out: Sparse = {}
    for (i, k), v in A.items():
        for j, w in byrow.get(k, ()):
            out[(i, j)] = out.get((i, j), CplxRat(0)) + v * w
    return out


def _trace(A: Sparse, lo: int, hi: int) -> CplxRat:
    return sum((v for (i, j), v in A.items() if i == j and lo <= i <= hi), CplxRat(0))


def exactness_trace_check(f: AlgebraElement, w, truncate: bool = True) -> Dict[str, object]:
    """``Tr_W([lambda_1, f])`` computed exactly.

    With ``truncate=True`` the element is cut down to the window
    (``P f P``), which has compact support, and the trace vanishes.  With
    ``truncate=False`` ``f`` acts on the whole lattice; the commutator is
    formed on an enlarged window and traced over ``W``, which leaves a
    boundary term.
    """
    lam = lambda1(f.q)
    B = 1 + f.band()
    big = (w.kmin - 2 * B, w.kmax + 2 * B)
    if truncate:
        F = _sparse(f, (w.kmin, w.kmax), (w.kmin, w.kmax))
    else:
        F = _sparse(f, big, big)
    Lm = _sparse(lam, big, big)
    comm_tr = _trace(_matmul(Lm, F), w.kmin, w.kmax) - _trace(_matmul(F, Lm), w.kmin, w.kmax)
    return {"trace": comm_tr, "passed": comm_tr == 0, "truncated": truncate,
            "window": (w.kmin, w.kmax)}


def finite_commutator_trace(f: AlgebraElement, w) -> CplxRat:
    """Trace of the commutator of the two window-truncated matrices; always 0."""
    lam = lambda1(f.q)
    rng = (w.kmin, w.kmax)
    F = _sparse(f, rng, rng)
    Lm = _sparse(lam, rng, rng)
    return _trace(_matmul(Lm, F), *rng) - _trace(_matmul(F, Lm), *rng)
