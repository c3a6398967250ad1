"""Session parameters shared by the symbolic and numerical layers."""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

from .exactnum import CplxRat, make_q, z_of


@dataclass(frozen=True)
class Params:
    """Deformation parameter and the free constants of the calculi.

    Defaults: ``q = 3/2``, ``alpha = alphabar = 1``, ``beta = 1``,
    ``betabar = -1``.  The constants ``gamma`` and ``gammabar`` are tied to
    ``beta`` and ``betabar``.
    """

    q: Fraction = Fraction(3, 2)
    alpha: CplxRat = CplxRat(1)
    alphabar: CplxRat = CplxRat(1)
    beta: CplxRat = CplxRat(1)
    betabar: CplxRat = CplxRat(-1)

    def __post_init__(self):
        q = Fraction(self.q)
        make_q(q.numerator, q.denominator)
        object.__setattr__(self, "q", q)
        for name in ("alpha", "alphabar", "beta", "betabar"):
            object.__setattr__(self, name, CplxRat.of(getattr(self, name)))

    @property
    def z(self) -> Fraction:
        return z_of(self.q)

    @property
    def gamma(self) -> CplxRat:
        return self.beta

    @property
    def gammabar(self) -> CplxRat:
        return self.betabar

    def with_(self, **kw) -> "Params":
        return replace(self, **kw)
