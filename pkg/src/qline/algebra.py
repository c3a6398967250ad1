"""Normal-ordering kernel for the q-deformed line.

Every element is a finite sum of monomials ``coeff * L^a x^b d1^c db1^d``
where ``L`` is the dilatator, ``x`` the coordinate, ``d1`` and ``db1`` the
two twisted derivatives.  Products are renormal-ordered with the rules

* ``x L = q L x``
* ``d1 L = q^-1 L d1``,  ``db1 L = q^-1 L db1``
* ``d1 x^n = q^n x^n d1 + [n]_q x^(n-1)``
* ``db1 x^n = q^-n x^n db1 + [n]_(1/q) x^(n-1)``

There is no rule that moves ``db1`` to the right of ``d1``; products that
need one raise :class:`NoExchangeRule`.  Use :func:`eliminate_derivatives`
first in that case.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Iterator, Mapping, Sequence, Tuple, Union

from .exactnum import CplxRat, format_cplx, qint, z_of

Key = Tuple[int, int, int, int]

GENERATORS = ("L", "x", "d1", "db1")


class NoExchangeRule(ValueError):
    """Raised when a product needs ``db1`` moved past ``d1``."""

    def __init__(self):
        super().__init__(
            "no exchange rule for db1 before d1; eliminate derivatives first "
            "(normal_order(..., mode='eliminate') or eliminate_derivatives)"
        )


# -----------------------------------------------------------------------------
# monomial product
# -----------------------------------------------------------------------------

def _apply_d1(q: Fraction, terms: Dict[Key, Fraction]) -> Dict[Key, Fraction]:
    out: Dict[Key, Fraction] = {}
    for (e, f, g, h), v in terms.items():
        v = v * q ** (-e)
        k1 = (e, f, g + 1, h)
        out[k1] = out.get(k1, 0) + v * q**f
        n = qint(q, f)
        if n:
            k2 = (e, f - 1, g, h)
            out[k2] = out.get(k2, 0) + v * n
    return out


def _apply_db1(q: Fraction, terms: Dict[Key, Fraction]) -> Dict[Key, Fraction]:
    out: Dict[Key, Fraction] = {}
    for (e, f, g, h), v in terms.items():
        v = v * q ** (-e)
        if g:
            raise NoExchangeRule()
        k1 = (e, f, g, h + 1)
        out[k1] = out.get(k1, 0) + v * q ** (-f)
        n = qint(1 / q, f)
        if n:
            k2 = (e, f - 1, g, h)
            out[k2] = out.get(k2, 0) + v * n
    return out


@lru_cache(maxsize=65536)
def _mono_mul(q: Fraction, left: Key, right: Key) -> Tuple[Tuple[Key, Fraction], ...]:
    a, b, c, d = left
    cur: Dict[Key, Fraction] = {right: Fraction(1)}
    for _ in range(d):
        cur = _apply_db1(q, cur)
    for _ in range(c):
        cur = _apply_d1(q, cur)
    out: Dict[Key, Fraction] = {}
    for (e, f, g, h), v in cur.items():
        if not v:
            continue
        k = (a + e, b + f, g, h)
        out[k] = out.get(k, 0) + v * q ** (b * e)
    return tuple((k, v) for k, v in out.items() if v)


# -----------------------------------------------------------------------------
# elements
# -----------------------------------------------------------------------------

def _coerce_terms(terms: Mapping[Key, object]) -> Dict[Key, CplxRat]:
    out: Dict[Key, CplxRat] = {}
    for k, v in terms.items():
        a, b, c, d = (int(t) for t in k)
        if c < 0 or d < 0:
            raise ValueError("derivative powers must be nonnegative")
        cv = CplxRat.of(v)
        if cv:
            key = (a, b, c, d)
            s = out.get(key, CplxRat(0)) + cv
            if s:
                out[key] = s
            else:
                out.pop(key, None)
    return out


class AlgebraElement:
    """Immutable finite sum of canonical monomials with exact coefficients."""

    __slots__ = ("q", "_terms", "_hash")

    def __init__(self, terms: Mapping[Key, object], q):
        self.q = Fraction(q)
        self._terms = _coerce_terms(terms)
        self._hash = None

    # constructors --------------------------------------------------------
    @classmethod
    def zero(cls, q) -> "AlgebraElement":
        return cls({}, q)

    @classmethod
    def one(cls, q) -> "AlgebraElement":
        return cls({(0, 0, 0, 0): 1}, q)

    @classmethod
    def scalar(cls, c, q) -> "AlgebraElement":
        return cls({(0, 0, 0, 0): c}, q)

    @classmethod
    def monomial(cls, q, a=0, b=0, c=0, d=0, coeff=1) -> "AlgebraElement":
        return cls({(a, b, c, d): coeff}, q)

    @classmethod
    def gen(cls, name: str, q, power: int = 1) -> "AlgebraElement":
        """Single generator ``L``, ``x``, ``d1`` or ``db1`` raised to ``power``."""
        idx = GENERATORS.index(name)
        key = [0, 0, 0, 0]
        key[idx] = power
        return cls({tuple(key): 1}, q)

    # accessors -----------------------------------------------------------
    @property
    def terms(self) -> Dict[Key, CplxRat]:
        return dict(self._terms)

    def items(self) -> Iterator[Tuple[Key, CplxRat]]:
        for k in sorted(self._terms):
            yield k, self._terms[k]

    def coeff(self, a=0, b=0, c=0, d=0) -> CplxRat:
        return self._terms.get((a, b, c, d), CplxRat(0))

    def is_zero(self) -> bool:
        return not self._terms

    def has_derivatives(self) -> bool:
        return any(k[2] or k[3] for k in self._terms)

    def band(self) -> int:
        """Largest shift reach ``|a|`` plus derivative stencil reach."""
        return max((abs(a) + c + d for a, _, c, d in self._terms), default=0)

    def __len__(self):
        return len(self._terms)

    # arithmetic ----------------------------------------------------------
    def _lift(self, other) -> "AlgebraElement":
        if isinstance(other, AlgebraElement):
            if other.q != self.q:
                raise ValueError(f"mismatched q: {self.q} vs {other.q}")
            return other
        return AlgebraElement.scalar(other, self.q)

    def __add__(self, other):
        if isinstance(other, DoubledElement):
            return NotImplemented
        try:
            o = self._lift(other)
        except TypeError:
            return NotImplemented
        t = dict(self._terms)
        for k, v in o._terms.items():
            t[k] = t.get(k, CplxRat(0)) + v
        return AlgebraElement(t, self.q)

    __radd__ = __add__

    def __neg__(self):
        return AlgebraElement({k: -v for k, v in self._terms.items()}, self.q)

    def __sub__(self, other):
        if isinstance(other, DoubledElement):
            return NotImplemented
        try:
            return self + (-self._lift(other))
        except TypeError:
            return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "AlgebraElement":
        c = CplxRat.of(c)
        return AlgebraElement({k: v * c for k, v in self._terms.items()}, self.q)

    def __mul__(self, other):
        if isinstance(other, DoubledElement):
            return NotImplemented
        if not isinstance(other, AlgebraElement):
            try:
                return self.scale(other)
            except TypeError:
                return NotImplemented
        o = self._lift(other)
        out: Dict[Key, CplxRat] = {}
        q = self.q
        for k1, v1 in self._terms.items():
            for k2, v2 in o._terms.items():
                v12 = v1 * v2
                for k, f in _mono_mul(q, k1, k2):
                    out[k] = out.get(k, CplxRat(0)) + v12 * f
        return AlgebraElement(out, q)

    def __rmul__(self, other):
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    def inverse(self) -> "AlgebraElement":
        """Inverse of a single derivative-free monomial."""
        if len(self._terms) != 1 or self.has_derivatives():
            raise ValueError("only single derivative-free monomials are invertible")
        ((a, b, _, _), v), = self._terms.items()
        return AlgebraElement({(-a, -b, 0, 0): v.inverse() * self.q ** (a * b)}, self.q)

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        base = self if n >= 0 else self.inverse()
        out = AlgebraElement.one(self.q)
        for _ in range(abs(n)):
            out = out * base
        return out

    def star(self) -> "AlgebraElement":
        return involute(self)

    # comparison ----------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, AlgebraElement):
            return self.q == other.q and self._terms == other._terms
        if isinstance(other, (int, Fraction, CplxRat)):
            return self._terms == AlgebraElement.scalar(other, self.q)._terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.q, frozenset(self._terms.items())))
        return self._hash

    def __str__(self):
        return serialize(self)

    def __repr__(self):
        return f"AlgebraElement({serialize(self)!r}, q={self.q})"

    def to_json(self) -> dict:
        return {
            "q": str(self.q),
            "terms": [
                {"a": a, "b": b, "c": c, "d": d, "coeff": format_cplx(v)}
                for (a, b, c, d), v in self.items()
            ],
        }


Pair = Tuple[object, object]


class DoubledElement:
    """Pair ``(f, g)`` with componentwise product and swap involution."""

    __slots__ = ("first", "second")

    def __init__(self, first: AlgebraElement, second: AlgebraElement):
        if first.q != second.q:
            raise ValueError("components must share q")
        self.first = first
        self.second = second

    @property
    def q(self) -> Fraction:
        return self.first.q

    @classmethod
    def diag(cls, f: AlgebraElement) -> "DoubledElement":
        return cls(f, f)

    @classmethod
    def scalars(cls, s1, s2, q) -> "DoubledElement":
        return cls(AlgebraElement.scalar(s1, q), AlgebraElement.scalar(s2, q))

    def _lift(self, other) -> "DoubledElement":
        if isinstance(other, DoubledElement):
            return other
        if isinstance(other, AlgebraElement):
            return DoubledElement.diag(other)
        s = AlgebraElement.scalar(other, self.q)
        return DoubledElement(s, s)

    def __add__(self, other):
        try:
            o = self._lift(other)
        except TypeError:
            return NotImplemented
        return DoubledElement(self.first + o.first, self.second + o.second)

    __radd__ = __add__

    def __neg__(self):
        return DoubledElement(-self.first, -self.second)

    def __sub__(self, other):
        try:
            o = self._lift(other)
        except TypeError:
            return NotImplemented
        return DoubledElement(self.first - o.first, self.second - o.second)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            o = self._lift(other)
        except TypeError:
            return NotImplemented
        return DoubledElement(self.first * o.first, self.second * o.second)

    def __rmul__(self, other):
        try:
            o = self._lift(other)
        except TypeError:
            return NotImplemented
        return DoubledElement(o.first * self.first, o.second * self.second)

    def __pow__(self, n: int):
        return DoubledElement(self.first**n, self.second**n)

    def star(self) -> "DoubledElement":
        return DoubledElement(involute(self.second), involute(self.first))

    def is_zero(self) -> bool:
        return self.first.is_zero() and self.second.is_zero()

    def band(self) -> int:
        return max(self.first.band(), self.second.band())

    def __eq__(self, other):
        if isinstance(other, DoubledElement):
            return self.first == other.first and self.second == other.second
        if isinstance(other, (AlgebraElement, int, Fraction, CplxRat)):
            return self == self._lift(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.first, self.second))

    def __str__(self):
        return f"({serialize(self.first)}, {serialize(self.second)})"

    def __repr__(self):
        return f"DoubledElement{self}"

    def to_json(self) -> dict:
        return {"first": self.first.to_json(), "second": self.second.to_json()}


# -----------------------------------------------------------------------------
# words
# -----------------------------------------------------------------------------

Letter = Union[str, Tuple[str, int]]

_ALIASES = {
    "L": ("L", 1), "Li": ("L", -1), "x": ("x", 1), "xi": ("x", -1),
    "d1": ("d1", 1), "db1": ("db1", 1),
}


def _letter(tok: Letter) -> Tuple[str, int]:
    if isinstance(tok, str):
        if tok not in _ALIASES:
            raise ValueError(f"unknown generator {tok!r}")
        return _ALIASES[tok]
    name, p = tok
    if name not in GENERATORS:
        raise ValueError(f"unknown generator {name!r}")
    if name in ("d1", "db1") and p < 0:
        raise ValueError("derivative symbols have no inverses")
    return name, int(p)


def normal_order(word: Sequence[Letter], q, mode: str = "derivative",
                 beta=None, betabar=None) -> AlgebraElement:
    """Canonical form of a word over ``L^±1, x^±1, d1, db1``.

    Letters are names (``"L"``, ``"Li"``, ``"x"``, ``"xi"``, ``"d1"``,
    ``"db1"``) or ``(name, power)`` pairs.

    Parameters
    ----------
    mode : {"derivative", "eliminate"}
        In ``"eliminate"`` mode each derivative is replaced by its
        expression in ``L`` and ``x`` (requires ``beta`` and ``betabar``),
        which makes mixed ``d1``/``db1`` words well defined.
    """
    q = Fraction(q)
    out = AlgebraElement.one(q)
    if mode == "eliminate":
        if beta is None or betabar is None:
            raise ValueError("eliminate mode needs beta and betabar")
        subs = {"d1": partial1(q, beta), "db1": partial1bar(q, betabar)}
    elif mode != "derivative":
        raise ValueError(f"unknown mode {mode!r}")
    for tok in word:
        name, p = _letter(tok)
        if mode == "eliminate" and name in subs:
            out = out * subs[name] ** p
        else:
            out = out * AlgebraElement.gen(name, q, p)
    return out


def _rules(q: Fraction):
    """Rewrite rules on adjacent letter pairs, used by :func:`rewrite_word`."""
    qi = 1 / q
    return {
        ("L", "Li"): [(1, ())], ("Li", "L"): [(1, ())],
        ("x", "xi"): [(1, ())], ("xi", "x"): [(1, ())],
        ("x", "L"): [(q, ("L", "x"))], ("x", "Li"): [(qi, ("Li", "x"))],
        ("xi", "L"): [(qi, ("L", "xi"))], ("xi", "Li"): [(q, ("Li", "xi"))],
        ("d1", "L"): [(qi, ("L", "d1"))], ("d1", "Li"): [(q, ("Li", "d1"))],
        ("db1", "L"): [(qi, ("L", "db1"))], ("db1", "Li"): [(q, ("Li", "db1"))],
        ("d1", "x"): [(1, ()), (q, ("x", "d1"))],
        ("d1", "xi"): [(qi, ("xi", "d1")), (-qi, ("xi", "xi"))],
        ("db1", "x"): [(1, ()), (qi, ("x", "db1"))],
        ("db1", "xi"): [(q, ("xi", "db1")), (-q, ("xi", "xi"))],
    }


def rewrite_word(word: Sequence[Letter], q, strategy: str = "leftmost") -> AlgebraElement:
    """Independent normal-ordering by string rewriting.

    Expands the word into unit letters and rewrites adjacent pairs until no
    rule applies, picking the leftmost or rightmost redex.  Used as an oracle
    for the monomial-product engine.
    """
    q = Fraction(q)
    rules = _rules(q)
    letters = []
    for tok in word:
        name, p = _letter(tok)
        unit = {"L": ("L", "Li"), "x": ("x", "xi"), "d1": ("d1",), "db1": ("db1",)}[name]
        letters.extend([unit[0] if p > 0 else unit[-1]] * abs(p))
    pending = {tuple(letters): Fraction(1)}
    done: Dict[Tuple[str, ...], Fraction] = {}
    while pending:
        w, v = pending.popitem()
        positions = [i for i in range(len(w) - 1) if (w[i], w[i + 1]) in rules]
        if not positions:
            if ("db1", "d1") in zip(w, w[1:]) or _has_late_d1(w):
                raise NoExchangeRule()
            done[w] = done.get(w, 0) + v
            continue
        i = positions[0] if strategy == "leftmost" else positions[-1]
        for c, rep in rules[(w[i], w[i + 1])]:
            nw = w[:i] + rep + w[i + 2:]
            pending[nw] = pending.get(nw, 0) + v * c
    out: Dict[Key, Fraction] = {}
    for w, v in done.items():
        if not v:
            continue
        k = (w.count("L") - w.count("Li"), w.count("x") - w.count("xi"),
             w.count("d1"), w.count("db1"))
        out[k] = out.get(k, 0) + v
    return AlgebraElement(out, q)


def _has_late_d1(w) -> bool:
    seen_db = False
    for s in w:
        if s == "db1":
            seen_db = True
        elif s == "d1" and seen_db:
            return True
    return False


# -----------------------------------------------------------------------------
# elimination, involution, derivations
# -----------------------------------------------------------------------------

def partial1(q, beta) -> AlgebraElement:
    """``d1 = z^-1 beta L^-1 x^-1 - (qz)^-1 x^-1``."""
    q = Fraction(q)
    beta = CplxRat.of(beta)
    if not beta:
        raise ValueError("beta must be nonzero")
    zi = 1 / z_of(q)
    return AlgebraElement({(-1, -1, 0, 0): beta * zi, (0, -1, 0, 0): -zi / q}, q)


def partial1bar(q, betabar) -> AlgebraElement:
    """``db1 = z^-1 betabar q^-1 L x^-1 + z^-1 x^-1``."""
    q = Fraction(q)
    betabar = CplxRat.of(betabar)
    if not betabar:
        raise ValueError("betabar must be nonzero")
    zi = 1 / z_of(q)
    return AlgebraElement({(1, -1, 0, 0): betabar * zi / q, (0, -1, 0, 0): zi}, q)


def eliminate_derivatives(f: AlgebraElement, beta, betabar) -> AlgebraElement:
    """Rewrite ``f`` without ``d1``/``db1`` using their expressions in L, x."""
    q = f.q
    d1 = partial1(q, beta)
    db1 = partial1bar(q, betabar)
    out = AlgebraElement.zero(q)
    for (a, b, c, d), v in f.items():
        term = AlgebraElement({(a, b, 0, 0): v}, q)
        if c:
            term = term * d1**c
        if d:
            term = term * db1**d
        out = out + term
    return out


def _require_plain(f: AlgebraElement, what: str):
    if f.has_derivatives():
        raise ValueError(f"{what} needs a derivative-free element; eliminate derivatives first")


def involute(f: AlgebraElement) -> AlgebraElement:
    """``(L^a x^b)* = q^(-ab) L^-a x^b``, antilinear on coefficients."""
    _require_plain(f, "involute")
    q = f.q
    return AlgebraElement({(-a, b, 0, 0): v.conj() * q ** (-a * b) for (a, b, _, _), v in f.items()}, q)


def lambda1(q) -> AlgebraElement:
    """``lambda_1 = -z^-1 L``."""
    return AlgebraElement({(1, 0, 0, 0): -1 / z_of(q)}, q)


def lambda1bar(q) -> AlgebraElement:
    """``lambdabar_1 = z^-1 L^-1``."""
    return AlgebraElement({(-1, 0, 0, 0): 1 / z_of(q)}, q)


def lambda_R1(q) -> DoubledElement:
    return DoubledElement(lambda1(q), lambda1bar(q))


def commutator(f, g):
    return f * g - g * f


def derive_e1(f: AlgebraElement) -> AlgebraElement:
    """``e1(L^a x^b) = z^-1 (q^b - 1) L^(a+1) x^b``; equals ``[lambda_1, f]``."""
    _require_plain(f, "e1")
    q = f.q
    zi = 1 / z_of(q)
    return AlgebraElement({(a + 1, b, 0, 0): v * (zi * (q**b - 1)) for (a, b, _, _), v in f.items()}, q)


def derive_e1bar(f: AlgebraElement) -> AlgebraElement:
    """``ebar1(L^a x^b) = z^-1 (1 - q^-b) L^(a-1) x^b``; equals ``[lambdabar_1, f]``."""
    _require_plain(f, "ebar1")
    q = f.q
    zi = 1 / z_of(q)
    return AlgebraElement({(a - 1, b, 0, 0): v * (zi * (1 - q ** (-b))) for (a, b, _, _), v in f.items()}, q)


def derive_eR1(F) -> DoubledElement:
    """Real derivation acting componentwise: ``(e1 f, ebar1 g)``."""
    if isinstance(F, AlgebraElement):
        F = DoubledElement.diag(F)
    return DoubledElement(derive_e1(F.first), derive_e1bar(F.second))


def sigma_inv(f: AlgebraElement) -> AlgebraElement:
    """Twist of the Leibniz rule ``d1(fg) = d1(f) g + sigma^-1(f) d1(g)``:
    ``sigma^-1(L^a x^b) = q^(b-a) L^a x^b``."""
    _require_plain(f, "sigma_inv")
    q = f.q
    return AlgebraElement({k: v * q ** (k[1] - k[0]) for k, v in f.items()}, f.q)


def apply_derivative(op: AlgebraElement, f: AlgebraElement) -> AlgebraElement:
    """Action of an operator on a function: the part of ``op * f`` free of
    trailing derivatives (equivalently, ``op * f`` acting on the constant 1)."""
    prod = op * f
    return AlgebraElement({k: v for k, v in prod.items() if not (k[2] or k[3])}, f.q)


# -----------------------------------------------------------------------------
# serialization
# -----------------------------------------------------------------------------

_NAMES = ("L", "x", "d1", "db1")


def _term_text(key: Key, v: CplxRat) -> str:
    factors = [(n, p) for n, p in zip(_NAMES, key) if p]
    if not factors:
        return _coeff_text(v)
    if v == 1 and len(factors) == 1 and factors[0][1] == 1:
        return factors[0][0]
    body = "*".join(f"{n}^{p}" for n, p in factors)
    if v == 1:
        return body
    return f"{_coeff_text(v)}*{body}"


def _coeff_text(v: CplxRat) -> str:
    if v.im != 0 and v.re != 0:
        return f"({format_cplx(v)})"
    return format_cplx(v)


def serialize(f) -> str:
    """Canonical text form; terms sorted by ``(a, b, c, d)``."""
    if isinstance(f, DoubledElement):
        return str(f)
    if f.is_zero():
        return "0"
    parts = []
    for key, v in f.items():
        neg = (v.im == 0 and v.re < 0) or (v.re == 0 and v.im < 0)
        text = _term_text(key, -v if neg else v)
        if parts:
            parts.append(("- " if neg else "+ ") + text)
        else:
            parts.append(("-" if neg else "") + text)
    return " ".join(parts)


def iter_keys(f: AlgebraElement) -> Iterable[Key]:
    return (k for k, _ in f.items())
