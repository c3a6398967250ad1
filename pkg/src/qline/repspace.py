"""Truncated Hilbert-space representations on a window of basis vectors |k>.

The stencils are

* ``x|k> = q^k |k>``, ``L|k> = |k+1>``, ``y|k> = k|k>`` (``z k`` in
  laboratory units)
* ``dx|k> = alpha q^(k+1) |k+1>``, ``dbar x|k> = alphabar q^k |k-1>``
* ``d1|k> = -z^-1 q^(-k-1) |k> + z^-1 beta q^-k |k-1>``
* ``db1|k> = z^-1 q^-k |k> + z^-1 betabar q^(-k-1) |k+1>``

In open mode the shift is truncated and rows within ``margin`` of either
edge are not trusted.  In cyclic mode the shift wraps and is unitary.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np

from .algebra import AlgebraElement, DoubledElement
from .exactnum import z_of
from .params import Params

GENERATOR_NAMES = ("x", "x^-1", "L", "L^-1", "y", "dx", "dbarx", "d1", "db1", "exp_iky")


@dataclass(frozen=True)
class Window:
    """Basis labels ``kmin..kmax`` inclusive."""

    kmin: int = -16
    kmax: int = 16
    mode: str = "open"
    q: Fraction = Fraction(3, 2)
    units: str = "planck"

    def __post_init__(self):
        if self.kmax - self.kmin < 8:
            raise ValueError("window needs kmax - kmin >= 8")
        if self.mode not in ("open", "cyclic"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.units not in ("planck", "laboratory"):
            raise ValueError(f"unknown units {self.units!r}")
        if self.mode == "cyclic" and self.dim % 2 == 0:
            raise ValueError("cyclic windows need an odd dimension")
        object.__setattr__(self, "q", Fraction(self.q))

    @classmethod
    def centered(cls, center: int, halfwidth: int, **kw) -> "Window":
        return cls(center - halfwidth, center + halfwidth, **kw)

    @property
    def dim(self) -> int:
        return self.kmax - self.kmin + 1

    @property
    def ks(self) -> np.ndarray:
        return np.arange(self.kmin, self.kmax + 1)

    @property
    def cyclic(self) -> bool:
        return self.mode == "cyclic"

    def index(self, k: int) -> int:
        if not self.kmin <= k <= self.kmax:
            raise IndexError(f"k={k} outside window [{self.kmin}, {self.kmax}]")
        return k - self.kmin

    def basis(self, k: int) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[self.index(k)] = 1.0
        return v

    def to_json(self) -> dict:
        return {"kmin": self.kmin, "kmax": self.kmax, "mode": self.mode,
                "q": str(self.q), "units": self.units}


@dataclass(frozen=True, eq=False)
class TruncatedRep:
    """Dense complex matrix on a window plus band and margin metadata."""

    matrix: np.ndarray
    window: Window
    band: Tuple[int, int] = (0, 0)
    margin: int = 0

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    # validity --------------------------------------------------------------
    def valid_rows(self, margin: Optional[int] = None) -> slice:
        m = self.margin if margin is None else margin
        if self.window.cyclic:
            return slice(0, self.window.dim)
        if 2 * m >= self.window.dim:
            raise ValueError("window too small for requested band: no valid rows")
        return slice(m, self.window.dim - m)

    # algebra ---------------------------------------------------------------
    def _check(self, other: "TruncatedRep"):
        if other.window != self.window:
            raise ValueError("window mismatch")

    def __matmul__(self, other):
        if isinstance(other, TruncatedRep):
            self._check(other)
            band = (self.band[0] + other.band[0], self.band[1] + other.band[1])
            if self.window.cyclic:
                band = (min(band[0], self.window.dim - 1), min(band[1], self.window.dim - 1))
            return TruncatedRep(self.matrix @ other.matrix, self.window, band,
                                self.margin + other.margin)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, TruncatedRep):
            return self @ other
        return TruncatedRep(self.matrix * complex(other), self.window, self.band, self.margin)

    def __rmul__(self, other):
        return TruncatedRep(self.matrix * complex(other), self.window, self.band, self.margin)

    def __add__(self, other):
        if isinstance(other, TruncatedRep):
            self._check(other)
            band = (max(self.band[0], other.band[0]), max(self.band[1], other.band[1]))
            return TruncatedRep(self.matrix + other.matrix, self.window, band,
                                max(self.margin, other.margin))
        return self + identity(self.window) * other

    __radd__ = __add__

    def __neg__(self):
        return TruncatedRep(-self.matrix, self.window, self.band, self.margin)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers need an explicit inverse")
        out = identity(self.window)
        for _ in range(n):
            out = out @ self
        return out

    def adjoint(self) -> "TruncatedRep":
        return TruncatedRep(self.matrix.conj().T, self.window,
                            (self.band[1], self.band[0]), self.margin)

    def apply(self, v: np.ndarray) -> np.ndarray:
        return self.matrix @ v

    def column(self, k: int) -> np.ndarray:
        return self.matrix[:, self.window.index(k)]

    def entry(self, row_k: int, col_k: int) -> complex:
        return self.matrix[self.window.index(row_k), self.window.index(col_k)]

    # export ----------------------------------------------------------------
    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["row", "col", "re", "im"])
        rows, cols = np.nonzero(self.matrix)
        for r, c in zip(rows, cols):
            val = self.matrix[r, c]
            w.writerow([int(r) + self.window.kmin, int(c) + self.window.kmin,
                        f"{val.real:.12e}", f"{val.imag:.12e}"])
        return buf.getvalue()

    def to_json(self) -> dict:
        rows, cols = np.nonzero(self.matrix)
        return {
            "window": self.window.to_json(),
            "band": list(self.band),
            "margin": self.margin,
            "entries": [
                [int(r) + self.window.kmin, int(c) + self.window.kmin,
                 float(self.matrix[r, c].real), float(self.matrix[r, c].imag)]
                for r, c in zip(rows, cols)
            ],
        }


@dataclass(frozen=True, eq=False)
class DoubledRep:
    """Operator on two copies of the window; the star swaps and adjoints."""

    first: TruncatedRep
    second: TruncatedRep

    @property
    def window(self) -> Window:
        return self.first.window

    @property
    def margin(self) -> int:
        return max(self.first.margin, self.second.margin)

    def _lift(self, other):
        if isinstance(other, DoubledRep):
            return other
        if isinstance(other, TruncatedRep):
            return DoubledRep(other, other)
        return None

    def __matmul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return DoubledRep(self.first @ o.first, self.second @ o.second)

    def __mul__(self, other):
        o = self._lift(other)
        if o is not None:
            return self @ o
        if isinstance(other, tuple):
            return DoubledRep(self.first * other[0], self.second * other[1])
        return DoubledRep(self.first * other, self.second * other)

    def __rmul__(self, other):
        if isinstance(other, tuple):
            return DoubledRep(self.first * other[0], self.second * other[1])
        return DoubledRep(self.first * other, self.second * other)

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            if isinstance(other, tuple):
                return DoubledRep(self.first + other[0], self.second + other[1])
            return DoubledRep(self.first + other, self.second + other)
        return DoubledRep(self.first + o.first, self.second + o.second)

    __radd__ = __add__

    def __neg__(self):
        return DoubledRep(-self.first, -self.second)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __pow__(self, n: int):
        return DoubledRep(self.first**n, self.second**n)

    def star(self) -> "DoubledRep":
        """Twisted adjoint ``(A, B)* = (B^dagger, A^dagger)``."""
        return DoubledRep(self.second.adjoint(), self.first.adjoint())

    def block(self) -> np.ndarray:
        n = self.window.dim
        out = np.zeros((2 * n, 2 * n), dtype=complex)
        out[:n, :n] = self.first.matrix
        out[n:, n:] = self.second.matrix
        return out


Rep = Union[TruncatedRep, DoubledRep]


# -----------------------------------------------------------------------------
# stencils
# -----------------------------------------------------------------------------

def _shift(w: Window, a: int) -> np.ndarray:
    """Matrix of ``L^a``: ``|k> -> |k+a>`` (wrapping in cyclic mode)."""
    n = w.dim
    if w.cyclic:
        return np.roll(np.eye(n, dtype=complex), a, axis=0)
    return np.eye(n, k=-a, dtype=complex)


def _band_of_shift(a: int) -> Tuple[int, int]:
    return (a, 0) if a >= 0 else (0, -a)


def identity(w: Window) -> TruncatedRep:
    return TruncatedRep(np.eye(w.dim, dtype=complex), w, (0, 0), 0)


def shift(w: Window, a: int = 1) -> TruncatedRep:
    return TruncatedRep(_shift(w, a), w, _band_of_shift(a), abs(a))


def diag(w: Window, values: Sequence[complex]) -> TruncatedRep:
    return TruncatedRep(np.diag(np.asarray(values, dtype=complex)), w, (0, 0), 0)


def x_power(w: Window, b: int) -> TruncatedRep:
    qf = float(w.q)
    return diag(w, qf ** (b * w.ks.astype(float)))


def y_values(w: Window) -> np.ndarray:
    ks = w.ks.astype(float)
    return ks * float(z_of(w.q)) if w.units == "laboratory" else ks


def rep_generator(name: str, w: Window, params: Optional[Params] = None,
                  wavenumber: Optional[float] = None) -> TruncatedRep:
    """Matrix of a single generator with its exact stencil.

    ``exp_iky`` always uses integer ``y`` (Planck units).
    """
    p = params or Params(q=w.q)
    if p.q != w.q:
        raise ValueError("params.q and window.q differ")
    qf = float(w.q)
    zi = 1.0 / float(z_of(w.q))
    ks = w.ks.astype(float)
    if name == "x":
        return x_power(w, 1)
    if name == "x^-1":
        return x_power(w, -1)
    if name == "L":
        return shift(w, 1)
    if name == "L^-1":
        return shift(w, -1)
    if name == "y":
        return diag(w, y_values(w))
    if name == "exp_iky":
        if wavenumber is None:
            raise ValueError("exp_iky needs a wavenumber")
        return diag(w, np.exp(1j * wavenumber * ks))
    if name == "dx":
        return TruncatedRep(_shift(w, 1) @ np.diag(complex(p.alpha) * qf ** (ks + 1)), w, (1, 0), 1)
    if name == "dbarx":
        return TruncatedRep(_shift(w, -1) @ np.diag(complex(p.alphabar) * qf**ks), w, (0, 1), 1)
    if name == "d1":
        m = np.diag(-zi * qf ** (-ks - 1)) + _shift(w, -1) @ np.diag(zi * complex(p.beta) * qf ** (-ks))
        return TruncatedRep(m, w, (0, 1), 1)
    if name == "db1":
        m = np.diag(zi * qf ** (-ks)) + _shift(w, 1) @ np.diag(zi * complex(p.betabar) * qf ** (-ks - 1))
        return TruncatedRep(m, w, (1, 0), 1)
    raise ValueError(f"unknown generator {name!r}; known: {', '.join(GENERATOR_NAMES)}")


def rep_of(f, w: Window, params: Optional[Params] = None) -> Rep:
    """Matrix image of an algebra or doubled element.

    Each monomial ``L^a x^b d1^c db1^d`` maps to the product of the
    generator matrices; derivative powers use the stencils above.
    """
    if isinstance(f, DoubledElement):
        return DoubledRep(rep_of(f.first, w, params), rep_of(f.second, w, params))
    if not isinstance(f, AlgebraElement):
        raise TypeError(f"cannot represent {type(f).__name__}")
    p = params or Params(q=w.q)
    if f.q != w.q:
        raise ValueError("element q and window q differ")
    reach = f.band()
    if not w.cyclic and 2 * reach >= w.dim:
        raise ValueError("window too small for requested band")
    out = TruncatedRep(np.zeros((w.dim, w.dim), dtype=complex), w, (0, 0), 0)
    d1 = rep_generator("d1", w, p)
    db1 = rep_generator("db1", w, p)
    for (a, b, c, d), v in f.items():
        m = shift(w, a) @ x_power(w, b)
        if c:
            m = m @ d1**c
        if d:
            m = m @ db1**d
        out = out + complex(v) * m
    return TruncatedRep(out.matrix, w, out.band, max(out.margin, reach))


# -----------------------------------------------------------------------------
# square roots and residuals
# -----------------------------------------------------------------------------

def _circulant(col: np.ndarray) -> np.ndarray:
    n = len(col)
    idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    return col[idx]


def unitary_sqrt(u: TruncatedRep) -> TruncatedRep:
    """Principal square root of a cyclic shift power via the DFT.

    Circulant matrices are diagonal in the Fourier basis; the principal
    branch ``np.sqrt`` keeps each eigenphase in ``(-pi/2, pi/2]``.
    """
    if not u.window.cyclic:
        raise ValueError("unitary_sqrt needs a cyclic window (the open shift is not unitary)")
    m = u.matrix
    col = m[:, 0]
    if not np.allclose(_circulant(col), m, atol=1e-14):
        raise ValueError("input is not circulant")
    eig = np.fft.fft(col)
    if not np.allclose(np.abs(eig), 1.0, atol=1e-12):
        raise ValueError("input is not unitary")
    root = np.fft.ifft(np.sqrt(eig))
    n = u.window.dim
    return TruncatedRep(_circulant(root), u.window, (n - 1, n - 1), 0)


@dataclass(frozen=True)
class ProbeSpec:
    """Gaussian probe family; widths are fractions of the window size."""

    width_frac: float = 1 / 8
    centers: Optional[Tuple[float, ...]] = None
    count: int = 3

    def vectors(self, w: Window, margin: int) -> Iterable[np.ndarray]:
        n = w.dim
        width = max(self.width_frac * n, 1.0)
        if self.centers is not None:
            centers = [c - w.kmin for c in self.centers]
        else:
            mid = (n - 1) / 2
            spread = 0.25 * (n - 1 - 2 * margin) if not w.cyclic else 0.25 * (n - 1)
            centers = [mid] if self.count <= 1 else list(np.linspace(mid - spread / 2, mid + spread / 2, self.count))
        idx = np.arange(n)
        for c in centers:
            v = np.exp(-0.5 * ((idx - c) / width) ** 2).astype(complex)
            if not w.cyclic and margin:
                v[:margin] = 0
                v[n - margin:] = 0
            nv = np.linalg.norm(v)
            if nv == 0:
                raise ValueError("empty valid interior")
            yield v / nv


def interior_residual(A: Rep, B: Rep, probes: Optional[ProbeSpec] = None,
                      method: str = "probe") -> float:
    """Max over probes of ``||(A - B) v|| / ||v||`` restricted to valid rows.

    ``method="rows"`` returns the operator 2-norm of the valid rows instead.
    """
    if isinstance(A, DoubledRep) or isinstance(B, DoubledRep):
        A = A if isinstance(A, DoubledRep) else DoubledRep(A, A)
        B = B if isinstance(B, DoubledRep) else DoubledRep(B, B)
        return max(interior_residual(A.first, B.first, probes, method),
                   interior_residual(A.second, B.second, probes, method))
    if A.window != B.window:
        raise ValueError("window mismatch")
    diff = A - B
    margin = diff.margin
    rows = diff.valid_rows(margin)
    if method == "rows":
        sub = diff.matrix[rows, :]
        return float(np.linalg.norm(sub, 2)) if sub.size else 0.0
    probes = probes or ProbeSpec()
    best = 0.0
    for v in probes.vectors(A.window, margin):
        r = diff.matrix @ v
        best = max(best, float(np.linalg.norm(r[rows])))
    return best


def export_json(rep: TruncatedRep) -> str:
    return json.dumps(rep.to_json())
