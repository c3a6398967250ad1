"""Phase space of the discretized oscillator and its perturbative spectrum.

All operators live on a cyclic window centred near ``k0 = round(z^-2)``,
where the vacuum of the first copy concentrates.  The second copy's vacuum
sits near ``-k0``; it is computed on the mirrored window.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import repspace as rs
from .params import Params

Z_SWEEP = (0.2, 0.1, 0.05)
TARGETS = (1 / 6, 1 / math.sqrt(2), -1 / math.sqrt(6))
KAPPA = 3.0


class IllConditionedSpan(ValueError):
    pass


def q_of_z(z: float) -> Fraction:
    """Inverse of ``z = (q-1)/q``, exact for decimal ``z``."""
    zf = Fraction(str(z))
    return 1 / (1 - zf)


def min_halfwidth(z: float) -> int:
    return math.ceil(8 / z - 1e-9)


@dataclass(eq=False)
class PhaseSpaceOps:
    y: rs.DoubledRep
    p_y: rs.DoubledRep
    h: rs.DoubledRep
    a: rs.DoubledRep
    a_star: rs.DoubledRep
    h_invsqrt: rs.DoubledRep
    b: rs.DoubledRep
    b_star: rs.DoubledRep
    N: rs.DoubledRep
    H: rs.DoubledRep
    z: float
    include_cr: bool
    window: rs.Window

    @property
    def one(self) -> rs.DoubledRep:
        I = rs.identity(self.window)
        return rs.DoubledRep(I, I)

    def probes(self) -> rs.ProbeSpec:
        """One Gaussian at the centre, ten widths from the wrap."""
        w = self.window
        hw = (w.kmax - w.kmin) / 2
        return rs.ProbeSpec(width_frac=hw / 10 / w.dim, centers=((w.kmin + w.kmax) / 2,), count=1)


def dressed(a: rs.DoubledRep, a_star: rs.DoubledRep, h_invsqrt: rs.DoubledRep, z: float,
            quarter: bool = True, cubic: bool = True) -> rs.DoubledRep:
    """``b = h^-1/2 a + z^2 a / 4 + z^2 (a - a*)^3 / 6``; flags drop the corrections."""
    b = h_invsqrt @ a
    if quarter:
        b = b + a * (z * z / 4)
    if cubic:
        d = a - a_star
        b = b + (d @ d @ d) * (z * z / 6)
    return b


def build_phase_space(z: float, halfwidth: Optional[int] = None, include_cr: bool = False,
                      mirrored: bool = False, quarter: bool = True, cubic: bool = True) -> PhaseSpaceOps:
    """Operators on the cyclic window ``k0 +- halfwidth`` (``-k0`` when mirrored).

    ``halfwidth`` counts lattice sites and must be at least ``8/z``.
    """
    if not 0 < z <= 0.25:
        raise ValueError("z must lie in (0, 0.25]")
    hw = min_halfwidth(z) if halfwidth is None else int(halfwidth)
    if hw < min_halfwidth(z):
        raise ValueError(f"halfwidth {hw} too small to contain the vacuum support (< 8/z = {8 / z:g})")
    k0 = round(1 / (z * z))
    center = -k0 if mirrored else k0
    q = q_of_z(z)
    w = rs.Window(center - hw, center + hw, "cyclic", q)
    zi = 1 / z
    L, Li = rs.shift(w, 1), rs.shift(w, -1)
    yv = rs.diag(w, z * w.ks.astype(float))
    y = rs.DoubledRep(yv, yv)
    p_y = rs.DoubledRep(L * (1j * zi), Li * (-1j * zi))
    h = rs.DoubledRep(L, Li)
    a = (y + p_y * 1j) * (1 / math.sqrt(2))
    a_star = a.star()
    h_invsqrt = rs.DoubledRep(rs.unitary_sqrt(L).adjoint(), rs.unitary_sqrt(Li).adjoint())
    b = dressed(a, a_star, h_invsqrt, z, quarter, cubic)
    b_star = b.star()
    N = b_star @ b
    if include_cr:
        from .fields import c_R
        c1, c2 = c_R(Params(q=q))
        e = rs.DoubledRep(L * (-zi), Li * zi) + (rs.identity(w) * float(c1), rs.identity(w) * float(c2))
        H = (-(e @ e) + y @ y) * 0.5
    else:
        H = (p_y @ p_y + y @ y) * 0.5
    return PhaseSpaceOps(y, p_y, h, a, a_star, h_invsqrt, b, b_star, N, H, z, include_cr, w)


def _comm(A, B):
    return A @ B - B @ A


def identity_residuals(ops: PhaseSpaceOps) -> Dict[str, float]:
    """Exact lattice identities ``[p_y, y] = -ih``, ``[a, a*] = h``,
    ``[a, h] = z^2 (a* - a) / 2`` and ``H = a* a + h/2``."""
    pr = ops.probes()
    z = ops.z
    return {
        "cr": rs.interior_residual(_comm(ops.p_y, ops.y), ops.h * (-1j), pr),
        "a-a*": rs.interior_residual(_comm(ops.a, ops.a_star), ops.h, pr),
        "a-h": rs.interior_residual(_comm(ops.a, ops.h), (ops.a_star - ops.a) * (z * z / 2), pr),
        "H": rs.interior_residual(ops.H, ops.a_star @ ops.a + ops.h * 0.5, pr),
    }


def _block(rep: rs.DoubledRep, which: int) -> rs.TruncatedRep:
    return rep.first if which == 1 else rep.second


def _block_residual(A: rs.DoubledRep, B: rs.DoubledRep, which: int, probes) -> float:
    return rs.interior_residual(_block(A, which), _block(B, which), probes)


def dressing_residual(ops: PhaseSpaceOps, which: int = 1) -> float:
    """Probe residual of ``[b, b*] - 1`` in the given copy."""
    return _block_residual(_comm(ops.b, ops.b_star), ops.one, which, ops.probes())


def number_residual(ops: PhaseSpaceOps, which: int = 1, undressed: bool = False) -> float:
    """Probe residual of ``[N, h] - z^2 ((b*)^2 - b^2) / 2``; ``undressed`` uses ``a``."""
    b, bs = (ops.a, ops.a_star) if undressed else (ops.b, ops.b_star)
    N = bs @ b
    rhs = (bs @ bs - b @ b) * (ops.z ** 2 / 2)
    return _block_residual(_comm(N, ops.h), rhs, which, ops.probes())


def fit_exponent(zs: Sequence[float], rs_: Sequence[float]) -> float:
    """Log-log least-squares slope of ``r`` against ``z``."""
    zs = np.asarray(zs, float)
    r = np.asarray(rs_, float)
    if len(zs) < 3:
        raise ValueError("need at least 3 z values")
    if np.any(r <= 0):
        return float("inf") if np.all(r == 0) else float("nan")
    slope, _ = np.polyfit(np.log(zs), np.log(r), 1)
    return float(slope)


@dataclass
class NumberStates:
    which: int
    vacuum: np.ndarray
    states: List[np.ndarray]
    smin: float
    smin_rel: float
    gap: float
    degenerate: bool
    outside_mass: float

    def gram(self) -> np.ndarray:
        S = np.array(self.states).T
        return S.conj().T @ S


def vacuum_and_number_states(ops: PhaseSpaceOps, nmax: int = 5, which: int = 1) -> NumberStates:
    """Vacuum as the smallest right singular vector of ``b`` in one copy and
    ``|n> = (b*)^n |0> / sqrt(n!)`` without re-orthonormalization."""
    if nmax > 8 or nmax < 0:
        raise ValueError("nmax must lie in [0, 8]")
    B = _block(ops.b, which).matrix
    Bs = _block(ops.b_star, which).matrix
    _, s, vh = np.linalg.svd(B)
    v0 = vh[-1].conj()
    phase = v0[np.argmax(np.abs(v0))]
    v0 = v0 * (abs(phase) / phase)
    states = [v0]
    cur = v0
    for n in range(1, nmax + 1):
        cur = Bs @ cur
        states.append(cur / math.sqrt(math.factorial(n)))
    gap = float(s[-2] - s[-1]) if len(s) > 1 else float("inf")
    k0 = round(1 / ops.z ** 2) * (1 if which == 1 else -1)
    outside = np.abs(ops.window.ks - k0) > 6 / ops.z
    return NumberStates(which, v0, states, float(s[-1]), float(s[-1] / s[0]), gap, gap < 1e-10,
                        float(np.sum(np.abs(v0[outside]) ** 2)))


@dataclass
class Coefficients:
    z: float
    c: np.ndarray
    out_of_span: float
    condition: float
    gram: np.ndarray

    def errors(self) -> Dict[str, float]:
        z2 = self.z ** 2
        out = {"c0": abs(self.c[0] - 0.5)}
        for n, t in enumerate(TARGETS, start=1):
            out[f"c{n}"] = abs(self.c[n] / z2 - t)
        return out

    def within_bounds(self) -> Dict[str, bool]:
        err = self.errors()
        z = self.z
        ok = {"c0": err["c0"] <= 5 * KAPPA * z ** 4}
        for n in (1, 2, 3):
            ok[f"c{n}"] = err[f"c{n}"] <= 5 * KAPPA * z ** 2
        return ok


def spectrum_coefficients(ops: PhaseSpaceOps, states: NumberStates) -> Coefficients:
    """Least-squares expansion of ``H|0>`` in ``span{|0>..|nmax>}``."""
    if len(states.states) < 6:
        raise ValueError("need nmax >= 5")
    S = np.array(states.states).T
    cond = float(np.linalg.cond(S))
    if not np.isfinite(cond) or cond > 1e8:
        raise IllConditionedSpan(f"number-state span condition {cond:.3e} exceeds 1e8")
    Hv = _block(ops.H, states.which).matrix @ states.vacuum
    c, *_ = np.linalg.lstsq(S, Hv, rcond=None)
    resid = float(np.linalg.norm(S @ c - Hv))
    return Coefficients(ops.z, c, resid, cond, S.conj().T @ S)


def mirror_residual(plus: PhaseSpaceOps, minus: PhaseSpaceOps) -> float:
    """``|| b_2(-window) + P b_1(+window) P ||`` with ``P: k -> -k``."""
    b1 = plus.b.first.matrix
    b2 = minus.b.second.matrix
    Pb1P = b1[::-1, ::-1]
    return float(np.max(np.abs(b2 + Pb1P)))


# -----------------------------------------------------------------------------
# sweep
# -----------------------------------------------------------------------------

@dataclass
class ZPoint:
    z: float
    halfwidth: int
    identities: Dict[str, float]
    dressing: Dict[int, float]
    dressing_undressed: float
    dressing_no_cubic: float
    number: Dict[int, float]
    number_undressed: float
    vacuum: Dict[int, dict]
    coefficients: Dict[int, Optional[Coefficients]]
    coefficient_error: Dict[int, str]
    mirror: float


def _vac_json(ns: NumberStates) -> dict:
    return {"smin": ns.smin, "smin_rel": ns.smin_rel, "gap": ns.gap,
            "degenerate": ns.degenerate, "outside_mass": ns.outside_mass}


def analyse_z(z: float, halfwidth: Optional[int] = None, nmax: int = 5) -> ZPoint:
    plus = build_phase_space(z, halfwidth)
    minus = build_phase_space(z, halfwidth, mirrored=True)
    blocks = {1: plus, 2: minus}
    idr = {k: max(identity_residuals(plus)[k], identity_residuals(minus)[k])
           for k in ("cr", "a-a*", "a-h", "H")}
    bare = build_phase_space(z, halfwidth, quarter=False, cubic=False)
    nocubic = build_phase_space(z, halfwidth, cubic=False)
    vac, coeffs, cerr = {}, {}, {}
    for which, ops in blocks.items():
        ns = vacuum_and_number_states(ops, nmax, which)
        vac[which] = _vac_json(ns)
        try:
            coeffs[which] = spectrum_coefficients(ops, ns)
        except IllConditionedSpan as exc:
            coeffs[which] = None
            cerr[which] = str(exc)
    return ZPoint(
        z=z, halfwidth=plus.window.kmax - round(1 / z ** 2),
        identities=idr,
        dressing={w: dressing_residual(o, w) for w, o in blocks.items()},
        dressing_undressed=dressing_residual(bare, 1),
        dressing_no_cubic=dressing_residual(nocubic, 1),
        number={w: number_residual(o, w) for w, o in blocks.items()},
        number_undressed=number_residual(plus, 1, undressed=True),
        vacuum=vac, coefficients=coeffs, coefficient_error=cerr,
        mirror=mirror_residual(plus, minus),
    )


def worker_count(n_jobs: int) -> int:
    env = os.environ.get("QLINE_THREADS")
    cap = int(env) if env else (os.cpu_count() or 1)
    return max(1, min(cap, n_jobs))


@dataclass
class OscillatorReport:
    points: List[ZPoint]
    exponents: Dict[str, float] = field(default_factory=dict)

    @property
    def zs(self) -> List[float]:
        return [p.z for p in self.points]

    def coefficient_checks(self) -> Dict[str, bool]:
        """Bounds at each z and strict improvement as z decreases, first copy."""
        out = {}
        prev = None
        ok_bounds, ok_mono = True, True
        for p in sorted(self.points, key=lambda p: -p.z):
            c = p.coefficients.get(1)
            if c is None:
                ok_bounds = ok_mono = False
                continue
            ok_bounds &= all(c.within_bounds().values())
            err = c.errors()
            if prev is not None:
                ok_mono &= all(err[k] < prev[k] for k in err)
            prev = err
        out["bounds"] = ok_bounds
        out["improving"] = ok_mono
        return out

    def passed(self) -> Dict[str, bool]:
        ident = all(v <= 1e-12 for p in self.points for v in p.identities.values())
        cc = self.coefficient_checks()
        return {
            "identities": ident,
            "dressing exponent": self.exponents.get("dressing", 0) >= 3.5,
            "number exponent": self.exponents.get("number", 0) >= 3.5,
            "coefficients": cc["bounds"] and cc["improving"],
        }

    def to_json(self) -> dict:
        coeffs = []
        for p in self.points:
            for which, c in p.coefficients.items():
                entry = {"z": p.z, "block": which}
                if c is None:
                    entry["error"] = p.coefficient_error.get(which)
                else:
                    entry.update({f"c{n}": [float(c.c[n].real), float(c.c[n].imag)] for n in range(4)})
                    entry.update({"out_of_span": c.out_of_span, "condition": c.condition,
                                  "gram": [[[float(v.real), float(v.imag)] for v in row] for row in c.gram]})
                coeffs.append(entry)
        return {
            "z": self.zs,
            "residuals": {
                "identities": [p.identities for p in self.points],
                "dressing": [{str(k): v for k, v in p.dressing.items()} for p in self.points],
                "dressing_undressed": [p.dressing_undressed for p in self.points],
                "dressing_no_cubic": [p.dressing_no_cubic for p in self.points],
                "number": [{str(k): v for k, v in p.number.items()} for p in self.points],
                "number_undressed": [p.number_undressed for p in self.points],
                "mirror": [p.mirror for p in self.points],
            },
            "vacuum": [{str(k): v for k, v in p.vacuum.items()} for p in self.points],
            "exponents": self.exponents,
            "coefficients": coeffs,
            "passed": self.passed(),
        }


def run_sweep(zs: Sequence[float] = Z_SWEEP, halfwidth: Optional[int] = None,
              nmax: int = 5) -> OscillatorReport:
    """Analyse each ``z`` concurrently; results are ordered by ``z``."""
    zs = sorted(set(float(z) for z in zs), reverse=True)
    hw = lambda z: None if halfwidth is None else max(halfwidth, min_halfwidth(z))
    with ThreadPoolExecutor(max_workers=worker_count(len(zs))) as ex:
        points = list(ex.map(lambda z: analyse_z(z, hw(z), nmax), zs))
    rep = OscillatorReport(points)
    if len(zs) >= 3:
        rep.exponents = {
            "dressing": fit_exponent(zs, [p.dressing[1] for p in points]),
            "dressing_undressed": fit_exponent(zs, [p.dressing_undressed for p in points]),
            "dressing_no_cubic": fit_exponent(zs, [p.dressing_no_cubic for p in points]),
            "number": fit_exponent(zs, [p.number[1] for p in points]),
            "number_undressed": fit_exponent(zs, [p.number_undressed for p in points]),
        }
    return rep
