"""Laplacians, plane waves, dispersion, continuity and Yang-Mills quantities."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .algebra import AlgebraElement, DoubledElement, derive_e1, derive_eR1, involute
from .exactnum import CplxRat, format_cplx
from .params import Params
from .relations import e1_operator
from . import repspace as rs

LAPLACIAN_KINDS = ("realFlat", "nonLocalA", "nonLocalB")


@dataclass(frozen=True)
class LaplacianSpec:
    kind: str = "realFlat"
    include_cr: bool = True


def c_R(params: Params) -> Tuple[Fraction, Fraction]:
    """``c_R = +-z^-1 (1, -1)`` on the branch ``beta = -betabar = +-1``."""
    z = params.z
    if params.beta == 1 and params.betabar == -1:
        return (1 / z, -1 / z)
    if params.beta == -1 and params.betabar == 1:
        return (-1 / z, 1 / z)
    raise ValueError("c_R is only fixed for beta = -betabar = +-1")


def eR1_operator(w: rs.Window, params: Optional[Params] = None, include_cr: bool = True) -> rs.DoubledRep:
    """Matrix of ``e_R1 = lambda_R1 (+ c_R)``."""
    p = params or Params(q=w.q)
    zi = 1 / float(p.z)
    L, Li = rs.shift(w, 1), rs.shift(w, -1)
    op = rs.DoubledRep(L * (-zi), Li * zi)
    if include_cr:
        c1, c2 = c_R(p)
        op = op + (rs.identity(w) * float(c1), rs.identity(w) * float(c2))
    return op


def nonlocal_laplacian_element(kind: str, params: Params) -> AlgebraElement:
    """``-q L^-2 x^-2 e1^2 + s L^-1 x^-2 e1`` with ``s = q`` (A) or 1 (B);
    ``e1`` is the operator ``z^-1 gamma + lambda_1``."""
    q = params.q
    e1 = e1_operator(params)
    Li2x2 = AlgebraElement.monomial(q, -2, -2)
    Lix2 = AlgebraElement.monomial(q, -1, -2)
    s = q if kind == "nonLocalA" else 1
    return -(q * Li2x2 * e1 * e1) + s * Lix2 * e1


def laplacian(spec: LaplacianSpec, w: rs.Window, params: Optional[Params] = None):
    """Matrix of the requested Laplacian."""
    p = params or Params(q=w.q)
    if spec.kind == "realFlat":
        e = eR1_operator(w, p, spec.include_cr)
        return -(e @ e)
    if spec.kind in ("nonLocalA", "nonLocalB"):
        return rs.rep_of(nonlocal_laplacian_element(spec.kind, p), w, p)
    raise ValueError(f"unknown Laplacian {spec.kind!r}")


def apply_nonlocal_laplacian(kind: str, psi: AlgebraElement) -> AlgebraElement:
    """Action on a function: ``-q L^-2 x^-2 e1(e1 psi) + s L^-1 x^-2 e1 psi``
    with ``e1`` the derivation."""
    q = psi.q
    s = q if kind == "nonLocalA" else 1
    e = derive_e1(psi)
    return (-(q * AlgebraElement.monomial(q, -2, -2) * derive_e1(e))
            + s * AlgebraElement.monomial(q, -1, -2) * e)


# -----------------------------------------------------------------------------
# plane waves and dispersion
# -----------------------------------------------------------------------------

def plane_wave_identity(k: float, w: Optional[rs.Window] = None,
                        params: Optional[Params] = None) -> Dict[str, float]:
    """Residuals of

    * ``e1 E = z^-1 (e^{ik} - 1) L E``
    * ``eb1 E = z^-1 (1 - e^{-ik}) L^-1 E``
    * ``e_R1 E = ik L E`` with the literal ``L = (1/2ikz)(...)`` and with
      the componentwise ``L = (1/ikz)(...)``

    for ``E = e^{iky}`` in Planck units; derivations are matrix commutators.
    """
    p = params or Params()
    w = w or rs.Window(-16, 16, "open", p.q, "planck")
    zi = 1 / float(p.z)
    E = rs.rep_generator("exp_iky", w, p, wavenumber=k)
    L, Li = rs.shift(w, 1), rs.shift(w, -1)
    lam, lamb = L * (-zi), Li * zi
    e1E = lam @ E - E @ lam
    eb1E = lamb @ E - E @ lamb
    ph = np.exp(1j * k)
    rhs1 = (L @ E) * (zi * (ph - 1))
    rhs2 = (Li @ E) * (zi * (1 - 1 / ph))
    out = {"e1": rs.interior_residual(e1E, rhs1, method="rows"),
           "eb1": rs.interior_residual(eb1E, rhs2, method="rows")}
    eR = rs.DoubledRep(e1E, eb1E)
    comp = rs.DoubledRep(rhs1, rhs2)
    out["eR1 componentwise"] = rs.interior_residual(eR, comp, method="rows")
    out["eR1 literal"] = rs.interior_residual(eR, comp * 0.5, method="rows")
    return out


@dataclass
class DispersionCurve:
    k: np.ndarray
    E: np.ndarray
    m: float
    phonon: Optional[np.ndarray] = None

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["k", "E", "E_phonon"])
        ph = self.phonon if self.phonon is not None else np.full_like(self.k, np.nan)
        for a, b, c in zip(self.k, self.E, ph):
            wr.writerow([f"{a:.12e}", f"{b:.12e}", f"{c:.12e}"])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {"m": self.m, "k": self.k.tolist(), "E": self.E.tolist(),
                "E_phonon": None if self.phonon is None else self.phonon.tolist()}

    def argmax(self) -> Tuple[float, float]:
        i = int(np.argmax(self.E))
        return float(self.k[i]), float(self.E[i])


def dispersion_scan(m: float, kmax: float = np.pi, samples: int = 100,
                    phonon: bool = True) -> DispersionCurve:
    """``E(k) = sqrt(m^2 + sin^2 k)`` on ``[0, kmax]``.

    The grid is ``linspace(0, kmax, samples)`` with ``pi/2`` added when it
    lies in range, so the maximum is sampled exactly.  Duplicate points are
    merged.  The overlay is the phonon branch ``|sin(k/2)|``.
    """
    if m < 0:
        raise ValueError("mass must be nonnegative")
    if samples < 2:
        raise ValueError("need at least 2 samples")
    if kmax > np.pi or kmax < 0:
        raise ValueError("kmax must lie in [0, pi]")
    ks = np.linspace(0.0, kmax, samples)
    if kmax >= np.pi / 2:
        ks = np.append(ks, np.pi / 2)
    ks = np.unique(ks)
    E = np.sqrt(m * m + np.sin(ks) ** 2)
    ph = np.abs(np.sin(ks / 2)) if phonon else None
    return DispersionCurve(ks, E, float(m), ph)


def surrogate_L(k: float, z: float) -> float:
    """Small-z form of ``L``: ``z^-1 sin(k)/k``."""
    return (np.sin(k) / k if k else 1.0) / z


# -----------------------------------------------------------------------------
# continuity
# -----------------------------------------------------------------------------

def _i_over_2m(m) -> CplxRat:
    m = Fraction(m)
    if m == 0:
        raise ValueError("mass must be nonzero")
    return CplxRat(0, 1 / (2 * m))


@dataclass
class ContinuityReport:
    passed: bool
    lhs: str
    rhs: str
    residual: str

    def to_json(self) -> dict:
        return {"passed": self.passed, "lhs": self.lhs, "rhs": self.rhs, "residual": self.residual}


def verify_continuity(psi: AlgebraElement, m=1) -> ContinuityReport:
    """Exact check of ``d_t rho = e_R1 J`` in the doubled algebra with
    ``d_t Psi = (i/2m) e_R1^2 Psi``, ``rho = Psi* Psi`` and
    ``J = (i/2m)(Psi* e_R1 Psi - e_R1(Psi*) Psi)``."""
    if psi.has_derivatives():
        raise ValueError("psi must be derivative-free")
    c = _i_over_2m(m)
    P = DoubledElement.diag(psi)
    Ps = P.star()
    ePsi = derive_eR1(P)
    Pdot = derive_eR1(ePsi) * AlgebraElement.scalar(c, psi.q)
    lhs = Pdot.star() * P + Ps * Pdot
    J = (Ps * ePsi - derive_eR1(Ps) * P) * AlgebraElement.scalar(c, psi.q)
    rhs = derive_eR1(J)
    res = lhs - rhs
    return ContinuityReport(res.is_zero(), str(lhs), str(rhs), str(res))


def _twisted_partial(f: AlgebraElement) -> AlgebraElement:
    """``d1`` acting on a function: ``L^-1 x^-1 e1 f``."""
    return AlgebraElement.monomial(f.q, -1, -1) * derive_e1(f)


def nonlocal_continuity(psi: AlgebraElement, m=1) -> ContinuityReport:
    """Check ``d_t rho = (i/2m) q L^-1 d1(psi* L d1 psi - L d1(psi*) psi)``
    with ``i d_t psi = (1/2m) Delta_B psi``; ``d1`` acts on functions."""
    if psi.has_derivatives():
        raise ValueError("psi must be derivative-free")
    q = psi.q
    c = _i_over_2m(m)
    ps = involute(psi)
    psidot = apply_nonlocal_laplacian("nonLocalB", psi).scale(-c)
    lhs = involute(psidot) * psi + ps * psidot
    L = AlgebraElement.gen("L", q)
    inner = ps * L * _twisted_partial(psi) - L * _twisted_partial(ps) * psi
    rhs = (q * AlgebraElement.gen("L", q, -1) * _twisted_partial(inner)).scale(c)
    res = lhs - rhs
    return ContinuityReport(res.is_zero(), str(lhs), str(rhs), str(res))


# -----------------------------------------------------------------------------
# Schrodinger evolution
# -----------------------------------------------------------------------------

@dataclass
class EvolutionReport:
    state: np.ndarray
    j_norms: np.ndarray
    drift: float
    plain_norm_drift: float


def j_form(psi: np.ndarray) -> complex:
    """Conserved pairing of the two copies: ``psi1^† psi2 + psi2^† psi1``."""
    n = psi.size // 2
    a, b = psi[:n], psi[n:]
    return np.vdot(a, b) + np.vdot(b, a)


def schrodinger_step(psi: np.ndarray, dt: float, m: float, steps: int,
                     w: rs.Window, params: Optional[Params] = None,
                     record_every: int = 0) -> EvolutionReport:
    """Cayley stepping of ``i d_t psi = (1/2m) Delta_R psi`` on both copies.

    The real Laplacian satisfies ``(Delta_2^†, Delta_1^†) = (Delta_1, Delta_2)``,
    so the Cayley map preserves :func:`j_form` exactly up to rounding.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if m == 0:
        raise ValueError("mass must be nonzero")
    p = params or Params(q=w.q)
    A = laplacian(LaplacianSpec("realFlat", True), w, p).block() / (2 * m)
    n2 = A.shape[0]
    I = np.eye(n2)
    U = np.linalg.solve(I + 0.5j * dt * A, I - 0.5j * dt * A)
    v = np.asarray(psi, dtype=complex).copy()
    j0 = j_form(v)
    n0 = np.linalg.norm(v)
    norms = [j0]
    for s in range(steps):
        v = U @ v
        if record_every and (s + 1) % record_every == 0:
            norms.append(j_form(v))
    jn = j_form(v)
    norms.append(jn)
    scale = abs(j0) if abs(j0) > 0 else 1.0
    drift = float(abs(jn - j0) / scale)
    pdrift = float(abs(np.linalg.norm(v) - n0) / (n0 if n0 else 1.0))
    return EvolutionReport(v, np.array(norms), drift, pdrift)


def gaussian_state(w: rs.Window, center: Optional[float] = None, width: Optional[float] = None,
                   k: float = 0.0) -> np.ndarray:
    """``(g, g)`` with ``g`` a Gaussian on the window, optionally modulated by ``e^{iky}``."""
    ks = w.ks.astype(float)
    c = (w.kmin + w.kmax) / 2 if center is None else center
    s = w.dim / 16 if width is None else width
    g = np.exp(-0.5 * ((ks - c) / s) ** 2) * np.exp(1j * k * ks)
    g /= np.linalg.norm(g)
    return np.concatenate([g, g])


# -----------------------------------------------------------------------------
# Yang-Mills
# -----------------------------------------------------------------------------

Pair = Tuple[np.ndarray, np.ndarray]


@dataclass
class GaugeConfig:
    """Time samples of ``A_t`` and ``A_R1`` as pairs of ``(rN x rN)`` arrays."""

    At: List[Pair]
    AR1: List[Pair]
    dt: float
    window: rs.Window
    rank: int = 1
    psi: Optional[List[Pair]] = None

    def __post_init__(self):
        if len(self.At) != len(self.AR1) or len(self.At) < 2:
            raise ValueError("need matching At/AR1 samples, at least 2")
        n = self.window.dim * self.rank
        for A in list(self.At) + list(self.AR1) + list(self.psi or []):
            if A[0].shape != (n, n) or A[1].shape != (n, n):
                raise ValueError("window mismatch across samples")

    @staticmethod
    def from_reps(At: Sequence[rs.DoubledRep], AR1: Sequence[rs.DoubledRep], dt: float) -> "GaugeConfig":
        w = At[0].window
        for A in list(At) + list(AR1):
            if A.window != w:
                raise ValueError("window mismatch across samples")
        conv = lambda A: (np.array(A.first.matrix), np.array(A.second.matrix))
        return GaugeConfig([conv(A) for A in At], [conv(A) for A in AR1], dt, w)


def _lambda_R(w: rs.Window, rank: int, params: Params) -> Pair:
    zi = 1 / float(params.z)
    I = np.eye(rank)
    L = rs.shift(w, 1).matrix
    Li = rs.shift(w, -1).matrix
    return (np.kron(L * (-zi), I), np.kron(Li * zi, I))


def _comm(a: Pair, b: Pair) -> Pair:
    return (a[0] @ b[0] - b[0] @ a[0], a[1] @ b[1] - b[1] @ a[1])


def _tstar(a: Pair) -> Pair:
    return (a[1].conj().T, a[0].conj().T)


def field_strength(cfg: GaugeConfig, params: Optional[Params] = None) -> List[Pair]:
    """``F = d_t A_R1 - e_R1 A_t + [A_t, A_R1]`` at interior time samples."""
    p = params or Params(q=cfg.window.q)
    lam = _lambda_R(cfg.window, cfg.rank, p)
    out = []
    for t in range(1, len(cfg.At) - 1):
        dA = tuple((cfg.AR1[t + 1][c] - cfg.AR1[t - 1][c]) / (2 * cfg.dt) for c in (0, 1))
        eAt = _comm(lam, cfg.At[t])
        cm = _comm(cfg.At[t], cfg.AR1[t])
        out.append(tuple(dA[c] - eAt[c] + cm[c] for c in (0, 1)))
    if len(cfg.At) == 2:
        dA = tuple((cfg.AR1[1][c] - cfg.AR1[0][c]) / cfg.dt for c in (0, 1))
        eAt = _comm(lam, cfg.At[0])
        cm = _comm(cfg.At[0], cfg.AR1[0])
        out.append(tuple(dA[c] - eAt[c] + cm[c] for c in (0, 1)))
    return out


def yang_mills(cfg: GaugeConfig, params: Optional[Params] = None) -> Dict[str, object]:
    """``S_YM = 1/4 sum_t dt Tr(F F)`` and the matter action
    ``S_M = sum_t dt Tr(D_t psi* D_t psi + D_R1 psi* D_R1 psi)``."""
    p = params or Params(q=cfg.window.q)
    F = field_strength(cfg, p)
    sym = 0.25 * cfg.dt * sum(np.trace(f[0] @ f[0]) + np.trace(f[1] @ f[1]) for f in F)
    sm = 0.0
    if cfg.psi is not None:
        lam = _lambda_R(cfg.window, cfg.rank, p)
        for t in range(1, len(cfg.psi) - 1):
            ps = cfg.psi[t]
            Dt = tuple((cfg.psi[t + 1][c] - cfg.psi[t - 1][c]) / (2 * cfg.dt)
                       + cfg.At[t][c] @ ps[c] for c in (0, 1))
            eps = _comm(lam, ps)
            DR = tuple(eps[c] + cfg.AR1[t][c] @ ps[c] for c in (0, 1))
            Dts, DRs = _tstar(Dt), _tstar(DR)
            sm += cfg.dt * sum(np.trace(Dts[c] @ Dt[c] + DRs[c] @ DR[c]) for c in (0, 1))
    return {"F": F, "S_YM": complex(sym), "S_M": complex(sm)}


def gauge_transform(cfg: GaugeConfig, g: np.ndarray, params: Optional[Params] = None) -> GaugeConfig:
    """``A -> g^-1 A g + g^-1 d g`` for a time-independent unitary ``g(x)``
    embedded diagonally in both copies."""
    p = params or Params(q=cfg.window.q)
    gi = g.conj().T
    G = (g, g)
    Gi = (gi, gi)
    lam = _lambda_R(cfg.window, cfg.rank, p)
    eg = _comm(lam, G)
    At = [(Gi[0] @ A[0] @ G[0], Gi[1] @ A[1] @ G[1]) for A in cfg.At]
    AR = [(Gi[0] @ A[0] @ G[0] + Gi[0] @ eg[0], Gi[1] @ A[1] @ G[1] + Gi[1] @ eg[1]) for A in cfg.AR1]
    psi = None if cfg.psi is None else [(Gi[0] @ s[0], Gi[1] @ s[1]) for s in cfg.psi]
    return GaugeConfig(At, AR, cfg.dt, cfg.window, cfg.rank, psi)


def random_diagonal_unitary(w: rs.Window, rank: int, rng: np.random.Generator) -> np.ndarray:
    """Block-diagonal unitary ``g(x)``: one random ``rank x rank`` unitary per site."""
    n = w.dim
    out = np.zeros((n * rank, n * rank), dtype=complex)
    for i in range(n):
        m = rng.normal(size=(rank, rank)) + 1j * rng.normal(size=(rank, rank))
        qm, r = np.linalg.qr(m)
        qm = qm * (np.diag(r) / np.abs(np.diag(r)))
        out[i * rank:(i + 1) * rank, i * rank:(i + 1) * rank] = qm
    return out


def random_config(w: rs.Window, rank: int, samples: int, dt: float,
                  rng: np.random.Generator, with_psi: bool = True) -> GaugeConfig:
    n = w.dim * rank

    def rnd():
        return (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / np.sqrt(n)

    At = [(rnd(), rnd()) for _ in range(samples)]
    AR = [(rnd(), rnd()) for _ in range(samples)]
    psi = [(rnd(), rnd()) for _ in range(samples)] if with_psi else None
    return GaugeConfig(At, AR, dt, w, rank, psi)


def vacuum_vectors(w: rs.Window) -> Dict[str, float]:
    """``(L - 1) sum_k a_k |k> = 0`` and ``(L^-1 - 1) sum_k abar_k |k> = 0``
    for ``a_k = abar_k = 1``; returns the max residual entries."""
    v = np.ones(w.dim, dtype=complex)
    L, Li = rs.shift(w, 1).matrix, rs.shift(w, -1).matrix
    return {"a": float(np.max(np.abs(L @ v - v))), "abar": float(np.max(np.abs(Li @ v - v)))}
