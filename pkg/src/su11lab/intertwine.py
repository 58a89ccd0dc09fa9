"""Cross-sector transport and the full-line realisation of x and p.

Sector states are realised on the half line as

    psi_n^(k)(x) = (-1)^n sqrt(2 n! / Gamma(n+2k)) x^(2k-1/2) exp(-x^2/2) L_n^(2k-1)(x^2)

The ``(-1)^n`` makes ``K+`` act with positive amplitudes, matching the
algebraic basis.  After ``t = x^2`` every overlap becomes a generalised
Gauss-Laguerre integral that is exact at finite order.  All approximation
in cross-sector objects comes from truncating the overlap matrix ``S``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import mpmath
import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import gammaln

from .conformal import conformal_triple
from .matcore import (ConditionError, DomainError, OperatorMatrix, Window, commutator,
                      diagonal, eigh_sorted, expm_nilpotent, identity, map_tag,
                      matfun_hermitian, window_defect)
from .records import ResidualRecord, Tier
from .su11 import Sector
from .timeops import K_FREE, Kind, TimeOperator, commutator_defect, t_harmonic, t_minimal

COND_CAP = 1e8


def sector_tag(k: float, N: int) -> str:
    return Sector(k, N).tag


# --- Laguerre functions and quadrature --------------------------------------------------

def laguerre_functions(k: float, t, N: int) -> np.ndarray:
    """Rows ``phi_n(t) = (-1)^n sqrt(n!/Gamma(n+2k)) t^(k-1/2) e^(-t/2) L_n^(2k-1)(t)``.

    Evaluated by the three-term recurrence of the normalised functions with a
    running per-node log scale so that large ``t`` neither over- nor
    underflows.  ``psi_m psi_n dx = phi_m phi_n dt`` after ``t = x^2``.
    """
    a = 2 * k - 1
    t = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.zeros((N, t.size))
    logs = (k - 0.5) * np.log(t) - 0.5 * t - 0.5 * gammaln(2 * k)
    prev = np.zeros_like(t)
    cur = np.ones_like(t)
    out[0] = np.exp(logs)
    for n in range(N - 1):
        nxt = -((2 * n + a + 1 - t) * cur + math.sqrt(n * (n + a)) * prev) / math.sqrt((n + 1) * (n + a + 1))
        prev, cur = cur, nxt
        big = np.abs(cur) > 1e150
        if big.any():
            sc = np.where(big, np.abs(cur), 1.0)
            cur, prev, logs = cur / sc, prev / sc, logs + np.log(sc)
        out[n + 1] = cur * np.exp(logs)
    return out


def gauss_laguerre(order: int, alpha: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and modified weights for ``int t^alpha e^-t f(t) dt``.

    Returns ``(t, W)`` with ``W_i = lambda_i t_i^(-alpha) e^(t_i)`` so that
    ``sum_i W_i phi(t_i) chi(t_i)`` integrates products of Laguerre
    functions directly.  ``W`` comes from the Christoffel function of the
    normalised functions, which stays accurate where the ordinary weights
    underflow.
    """
    n = np.arange(order)
    t = eigh_tridiagonal(2 * n + alpha + 1, np.sqrt(n[1:] * (n[1:] + alpha)), eigvals_only=True)
    F = laguerre_functions((alpha + 1) / 2, t, order)
    return t, 1.0 / np.sum(F * F, axis=0)


# --- overlaps -------------------------------------------------------------------------

class OverlapMethod(str, Enum):
    GAMMA_SUM = "gamma_sum"
    QUADRATURE = "quadrature"


@dataclass(frozen=True)
class OverlapMatrix:
    """``S[m, n] = <psi_m^(k0) | psi_n^(k)>``; rows in ``k0``, columns in ``k``."""
    S: OperatorMatrix
    method: OverlapMethod
    k0: float
    k: float

    def transfer(self) -> OperatorMatrix:
        """``S(k <- k0)``: maps ``k0``-sector coefficients to ``k``-sector ones."""
        return self.S.adjoint()


def _laguerre_coefficients(n: int, a) -> list:
    """Power-series coefficients of ``L_n^(a)(t)``: ``(-1)^i C(n+a, n-i) / i!``."""
    return [(-1) ** i * mpmath.binomial(n + a, n - i) / mpmath.factorial(i) for i in range(n + 1)]


def overlap_gamma_sum(k0: float, k: float, N: int, dps: int = 60) -> np.ndarray:
    """Overlaps from both expanded Laguerre polynomials and Gamma integrals.

    ``S_mn = c_m c_n sum_ij a_i b_j Gamma(k0 + k + i + j)`` with ``c`` the
    normalisations.  The alternating sums cancel heavily, so they are
    accumulated at ``dps`` decimal digits instead of in log-Gamma form;
    cost grows like ``N^4``.
    """
    with mpmath.workdps(dps):
        k0m, km = mpmath.mpf(k0), mpmath.mpf(k)
        s = k0m + km
        G = [mpmath.gamma(s + i) for i in range(2 * N)]
        A = [_laguerre_coefficients(m, 2 * k0m - 1) for m in range(N)]
        B = [_laguerre_coefficients(n, 2 * km - 1) for n in range(N)]
        c0 = [mpmath.sqrt(mpmath.factorial(m) / mpmath.gamma(m + 2 * k0m)) for m in range(N)]
        c1 = [mpmath.sqrt(mpmath.factorial(n) / mpmath.gamma(n + 2 * km)) for n in range(N)]
        # inner sums over j depend only on (n, i); fixed summation order
        inner = [[mpmath.fsum(b * G[i + j] for j, b in enumerate(B[n])) for i in range(N)]
                 for n in range(N)]
        out = np.empty((N, N))
        for m in range(N):
            for n in range(N):
                tot = mpmath.fsum(a * inner[n][i] for i, a in enumerate(A[m]))
                out[m, n] = float((-1) ** (m + n) * c0[m] * c1[n] * tot)
        return out


def overlap_quadrature(k0: float, k: float, N: int, order: int | None = None) -> np.ndarray:
    order = order or 2 * N + 32
    t, W = gauss_laguerre(order, k + k0 - 1)
    return (laguerre_functions(k0, t, N) * W) @ laguerre_functions(k, t, N).T


def overlap_matrix(k0: float, k: float, N: int, method: str = "quadrature",
                   order: int | None = None, verify: bool = True) -> OverlapMatrix:
    if not (k0 > 0 and k > 0):
        raise ValueError("Bargmann indices must be positive")
    if N < 4:
        raise ValueError("N must be >= 4")
    method = OverlapMethod(method)
    tag = map_tag(sector_tag(k0, N), sector_tag(k, N))
    if k == k0:
        return OverlapMatrix(OperatorMatrix(np.eye(N), tag), method, k0, k)
    if method is OverlapMethod.GAMMA_SUM:
        S = overlap_gamma_sum(k0, k, N)
    else:
        order = order or 2 * N + 32
        S = overlap_quadrature(k0, k, N, order)
        if verify:
            S2 = overlap_quadrature(k0, k, N, 2 * order)
            gap = float(np.abs(S - S2).max())
            if gap > 1e-10:
                raise ArithmeticError(f"quadrature order {order} insufficient: doubling moved S by {gap:.3e}")
    return OverlapMatrix(OperatorMatrix(S, tag), method, k0, k)


# --- intertwiners ---------------------------------------------------------------------

class IntertwinerKind(str, Enum):
    U_PHASE = "U_phase"
    U1_NILPOTENT = "U1_nilpotent"


@dataclass(frozen=True)
class Intertwiner:
    matrix: OperatorMatrix
    kind: IntertwinerKind
    k: float
    k0: float
    transfer: OperatorMatrix


def phase_matrix(kappa: float, theta: float, N: int) -> OperatorMatrix:
    n = np.arange(N)
    return diagonal(np.exp(1j * theta * (n + kappa)), sector_tag(kappa, N))


def unitary_U(k: float, k0: float, N: int) -> Intertwiner:
    """``U = exp(-i pi K3) exp(i pi K3^0)`` carried between sectors by ``S``."""
    Sk = overlap_matrix(k0, k, N).transfer()
    if k == k0:
        U = identity(N, sector_tag(k, N))
    else:
        U = phase_matrix(k, -math.pi, N) @ Sk @ phase_matrix(k0, math.pi, N)
    return Intertwiner(U, IntertwinerKind.U_PHASE, k, k0, Sk)


def unitarity_defect(u: Intertwiner, w: Window) -> ResidualRecord:
    U = u.matrix
    UdU = U.adjoint() @ U
    UUd = U @ U.adjoint()
    a = window_defect(UdU, UdU.identity(), w)
    b = window_defect(UUd, UUd.identity(), w)
    return ResidualRecord("unitarity", Tier.CONVERGENT, a,
                          {"UdagU": a, "UUdag": b, "M": w.M, "N": U.dim})


def row_norms(u: Intertwiner, rows: int) -> np.ndarray:
    S = u.transfer.entries
    return np.sqrt(np.sum(np.abs(S[:rows]) ** 2, axis=1))


def intertwiner_U1(k: float, k0: float, N: int) -> Intertwiner:
    """``U1 = exp(-K-) exp(K-^0)`` with ``S`` joining the two sectors.

    The nilpotent factors are exact, but their entries grow polynomially
    along each row while ``S`` decays only algebraically, so leading entries
    of ``U1`` keep growing with ``N`` (``|U1_00| ~ sqrt(N)`` at ``k0 = 3/4``,
    ``k = 5/4``).  Downstream residuals are diagnostics, not convergence tests.
    """
    Sk = overlap_matrix(k0, k, N).transfer()
    if k == k0:
        U1 = identity(N, sector_tag(k, N))
    else:
        left = expm_nilpotent(-Sector(k, N).generators.Kminus)
        right = expm_nilpotent(Sector(k0, N).generators.Kminus)
        U1 = left @ Sk @ right
    return Intertwiner(U1, IntertwinerKind.U1_NILPOTENT, k, k0, Sk)


def windowed_inverse(Sk: OperatorMatrix, m_inv: int | None = None) -> OperatorMatrix:
    """Inverse of the leading ``m_inv`` block of ``S(k <- k0)``, zero elsewhere.

    The tail columns of a truncated overlap are meaningless, so the full
    matrix is never inverted.
    """
    N = Sk.dim
    m_inv = m_inv or N // 2
    B = Sk.entries[:m_inv, :m_inv]
    cond = float(np.linalg.cond(B))
    if not np.isfinite(cond) or cond > COND_CAP:
        raise ConditionError(f"windowed overlap block has condition {cond:.3e} > {COND_CAP:.0e}")
    out = np.zeros((N, N), dtype=complex)
    out[:m_inv, :m_inv] = np.linalg.inv(B)
    return OperatorMatrix(out, map_tag(Sk.domain, Sk.codomain))


def inverse(u: Intertwiner, m_inv: int | None = None) -> OperatorMatrix:
    if u.k == u.k0:
        return u.matrix.adjoint() if u.kind is IntertwinerKind.U_PHASE else u.matrix
    N = u.matrix.dim
    Sinv = windowed_inverse(u.transfer, m_inv)
    if u.kind is IntertwinerKind.U_PHASE:
        return phase_matrix(u.k0, -math.pi, N) @ Sinv @ phase_matrix(u.k, math.pi, N)
    left = expm_nilpotent(-Sector(u.k0, N).generators.Kminus)
    right = expm_nilpotent(Sector(u.k, N).generators.Kminus)
    return left @ Sinv @ right


def transport_defect(u: Intertwiner, A_from: OperatorMatrix, A_to: OperatorMatrix,
                     w: Window, m_inv: int | None = None) -> ResidualRecord:
    """Windowed ``U A_from U^dagger - A_to`` (or ``U1 A_from U1^{-1} - A_to``)."""
    if u.kind is IntertwinerKind.U_PHASE:
        moved = u.matrix @ A_from @ u.matrix.adjoint()
        tier = Tier.CONVERGENT
    else:
        moved = u.matrix @ A_from @ inverse(u, m_inv)
        tier = Tier.REPORT_ONLY
    d = window_defect(moved, A_to, w, relative=True)
    return ResidualRecord("transport", tier, d, {"M": w.M, "N": u.matrix.dim, "kind": u.kind.value})


def transport_trend(k: float, k0: float, dims: Sequence[int], w: Window,
                    which: str = "H") -> ResidualRecord:
    """N-trend of the ``U`` transport of ``H0 -> H`` or ``T0 -> T``."""
    rows = []
    for N in dims:
        u = unitary_U(k, k0, N)
        t0 = conformal_triple(Sector(k0, N))
        t1 = conformal_triple(Sector(k, N))
        if which == "H":
            A_from, A_to = t0.H, t1.H
        elif which == "T":
            A_from, A_to = t_minimal(t0).matrix, t_minimal(t1).matrix
        else:
            raise ValueError(f"unknown transport target {which!r}")
        rows.append({"N": N, "residual": transport_defect(u, A_from, A_to, w).residual})
    res = [r["residual"] for r in rows]
    monotone = all(b < a for a, b in zip(res, res[1:]))
    tier = Tier.CONVERGENT if which == "H" else Tier.REPORT_ONLY
    return ResidualRecord(f"transport_{which}", tier, res[-1],
                          {"monotone": monotone, "M": w.M, "k": k, "k0": k0}, rows)


def u1_intertwining(k: float, k0: float, omega: float, dims: Sequence[int], w: Window) -> ResidualRecord:
    """Windowed ``H_CS U1 - U1 H_h`` relative to ``|U1 H_h|``, with its N-trend.

    A similarity cannot map ``{2w(n+k0)}`` onto ``{2w(n+k)}`` in finite
    dimensions, so this residual is not expected to vanish.
    """
    rows = []
    for N in dims:
        u = intertwiner_U1(k, k0, N)
        Hcs = diagonal(2 * omega * (np.arange(N) + k), sector_tag(k, N))
        Hh = diagonal(2 * omega * (np.arange(N) + k0), sector_tag(k0, N))
        rhs = u.matrix @ Hh
        rows.append({"N": N, "residual": window_defect(Hcs @ u.matrix, rhs, w, relative=True)})
    return ResidualRecord("u1_intertwining", Tier.REPORT_ONLY, rows[-1]["residual"],
                          {"omega": omega, "M": w.M}, rows)


def t_cs(k: float, k0: float, omega: float, N: int, m_inv: int | None = None) -> TimeOperator:
    if k0 != K_FREE:
        raise ValueError(f"T_CS is built from the k0 = 3/4 sector, got k0={k0}")
    if not omega > 0:
        raise DomainError(f"omega must be positive, got {omega}")
    Th = t_harmonic(Sector(k0, N), omega).matrix
    u = intertwiner_U1(k, k0, N)
    T = Th if k == k0 else u.matrix @ Th @ inverse(u, m_inv)
    return TimeOperator(T, Kind.T_CS, {"omega": omega, "k": k, "k0": k0})


def t_cs_report(k: float, omega: float, dims: Sequence[int], w: Window) -> ResidualRecord:
    rows = []
    for N in dims:
        T = t_cs(k, K_FREE, omega, N)
        Hcs = diagonal(2 * omega * (np.arange(N) + k), sector_tag(k, N))
        rows.append({"N": N,
                     "minus_i": commutator_defect(Hcs, T, w, Tier.REPORT_ONLY, +1).residual,
                     "plus_i": commutator_defect(Hcs, T, w, Tier.REPORT_ONLY, -1).residual})
    return ResidualRecord("t_cs", Tier.REPORT_ONLY, rows[-1]["minus_i"],
                          {"omega": omega, "k": k, "M": w.M}, rows)


# --- full-line oscillator realisation ----------------------------------------------------

@dataclass(frozen=True)
class FockLine:
    N: int
    x: OperatorMatrix
    p: OperatorMatrix
    H0line: OperatorMatrix
    Dline: OperatorMatrix
    Kline: OperatorMatrix


def fock_line(N: int) -> FockLine:
    if N % 2:
        raise ValueError("N must be even: truncated p is singular for odd N")
    if N < 2:
        raise ValueError("N must be >= 2")
    tag = f"fockline:N={N}"
    n = np.arange(N - 1)
    amp = np.sqrt((n + 1) / 2)
    x = np.zeros((N, N))
    x[n, n + 1] = x[n + 1, n] = amp
    p = np.zeros((N, N), dtype=complex)
    p[n + 1, n] = 1j * amp
    p[n, n + 1] = -1j * amp
    X, P = OperatorMatrix(x, tag), OperatorMatrix(p, tag)
    return FockLine(N, X, P, P @ P * 0.5, (X @ P + P @ X) * -0.25, X @ X * 0.5)


def t0_forms(f: FockLine) -> tuple[OperatorMatrix, OperatorMatrix]:
    """``(H0^{-1/2} D H0^{-1/2}, -(x p^{-1} + p^{-1} x)/2)``."""
    Hm = matfun_hermitian(f.H0line, "inv_sqrt")
    pinv = matfun_hermitian(f.p, lambda lam: 1.0 / lam)
    return Hm @ f.Dline @ Hm, (f.x @ pinv + pinv @ f.x) * -0.5


def t0_forms_agreement(f: FockLine, p_min: float, w: Window) -> ResidualRecord:
    """Windowed difference of the two T0 forms on ``|p| >= p_min``."""
    if not p_min > 0:
        raise ValueError("p_min must be positive")
    dec = eigh_sorted(f.p)
    keep = np.abs(dec.eigenvalues) >= p_min
    if not keep.any():
        raise ValueError(f"no eigenvalue of p clears p_min={p_min}")
    V = dec.vectors[:, keep]
    P = OperatorMatrix(V @ V.conj().T, f.p.basis_tag)
    A, B = t0_forms(f)
    d = window_defect(P @ A @ P, P @ B @ P, w)
    comm = commutator_defect(f.H0line, TimeOperator(B, Kind.T0_SECTOR), w, Tier.REPORT_ONLY).residual
    return ResidualRecord("t0_forms", Tier.REPORT_ONLY, d,
                          {"p_min": p_min, "kept": int(keep.sum()), "commutator_form_b": comm, "M": w.M})


def t0_forms_table(dims: Sequence[int], p_mins: Sequence[float], w: Window) -> ResidualRecord:
    rows = []
    for N in dims:
        f = fock_line(N)
        for pm in p_mins:
            r = t0_forms_agreement(f, pm, w)
            rows.append({"N": N, "p_min": pm, "residual": r.residual,
                         "commutator_form_b": r.components["commutator_form_b"]})
    return ResidualRecord("t0_forms", Tier.REPORT_ONLY, rows[-1]["residual"], {"M": w.M}, rows)
