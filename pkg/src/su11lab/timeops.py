"""Time operators conjugate to the conformal Hamiltonian.

Constructions:

* ``T(omega) = -(i/2 omega) exp(omega K) K+w (K3w + k)^{-1} exp(-omega K)``
* the minimal Hermitian ``T = H^{-1/2} D H^{-1/2}``
* ``Q = -T0 + (i/4) H0^{-1}`` and ``T_h = Herm[(1/omega) arctan(omega Q)]``
  in the ``k = 3/4`` sector.

Every check returns a :class:`~su11lab.records.ResidualRecord` measured on
a leading window, since truncation pushes the defects of
``[H, T] = i`` into the last rows and columns.  A finite trace argument
forbids ``[H, T] = i`` on the full matrix.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .conformal import ConformalTriple, _family, conformal_triple, exp_k
from .matcore import (BasisMismatchError, DomainError, OperatorMatrix, Window, WindowError, anti_hermitian_part, commutator,
                      hermitian_part, hermiticity_defect, identity, map_tag, matfun_diagonalizable,
                      matfun_hermitian, window_defect, window_norm)
from .records import ResidualRecord, Tier, convergence_orders, empirical_orders
from .su11 import Sector

K_FREE = 0.75


class Kind(str, Enum):
    T_OMEGA = "t_omega"
    T_MINIMAL = "t_minimal"
    T0_SECTOR = "t0_sector"
    Q_OP = "q_op"
    T_HARMONIC = "t_harmonic"
    T_CS = "t_cs"


@dataclass(frozen=True)
class TimeOperator:
    matrix: OperatorMatrix
    kind: Kind
    params: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))

    def shifted(self, phi: OperatorMatrix) -> "TimeOperator":
        """``T + phi(H)`` for a precomputed function ``phi`` of the Hamiltonian."""
        return TimeOperator(self.matrix + phi, self.kind, dict(self.params, shifted=1.0))


def _check_omega(omega: float) -> None:
    if not (0 < omega < 1):
        raise DomainError(f"omega must lie in (0, 1), got {omega}")


# --- conjugation of H by exp(omega K) --------------------------------------

def bch_series(t: ConformalTriple, omega: float) -> OperatorMatrix:
    """``B - [A,B] + [A,[A,B]]/2`` with ``A = omega K``, ``B = H``.

    The series terminates because ``[K, [K, H]]`` is proportional to ``K``.
    """
    A = t.K * omega
    AB = commutator(A, t.H)
    return t.H - AB + commutator(A, AB) * 0.5


def bch_series_defect(t: ConformalTriple, omega: float) -> ResidualRecord:
    f = _family(t, omega)
    w = Window(t.N - 2)
    d = window_defect(bch_series(t, omega), f.Kminusw * (-2 * omega), w)
    return ResidualRecord("bch_series", Tier.EXACT, d, {"omega": omega, "M": w.M})


def bch_conjugation_defect(t: ConformalTriple, omega: float, w: Window) -> ResidualRecord:
    """Relative window residual of ``exp(-wK) H exp(wK) + 2 w K-w``."""
    _check_omega(omega)
    if w.M > t.N // 4:
        raise WindowError(f"conjugation check needs M <= N/4 = {t.N // 4}")
    f = _family(t, omega)
    lhs = exp_k(t, -omega) @ t.H @ exp_k(t, omega)
    d = window_defect(lhs, f.Kminusw * (-2 * omega), w, relative=True)
    return ResidualRecord("bch_conjugation", Tier.CONVERGENT, d, {"omega": omega, "M": w.M, "N": t.N})


# --- T(omega) -------------------------------------------------------------

def _extended_product(*factors: OperatorMatrix) -> OperatorMatrix:
    """Left-to-right product accumulated in extended precision.

    Conjugation by ``exp(omega K)`` cancels entries of size up to
    ``exp(omega N)``-scaled Gauss factors; double-precision products leave
    ``~1e-10`` relative noise on a 16-row window at ``omega = 0.5``.
    Falls back to double where ``longdouble`` is double.
    """
    for A, B in zip(factors, factors[1:]):
        if A.dim != B.dim or A.domain != B.codomain:
            raise BasisMismatchError(f"cannot compose {A.basis_tag!r} with {B.basis_tag!r}")
    acc = factors[0].entries.astype(np.clongdouble)
    for F in factors[1:]:
        acc = acc @ F.entries.astype(np.clongdouble)
    return OperatorMatrix(acc.astype(complex), map_tag(factors[0].codomain, factors[-1].domain))


def _shifted_inverse(f, k: float) -> OperatorMatrix:
    # K3w is not diagonal in the fixed basis for omega != 1
    return matfun_hermitian(f.K3w, lambda lam: 1.0 / (lam + k), positive=True)


def t_omega(t: ConformalTriple, omega: float) -> TimeOperator:
    _check_omega(omega)
    f = _family(t, omega)
    T = _extended_product(exp_k(t, omega), f.Kplusw, _shifted_inverse(f, t.k),
                          exp_k(t, -omega)) * (-1j / (2 * omega))
    return TimeOperator(T, Kind.T_OMEGA, {"omega": omega, "k": t.k})


def t_omega_mirror(t: ConformalTriple, omega: float) -> TimeOperator:
    """``T(-omega)`` assembled from its own factors.

    ``(i/2 omega) exp(-omega K) (K3w + k)^{-1} K-w exp(omega K)``, i.e. the
    exponentials swapped and the ladder factor replaced by its adjoint-side
    mirror.  The literal substitution ``omega -> -omega`` in the defining
    formula is the adjoint only when ``k = 1/2``.
    """
    _check_omega(omega)
    f = _family(t, omega)
    T = _extended_product(exp_k(t, -omega), _shifted_inverse(f, t.k), f.Kminusw,
                          exp_k(t, omega)) * (1j / (2 * omega))
    return TimeOperator(T, Kind.T_OMEGA, {"omega": -omega, "k": t.k})


def adjoint_symmetry_defect(t: ConformalTriple, omega: float, w: Window) -> ResidualRecord:
    T = t_omega(t, omega).matrix
    Tm = t_omega_mirror(t, omega).matrix
    d = window_defect(T.adjoint(), Tm, w, relative=True)
    return ResidualRecord("t_omega_adjoint", Tier.EXACT, d, {"omega": omega, "M": w.M})


def t_omega_closed_form(t: ConformalTriple, omega: float) -> OperatorMatrix:
    """``i/(2 omega) + D H^{-1} - i k H^{-1}``.

    Conjugating the factors of ``T(omega)`` by ``exp(omega K)`` gives
    ``i/(2 omega) - i (k + iD + 2 omega K)(H - 2 i omega D + 2 omega k)^{-1}``,
    which collapses to this omega-independent remainder through the
    discrete-series identity ``K = (k + iD) H^{-1} (k - iD)``.
    """
    Hinv = matfun_hermitian(t.H, "inv")
    return t.identity() * (1j / (2 * omega)) + t.D @ Hinv - Hinv * (1j * t.k)


# --- minimal Hermitian time operator -----------------------------------------

def t_minimal(t: ConformalTriple) -> TimeOperator:
    Hm = matfun_hermitian(t.H, "inv_sqrt")
    T = Hm @ t.D @ Hm
    kind = Kind.T0_SECTOR if t.k == K_FREE else Kind.T_MINIMAL
    return TimeOperator(T, kind, {"k": t.k})


def commutator_defect(H: OperatorMatrix, T: TimeOperator, w: Window,
                      tier: Tier = Tier.CONVERGENT, sign: int = 1) -> ResidualRecord:
    """Windowed ``[H, T] - sign * i``; ``relative`` divides by ``max(1, 1)``."""
    C = commutator(H, T.matrix)
    d = window_defect(C, H.identity() * (1j * sign), w)
    return ResidualRecord(f"commutator[{T.kind.value}]", tier, d,
                          {"absolute": d, "relative": d, "M": w.M, "sign": sign})


def trace_obstruction(H: OperatorMatrix, T: TimeOperator) -> float:
    """``|trace([H,T] - i)|``; equals ``N`` for every finite ``T``."""
    C = commutator(H, T.matrix) - H.identity() * 1j
    return float(abs(np.trace(C.entries)))


@dataclass(frozen=True)
class DefectRecord:
    """``[H,T] - i`` and its sandwich ``H ([H,T] - i) H`` with windowed norms.

    ``sandwich_scaled`` divides the sandwich norm by the squared window
    norm of ``H`` so it is comparable with ``defect_norm``.
    """
    defect: OperatorMatrix
    sandwich: OperatorMatrix
    defect_norm: float
    sandwich_norm: float
    sandwich_scaled: float
    tier: Tier


def x_defect(H: OperatorMatrix, T: TimeOperator, w: Window) -> DefectRecord:
    Delta = commutator(H, T.matrix) - H.identity() * 1j
    S = H @ Delta @ H
    dn, sn = window_norm(Delta, w), window_norm(S, w)
    hw = window_norm(H, w)
    return DefectRecord(Delta, S, dn, sn, sn / hw ** 2, Tier.CONVERGENT)


def t_minimal_trend(k: float, dims: Sequence[int], w: Window) -> ResidualRecord:
    rows = []
    for N in dims:
        t = conformal_triple(Sector(k, N))
        T = t_minimal(t)
        xd = x_defect(t.H, T, w)
        rows.append({"N": N, "defect": xd.defect_norm, "sandwich": xd.sandwich_norm,
                     "sandwich_scaled": xd.sandwich_scaled,
                     "hermiticity": hermiticity_defect(T.matrix) / T.matrix.max_abs()})
    defects = [r["defect"] for r in rows]
    monotone = all(b < a for a, b in zip(defects, defects[1:]))
    return ResidualRecord("t_minimal_commutator", Tier.CONVERGENT, defects[-1],
                          {"monotone": monotone, "M": w.M,
                           "orders": convergence_orders(list(dims), defects)}, rows)


# --- small-omega behaviour ---------------------------------------------------

def small_omega_report(t: ConformalTriple, omegas: Sequence[float], w: Window) -> ResidualRecord:
    """Hermitian and anti-Hermitian parts of ``T(omega)`` as ``omega`` shrinks.

    Per row: ``hermitian_error`` = ``|Herm T(w) - T_min|``;
    ``antihermitian_error`` against ``i/(2w) + i (2k+1)/(2H)``;
    ``leading_only_error`` against ``i/(2w)`` alone; and
    ``closed_form_error`` against :func:`t_omega_closed_form`.
    """
    omegas = [float(x) for x in omegas]
    if any(not (0 < x <= 0.5) for x in omegas):
        raise DomainError("small-omega report needs omega in (0, 0.5]")
    if any(b >= a for a, b in zip(omegas, omegas[1:])):
        raise ValueError("omegas must be strictly descending")
    Tmin = t_minimal(t).matrix
    Hinv = matfun_hermitian(t.H, "inv")
    I = t.identity()
    rows = []
    for om in omegas:
        T = t_omega(t, om).matrix
        A = anti_hermitian_part(T)
        lead = I * (1j / (2 * om))
        rows.append({
            "omega": om,
            "hermitian_error": window_defect(hermitian_part(T), Tmin, w),
            "antihermitian_error": window_defect(A, lead + Hinv * (1j * (2 * t.k + 1) / 2), w),
            "leading_only_error": window_defect(A, lead, w),
            "corrected_antihermitian_error": window_defect(A, lead - Hinv * (1j * (2 * t.k - 1) / 2), w),
            "closed_form_error": window_defect(T, t_omega_closed_form(t, om), w),
            "leading_magnitude": 1 / (2 * om),
        })
    herm = [r["hermitian_error"] for r in rows]
    orders = empirical_orders(omegas, herm)
    return ResidualRecord("small_omega", Tier.REPORT_ONLY, herm[-1],
                          {"orders": orders, "order": orders[-1] if orders else None, "M": w.M},
                          rows)


# --- Q and the K identity -----------------------------------------------------

def _require_free(s: Sector) -> None:
    if s.k != K_FREE:
        raise ValueError(f"this construction lives in the k = 3/4 sector, got k={s.k}")


def q_operator(s: Sector) -> TimeOperator:
    _require_free(s)
    t = conformal_triple(s)
    T0 = t_minimal(t).matrix
    Q = -T0 + matfun_hermitian(t.H, "inv") * 0.25j
    return TimeOperator(Q, Kind.Q_OP, {"k": s.k})


def k_identity_forms(s: Sector) -> tuple[OperatorMatrix, OperatorMatrix, OperatorMatrix]:
    """``(K, T0 H0 T0 + H0^{-1}/16, Q H0 Q - (i/2) Q)``."""
    _require_free(s)
    t = conformal_triple(s)
    T0 = t_minimal(t).matrix
    Hinv = matfun_hermitian(t.H, "inv")
    Q = -T0 + Hinv * 0.25j
    return t.K, T0 @ t.H @ T0 + Hinv / 16, Q @ t.H @ Q - Q * 0.5j


def k_identity_defect(s: Sector, w: Window) -> ResidualRecord:
    K, f1, f2 = k_identity_forms(s)
    comps = {"form_t0": window_defect(K, f1, w), "form_q": window_defect(K, f2, w),
             "forms_agreement": window_defect(f1, f2, w), "M": w.M, "N": s.N}
    return ResidualRecord("k_identity", Tier.CONVERGENT, max(comps["form_t0"], comps["form_q"]), comps)


# --- arctangent time operator ---------------------------------------------

def harmonic_hamiltonian(s: Sector, omega: float) -> OperatorMatrix:
    t = conformal_triple(s)
    return t.H + t.K * omega ** 2


def t_harmonic(s: Sector, omega: float) -> TimeOperator:
    if not omega > 0:
        raise DomainError(f"omega must be positive, got {omega}")
    Q = q_operator(s).matrix
    Th = matfun_diagonalizable(Q * omega, "arctan") / omega
    return TimeOperator(hermitian_part(Th), Kind.T_HARMONIC, {"omega": omega, "k": s.k})


def harmonic_identity_defect(s: Sector, omega: float) -> float:
    """``|H0 + w^2 K - 2 w K3w|`` over the full matrix."""
    t = conformal_triple(s)
    f = _family(t, omega)
    return float(np.abs((harmonic_hamiltonian(s, omega) - f.K3w * (2 * omega)).entries).max())


def t_harmonic_report(omega: float, dims: Sequence[int], w: Window,
                      limit_omega: float = 1e-3) -> ResidualRecord:
    """``[H_h, T_h] -/+ i`` over ``dims`` plus the small-omega limit ``T_h -> -T0``.

    Both signs are reported: with ``[H0, T0] = i`` the arctangent of
    ``omega Q`` with ``Q -> -T0`` tends to the opposite sign.
    """
    rows = []
    for N in dims:
        s = Sector(K_FREE, N)
        H0 = conformal_triple(s).H
        Hh = harmonic_hamiltonian(s, omega)
        Th = t_harmonic(s, omega)
        Q = q_operator(s)
        T0 = t_minimal(conformal_triple(s)).matrix
        lim = t_harmonic(s, limit_omega).matrix
        rows.append({
            "N": N,
            "minus_i": commutator_defect(Hh, Th, w, Tier.REPORT_ONLY, +1).residual,
            "plus_i": commutator_defect(Hh, Th, w, Tier.REPORT_ONLY, -1).residual,
            "q_commutator_plus_i": commutator_defect(H0, Q, w, Tier.REPORT_ONLY, -1).residual,
            "limit_to_minus_t0": window_defect(lim, -T0, w),
            "hh_identity": harmonic_identity_defect(s, omega),
        })
    return ResidualRecord("t_harmonic", Tier.REPORT_ONLY, rows[-1]["minus_i"],
                          {"omega": omega, "limit_omega": limit_omega, "M": w.M,
                           "limit_to_minus_t0": rows[-1]["limit_to_minus_t0"]}, rows)
