"""Conformal triple of the singular oscillator and the Omega-linear Hamiltonians.

In the fixed sector basis (reference frequency 1) the singular-oscillator
generators are ``H = K3 - K1``, ``D = K2``, ``K = K3 + K1``.  A frequency
``omega`` only enters through :class:`OmegaFamily`, the re-identified
su(1,1) generators ``K3w = (omega K + H/omega)/2`` and friends.

``exp(omega K)`` is unbounded for ``omega >= 1`` and is evaluated through
the su(1,1) Gauss decomposition (see :func:`exp_k`), whose matrix entries
are finite sums and therefore exact leading blocks of the infinite matrix.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .matcore import (DomainError, OperatorMatrix, Window, WindowError, commutator,
                      diagonal, eigh_sorted, expm_nilpotent, identity, matfun_hermitian,
                      window_defect)
from .records import ResidualRecord, Tier
from .su11 import Sector, bg_coefficients, g_from_k

TOL_CLS = 1e-12


@dataclass(frozen=True)
class OmegaVector:
    O1: float
    O2: float
    O3: float

    @property
    def norm_sq(self) -> float:
        return self.O3 ** 2 - self.O2 ** 2 - self.O1 ** 2


class Case(str, Enum):
    CASE_A = "case_a"
    CASE_B = "case_b"
    UNSUPPORTED = "unsupported"


def classify(v: OmegaVector) -> Case:
    scale = v.O1 ** 2 + v.O2 ** 2 + v.O3 ** 2
    if v.O3 <= 0:
        return Case.UNSUPPORTED
    if abs(v.norm_sq) <= TOL_CLS * scale:
        return Case.CASE_B
    return Case.CASE_A if v.norm_sq > 0 else Case.UNSUPPORTED


@dataclass(frozen=True)
class ConformalTriple:
    sector: Sector
    H: OperatorMatrix
    D: OperatorMatrix
    K: OperatorMatrix

    @property
    def k(self) -> float:
        return self.sector.k

    @property
    def N(self) -> int:
        return self.sector.N

    @property
    def casimir_constant(self) -> float:
        g = self.sector.g if self.sector.g is not None else g_from_k(self.k)
        return g / 4 - 3 / 16

    def identity(self) -> OperatorMatrix:
        return identity(self.N, self.sector.tag)


def conformal_triple(s: Sector) -> ConformalTriple:
    g = s.generators
    return ConformalTriple(s, g.K3 - g.K1, g.K2, g.K3 + g.K1)


@dataclass(frozen=True)
class OmegaFamily:
    triple: ConformalTriple
    omega: float
    K3w: OperatorMatrix
    K1w: OperatorMatrix
    K2w: OperatorMatrix
    Kplusw: OperatorMatrix
    Kminusw: OperatorMatrix


def _check_family_omega(omega: float) -> None:
    if not (0 < omega <= 1):
        raise DomainError(f"omega must lie in (0, 1], got {omega}")


def _family(t: ConformalTriple, omega: float) -> OmegaFamily:
    K3w = (t.K * omega + t.H / omega) * 0.5
    K1w = (t.K * omega - t.H / omega) * 0.5
    return OmegaFamily(t, omega, K3w, K1w, t.D, K1w + t.D * 1j, K1w - t.D * 1j)


def omega_family(t: ConformalTriple, omega: float) -> OmegaFamily:
    _check_family_omega(omega)
    return _family(t, omega)


def family_defects(f: OmegaFamily, w: Window | None = None) -> dict[str, float]:
    """su(1,1) relations of an omega family on the leading ``N-1`` window (relative)."""
    N = f.triple.N
    w = w or Window(N - 1)
    if w.M > N - 1:
        raise WindowError("omega-family relations hold only on M <= N-1")
    return {
        "K3_Kplus": window_defect(commutator(f.K3w, f.Kplusw), f.Kplusw, w, relative=True),
        "K3_Kminus": window_defect(commutator(f.K3w, f.Kminusw), -f.Kminusw, w, relative=True),
        "Kminus_Kplus": window_defect(commutator(f.Kminusw, f.Kplusw), f.K3w * 2, w, relative=True),
    }


def linear_hamiltonian(s: Sector, v: OmegaVector) -> OperatorMatrix:
    g = s.generators
    return g.K3 * v.O3 + g.K2 * v.O2 + g.K1 * v.O1


# --- exp(omega K) -------------------------------------------------------------------

def gauss_coefficients(omega: float) -> tuple[float, float]:
    """``(a, b)`` with ``exp(omega K) = exp(a K+) exp(b K3) exp(a K-)``.

    Read off from the 2x2 realisation ``K3 = sigma_z/2, K+- = i sigma_+-``
    in which ``K = K3 + K1`` squares to zero.
    """
    if not (abs(omega) < 2):
        raise DomainError(f"Gauss decomposition needs |omega| < 2, got {omega}")
    return omega / (2 - omega), -2.0 * math.log1p(-omega / 2)


def exp_k(t: ConformalTriple, omega: float) -> OperatorMatrix:
    """``exp(omega K)``; every entry equals the infinite-matrix entry."""
    if omega >= 1:
        raise DomainError(f"exp(omega K) needs omega < 1, got {omega}")
    a, b = gauss_coefficients(omega)
    g = t.sector.generators
    n = np.arange(t.N)
    left = expm_nilpotent(g.Kplus * a, method="bidiagonal")
    right = expm_nilpotent(g.Kminus * a, method="bidiagonal")
    return left @ diagonal(np.exp(b * (n + t.k)), t.sector.tag) @ right


def exp_k_eigh(t: ConformalTriple, omega: float) -> OperatorMatrix:
    """``exp(omega K)`` of the truncated matrix via its eigendecomposition.

    Loses all accuracy once ``omega * lambda_max(K)`` exceeds a few dozen;
    kept as an independent cross-check at small ``N``.
    """
    return matfun_hermitian(t.K * omega, "exp")


# --- checks ------------------------------------------------------------------------

def algebra_defects(t: ConformalTriple, w: Window) -> ResidualRecord:
    """Windowed residuals of the conformal algebra and its Casimir constant."""
    if w.M > t.N - 2:
        raise WindowError(f"conformal algebra is defect-free only on M <= {t.N - 2}")
    H, D, K = t.H, t.D, t.K
    I = t.identity()
    comps = {
        "[H,D]-iH": window_defect(commutator(H, D), H * 1j, w),
        "[K,D]+iK": window_defect(commutator(K, D), K * -1j, w),
        "[H,K]-2iD": window_defect(commutator(H, K), D * 2j, w),
        "casimir": window_defect((H @ K + K @ H) * 0.5 - D @ D, I * t.casimir_constant, w),
    }
    return ResidualRecord("conformal_algebra", Tier.EXACT, max(comps.values()), comps)


@dataclass(frozen=True)
class SpectralCheck:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    reference: np.ndarray
    deviations: np.ndarray
    self_convergence: np.ndarray


def case_a_spectrum(s: Sector, v: OmegaVector, count: int) -> SpectralCheck:
    """Lowest ``count`` eigenvalues of the truncated Hamiltonian against ``Omega (n + k)``.

    ``self_convergence`` is ``|lambda_n(N) - lambda_n(2N)|``.
    """
    if classify(v) is not Case.CASE_A:
        raise ValueError(f"Omega vector {v} is not in case (a)")
    if count < 1 or count > s.N // 4:
        raise ValueError(f"count must lie in [1, N/4] = [1, {s.N // 4}], got {count}")
    dec = eigh_sorted(linear_hamiltonian(s, v))
    lam2 = eigh_sorted(linear_hamiltonian(s.resized(2 * s.N), v)).eigenvalues
    lam = dec.eigenvalues[:count]
    ref = math.sqrt(v.norm_sq) * (np.arange(count) + s.k)
    return SpectralCheck(lam, dec.vectors[:, :count], ref, np.abs(lam - ref),
                         np.abs(lam - lam2[:count]))


def family_coherent_vector(f: OmegaFamily, z: complex, tail: float = 1e-18) -> np.ndarray:
    """Coefficient vector of the family's coherent state ``|z>`` in the fixed basis.

    The family vacuum is the lowest eigenvector of ``K3w``; higher family
    states are generated with ``K+w`` so their phases follow the ladder
    convention.  Terms are summed until the coefficient drops below
    ``tail`` relative to the largest one.
    """
    k, N = f.triple.k, f.triple.N
    dec = eigh_sorted(f.K3w)
    state = dec.vectors[:, 0].astype(complex)
    c = bg_coefficients(k, z, N)
    cmax = np.abs(c).max()
    Kp = f.Kplusw.entries
    out = c[0] * state
    for n in range(1, N):
        state = Kp @ state / math.sqrt(n * (n - 1 + 2 * k))
        out = out + c[n] * state
        if abs(c[n]) < tail * cmax and n > 2:
            break
    return out


def energy_eigenvector(t: ConformalTriple, omega: float, E: float, w: Window,
                       dims: tuple[int, ...] | None = None) -> ResidualRecord:
    """Windowed residual ``||W (H - E)|E>|| / ||W |E>||`` and its N-trend.

    ``|E> = exp(omega K) |z>_omega`` with ``z = -E / (2 omega)``.  The state
    is a generalised eigenvector, so the residual is diagnostic only.
    """
    if not (0 < omega < 1):
        raise DomainError(f"omega must lie in (0, 1), got {omega}")
    if E < 0:
        raise DomainError(f"energy must be non-negative, got {E}")
    dims = tuple(dims or (t.N // 2, t.N))
    rows = []
    for N in dims:
        tt = conformal_triple(t.sector.resized(N))
        w.check(N)
        f = _family(tt, omega)
        v = exp_k(tt, omega).entries @ family_coherent_vector(f, -E / (2 * omega))
        r = tt.H.entries @ v - E * v
        rel = float(np.linalg.norm(r[:w.M]) / np.linalg.norm(v[:w.M]))
        rows.append({"N": N, "residual": rel, "norm": float(np.linalg.norm(v))})
    return ResidualRecord("energy_eigenvector", Tier.REPORT_ONLY, rows[-1]["residual"],
                          {"omega": omega, "E": E, "M": w.M}, rows)
