"""Discrete-series sectors of su(1,1).

The basis ``|n,k>`` diagonalises ``K3`` with eigenvalue ``n + k``.  The
ladder amplitude ``(K+)_{n+1,n} = sqrt((n+1)(n+2k))`` follows from the
normalised tower together with ``[K-, K+] = 2 K3``; the coherent-state
ratio test in the test suite is its independent witness.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.special import gammaln

from .matcore import (OperatorMatrix, Window, WindowError, commutator, diagonal,
                      expm_nilpotent, identity, window_defect)
from .records import ResidualRecord, Tier


def k_from_g(g: float) -> float:
    return 0.5 * (1.0 + math.sqrt(g + 0.25))


def g_from_k(k: float) -> float:
    return (2.0 * k - 1.0) ** 2 - 0.25


@dataclass(frozen=True)
class Sector:
    k: float
    N: int
    g: float | None = None

    def __post_init__(self):
        if not (self.k > 0):
            raise ValueError(f"Bargmann index must be positive, got k={self.k}")
        if int(self.N) != self.N or self.N < 4:
            raise ValueError(f"truncation dimension must be an integer >= 4, got N={self.N}")
        if self.g is not None and self.k != k_from_g(self.g):
            raise ValueError("k and g are inconsistent")

    @property
    def tag(self) -> str:
        return f"sector:k={self.k!r}:N={self.N}"

    @property
    def casimir_value(self) -> float:
        return self.k * (self.k - 1.0)

    def resized(self, N: int) -> "Sector":
        return Sector(self.k, N, self.g)

    @cached_property
    def generators(self) -> "GeneratorSet":
        return generators(self)


def sector_from_k(k: float, N: int) -> Sector:
    return Sector(float(k), int(N))


def sector_from_g(g: float, N: int) -> Sector:
    if g < 0:
        raise ValueError(f"coupling must be >= 0, got g={g}")
    return Sector(k_from_g(g), int(N), float(g))


@dataclass(frozen=True)
class GeneratorSet:
    K3: OperatorMatrix
    Kplus: OperatorMatrix
    Kminus: OperatorMatrix
    K1: OperatorMatrix
    K2: OperatorMatrix


def ladder_amplitudes(k: float, N: int) -> np.ndarray:
    n = np.arange(N - 1)
    return np.sqrt((n + 1) * (n + 2 * k))


def generators(s: Sector) -> GeneratorSet:
    N, k, tag = s.N, s.k, s.tag
    n = np.arange(N)
    kp = np.zeros((N, N))
    kp[n[1:], n[:-1]] = ladder_amplitudes(k, N)
    Kplus = OperatorMatrix(kp, tag)
    Kminus = Kplus.adjoint()
    K1 = (Kplus + Kminus) * 0.5
    K2 = (Kplus - Kminus) / 2j
    return GeneratorSet(diagonal(n + k, tag), Kplus, Kminus, K1, K2)


def casimir(s: Sector) -> OperatorMatrix:
    g = s.generators
    return g.K3 @ g.K3 - (g.Kplus @ g.Kminus + g.Kminus @ g.Kplus) * 0.5


def corner_defect_ladder(k: float, N: int) -> float:
    """Exact bottom-right entry of ``[K-, K+] - 2 K3`` for the truncation."""
    return -(N - 1) * (N - 2 + 2 * k) - 2 * (N - 1 + k)


# --- coherent states -------------------------------------------------------------

@dataclass(frozen=True)
class CoherentVector:
    """Unnormalised eigenvector of ``K-``.

    ``residual`` is ``||(K- - z) v|| / ||v||`` evaluated by a
    matrix-vector product; ``tail_residual`` is the same quantity in exact
    arithmetic, ``|z c_{N-1}| / ||v||``, which keeps decreasing with ``N``
    long after the product has hit roundoff.
    """
    z: complex
    coefficients: np.ndarray
    norm: float
    residual: float
    tail_residual: float = float("nan")

    def __post_init__(self):
        c = np.array(self.coefficients, dtype=complex)
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)


def _coherent_soft_bound(s: Sector, z: complex) -> None:
    if abs(z) ** 2 > s.N * min(1.0, 2 * s.k):
        warnings.warn(
            f"|z|^2 = {abs(z) ** 2:.3g} exceeds N*min(1,2k) = {s.N * min(1.0, 2 * s.k):.3g}; "
            "truncation tail dominates", RuntimeWarning, stacklevel=3)


def _eigen_residual(s: Sector, z: complex, c: np.ndarray) -> float:
    Km = s.generators.Kminus.entries
    nrm = np.linalg.norm(c)
    return float(np.linalg.norm(Km @ c - z * c) / nrm)


def bg_coefficients(k: float, z: complex, N: int) -> np.ndarray:
    """``z^n sqrt(Gamma(2k) / (Gamma(2k+n) n!))`` via log-Gamma differences."""
    n = np.arange(N)
    logmag = 0.5 * (gammaln(2 * k) - gammaln(2 * k + n) - gammaln(n + 1))
    z = complex(z)
    if z == 0:
        c = np.zeros(N, dtype=complex)
        c[0] = 1.0
        return c
    logmag = logmag + n * math.log(abs(z))
    with np.errstate(over="raise"):
        try:
            return np.exp(logmag + 1j * n * np.angle(z))
        except FloatingPointError:
            raise OverflowError("coherent-state coefficient exceeds the exponent range") from None


def tail_residual(k: float, z: complex, N: int) -> float:
    """Exact truncation residual ``|z| |c_{N-1}| / ||c||`` via log-Gamma terms."""
    z = complex(z)
    if z == 0:
        return 0.0
    n = np.arange(N)
    logc = 0.5 * (gammaln(2 * k) - gammaln(2 * k + n) - gammaln(n + 1)) + n * math.log(abs(z))
    top = logc.max()
    lognorm = top + 0.5 * math.log(np.sum(np.exp(2 * (logc - top))))
    return math.exp(math.log(abs(z)) + logc[-1] - lognorm)


def bg_state_series(s: Sector, z: complex) -> CoherentVector:
    _coherent_soft_bound(s, z)
    c = bg_coefficients(s.k, z, s.N)
    return CoherentVector(complex(z), c, float(np.linalg.norm(c)), _eigen_residual(s, z, c),
                          tail_residual(s.k, z, s.N))


def shifted_lowering_inverse(s: Sector) -> OperatorMatrix:
    """``K+ (K3 + k)^{-1}``, canonically conjugate to ``K-``."""
    g = s.generators
    return g.Kplus @ diagonal(1.0 / (np.arange(s.N) + 2 * s.k), s.tag)


def bg_state_exponential(s: Sector, z: complex) -> CoherentVector:
    """Coherent state as ``exp(z K+ (K3+k)^{-1}) |0,k>``.

    Uses the generic terminating power series so that the result is
    independent of the closed-form coefficients in :func:`bg_state_series`.
    """
    _coherent_soft_bound(s, z)
    E = expm_nilpotent(shifted_lowering_inverse(s) * complex(z), method="series")
    c = np.array(E.entries[:, 0])
    if not np.all(np.isfinite(c)):
        raise OverflowError("coherent-state series overflowed")
    return CoherentVector(complex(z), c, float(np.linalg.norm(c)), _eigen_residual(s, z, c),
                          tail_residual(s.k, z, s.N))


# --- operator identities -----------------------------------------------------------

def gamma_shift_operands(s: Sector, n: int) -> tuple[OperatorMatrix, OperatorMatrix]:
    """Both sides of ``[K+ (K3+k)^{-1}]^n = K+^n Gamma(K3+k)/Gamma(K3+k+n)``."""
    X = shifted_lowering_inverse(s)
    lhs = identity(s.N, s.tag)
    for _ in range(n):
        lhs = lhs @ X
    g = s.generators
    kpn = identity(s.N, s.tag)
    for _ in range(n):
        kpn = kpn @ g.Kplus
    j = np.arange(s.N)
    ratio = np.exp(gammaln(j + 2 * s.k) - gammaln(j + 2 * s.k + n))
    return lhs, kpn @ diagonal(ratio, s.tag)


def identity_defect(s: Sector, which: str, w: Window, n: int | None = None) -> ResidualRecord:
    """Windowed defect of the Gamma-shift identity or the canonical pair.

    ``which`` is ``"gamma_shift"`` (needs ``n``, window ``M <= N - n``) or
    ``"canonical_pair"`` (window ``M <= N - 1``).  Both vanish to roundoff
    on their windows; the canonical pair's corner entry is reported too.
    """
    if which == "gamma_shift":
        if n is None or not (1 <= n <= s.N - 2):
            raise ValueError(f"gamma_shift needs 1 <= n <= N-2, got n={n}")
        if w.M > s.N - n:
            raise WindowError(f"gamma_shift({n}) is defect-free only on M <= {s.N - n}")
        lhs, rhs = gamma_shift_operands(s, n)
        d = window_defect(lhs, rhs, w, relative=True)
        return ResidualRecord(f"gamma_shift({n})", Tier.EXACT, d, {"n": n, "M": w.M})
    if which == "canonical_pair":
        if w.M > s.N - 1:
            raise WindowError(f"canonical_pair is defect-free only on M <= {s.N - 1}")
        C = commutator(s.generators.Kminus, shifted_lowering_inverse(s))
        d = window_defect(C, identity(s.N, s.tag), w)
        corner = C.entries[-1, -1].real
        return ResidualRecord("canonical_pair", Tier.EXACT, d,
                              {"M": w.M, "corner": float(corner), "corner_expected": float(-(s.N - 1))})
    raise ValueError(f"unknown identity {which!r}")
