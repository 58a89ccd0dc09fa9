"""Dense complex matrix kernel.

Every operator in the package is an :class:`OperatorMatrix`: an immutable
square complex array tagged with the basis it lives in.  Tags are plain
strings; a tag of the form ``"<codomain><-<domain>"`` marks a map between
two bases (overlaps, intertwiners).  Products check that the inner bases
agree, sums check that the tags are identical.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

Scalar = Union[int, float, complex]

TAU_HERM = 1e-10        # relative Hermiticity tolerance (x max-abs entry)
LAMBDA_FLOOR = 1e-12    # inverse-power eigenvalue floor (x spectral radius)
KAPPA_MAX = 1e8
BRANCH_GUARD = 1e-6


class BasisMismatchError(ValueError):
    pass


class NotHermitianError(ValueError):
    pass


class DomainError(ValueError):
    """An eigenvalue (or parameter) lies outside the domain of a function."""


class ConditionError(ArithmeticError):
    pass


class WindowError(ValueError):
    pass


def _split_tag(tag: str) -> tuple[str, str]:
    if "<-" in tag:
        codomain, domain = tag.split("<-", 1)
        return codomain, domain
    return tag, tag


def map_tag(codomain: str, domain: str) -> str:
    return codomain if codomain == domain else f"{codomain}<-{domain}"


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    entries: np.ndarray
    basis_tag: str

    def __post_init__(self):
        a = np.array(self.entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
            raise ValueError(f"entries must be a non-empty square array, got shape {a.shape}")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def codomain(self) -> str:
        return _split_tag(self.basis_tag)[0]

    @property
    def domain(self) -> str:
        return _split_tag(self.basis_tag)[1]

    def __repr__(self) -> str:
        return f"OperatorMatrix(dim={self.dim}, basis_tag={self.basis_tag!r})"

    def _like(self, entries, tag=None) -> "OperatorMatrix":
        return OperatorMatrix(entries, self.basis_tag if tag is None else tag)

    def _check_same(self, other: "OperatorMatrix") -> None:
        if not isinstance(other, OperatorMatrix):
            raise TypeError(f"expected OperatorMatrix, got {type(other).__name__}")
        if other.dim != self.dim or other.basis_tag != self.basis_tag:
            raise BasisMismatchError(
                f"({self.dim}, {self.basis_tag!r}) vs ({other.dim}, {other.basis_tag!r})")

    def __add__(self, other):
        if isinstance(other, OperatorMatrix):
            self._check_same(other)
            return self._like(self.entries + other.entries)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, OperatorMatrix):
            self._check_same(other)
            return self._like(self.entries - other.entries)
        return NotImplemented

    def __neg__(self):
        return self._like(-self.entries)

    def __mul__(self, c):
        if isinstance(c, (int, float, complex, np.number)):
            return self._like(c * self.entries)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, c):
        if isinstance(c, (int, float, complex, np.number)):
            return self._like(self.entries / c)
        return NotImplemented

    def __matmul__(self, other):
        if not isinstance(other, OperatorMatrix):
            return NotImplemented
        if other.dim != self.dim or self.domain != other.codomain:
            raise BasisMismatchError(
                f"cannot compose {self.basis_tag!r} with {other.basis_tag!r}")
        return OperatorMatrix(self.entries @ other.entries, map_tag(self.codomain, other.domain))

    def adjoint(self) -> "OperatorMatrix":
        return OperatorMatrix(self.entries.conj().T, map_tag(self.domain, self.codomain))

    @property
    def H(self) -> "OperatorMatrix":
        return self.adjoint()

    def identity(self) -> "OperatorMatrix":
        """Identity in this matrix's (square-basis) codomain."""
        return OperatorMatrix(np.eye(self.dim), self.codomain)

    def block(self, M: int) -> np.ndarray:
        return self.entries[:M, :M]

    def max_abs(self) -> float:
        return float(np.abs(self.entries).max())


def identity(dim: int, basis_tag: str) -> OperatorMatrix:
    return OperatorMatrix(np.eye(dim), basis_tag)


def diagonal(values, basis_tag: str) -> OperatorMatrix:
    return OperatorMatrix(np.diag(np.asarray(values, dtype=complex)), basis_tag)


@dataclass(frozen=True)
class Window:
    """Leading-block projector: rows and columns ``0 .. M-1``."""
    M: int

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 1:
            raise WindowError(f"window size must be a positive integer, got {self.M!r}")

    def check(self, dim: int) -> None:
        if self.M > dim:
            raise WindowError(f"window M={self.M} exceeds matrix dimension {dim}")


@dataclass(frozen=True)
class EigenDecomp:
    eigenvalues: np.ndarray
    vectors: np.ndarray
    condition: float

    def recompose(self) -> np.ndarray:
        return self.vectors @ np.diag(self.eigenvalues) @ np.linalg.inv(self.vectors)


# --- algebra -----------------------------------------------------------------

def _diagonal_of(A: OperatorMatrix) -> np.ndarray | None:
    a = A.entries
    d = np.diagonal(a)
    return d if np.count_nonzero(a) == np.count_nonzero(d) else None


def commutator(A: OperatorMatrix, B: OperatorMatrix) -> OperatorMatrix:
    """``AB - BA``; a diagonal operand uses ``(d_i - d_j) X_ij`` directly."""
    A._check_same(B)
    d = _diagonal_of(A)
    if d is not None:
        return A._like((d[:, None] - d[None, :]) * B.entries)
    d = _diagonal_of(B)
    if d is not None:
        return A._like((d[None, :] - d[:, None]) * A.entries)
    return A @ B - B @ A


def hermitian_part(A: OperatorMatrix) -> OperatorMatrix:
    a = A.entries
    # symmetric by construction: entry (i,j) and (j,i) are conjugates bit-for-bit
    return A._like(0.5 * (a + a.conj().T))


def anti_hermitian_part(A: OperatorMatrix) -> OperatorMatrix:
    a = A.entries
    return A._like(0.5 * (a - a.conj().T))


def hermiticity_defect(A: OperatorMatrix) -> float:
    return float(np.abs(A.entries - A.entries.conj().T).max())


def is_hermitian(A: OperatorMatrix, tol: float = TAU_HERM) -> bool:
    scale = A.max_abs()
    return hermiticity_defect(A) <= tol * max(scale, np.finfo(float).tiny)


# --- matrix functions ----------------------------------------------------------

def _inv_sqrt(x):
    return 1.0 / np.sqrt(x)


def _inv(x):
    return 1.0 / x


# name -> (function, needs strictly positive spectrum)
NAMED_FUNCTIONS: dict[str, tuple[Callable, bool]] = {
    "identity": (lambda x: x, False),
    "exp": (np.exp, False),
    "log": (np.log, True),
    "sqrt": (np.sqrt, True),
    "inv_sqrt": (_inv_sqrt, True),
    "inv": (_inv, True),
    "arctan": (np.arctan, False),
}


def _resolve(f):
    if isinstance(f, str):
        try:
            return NAMED_FUNCTIONS[f]
        except KeyError:
            raise ValueError(f"unknown function name {f!r}") from None
    return f, False


def eigh_sorted(A: OperatorMatrix, check: bool = True) -> EigenDecomp:
    """Hermitian eigendecomposition with ascending eigenvalues."""
    if check and not is_hermitian(A):
        raise NotHermitianError(
            f"Hermiticity defect {hermiticity_defect(A):.3e} exceeds "
            f"{TAU_HERM:g} x max-abs entry {A.max_abs():.3e}")
    lam, V = np.linalg.eigh(hermitian_part(A).entries)
    return EigenDecomp(lam, V, 1.0)


def matfun_hermitian(A: OperatorMatrix, f, *, positive: bool = False) -> OperatorMatrix:
    """``V f(Lambda) V^dagger`` for Hermitian ``A``.

    ``f`` is a vectorised callable or one of the names in
    :data:`NAMED_FUNCTIONS`.  Inverse powers, ``log`` and ``sqrt`` (or any
    callable with ``positive=True``) require every eigenvalue above
    ``LAMBDA_FLOOR`` times the spectral radius.  Real-valued ``f`` gives
    an exactly Hermitian result.
    """
    func, needs_pos = _resolve(f)
    dec = eigh_sorted(A)
    lam, V = dec.eigenvalues, dec.vectors
    if needs_pos or positive:
        radius = float(np.abs(lam).max())
        floor = LAMBDA_FLOOR * radius
        if lam[0] <= floor:
            raise DomainError(
                f"eigenvalue {lam[0]:.6e} at or below floor {floor:.3e} "
                f"(spectral radius {radius:.3e})")
    fl = np.asarray(func(lam), dtype=complex)
    out = (V * fl) @ V.conj().T
    if not np.any(fl.imag):
        # real f of a Hermitian matrix is Hermitian; drop the rounding asymmetry
        out = 0.5 * (out + out.conj().T)
    return A._like(out)


def eig_sorted(A: OperatorMatrix) -> EigenDecomp:
    """General eigendecomposition, eigenvalues sorted by (real, imag)."""
    lam, V = np.linalg.eig(A.entries)
    order = np.lexsort((lam.imag, lam.real))
    lam, V = lam[order], V[:, order]
    cond = float(np.linalg.cond(V))
    return EigenDecomp(lam, V, cond)


BRANCH_POINTS = {"arctan": (1j, -1j), "log": (0.0,), "sqrt": (0.0,)}


def matfun_diagonalizable(A: OperatorMatrix, f, branch_guard: float = BRANCH_GUARD,
                          kappa_max: float = KAPPA_MAX,
                          branch_points: tuple = ()) -> OperatorMatrix:
    """``V f(Lambda) V^{-1}`` on the principal branch of ``f``.

    Raises :class:`ConditionError` when the eigenvector matrix is worse
    conditioned than ``kappa_max`` and :class:`DomainError` when an
    eigenvalue sits within ``branch_guard`` of a branch point.
    """
    if isinstance(f, str):
        func = _resolve(f)[0]
        branch_points = tuple(branch_points) or BRANCH_POINTS.get(f, ())
    else:
        func = f
    dec = eig_sorted(A)
    if not np.isfinite(dec.condition) or dec.condition > kappa_max:
        raise ConditionError(
            f"eigenvector condition estimate {dec.condition:.3e} exceeds {kappa_max:.1e}")
    for bp in branch_points:
        dist = np.abs(dec.eigenvalues - bp)
        j = int(np.argmin(dist))
        if dist[j] < branch_guard:
            raise DomainError(
                f"eigenvalue {dec.eigenvalues[j]:.6g} within {branch_guard:g} of branch point {bp}")
    fl = np.asarray(func(dec.eigenvalues), dtype=complex)
    V = dec.vectors
    return A._like(np.linalg.solve(V.T, (V * fl).T).T)


def _strict_triangle(a: np.ndarray) -> str | None:
    if not np.any(np.triu(a)):
        return "lower"
    if not np.any(np.tril(a)):
        return "upper"
    return None


def _expm_bidiagonal(a: np.ndarray, side: str) -> np.ndarray:
    # e^L for L with a single nonzero off-diagonal:
    # (e^L)_{m,n} = prod_{i=n}^{m-1} L_{i+1,i} / (m-n)!   (lower case)
    N = a.shape[0]
    sub = np.diagonal(a, -1) if side == "lower" else np.diagonal(a, 1)
    out = np.eye(N, dtype=complex)
    if N == 1:
        return out
    mag = np.abs(sub)
    nz = mag > 0
    logmag = np.log(np.where(nz, mag, 1.0))
    angle = np.angle(np.where(nz, sub, 1.0))
    clog = np.concatenate(([0.0], np.cumsum(logmag)))
    cang = np.concatenate(([0.0], np.cumsum(angle)))
    czero = np.concatenate(([0], np.cumsum(~nz)))
    real = not np.any(np.imag(sub))
    cneg = np.concatenate(([0], np.cumsum(np.real(sub) < 0)))
    for d in range(1, N):
        n = np.arange(N - d)
        logv = clog[n + d] - clog[n] - math.lgamma(d + 1)
        if real:
            vals = np.exp(logv) * np.where((cneg[n + d] - cneg[n]) % 2, -1.0, 1.0)
        else:
            vals = np.exp(logv + 1j * (cang[n + d] - cang[n]))
        vals = np.where(czero[n + d] - czero[n] > 0, 0.0, vals)
        if side == "lower":
            out[n + d, n] = vals
        else:
            out[n, n + d] = vals
    return out


def expm_nilpotent(L: OperatorMatrix, method: str = "auto") -> OperatorMatrix:
    """Exact exponential of a strictly triangular matrix.

    ``method="series"`` sums ``L^j / j!`` for ``j < dim`` (the series
    terminates); ``"bidiagonal"`` uses the closed product form valid when
    ``L`` has a single nonzero off-diagonal; ``"auto"`` picks the latter
    when it applies.
    """
    a = L.entries
    side = _strict_triangle(a)
    if side is None:
        raise ValueError("expm_nilpotent requires a strictly triangular matrix")
    N = L.dim
    k = -1 if side == "lower" else 1
    band_only = not np.any(a - np.diag(np.diagonal(a, k), k))
    if method == "auto":
        method = "bidiagonal" if band_only else "series"
    if method == "bidiagonal":
        if not band_only:
            raise ValueError("bidiagonal method needs a single nonzero off-diagonal")
        return L._like(_expm_bidiagonal(a, side))
    if method != "series":
        raise ValueError(f"unknown method {method!r}")
    work = a.real if not np.any(a.imag) else a
    out = np.eye(N, dtype=work.dtype)
    term = np.eye(N, dtype=work.dtype)
    for j in range(1, N):
        term = (term @ work) / j
        if not term.any():
            break
        out = out + term
    return L._like(out)


# --- windowed residuals ----------------------------------------------------------

def window_defect(A: OperatorMatrix, B: OperatorMatrix, w: Window, relative: bool = False) -> float:
    """Max-abs entry of ``A - B`` over the leading ``M x M`` block.

    With ``relative=True`` the value is divided by ``max(1, max|B|)`` over
    the same block.
    """
    A._check_same(B)
    w.check(A.dim)
    d = float(np.abs(A.block(w.M) - B.block(w.M)).max())
    if relative:
        d /= max(1.0, float(np.abs(B.block(w.M)).max()))
    return d


def window_norm(A: OperatorMatrix, w: Window) -> float:
    w.check(A.dim)
    return float(np.abs(A.block(w.M)).max())


# --- CSV export ------------------------------------------------------------------

def _fmt(x: float) -> str:
    return format(float(x), "#.17g")


def to_csv(A: OperatorMatrix) -> str:
    """One ``i,j,re,im`` line per entry in row-major order."""
    a = A.entries
    lines = []
    for i in range(A.dim):
        for j in range(A.dim):
            z = a[i, j]
            lines.append(f"{i},{j},{_fmt(z.real)},{_fmt(z.imag)}")
    return "\n".join(lines) + "\n"


def from_csv(text: str, basis_tag: str = "imported") -> OperatorMatrix:
    rows = [ln.split(",") for ln in text.strip().splitlines() if ln.strip()]
    n = math.isqrt(len(rows))
    if n * n != len(rows):
        raise ValueError(f"{len(rows)} entries do not form a square matrix")
    a = np.zeros((n, n), dtype=complex)
    for i, j, re, im in rows:
        a[int(i), int(j)] = complex(float(re), float(im))
    return OperatorMatrix(a, basis_tag)
