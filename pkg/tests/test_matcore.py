import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given
from hypothesis import strategies as st

from su11lab.matcore import (BasisMismatchError, ConditionError, DomainError, NotHermitianError,
                             OperatorMatrix, Window, WindowError, anti_hermitian_part, commutator,
                             diagonal, eig_sorted, eigh_sorted, expm_nilpotent, from_csv,
                             hermitian_part, identity, is_hermitian, map_tag, matfun_diagonalizable,
                             matfun_hermitian, to_csv, window_defect)

TAG = "test"


def random_hermitian(rng, n, scale=1.0):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return OperatorMatrix(scale * (a + a.conj().T) / 2, TAG)


def random_positive(rng, n):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return OperatorMatrix(a @ a.conj().T + n * np.eye(n), TAG)


sizes = st.integers(2, 12)
seeds = st.integers(0, 2 ** 31 - 1)


# --- OperatorMatrix ---------------------------------------------------------------

def test_entries_are_read_only():
    A = identity(3, TAG)
    with pytest.raises(ValueError):
        A.entries[0, 0] = 2


def test_non_square_rejected():
    with pytest.raises(ValueError):
        OperatorMatrix(np.zeros((2, 3)), TAG)


def test_mismatched_tags_refuse_arithmetic():
    A, B = identity(3, "a"), identity(3, "b")
    with pytest.raises(BasisMismatchError):
        A + B
    with pytest.raises(BasisMismatchError):
        A @ B
    with pytest.raises(BasisMismatchError):
        commutator(A, B)


def test_cross_basis_tags_compose():
    S = OperatorMatrix(np.eye(3), map_tag("b", "a"))
    assert S.codomain == "b" and S.domain == "a"
    assert S.adjoint().basis_tag == "a<-b"
    assert (S @ identity(3, "a")).basis_tag == "b<-a"
    assert (S.adjoint() @ S).basis_tag == "a"
    with pytest.raises(BasisMismatchError):
        identity(3, "a") @ S


def test_window_validation():
    with pytest.raises(WindowError):
        Window(0)
    with pytest.raises(WindowError):
        window_defect(identity(3, TAG), identity(3, TAG), Window(4))


def test_window_defect_relative_scale():
    A = diagonal([10.0, 0.0], TAG)
    B = diagonal([20.0, 0.0], TAG)
    assert window_defect(A, B, Window(2)) == 10.0
    assert window_defect(A, B, Window(2), relative=True) == 0.5
    # the max(1, .) floor keeps small references absolute
    assert window_defect(diagonal([0.1, 0], TAG), diagonal([0.2, 0], TAG), Window(1), relative=True) \
        == pytest.approx(0.1)


@given(n=sizes, seed=seeds)
def test_hermitian_split_is_exact(n, seed):
    rng = np.random.default_rng(seed)
    A = OperatorMatrix(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)), TAG)
    H, Ah = hermitian_part(A), anti_hermitian_part(A)
    assert is_hermitian(H)
    assert np.allclose((H + Ah).entries, A.entries, atol=1e-15)
    assert np.array_equal(H.entries, H.entries.conj().T)


@given(n=sizes, seed=seeds)
def test_commutator_antisymmetric_and_diagonal_path(n, seed):
    rng = np.random.default_rng(seed)
    A = random_hermitian(rng, n)
    D = diagonal(rng.normal(size=n), TAG)
    assert np.allclose(commutator(A, D).entries, -commutator(D, A).entries, atol=1e-14)
    dense = D.entries @ A.entries - A.entries @ D.entries
    assert np.allclose(commutator(D, A).entries, dense, atol=1e-13)


# --- eigendecompositions and matrix functions ------------------------------------------

@given(n=sizes, seed=seeds)
def test_eigh_sorted_ascending_and_recomposes(n, seed):
    A = random_hermitian(np.random.default_rng(seed), n)
    dec = eigh_sorted(A)
    assert np.all(np.diff(dec.eigenvalues) >= 0)
    assert np.allclose(dec.recompose(), A.entries, atol=1e-12)


def test_non_hermitian_input_rejected():
    A = OperatorMatrix(np.array([[0, 1], [0, 0]]), TAG)
    with pytest.raises(NotHermitianError):
        matfun_hermitian(A, "exp")


@given(n=sizes, seed=seeds)
def test_matfun_matches_scipy(n, seed):
    rng = np.random.default_rng(seed)
    P = random_positive(rng, n)
    assert np.allclose(matfun_hermitian(P, "sqrt").entries, scipy.linalg.sqrtm(P.entries), atol=1e-10)
    assert np.allclose(matfun_hermitian(P, "log").entries, scipy.linalg.logm(P.entries), atol=1e-10)
    H = random_hermitian(rng, n)
    assert np.allclose(matfun_hermitian(H, "exp").entries, scipy.linalg.expm(H.entries), atol=1e-9)


@given(n=sizes, seed=seeds)
def test_inverse_powers_compose(n, seed):
    P = random_positive(np.random.default_rng(seed), n)
    m = matfun_hermitian(P, "inv_sqrt")
    inv = matfun_hermitian(P, "inv")
    assert np.allclose((m @ m).entries, inv.entries, atol=1e-12)
    assert np.allclose((inv @ P).entries, np.eye(n), atol=1e-10)


def test_real_function_result_is_exactly_hermitian(rng):
    H = random_hermitian(rng, 9)
    F = matfun_hermitian(H, "arctan")
    assert np.array_equal(F.entries, F.entries.conj().T)


def test_inverse_power_floor():
    A = diagonal([1.0, 1e-14], TAG)
    with pytest.raises(DomainError):
        matfun_hermitian(A, "inv_sqrt")
    with pytest.raises(DomainError):
        matfun_hermitian(diagonal([1.0, -1.0], TAG), "sqrt")


@given(n=sizes, seed=seeds)
def test_diagonalizable_agrees_with_hermitian_path(n, seed):
    H = random_hermitian(np.random.default_rng(seed), n)
    a = matfun_diagonalizable(H, "arctan")
    b = matfun_hermitian(H, "arctan")
    assert np.allclose(a.entries, b.entries, atol=1e-10)


def test_diagonalizable_arctan_principal_branch():
    # 2x2 with complex eigenvalues +-i/2: arctan(i/2) = i artanh(1/2)
    A = OperatorMatrix(np.array([[0, 0.5], [-0.5, 0]]), TAG)
    F = matfun_diagonalizable(A, "arctan")
    lam = eig_sorted(F).eigenvalues
    assert np.allclose(sorted(lam.imag), [-math.atanh(0.5), math.atanh(0.5)], atol=1e-14)


def test_diagonalizable_guards():
    near = OperatorMatrix(np.array([[0, 1 - 1e-8], [-(1 - 1e-8), 0]]), TAG)  # eigenvalues ~ +-i
    with pytest.raises(DomainError):
        matfun_diagonalizable(near, "arctan")
    defective = OperatorMatrix(np.array([[1.0, 1.0], [1e-20, 1.0]]), TAG)
    with pytest.raises(ConditionError):
        matfun_diagonalizable(defective, "exp")


def test_eig_sorted_order():
    A = diagonal([2.0, 1j, -1j, 1.0], TAG)
    lam = eig_sorted(A).eigenvalues
    assert list(lam) == [-1j, 1j, 1.0, 2.0]


# --- nilpotent exponentials -------------------------------------------------------------

@given(n=st.integers(2, 14), seed=seeds, lower=st.booleans(), cplx=st.booleans())
def test_expm_nilpotent_methods_agree_with_scipy(n, seed, lower, cplx):
    rng = np.random.default_rng(seed)
    off = rng.normal(size=n - 1) + (1j * rng.normal(size=n - 1) if cplx else 0)
    a = np.diag(off, -1 if lower else 1)
    L = OperatorMatrix(a, TAG)
    ref = scipy.linalg.expm(a)
    for method in ("series", "bidiagonal"):
        E = expm_nilpotent(L, method=method)
        assert np.allclose(E.entries, ref, atol=1e-12, rtol=1e-12)


def test_expm_bidiagonal_with_zero_entries():
    a = np.diag([1.0, 0.0, 2.0, -3.0], -1)
    E = expm_nilpotent(OperatorMatrix(a, TAG))
    assert np.allclose(E.entries, scipy.linalg.expm(a), atol=1e-14)
    assert E.entries[3, 0] == 0


@given(n=st.integers(2, 12), seed=seeds)
def test_expm_nilpotent_inverse_is_exact(n, seed):
    rng = np.random.default_rng(seed)
    L = OperatorMatrix(np.diag(rng.normal(size=n - 1), -1), TAG)
    prod = expm_nilpotent(L) @ expm_nilpotent(-L)
    assert np.allclose(prod.entries, np.eye(n), atol=1e-12)


def test_expm_nilpotent_rejects_full_matrix():
    with pytest.raises(ValueError):
        expm_nilpotent(OperatorMatrix(np.ones((3, 3)), TAG))


# --- CSV ---------------------------------------------------------------------------

@given(n=st.integers(1, 6), seed=seeds)
def test_csv_round_trip_is_bit_exact(n, seed):
    rng = np.random.default_rng(seed)
    a = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) * 10.0 ** rng.integers(-300, 300)
    A = OperatorMatrix(a, TAG)
    B = from_csv(to_csv(A), TAG)
    assert np.array_equal(A.entries, B.entries)


def test_csv_line_format():
    text = to_csv(diagonal([1.0, 2.0], TAG))
    lines = text.splitlines()
    assert len(lines) == 4
    assert lines[0] == "0,0,1.0000000000000000,0.0000000000000000"
