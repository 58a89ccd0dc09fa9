import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from su11lab import timeops as to
from su11lab.conformal import conformal_triple
from su11lab.matcore import (DomainError, Window, WindowError, commutator, matfun_hermitian,
                             window_defect)
from su11lab.records import Tier
from su11lab.su11 import Sector


@pytest.fixture(scope="module")
def t125():
    return conformal_triple(Sector(1.25, 128))


@given(k=st.floats(0.3, 3.0), omega=st.floats(0.05, 0.95), N=st.integers(8, 64))
def test_bch_series_terminates_exactly(k, omega, N):
    t = conformal_triple(Sector(k, N))
    assert to.bch_series_defect(t, omega).residual <= 1e-12 * N


def test_bch_conjugation_window_guard(t125):
    with pytest.raises(WindowError):
        to.bch_conjugation_defect(t125, 0.5, Window(33))
    with pytest.raises(DomainError):
        to.bch_conjugation_defect(t125, 1.0, Window(8))


@pytest.mark.parametrize("omega", [0.5, 0.2, 0.1])
def test_bch_conjugation_small_residual(t125, omega):
    assert to.bch_conjugation_defect(t125, omega, Window(16)).residual <= 1e-6


def test_discrete_series_identity_for_k(t125):
    # K = (k + iD) H^-1 (k - iD), the identity behind the closed form of T(omega)
    k = t125.k
    I = t125.identity()
    Hinv = matfun_hermitian(t125.H, "inv")
    rhs = (I * k + t125.D * 1j) @ Hinv @ (I * k - t125.D * 1j)
    assert window_defect(rhs, t125.K, Window(8)) <= 1e-4


@pytest.mark.parametrize("omega", [0.5, 0.3, 0.1])
def test_t_omega_commutator_and_closed_form(t125, omega):
    T = to.t_omega(t125, omega)
    assert to.commutator_defect(t125.H, T, Window(16)).residual <= 1e-6
    assert window_defect(T.matrix, to.t_omega_closed_form(t125, omega), Window(16)) <= 1e-8


@pytest.mark.parametrize("omega", [0.5, 0.25, 0.1])
def test_adjoint_mirror(t125, omega):
    assert to.adjoint_symmetry_defect(t125, omega, Window(16)).residual <= 1e-10


def test_literal_sign_flip_is_not_the_adjoint_off_half_index(t125):
    # the closed form at -omega differs from T(omega)^dagger by (2k - 1)/H terms
    T = to.t_omega(t125, 0.3).matrix
    lit = to.t_omega_closed_form(t125, -0.3)
    assert window_defect(T.adjoint(), lit, Window(8)) > 0.1


def test_t_omega_domain(t125):
    for bad in (0.0, 1.0, -0.2):
        with pytest.raises(DomainError):
            to.t_omega(t125, bad)


@given(k=st.floats(0.5, 3.0), N=st.integers(8, 48))
@settings(max_examples=15)
def test_trace_obstruction_equals_dimension(k, N):
    t = conformal_triple(Sector(k, N))
    assert to.trace_obstruction(t.H, to.t_minimal(t)) == pytest.approx(N, rel=1e-9)


@given(k=st.floats(0.5, 3.0), N=st.integers(8, 64))
@settings(max_examples=15)
def test_t_minimal_hermitian(k, N):
    T = to.t_minimal(conformal_triple(Sector(k, N))).matrix
    assert np.abs(T.entries - T.entries.conj().T).max() <= 1e-12 * T.max_abs()


def test_t_minimal_kind():
    assert to.t_minimal(conformal_triple(Sector(0.75, 16))).kind is to.Kind.T0_SECTOR
    assert to.t_minimal(conformal_triple(Sector(1.25, 16))).kind is to.Kind.T_MINIMAL


def test_t_minimal_trend_and_sandwich():
    r = to.t_minimal_trend(1.25, (32, 64, 128), Window(8))
    assert r.components["monotone"]
    for row in r.table:
        assert row["sandwich_scaled"] <= row["defect"]
        assert row["hermiticity"] <= 1e-12


def test_shift_invariance(t125):
    H = t125.H
    T = to.t_minimal(t125)
    C0 = commutator(H, T.matrix)
    C1 = commutator(H, T.shifted(H + H @ H).matrix)
    assert window_defect(C0, C1, Window(8)) <= 1e-12


def test_small_omega_report_structure(t125):
    r = to.small_omega_report(t125, [0.4, 0.2, 0.1], Window(8))
    assert r.tier is Tier.REPORT_ONLY
    assert len(r.table) == 3 and len(r.components["orders"]) == 2
    for row in r.table:
        # the omega-independent closed form holds to roundoff
        assert row["closed_form_error"] <= 1e-8
    with pytest.raises(ValueError):
        to.small_omega_report(t125, [0.1, 0.2], Window(8))
    with pytest.raises(DomainError):
        to.small_omega_report(t125, [0.6, 0.2], Window(8))


def test_q_and_k_identity_forms():
    for N in (32, 64, 128):
        r = to.k_identity_defect(Sector(0.75, N), Window(8))
        assert r.components["forms_agreement"] <= 1e-10
    res = [to.k_identity_defect(Sector(0.75, N), Window(8)).residual for N in (64, 128, 256)]
    assert res[0] > res[1] > res[2]
    with pytest.raises(ValueError):
        to.q_operator(Sector(1.25, 16))


def test_q_is_conjugate_with_opposite_sign():
    vals = []
    for N in (64, 128):
        s = Sector(0.75, N)
        H0 = conformal_triple(s).H
        vals.append(to.commutator_defect(H0, to.q_operator(s), Window(8), sign=-1).residual)
    assert vals[1] < vals[0] < 1e-2


@given(omega=st.floats(0.01, 2.0), N=st.integers(6, 40))
def test_harmonic_hamiltonian_identity(omega, N):
    assert to.harmonic_identity_defect(Sector(0.75, N), omega) <= 1e-12 * N * (1 + omega ** 2)


def test_t_harmonic_is_hermitian_and_limits_to_minus_t0():
    s = Sector(0.75, 64)
    Th = to.t_harmonic(s, 1e-3).matrix
    assert np.array_equal(Th.entries, Th.entries.conj().T)
    T0 = to.t_minimal(conformal_triple(s)).matrix
    assert window_defect(Th, -T0, Window(8)) <= 1e-3
    with pytest.raises(DomainError):
        to.t_harmonic(s, 0.0)


def test_t_harmonic_report_rows():
    r = to.t_harmonic_report(0.5, (32, 64), Window(8))
    assert [row["N"] for row in r.table] == [32, 64]
    assert set(r.table[0]) == {"N", "minus_i", "plus_i", "q_commutator_plus_i", "limit_to_minus_t0",
                               "hh_identity"}
