import numpy as np
import pytest

from pnmcore import linalg
from pnmcore.errors import NonHermitianChoi, SingularMap, UnsupportedDimension


def random_density(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def test_vec_unvec_roundtrip():
    rng = np.random.default_rng(1)
    for dim in (2, 3, 4):
        m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        assert np.allclose(linalg.unvec(linalg.vec(m), dim), m)


def test_vectorization_convention():
    # vec(A rho B) = (B^T kron A) vec(rho)
    rng = np.random.default_rng(2)
    a, b, rho = (rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)) for _ in range(3))
    lhs = linalg.vec(a @ rho @ b)
    rhs = np.kron(b.T, a) @ linalg.vec(rho)
    assert np.allclose(lhs, rhs)


def test_identity_superoperator_acts_trivially():
    rng = np.random.default_rng(3)
    rho = random_density(rng, 3)
    ident = linalg.identity_superoperator(3)
    assert np.allclose(linalg.apply_map(ident, rho), rho)


def test_depolarizing_action():
    rng = np.random.default_rng(4)
    rho = random_density(rng, 2)
    for f in (0.0, 0.3, 1.0):
        s = linalg.depolarizing_superoperator(2, f)
        expected = f * rho + (1 - f) * np.eye(2) / 2
        assert np.allclose(linalg.apply_map(s, rho), expected)


def test_depolarizing_choi_eigenvalues():
    # trace-1 Choi of a qubit depolarizing map: (1+3f)/4 once, (1-f)/4 thrice
    f = 0.4
    choi = linalg.choi_of(linalg.depolarizing_superoperator(2, f))
    eigs = np.sort(np.linalg.eigvalsh(choi))
    assert np.allclose(eigs, [(1 - f) / 4] * 3 + [(1 + 3 * f) / 4])
    assert np.isclose(np.trace(choi).real, 1.0)


def test_pauli_superoperator_choi_eigenvalues_are_probs():
    probs = (0.5, 0.2, 0.2, 0.1)
    s = linalg.pauli_superoperator(probs)
    choi = linalg.choi_of(s)
    assert np.allclose(np.sort(np.linalg.eigvalsh(choi)), sorted(probs))
    assert linalg.is_cptp(s)


def test_compose_and_invert():
    s1 = linalg.depolarizing_superoperator(2, 0.8)
    s2 = linalg.depolarizing_superoperator(2, 0.5)
    comp = linalg.compose_maps(s2, s1)
    expected = linalg.depolarizing_superoperator(2, 0.4)
    assert np.allclose(comp.matrix, expected.matrix)
    inv = linalg.invert_map(s1)
    assert np.allclose(
        linalg.compose_maps(inv, s1).matrix, linalg.identity_superoperator(2).matrix
    )


def test_invert_singular_map_raises():
    s = linalg.depolarizing_superoperator(2, 0.0)
    with pytest.raises(SingularMap):
        linalg.invert_map(s)


def test_min_choi_eigenvalue_flags_noncp():
    # f > 1 is trace-preserving but not completely positive
    s = linalg.depolarizing_superoperator(2, 1.2)
    assert linalg.is_trace_preserving(s)
    assert not linalg.is_cptp(s)
    assert np.isclose(linalg.min_choi_eigenvalue(s), (1 - 1.2) / 4)


def test_min_choi_rejects_nonhermitian():
    mat = np.zeros((4, 4), dtype=complex)
    mat[0, 0] = 1j
    with pytest.raises(NonHermitianChoi):
        linalg.min_choi_eigenvalue(linalg.Superoperator(2, mat))


def test_unitary_map_detection():
    h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    assert linalg.is_unitary_map(linalg.kraus_conjugation(h))
    assert not linalg.is_unitary_map(linalg.depolarizing_superoperator(2, 0.9))
    assert linalg.is_unitary_map(linalg.depolarizing_superoperator(2, 1.0))


def test_trace_norm():
    assert np.isclose(linalg.trace_norm(np.diag([0.5, -0.5]).astype(complex)), 1.0)
    rho1 = np.diag([1.0, 0.0]).astype(complex)
    rho2 = np.diag([0.0, 1.0]).astype(complex)
    assert np.isclose(linalg.trace_norm(rho1 - rho2), 2.0)


def test_partial_transpose_involution():
    rng = np.random.default_rng(5)
    m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    assert np.allclose(linalg.partial_transpose(linalg.partial_transpose(m, 2), 2), m)


def test_eb_qubit_depolarizing_threshold():
    assert linalg.is_eb_qubit(linalg.depolarizing_superoperator(2, 0.2))
    assert linalg.is_eb_qubit(linalg.depolarizing_superoperator(2, 1 / 3 - 1e-6))
    assert not linalg.is_eb_qubit(linalg.depolarizing_superoperator(2, 1 / 3 + 1e-6))
    assert not linalg.is_eb_qubit(linalg.identity_superoperator(2))


def test_eb_rejects_non_qubit():
    with pytest.raises(UnsupportedDimension):
        linalg.is_eb_qubit(linalg.identity_superoperator(3))


def test_density_matrix_validation():
    assert linalg.is_valid_density_matrix(np.eye(2, dtype=complex) / 2)
    assert not linalg.is_valid_density_matrix(np.eye(2, dtype=complex))
    assert not linalg.is_valid_density_matrix(np.diag([1.5, -0.5]).astype(complex))
