import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qitp import linalg
from qitp.errors import BadDimension, BadIndex, DomainError, NonHermitian, NonSquare

from conftest import random_density, random_hermitian


def expm_taylor(a, terms=30):
    """Scaling-and-squaring Taylor exponential, kept independent of eigh."""
    norm = np.max(np.sum(np.abs(a), axis=1))
    s = max(0, int(np.ceil(np.log2(norm))) + 1) if norm > 0 else 0
    b = a / 2**s
    out = np.eye(a.shape[0], dtype=complex)
    term = np.eye(a.shape[0], dtype=complex)
    for k in range(1, terms):
        term = term @ b / k
        out = out + term
    for _ in range(s):
        out = out @ out
    return out


def partial_trace_bruteforce(rho, keep, n):
    keep = sorted(keep)
    traced = [q for q in range(n) if q not in keep]
    d = 1 << len(keep)
    out = np.zeros((d, d), dtype=complex)

    def bits(x, width):
        return [(x >> (width - 1 - k)) & 1 for k in range(width)]

    for i in range(1 << n):
        for j in range(1 << n):
            bi, bj = bits(i, n), bits(j, n)
            if any(bi[q] != bj[q] for q in traced):
                continue
            ki = int("".join(str(bi[q]) for q in keep), 2) if keep else 0
            kj = int("".join(str(bj[q]) for q in keep), 2) if keep else 0
            out[ki, kj] += rho[i, j]
    return out


def hermitian_matrices(max_qubits=3):
    return st.integers(1, max_qubits).flatmap(
        lambda n: st.integers(0, 2**32 - 1).map(lambda s: random_hermitian(np.random.default_rng(s), 1 << n))
    )


class TestHermitianEig:
    def test_diagonal(self):
        es = linalg.hermitian_eig(np.diag([1.0, 3.0]))
        assert np.allclose(es.eigenvalues, [1, 3])
        assert np.allclose(es.eigenvectors, np.eye(2))

    def test_pauli_x(self):
        es = linalg.hermitian_eig([[0, 1], [1, 0]])
        assert np.allclose(es.eigenvalues, [-1, 1])

    def test_random_reconstruction(self, rng):
        m = random_hermitian(rng, 8)
        es = linalg.hermitian_eig(m)
        assert linalg.max_abs_diff(es.reconstruct(), m) < 1e-10

    def test_deterministic_phase(self, rng):
        m = random_hermitian(rng, 4)
        a, b = linalg.hermitian_eig(m), linalg.hermitian_eig(m.copy())
        assert np.array_equal(a.eigenvectors, b.eigenvectors)
        v = a.eigenvectors
        piv = v[np.argmax(np.abs(v), axis=0), np.arange(4)]
        assert np.allclose(piv.imag, 0) and np.all(piv.real > 0)

    def test_errors(self):
        with pytest.raises(NonSquare):
            linalg.hermitian_eig(np.zeros((2, 3)))
        with pytest.raises(NonHermitian):
            linalg.hermitian_eig([[0, 1], [0, 0]])

    @settings(max_examples=40, deadline=None)
    @given(hermitian_matrices())
    def test_invariants(self, m):
        es = linalg.hermitian_eig(m)
        v = es.eigenvectors
        assert linalg.max_abs_diff(v.conj().T @ v, np.eye(len(m))) < 1e-10
        assert linalg.max_abs_diff(v.conj().T @ m @ v, np.diag(es.eigenvalues)) < 1e-10
        assert np.all(np.diff(es.eigenvalues) >= 0)


class TestMatrixFunc:
    def test_identity_function(self, rng):
        m = random_hermitian(rng, 4)
        assert linalg.max_abs_diff(linalg.matrix_func_hermitian(m, lambda e: e), m) < 1e-12

    def test_exp_on_diagonal(self):
        out = linalg.matrix_func_hermitian(np.diag([0, np.log(2)]), np.exp)
        assert np.allclose(out, np.diag([1, 2]), atol=1e-14)

    def test_against_taylor_oracle(self, rng):
        m = random_hermitian(rng, 4)
        out = linalg.matrix_func_hermitian(m, lambda e: np.exp(-e))
        assert linalg.max_abs_diff(out, expm_taylor(-m)) < 1e-10

    def test_domain_error(self):
        with pytest.raises(DomainError):
            linalg.matrix_func_hermitian(np.diag([-1.0, 1.0]), np.sqrt)

    @settings(max_examples=30, deadline=None)
    @given(hermitian_matrices())
    def test_exp_inverse_consistency(self, m):
        a = linalg.matrix_func_hermitian(m, np.exp)
        b = linalg.matrix_func_hermitian(m, lambda e: np.exp(-e))
        assert linalg.max_abs_diff(a @ b, np.eye(len(m))) < 1e-9


class TestKron:
    def test_identities(self):
        assert np.array_equal(linalg.kron(np.eye(2), np.eye(2)), np.eye(4))

    def test_diagonal(self):
        assert np.allclose(linalg.kron(np.diag([1, 2]), np.diag([1, 3])), np.diag([1, 3, 2, 6]))

    def test_index_formula(self, rng):
        a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        b = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        k = linalg.kron(a, b)
        for i, j, p, q in np.ndindex(2, 2, 2, 2):
            assert abs(k[2 * i + p, 2 * j + q] - a[i, j] * b[p, q]) < 1e-14

    def test_associativity(self, rng):
        a, b, c = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(3))
        left = linalg.kron(linalg.kron(a, b), c)
        right = linalg.kron(a, linalg.kron(b, c))
        assert linalg.max_abs_diff(left, right) < 1e-12


class TestPartialTrace:
    def test_bell_like_state(self):
        rho = np.zeros((4, 4))
        rho[0, 0] = rho[0, 3] = rho[3, 0] = rho[3, 3] = 0.5
        assert np.allclose(linalg.partial_trace(rho, [0], 2), np.eye(2) / 2)

    def test_product_state(self, rng):
        ra, rb = random_density(rng, 2), 3.0 * random_density(rng, 4)
        out = linalg.partial_trace(np.kron(ra, rb), [0], 3)
        assert linalg.max_abs_diff(out, ra * np.trace(rb)) < 1e-12

    def test_bruteforce(self, rng):
        rho = random_density(rng, 8)
        out = linalg.partial_trace(rho, [0, 2], 3)
        assert linalg.max_abs_diff(out, partial_trace_bruteforce(rho, [0, 2], 3)) < 1e-13

    @pytest.mark.parametrize("keep", [[], [1], [0, 1, 2], [2, 1]])
    def test_trace_preserved(self, rng, keep):
        rho = random_density(rng, 8)
        assert abs(np.trace(linalg.partial_trace(rho, keep, 3)) - 1) < 1e-12

    def test_errors(self, rng):
        with pytest.raises(BadDimension):
            linalg.partial_trace(np.eye(4), [0], 3)
        with pytest.raises(BadIndex):
            linalg.partial_trace(np.eye(4), [2], 2)
