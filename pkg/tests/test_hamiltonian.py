import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qitp import hamiltonian as ham
from qitp import linalg
from qitp.errors import BadSize, NonHermitian, PairSumMismatch, SchemaError

from conftest import random_hermitian

PAULI = {
    "I": np.eye(2),
    "X": np.array([[0, 1], [1, 0]]),
    "Y": np.array([[0, -1j], [1j, 0]]),
    "Z": np.diag([1, -1]),
}


def dense_doc(m):
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m, dtype=complex)]


def embed_via_paulis(term, i, j, n):
    """Expand the 4x4 term in Pauli pairs and place each factor explicitly."""
    out = np.zeros((1 << n, 1 << n), dtype=complex)
    for a in "IXYZ":
        for b in "IXYZ":
            c = np.trace(np.kron(PAULI[a], PAULI[b]) @ term) / 4
            if c == 0:
                continue
            factors = [PAULI["I"]] * n
            factors[i], factors[j] = PAULI[a], PAULI[b]
            out += c * linalg.kron_all(factors)
    return out


class TestLoad:
    def test_pauli_terms(self):
        h = ham.load_hamiltonian({"n_qubits": 2, "pauli_terms": [{"string": "ZI", "coeff": 1.0}]})
        assert np.allclose(h.dense, np.diag([1, 1, -1, -1]))

    def test_dense_ground(self):
        h = ham.load_hamiltonian({"n_qubits": 1, "dense": dense_doc([[0, 0], [0, 5]])})
        assert h.ground_energy == pytest.approx(0.0, abs=1e-12)

    def test_pairs_against_kron_oracle(self, rng):
        terms = [(0, 1), (0, 2), (1, 2)]
        mats = [random_hermitian(rng, 4) for _ in terms]
        doc = {"n_qubits": 3, "pairs": [{"i": i, "j": j, "dense": dense_doc(m)} for (i, j), m in zip(terms, mats)]}
        h = ham.load_hamiltonian(doc)
        oracle = sum(embed_via_paulis(m, i, j, 3) for (i, j), m in zip(terms, mats))
        assert linalg.max_abs_diff(h.dense, oracle) < 1e-12
        assert len(h.pair_terms) == 3

    def test_reversed_pair_order(self, rng):
        m = random_hermitian(rng, 4)
        h = ham.load_hamiltonian({"n_qubits": 2, "pairs": [{"i": 1, "j": 0, "dense": dense_doc(m)}]})
        assert linalg.max_abs_diff(h.dense, embed_via_paulis(m, 1, 0, 2)) < 1e-12

    def test_pair_sum_mismatch(self, rng):
        m = random_hermitian(rng, 4)
        doc = {"n_qubits": 2, "pairs": [{"i": 0, "j": 1, "dense": dense_doc(m)}], "dense": dense_doc(m + 1e-3 * np.eye(4))}
        with pytest.raises(PairSumMismatch):
            ham.load_hamiltonian(doc)
        doc["dense"] = dense_doc(m)
        ham.load_hamiltonian(doc)

    @pytest.mark.parametrize(
        "doc",
        [
            {"dense": [[[1, 0]]]},
            {"n_qubits": 1},
            {"n_qubits": 1, "dense": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]], "extra": 1},
            {"n_qubits": 1, "dense": [[[1, 0]]]},
            {"n_qubits": 2, "pauli_terms": [{"string": "Z", "coeff": 1}]},
            {"n_qubits": 2, "pauli_terms": [{"string": "ZQ", "coeff": 1}]},
            {"n_qubits": 2, "pauli_terms": [], "dense": [[[1, 0]]]},
            {"n_qubits": 2, "pairs": [{"i": 0, "j": 2, "dense": dense_doc(np.eye(4))}]},
            {"n_qubits": 2, "pairs": [{"i": 1, "j": 1, "dense": dense_doc(np.eye(4))}]},
        ],
    )
    def test_schema_errors(self, doc):
        with pytest.raises(SchemaError):
            ham.load_hamiltonian(doc)

    def test_non_hermitian(self):
        with pytest.raises(NonHermitian):
            ham.load_hamiltonian({"n_qubits": 1, "dense": dense_doc([[0, 1], [0, 0]])})

    @pytest.mark.parametrize("form", ["dense", "pairs"])
    def test_round_trip(self, form):
        h = ham.builtin_model("spin3")
        doc = json.loads(json.dumps(ham.hamiltonian_to_document(h, form)))
        h2 = ham.load_hamiltonian(doc)
        assert linalg.max_abs_diff(h.dense, h2.dense) < 1e-12
        assert h2.label == "spin3"

    def test_observable_round_trip(self, rng):
        o = ham.Observable(2, random_hermitian(rng, 4))
        o2 = ham.load_observable(json.loads(json.dumps(ham.observable_to_document(o))))
        assert linalg.max_abs_diff(o.dense, o2.dense) < 1e-12

    @pytest.mark.parametrize("name", ham.BUILTIN_MODELS)
    def test_shipped_data_matches_builtin(self, name):
        h = ham.load_hamiltonian(ham.read_document(f"data/{name}.json"))
        assert linalg.max_abs_diff(h.dense, ham.builtin_model(name).dense) < 1e-12


class TestHeisenberg:
    def test_zz(self):
        h = ham.heisenberg_pair_model(2, {(0, 1): ham.PairCoupling(jz=1.0)})
        assert np.allclose(h.dense, np.diag([1, -1, -1, 1]))

    def test_zero(self):
        h = ham.heisenberg_pair_model(2, {(0, 1): ham.PairCoupling()})
        assert np.allclose(h.dense, 0) and h.ground_energy == 0.0

    def test_random_three_qubit_spectrum(self, rng):
        n = 3
        explicit = np.zeros((8, 8), dtype=complex)
        couplings = {}
        for i, j in ham.all_pairs(n):
            jx, jy, jz = rng.normal(size=3)
            fi, fj = tuple(rng.normal(size=3)), tuple(rng.normal(size=3))
            couplings[(i, j)] = ham.PairCoupling(jx, jy, jz, fi, fj)
            for coef, a, b in ((jx, "X", "X"), (jy, "Y", "Y"), (jz, "Z", "Z")):
                f = [PAULI["I"]] * n
                f[i], f[j] = PAULI[a], PAULI[b]
                explicit += coef * linalg.kron_all(f)
            for field, q in ((fi, i), (fj, j)):
                for coef, a in zip(field, "XYZ"):
                    f = [PAULI["I"]] * n
                    f[q] = PAULI[a]
                    explicit += coef * linalg.kron_all(f)
        h = ham.heisenberg_pair_model(n, couplings)
        assert np.allclose(h.eig.eigenvalues, np.linalg.eigvalsh(explicit), atol=1e-10)

    @pytest.mark.parametrize("n", [1, 6])
    def test_bad_size(self, n):
        with pytest.raises(BadSize):
            ham.heisenberg_pair_model(n, {})

    def test_non_finite(self):
        with pytest.raises(BadSize):
            ham.heisenberg_pair_model(2, {(0, 1): ham.PairCoupling(jx=np.inf)})

    @pytest.mark.parametrize("name", ham.BUILTIN_MODELS)
    def test_eigenvalue_lower_bound(self, name):
        h = ham.builtin_model(name)
        bound = sum(np.linalg.eigvalsh(t.dense)[0] for t in h.pair_terms)
        assert h.eig.eigenvalues[0] >= bound - 1e-10


class TestPauliDecompose:
    def test_sigma_z(self):
        assert ham.pauli_decompose(np.diag([1.0, -1.0])) == [("Z", 1.0)]

    def test_identity(self):
        assert ham.pauli_decompose(np.eye(4)) == [("II", 1.0)]

    def test_random_two_qubit(self, rng):
        m = random_hermitian(rng, 4)
        terms = ham.pauli_decompose(m)
        assert len(terms) == 16
        recon = sum(c * ham.pauli_matrix(s) for s, c in terms)
        assert linalg.max_abs_diff(recon, m) < 1e-10

    def test_ordering(self):
        # qubit 0 is the leftmost character and the most significant factor
        terms = ham.pauli_decompose(np.kron(np.diag([1, -1]), np.eye(2)))
        assert terms == [("ZI", 1.0)]

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 3), st.integers(0, 2**32 - 1))
    def test_reconstruction_property(self, n, seed):
        m = random_hermitian(np.random.default_rng(seed), 1 << n)
        recon = sum(c * ham.pauli_matrix(s) for s, c in ham.pauli_decompose(m))
        assert linalg.max_abs_diff(recon, m) < 1e-10


class TestObservable:
    def test_spread(self):
        o = ham.Observable(1, np.diag([-1.0, 1.0]))
        assert o.lambda_min == pytest.approx(-1) and o.spread == pytest.approx(2)
        assert not o.degenerate

    def test_degenerate(self):
        assert ham.Observable(2, 3 * np.eye(4)).degenerate

    def test_support(self):
        assert ham.observable_support(ham.sigma_z(1, 3)) == (1,)
        assert ham.observable_support(ham.Observable.from_hamiltonian(ham.builtin_model("spin3"))) == (0, 1, 2)

    @pytest.mark.parametrize("spec, string", [("sz0", "ZII"), ("sx2", "IIX"), ("sy1", "IYI"), ("XZY", "XZY")])
    def test_resolve(self, spec, string):
        o = ham.resolve_observable(spec, ham.builtin_model("spin3"))
        assert np.allclose(o.dense, ham.pauli_matrix(string))

    def test_resolve_errors(self):
        with pytest.raises(SchemaError):
            ham.resolve_observable("sz5", ham.builtin_model("spin3"))
        with pytest.raises(SchemaError):
            ham.resolve_observable("nope", ham.builtin_model("spin3"))
