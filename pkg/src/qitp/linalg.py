"""
Dense complex linear algebra for operators on a handful of qubits.

Matrices are plain ``numpy`` complex arrays. Qubit 0 is the most significant
tensor factor everywhere, so ``kron(a, b)`` puts ``a`` on qubit 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .config import HERMITICITY_TOL, MAX_QUBITS
from .errors import BadDimension, BadIndex, DomainError, NonHermitian, NonSquare

__all__ = [
    "Eigensystem",
    "as_matrix",
    "check_hermitian",
    "dagger",
    "hermitian_eig",
    "is_unitary",
    "kron",
    "kron_all",
    "matrix_func_hermitian",
    "max_abs_diff",
    "n_qubits_of",
    "partial_trace",
]


def as_matrix(m) -> np.ndarray:
    """Coerce ``m`` to a 2-D complex128 array (copying only when needed)."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise BadDimension(f"expected a non-empty 2-D matrix, got shape {a.shape}")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(m).T


def max_abs_diff(a, b) -> float:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise BadDimension(f"shape mismatch {a.shape} vs {b.shape}")
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a - b)))


def n_qubits_of(m: np.ndarray) -> int:
    dim = m.shape[0]
    n = dim.bit_length() - 1
    if dim != 1 << n or m.shape[0] != m.shape[1]:
        raise BadDimension(f"matrix of shape {m.shape} is not a qubit operator")
    if n > MAX_QUBITS:
        raise BadDimension(f"{n} qubits exceeds the dense limit of {MAX_QUBITS}")
    return n


def check_hermitian(m, tol: float = HERMITICITY_TOL) -> np.ndarray:
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise NonSquare(f"matrix of shape {a.shape} is not square")
    asym = max_abs_diff(a, dagger(a))
    if asym > tol:
        raise NonHermitian(f"max |m - m^dagger| = {asym:.3e} exceeds {tol:.0e}")
    return a


def is_unitary(m, tol: float = 1e-10) -> bool:
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        return False
    return max_abs_diff(dagger(a) @ a, np.eye(a.shape[0])) <= tol


@dataclass(frozen=True, eq=False)
class Eigensystem:
    """Ascending eigenvalues and the unitary whose columns are eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ dagger(v)


def hermitian_eig(m) -> Eigensystem:
    """
    Diagonalize a Hermitian matrix.

    Eigenvalues come back in ascending order. Each eigenvector's phase is
    fixed so that its largest-magnitude component is real and positive,
    which makes the output reproducible for identical input.

    Raises
    ------
    NonSquare, NonHermitian
    """
    a = check_hermitian(m)
    # symmetrize away the sub-tolerance anti-Hermitian part
    a = 0.5 * (a + dagger(a))
    w, v = np.linalg.eigh(a)
    order = np.argsort(w, kind="stable")
    w = np.ascontiguousarray(w[order])
    v = np.ascontiguousarray(v[:, order])
    pivots = np.argmax(np.abs(v), axis=0)
    phases = v[pivots, np.arange(v.shape[1])]
    v = v * (np.abs(phases) / phases)
    w.flags.writeable = False
    v.flags.writeable = False
    return Eigensystem(w, v)


def matrix_func_hermitian(
    m,
    f: Callable[[np.ndarray], np.ndarray],
    eig: Eigensystem | None = None,
) -> np.ndarray:
    """
    Apply a real scalar function through the spectral decomposition.

    Returns ``V diag(f(E)) V^dagger``. ``f`` is called once on the array of
    eigenvalues; a precomputed ``eig`` skips the diagonalization.

    Raises
    ------
    DomainError
        If ``f`` produces a non-finite value at some eigenvalue.
    """
    es = eig if eig is not None else hermitian_eig(m)
    with np.errstate(all="ignore"):
        fw = np.asarray(f(es.eigenvalues))
    if fw.shape != es.eigenvalues.shape or not np.all(np.isfinite(fw)):
        bad = es.eigenvalues[~np.isfinite(fw)] if fw.shape == es.eigenvalues.shape else es.eigenvalues
        raise DomainError(f"function undefined at eigenvalue(s) {bad.tolist()}")
    v = es.eigenvectors
    return (v * fw) @ dagger(v)


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def kron_all(mats: Iterable) -> np.ndarray:
    out = np.ones((1, 1), dtype=np.complex128)
    for m in mats:
        out = np.kron(out, as_matrix(m))
    return out


def partial_trace(rho, keep: Sequence[int], total_qubits: int) -> np.ndarray:
    """
    Trace out every qubit not listed in ``keep``.

    The kept qubits stay in ascending index order regardless of the order
    given in ``keep``.
    """
    r = as_matrix(rho)
    dim = 1 << total_qubits
    if r.shape != (dim, dim):
        raise BadDimension(f"expected {dim}x{dim} for {total_qubits} qubits, got {r.shape}")
    kept = sorted(set(int(k) for k in keep))
    if len(kept) != len(list(keep)) or any(k < 0 or k >= total_qubits for k in kept):
        raise BadIndex(f"keep={list(keep)} invalid for {total_qubits} qubits")
    traced = [q for q in range(total_qubits) if q not in kept]
    t = r.reshape((2,) * (2 * total_qubits))
    # trace highest indices first so the remaining axis numbers stay valid
    n_live = total_qubits
    for q in sorted(traced, reverse=True):
        t = np.trace(t, axis1=q, axis2=q + n_live)
        n_live -= 1
    d = 1 << len(kept)
    return t.reshape(d, d)
