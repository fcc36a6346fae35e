"""
Dilated imaginary-time operators, the exact thermal oracle and Trotter plans.

All dilated operators act on ``ancilla (x) system`` with the ancilla as the
2x2 block index: the top-left block is what survives post-selecting the
ancilla on |0>.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import linalg
from .config import FEASIBILITY_TOL
from .errors import InfeasibleParams, NoPairTerms
from .hamiltonian import Hamiltonian, embed_pair


@dataclass(frozen=True)
class QitpParams:
    """Inverse temperature, trial energy, success parameter and Trotter schedule."""

    beta: float
    e_trial: float
    p: float = 1.0
    trotter_steps: int | None = None

    def __post_init__(self):
        if not np.isfinite(self.beta) or self.beta < 0:
            raise InfeasibleParams(f"beta must be finite and >= 0, got {self.beta}")
        if not 0 < self.p <= 1:
            raise InfeasibleParams(f"p must lie in (0, 1], got {self.p}")
        if self.trotter_steps is not None and self.trotter_steps < 1:
            raise InfeasibleParams(f"trotter_steps must be >= 1, got {self.trotter_steps}")

    @property
    def tau(self) -> float:
        return 0.5 * self.beta

    def check_feasible(self, h: Hamiltonian) -> None:
        check_feasible(h.ground_energy, self.tau, self.e_trial, self.p, beta=self.beta)


def check_feasible(e0: float, tau: float, e_trial: float, p: float, beta: float | None = None) -> None:
    """Raise unless ``p * exp(-2 tau (E_0 - E_T)) <= 1``."""
    peak = p * np.exp(-2.0 * tau * (e0 - e_trial))
    if peak > 1.0 + FEASIBILITY_TOL:
        where = f" at beta={beta}" if beta is not None else ""
        raise InfeasibleParams(
            f"p*exp(-2 tau (E0 - E_T)) = {peak:.6g} > 1{where} (E0={e0:.6g}, E_T={e_trial:.6g}, p={p})"
        )


def contraction_diagonal(eigenvalues: np.ndarray, tau: float, e_trial: float, p: float) -> np.ndarray:
    """Eigenvalues ``sqrt(p) exp(-tau (E_i - E_T))`` of the kept block, clipped to [0, 1]."""
    check_feasible(float(np.min(eigenvalues)), tau, e_trial, p)
    c = np.sqrt(p) * np.exp(-tau * (np.asarray(eigenvalues) - e_trial))
    return np.minimum(c, 1.0)


def rotation_dilation(contraction: np.ndarray, eigvecs: np.ndarray) -> np.ndarray:
    """Block unitary ``[[C, S], [-S, C]]`` with ``C = V diag(c) V^dagger``, ``S = sqrt(1 - C^2)``."""
    c = np.asarray(contraction, dtype=float)
    s = np.sqrt(np.clip(1.0 - c * c, 0.0, None))
    v = eigvecs
    cm = (v * c) @ linalg.dagger(v)
    sm = (v * s) @ linalg.dagger(v)
    return np.block([[cm, sm], [-sm, cm]])


def gibbs_oracle(h: Hamiltonian, beta: float, e_trial: float) -> tuple[np.ndarray, float]:
    """Unnormalized thermal matrix ``exp(-beta (H - E_T))`` and its trace."""
    if beta < 0:
        raise InfeasibleParams(f"beta must be >= 0, got {beta}")
    if beta == 0:
        # exact: avoids eigenvector round-off in V V^dagger
        return np.eye(h.dim, dtype=np.complex128), float(h.dim)
    rho = _gibbs_cached(h.dense.tobytes(), h.dim, float(beta), float(e_trial))
    return rho, float(np.trace(rho).real)


_cache_lock = threading.Lock()


@lru_cache(maxsize=512)
def _gibbs_uncached(key: bytes, dim: int, beta: float, e_trial: float) -> np.ndarray:
    m = np.frombuffer(key, dtype=np.complex128).reshape(dim, dim)
    rho = linalg.matrix_func_hermitian(m, lambda e: np.exp(-beta * (e - e_trial)))
    rho.flags.writeable = False
    return rho


def _gibbs_cached(key: bytes, dim: int, beta: float, e_trial: float) -> np.ndarray:
    # lru_cache reads are thread-safe; serialize the insert path
    with _cache_lock:
        return _gibbs_uncached(key, dim, beta, e_trial)


def thermal_expectation(h: Hamiltonian, o_dense: np.ndarray, beta: float, e_trial: float) -> float:
    rho, z = gibbs_oracle(h, beta, e_trial)
    return float(np.trace(rho @ o_dense).real / z)


def qitp_gs_matrix(h: Hamiltonian, tau: float, e_trial: float) -> np.ndarray:
    """Ground-state dilation: blocks ``e/sqrt(1+e^2)`` and ``+-1/sqrt(1+e^2)``, ``e = exp(-tau(H-E_T))``."""
    es = h.eig
    x = -tau * (es.eigenvalues - e_trial)
    # exp(x)/sqrt(1+exp(2x)) and 1/sqrt(1+exp(2x)) written in |x| to avoid overflow
    a = np.abs(x)
    big = 1.0 / np.sqrt(1.0 + np.exp(-2 * a))
    small = np.exp(-a) * big
    diag = np.where(x > 0, big, small)
    off = np.where(x > 0, small, big)
    v = es.eigenvectors
    dm = (v * diag) @ linalg.dagger(v)
    om = (v * off) @ linalg.dagger(v)
    return np.block([[dm, om], [-om, dm]])


def qitp_th_matrix(h: Hamiltonian, tau: float, e_trial: float, p: float) -> np.ndarray:
    """
    Thermal dilation with diagonal blocks ``sqrt(p) exp(-tau(H-E_T))``.

    Raises
    ------
    InfeasibleParams
        When ``p exp(-2 tau (E_i - E_T)) > 1`` for some eigenvalue.
    """
    es = h.eig
    c = contraction_diagonal(es.eigenvalues, tau, e_trial, p)
    return rotation_dilation(c, es.eigenvectors)


def rotation_angles(h_eigenvalues: np.ndarray, tau: float, e_trial: float, p: float) -> np.ndarray:
    """``theta_i = arccos(sqrt(p) exp(-tau (E_i - E_T)))`` per eigen-index."""
    return np.arccos(contraction_diagonal(h_eigenvalues, tau, e_trial, p))


def success_probability(h: Hamiltonian, params: QitpParams, n_beta: int = 1) -> float:
    """Probability that every QITP ancilla reads 0: ``p^N_beta Z(beta) / 2^n_s``."""
    params.check_feasible(h)
    _, z = gibbs_oracle(h, params.beta, params.e_trial)
    return float(params.p**n_beta * z / h.dim)


# -- Trotter -------------------------------------------------------------------


@dataclass(frozen=True)
class TrotterEntry:
    term_index: int
    qubits: tuple[int, int]
    tau: float


@dataclass(frozen=True)
class TrotterPlan:
    beta: float
    n_steps: int
    delta_beta: float
    term_sequence: tuple[TrotterEntry, ...]

    @property
    def n_qitp_ancillas(self) -> int:
        return len(self.term_sequence)


def make_trotter_plan(h: Hamiltonian, beta: float, n_steps: int) -> TrotterPlan:
    """First-order split: every step applies the pair terms in declaration order."""
    if not h.pair_terms:
        raise NoPairTerms("Trotter planning needs a Hamiltonian with pair terms")
    if n_steps < 1:
        raise InfeasibleParams(f"n_steps must be >= 1, got {n_steps}")
    if beta < 0:
        raise InfeasibleParams(f"beta must be >= 0, got {beta}")
    delta = beta / n_steps
    seq = tuple(
        TrotterEntry(k, (t.i, t.j), 0.5 * delta)
        for _ in range(n_steps)
        for k, t in enumerate(h.pair_terms)
    )
    return TrotterPlan(float(beta), int(n_steps), float(delta), seq)


def pair_trial_energies(h: Hamiltonian) -> np.ndarray:
    """Per-term trial energy: the lowest eigenvalue of each 4x4 pair term."""
    if not h.pair_terms:
        raise NoPairTerms("Hamiltonian has no pair terms")
    return np.array([float(np.linalg.eigvalsh(t.dense)[0]) for t in h.pair_terms])


def trotter_rescale(h: Hamiltonian, beta: float, e_trial: float) -> float:
    """Factor mapping a partition function built with per-term trial energies
    onto the ``E_T`` reference: ``exp(beta (E_T - sum_k E_T,k))``."""
    return float(np.exp(beta * (e_trial - pair_trial_energies(h).sum())))


def trotter_half_propagator(plan: TrotterPlan, h: Hamiltonian) -> np.ndarray:
    """Ordered product ``M`` of per-term half propagators, first entry applied first."""
    if not h.pair_terms:
        raise NoPairTerms("Hamiltonian has no pair terms")
    shifts = pair_trial_energies(h)
    factors = {}
    m = np.eye(h.dim, dtype=np.complex128)
    for entry in plan.term_sequence:
        key = (entry.term_index, entry.tau)
        if key not in factors:
            t = h.pair_terms[entry.term_index]
            shift = shifts[entry.term_index]
            local = linalg.matrix_func_hermitian(t.dense, lambda e: np.exp(-entry.tau * (e - shift)))
            factors[key] = embed_pair(local, t.i, t.j, h.n_sys)
        m = factors[key] @ m
    return m


def trotterized_gibbs_oracle(plan: TrotterPlan, h: Hamiltonian, e_trial: float) -> tuple[np.ndarray, float]:
    """Thermal matrix prepared by the Trotterized circuit, on the ``E_T`` scale.

    Returns ``rescale * M M^dagger`` and its trace, so commuting pair terms
    reproduce :func:`gibbs_oracle` exactly.
    """
    m = trotter_half_propagator(plan, h)
    rho = trotter_rescale(h, plan.beta, e_trial) * (m @ linalg.dagger(m))
    return rho, float(np.trace(rho).real)
