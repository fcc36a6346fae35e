"""
Shot sampling and the estimators built on it.

Shots are drawn in one multinomial call from the exact joint distribution of
the recorded ancilla measurements, which has the same statistics as
re-running the circuit shot by shot.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .circuit import (
    Circuit,
    Gate,
    build_thermal_pipeline,
    n_qitp_ancillas,
    outcome_distribution,
    recorded_layout,
    unitary,
    with_gates,
)
from .errors import DegenerateObservable, NoSuccesses, ZeroSigma
from .hamiltonian import Hamiltonian, Observable, pauli_decompose
from .linalg import matrix_func_hermitian
from .propagator import QitpParams, TrotterPlan


def rng_for(seed: int, *stream: int) -> np.random.Generator:
    """Independent generator for work unit ``stream`` under master ``seed``."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, stream)]))


@dataclass(frozen=True)
class ShotRecord:
    n_shots: int
    counts: Mapping[str, int]
    seed: int
    qubits: tuple[int, ...] = ()
    roles: tuple[str, ...] = ()

    def __post_init__(self):
        if sum(self.counts.values()) != self.n_shots:
            raise ValueError("counts do not sum to n_shots")
        widths = {len(k) for k in self.counts}
        if len(widths) > 1:
            raise ValueError(f"inconsistent key widths {sorted(widths)}")

    def to_dict(self) -> dict:
        return {
            "n_shots": self.n_shots,
            "seed": self.seed,
            "qubits": list(self.qubits),
            "roles": list(self.roles),
            "counts": dict(sorted(self.counts.items())),
        }

    def positions(self, role: str) -> list[int]:
        return [k for k, r in enumerate(self.roles) if r == role]

    def successes(self) -> dict[str, int]:
        """Counts restricted to shots where every QITP ancilla read 0."""
        qpos = self.positions("qitp_ancilla")
        return {k: v for k, v in self.counts.items() if all(k[i] == "0" for i in qpos)}


@dataclass(frozen=True)
class Estimate:
    value: float
    sigma: float
    n_shots: int
    method: str
    boundary: bool = False

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be non-negative")
        if self.method == "exact" and self.sigma != 0:
            raise ValueError("exact estimates carry sigma = 0")


def wilson_sigma(k: int, n: int) -> float:
    """Half-width of the z=1 Wilson score interval for ``k`` hits in ``n``."""
    if n <= 0:
        return float("nan")
    ph = k / n
    return float(np.sqrt(ph * (1 - ph) / n + 1 / (4 * n * n)) / (1 + 1 / n))


def binomial_sigma(k: int, n: int) -> tuple[float, bool]:
    """Standard error of ``k/n``; Wilson-based at the boundary ``k in {0, n}``."""
    if k in (0, n):
        return wilson_sigma(k, n), True
    ph = k / n
    return float(np.sqrt(ph * (1 - ph) / n)), False


def sample_distribution(
    dist: Mapping[str, float],
    n_shots: int,
    seed: int | np.random.Generator,
    qubits: Sequence[int] = (),
    roles: Sequence[str] = (),
) -> ShotRecord:
    if n_shots < 1:
        raise ValueError("n_shots must be >= 1")
    keys = sorted(dist)
    probs = np.array([dist[k] for k in keys], dtype=float)
    probs = probs / probs.sum()
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    draws = rng.multinomial(n_shots, probs)
    counts = {k: int(c) for k, c in zip(keys, draws) if c}
    seed_val = seed if isinstance(seed, (int, np.integer)) else -1
    return ShotRecord(int(n_shots), counts, int(seed_val), tuple(qubits), tuple(roles))


def sample(c: Circuit, n_shots: int, seed: int) -> ShotRecord:
    """Draw ``n_shots`` outcomes of every recorded measurement in ``c``."""
    qubits, roles = recorded_layout(c)
    return sample_distribution(outcome_distribution(c), n_shots, seed, qubits, roles)


def estimate_partition(record: ShotRecord, n_sys: int, p: float, n_beta: int, scale: float = 1.0) -> Estimate:
    """``Z = 2^n_s * (successes / shots) / p^N_beta``, optionally times ``scale``.

    ``scale`` maps Trotterized runs onto the caller's trial-energy reference.
    """
    k = sum(record.successes().values())
    factor = scale * (1 << n_sys) / p**n_beta
    s, boundary = binomial_sigma(k, record.n_shots)
    return Estimate(factor * k / record.n_shots, factor * s, record.n_shots, "ancilla", boundary)


def dilate_observable(o: Observable) -> np.ndarray:
    """Unitary ``[[A, sqrt(1-A^2)], [-sqrt(1-A^2), A]]`` with ``A = sqrt((O-lambda_0)/spread)``."""
    if o.degenerate:
        raise DegenerateObservable(f"observable {o.label!r} is proportional to the identity")
    a = matrix_func_hermitian(
        o.dense, lambda e: np.sqrt(np.clip((e - o.lambda_min) / o.spread, 0.0, 1.0)), o.eig
    )
    s = matrix_func_hermitian(
        o.dense, lambda e: np.sqrt(np.clip(1.0 - (e - o.lambda_min) / o.spread, 0.0, 1.0)), o.eig
    )
    return np.block([[a, s], [-s, a]])


def estimate_observable_ancilla(record: ShotRecord, o: Observable) -> Estimate:
    """
    Recover ``<O>`` from the observable ancilla among QITP-successful shots.

    ``<A^2> = P00 / (P00 + P10)``; the uncertainty is the binomial error of
    that fraction given the number of successful shots.
    """
    if o.degenerate:
        return Estimate(o.lambda_min, 0.0, record.n_shots, "exact")
    opos = record.positions("obs_ancilla")
    if len(opos) != 1:
        raise ValueError("record has no observable-ancilla column")
    succ = record.successes()
    n0 = sum(succ.values())
    if n0 == 0:
        raise NoSuccesses("no shot passed QITP post-selection")
    k = sum(v for key, v in succ.items() if key[opos[0]] == "0")
    s, boundary = binomial_sigma(k, n0)
    return Estimate((k / n0) * o.spread + o.lambda_min, s * o.spread, record.n_shots, "ancilla", boundary)


# -- Pauli expansion ------------------------------------------------------------

_TO_Z = {
    "X": np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2),
    # H S^dagger maps the Y eigenbasis onto the computational basis
    "Y": np.array([[1, -1j], [1, 1j]], dtype=np.complex128) / np.sqrt(2),
}


@dataclass(frozen=True)
class PauliTermCircuit:
    string: str
    coeff: float
    circuit: Circuit
    support: tuple[int, ...]


def pauli_term_circuits(
    h: Hamiltonian, params: QitpParams, o: Observable, plan: TrotterPlan | None = None
) -> tuple[float, list[PauliTermCircuit]]:
    """Identity coefficient and one measurement circuit per non-identity term."""
    base = build_thermal_pipeline(h, params, plan)
    ident = 0.0
    terms = []
    for s, c in pauli_decompose(o):
        support = tuple(k for k, ch in enumerate(s) if ch != "I")
        if not support:
            ident += c
            continue
        extra = [unitary((q,), _TO_Z[s[q]], f"to_z_{s[q]}") for q in support if s[q] in _TO_Z]
        extra += [Gate("measure", (q,)) for q in support]
        terms.append(PauliTermCircuit(s, c, with_gates(base, extra), support))
    return ident, terms


def pauli_term_estimate(record: ShotRecord) -> tuple[float, float, bool, int]:
    """Mean parity of the measured system qubits among successful shots."""
    spos = record.positions("system")
    succ = record.successes()
    n0 = sum(succ.values())
    if n0 == 0:
        raise NoSuccesses("no shot passed QITP post-selection")
    plus = sum(v for key, v in succ.items() if sum(key[i] == "1" for i in spos) % 2 == 0)
    s, boundary = binomial_sigma(plus, n0)
    return 2.0 * plus / n0 - 1.0, 2.0 * s, boundary, n0


def combine_pauli(ident: float, terms: Sequence[PauliTermCircuit], records: Sequence[ShotRecord], shots: int) -> Estimate:
    value, var, boundary = ident, 0.0, False
    for t, rec in zip(terms, records):
        m, s, b, _ = pauli_term_estimate(rec)
        value += t.coeff * m
        var += (t.coeff * s) ** 2
        boundary = boundary or b
    if not terms:
        return Estimate(value, 0.0, 0, "exact")
    return Estimate(value, float(np.sqrt(var)), shots * len(terms), "pauli", boundary)


def estimate_observable_pauli(
    h: Hamiltonian,
    params: QitpParams,
    o: Observable,
    shots_per_term: int,
    seed: int,
    plan: TrotterPlan | None = None,
) -> Estimate:
    """Sum of per-term parity estimates, each from its own basis-rotated circuit."""
    ident, terms = pauli_term_circuits(h, params, o, plan)
    records = []
    for k, t in enumerate(terms):
        qubits, roles = recorded_layout(t.circuit)
        records.append(
            sample_distribution(outcome_distribution(t.circuit), shots_per_term, rng_for(seed, k), qubits, roles)
        )
    return combine_pauli(ident, terms, records, shots_per_term)


# -- statistics -----------------------------------------------------------------


def reduced_chi2(estimates: Sequence[Estimate], references: Sequence[float]) -> float:
    """Mean of squared sigma-normalized residuals."""
    if len(estimates) != len(references):
        raise ValueError("estimates and references differ in length")
    if not estimates:
        raise ValueError("no estimates")
    if any(e.sigma <= 0 for e in estimates):
        raise ZeroSigma("reduced chi^2 needs strictly positive sigmas")
    r = np.array([(e.value - ref) / e.sigma for e, ref in zip(estimates, references)])
    return float(np.mean(r * r))


@dataclass(frozen=True)
class UncertaintyRow:
    method: str
    hamiltonian: str
    observable: str
    beta: float
    shots: int
    sigma_empirical: float
    sigma_of_sigma: float
    sigma_reported: float
    mean_value: float
    reps: int

    FIELDS = (
        "method",
        "hamiltonian",
        "observable",
        "beta",
        "shots",
        "sigma_empirical",
        "sigma_of_sigma",
        "sigma_reported",
        "mean_value",
        "reps",
    )

    def as_row(self) -> list:
        return [getattr(self, f) for f in self.FIELDS]


def uncertainty_study(
    hamiltonians: Sequence[Hamiltonian],
    observables: Sequence[Observable | str],
    betas: Sequence[float],
    shots_list: Sequence[int],
    seed: int,
    reps: int = 200,
    p: float = 1.0,
) -> list[UncertaintyRow]:
    """
    Empirical spread of the ancilla and Pauli estimators per cell.

    Each cell (Hamiltonian, observable, beta, shots, method) is repeated
    ``reps`` times with independent streams derived from ``seed``. The trial
    energy is each Hamiltonian's ground energy. ``observables`` entries may
    be the string ``"H"`` to mean the Hamiltonian itself.
    """
    rows = []
    cell = 0
    for h in hamiltonians:
        for o_spec in observables:
            o = Observable.from_hamiltonian(h) if isinstance(o_spec, str) else o_spec
            for beta in betas:
                params = QitpParams(float(beta), h.ground_energy, p)
                anc_circ = build_thermal_pipeline(h, params, obs=o)
                anc_dist = outcome_distribution(anc_circ)
                anc_layout = recorded_layout(anc_circ)
                ident, terms = pauli_term_circuits(h, params, o)
                term_data = [(outcome_distribution(t.circuit), recorded_layout(t.circuit)) for t in terms]
                for shots in shots_list:
                    for method in ("ancilla", "pauli"):
                        vals, sig = [], []
                        for r in range(reps):
                            rng = rng_for(seed, cell, r)
                            if method == "ancilla":
                                rec = sample_distribution(anc_dist, shots, rng, *anc_layout)
                                est = estimate_observable_ancilla(rec, o)
                            else:
                                recs = [sample_distribution(d, shots, rng, *lay) for d, lay in term_data]
                                est = combine_pauli(ident, terms, recs, shots)
                            vals.append(est.value)
                            sig.append(est.sigma)
                        sd = float(np.std(vals, ddof=1)) if reps > 1 else 0.0
                        rows.append(
                            UncertaintyRow(
                                method,
                                h.label,
                                o.label,
                                float(beta),
                                int(shots),
                                sd,
                                sd / np.sqrt(2 * (reps - 1)) if reps > 1 else 0.0,
                                float(np.mean(sig)),
                                float(np.mean(vals)),
                                reps,
                            )
                        )
                        cell += 1
    return rows
