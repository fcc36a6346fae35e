"""
Gate-level circuits and an exact density-matrix simulator.

Qubits are tagged by role (``system``, ``mme_ancilla``, ``qitp_ancilla``,
``obs_ancilla``). The simulator allocates a qubit in |0> the first time a
gate touches it and drops it once measured, so a Trotterized pipeline on 19
logical qubits never holds more than a few of them at once.

Measurement kinds:

* ``measure_discard``: partial trace, no bookkeeping.
* ``measure_postselect``: project on ``outcome``, renormalize, multiply the
  outcome probability into ``accumulated_prob``.
* ``measure``: record the outcome distribution and discard the qubit.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import linalg
from .config import ANGLE_SIG_DIGITS, BRANCH_PRUNE_PROB, POSTSELECT_MIN_PROB, UNITARITY_TOL
from .errors import BadSize, DegenerateObservable, InvalidCircuit, NoPairTerms, ZeroProbabilityPostselection
from .hamiltonian import Hamiltonian, Observable, observable_support
from .linalg import partial_trace
from .propagator import (
    QitpParams,
    TrotterPlan,
    check_feasible,
    contraction_diagonal,
    pair_trial_energies,
)

ROLES = ("system", "mme_ancilla", "qitp_ancilla", "obs_ancilla")
MEASURE_KINDS = ("measure_discard", "measure_postselect", "measure")
KINDS = ("h", "cx", "ry", "unitary") + MEASURE_KINDS

_H = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)
_CX = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128)


def ry_matrix(angle: float) -> np.ndarray:
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


@dataclass(frozen=True, eq=False)
class Gate:
    kind: str
    targets: tuple[int, ...]
    controls: tuple[int, ...] = ()
    angle: float | None = None
    matrix: np.ndarray | None = field(default=None, repr=False)
    outcome: int | None = None
    label: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidCircuit(f"unknown gate kind {self.kind!r}")
        qubits = self.targets + self.controls
        if len(set(qubits)) != len(qubits) or any(q < 0 for q in qubits):
            raise InvalidCircuit(f"gate {self.kind} has repeated or negative qubits {qubits}")
        if self.kind == "ry" and (self.angle is None or not np.isfinite(self.angle)):
            raise InvalidCircuit("ry needs a finite angle")
        if self.kind == "unitary":
            m = linalg.as_matrix(self.matrix)
            if m.shape != (1 << len(self.targets),) * 2 or not linalg.is_unitary(m, UNITARITY_TOL):
                raise InvalidCircuit(f"unitary payload on {self.targets} is not a {len(self.targets)}-qubit unitary")
            m = m.copy()
            m.flags.writeable = False
            object.__setattr__(self, "matrix", m)
        if self.kind == "cx" and (len(self.controls) != 1 or len(self.targets) != 1):
            raise InvalidCircuit("cx takes exactly one control and one target")
        if self.kind in MEASURE_KINDS and len(self.targets) != 1:
            raise InvalidCircuit("measurements act on a single qubit")
        if self.kind == "measure_postselect" and self.outcome not in (0, 1):
            raise InvalidCircuit("post-selection needs outcome 0 or 1")

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.controls + self.targets

    def unitary(self) -> np.ndarray:
        """Matrix acting on :attr:`qubits` (controls first)."""
        if self.kind == "h":
            return _H
        if self.kind == "cx":
            return _CX
        if self.kind == "ry":
            return ry_matrix(self.angle)
        if self.kind == "unitary":
            return self.matrix
        raise InvalidCircuit(f"{self.kind} is not unitary")


def h(q: int) -> Gate:
    return Gate("h", (q,))


def cx(control: int, target: int) -> Gate:
    return Gate("cx", (target,), (control,))


def ry(q: int, angle: float) -> Gate:
    return Gate("ry", (q,), angle=float(angle))


def unitary(qubits: Sequence[int], m: np.ndarray, label: str = "") -> Gate:
    return Gate("unitary", tuple(qubits), matrix=m, label=label)


@dataclass(frozen=True, eq=False)
class Circuit:
    n_total: int
    roles: tuple[str, ...]
    gates: tuple[Gate, ...] = ()

    def __post_init__(self):
        if len(self.roles) != self.n_total:
            raise InvalidCircuit(f"{len(self.roles)} roles for {self.n_total} qubits")
        if any(r not in ROLES for r in self.roles):
            raise InvalidCircuit(f"unknown role in {self.roles}")
        for g in self.gates:
            if any(q >= self.n_total for q in g.qubits):
                raise InvalidCircuit(f"gate {g.kind} on {g.qubits} exceeds {self.n_total} qubits")
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "roles", tuple(self.roles))

    def qubits_with_role(self, role: str) -> list[int]:
        return [q for q, r in enumerate(self.roles) if r == role]

    def gate_counts(self) -> dict[str, int]:
        counts = Counter(g.kind for g in self.gates)
        return {k: counts.get(k, 0) for k in KINDS}

    def recorded_measurements(self) -> list[Gate]:
        return [g for g in self.gates if g.kind in ("measure_postselect", "measure")]


# -- simulation ---------------------------------------------------------------


@dataclass
class RegisterState:
    """Density matrix over ``live_qubits`` (first entry is the most significant)."""

    rho: np.ndarray
    live_qubits: list[int]
    accumulated_prob: float = 1.0
    # qubit -> (P(0), P(1)) for recorded but not post-selected measurements
    recorded: dict[int, tuple[float, float]] = field(default_factory=dict)

    @classmethod
    def empty(cls) -> "RegisterState":
        return cls(np.ones((1, 1), dtype=np.complex128), [])

    @classmethod
    def zeros(cls, qubits: Sequence[int]) -> "RegisterState":
        st = cls.empty()
        for q in qubits:
            st = _allocate(st, q)
        return st

    def reduced(self, qubits: Sequence[int]) -> np.ndarray:
        """Density matrix on ``qubits`` in the given order."""
        n = len(self.live_qubits)
        pos = [self.live_qubits.index(q) for q in qubits]
        r = partial_trace(self.rho, pos, n)
        # partial_trace keeps ascending positions; reorder to the requested order
        order = sorted(range(len(pos)), key=lambda k: pos[k])
        k = len(pos)
        perm = [order.index(i) for i in range(k)]
        t = r.reshape((2,) * (2 * k)).transpose(perm + [k + p for p in perm])
        return t.reshape(1 << k, 1 << k)


def _allocate(st: RegisterState, q: int) -> RegisterState:
    zero = np.zeros((2, 2), dtype=np.complex128)
    zero[0, 0] = 1.0
    return RegisterState(np.kron(st.rho, zero), st.live_qubits + [q], st.accumulated_prob, dict(st.recorded))


def _apply_unitary(rho: np.ndarray, u: np.ndarray, pos: Sequence[int], n: int) -> np.ndarray:
    k = len(pos)
    t = rho.reshape((2,) * (2 * n))
    ut = u.reshape((2,) * (2 * k))
    t = np.tensordot(ut, t, axes=(list(range(k, 2 * k)), list(pos)))
    t = np.moveaxis(t, list(range(k)), list(pos))
    cols = [n + p for p in pos]
    t = np.tensordot(t, ut.conj(), axes=(cols, list(range(k, 2 * k))))
    t = np.moveaxis(t, list(range(2 * n - k, 2 * n)), cols)
    return t.reshape(1 << n, 1 << n)


def _slice(rho: np.ndarray, pos: int, n: int, bit: int) -> np.ndarray:
    t = rho.reshape((2,) * (2 * n))
    idx = [slice(None)] * (2 * n)
    idx[pos] = bit
    idx[n + pos] = bit
    d = 1 << (n - 1)
    return np.ascontiguousarray(t[tuple(idx)]).reshape(d, d)


def _prepare(st: RegisterState, g: Gate) -> RegisterState:
    for q in g.qubits:
        if q not in st.live_qubits:
            st = _allocate(st, q)
    return st


def _check_state(st: RegisterState, tol: float = 1e-10) -> None:
    r = st.rho
    if abs(np.trace(r).real - 1.0) > tol:
        raise InvalidCircuit(f"trace drifted to {np.trace(r).real}")
    if linalg.max_abs_diff(r, linalg.dagger(r)) > tol:
        raise InvalidCircuit("density matrix lost hermiticity")
    if np.min(np.linalg.eigvalsh(0.5 * (r + linalg.dagger(r)))) < -tol:
        raise InvalidCircuit("density matrix lost positivity")


def simulate(
    c: Circuit,
    initial: RegisterState | None = None,
    *,
    check: bool = False,
    materialize: bool = True,
) -> RegisterState:
    """
    Run ``c`` exactly on density matrices.

    ``initial`` defaults to every qubit in |0> (allocated lazily). With
    ``materialize`` the untouched, unmeasured qubits are added in |0> at the
    end so the result covers every qubit still alive. ``check`` validates
    trace, hermiticity and positivity after every gate.

    Raises
    ------
    ZeroProbabilityPostselection
        If a post-selected outcome has probability below 1e-14.
    """
    st = initial if initial is not None else RegisterState.empty()
    st = RegisterState(st.rho.copy(), list(st.live_qubits), st.accumulated_prob, dict(st.recorded))
    removed: set[int] = set()
    for g in c.gates:
        if any(q in removed for q in g.qubits):
            raise InvalidCircuit(f"gate {g.kind} acts on already measured qubit(s) {g.qubits}")
        st = _prepare(st, g)
        n = len(st.live_qubits)
        if g.kind in MEASURE_KINDS:
            q = g.targets[0]
            pos = st.live_qubits.index(q)
            parts = [_slice(st.rho, pos, n, b) for b in (0, 1)]
            probs = [float(np.trace(p).real) for p in parts]
            live = st.live_qubits[:pos] + st.live_qubits[pos + 1 :]
            if g.kind == "measure_postselect":
                pb = probs[g.outcome]
                if pb < POSTSELECT_MIN_PROB:
                    raise ZeroProbabilityPostselection(
                        f"outcome {g.outcome} on qubit {q} has probability {pb:.3e}"
                    )
                st = RegisterState(parts[g.outcome] / pb, live, st.accumulated_prob * pb, st.recorded)
            else:
                if g.kind == "measure":
                    tot = probs[0] + probs[1]
                    st.recorded[q] = (probs[0] / tot, probs[1] / tot)
                st = RegisterState(parts[0] + parts[1], live, st.accumulated_prob, st.recorded)
            removed.add(q)
        else:
            pos = [st.live_qubits.index(q) for q in g.qubits]
            st.rho = _apply_unitary(st.rho, g.unitary(), pos, n)
        if check:
            _check_state(st)
    if materialize:
        for q in range(c.n_total):
            if q not in removed and q not in st.live_qubits:
                st = _allocate(st, q)
    return st


def _apply_unitary_batch(rhos: np.ndarray, u: np.ndarray, pos: Sequence[int], n: int) -> np.ndarray:
    """:func:`_apply_unitary` over a leading batch axis."""
    b = rhos.shape[0]
    k = len(pos)
    t = rhos.reshape((b,) + (2,) * (2 * n))
    ut = u.reshape((2,) * (2 * k))
    rows = [1 + p for p in pos]
    t = np.tensordot(ut, t, axes=(list(range(k, 2 * k)), rows))
    t = np.moveaxis(t, list(range(k)), rows)
    cols = [1 + n + p for p in pos]
    t = np.tensordot(t, ut.conj(), axes=(cols, list(range(k, 2 * k))))
    t = np.moveaxis(t, list(range(2 * n + 1 - k, 2 * n + 1)), cols)
    return t.reshape(b, 1 << n, 1 << n)


def outcome_distribution(c: Circuit, initial: RegisterState | None = None) -> dict[str, float]:
    """
    Exact joint distribution of every recorded measurement.

    ``measure_postselect`` and ``measure`` gates both count as recorded here
    (post-selection is a property of the estimator, not of sampling). Keys
    are bitstrings in gate order; see :func:`recorded_layout`. All branches
    share one live-qubit layout and are evolved together as a batch.
    """
    st0 = initial if initial is not None else RegisterState.empty()
    live = list(st0.live_qubits)
    rhos = st0.rho[None].copy()
    keys = [""]
    zero = np.zeros((2, 2), dtype=np.complex128)
    zero[0, 0] = 1.0
    for g in c.gates:
        for q in g.qubits:
            if q not in live:
                rhos = np.einsum("bij,kl->bikjl", rhos, zero).reshape(
                    rhos.shape[0], 2 * rhos.shape[1], 2 * rhos.shape[2]
                )
                live.append(q)
        n = len(live)
        if g.kind in MEASURE_KINDS:
            pos = live.index(g.targets[0])
            b = rhos.shape[0]
            t = rhos.reshape((b,) + (2,) * (2 * n))
            d = 1 << (n - 1)
            parts = []
            for bit in (0, 1):
                idx = [slice(None)] * (2 * n + 1)
                idx[1 + pos] = bit
                idx[1 + n + pos] = bit
                parts.append(t[tuple(idx)].reshape(b, d, d))
            live = live[:pos] + live[pos + 1 :]
            if g.kind == "measure_discard":
                rhos = parts[0] + parts[1]
            else:
                weights = [np.einsum("bii->b", x).real for x in parts]
                new_keys, new_rhos = [], []
                for bit in (0, 1):
                    keep = weights[bit] > BRANCH_PRUNE_PROB
                    new_rhos.append(parts[bit][keep])
                    new_keys += [k + str(bit) for k, m in zip(keys, keep) if m]
                rhos = np.concatenate(new_rhos, axis=0)
                keys = new_keys
        else:
            pos = [live.index(q) for q in g.qubits]
            rhos = _apply_unitary_batch(rhos, g.unitary(), pos, n)
    weights = np.einsum("bii->b", rhos).real
    dist: dict[str, float] = {}
    for k, w in zip(keys, weights):
        dist[k] = dist.get(k, 0.0) + float(w)
    total = sum(dist.values())
    return {k: v / total for k, v in sorted(dist.items())}


def recorded_layout(c: Circuit) -> tuple[tuple[int, ...], tuple[str, ...]]:
    """Qubit and role for each character of :func:`outcome_distribution` keys."""
    gates = c.recorded_measurements()
    qubits = tuple(g.targets[0] for g in gates)
    return qubits, tuple(c.roles[q] for q in qubits)


def circuit_unitary(c: Circuit, order: Sequence[int] | None = None) -> np.ndarray:
    """Full unitary of a measurement-free circuit; ``order`` sets tensor order."""
    order = list(range(c.n_total)) if order is None else list(order)
    if sorted(order) != list(range(c.n_total)):
        raise InvalidCircuit(f"order {order} is not a permutation of the circuit's qubits")
    n = c.n_total
    dim = 1 << n
    # evolve the identity column by column: U = U I
    t = np.eye(dim, dtype=np.complex128).reshape((2,) * n + (dim,))
    for g in c.gates:
        if g.kind in MEASURE_KINDS:
            raise InvalidCircuit("circuit_unitary needs a measurement-free circuit")
        pos = [order.index(q) for q in g.qubits]
        k = len(pos)
        ut = g.unitary().reshape((2,) * (2 * k))
        t = np.tensordot(ut, t, axes=(list(range(k, 2 * k)), pos))
        t = np.moveaxis(t, list(range(k)), pos)
    return t.reshape(dim, dim)


# -- compilation ---------------------------------------------------------------


def gray(j: int) -> int:
    return j ^ (j >> 1)


def multiplexer_angles(targets: np.ndarray) -> np.ndarray:
    """
    Physical Ry angles for a Gray-code multiplexed rotation.

    ``targets[i]`` is the rotation wanted when the controls encode ``i``
    (first control = most significant bit). Solves
    ``targets = M phi`` with ``M[i, j] = (-1)^popcount(i & gray(j))``.
    """
    alpha = np.asarray(targets, dtype=float)
    size = alpha.size
    if size & (size - 1):
        raise BadSize(f"multiplexer needs a power-of-two number of angles, got {size}")
    idx = np.arange(size)
    g = np.array([gray(j) for j in range(size)])
    parity = np.array([[bin(i & gj).count("1") & 1 for gj in g] for i in idx])
    m = 1.0 - 2.0 * parity
    return m.T @ alpha / size


def multiplexed_ry(target: int, controls: Sequence[int], targets: np.ndarray) -> list[Gate]:
    """Alternating Ry / CNOT sequence, CNOT controls following Gray-code bit flips.

    Uses ``2^k`` rotations and ``2^k`` CNOTs for ``k`` controls.
    """
    k = len(controls)
    phi = multiplexer_angles(targets)
    size = 1 << k
    if phi.size != size:
        raise BadSize(f"{phi.size} angles for {k} controls")
    gates = []
    for j in range(size):
        gates.append(ry(target, phi[j]))
        if k == 0:
            continue
        flipped = gray(j) ^ gray((j + 1) % size)
        bit = flipped.bit_length() - 1
        gates.append(cx(controls[k - 1 - bit], target))
    return gates


def dilation_gates(
    contraction: np.ndarray,
    eigvecs: np.ndarray,
    ancilla: int,
    system: Sequence[int],
    label: str = "",
) -> list[Gate]:
    """
    Gates realizing ``[[C, S], [-S, C]]`` (ancilla as block index) where
    ``C = V diag(c) V^dagger`` on ``system``.

    Change to the eigenbasis, rotate the ancilla by ``-2 arccos(c_i)``
    conditioned on eigen-index ``i``, change back.
    """
    theta = np.arccos(np.clip(contraction, -1.0, 1.0))
    v = linalg.as_matrix(eigvecs)
    return [
        unitary(system, linalg.dagger(v), f"{label}_basis_dag" if label else "basis_dag"),
        *multiplexed_ry(ancilla, list(system), -2.0 * theta),
        unitary(system, v, f"{label}_basis" if label else "basis"),
    ]


def compile_qitp_gray(
    h: Hamiltonian,
    tau: float,
    e_trial: float,
    p: float,
    *,
    ancilla: int = 0,
    system: Sequence[int] | None = None,
) -> Circuit:
    """
    Compile the thermal dilation into basis changes plus a Gray-code
    multiplexed Ry. With default placement the ancilla is qubit 0 and the
    system occupies qubits ``1..n``, so :func:`circuit_unitary` of the
    result compares directly with ``qitp_th_matrix``.

    Raises
    ------
    InfeasibleParams
    """
    system = list(range(1, h.n_sys + 1)) if system is None else list(system)
    if len(system) != h.n_sys:
        raise BadSize(f"{len(system)} system qubits for a {h.n_sys}-qubit Hamiltonian")
    c = contraction_diagonal(h.eig.eigenvalues, tau, e_trial, p)
    gates = dilation_gates(c, h.eig.eigenvectors, ancilla, system, "qitp")
    n_total = max([ancilla, *system]) + 1
    roles = ["system"] * n_total
    roles[ancilla] = "qitp_ancilla"
    return Circuit(n_total, tuple(roles), tuple(gates))


def observable_amplitudes(o: Observable) -> np.ndarray:
    """Eigenvalues of ``A = sqrt((O - lambda_0)/spread)``."""
    if o.degenerate:
        raise DegenerateObservable(f"observable {o.label!r} is proportional to the identity")
    x = (o.eig.eigenvalues - o.lambda_min) / o.spread
    return np.sqrt(np.clip(x, 0.0, 1.0))


def observable_gates(o: Observable, ancilla: int, system: Sequence[int]) -> list[Gate]:
    """Dilation of ``A`` compiled only on the qubits where ``o`` acts."""
    support = observable_support(o)
    n = o.n_sys
    if len(support) < n:
        keep = list(support)
        reduced = partial_trace(o.dense, keep, n) / (1 << (n - len(keep)))
        sub = Observable(len(keep), reduced, o.label)
        return dilation_gates(observable_amplitudes(sub), sub.eig.eigenvectors, ancilla, [system[k] for k in keep], "obs")
    return dilation_gates(observable_amplitudes(o), o.eig.eigenvectors, ancilla, list(system), "obs")


def build_mme_prep(n_sys: int) -> Circuit:
    """Maximally mixed system register: H on each system qubit, CNOT onto a
    partner ancilla, discard the ancilla. System qubits ``0..n-1``,
    ancillas ``n..2n-1``."""
    if not 1 <= n_sys <= 5:
        raise BadSize(f"n_sys must be in 1..5, got {n_sys}")
    roles = ("system",) * n_sys + ("mme_ancilla",) * n_sys
    return Circuit(2 * n_sys, roles, tuple(_mme_gates(n_sys)))


def _mme_gates(n_sys: int) -> list[Gate]:
    gates = []
    for q in range(n_sys):
        a = n_sys + q
        gates += [h(q), cx(q, a), Gate("measure_discard", (a,))]
    return gates


def build_thermal_pipeline(
    h: Hamiltonian,
    params: QitpParams,
    plan: TrotterPlan | None = None,
    obs: Observable | None = None,
) -> Circuit:
    """
    Full preparation circuit.

    Layout: system ``0..n-1``, maximally-mixed ancillas ``n..2n-1``, one
    QITP ancilla per applied propagator, then the observable ancilla. Every
    QITP ancilla is post-selected on |0> right after its fragment; the
    observable ancilla is measured without post-selection.
    """
    n = h.n_sys
    if n > 5:
        raise BadSize(f"pipeline supports up to 5 system qubits, got {n}")
    if obs is not None and obs.n_sys != n:
        raise BadSize(f"observable on {obs.n_sys} qubits, Hamiltonian on {n}")
    system = list(range(n))
    gates = _mme_gates(n)
    roles = ["system"] * n + ["mme_ancilla"] * n
    if plan is None:
        params.check_feasible(h)
        c = contraction_diagonal(h.eig.eigenvalues, params.tau, params.e_trial, params.p)
        anc = len(roles)
        roles.append("qitp_ancilla")
        gates += dilation_gates(c, h.eig.eigenvectors, anc, system, "qitp")
        gates.append(Gate("measure_postselect", (anc,), outcome=0))
    else:
        if not h.pair_terms:
            raise NoPairTerms("Trotter plan given for a Hamiltonian without pair terms")
        shifts = pair_trial_energies(h)
        eigs = {k: linalg.hermitian_eig(t.dense) for k, t in enumerate(h.pair_terms)}
        for entry in plan.term_sequence:
            es = eigs[entry.term_index]
            check_feasible(float(es.eigenvalues[0]), entry.tau, shifts[entry.term_index], params.p)
            c = contraction_diagonal(es.eigenvalues, entry.tau, shifts[entry.term_index], params.p)
            anc = len(roles)
            roles.append("qitp_ancilla")
            gates += dilation_gates(c, es.eigenvectors, anc, list(entry.qubits), f"qitp{entry.term_index}")
            gates.append(Gate("measure_postselect", (anc,), outcome=0))
    if obs is not None and not obs.degenerate:
        anc = len(roles)
        roles.append("obs_ancilla")
        gates += observable_gates(obs, anc, system)
        gates.append(Gate("measure", (anc,)))
    return Circuit(len(roles), tuple(roles), tuple(gates))


def n_qitp_ancillas(c: Circuit) -> int:
    return len(c.qubits_with_role("qitp_ancilla"))


def with_gates(c: Circuit, gates: Iterable[Gate]) -> Circuit:
    return Circuit(c.n_total, c.roles, c.gates + tuple(gates))


# -- dump format ----------------------------------------------------------------


def _round_angle(a: float) -> float:
    return float(f"{a:.{ANGLE_SIG_DIGITS}g}")


def gate_to_dict(g: Gate) -> dict:
    d: dict = {"kind": g.kind, "targets": list(g.targets), "controls": list(g.controls)}
    if g.angle is not None:
        d["angle"] = _round_angle(g.angle)
    if g.outcome is not None:
        d["outcome"] = g.outcome
    if g.matrix is not None:
        d["matrix"] = [[[_round_angle(z.real), _round_angle(z.imag)] for z in row] for row in g.matrix]
    if g.label:
        d["label"] = g.label
    return d


def gate_from_dict(d: dict) -> Gate:
    m = None
    if "matrix" in d:
        m = np.array([[complex(a, b) for a, b in row] for row in d["matrix"]])
    return Gate(
        d["kind"],
        tuple(d["targets"]),
        tuple(d.get("controls", ())),
        d.get("angle"),
        m,
        d.get("outcome"),
        d.get("label", ""),
    )


def circuit_to_dict(c: Circuit) -> dict:
    """Dump layout: ``qubit_order`` documents that qubit 0 is the most
    significant tensor factor of every multi-qubit ``matrix``."""
    return {
        "n_total": c.n_total,
        "qubit_order": "big-endian: first listed target is the most significant factor",
        "roles": list(c.roles),
        "gates": [gate_to_dict(g) for g in c.gates],
    }


def circuit_from_dict(d: dict) -> Circuit:
    return Circuit(int(d["n_total"]), tuple(d["roles"]), tuple(gate_from_dict(g) for g in d["gates"]))


def dumps_circuit(c: Circuit) -> str:
    return json.dumps(circuit_to_dict(c), indent=1, sort_keys=True)
