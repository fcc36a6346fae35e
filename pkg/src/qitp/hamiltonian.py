"""
System Hamiltonians and observables.

Three document forms are accepted (JSON-compatible dicts)::

    {"n_qubits": N, "dense": [[[re, im], ...], ...]}
    {"n_qubits": N, "pauli_terms": [{"string": "XZI", "coeff": c}, ...]}
    {"n_qubits": N, "pairs": [{"i": 0, "j": 1, "dense": <4x4>}, ...]}

A pair document may additionally carry ``dense``; it is then checked against
the embedded pair sum. ``label`` is optional in every form. Pauli strings put
qubit 0 in the leftmost character.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import jsonschema
import numpy as np

from . import linalg
from .config import HERMITICITY_TOL, PAULI_COEFF_CUTOFF, RECON_TOL
from .errors import BadIndex, BadSize, PairSumMismatch, SchemaError

PAULI = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}

_COMPLEX = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
_MATRIX = {"type": "array", "minItems": 1, "items": {"type": "array", "minItems": 1, "items": _COMPLEX}}

DOCUMENT_SCHEMA = {
    "type": "object",
    "properties": {
        "n_qubits": {"type": "integer", "minimum": 1, "maximum": 12},
        "label": {"type": "string"},
        "dense": _MATRIX,
        "pauli_terms": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "string": {"type": "string", "pattern": "^[IXYZ]+$"},
                    "coeff": {"type": "number"},
                },
                "required": ["string", "coeff"],
                "additionalProperties": False,
            },
        },
        "pairs": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "properties": {
                    "i": {"type": "integer", "minimum": 0},
                    "j": {"type": "integer", "minimum": 0},
                    "dense": _MATRIX,
                },
                "required": ["i", "j", "dense"],
                "additionalProperties": False,
            },
        },
    },
    "required": ["n_qubits"],
    "additionalProperties": False,
    "oneOf": [
        {"required": ["dense"], "not": {"anyOf": [{"required": ["pauli_terms"]}, {"required": ["pairs"]}]}},
        {"required": ["pauli_terms"], "not": {"anyOf": [{"required": ["dense"]}, {"required": ["pairs"]}]}},
        {"required": ["pairs"], "not": {"required": ["pauli_terms"]}},
    ],
}


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.complex128)
    a.flags.writeable = False
    return a


def embed_pair(term, i: int, j: int, n: int) -> np.ndarray:
    """Lift a 4x4 operator on qubits ``(i, j)`` to the full ``n``-qubit space.

    The first tensor factor of ``term`` acts on qubit ``i``.
    """
    if i == j or not (0 <= i < n and 0 <= j < n):
        raise BadIndex(f"invalid pair ({i}, {j}) for {n} qubits")
    t = linalg.as_matrix(term)
    if t.shape != (4, 4):
        raise BadSize(f"pair term must be 4x4, got {t.shape}")
    return embed_operator(t, (i, j), n)


def embed_operator(op: np.ndarray, qubits: Sequence[int], n: int) -> np.ndarray:
    """Act with ``op`` on ``qubits`` (in that tensor order), identity elsewhere."""
    k = len(qubits)
    full = np.kron(op, np.eye(1 << (n - k), dtype=np.complex128))
    # full currently acts on qubits [qubits..., rest...]; permute to natural order
    rest = [q for q in range(n) if q not in qubits]
    current = list(qubits) + rest
    perm = [current.index(q) for q in range(n)]
    t = full.reshape((2,) * (2 * n))
    t = t.transpose(perm + [n + p for p in perm])
    return t.reshape(1 << n, 1 << n)


def pauli_matrix(string: str) -> np.ndarray:
    try:
        return linalg.kron_all(PAULI[c] for c in string)
    except KeyError as exc:
        raise SchemaError(f"bad Pauli character in {string!r}") from exc


@dataclass(frozen=True)
class PairTerm:
    i: int
    j: int
    dense: np.ndarray = field(repr=False, compare=False)


@dataclass(frozen=True, eq=False)
class Hamiltonian:
    """Hermitian operator on ``n_sys`` qubits, optionally split into pair terms."""

    n_sys: int
    dense: np.ndarray = field(repr=False)
    pair_terms: tuple[PairTerm, ...] | None = None
    label: str = ""

    def __post_init__(self):
        if not 1 <= self.n_sys <= 12:
            raise BadSize(f"n_sys={self.n_sys} outside 1..12")
        m = linalg.check_hermitian(self.dense, HERMITICITY_TOL)
        if m.shape != (1 << self.n_sys, 1 << self.n_sys):
            raise BadSize(f"dense shape {m.shape} does not match {self.n_sys} qubits")
        object.__setattr__(self, "dense", _frozen(m))
        if self.pair_terms is not None:
            terms = tuple(PairTerm(t.i, t.j, _frozen(linalg.check_hermitian(t.dense))) for t in self.pair_terms)
            total = sum((embed_pair(t.dense, t.i, t.j, self.n_sys) for t in terms), np.zeros_like(m))
            diff = linalg.max_abs_diff(total, m)
            if diff > RECON_TOL:
                raise PairSumMismatch(f"pair terms differ from dense by {diff:.3e}")
            object.__setattr__(self, "pair_terms", terms)
        object.__setattr__(self, "_eig", linalg.hermitian_eig(m))

    @classmethod
    def from_pairs(cls, n_sys: int, pairs: Iterable[tuple[int, int, np.ndarray]], label: str = "") -> "Hamiltonian":
        terms = tuple(PairTerm(i, j, linalg.as_matrix(t)) for i, j, t in pairs)
        dense = np.zeros((1 << n_sys, 1 << n_sys), dtype=np.complex128)
        for t in terms:
            dense = dense + embed_pair(t.dense, t.i, t.j, n_sys)
        return cls(n_sys, dense, terms, label)

    @property
    def eig(self) -> linalg.Eigensystem:
        return self._eig

    @property
    def ground_energy(self) -> float:
        return float(self._eig.eigenvalues[0])

    @property
    def dim(self) -> int:
        return 1 << self.n_sys


@dataclass(frozen=True, eq=False)
class Observable:
    """Hermitian observable with its lowest eigenvalue and spectral spread."""

    n_sys: int
    dense: np.ndarray = field(repr=False)
    label: str = ""

    def __post_init__(self):
        m = linalg.check_hermitian(self.dense, HERMITICITY_TOL)
        if m.shape != (1 << self.n_sys, 1 << self.n_sys):
            raise BadSize(f"dense shape {m.shape} does not match {self.n_sys} qubits")
        object.__setattr__(self, "dense", _frozen(m))
        es = linalg.hermitian_eig(m)
        object.__setattr__(self, "_eig", es)
        lam = es.eigenvalues
        object.__setattr__(self, "lambda_min", float(lam[0]))
        object.__setattr__(self, "spread", float(np.max(np.abs(lam - lam[0]))))

    @property
    def eig(self) -> linalg.Eigensystem:
        return self._eig

    @property
    def degenerate(self) -> bool:
        # proportional to identity: no spread to rescale by
        return self.spread <= RECON_TOL

    @classmethod
    def from_hamiltonian(cls, h: Hamiltonian, label: str | None = None) -> "Observable":
        return cls(h.n_sys, h.dense, label if label is not None else (h.label or "H"))

    @classmethod
    def pauli(cls, string: str, coeff: float = 1.0) -> "Observable":
        return cls(len(string), coeff * pauli_matrix(string), string)


def sigma_z(qubit: int, n_sys: int) -> Observable:
    s = ["I"] * n_sys
    s[qubit] = "Z"
    obs = Observable.pauli("".join(s))
    return Observable(n_sys, obs.dense, f"sz{qubit}")


# -- documents ---------------------------------------------------------------


def _matrix_from_doc(rows) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=np.complex128)


def _matrix_to_doc(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m)]


def _validate(document: Mapping) -> None:
    try:
        jsonschema.validate(dict(document), DOCUMENT_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise SchemaError(f"invalid operator document: {exc.message}") from exc


def _dense_from_document(document: Mapping) -> tuple[int, np.ndarray, tuple[PairTerm, ...] | None]:
    _validate(document)
    n = int(document["n_qubits"])
    dim = 1 << n
    pairs = None
    if "pauli_terms" in document:
        dense = np.zeros((dim, dim), dtype=np.complex128)
        for term in document["pauli_terms"]:
            if len(term["string"]) != n:
                raise SchemaError(f"Pauli string {term['string']!r} has wrong length for {n} qubits")
            dense = dense + float(term["coeff"]) * pauli_matrix(term["string"])
        return n, dense, None
    if "pairs" in document:
        pairs = []
        for p in document["pairs"]:
            t = _matrix_from_doc(p["dense"])
            if t.shape != (4, 4):
                raise SchemaError(f"pair ({p['i']}, {p['j']}) matrix must be 4x4")
            if p["i"] >= n or p["j"] >= n or p["i"] == p["j"]:
                raise SchemaError(f"pair ({p['i']}, {p['j']}) invalid for {n} qubits")
            pairs.append(PairTerm(int(p["i"]), int(p["j"]), t))
        pairs = tuple(pairs)
        summed = sum((embed_pair(t.dense, t.i, t.j, n) for t in pairs), np.zeros((dim, dim), dtype=np.complex128))
        if "dense" in document:
            declared = _matrix_from_doc(document["dense"])
            if declared.shape != (dim, dim):
                raise SchemaError(f"dense matrix must be {dim}x{dim}")
            diff = linalg.max_abs_diff(declared, summed)
            if diff > RECON_TOL:
                raise PairSumMismatch(f"declared dense differs from pair sum by {diff:.3e}")
        return n, summed, pairs
    dense = _matrix_from_doc(document["dense"])
    if dense.shape != (dim, dim):
        raise SchemaError(f"dense matrix must be {dim}x{dim}, got {dense.shape}")
    return n, dense, None


def load_hamiltonian(document: Mapping) -> Hamiltonian:
    """Validate an operator document and build a :class:`Hamiltonian`."""
    n, dense, pairs = _dense_from_document(document)
    return Hamiltonian(n, dense, pairs, document.get("label", ""))


def load_observable(document: Mapping) -> Observable:
    n, dense, _ = _dense_from_document(document)
    return Observable(n, dense, document.get("label", ""))


def hamiltonian_to_document(h: Hamiltonian, form: str = "auto") -> dict:
    """Serialize to the pair form when pair terms exist, else dense."""
    doc: dict = {"n_qubits": h.n_sys}
    if h.label:
        doc["label"] = h.label
    if form == "pairs" or (form == "auto" and h.pair_terms):
        if not h.pair_terms:
            raise SchemaError("Hamiltonian has no pair terms to serialize")
        doc["pairs"] = [{"i": t.i, "j": t.j, "dense": _matrix_to_doc(t.dense)} for t in h.pair_terms]
    else:
        doc["dense"] = _matrix_to_doc(h.dense)
    return doc


def observable_to_document(o: Observable) -> dict:
    doc: dict = {"n_qubits": o.n_sys, "dense": _matrix_to_doc(o.dense)}
    if o.label:
        doc["label"] = o.label
    return doc


def read_document(path: str | Path) -> dict:
    with open(path) as fh:
        return json.load(fh)


# -- generators --------------------------------------------------------------


@dataclass(frozen=True)
class PairCoupling:
    """Couplings of one pair term: exchange constants and local fields.

    ``field_i``/``field_j`` are (hx, hy, hz) acting on the first/second qubit.
    """

    jx: float = 0.0
    jy: float = 0.0
    jz: float = 0.0
    field_i: tuple[float, float, float] = (0.0, 0.0, 0.0)
    field_j: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def matrix(self) -> np.ndarray:
        I, X, Y, Z = (PAULI[c] for c in "IXYZ")
        m = self.jx * np.kron(X, X) + self.jy * np.kron(Y, Y) + self.jz * np.kron(Z, Z)
        for (hx, hy, hz), left in ((self.field_i, True), (self.field_j, False)):
            local = hx * X + hy * Y + hz * Z
            m = m + (np.kron(local, I) if left else np.kron(I, local))
        return m


def all_pairs(n: int) -> list[tuple[int, int]]:
    return list(itertools.combinations(range(n), 2))


def heisenberg_pair_model(
    n_sys: int,
    couplings: Mapping[tuple[int, int], PairCoupling] | Sequence[tuple[int, int, PairCoupling]],
    label: str = "",
) -> Hamiltonian:
    """Sum of two-body XYZ terms with optional local fields, one term per pair."""
    if not 2 <= n_sys <= 5:
        raise BadSize(f"pair models support 2..5 qubits, got {n_sys}")
    items = couplings.items() if isinstance(couplings, Mapping) else (((i, j), c) for i, j, c in couplings)
    pairs = []
    for (i, j), c in items:
        vals = [c.jx, c.jy, c.jz, *c.field_i, *c.field_j]
        if not all(np.isfinite(vals)):
            raise BadSize(f"non-finite coupling on pair ({i}, {j})")
        pairs.append((i, j, c.matrix()))
    return Hamiltonian.from_pairs(n_sys, pairs, label or f"heisenberg{n_sys}")


def builtin_model(name: str) -> Hamiltonian:
    """Small spin models shipped for demos and tests.

    ``spin2``: one XXZ pair with a weak field (two spins).
    ``spin3``: three XXZ pairs on a triangle with staggered fields.
    ``spin3-ising``: commuting ZZ pairs plus longitudinal fields.
    """
    if name == "spin2":
        return heisenberg_pair_model(
            2, {(0, 1): PairCoupling(-1.0, -1.0, -2.0, (0.0, 0.0, 0.3), (0.0, 0.0, 0.0))}, "spin2"
        )
    if name == "spin3":
        return heisenberg_pair_model(
            3,
            {
                (0, 1): PairCoupling(-1.0, -1.0, -1.5, (0.2, 0.0, 0.1), (0.0, 0.0, 0.0)),
                (0, 2): PairCoupling(-0.8, -0.8, -1.2, (0.0, 0.0, 0.0), (0.0, 0.0, -0.1)),
                (1, 2): PairCoupling(-1.2, -1.2, -0.9, (0.0, 0.0, 0.0), (0.1, 0.0, 0.0)),
            },
            "spin3",
        )
    if name == "spin3-ising":
        return heisenberg_pair_model(
            3,
            {
                (0, 1): PairCoupling(jz=1.0, field_i=(0.0, 0.0, 0.5)),
                (0, 2): PairCoupling(jz=-0.7),
                (1, 2): PairCoupling(jz=0.4, field_j=(0.0, 0.0, -0.3)),
            },
            "spin3-ising",
        )
    raise SchemaError(f"unknown builtin model {name!r}")


BUILTIN_MODELS = ("spin2", "spin3", "spin3-ising")


def pauli_decompose(o: Observable | np.ndarray) -> list[tuple[str, float]]:
    """Expand a Hermitian operator in Pauli strings, dropping negligible terms."""
    m = o.dense if isinstance(o, Observable) else linalg.check_hermitian(o)
    n = linalg.n_qubits_of(m)
    dim = 1 << n
    out = []
    for letters in itertools.product("IXYZ", repeat=n):
        s = "".join(letters)
        c = np.trace(pauli_matrix(s) @ m) / dim
        if abs(c) >= PAULI_COEFF_CUTOFF:
            out.append((s, float(c.real)))
    return out


def observable_support(o: Observable) -> tuple[int, ...]:
    """Qubits on which ``o`` acts non-trivially."""
    support = set()
    for s, _ in pauli_decompose(o):
        support.update(k for k, c in enumerate(s) if c != "I")
    return tuple(sorted(support))


def resolve_observable(spec: str | Mapping | None, h: Hamiltonian) -> Observable | None:
    """Builtin names: ``H`` (the Hamiltonian), ``sz<k>``, ``sx<k>``, or a Pauli string."""
    if spec is None:
        return None
    if isinstance(spec, Mapping):
        return load_observable(spec)
    if spec in ("H", "hamiltonian"):
        return Observable.from_hamiltonian(h)
    if len(spec) >= 3 and spec[:2] in ("sz", "sx", "sy") and spec[2:].isdigit():
        k = int(spec[2:])
        if k >= h.n_sys:
            raise SchemaError(f"observable {spec!r} out of range for {h.n_sys} qubits")
        s = ["I"] * h.n_sys
        s[k] = spec[1].upper()
        return Observable(h.n_sys, pauli_matrix("".join(s)), spec)
    if set(spec) <= set("IXYZ") and len(spec) == h.n_sys:
        return Observable.pauli(spec)
    path = Path(spec)
    if path.exists():
        return load_observable(read_document(path))
    raise SchemaError(f"cannot resolve observable {spec!r}")
