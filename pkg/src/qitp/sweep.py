"""
Beta sweeps, oracle-only tables and circuit compilation reports.

Every sampled number is reproducible from ``(config, seed)``: each beta
point draws from its own stream ``rng_for(seed, index)``, so results do not
depend on how points are scheduled across workers.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Sequence

import numpy as np

from . import hamiltonian as ham
from .circuit import build_thermal_pipeline, circuit_to_dict, n_qitp_ancillas, outcome_distribution, recorded_layout
from .config import OUTPUT_DIR_ENV
from .errors import ConfigError, EmptyResult, QitpError, ZeroSigma
from .estimator import (
    Estimate,
    estimate_observable_ancilla,
    estimate_partition,
    reduced_chi2,
    rng_for,
    sample_distribution,
)
from .hamiltonian import Hamiltonian, Observable
from .propagator import (
    QitpParams,
    gibbs_oracle,
    make_trotter_plan,
    trotter_rescale,
    trotterized_gibbs_oracle,
)

AUTO_GROUND = "auto-ground"


def parse_betas(spec) -> list[float]:
    """Accept a list, a comma list ``"0,0.1"`` or a range ``"start:stop:count"``."""
    if isinstance(spec, (list, tuple)):
        vals = [float(b) for b in spec]
    elif isinstance(spec, (int, float)):
        vals = [float(spec)]
    elif isinstance(spec, str):
        if ":" in spec:
            parts = spec.split(":")
            if len(parts) != 3:
                raise ConfigError(f"beta range must be start:stop:count, got {spec!r}")
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
            if count < 1:
                raise ConfigError("beta range needs count >= 1")
            vals = [float(x) for x in np.linspace(start, stop, count)]
        else:
            vals = [float(x) for x in spec.split(",") if x.strip()]
    else:
        raise ConfigError(f"cannot parse beta values from {spec!r}")
    if not vals:
        raise ConfigError("no beta values given")
    if any(not math.isfinite(b) or b < 0 for b in vals):
        raise ConfigError(f"beta values must be finite and >= 0: {vals}")
    return sorted(vals)


def load_model(spec: str) -> Hamiltonian:
    """``builtin:<name>`` or a path to an operator document."""
    if spec.startswith("builtin:"):
        return ham.builtin_model(spec.split(":", 1)[1])
    path = Path(spec)
    if not path.exists():
        raise ConfigError(f"Hamiltonian file {spec!r} not found")
    try:
        doc = ham.read_document(path)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{spec}: not valid JSON ({exc})") from exc
    return ham.load_hamiltonian(doc)


def resolve_e_trial(e_trial, h: Hamiltonian) -> float:
    if e_trial is None or e_trial == AUTO_GROUND:
        return h.ground_energy
    try:
        return float(e_trial)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"e_trial must be a number or {AUTO_GROUND!r}, got {e_trial!r}") from exc


def default_output(name: str) -> Path:
    return Path(os.environ.get(OUTPUT_DIR_ENV, ".")) / name


@dataclass
class SweepConfig:
    hamiltonian: str
    betas: list[float]
    observable: str | None = None
    e_trial: float | str = AUTO_GROUND
    p: float = 1.0
    trotter_steps: int | None = None
    shots: int = 1000
    reps: int = 1
    seed: int = 0
    out: str | None = None
    plot: bool = False
    verbose_shots: bool = False
    workers: int = 1

    def __post_init__(self):
        self.betas = parse_betas(self.betas)
        if self.shots < 1:
            raise ConfigError("shots must be >= 1")
        if self.reps < 1:
            raise ConfigError("reps must be >= 1")
        if not 0 < float(self.p) <= 1:
            raise ConfigError(f"p must lie in (0, 1], got {self.p}")
        if self.trotter_steps is not None and self.trotter_steps < 1:
            raise ConfigError("trotter_steps must be >= 1")
        if self.e_trial is None:
            self.e_trial = AUTO_GROUND
        if self.e_trial != AUTO_GROUND:
            try:
                self.e_trial = float(self.e_trial)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"e_trial must be a number or {AUTO_GROUND!r}") from exc

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "SweepConfig":
        known = {f.name for f in fields(cls)}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        if "hamiltonian" not in d or "betas" not in d:
            raise ConfigError("config needs 'hamiltonian' and 'betas'")
        return cls(**d)


ROW_FIELDS = (
    "beta",
    "z_est",
    "z_sigma",
    "z_exact",
    "z_trotter_exact",
    "obs_est",
    "obs_sigma",
    "obs_exact",
    "obs_trotter_exact",
    "success_prob_exact",
    "success_rate",
    "z_sigma_empirical",
    "obs_sigma_empirical",
    "n_qubits",
    "n_cnot",
    "n_ry",
    "shots",
    "boundary",
)


@dataclass
class SweepRow:
    beta: float
    z_est: float
    z_sigma: float
    z_exact: float
    z_trotter_exact: float
    obs_est: float
    obs_sigma: float
    obs_exact: float
    obs_trotter_exact: float
    success_prob_exact: float
    success_rate: float
    z_sigma_empirical: float
    obs_sigma_empirical: float
    n_qubits: int
    n_cnot: int
    n_ry: int
    shots: int
    boundary: bool

    @property
    def z_reference(self) -> float:
        return self.z_exact if math.isnan(self.z_trotter_exact) else self.z_trotter_exact

    @property
    def obs_reference(self) -> float:
        return self.obs_exact if math.isnan(self.obs_trotter_exact) else self.obs_trotter_exact


@dataclass
class SweepResult:
    rows: list[SweepRow]
    hamiltonian: str
    observable: str | None
    chi2_z: float
    chi2_obs: float
    shot_records: dict[float, dict] = field(default_factory=dict)

    def summary(self) -> dict:
        return {"chi2_z": self.chi2_z, "chi2_obs": self.chi2_obs, "n_points": len(self.rows)}


def _chi2(rows: Sequence[SweepRow], which: str) -> float:
    ests, refs = [], []
    for r in rows:
        value, sigma = (r.z_est, r.z_sigma) if which == "z" else (r.obs_est, r.obs_sigma)
        ref = r.z_reference if which == "z" else r.obs_reference
        if math.isnan(value) or not sigma > 0:
            continue
        ests.append(Estimate(value, sigma, r.shots, "ancilla"))
        refs.append(ref)
    if not ests:
        return float("nan")
    try:
        return reduced_chi2(ests, refs)
    except ZeroSigma:
        return float("nan")


def _sweep_point(index: int, beta: float, h: Hamiltonian, obs: Observable | None, cfg: SweepConfig, e_trial: float):
    params = QitpParams(beta, e_trial, float(cfg.p), cfg.trotter_steps)
    plan = make_trotter_plan(h, beta, cfg.trotter_steps) if cfg.trotter_steps else None
    circ = build_thermal_pipeline(h, params, plan, obs)
    dist = outcome_distribution(circ)
    layout = recorded_layout(circ)
    n_beta = n_qitp_ancillas(circ)
    scale = trotter_rescale(h, beta, e_trial) if plan else 1.0

    rho, z_exact = gibbs_oracle(h, beta, e_trial)
    obs_exact = float(np.trace(rho @ obs.dense).real / z_exact) if obs is not None else float("nan")
    z_trot = obs_trot = float("nan")
    if plan is not None:
        rho_t, z_trot = trotterized_gibbs_oracle(plan, h, e_trial)
        if obs is not None:
            obs_trot = float(np.trace(rho_t @ obs.dense).real / z_trot)
    z_ref = z_exact if plan is None else z_trot
    success_exact = float(cfg.p) ** n_beta * z_ref / scale / h.dim

    z_vals, o_vals, first = [], [], None
    for r in range(cfg.reps):
        rec = sample_distribution(dist, cfg.shots, rng_for(cfg.seed, index, r), *layout)
        z = estimate_partition(rec, h.n_sys, float(cfg.p), n_beta, scale)
        o = estimate_observable_ancilla(rec, obs) if obs is not None else None
        if first is None:
            first = (rec, z, o)
        z_vals.append(z.value)
        if o is not None:
            o_vals.append(o.value)
    rec, z, o = first
    succ = sum(rec.successes().values()) / rec.n_shots
    counts = circ.gate_counts()
    row = SweepRow(
        beta=float(beta),
        z_est=z.value,
        z_sigma=z.sigma,
        z_exact=z_exact,
        z_trotter_exact=z_trot,
        obs_est=o.value if o is not None else float("nan"),
        obs_sigma=o.sigma if o is not None else float("nan"),
        obs_exact=obs_exact,
        obs_trotter_exact=obs_trot,
        success_prob_exact=success_exact,
        success_rate=succ,
        z_sigma_empirical=float(np.std(z_vals, ddof=1)) if cfg.reps > 1 else float("nan"),
        obs_sigma_empirical=float(np.std(o_vals, ddof=1)) if cfg.reps > 1 and o_vals else float("nan"),
        n_qubits=circ.n_total,
        n_cnot=counts["cx"],
        n_ry=counts["ry"],
        shots=cfg.shots,
        boundary=bool(z.boundary or (o is not None and o.boundary)),
    )
    return row, rec.to_dict()


def run_sweep(cfg: SweepConfig, h: Hamiltonian | None = None) -> SweepResult:
    """Sample the thermal pipeline at every beta and attach oracle references."""
    h = h if h is not None else load_model(cfg.hamiltonian)
    obs = ham.resolve_observable(cfg.observable, h)
    e_trial = resolve_e_trial(cfg.e_trial, h)
    betas = cfg.betas
    if cfg.trotter_steps is None:
        for b in betas:
            QitpParams(b, e_trial, float(cfg.p)).check_feasible(h)

    def work(i):
        return _sweep_point(i, betas[i], h, obs, cfg, e_trial)

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            out = list(pool.map(work, range(len(betas))))
    else:
        out = [work(i) for i in range(len(betas))]
    rows = sorted((r for r, _ in out), key=lambda r: r.beta)
    records = {r.beta: rec for r, rec in out}
    return SweepResult(
        rows,
        h.label,
        obs.label if obs is not None else None,
        _chi2(rows, "z"),
        _chi2(rows, "obs") if obs is not None else float("nan"),
        records,
    )


# -- exact tables ----------------------------------------------------------------

EXACT_FIELDS = ("beta", "z", "obs", "success_prob", "z_trotter", "obs_trotter")


def run_exact(
    h: Hamiltonian,
    betas: Sequence[float],
    e_trial: float,
    obs: Observable | None = None,
    trotter_steps: int | None = None,
) -> list[dict]:
    """Oracle-only rows plus a final ``beta = inf`` asymptote row.

    ``success_prob`` is the p = 1 value. Trotter columns are filled when
    ``trotter_steps`` is given.
    """
    rows = []
    for b in sorted(float(x) for x in betas):
        rho, z = gibbs_oracle(h, b, e_trial)
        row = {
            "beta": b,
            "z": z,
            "obs": float(np.trace(rho @ obs.dense).real / z) if obs is not None else float("nan"),
            "success_prob": z / h.dim if e_trial <= h.ground_energy + 1e-12 else float("nan"),
            "z_trotter": float("nan"),
            "obs_trotter": float("nan"),
        }
        if trotter_steps:
            plan = make_trotter_plan(h, b, trotter_steps)
            rho_t, z_t = trotterized_gibbs_oracle(plan, h, e_trial)
            row["z_trotter"] = z_t
            if obs is not None:
                row["obs_trotter"] = float(np.trace(rho_t @ obs.dense).real / z_t)
        rows.append(row)
    rows.append(asymptote_row(h, e_trial, obs))
    return rows


def asymptote_row(h: Hamiltonian, e_trial: float, obs: Observable | None) -> dict:
    """Zero-temperature limit: ground-level average of the observable."""
    w = h.eig.eigenvalues
    e0 = w[0]
    ground = np.abs(w - e0) <= 1e-9 * max(1.0, abs(e0))
    g = int(ground.sum())
    if abs(e_trial - e0) <= 1e-12 * max(1.0, abs(e0)):
        z, ps = float(g), g / h.dim
    elif e_trial < e0:
        z, ps = 0.0, 0.0
    else:
        z, ps = float("inf"), float("nan")
    o = float("nan")
    if obs is not None:
        v = h.eig.eigenvectors[:, ground]
        o = float(np.trace(v.conj().T @ obs.dense @ v).real / g)
    return {"beta": float("inf"), "z": z, "obs": o, "success_prob": ps, "z_trotter": float("nan"), "obs_trotter": float("nan")}


# -- compile report ------------------------------------------------------------


def compile_report(h: Hamiltonian, params: QitpParams, obs: Observable | None = None) -> tuple[dict, dict]:
    """Circuit dump and qubit/gate tallies for one pipeline."""
    plan = make_trotter_plan(h, params.beta, params.trotter_steps) if params.trotter_steps else None
    circ = build_thermal_pipeline(h, params, plan, obs)
    counts = circ.gate_counts()
    roles = {r: circ.roles.count(r) for r in ("system", "mme_ancilla", "qitp_ancilla", "obs_ancilla")}
    report = {
        "beta": params.beta,
        "trotter_steps": params.trotter_steps,
        "n_qubits": circ.n_total,
        "roles": roles,
        "gate_counts": counts,
        "cnot": counts["cx"],
        "ry": counts["ry"],
    }
    return circuit_to_dict(circ), report


def compile_dump(h: Hamiltonian, params: QitpParams, obs: Observable | None, out_path: str | Path) -> dict:
    circuit, report = compile_report(h, params, obs)
    Path(out_path).parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "w") as fh:
        json.dump({"report": report, "circuit": circuit}, fh, indent=1, sort_keys=True)
        fh.write("\n")
    return report


# -- serialization -------------------------------------------------------------


def _cell(v):
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return repr(v)
    return v


def table_csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_cell(v) for v in r])
    return buf.getvalue()


def _json_safe(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None if math.isnan(v) else ("inf" if v > 0 else "-inf")
    if isinstance(v, dict):
        return {str(k): _json_safe(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_safe(x) for x in v]
    return v


def sweep_rows(result: SweepResult) -> list[list]:
    return [[getattr(r, f) for f in ROW_FIELDS] for r in result.rows]


def write_table(path: str | Path, header: Sequence[str], rows: Sequence[Sequence], meta: dict | None = None) -> Path:
    """CSV for ``.csv`` paths, JSON otherwise; stable column order either way."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if path.suffix.lower() == ".json":
        doc = {"columns": list(header), "rows": [dict(zip(header, r)) for r in rows]}
        if meta:
            doc["meta"] = meta
        path.write_text(json.dumps(_json_safe(doc), indent=1, sort_keys=True) + "\n")
    else:
        path.write_text(table_csv(header, rows))
        if meta:
            path.with_suffix(".summary.json").write_text(json.dumps(_json_safe(meta), indent=1, sort_keys=True) + "\n")
    return path


def format_table(header: Sequence[str], rows: Sequence[Sequence], precision: int = 4) -> str:
    """Aligned plain-text rendering for terminals."""

    def fmt(v):
        if isinstance(v, bool):
            return "yes" if v else ""
        if isinstance(v, float):
            if math.isnan(v):
                return "-"
            return f"{v:.{precision}g}" if abs(v) < 1e5 else f"{v:.3e}"
        return str(v)

    cells = [[fmt(v) for v in r] for r in rows]
    widths = [max([len(h)] + [len(r[i]) for r in cells]) for i, h in enumerate(header)]
    lines = ["  ".join(h.rjust(w) for h, w in zip(header, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells]
    return "\n".join(lines)


def check_nonempty(result: SweepResult) -> None:
    if not result.rows:
        raise EmptyResult("sweep produced no rows")


__all__ = [
    "AUTO_GROUND",
    "EXACT_FIELDS",
    "ROW_FIELDS",
    "QitpError",
    "SweepConfig",
    "SweepResult",
    "SweepRow",
    "compile_dump",
    "compile_report",
    "format_table",
    "load_model",
    "parse_betas",
    "run_exact",
    "run_sweep",
    "sweep_rows",
    "write_table",
]
