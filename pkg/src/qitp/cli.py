"""
Command-line entry point.

    qitp sweep   --hamiltonian H.json --beta 0:0.2:5 --observable sz0 --shots 2000 --out z.csv --plot
    qitp exact   --hamiltonian builtin:spin3 --beta 0,0.5,1 --observable H --trotter-steps 4
    qitp compile --hamiltonian builtin:spin3 --beta 0.02 --trotter-steps 4 --observable sz0 --out c.json
    qitp uncertainty --hamiltonian builtin:spin2 --observable sz0 --observable H --beta 0,0.5,1 --shots 200 --shots 2000

``--config FILE`` supplies the same keys as the flags (JSON); explicit flags
win. Without ``--out`` results go to ``$QITP_OUTPUT_DIR`` (or the working
directory). Errors print ``{"error": code, "message": ...}`` to stderr and
exit non-zero.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import hamiltonian as ham
from .errors import ConfigError, QitpError
from .estimator import UncertaintyRow, uncertainty_study
from .plotting import plot_sweep, plot_uncertainty
from .propagator import QitpParams
from .sweep import (
    AUTO_GROUND,
    EXACT_FIELDS,
    ROW_FIELDS,
    SweepConfig,
    compile_dump,
    default_output,
    format_table,
    load_model,
    parse_betas,
    resolve_e_trial,
    run_exact,
    run_sweep,
    sweep_rows,
    write_table,
)

# flag dest -> config key
_KEYS = {
    "hamiltonian": "hamiltonian",
    "observable": "observable",
    "beta": "betas",
    "e_trial": "e_trial",
    "p": "p",
    "trotter_steps": "trotter_steps",
    "shots": "shots",
    "reps": "reps",
    "seed": "seed",
    "out": "out",
    "plot": "plot",
    "verbose_shots": "verbose_shots",
    "workers": "workers",
}


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with the same keys as the flags")
    common.add_argument("--hamiltonian", help="operator document path or builtin:<name> (comma list for uncertainty)")
    common.add_argument("--beta", help="comma list or start:stop:count")
    common.add_argument("--e-trial", dest="e_trial", help=f"trial energy or {AUTO_GROUND!r} (default)")
    common.add_argument("--p", type=float, help="success parameter in (0, 1]")
    common.add_argument("--trotter-steps", dest="trotter_steps", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="output file (.csv or .json)")
    common.add_argument("--plot", action="store_const", const=True, help="also write an SVG next to --out")

    ap = argparse.ArgumentParser(prog="qitp", description="Thermal-state preparation by dilated imaginary-time propagation")
    sub = ap.add_subparsers(dest="command", required=True)

    sw = sub.add_parser("sweep", parents=[common], help="sample the pipeline over beta")
    sw.add_argument("--observable")
    sw.add_argument("--shots", type=int)
    sw.add_argument("--reps", type=int)
    sw.add_argument("--workers", type=int)
    sw.add_argument("--verbose-shots", dest="verbose_shots", action="store_const", const=True)

    ex = sub.add_parser("exact", parents=[common], help="oracle-only table")
    ex.add_argument("--observable")

    co = sub.add_parser("compile", parents=[common], help="dump the circuit and gate counts")
    co.add_argument("--observable")

    un = sub.add_parser("uncertainty", parents=[common], help="estimator spread, ancilla vs Pauli")
    un.add_argument("--observable", action="append")
    un.add_argument("--shots", type=int, action="append")
    un.add_argument("--reps", type=int)
    return ap


def _merged(args: argparse.Namespace) -> dict:
    conf: dict = {}
    if args.config:
        try:
            conf = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(conf, dict):
            raise ConfigError("config file must hold a JSON object")
    for dest, key in _KEYS.items():
        val = getattr(args, dest, None)
        if val is not None:
            conf[key] = val
    if "hamiltonian" not in conf:
        raise ConfigError("--hamiltonian is required")
    if "betas" not in conf:
        raise ConfigError("--beta is required")
    return conf


def _out_path(conf: dict, name: str) -> Path:
    return Path(conf["out"]) if conf.get("out") else default_output(name)


def cmd_sweep(conf: dict) -> int:
    cfg = SweepConfig.from_dict(conf)
    result = run_sweep(cfg)
    out = _out_path(conf, "sweep.csv")
    rows = sweep_rows(result)
    write_table(out, ROW_FIELDS, rows, {"config": cfg.to_dict(), "summary": result.summary(), "hamiltonian": result.hamiltonian, "observable": result.observable})
    if cfg.verbose_shots:
        recs = {repr(b): rec for b, rec in sorted(result.shot_records.items())}
        out.with_suffix(".shots.json").write_text(json.dumps(recs, indent=1, sort_keys=True) + "\n")
    if cfg.plot:
        plot_sweep(result, out.with_suffix(".svg"))
    shown = ("beta", "z_est", "z_sigma", "z_reference", "obs_est", "obs_sigma", "obs_reference", "success_rate", "n_qubits", "n_cnot")
    table = [[getattr(r, f) for f in shown] for r in result.rows]
    print(format_table(shown, table))
    print(f"reduced chi2: Z = {result.chi2_z:.3f}, observable = {result.chi2_obs:.3f}")
    print(f"wrote {out}")
    return 0


def cmd_exact(conf: dict) -> int:
    h = load_model(conf["hamiltonian"])
    obs = ham.resolve_observable(conf.get("observable"), h)
    e_trial = resolve_e_trial(conf.get("e_trial", AUTO_GROUND), h)
    rows = run_exact(h, parse_betas(conf["betas"]), e_trial, obs, conf.get("trotter_steps"))
    table = [[r[f] for f in EXACT_FIELDS] for r in rows]
    out = _out_path(conf, "exact.csv")
    write_table(out, EXACT_FIELDS, table)
    print(format_table(EXACT_FIELDS, table, precision=6))
    print(f"wrote {out}")
    return 0


def cmd_compile(conf: dict) -> int:
    h = load_model(conf["hamiltonian"])
    obs = ham.resolve_observable(conf.get("observable"), h)
    e_trial = resolve_e_trial(conf.get("e_trial", AUTO_GROUND), h)
    betas = parse_betas(conf["betas"])
    params = QitpParams(betas[0], e_trial, float(conf.get("p", 1.0)), conf.get("trotter_steps"))
    out = _out_path(conf, "circuit.json")
    report = compile_dump(h, params, obs, out)
    print(f"qubits: {report['n_qubits']}  ({', '.join(f'{k}={v}' for k, v in report['roles'].items())})")
    print("gates:  " + ", ".join(f"{k}={v}" for k, v in report["gate_counts"].items() if v))
    print(f"wrote {out}")
    return 0


def cmd_uncertainty(conf: dict) -> int:
    specs = conf["hamiltonian"]
    specs = specs if isinstance(specs, list) else [s for s in specs.split(",") if s]
    hs = [load_model(s) for s in specs]
    obs_specs = conf.get("observable") or ["sz0"]
    obs_specs = obs_specs if isinstance(obs_specs, list) else [obs_specs]
    shots = conf.get("shots") or [200, 2000]
    shots = shots if isinstance(shots, list) else [shots]
    observables = []
    for o in obs_specs:
        if o in ("H", "hamiltonian"):
            observables.append("H")
        else:
            observables.append(ham.resolve_observable(o, hs[0]))
    rows = uncertainty_study(
        hs,
        observables,
        parse_betas(conf["betas"]),
        [int(s) for s in shots],
        int(conf.get("seed", 0)),
        reps=int(conf.get("reps", 200)),
        p=float(conf.get("p", 1.0)),
    )
    out = _out_path(conf, "uncertainty.csv")
    table = [r.as_row() for r in rows]
    write_table(out, UncertaintyRow.FIELDS, table)
    if conf.get("plot"):
        plot_uncertainty(rows, out.with_suffix(".svg"))
    print(format_table(UncertaintyRow.FIELDS, table))
    print(f"wrote {out}")
    return 0


COMMANDS = {"sweep": cmd_sweep, "exact": cmd_exact, "compile": cmd_compile, "uncertainty": cmd_uncertainty}


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        conf = _merged(args)
        return COMMANDS[args.command](conf)
    except QitpError as exc:
        print(json.dumps({"error": exc.code, "message": str(exc)}), file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
