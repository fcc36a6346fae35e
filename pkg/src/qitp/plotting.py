"""
Static figures for sweep and uncertainty reports.

Figures are written as SVG with a fixed hash salt and no timestamp, so the
same data always produces the same bytes.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .errors import EmptyResult  # noqa: E402

STYLE = {
    "svg.hashsalt": "qitp",
    "svg.fonttype": "path",
    "font.size": 10,
    "axes.labelsize": 11,
    "lines.linewidth": 1.2,
    "errorbar.capsize": 3,
}


def _save(fig, out_path: str | Path) -> Path:
    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, format="svg", metadata={"Date": None})
    plt.close(fig)
    return out


def plot_sweep(result, out_path: str | Path) -> Path:
    """Partition function and (if present) observable versus beta.

    Sampled estimates carry 1-sigma error bars; the exact curve is dashed and
    Trotterized references, when present, are drawn as stars.
    """
    rows = result.rows
    if not rows:
        raise EmptyResult("nothing to plot")
    betas = [r.beta for r in rows]
    has_obs = result.observable is not None
    has_trot = any(not math.isnan(r.z_trotter_exact) for r in rows)
    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(1, 2 if has_obs else 1, figsize=(9 if has_obs else 4.8, 3.6), squeeze=False)
        ax = axes[0, 0]
        ax.plot(betas, [r.z_exact for r in rows], "k--", label="exact")
        if has_trot:
            ax.plot(betas, [r.z_trotter_exact for r in rows], "k*", ms=7, label="Trotter exact")
        ax.errorbar(betas, [r.z_est for r in rows], yerr=[r.z_sigma for r in rows], fmt="s", color="tab:orange", label="sampled")
        ax.set_xlabel(r"$\beta$")
        ax.set_ylabel(r"$Z_0(\beta)$")
        ax.legend(frameon=False)
        if has_obs:
            ax = axes[0, 1]
            ax.plot(betas, [r.obs_exact for r in rows], "k--", label="exact")
            if has_trot:
                ax.plot(betas, [r.obs_trotter_exact for r in rows], "k*", ms=7, label="Trotter exact")
            ax.errorbar(
                betas, [r.obs_est for r in rows], yerr=[r.obs_sigma for r in rows], fmt="s", color="tab:orange", label="sampled"
            )
            ax.set_xlabel(r"$\beta$")
            ax.set_ylabel(rf"$\langle {result.observable} \rangle$")
        fig.suptitle(result.hamiltonian)
        fig.tight_layout()
        return _save(fig, out_path)


def plot_uncertainty(rows: Sequence, out_path: str | Path) -> Path:
    """One panel per (observable, shots): sigma versus beta, solid for the
    ancilla method and dashed for the Pauli expansion."""
    if not rows:
        raise EmptyResult("nothing to plot")
    panels = sorted({(r.observable, r.shots) for r in rows})
    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(1, len(panels), figsize=(4 * len(panels), 3.4), squeeze=False)
        for ax, (obs, shots) in zip(axes[0], panels):
            for method, ls in (("ancilla", "-"), ("pauli", "--")):
                for ham in sorted({r.hamiltonian for r in rows}):
                    sel = sorted(
                        (r for r in rows if r.observable == obs and r.shots == shots and r.method == method and r.hamiltonian == ham),
                        key=lambda r: r.beta,
                    )
                    if sel:
                        ax.plot([r.beta for r in sel], [r.sigma_empirical for r in sel], ls, marker="o", ms=3, label=f"{method} {ham}")
            ax.set_title(f"{obs}, {shots} shots")
            ax.set_xlabel(r"$\beta$")
            ax.set_ylabel(r"$\sigma$")
        axes[0, 0].legend(frameon=False, fontsize=8)
        fig.tight_layout()
        return _save(fig, out_path)
