"""Figure rendering: every SVG in plots/ is derived from a CSV twin in the
artifact directory, so `report <dir>` can always re-render from the
delimited output alone."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _read_csv(path: Path):
    data = np.genfromtxt(path, delimiter=",", names=True, comments="#")
    if data.ndim == 0:
        data = data.reshape(1)
    return data


def _n_particles(obs) -> int:
    return sum(1 for name in obs.dtype.names if name.startswith("x_mean_"))


def _save(fig, path: Path):
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def plot_energies(outdir: Path, plots: Path):
    obs = _read_csv(outdir / "observables.csv")
    n = _n_particles(obs)
    t = obs["t"]
    v = obs["v_trap"] + obs["v_disorder"] + obs["v_coulomb"]
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(t, obs["kinetic"] / n, label=r"$\langle K\rangle/N$")
    ax.plot(t, v / n, label=r"$\langle V\rangle/N$")
    ax.plot(t, obs["total"] / (2 * n), "k--", label=r"$\langle E\rangle/2N$")
    ax.plot(t, 100.0 * obs["v_coulomb"] / n, label=r"$100\,\langle V_{Cou}\rangle/N$")
    ax.set_xlabel("t")
    ax.set_ylabel("energy per particle")
    ax.legend()
    _save(fig, plots / "energies.svg")


def plot_expectations(outdir: Path, plots: Path):
    obs = _read_csv(outdir / "observables.csv")
    t = obs["t"]
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(t, obs["x_mean_1"], label=r"$\langle x_1\rangle$")
    ax.plot(t, obs["p_mean_1"], label=r"$\langle p_1\rangle$")
    ax.plot(t, obs["x_rms_1"], label=r"$x_{1,RMS}$")
    ax.plot(t, obs["p_rms_1"], label=r"$p_{1,RMS}$")
    ax.set_xlabel("t")
    ax.legend()
    _save(fig, plots / "expectations.svg")


def plot_phase_space(outdir: Path, plots: Path):
    ps = _read_csv(outdir / "phase_space.csv")
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.plot(ps["x"], ps["p"], lw=0.7)
    ax.plot([ps["x"][0]], [ps["p"][0]], "o", label="t=0")
    ax.set_xlabel(r"$\langle x_1\rangle$")
    ax.set_ylabel(r"$\langle p_1\rangle$")
    ax.legend()
    _save(fig, plots / "phase_space.svg")


_WEAK_LABELS = {
    "weakvalues.csv": r"$p_W^{1,1}$",
    "weakvalues_cross.csv": r"$p_W^{1,2}$",
    "weakvalues_physical.csv": r"$\tilde p_W$",
}


def plot_weakvalues(outdir: Path, plots: Path):
    obs = None
    if (outdir / "observables.csv").exists():
        obs = _read_csv(outdir / "observables.csv")
    fig, ax = plt.subplots(figsize=(7, 4))
    for fname, label in _WEAK_LABELS.items():
        path = outdir / fname
        if not path.exists():
            continue
        wv = _read_csv(path)
        for x0 in np.unique(wv["x"]):
            sel = (wv["x"] == x0) & (wv["masked"] == 0)
            ax.plot(wv["t"][sel], wv["value"][sel], lw=0.7, label=f"{label}(x={x0:g})")
    if obs is not None:
        ax.plot(obs["t"], obs["p_mean_1"], "k", lw=1.5, label=r"$\langle p_1\rangle$")
    ax.set_xlabel("t")
    ax.set_ylabel("weak value of momentum")
    ax.legend(fontsize=7)
    _save(fig, plots / "weakvalues.svg")


def plot_marginal_position(outdir: Path, plots: Path):
    mg = _read_csv(outdir / "marginals_position.csv")
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.semilogy(mg["x"], mg["initial"], ":", label="t = 0")
    ax.semilogy(mg["x"], mg["final"], "-", label="t = final")
    if np.isfinite(mg["late_avg"]).any():
        ax.semilogy(mg["x"], mg["late_avg"], "-", lw=0.8, label="late-window average")
    ax.semilogy(mg["x"], np.where(mg["rho_cl"] > 0, mg["rho_cl"], np.nan), "k--",
                label=r"$\rho_{cl}$")
    ax.set_ylim(1e-12, None)
    ax.set_xlabel("x")
    ax.set_ylabel("position marginal")
    ax.legend()
    _save(fig, plots / "marginal_position.svg")


def plot_marginal_momentum(outdir: Path, plots: Path):
    mg = _read_csv(outdir / "marginals_momentum.csv")
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.semilogy(mg["p"], mg["initial"], ":", label="t = 0")
    ax.semilogy(mg["p"], mg["final"], "-", label="t = final")
    ax.set_ylim(1e-12, None)
    ax.set_xlabel("p")
    ax.set_ylabel("momentum marginal")
    ax.legend()
    _save(fig, plots / "marginal_momentum.svg")


def plot_spectrum(outdir: Path, plots: Path):
    sp = _read_csv(outdir / "spectrum.csv")
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    ax1.plot(sp["n"], sp["dE_n"], ".", ms=2)
    ax1.axhline(1.0, color="k", lw=0.8, ls="--")
    ax1.set_ylabel(r"$\Delta E_n$")
    ax2.semilogy(sp["n"], np.where(sp["c2_n"] > 0, sp["c2_n"], np.nan), ".", ms=2)
    ax2.set_ylabel(r"$|c_n|^2$")
    ax2.set_xlabel("n")
    _save(fig, plots / "spectrum.svg")


def plot_coherences(outdir: Path, plots: Path):
    co = _read_csv(outdir / "coherences.csv")
    if co.size == 0:
        return
    pairs = sorted({(int(n), int(m)) for n, m in zip(co["n"], co["m"])})
    fig, axes = plt.subplots(len(pairs), 1, figsize=(7, 2.2 * len(pairs)), sharex=True)
    axes = np.atleast_1d(axes)
    for ax, (n, m) in zip(axes, pairs):
        sel = (co["n"] == n) & (co["m"] == m)
        ax.plot(co["t"][sel], co["re"][sel], label="Re")
        ax.plot(co["t"][sel], co["im"][sel], label="Im")
        ax.plot(co["t"][sel], co["abs"][sel], "k--", lw=0.8, label="|rho|")
        ax.set_ylabel(rf"$\rho_{{{n},{m}}}$")
    axes[0].legend(fontsize=7)
    axes[-1].set_xlabel("t")
    _save(fig, plots / "coherences.svg")


_RENDERERS = (
    ("observables.csv", plot_energies),
    ("observables.csv", plot_expectations),
    ("phase_space.csv", plot_phase_space),
    ("weakvalues.csv", plot_weakvalues),
    ("marginals_position.csv", plot_marginal_position),
    ("marginals_momentum.csv", plot_marginal_momentum),
    ("spectrum.csv", plot_spectrum),
    ("coherences.csv", plot_coherences),
)


def render_all(outdir) -> list[Path]:
    """Render every figure whose CSV twin exists in ``outdir``."""
    outdir = Path(outdir)
    plots = outdir / "plots"
    plots.mkdir(parents=True, exist_ok=True)
    written = []
    for csv_name, renderer in _RENDERERS:
        if (outdir / csv_name).exists():
            renderer(outdir, plots)
            written.append(plots)
    return sorted(plots.glob("*.svg"))
