"""Experiment assembly and artifact emission.

``prepare`` turns an ExperimentConfig into live simulation components;
``run_experiment`` propagates the state, recording expectation values and
weak-value series, and writes the artifact directory: delimited CSV output,
binary snapshots, meta.json, and SVG figures rendered from the CSVs.
"""

from __future__ import annotations

import json
import logging
import time as _time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from . import report as reportmod
from .config import ExperimentConfig, serialize_config
from .grid import GridSpec, make_grid
from .hamiltonian import (
    GENERATOR_ID,
    HamiltonianTerms,
    build_terms,
    export_disorder_csv,
    sample_disorder,
)
from .observables import (
    ObservableRecord,
    classical_microcanonical_density,
    energy_decomposition,
)
from .propagator import PropagationPlan, RunRecord, run
from .snapshots import write_snapshot
from .state import (
    OrbitalSpec,
    WaveFunction,
    edge_density_fraction,
    gaussian_orbital,
    marginal_momentum_density,
    marginal_position_density,
    antisymmetrize,
    product_state,
)
from .weakvalues import WeakValueField, weak_identical, weak_pair

logger = logging.getLogger(__name__)

#: width of the trailing window used for the time-averaged late marginal
LATE_WINDOW = 30.0

#: edge-density warning threshold (fraction of the density peak)
EDGE_WARN_FRACTION = 1e-10


@dataclass(frozen=True, eq=False)
class ExperimentComponents:
    config: ExperimentConfig
    grid: GridSpec
    terms: HamiltonianTerms
    psi0: WaveFunction
    plan: PropagationPlan


def prepare(config: ExperimentConfig) -> ExperimentComponents:
    """Build grid, disorder, potential tensors, initial state, and plan."""
    grid = make_grid(config.n_particles, config.points_per_axis, config.half_width)
    disorder = sample_disorder(grid, config.gamma_d, config.sigma_d, config.seed)
    identical = config.mode == "identical"
    terms = build_terms(
        grid,
        config.omega,
        config.alpha,
        disorder,
        include_coulomb=identical,
    )
    orbitals = [
        gaussian_orbital(OrbitalSpec(o.center, o.boost, o.width), grid)
        for o in config.orbitals
    ]
    psi0 = antisymmetrize(orbitals, grid) if identical else product_state(orbitals, grid)
    plan = PropagationPlan(
        dt=config.dt,
        t_final=config.t_final,
        record_stride=config.record_stride,
        terms=terms,
    )
    return ExperimentComponents(
        config=config, grid=grid, terms=terms, psi0=psi0, plan=plan
    )


@dataclass
class _MarginalTracker:
    """Captures initial/final marginals and a late-window time average."""

    grid: GridSpec
    t_final: float
    initial: np.ndarray | None = None
    final: np.ndarray | None = None
    initial_momentum: np.ndarray | None = None
    final_momentum: np.ndarray | None = None
    late_sum: np.ndarray | None = None
    late_count: int = 0

    def __call__(self, psi: WaveFunction):
        marg = marginal_position_density(psi, 1)
        if psi.time == 0.0:
            self.initial = marg
            self.initial_momentum = marginal_momentum_density(psi, 1)
        if psi.time >= self.t_final - 1e-9:
            self.final = marg
            self.final_momentum = marginal_momentum_density(psi, 1)
        if psi.time >= self.t_final - LATE_WINDOW - 1e-9:
            self.late_sum = marg if self.late_sum is None else self.late_sum + marg
            self.late_count += 1
        return None

    def late_average(self) -> np.ndarray | None:
        if self.late_count == 0:
            return None
        return self.late_sum / self.late_count


@dataclass
class _WeakTracker:
    """Samples weak-value fields at the configured physical points."""

    eval_points: tuple[float, ...]
    identical: bool
    indices: np.ndarray = field(init=False, default=None)
    kinds: tuple[str, ...] = field(init=False, default=())
    masked_fractions: list = field(default_factory=list)

    def __call__(self, psi: WaveFunction):
        grid = psi.grid
        if self.indices is None:
            self.indices = np.rint(
                (np.asarray(self.eval_points) - grid.positions[0]) / grid.dx
            ).astype(int)
            kinds = ["pw11"]
            if grid.n_particles > 1:
                kinds.append("pw12")
                if self.identical:
                    kinds.append("identical")
            self.kinds = tuple(kinds)
        fields: dict[str, WeakValueField] = {"pw11": weak_pair(psi, 1, 1)}
        if "pw12" in self.kinds:
            fields["pw12"] = weak_pair(psi, 1, 2)
        if "identical" in self.kinds:
            fields["identical"] = weak_identical(psi)
        self.masked_fractions.append(1.0 - fields["pw11"].mask.mean())
        out = {}
        for kind, fld in fields.items():
            out[kind] = fld.values[self.indices]
            out[kind + "_mask"] = fld.mask[self.indices]
        return out


@dataclass
class _SnapshotWriter:
    directory: Path
    requested: tuple[float, ...]
    written: list = field(default_factory=list)

    def __call__(self, psi: WaveFunction):
        if any(abs(psi.time - t) < 1e-9 for t in self.requested):
            self.directory.mkdir(parents=True, exist_ok=True)
            path = self.directory / f"state_t{psi.time:.6g}.wvs"
            write_snapshot(path, psi)
            self.written.append(str(path))
        return None


@dataclass(frozen=True, eq=False)
class ExperimentResult:
    components: ExperimentComponents
    record: RunRecord
    output_dir: Path


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def _observable_header(n: int) -> list[str]:
    cols = ["t"]
    for name in ("x_mean", "p_mean", "x_rms", "p_rms"):
        cols += [f"{name}_{j}" for j in range(1, n + 1)]
    cols += ["kinetic", "v_trap", "v_disorder", "v_coulomb", "total"]
    return cols


def _observable_row(rec: ObservableRecord) -> list[str]:
    vals = [rec.time]
    for tupl in (rec.x_mean, rec.p_mean, rec.x_rms, rec.p_rms):
        vals.extend(tupl)
    vals += [rec.kinetic, rec.v_trap, rec.v_disorder, rec.v_coulomb, rec.total]
    return [_fmt(v) for v in vals]


_WEAK_FILES = {
    "pw11": "weakvalues.csv",
    "pw12": "weakvalues_cross.csv",
    "identical": "weakvalues_physical.csv",
}


def run_experiment(config: ExperimentConfig, output_dir=None) -> ExperimentResult:
    """Run the configured experiment and write its artifact directory.

    On failure a partial-output marker file INCOMPLETE is left behind with
    the error, and the exception propagates.
    """
    outdir = Path(output_dir if output_dir is not None else config.outputs)
    outdir.mkdir(parents=True, exist_ok=True)
    try:
        return _run_experiment_inner(config, outdir)
    except Exception as exc:
        (outdir / "INCOMPLETE").write_text(f"{type(exc).__name__}: {exc}\n")
        raise


def _run_experiment_inner(config: ExperimentConfig, outdir: Path) -> ExperimentResult:
    started = _time.perf_counter()
    comps = prepare(config)
    grid, terms = comps.grid, comps.terms

    marginal_tracker = _MarginalTracker(grid=grid, t_final=config.t_final)
    weak_tracker = _WeakTracker(
        eval_points=config.weakvalue_eval_points,
        identical=config.mode == "identical",
    )
    # snap requested snapshot times onto the record grid so they are hit
    n_steps = comps.plan.n_steps
    rec_steps = sorted({0, n_steps, *range(0, n_steps + 1, config.record_stride)})
    rec_times = np.asarray(rec_steps, dtype=float) * config.dt
    snapped = tuple(
        float(rec_times[np.argmin(np.abs(rec_times - t))])
        for t in config.snapshot_times
    )
    snapshot_writer = _SnapshotWriter(
        directory=outdir / "snapshots", requested=snapped
    )
    observers = {
        "observables": lambda psi: energy_decomposition(psi, terms),
        "norm": lambda psi: psi.norm(),
        "edge": edge_density_fraction,
        "weak": weak_tracker,
        "marginals": marginal_tracker,
        "snapshot": snapshot_writer,
    }
    record = run(comps.psi0, comps.plan, observers)

    edge_max = max(record.series["edge"])
    if edge_max > EDGE_WARN_FRACTION:
        logger.warning(
            "edge density reached %.3e of the peak; box may be too small", edge_max
        )

    times = record.times_array()
    obs_records: list[ObservableRecord] = record.series["observables"]
    _write_csv(
        outdir / "observables.csv",
        _observable_header(grid.n_particles),
        (_observable_row(r) for r in obs_records),
    )
    _write_csv(
        outdir / "phase_space.csv",
        ["t", "x", "p"],
        (
            [_fmt(r.time), _fmt(r.x_mean[0]), _fmt(r.p_mean[0])]
            for r in obs_records
        ),
    )

    for kind in weak_tracker.kinds:
        rows = []
        for t, sample in zip(times, record.series["weak"]):
            for x, value, ok in zip(
                config.weakvalue_eval_points, sample[kind], sample[kind + "_mask"]
            ):
                rows.append(
                    [_fmt(t), _fmt(x), _fmt(value), "0" if ok else "1"]
                )
        _write_csv(outdir / _WEAK_FILES[kind], ["t", "x", "value", "masked"], rows)

    p0_ref = abs(config.orbitals[0].boost) or 1.0
    rho_cl = classical_microcanonical_density(
        grid, l0=1.0 / np.sqrt(config.omega), p0=p0_ref
    )
    late = marginal_tracker.late_average()
    _write_csv(
        outdir / "marginals_position.csv",
        ["x", "initial", "final", "late_avg", "rho_cl"],
        (
            [
                _fmt(grid.positions[i]),
                _fmt(marginal_tracker.initial[i]),
                _fmt(marginal_tracker.final[i]),
                _fmt(late[i] if late is not None else np.nan),
                _fmt(rho_cl[i]),
            ]
            for i in range(grid.points_per_axis)
        ),
    )
    order = np.argsort(grid.momentum_samples)
    _write_csv(
        outdir / "marginals_momentum.csv",
        ["p", "initial", "final"],
        (
            [
                _fmt(grid.momentum_samples[i]),
                _fmt(marginal_tracker.initial_momentum[i]),
                _fmt(marginal_tracker.final_momentum[i]),
            ]
            for i in order
        ),
    )
    export_disorder_csv(terms.disorder_field, grid, outdir / "disorder.csv")

    # classical-comparison metric: sup-norm inside |x| <= 16
    classical_metric = None
    if late is not None:
        sel = np.abs(grid.positions) <= 16.0
        classical_metric = float(np.abs(late[sel] - rho_cl[sel]).max())

    meta = {
        "config": json.loads(serialize_config(config)),
        "version": __version__,
        "generator_id": GENERATOR_ID,
        "wall_clock_seconds": _time.perf_counter() - started,
        "records": len(record.times),
        "edge_density_max_fraction": edge_max,
        "weak_masked_fraction_mean": float(np.mean(weak_tracker.masked_fractions)),
        "classical_supnorm_x16": classical_metric,
        "norm_drift_max": float(np.abs(1.0 - np.asarray(record.series["norm"])).max()),
        "snapshots": snapshot_writer.written,
    }
    (outdir / "meta.json").write_text(json.dumps(meta, indent=2) + "\n")

    reportmod.render_all(outdir)
    return ExperimentResult(components=comps, record=record, output_dir=outdir)


#: retained eigenpairs for the default spectrum pipeline
DEFAULT_N_STATES = 400

#: density-matrix pairs (level offsets from the peak) traced in coherences.csv
COHERENCE_OFFSETS = (1, 3, 6)


def run_spectrum(
    config: ExperimentConfig,
    output_dir=None,
    n_states: int = DEFAULT_N_STATES,
    trace_t_max: float = 20.0,
) -> Path:
    """Diagonalize the configured Hamiltonian, project the initial state,
    and write spectrum.csv / coherences.csv plus their figures.

    Limited to the geometries `spectral.diagonalize` supports (N=1, or
    N=2 toy grids).
    """
    from . import spectral

    outdir = Path(output_dir if output_dir is not None else config.outputs)
    outdir.mkdir(parents=True, exist_ok=True)
    comps = prepare(config)
    n_states = min(n_states, comps.grid.size)
    basis = spectral.diagonalize(comps.grid, comps.terms, n_states)
    coeffs = spectral.project(comps.psi0, basis)
    basis = basis.with_coefficients(coeffs)

    evals = basis.eigenvalues
    splittings = np.concatenate([[np.nan], np.diff(evals)])
    pops = np.abs(coeffs) ** 2
    _write_csv(
        outdir / "spectrum.csv",
        ["n", "E_n", "dE_n", "c2_n"],
        (
            [str(i), _fmt(evals[i]), _fmt(splittings[i]), _fmt(pops[i])]
            for i in range(n_states)
        ),
    )

    peak = int(np.argmax(np.abs(coeffs)))
    ts = np.arange(0.0, trace_t_max + 1e-9, 0.01)
    rows = []
    for off in COHERENCE_OFFSETS:
        m = peak + off
        if m >= n_states:
            continue
        for t in ts:
            val = spectral.coherence(peak, m, t, basis)
            rows.append(
                [
                    _fmt(t),
                    str(peak),
                    str(m),
                    _fmt(val.real),
                    _fmt(val.imag),
                    _fmt(abs(val)),
                ]
            )
    _write_csv(outdir / "coherences.csv", ["t", "n", "m", "re", "im", "abs"], rows)
    reportmod.render_all(outdir)
    return outdir
