"""Second-order split-operator (Strang) propagation of the Schrödinger
equation, i dPsi/dt = (K + V) Psi, with the kinetic factor applied in
momentum space.

One step is exp(-iV dt/2) exp(-iK dt) exp(-iV dt/2); between observer
records the two adjacent potential half-steps are merged into a single
full step, which halves the number of elementwise phase passes without
changing the recorded states.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping

import numpy as np

from .errors import NanDetectedError
from .grid import GridSpec, fftn, ifftn
from .hamiltonian import HamiltonianTerms
from .state import WaveFunction

Observer = Callable[[WaveFunction], Any]


@dataclass(frozen=True, eq=False)
class PropagationPlan:
    """Time stepping parameters bound to a set of Hamiltonian terms."""

    dt: float
    t_final: float
    record_stride: int
    terms: HamiltonianTerms

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.record_stride < 1:
            raise ValueError("record_stride must be >= 1")
        steps = self.t_final / self.dt
        if abs(steps - round(steps)) > 1e-6 * max(1.0, steps):
            raise ValueError(
                f"t_final/dt = {steps} is not a whole number of steps"
            )
        vmax = float(np.abs(self.terms.total_potential).max())
        if self.dt * vmax >= np.pi:
            warnings.warn(
                f"dt*max|V| = {self.dt * vmax:.2f} >= pi: potential phase wraps "
                "within one step (harmless only where the density vanishes)",
                stacklevel=2,
            )

    @property
    def n_steps(self) -> int:
        return round(self.t_final / self.dt)


@dataclass
class RunRecord:
    """Observer outputs keyed by name, one entry per recorded time."""

    times: list[float] = field(default_factory=list)
    series: dict[str, list] = field(default_factory=dict)
    final_state: WaveFunction | None = None

    def times_array(self) -> np.ndarray:
        return np.asarray(self.times)


def _kinetic_phase(grid: GridSpec, dt: float) -> np.ndarray:
    n = grid.n_particles
    k2 = np.zeros(grid.shape)
    for ax in range(n):
        shape = (1,) * ax + (-1,) + (1,) * (n - ax - 1)
        k2 = k2 + (grid.momentum_samples**2).reshape(shape)
    return np.exp(-0.5j * dt * k2)


def step(psi: WaveFunction, plan: PropagationPlan) -> WaveFunction:
    """One Strang step; returns the state at psi.time + dt."""
    half_v = np.exp(-0.5j * plan.dt * plan.terms.total_potential)
    phase_k = _kinetic_phase(psi.grid, plan.dt)
    a = psi.amplitudes * half_v
    a = ifftn(fftn(a, overwrite=True) * phase_k, overwrite=True)
    a *= half_v
    if np.isnan(a).any():
        raise NanDetectedError("non-finite amplitudes after one step")
    return WaveFunction(a, psi.grid, psi.time + plan.dt)


def run(
    psi0: WaveFunction,
    plan: PropagationPlan,
    observers: Mapping[str, Observer],
) -> RunRecord:
    """Propagate psi0 to t_final, invoking observers at t=0 and every
    record_stride steps (plus the final step).

    Observers receive read-only WaveFunction snapshots; their outputs are
    collected per name in the returned RunRecord.
    """
    record = RunRecord(series={name: [] for name in observers})
    n_steps = plan.n_steps
    grid = psi0.grid

    def emit(snapshot: WaveFunction, step_index: int):
        a = snapshot.amplitudes
        if np.isnan(a).any():
            peak = np.nanmax(np.abs(a))
            raise NanDetectedError(
                f"NaN amplitudes at step {step_index} (t={snapshot.time:g}); "
                f"max finite amplitude {peak:.3e}"
            )
        record.times.append(snapshot.time)
        for name, obs in observers.items():
            try:
                record.series[name].append(obs(snapshot))
            except Exception as exc:  # pragma: no cover - observer bug surface
                raise RuntimeError(
                    f"observer {name!r} failed at step {step_index} "
                    f"(t={snapshot.time:g})"
                ) from exc

    emit(psi0, 0)
    if n_steps == 0:
        record.final_state = psi0
        return record

    half_v = np.exp(-0.5j * plan.dt * plan.terms.total_potential)
    full_v = half_v * half_v
    phase_k = _kinetic_phase(grid, plan.dt)

    a = psi0.amplitudes * half_v
    for s in range(1, n_steps + 1):
        a = fftn(a, overwrite=True)
        a *= phase_k
        a = ifftn(a, overwrite=True)
        boundary = (s % plan.record_stride == 0) or (s == n_steps)
        if boundary:
            a *= half_v
            snapshot = WaveFunction(a.copy(), grid, psi0.time + s * plan.dt)
            emit(snapshot, s)
            if s < n_steps:
                a *= half_v
        else:
            a *= full_v
    record.final_state = WaveFunction(a, grid, psi0.time + n_steps * plan.dt)
    return record
