"""Expectation values and thermalization diagnostics.

Momentum expectations are computed along two independent routes (momentum-
space quadrature and the derivative inner product Real<Psi|-i dPsi/dx_j>)
and must agree to 1e-8; the quadrature value is the one returned.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import grid as gridmod
from .grid import GridSpec
from .hamiltonian import HamiltonianTerms
from .state import (
    WaveFunction,
    marginal_momentum_density,
    marginal_position_density,
)

DUAL_ROUTE_TOL = 1e-8


@dataclass(frozen=True)
class ObservableRecord:
    """Per-snapshot expectation values (energies are totals, not per particle)."""

    time: float
    x_mean: tuple[float, ...]
    p_mean: tuple[float, ...]
    x_rms: tuple[float, ...]
    p_rms: tuple[float, ...]
    kinetic: float
    v_trap: float
    v_disorder: float
    v_coulomb: float
    total: float


def expect_position(psi: WaveFunction, j: int) -> float:
    """<x_j> by position quadrature."""
    marg = marginal_position_density(psi, j)
    return float(np.sum(psi.grid.positions * marg) * psi.grid.dx)


def _momentum_mean_derivative_route(psi: WaveFunction, j: int) -> float:
    dpsi = gridmod.spectral_derivative(psi, j)
    val = np.vdot(psi.amplitudes, -1j * dpsi) * psi.grid.volume_element
    return float(val.real)


def expect_momentum(psi: WaveFunction, j: int) -> float:
    """<p_j> by momentum quadrature, cross-checked against the derivative route."""
    marg = marginal_momentum_density(psi, j)
    quad = float(np.sum(psi.grid.momentum_samples * marg) * psi.grid.dk)
    deriv = _momentum_mean_derivative_route(psi, j)
    if abs(quad - deriv) > DUAL_ROUTE_TOL:
        raise AssertionError(
            f"<p_{j}> routes disagree: quadrature {quad!r} vs derivative {deriv!r}"
        )
    return quad


def energy_decomposition(psi: WaveFunction, terms: HamiltonianTerms) -> ObservableRecord:
    """Full observable record for one snapshot.

    Kinetic energy via momentum quadrature; potential terms via position
    quadrature against each tensor; `total` is computed independently as
    Real<Psi|H Psi> so the additivity invariant is a genuine check.
    """
    grid = psi.grid
    n = grid.n_particles
    dens = psi.density()
    cell = grid.volume_element

    tilde = gridmod.to_momentum(psi)
    mom_dens = np.abs(tilde) ** 2
    k2 = grid.momentum_samples**2

    x_mean, p_mean, x_rms, p_rms = [], [], [], []
    kinetic = 0.0
    for ax in range(n):
        axes = tuple(a for a in range(n) if a != ax)
        marg_x = dens.sum(axis=axes) * grid.dx ** (n - 1) if axes else dens
        marg_p = mom_dens.sum(axis=axes) * grid.dk ** (n - 1) if axes else mom_dens
        mx = float(np.sum(grid.positions * marg_x) * grid.dx)
        mx2 = float(np.sum(grid.positions**2 * marg_x) * grid.dx)
        mp = float(np.sum(grid.momentum_samples * marg_p) * grid.dk)
        mp2 = float(np.sum(k2 * marg_p) * grid.dk)
        x_mean.append(mx)
        p_mean.append(mp)
        x_rms.append(float(np.sqrt(max(mx2 - mx**2, 0.0))))
        p_rms.append(float(np.sqrt(max(mp2 - mp**2, 0.0))))
        kinetic += 0.5 * mp2

    v_trap = float(np.sum(terms.trap * dens) * cell)
    v_dis = float(np.sum(terms.disorder * dens) * cell)
    v_cou = float(np.sum(terms.coulomb * dens) * cell)

    # independent total: spectral kinetic application plus the potential tensor
    hpsi = terms.total_potential * psi.amplitudes
    for ax in range(n):
        d2 = gridmod.derivative_along_axis(
            gridmod.derivative_along_axis(psi.amplitudes, grid, ax), grid, ax
        )
        hpsi -= 0.5 * d2
    total = float((np.vdot(psi.amplitudes, hpsi) * cell).real)

    return ObservableRecord(
        time=psi.time,
        x_mean=tuple(x_mean),
        p_mean=tuple(p_mean),
        x_rms=tuple(x_rms),
        p_rms=tuple(p_rms),
        kinetic=kinetic,
        v_trap=v_trap,
        v_disorder=v_dis,
        v_coulomb=v_cou,
        total=total,
    )


def virial_residual(record: ObservableRecord) -> float:
    """|<K> - <V>| / <E> with <V> the summed potential terms."""
    if record.total == 0.0:
        raise ZeroDivisionError("virial residual undefined at zero total energy")
    v = record.v_trap + record.v_disorder + record.v_coulomb
    return abs(record.kinetic - v) / abs(record.total)


def classical_microcanonical_density(
    grid: GridSpec, l0: float, p0: float
) -> np.ndarray:
    """Microcanonical harmonic-oscillator position density on the grid.

    rho(x) = 1 / (pi l0 sqrt(p0^2 - x^2/l0^2)) inside the turning points
    x_tp = l0 p0, zero outside; in each of the two cells nearest a turning
    point the integrable divergence is replaced by the analytic average
    over that cell, using arcsin(x/x_tp)/pi as the antiderivative.
    """
    if p0 <= 0:
        raise ValueError("p0 must be positive")
    x = grid.positions
    x_tp = l0 * p0
    out = np.zeros_like(x)
    inside = np.abs(x) < x_tp
    out[inside] = 1.0 / (np.pi * l0 * np.sqrt(p0**2 - x[inside] ** 2 / l0**2))

    def cell_average(xi: float) -> float:
        lo = max(xi - grid.dx / 2.0, -x_tp)
        hi = min(xi + grid.dx / 2.0, x_tp)
        mass = (np.arcsin(hi / x_tp) - np.arcsin(lo / x_tp)) / np.pi
        return mass / grid.dx

    idx_inside = np.nonzero(inside)[0]
    if idx_inside.size:
        for i in (idx_inside[:2].tolist() + idx_inside[-2:].tolist()):
            out[i] = cell_average(x[i])
    return out


def phase_space_trace(
    records: list[ObservableRecord], j: int
) -> list[tuple[float, float]]:
    """(x_mean_j, p_mean_j) pairs in time order, for pseudo phase-space plots."""
    if not records:
        raise ValueError("empty record series")
    return [(r.x_mean[j - 1], r.p_mean[j - 1]) for r in records]


def equilibration_time(
    times: np.ndarray,
    residuals: np.ndarray,
    window: float = 10.0,
    threshold: float = 0.05,
) -> float | None:
    """Smallest recorded t after which the centered sliding-window average
    of the virial residual stays below ``threshold``.

    Returns None when no such time exists in the series.
    """
    times = np.asarray(times, dtype=float)
    residuals = np.asarray(residuals, dtype=float)
    if times.size != residuals.size or times.size == 0:
        raise ValueError("times and residuals must be equal-length, nonempty")
    half = window / 2.0
    smoothed = np.empty_like(residuals)
    for i, t in enumerate(times):
        sel = (times >= t - half) & (times <= t + half)
        smoothed[i] = residuals[sel].mean()
    below = smoothed < threshold
    # find the first index from which `below` holds through the end
    ok_from = None
    for i in range(times.size - 1, -1, -1):
        if not below[i]:
            break
        ok_from = i
    return None if ok_from is None else float(times[ok_from])
