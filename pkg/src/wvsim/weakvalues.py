"""Weak values of momentum: configuration-space fields, their physical-space
reductions, the identical-particle average, and time averaging.

For a particle pair (j, k) the physical-space field is

    pw[j,k](x) = (integral of J^j over all axes but k, at x_k = x)
                 / (marginal density P^k(x)),

where J^j = Imag(conj(Psi) dPsi/dx_j).  Points where the denominator falls
below the node mask (1e-12 of its peak) carry NaN and are excluded from
every aggregate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import grid as gridmod
from .errors import EmptyWindowError, NodePointError, SymmetryViolationError
from .state import WaveFunction, exchange_asymmetry, marginal_position_density

#: node mask: denominator must reach this fraction of its per-snapshot peak
MASK_FRACTION = 1e-12

#: largest tolerated antisymmetry violation for identical-particle estimators
ANTISYMMETRY_TOL = 1e-8

DUAL_ROUTE_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class WeakValueField:
    """A weak-value estimate over the physical axis with a validity mask."""

    values: np.ndarray
    mask: np.ndarray
    kind: str
    time: float

    def masked_values(self) -> np.ndarray:
        return self.values[self.mask]


@dataclass(frozen=True)
class ConfigWeakValue:
    """Weak value of p_j at one configuration-space point."""

    point: tuple[float, ...]
    axis: int
    value: float


def current_density_axis(psi: WaveFunction, j: int) -> np.ndarray:
    """J^j = Imag(conj(Psi) dPsi/dx_j) over the configuration grid."""
    dpsi = gridmod.spectral_derivative(psi, j)
    return (np.conj(psi.amplitudes) * dpsi).imag


def _snap_to_grid(psi: WaveFunction, point) -> tuple[int, ...]:
    grid = psi.grid
    coords = np.atleast_1d(np.asarray(point, dtype=float))
    if coords.shape != (grid.n_particles,):
        raise ValueError(
            f"point must have {grid.n_particles} coordinates, got {coords.shape}"
        )
    idx = np.rint((coords - grid.positions[0]) / grid.dx).astype(int)
    if np.any(idx < 0) or np.any(idx >= grid.points_per_axis):
        raise ValueError(f"point {coords} outside the box")
    return tuple(int(i) for i in idx)


def weak_config(psi: WaveFunction, j: int, point) -> ConfigWeakValue:
    """Weak value of p_j at a configuration point (snapped to the grid).

    Computed both as J^j/|Psi|^2 and as Real((-i dPsi/dx_j)/Psi); the two
    must agree to 1e-8.  Raises NodePointError below the node mask.
    """
    grid = psi.grid
    idx = _snap_to_grid(psi, point)
    dens = psi.density()
    eps = MASK_FRACTION * dens.max()
    if dens[idx] < eps:
        raise NodePointError(
            f"density {dens[idx]:.3e} at {point} is below the node mask {eps:.3e}"
        )
    dpsi = gridmod.spectral_derivative(psi, j)
    via_current = (np.conj(psi.amplitudes[idx]) * dpsi[idx]).imag / dens[idx]
    via_ratio = (-1j * dpsi[idx] / psi.amplitudes[idx]).real
    if abs(via_current - via_ratio) > DUAL_ROUTE_TOL:
        raise AssertionError(
            f"weak-value routes disagree at {point}: {via_current!r} vs {via_ratio!r}"
        )
    coords = tuple(float(grid.positions[i]) for i in idx)
    return ConfigWeakValue(point=coords, axis=j, value=float(via_current))


def weak_pair(psi: WaveFunction, j: int, k: int) -> WeakValueField:
    """Physical-space weak value pw[j,k](x): weak momentum of particle j,
    strong position of particle k.  j == k is allowed."""
    grid = psi.grid
    ax_j = grid.axis_index(j)  # validates j
    del ax_j
    ax_k = grid.axis_index(k)
    current = current_density_axis(psi, j)
    axes = tuple(a for a in range(grid.n_particles) if a != ax_k)
    numerator = (
        current.sum(axis=axes) * grid.dx ** (grid.n_particles - 1)
        if axes
        else current
    )
    denominator = marginal_position_density(psi, k)
    mask = denominator >= MASK_FRACTION * denominator.max()
    values = np.full(grid.points_per_axis, np.nan)
    values[mask] = numerator[mask] / denominator[mask]
    return WeakValueField(values=values, mask=mask, kind=f"pair({j},{k})", time=psi.time)


def weak_single(psi: WaveFunction) -> WeakValueField:
    """Single-particle weak value J/|psi|^2 (N=1 convenience)."""
    if psi.grid.n_particles != 1:
        raise ValueError("weak_single requires a single-particle state")
    field = weak_pair(psi, 1, 1)
    return WeakValueField(values=field.values, mask=field.mask, kind="single", time=psi.time)


def weak_identical(psi: WaveFunction, debug: bool = False) -> WeakValueField:
    """Physical-space weak value for indistinguishable particles.

    Uses the exchange symmetries to reduce the N^2 double sum to
    (pw[1,1] + (N-1) pw[1,2]) / N; with ``debug=True`` all N^2 terms are
    evaluated and must agree with the reduced form to 1e-10.
    """
    n = psi.grid.n_particles
    asym = exchange_asymmetry(psi)
    if asym > ANTISYMMETRY_TOL:
        raise SymmetryViolationError(
            f"exchange asymmetry {asym:.3e} exceeds {ANTISYMMETRY_TOL}"
        )
    pw_same = weak_pair(psi, 1, 1)
    if n == 1:
        values = pw_same.values.copy()
        mask = pw_same.mask.copy()
    else:
        pw_cross = weak_pair(psi, 1, 2)
        mask = pw_same.mask & pw_cross.mask
        values = np.full_like(pw_same.values, np.nan)
        values[mask] = (
            pw_same.values[mask] + (n - 1) * pw_cross.values[mask]
        ) / n
    if debug:
        acc = np.zeros(psi.grid.points_per_axis)
        acc_mask = np.ones(psi.grid.points_per_axis, dtype=bool)
        for j in range(1, n + 1):
            for k in range(1, n + 1):
                f = weak_pair(psi, j, k)
                acc_mask &= f.mask
                acc = acc + np.where(f.mask, f.values, 0.0)
        acc /= n**2
        common = acc_mask & mask
        dev = np.abs(acc[common] - values[common]).max() if common.any() else 0.0
        if dev > 1e-10:
            raise AssertionError(
                f"reduced identical-particle weak value deviates from the "
                f"full double sum by {dev:.3e}"
            )
    return WeakValueField(values=values, mask=mask, kind="identical", time=psi.time)


def time_average(times, values, t: float, window: float) -> float:
    """Trapezoidal mean of a weak-value series over [t - T/2, t + T/2].

    Masked (NaN) samples are excluded and the weight renormalized over the
    surviving samples.  Raises EmptyWindowError when nothing survives.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.shape != values.shape:
        raise ValueError("times and values must have matching shapes")
    lo, hi = t - window / 2.0, t + window / 2.0
    pad = 1e-9 * max(1.0, abs(hi))
    if lo < times[0] - pad or hi > times[-1] + pad:
        raise ValueError(
            f"window [{lo:g}, {hi:g}] outside recorded range "
            f"[{times[0]:g}, {times[-1]:g}]"
        )
    sel = (times >= lo - pad) & (times <= hi + pad)
    t_win = times[sel]
    v_win = values[sel]
    keep = np.isfinite(v_win)
    t_win, v_win = t_win[keep], v_win[keep]
    if t_win.size == 0:
        raise EmptyWindowError(f"no unmasked samples in [{lo:g}, {hi:g}]")
    if t_win.size == 1:
        return float(v_win[0])
    span = t_win[-1] - t_win[0]
    return float(np.trapezoid(v_win, t_win) / span)
