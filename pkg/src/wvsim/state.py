"""Initial states: Gaussian orbitals, antisymmetrized N-particle wave functions,
and the position/momentum marginals used everywhere downstream.

Identical (spinless fermion) states are built as
    Psi(x1..xN) = (1/C) sum_perm sign(perm) prod_j orbital[perm_j](x_j),
i.e. a Slater determinant evaluated on the tensor grid.  Distinguishable
runs use the plain product state instead.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import grid as gridmod
from .errors import LinearlyDependentOrbitalsError, StateExceedsBoxError
from .grid import GridSpec

#: points per edge inspected by the box-leakage checks
EDGE_POINTS = 5


@dataclass(frozen=True)
class OrbitalSpec:
    """One Gaussian orbital: center x0, boost p0, dispersion sigma."""

    center: float
    boost: float
    width: float

    def validate(self, grid: GridSpec) -> None:
        if self.width <= 0:
            raise ValueError("orbital width must be positive")
        if abs(self.center) + 4.0 * self.width >= grid.half_width:
            raise ValueError(
                f"orbital at x0={self.center}, sigma={self.width} does not fit "
                f"inside the box of half-width {grid.half_width}"
            )


@dataclass(frozen=True, eq=False)
class WaveFunction:
    """Complex amplitude tensor over the configuration grid at one time."""

    amplitudes: np.ndarray
    grid: GridSpec
    time: float = 0.0

    def norm(self) -> float:
        """L2 norm with the dx^N measure."""
        a = self.amplitudes
        return float(np.sqrt(np.vdot(a, a).real * self.grid.volume_element))

    def density(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def at_time(self, t: float, amplitudes: np.ndarray | None = None) -> "WaveFunction":
        if amplitudes is None:
            return replace(self, time=t)
        return WaveFunction(amplitudes=amplitudes, grid=self.grid, time=t)


def gaussian_orbital(spec: OrbitalSpec, grid: GridSpec) -> np.ndarray:
    """L2-normalized boosted Gaussian on the physical axis.

    Raises StateExceedsBoxError when the normalized tail mass within the
    outermost EDGE_POINTS grid cells exceeds 1e-12.
    """
    spec.validate(grid)
    x = grid.positions
    psi = np.exp(-((x - spec.center) ** 2) / (2.0 * spec.width**2)) * np.exp(
        1j * spec.boost * (x - spec.center)
    )
    psi /= np.sqrt(np.sum(np.abs(psi) ** 2) * grid.dx)
    dens = np.abs(psi) ** 2
    tail = (dens[:EDGE_POINTS].sum() + dens[-EDGE_POINTS:].sum()) * grid.dx
    if tail > 1e-12:
        raise StateExceedsBoxError(
            f"orbital tail mass {tail:.3e} at the box edge exceeds 1e-12"
        )
    return psi


def _permutations_with_sign(n: int):
    """Yield (permutation, sign) by Heap's minimal-change algorithm.

    Each successive permutation differs by one transposition, so the sign
    simply alternates starting from +1 for the identity.
    """
    perm = list(range(n))
    sign = 1
    yield tuple(perm), sign
    c = [0] * n
    i = 1
    while i < n:
        if c[i] < i:
            if i % 2 == 0:
                perm[0], perm[i] = perm[i], perm[0]
            else:
                perm[c[i]], perm[i] = perm[i], perm[c[i]]
            sign = -sign
            yield tuple(perm), sign
            c[i] += 1
            i = 1
        else:
            c[i] = 0
            i += 1


def _outer_product(factors: list[np.ndarray]) -> np.ndarray:
    out = factors[0]
    for f in factors[1:]:
        out = np.multiply.outer(out, f)
    return out


def antisymmetrize(orbitals: list[np.ndarray], grid: GridSpec) -> WaveFunction:
    """Normalized antisymmetric combination of N single-particle orbitals.

    Orbitals must be pairwise non-identical (overlap modulus < 1 - 1e-12);
    raises LinearlyDependentOrbitalsError when the unnormalized combination
    collapses below 1e-12 in norm.
    """
    n = grid.n_particles
    if len(orbitals) != n:
        raise ValueError(f"expected {n} orbitals, got {len(orbitals)}")
    for a in range(n):
        for b in range(a + 1, n):
            overlap = abs(np.vdot(orbitals[a], orbitals[b]) * grid.dx)
            if overlap >= 1.0 - 1e-12:
                raise LinearlyDependentOrbitalsError(
                    f"orbitals {a} and {b} overlap with modulus {overlap:.12f}"
                )
    if n == 1:
        return WaveFunction(orbitals[0].copy(), grid, 0.0)
    total = np.zeros(grid.shape, dtype=complex)
    for perm, sign in _permutations_with_sign(n):
        total += sign * _outer_product([orbitals[j] for j in perm])
    raw_norm = np.sqrt(np.sum(np.abs(total) ** 2) * grid.volume_element)
    if raw_norm < 1e-12:
        raise LinearlyDependentOrbitalsError(
            f"antisymmetrized norm {raw_norm:.3e} below 1e-12"
        )
    total /= raw_norm
    return WaveFunction(total, grid, 0.0)


def product_state(orbitals: list[np.ndarray], grid: GridSpec) -> WaveFunction:
    """Separable product of N orbitals, for distinguishable-particle runs."""
    n = grid.n_particles
    if len(orbitals) != n:
        raise ValueError(f"expected {n} orbitals, got {len(orbitals)}")
    total = _outer_product(list(orbitals)).astype(complex)
    total /= np.sqrt(np.sum(np.abs(total) ** 2) * grid.volume_element)
    return WaveFunction(total, grid, 0.0)


def marginal_position_density(psi: WaveFunction, keep_axis: int) -> np.ndarray:
    """P^k(x): |Psi|^2 integrated over every axis except particle ``keep_axis``."""
    ax = psi.grid.axis_index(keep_axis)
    return _marginal_of_density(psi.density(), psi.grid, ax, psi.grid.dx)


def marginal_momentum_density(psi: WaveFunction, keep_axis: int) -> np.ndarray:
    """Momentum-space marginal on ``grid.momentum_samples`` (FFT ordering)."""
    ax = psi.grid.axis_index(keep_axis)
    dens = np.abs(gridmod.to_momentum(psi)) ** 2
    return _marginal_of_density(dens, psi.grid, ax, psi.grid.dk)


def _marginal_of_density(
    density: np.ndarray, grid: GridSpec, axis: int, cell: float
) -> np.ndarray:
    axes = tuple(a for a in range(grid.n_particles) if a != axis)
    out = density.sum(axis=axes) if axes else density.copy()
    return out * cell ** (grid.n_particles - 1)


def exchange_asymmetry(psi: WaveFunction) -> float:
    """Max deviation from antisymmetry over all axis transpositions.

    Returns max |Psi + Psi_swapped| relative to max |Psi|; zero for a
    perfectly antisymmetric state, and 0.0 by convention for N=1.
    """
    n = psi.grid.n_particles
    if n == 1:
        return 0.0
    peak = np.abs(psi.amplitudes).max()
    worst = 0.0
    for a in range(n):
        for b in range(a + 1, n):
            dev = np.abs(psi.amplitudes + np.swapaxes(psi.amplitudes, a, b)).max()
            worst = max(worst, dev / peak)
    return worst


def edge_density_fraction(psi: WaveFunction) -> float:
    """Peak |Psi|^2 within EDGE_POINTS of any box face, relative to the global peak."""
    dens = psi.density()
    peak = dens.max()
    if peak == 0.0:
        return 0.0
    worst = 0.0
    for ax in range(psi.grid.n_particles):
        sl_lo = [slice(None)] * psi.grid.n_particles
        sl_hi = [slice(None)] * psi.grid.n_particles
        sl_lo[ax] = slice(0, EDGE_POINTS)
        sl_hi[ax] = slice(-EDGE_POINTS, None)
        worst = max(worst, dens[tuple(sl_lo)].max(), dens[tuple(sl_hi)].max())
    return worst / peak
