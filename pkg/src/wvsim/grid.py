"""Uniform 1D grid, its N-fold tensor product, and spectral transforms.

The physical axis is the half-open box [-L, L) sampled at M equidistant
points (M a power of two), so dx = 2L/M and the conjugate momentum grid is
the standard FFT ordering (0, dk, ..., -dk) with dk = pi/L.  All transforms
assume periodic boundary conditions; states are expected to vanish at the
box edge, which the propagator monitors.

Natural units (hbar = m = 1) throughout.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np
import scipy.fft as _fft

from .errors import BudgetExceededError

#: default cap on a single complex configuration tensor (bytes)
DEFAULT_MEMORY_BUDGET = 4 * 2**30

#: threads handed to scipy.fft; the grids here are too small to benefit
#: from more workers than physical cores
FFT_WORKERS = min(os.cpu_count() or 1, 8)

_SQRT_2PI = np.sqrt(2.0 * np.pi)


@dataclass(frozen=True, eq=False)
class GridSpec:
    """Discretized physical axis and the derived N-particle tensor grid."""

    n_particles: int
    points_per_axis: int
    half_width: float
    dx: float
    positions: np.ndarray = field(repr=False)
    momentum_samples: np.ndarray = field(repr=False)

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.points_per_axis,) * self.n_particles

    @property
    def size(self) -> int:
        return self.points_per_axis**self.n_particles

    @property
    def dk(self) -> float:
        return np.pi / self.half_width

    @property
    def volume_element(self) -> float:
        """dx^N measure of one configuration-space cell."""
        return self.dx**self.n_particles

    def axis_index(self, particle: int) -> int:
        """Map a 1-based particle label onto a tensor axis."""
        if not 1 <= particle <= self.n_particles:
            raise ValueError(
                f"particle index {particle} out of range 1..{self.n_particles}"
            )
        return particle - 1


def make_grid(
    n_particles: int,
    points_per_axis: int,
    half_width: float,
    *,
    memory_budget: int = DEFAULT_MEMORY_BUDGET,
    max_particles: int = 3,
) -> GridSpec:
    """Build a GridSpec for ``n_particles`` particles on [-L, L).

    ``points_per_axis`` must be a power of two >= 16.  Rejects grids whose
    complex configuration tensor (16 bytes per point) would exceed
    ``memory_budget``.
    """
    if not 1 <= n_particles <= max_particles:
        raise ValueError(f"n_particles must be in 1..{max_particles}")
    m = points_per_axis
    if m < 16 or m & (m - 1) != 0:
        raise ValueError("points_per_axis must be a power of two >= 16")
    if half_width <= 0:
        raise ValueError("half_width must be positive")
    if 16 * m**n_particles > memory_budget:
        raise BudgetExceededError(
            f"grid of {m}^{n_particles} points needs {16 * m**n_particles} bytes, "
            f"budget is {memory_budget}"
        )
    dx = 2.0 * half_width / m
    positions = -half_width + dx * np.arange(m)
    momentum_samples = 2.0 * np.pi * np.fft.fftfreq(m, d=dx)
    return GridSpec(
        n_particles=n_particles,
        points_per_axis=m,
        half_width=half_width,
        dx=dx,
        positions=positions,
        momentum_samples=momentum_samples,
    )


def fftn(a: np.ndarray, overwrite: bool = False) -> np.ndarray:
    return _fft.fftn(a, workers=FFT_WORKERS, overwrite_x=overwrite)


def ifftn(a: np.ndarray, overwrite: bool = False) -> np.ndarray:
    return _fft.ifftn(a, workers=FFT_WORKERS, overwrite_x=overwrite)


def derivative_along_axis(amplitudes: np.ndarray, grid: GridSpec, axis: int) -> np.ndarray:
    """Spectral d/dx along a tensor ``axis`` (0-based); exact for band-limited data."""
    k = grid.momentum_samples.reshape(
        (1,) * axis + (-1,) + (1,) * (amplitudes.ndim - axis - 1)
    )
    spec = _fft.fft(amplitudes, axis=axis, workers=FFT_WORKERS)
    spec *= 1j * k
    return _fft.ifft(spec, axis=axis, workers=FFT_WORKERS, overwrite_x=True)


def spectral_derivative(psi, axis: int) -> np.ndarray:
    """Return the partial derivative of a WaveFunction along particle ``axis`` (1-based)."""
    ax = psi.grid.axis_index(axis)
    return derivative_along_axis(psi.amplitudes, psi.grid, ax)


def _momentum_phase(grid: GridSpec) -> np.ndarray:
    # continuum transform needs exp(-i k x0) per axis relative to the FFT's
    # index-0 origin at x0 = -L
    return np.exp(-1j * grid.momentum_samples * grid.positions[0])


def to_momentum(psi) -> np.ndarray:
    """Momentum-representation tensor of psi, unitary in the (dx, dk) measures.

    Normalized so that sum |psi_tilde|^2 dk^N equals sum |psi|^2 dx^N; a
    Gaussian of width sigma maps to a Gaussian of width 1/sigma centered at
    its boost momentum.
    """
    grid = psi.grid
    out = fftn(psi.amplitudes)
    phase = _momentum_phase(grid)
    scale = grid.dx / _SQRT_2PI
    for ax in range(grid.n_particles):
        shape = (1,) * ax + (-1,) + (1,) * (grid.n_particles - ax - 1)
        out *= (scale * phase).reshape(shape)
    return out


def from_momentum(psi_tilde: np.ndarray, grid: GridSpec) -> np.ndarray:
    """Exact inverse of :func:`to_momentum`."""
    out = psi_tilde.copy()
    phase = _momentum_phase(grid)
    scale = grid.dx / _SQRT_2PI
    for ax in range(grid.n_particles):
        shape = (1,) * ax + (-1,) + (1,) * (grid.n_particles - ax - 1)
        out /= (scale * phase).reshape(shape)
    return ifftn(out, overwrite=True)
