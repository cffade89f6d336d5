"""Position-space potential: harmonic trap, normalized speckle disorder,
and soft-core Coulomb repulsion.

The disorder field is a sum of Gaussian bumps, one per grid point, with
i.i.d. standard-normal amplitudes, rescaled so its discrete quadrature
satisfies sum d(x)^2 dx = gamma_d^2.  The same 1D realization is applied to
every particle axis.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetExceededError
from .grid import GridSpec

logger = logging.getLogger(__name__)

GENERATOR_ID = "numpy-pcg64-standard-normal"


@dataclass(frozen=True, eq=False)
class DisorderField:
    """One static disorder realization on the physical axis."""

    amplitudes: np.ndarray = field(repr=False)
    strength: float
    correlation_width: float
    seed: int
    generator_id: str = GENERATOR_ID


@dataclass(frozen=True, eq=False)
class HamiltonianTerms:
    """Diagonal potential tensors over the configuration grid."""

    trap: np.ndarray = field(repr=False)
    disorder: np.ndarray = field(repr=False)
    coulomb: np.ndarray = field(repr=False)
    total_potential: np.ndarray = field(repr=False)
    omega: float
    alpha: float
    disorder_field: DisorderField | None = field(repr=False, default=None)


def sample_disorder(
    grid: GridSpec, strength: float, correlation_width: float, seed: int
) -> DisorderField:
    """Draw one speckle realization d(x) with sum d^2 dx = strength^2."""
    if strength < 0:
        raise ValueError("disorder strength must be >= 0")
    if correlation_width <= 0:
        raise ValueError("disorder correlation width must be positive")
    x = grid.positions
    if strength == 0.0:
        return DisorderField(
            amplitudes=np.zeros_like(x),
            strength=0.0,
            correlation_width=correlation_width,
            seed=seed,
        )
    rng = np.random.Generator(np.random.PCG64(seed))
    a = rng.standard_normal(grid.points_per_axis)
    mean = float(a.mean())
    if abs(mean) > 5.0 / np.sqrt(grid.points_per_axis):
        logger.warning("disorder amplitude sample mean %.3f is unusually large", mean)
    # kernel matrix exp(-4 (x - g_k)^2 / sigma_d^2) over all grid points g_k
    diff = x[:, None] - x[None, :]
    d = np.exp(-4.0 * diff**2 / correlation_width**2) @ a
    quad = np.sum(d**2) * grid.dx
    d *= strength / np.sqrt(quad)
    return DisorderField(
        amplitudes=d,
        strength=strength,
        correlation_width=correlation_width,
        seed=seed,
    )


def build_terms(
    grid: GridSpec,
    omega: float,
    alpha: float,
    disorder: DisorderField,
    *,
    include_coulomb: bool = True,
    memory_budget: int | None = None,
) -> HamiltonianTerms:
    """Assemble the potential tensors for the N-particle grid.

    ``include_coulomb=False`` produces the non-interacting Hamiltonian used
    by distinguishable-separable runs.
    """
    if omega <= 0:
        raise ValueError("omega must be positive")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    n = grid.n_particles
    if memory_budget is not None and 4 * 8 * grid.size > memory_budget:
        raise BudgetExceededError(
            f"potential tensors need {4 * 8 * grid.size} bytes, budget {memory_budget}"
        )
    x = grid.positions

    def axis_view(values: np.ndarray, ax: int) -> np.ndarray:
        return values.reshape((1,) * ax + (-1,) + (1,) * (n - ax - 1))

    trap = np.zeros(grid.shape)
    dis = np.zeros(grid.shape)
    for ax in range(n):
        trap += axis_view(0.5 * omega**2 * x**2, ax)
        dis += axis_view(disorder.amplitudes, ax)
    cou = np.zeros(grid.shape)
    if include_coulomb and n > 1:
        for a in range(n):
            for b in range(a + 1, n):
                sep = axis_view(x, b) - axis_view(x, a)
                cou += 1.0 / np.sqrt(sep**2 + alpha**2)
    total = trap + dis + cou
    return HamiltonianTerms(
        trap=trap,
        disorder=dis,
        coulomb=cou,
        total_potential=total,
        omega=omega,
        alpha=alpha,
        disorder_field=disorder,
    )


def export_disorder_csv(disorder: DisorderField, grid: GridSpec, path) -> None:
    """Write the disorder realization as CSV with provenance header comments."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# seed={disorder.seed}\n")
        fh.write(f"# generator_id={disorder.generator_id}\n")
        fh.write(f"# gamma_d={disorder.strength!r}\n")
        fh.write(f"# sigma_d={disorder.correlation_width!r}\n")
        fh.write("x,d\n")
        for xi, di in zip(grid.positions, disorder.amplitudes):
            fh.write(f"{xi:.17g},{di:.17g}\n")
