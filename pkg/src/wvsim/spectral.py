"""Grid diagonalization, energy-representation density matrix, and the
diagonal/off-diagonal decomposition of density and current.

The dense Hamiltonian uses the same spectral kinetic operator as the
split-operator propagator (built by applying -d^2/2dx^2 through the FFT to
the identity), so eigenbasis reconstruction and Strang propagation evolve
the identical discrete model and can be cross-validated against each other.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.fft as _fft
import scipy.linalg as sla

from .errors import BudgetExceededError
from .grid import GridSpec, derivative_along_axis
from .hamiltonian import HamiltonianTerms
from .state import WaveFunction

#: below this captured fraction, projections/reconstructions warn
COMPLETENESS_FLOOR = 0.999


@dataclass(frozen=True, eq=False)
class EnergyBasis:
    """Lowest eigenpairs of a grid Hamiltonian, plus optional projections."""

    eigenvalues: np.ndarray = field(repr=False)
    eigenvectors: np.ndarray = field(repr=False)  # (dimension, *grid.shape), real
    grid: GridSpec = field(repr=False)
    coefficients: np.ndarray | None = field(repr=False, default=None)

    @property
    def dimension(self) -> int:
        return self.eigenvalues.size

    def with_coefficients(self, coefficients: np.ndarray) -> "EnergyBasis":
        return replace(self, coefficients=np.asarray(coefficients, dtype=complex))

    def _require_coefficients(self) -> np.ndarray:
        if self.coefficients is None:
            raise ValueError("basis carries no projection coefficients")
        return self.coefficients


@dataclass(frozen=True, eq=False)
class DensityCurrentDecomposition:
    """Diagonal/off-diagonal split of |Psi|^2 and J at one time (N=1)."""

    dia_density: np.ndarray
    off_density: np.ndarray
    dia_current: np.ndarray
    off_current: np.ndarray


def kinetic_matrix(grid: GridSpec) -> np.ndarray:
    """Dense -0.5 d^2/dx^2 with spectral (FFT) action, symmetrized."""
    m = grid.points_per_axis
    k2 = 0.5 * grid.momentum_samples**2
    cols = _fft.ifft(k2[:, None] * _fft.fft(np.eye(m), axis=0), axis=0)
    k = cols.real
    return 0.5 * (k + k.T)


def diagonalize(grid: GridSpec, terms: HamiltonianTerms, n_states: int) -> EnergyBasis:
    """Lowest ``n_states`` eigenpairs of the grid Hamiltonian.

    N=1 at any M; N=2 only up to M=64 (dense eigenproblem budget).
    Eigenvectors are orthonormal under the dx^N quadrature and gauge-fixed
    so the largest-magnitude component is positive.
    """
    n = grid.n_particles
    m = grid.points_per_axis
    if n == 2 and m > 64:
        raise BudgetExceededError(f"N=2 dense eigenproblem capped at M=64, got M={m}")
    if n > 2:
        raise BudgetExceededError("diagonalization supports N=1 (any M) or N=2 toys")
    if not 1 <= n_states <= grid.size:
        raise ValueError(f"n_states must be in 1..{grid.size}")
    kin = kinetic_matrix(grid)
    if n == 1:
        h = kin + np.diag(terms.total_potential)
    else:
        eye = np.eye(m)
        h = (
            np.kron(kin, eye)
            + np.kron(eye, kin)
            + np.diag(terms.total_potential.ravel())
        )
    evals, evecs = sla.eigh(h, subset_by_index=(0, n_states - 1))
    vecs = evecs.T / np.sqrt(grid.volume_element)
    for i in range(vecs.shape[0]):
        pivot = np.argmax(np.abs(vecs[i]))
        if vecs[i, pivot] < 0:
            vecs[i] = -vecs[i]
    return EnergyBasis(
        eigenvalues=evals,
        eigenvectors=vecs.reshape((n_states,) + grid.shape),
        grid=grid,
    )


def apply_hamiltonian(psi: np.ndarray, grid: GridSpec, terms: HamiltonianTerms) -> np.ndarray:
    """H psi with the spectral kinetic operator (any N); used for residual checks."""
    out = terms.total_potential * psi
    for ax in range(grid.n_particles):
        out -= 0.5 * derivative_along_axis(
            derivative_along_axis(psi, grid, ax), grid, ax
        )
    return out


def project(psi0: WaveFunction, basis: EnergyBasis) -> np.ndarray:
    """Coefficients c_n = <n|psi0> by quadrature; warns when the retained
    basis captures less than 99.9% of the state."""
    if psi0.grid is not basis.grid and psi0.grid.shape != basis.grid.shape:
        raise ValueError("state and basis live on different grids")
    flat = basis.eigenvectors.reshape(basis.dimension, -1)
    c = flat @ psi0.amplitudes.ravel() * psi0.grid.volume_element
    captured = float(np.sum(np.abs(c) ** 2))
    if captured < COMPLETENESS_FLOOR:
        warnings.warn(
            f"retained basis captures only {captured:.6f} of the state",
            stacklevel=2,
        )
    return c


def count_activated(
    coefficients: np.ndarray,
    threshold_fraction: float = 0.1,
    convention: str = "amplitude",
) -> int:
    """Number of levels with weight above ``threshold_fraction`` of the peak.

    ``convention="amplitude"`` counts |c_n| >= f * max|c_n| (default);
    ``convention="population"`` counts |c_n|^2 >= f * max|c_n|^2.
    """
    c = np.abs(np.asarray(coefficients))
    if c.size == 0:
        raise ValueError("empty coefficient vector")
    if convention == "amplitude":
        return int(np.count_nonzero(c >= threshold_fraction * c.max()))
    if convention == "population":
        return int(np.count_nonzero(c**2 >= threshold_fraction * (c.max() ** 2)))
    raise ValueError(f"unknown convention {convention!r}")


def coherence(n: int, m: int, t: float, basis: EnergyBasis) -> complex:
    """Density-matrix element rho[n,m](t) = c_n conj(c_m) exp(i(E_m - E_n)t)."""
    c = basis._require_coefficients()
    if not (0 <= n < basis.dimension and 0 <= m < basis.dimension):
        raise IndexError(f"(n, m) = ({n}, {m}) outside basis of {basis.dimension}")
    e = basis.eigenvalues
    return complex(c[n] * np.conj(c[m]) * np.exp(1j * (e[m] - e[n]) * t))


class DensityMatrixView:
    """Populations, coherences, and activated-state count of a projected basis."""

    def __init__(self, basis: EnergyBasis):
        basis._require_coefficients()
        self.basis = basis

    @property
    def populations(self) -> np.ndarray:
        return np.abs(self.basis.coefficients) ** 2

    def coherence(self, n: int, m: int, t: float) -> complex:
        return coherence(n, m, t, self.basis)

    def n_act(self, threshold_fraction: float = 0.1, convention: str = "amplitude") -> int:
        return count_activated(self.basis.coefficients, threshold_fraction, convention)


def _phases(basis: EnergyBasis, t: float) -> np.ndarray:
    c = basis._require_coefficients()
    return c * np.exp(-1j * basis.eigenvalues * t)


def reconstruct_state(basis: EnergyBasis, t: float) -> WaveFunction:
    """Exact-in-basis evolution sum_n c_n R_n exp(-i E_n t)."""
    a = _phases(basis, t)
    captured = float(np.sum(np.abs(a) ** 2))
    if captured < COMPLETENESS_FLOOR:
        warnings.warn(
            f"retained basis captures only {captured:.6f} of the state",
            stacklevel=2,
        )
    flat = basis.eigenvectors.reshape(basis.dimension, -1)
    amps = (a @ flat).reshape(basis.grid.shape)
    return WaveFunction(amps, basis.grid, t)


def decompose_density_current(
    basis: EnergyBasis, t: float
) -> DensityCurrentDecomposition:
    """Diagonal and off-diagonal double sums for density and current (N=1).

    dia_density = sum_n rho[n,n] R_n^2                (time-independent)
    off_density = sum_{n != m} rho[n,m](t) R_n R_m
    dia_current = sum_n rho[n,n] Imag(R_n dR_n)       (vanishes: R_n real)
    off_current = (i/2) sum_{n != m} rho[n,m](t) (R_n dR_m - R_m dR_n)
    """
    if basis.grid.n_particles != 1:
        raise ValueError("density/current decomposition implemented for N=1")
    a = _phases(basis, t)
    captured = float(np.sum(np.abs(a) ** 2))
    if captured < COMPLETENESS_FLOOR:
        warnings.warn(
            f"retained basis captures only {captured:.6f} of the state",
            stacklevel=2,
        )
    r = basis.eigenvectors  # (n, M) real
    pops = np.abs(a) ** 2
    rho = np.outer(a, np.conj(a))  # rho[n, m](t)

    dia_density = pops @ (r**2)
    full_density = (r * (rho @ r)).sum(axis=0).real
    off_density = full_density - dia_density

    dr = derivative_along_axis(r.astype(complex), basis.grid, 1)
    dia_current = pops @ (r * dr).imag
    # (i/2) sum rho[n,m] (R_n dR_m - R_m dR_n) = -Imag(sum rho[n,m] R_n dR_m)
    # because the second term is the conjugate of the first for real R_n
    term = (r * (rho @ dr)).sum(axis=0)
    full_current = -np.imag(term)
    off_current = full_current - dia_current
    return DensityCurrentDecomposition(
        dia_density=dia_density,
        off_density=off_density,
        dia_current=dia_current,
        off_current=off_current,
    )
