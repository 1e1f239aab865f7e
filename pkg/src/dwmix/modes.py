"""Single-particle doublet solver and localized-mode construction.

The stationary problem ``-kappa u'' + V u = E u`` on a hard-wall box is
discretized with second-order central differences on the interior nodes and
solved with a banded symmetric eigensolver.  Only the lowest few states are
requested; the two lowest must form an even/odd tunneling doublet well
separated from the rest of the spectrum, otherwise the two-mode truncation
used everywhere downstream is invalid and we refuse to continue.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import SolverError
from .potential import Grid

PARITY_TOL = 1.0e-6
RIGHT_MASS_MIN = 0.9
DEFAULT_MIN_GAP_RATIO = 10.0
_N_LOW_STATES = 4

_SQRT_HALF = np.sqrt(0.5)


@dataclass(frozen=True)
class DoubletModes:
    """Lowest doublet of the trap plus derived localized modes.

    Attributes
    ----------
    grid:
        Grid the wavefunctions live on.
    energies:
        Four lowest eigenvalues (symmetric, antisymmetric, next two).
    psi_s, psi_a:
        Normalized even/odd doublet states with the sign conventions
        psi_s(0) > 0 and psi_a'(0) > 0.
    psi_left, psi_right:
        Localized combinations; psi_right concentrates on x > 0 and
        psi_left is its exact grid mirror.
    """

    grid: Grid
    energies: np.ndarray
    psi_s: np.ndarray
    psi_a: np.ndarray
    psi_left: np.ndarray
    psi_right: np.ndarray

    @property
    def splitting(self) -> float:
        """Tunneling splitting Omega_1 = E_a - E_s."""
        return float(self.energies[1] - self.energies[0])

    @property
    def mean_energy(self) -> float:
        """Doublet centre (E_s + E_a) / 2."""
        return float(0.5 * (self.energies[0] + self.energies[1]))

    @property
    def tunneling_amplitude(self) -> float:
        """Hopping J = (E_a - E_s) / 2 in the localized basis."""
        return 0.5 * self.splitting

    @property
    def gap_ratio(self) -> float:
        """(E_2 - E_a) / (E_a - E_s): how isolated the doublet is."""
        return float((self.energies[2] - self.energies[1]) / self.splitting)

    def right_mass(self) -> float:
        """Probability weight of psi_right on x > 0 (half the node at 0)."""
        w = self.grid.trapezoid_weights()
        x = self.grid.points()
        half = np.where(x > 0.0, 1.0, 0.0)
        half[x == 0.0] = 0.5
        return float(np.dot(w * half, self.psi_right**2))


def build_sp_hamiltonian(
    kappa: float, v: np.ndarray, grid: Grid
) -> tuple[np.ndarray, np.ndarray]:
    """Interior-node tridiagonal Hamiltonian as (diagonal, off-diagonal)."""
    if kappa <= 0.0:
        raise SolverError("kinetic prefactor must be positive")
    h = grid.spacing
    diag = 2.0 * kappa / h**2 + v[1:-1]
    off = np.full(grid.n_points - 3, -kappa / h**2)
    return diag, off


def _normalize(u: np.ndarray, grid: Grid) -> np.ndarray:
    return u / np.sqrt(grid.inner(u, u))


def _classify_parity(u: np.ndarray) -> str:
    even_res = float(np.max(np.abs(u - u[::-1])))
    odd_res = float(np.max(np.abs(u + u[::-1])))
    scale = float(np.max(np.abs(u)))
    if even_res <= PARITY_TOL * scale:
        return "even"
    if odd_res <= PARITY_TOL * scale:
        return "odd"
    raise SolverError(
        "eigenstate has no definite parity "
        f"(even residual {even_res:.2e}, odd residual {odd_res:.2e}); "
        "the doublet is too degenerate for this grid"
    )


def _project_parity(u: np.ndarray, parity: str) -> np.ndarray:
    if parity == "even":
        return 0.5 * (u + u[::-1])
    return 0.5 * (u - u[::-1])


def lowest_doublet(
    kappa: float, v: np.ndarray, grid: Grid
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Solve for the four lowest states; return (energies, psi_s, psi_a).

    The two lowest states are required to be even then odd.  Each is
    parity-projected (so symmetry holds to the last bit) and normalized with
    the grid's trapezoid rule, and signs are fixed deterministically:
    psi_s(0) > 0, central-difference psi_a'(0) > 0.
    """
    diag, off = build_sp_hamiltonian(kappa, v, grid)
    try:
        energies, vecs = eigh_tridiagonal(
            diag, off, select="i", select_range=(0, _N_LOW_STATES - 1)
        )
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SolverError(f"tridiagonal eigensolver failed: {exc}") from exc

    full = np.zeros((grid.n_points, _N_LOW_STATES))
    full[1:-1, :] = vecs

    parities = [_classify_parity(full[:, i]) for i in range(2)]
    if parities != ["even", "odd"]:
        raise SolverError(
            f"lowest two states have parities {parities}, expected even then odd"
        )

    psi_s = _normalize(_project_parity(full[:, 0], "even"), grid)
    psi_a = _normalize(_project_parity(full[:, 1], "odd"), grid)

    mid = grid.n_points // 2
    if psi_s[mid] < 0.0:
        psi_s = -psi_s
    # Central difference for the odd state's slope at x = 0.
    if psi_a[mid + 1] - psi_a[mid - 1] < 0.0:
        psi_a = -psi_a
    return energies, psi_s, psi_a


def localize(
    psi_s: np.ndarray, psi_a: np.ndarray, grid: Grid
) -> tuple[np.ndarray, np.ndarray]:
    """Build (psi_left, psi_right) from the doublet.

    psi_right = (psi_s + psi_a) / sqrt(2), which concentrates on x > 0 under
    the sign conventions of :func:`lowest_doublet`; psi_left is its exact
    mirror, so the pair is orthonormal whenever the doublet is.
    """
    psi_right = _SQRT_HALF * (psi_s + psi_a)
    psi_left = psi_right[::-1].copy()

    w = grid.trapezoid_weights()
    x = grid.points()
    half = np.where(x > 0.0, 1.0, 0.0)
    half[x == 0.0] = 0.5
    mass = float(np.dot(w * half, psi_right**2))
    if mass <= RIGHT_MASS_MIN:
        raise SolverError(
            f"localized mode holds only {mass:.3f} of its weight on x > 0; "
            "the trap does not produce well-separated left/right modes"
        )
    return psi_left, psi_right


def solve_doublet(
    kappa: float,
    v: np.ndarray,
    grid: Grid,
    min_gap_ratio: float = DEFAULT_MIN_GAP_RATIO,
) -> DoubletModes:
    """Full pipeline: eigensolve, validate the doublet, localize.

    Raises :class:`SolverError` if the splitting is not numerically positive,
    if the doublet is not isolated (gap ratio below ``min_gap_ratio``), or if
    localization fails.
    """
    energies, psi_s, psi_a = lowest_doublet(kappa, v, grid)
    splitting = float(energies[1] - energies[0])
    if splitting <= 0.0:
        raise SolverError(
            "doublet splitting is not positive; the tunneling amplitude has "
            "underflowed for this geometry"
        )
    gap_ratio = float((energies[2] - energies[1]) / splitting)
    if gap_ratio < min_gap_ratio:
        raise SolverError(
            f"doublet is not isolated: gap ratio {gap_ratio:.3g} < "
            f"{min_gap_ratio:.3g}; the two-mode truncation is invalid here"
        )
    psi_left, psi_right = localize(psi_s, psi_a, grid)
    return DoubletModes(
        grid=grid,
        energies=energies,
        psi_s=psi_s,
        psi_a=psi_a,
        psi_left=psi_left,
        psi_right=psi_right,
    )
