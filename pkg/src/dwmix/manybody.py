"""Few-body bases and Hamiltonian assembly for 2 bosons + 2 fermions.

Everything is built inside explicit first-quantized product spaces: the
boson pair lives in the 4-dimensional space spanned by |m1 m2> with
m in {left=0, right=1}, the fermion pair in the 16-dimensional space
spanned by |o1 o2> with orbital o = 2*mode + spin (ordering
L-up < L-down < R-up < R-down).  Symmetrized basis states are stored as
vectors in those spaces, so every operator (mode transfer, contact
interaction, mirror) is a small dense matrix sandwiched between basis
vectors.  For two particles this is exactly equivalent to the
second-quantized forms, including fermionic signs, and it keeps one code
path for all basis variants.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .errors import ConfigError
from .modes import DoubletModes
from .overlaps import OverlapTensor

BOSONS = "bosons"
FERMIONS = "fermions"

HERMITICITY_TOL = 1.0e-12
NORM_TOL = 1.0e-10
DEGENERACY_GAP = 1.0e-12
COUPLING_MAX = 0.1
COUPLING_WARN = 0.01

ANTISYMMETRIC = "antisymmetric"
PAPER_FOUR_STATE = "paper_four_state"
FERMION_VARIANTS = (ANTISYMMETRIC, PAPER_FOUR_STATE)

_SQRT_HALF = np.sqrt(0.5)

# Spatial coefficient matrices over (m1, m2) for the three boson states.
_B_LL = np.array([[1.0, 0.0], [0.0, 0.0]])
_B_SYM = np.array([[0.0, _SQRT_HALF], [_SQRT_HALF, 0.0]])
_B_RR = np.array([[0.0, 0.0], [0.0, 1.0]])

_SPIN_UU = np.array([[1.0, 0.0], [0.0, 0.0]])
_SPIN_DD = np.array([[0.0, 0.0], [0.0, 1.0]])
_SPIN_T0 = np.array([[0.0, _SQRT_HALF], [_SQRT_HALF, 0.0]])
_SPIN_SINGLET = np.array([[0.0, _SQRT_HALF], [-_SQRT_HALF, 0.0]])
_SPACE_ANTI = np.array([[0.0, _SQRT_HALF], [-_SQRT_HALF, 0.0]])


def _product_vector(spatial: np.ndarray, spin: np.ndarray) -> np.ndarray:
    """16-vector for a (spatial 2x2) x (spin 2x2) two-fermion product."""
    return np.einsum("ik,jl->ijkl", spatial, spin).reshape(16)


def _det_vector(o1: int, o2: int) -> np.ndarray:
    """Normalized Slater determinant |o1 o2> with o1 < o2."""
    v = np.zeros(16)
    v[4 * o1 + o2] = _SQRT_HALF
    v[4 * o2 + o1] = -_SQRT_HALF
    return v


def _boson_basis() -> tuple[list[str], np.ndarray]:
    vectors = np.column_stack(
        [_B_LL.reshape(4), _B_SYM.reshape(4), _B_RR.reshape(4)]
    )
    return ["LL", "S", "RR"], vectors


def _fermion_basis(sector: int, variant: str) -> tuple[list[str], np.ndarray]:
    if variant == PAPER_FOUR_STATE:
        if sector != 0:
            raise ConfigError(
                "the four-state literal basis is not partitioned by spin "
                "projection; request sector 0 with it"
            )
        labels = ["As", "LLt", "St", "RRt"]
        vectors = np.column_stack(
            [
                _product_vector(_SPACE_ANTI, _SPIN_SINGLET),
                _product_vector(_B_LL, _SPIN_UU),
                _product_vector(_B_SYM, _SPIN_T0),
                _product_vector(_B_RR, _SPIN_DD),
            ]
        )
        return labels, vectors
    if sector == 0:
        d03 = _det_vector(0, 3)
        d12 = _det_vector(1, 2)
        labels = ["LLs", "Ss", "RRs", "T0"]
        vectors = np.column_stack(
            [
                _det_vector(0, 1),
                _SQRT_HALF * (d03 - d12),
                _det_vector(2, 3),
                _SQRT_HALF * (d03 + d12),
            ]
        )
        return labels, vectors
    if sector == 1:
        return ["LRuu"], _det_vector(0, 2).reshape(16, 1)
    if sector == -1:
        return ["LRdd"], _det_vector(1, 3).reshape(16, 1)
    raise ConfigError(f"spin projection sector must be -1, 0, or +1, got {sector}")


@dataclass(frozen=True)
class CompositeBasis:
    """Labeled product basis: boson pair states x fermion pair states.

    Composite ordering is boson-major; ``labels`` are "<boson>|<fermion>".
    """

    sector: int
    fermion_variant: str
    boson_labels: list[str]
    fermion_labels: list[str]
    boson_vectors: np.ndarray
    fermion_vectors: np.ndarray

    @property
    def boson_dim(self) -> int:
        return self.boson_vectors.shape[1]

    @property
    def fermion_dim(self) -> int:
        return self.fermion_vectors.shape[1]

    @property
    def dim(self) -> int:
        return self.boson_dim * self.fermion_dim

    @property
    def labels(self) -> list[str]:
        return [f"{b}|{f}" for b in self.boson_labels for f in self.fermion_labels]

    def boson_spatial(self, i: int) -> np.ndarray:
        """Coefficient matrix over (m1, m2) of boson basis state i."""
        return self.boson_vectors[:, i].reshape(2, 2)

    def fermion_spatial(self, j: int) -> np.ndarray:
        """Coefficient tensor over (m1, s1, m2, s2) of fermion state j."""
        return self.fermion_vectors[:, j].reshape(2, 2, 2, 2)

    def index_of(self, boson_label: str, fermion_label: str) -> int:
        try:
            i = self.boson_labels.index(boson_label)
            j = self.fermion_labels.index(fermion_label)
        except ValueError as exc:
            raise ConfigError(
                f"basis has no state {boson_label!r}|{fermion_label!r}; "
                f"available: bosons {self.boson_labels}, fermions {self.fermion_labels}"
            ) from exc
        return i * self.fermion_dim + j


def enumerate_bases(sector: int = 0, fermion_variant: str = ANTISYMMETRIC) -> CompositeBasis:
    """Deterministic labeled composite basis for the given spin sector."""
    if fermion_variant not in FERMION_VARIANTS:
        raise ConfigError(
            f"unknown fermion basis variant {fermion_variant!r}; "
            f"choose one of {FERMION_VARIANTS}"
        )
    b_labels, b_vecs = _boson_basis()
    f_labels, f_vecs = _fermion_basis(sector, fermion_variant)
    return CompositeBasis(
        sector=sector,
        fermion_variant=fermion_variant,
        boson_labels=b_labels,
        fermion_labels=f_labels,
        boson_vectors=b_vecs,
        fermion_vectors=f_vecs,
    )


def _mode_transfer(a: int, b: int) -> np.ndarray:
    e = np.zeros((2, 2))
    e[a, b] = 1.0
    return e


def _boson_one_body(a: int, b: int) -> np.ndarray:
    """Sum over the two slots of |a><b| acting on the mode label."""
    e = _mode_transfer(a, b)
    eye = np.eye(2)
    return np.kron(e, eye) + np.kron(eye, e)


def _fermion_one_body(a: int, b: int) -> np.ndarray:
    """Spatial mode transfer, diagonal in spin, summed over slots."""
    o = np.kron(_mode_transfer(a, b), np.eye(2))
    eye = np.eye(4)
    return np.kron(o, eye) + np.kron(eye, o)


def _boson_single_particle(h2: np.ndarray) -> np.ndarray:
    eye = np.eye(2)
    return np.kron(h2, eye) + np.kron(eye, h2)


def _fermion_single_particle(h2: np.ndarray) -> np.ndarray:
    o = np.kron(h2, np.eye(2))
    eye = np.eye(4)
    return np.kron(o, eye) + np.kron(eye, o)


def _boson_contact(u: np.ndarray) -> np.ndarray:
    """First-quantized contact matrix on the boson product space.

    C[(m1, m2), (m1', m2')] = U[m1, m1', m2, m2'].
    """
    return u.transpose(0, 2, 1, 3).reshape(4, 4)


def _fermion_contact(u: np.ndarray) -> np.ndarray:
    """Contact matrix on the fermion product space, diagonal in both spins."""
    c = np.zeros((16, 16))
    for o1, o2, p1, p2 in product(range(4), repeat=4):
        m1, s1 = divmod(o1, 2)
        m2, s2 = divmod(o2, 2)
        n1, t1 = divmod(p1, 2)
        n2, t2 = divmod(p2, 2)
        if s1 == t1 and s2 == t2:
            c[4 * o1 + o2, 4 * p1 + p2] = u[m1, n1, m2, n2]
    return c


def one_body_transition_matrix(basis: CompositeBasis, species: str) -> np.ndarray:
    """D[i, j, a, b]: matrix element of the a<-b mode-transfer operator.

    Returned over the species' own basis states (not the composite), with
    bosonic sqrt-occupancy factors and fermionic ordering signs arising
    automatically from the symmetrized vector representation.
    """
    if species == BOSONS:
        vecs = self_vecs = basis.boson_vectors
        ops = _boson_one_body
    elif species == FERMIONS:
        vecs = self_vecs = basis.fermion_vectors
        ops = _fermion_one_body
    else:
        raise ConfigError(f"species must be {BOSONS!r} or {FERMIONS!r}, got {species!r}")
    n = vecs.shape[1]
    d = np.empty((n, n, 2, 2))
    for a in range(2):
        for b in range(2):
            d[:, :, a, b] = vecs.T @ ops(a, b) @ self_vecs
    return d


@dataclass(frozen=True)
class CouplingParams:
    """Contact coupling strengths, all repulsive (non-negative)."""

    lambda_bb: float = 0.0
    lambda_ff: float = 0.0
    lambda_bf: float = 0.0

    def __post_init__(self) -> None:
        for name, value in self.as_dict().items():
            if not np.isfinite(value):
                raise ConfigError(f"{name} must be finite")
            if value < 0.0:
                raise ConfigError(f"{name} must be non-negative (got {value})")
            if value > COUPLING_MAX:
                raise ConfigError(
                    f"{name} = {value} exceeds {COUPLING_MAX}, beyond any "
                    "defensible two-mode regime"
                )
            if value > COUPLING_WARN:
                warnings.warn(
                    f"{name} = {value} is above {COUPLING_WARN}; two-mode "
                    "truncation accuracy degrades at this strength",
                    stacklevel=2,
                )

    def as_dict(self) -> dict[str, float]:
        return {
            "lambda_bb": self.lambda_bb,
            "lambda_ff": self.lambda_ff,
            "lambda_bf": self.lambda_bf,
        }


@dataclass(frozen=True)
class OverlapSet:
    """The three contact tensors feeding assembly."""

    boson: OverlapTensor
    fermion: OverlapTensor
    cross: OverlapTensor


@dataclass(frozen=True)
class ManyBodyHamiltonian:
    """Assembled real symmetric Hamiltonian with provenance."""

    matrix: np.ndarray
    basis: CompositeBasis
    params: CouplingParams


@dataclass(frozen=True)
class HamiltonianBlocks:
    """Coupling-independent pieces of H, composable per parameter point.

    H(params) = h0 + lambda_bb * h_bb + lambda_ff * h_ff + lambda_bf * h_bf.
    Building the blocks once and composing per sweep cell avoids re-deriving
    the single-particle and tensor contractions thousands of times.
    """

    basis: CompositeBasis
    h0: np.ndarray
    h_bb: np.ndarray
    h_ff: np.ndarray
    h_bf: np.ndarray
    boson_onsite: float = field(default=0.0)
    fermion_onsite: float = field(default=0.0)

    def compose(self, params: CouplingParams) -> ManyBodyHamiltonian:
        h = (
            self.h0
            + params.lambda_bb * self.h_bb
            + params.lambda_ff * self.h_ff
            + params.lambda_bf * self.h_bf
        )
        residue = float(np.max(np.abs(h - h.T)))
        assert residue < HERMITICITY_TOL, (
            f"assembled Hamiltonian is not symmetric (residue {residue:.3e})"
        )
        return ManyBodyHamiltonian(matrix=h, basis=self.basis, params=params)


def _single_particle_matrix(modes: DoubletModes) -> np.ndarray:
    eps = modes.mean_energy
    j = modes.tunneling_amplitude
    return np.array([[eps, -j], [-j, eps]])


def hamiltonian_blocks(
    modes_b: DoubletModes,
    modes_f: DoubletModes,
    overlaps: OverlapSet,
    basis: CompositeBasis,
) -> HamiltonianBlocks:
    """Project all Hamiltonian pieces onto the composite basis."""
    if modes_b.grid != modes_f.grid:
        raise ConfigError("boson and fermion modes were solved on different grids")
    vb = basis.boson_vectors
    vf = basis.fermion_vectors
    dim_b, dim_f = basis.boson_dim, basis.fermion_dim

    h_b_sp = vb.T @ _boson_single_particle(_single_particle_matrix(modes_b)) @ vb
    h_f_sp = vf.T @ _fermion_single_particle(_single_particle_matrix(modes_f)) @ vf
    h0 = np.kron(h_b_sp, np.eye(dim_f)) + np.kron(np.eye(dim_b), h_f_sp)

    h_bb = np.kron(vb.T @ _boson_contact(overlaps.boson.values) @ vb, np.eye(dim_f))
    h_ff = np.kron(np.eye(dim_b), vf.T @ _fermion_contact(overlaps.fermion.values) @ vf)

    d_b = one_body_transition_matrix(basis, BOSONS)
    d_f = one_body_transition_matrix(basis, FERMIONS)
    h_bf = np.einsum(
        "abcd,ikab,jlcd->ijkl", overlaps.cross.values, d_b, d_f
    ).reshape(basis.dim, basis.dim)

    return HamiltonianBlocks(
        basis=basis,
        h0=h0,
        h_bb=h_bb,
        h_ff=h_ff,
        h_bf=h_bf,
        boson_onsite=overlaps.boson.on_site,
        fermion_onsite=overlaps.fermion.on_site,
    )


def assemble_hamiltonian(
    modes_b: DoubletModes,
    modes_f: DoubletModes,
    overlaps: OverlapSet,
    params: CouplingParams,
    basis: CompositeBasis,
) -> ManyBodyHamiltonian:
    """One-shot assembly; sweeps should build blocks once instead."""
    return hamiltonian_blocks(modes_b, modes_f, overlaps, basis).compose(params)


@dataclass(frozen=True)
class StateVector:
    """Normalized complex state over a composite basis."""

    coefficients: np.ndarray
    basis: CompositeBasis
    time_tag: float = 0.0

    def __post_init__(self) -> None:
        c = np.asarray(self.coefficients, dtype=complex)
        if c.shape != (self.basis.dim,):
            raise ConfigError(
                f"state has {c.shape} coefficients for a basis of dimension "
                f"{self.basis.dim}"
            )
        norm = float(np.linalg.norm(c))
        if abs(norm - 1.0) > NORM_TOL:
            raise ConfigError(f"state norm is {norm:.12f}, not 1")
        object.__setattr__(self, "coefficients", c)


@dataclass(frozen=True)
class GroundState:
    energy: float
    state: StateVector
    gap: float
    degenerate: bool


def ground_state(h: ManyBodyHamiltonian) -> GroundState:
    """Lowest eigenpair with a deterministic global phase.

    The phase is fixed by making the largest-magnitude coefficient real and
    positive; on an exact magnitude tie the lowest basis index wins.  A gap
    below 1e-12 is flagged as degenerate rather than raised.
    """
    energies, vectors = np.linalg.eigh(h.matrix)
    v = vectors[:, 0]
    k = int(np.argmax(np.abs(v)))
    if v[k] < 0.0:
        v = -v
    gap = float(energies[1] - energies[0])
    return GroundState(
        energy=float(energies[0]),
        state=StateVector(coefficients=v.astype(complex), basis=h.basis),
        gap=gap,
        degenerate=gap < DEGENERACY_GAP,
    )


def mirror_operator(basis: CompositeBasis) -> np.ndarray:
    """Left-right mirror (spatial parity) in the composite basis.

    Raises if the basis span is not closed under the mirror (the literal
    four-state variant is not: it mixes spin sectors asymmetrically).
    """
    swap = np.array([[0.0, 1.0], [1.0, 0.0]])
    p_b = np.kron(swap, swap)
    swap_orb = np.kron(swap, np.eye(2))
    p_f = np.kron(swap_orb, swap_orb)
    m_b = basis.boson_vectors.T @ p_b @ basis.boson_vectors
    m_f = basis.fermion_vectors.T @ p_f @ basis.fermion_vectors
    m = np.kron(m_b, m_f)
    if np.max(np.abs(m @ m.T - np.eye(basis.dim))) > 1.0e-10:
        raise ConfigError(
            "basis span is not closed under the left-right mirror; "
            "parity checks are only meaningful in the antisymmetric basis"
        )
    return m
