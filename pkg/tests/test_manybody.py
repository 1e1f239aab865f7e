import numpy as np
import pytest

from dwmix.errors import ConfigError
from dwmix.manybody import (
    ANTISYMMETRIC,
    BOSONS,
    FERMIONS,
    PAPER_FOUR_STATE,
    CouplingParams,
    ManyBodyHamiltonian,
    StateVector,
    assemble_hamiltonian,
    enumerate_bases,
    ground_state,
    hamiltonian_blocks,
    mirror_operator,
    one_body_transition_matrix,
)

SQRT2 = np.sqrt(2.0)


class TestBases:
    def test_dimensions(self):
        basis = enumerate_bases()
        assert basis.boson_dim == 3
        assert basis.fermion_dim == 4
        assert basis.dim == 12
        assert basis.boson_labels == ["LL", "S", "RR"]
        assert basis.fermion_labels == ["LLs", "Ss", "RRs", "T0"]

    def test_labels_are_boson_major(self):
        basis = enumerate_bases()
        assert basis.labels[0] == "LL|LLs"
        assert basis.labels[4] == "S|LLs"
        assert basis.index_of("RR", "RRs") == 2 * 4 + 2

    def test_basis_vectors_are_orthonormal(self):
        basis = enumerate_bases()
        gram_b = basis.boson_vectors.T @ basis.boson_vectors
        gram_f = basis.fermion_vectors.T @ basis.fermion_vectors
        assert np.allclose(gram_b, np.eye(3), atol=1e-14)
        assert np.allclose(gram_f, np.eye(4), atol=1e-14)

    def test_polarized_sectors_have_one_state(self):
        assert enumerate_bases(sector=1).fermion_labels == ["LRuu"]
        assert enumerate_bases(sector=-1).fermion_labels == ["LRdd"]

    def test_four_state_variant(self):
        basis = enumerate_bases(fermion_variant=PAPER_FOUR_STATE)
        assert basis.fermion_labels == ["As", "LLt", "St", "RRt"]
        gram = basis.fermion_vectors.T @ basis.fermion_vectors
        assert np.allclose(gram, np.eye(4), atol=1e-14)
        with pytest.raises(ConfigError, match="sector 0"):
            enumerate_bases(sector=1, fermion_variant=PAPER_FOUR_STATE)

    def test_unknown_variant_rejected(self):
        with pytest.raises(ConfigError, match="variant"):
            enumerate_bases(fermion_variant="bogus")

    def test_missing_label_lookup(self):
        basis = enumerate_bases()
        with pytest.raises(ConfigError, match="available"):
            basis.index_of("RR", "nope")


class TestOneBodyOperators:
    def test_bosonic_enhancement_factor(self):
        # Moving one particle between a doubly occupied mode and the shared
        # state carries a sqrt(2) occupancy factor.
        basis = enumerate_bases()
        d = one_body_transition_matrix(basis, BOSONS)
        ll, s, rr = 0, 1, 2
        left, right = 0, 1
        assert d[ll, s, left, right] == pytest.approx(SQRT2, abs=1e-14)
        assert d[s, rr, left, right] == pytest.approx(SQRT2, abs=1e-14)
        assert d[ll, rr, left, right] == 0.0

    def test_fermion_transfer_between_paired_states(self):
        basis = enumerate_bases()
        d = one_body_transition_matrix(basis, FERMIONS)
        lls, ss, rrs, t0 = 0, 1, 2, 3
        left, right = 0, 1
        assert d[lls, ss, left, right] == pytest.approx(SQRT2, abs=1e-14)
        assert d[ss, rrs, left, right] == pytest.approx(SQRT2, abs=1e-14)
        # The orthogonal triplet-like combination is not reached.
        assert d[lls, t0, left, right] == pytest.approx(0.0, abs=1e-14)

    def test_unknown_species_rejected(self):
        with pytest.raises(ConfigError):
            one_body_transition_matrix(enumerate_bases(), "anyons")


class TestCouplingParams:
    def test_defaults_are_zero(self):
        p = CouplingParams()
        assert p.as_dict() == {"lambda_bb": 0.0, "lambda_ff": 0.0, "lambda_bf": 0.0}

    def test_negative_rejected(self):
        with pytest.raises(ConfigError, match="non-negative"):
            CouplingParams(lambda_bb=-1e-4)

    def test_cap_enforced(self):
        with pytest.raises(ConfigError, match="exceeds"):
            CouplingParams(lambda_bf=0.2)

    def test_strong_coupling_warns(self):
        with pytest.warns(UserWarning, match="truncation accuracy"):
            CouplingParams(lambda_ff=0.05)

    def test_non_finite_rejected(self):
        with pytest.raises(ConfigError, match="finite"):
            CouplingParams(lambda_bb=np.nan)


class TestAssembly:
    def test_single_particle_block_structure(self, coarse_context):
        # <LL, f| H0 |S, f> must equal -sqrt(2) J for the bosons.
        ctx = coarse_context
        h0 = ctx.blocks.h0
        i = ctx.basis.index_of("LL", "LLs")
        j = ctx.basis.index_of("S", "LLs")
        expected = -SQRT2 * ctx.boson_modes.tunneling_amplitude
        assert h0[i, j] == pytest.approx(expected, rel=1e-12)

    def test_blocks_are_symmetric(self, coarse_context):
        for block in (
            coarse_context.blocks.h0,
            coarse_context.blocks.h_bb,
            coarse_context.blocks.h_ff,
            coarse_context.blocks.h_bf,
        ):
            assert np.max(np.abs(block - block.T)) < 1e-12

    def test_t0_sector_is_decoupled(self, coarse_context):
        """No Hamiltonian term connects the T0 fermion state to the paired
        singlet ladder, at any coupling strengths."""
        ctx = coarse_context
        h = ctx.blocks.compose(
            CouplingParams(lambda_bb=1e-3, lambda_ff=1e-3, lambda_bf=9e-3)
        ).matrix
        t0 = ctx.basis.fermion_labels.index("T0")
        t0_rows = [i * 4 + t0 for i in range(3)]
        others = [k for k in range(12) if k not in t0_rows]
        coupling_block = h[np.ix_(t0_rows, others)]
        assert np.max(np.abs(coupling_block)) == 0.0

    def test_spin_polarized_contact_vanishes(self, coarse_context):
        # Two same-spin fermions share an antisymmetric spatial state, so a
        # contact interaction cannot touch them.
        ctx = coarse_context
        basis_up = enumerate_bases(sector=1)
        blocks = hamiltonian_blocks(
            ctx.boson_modes, ctx.fermion_modes, ctx.overlaps, basis_up
        )
        assert np.max(np.abs(blocks.h_ff)) == 0.0

    def test_compose_matches_one_shot_assembly(self, coarse_context):
        ctx = coarse_context
        params = CouplingParams(lambda_bb=2e-4, lambda_ff=3e-4, lambda_bf=4e-4)
        via_blocks = ctx.blocks.compose(params).matrix
        one_shot = assemble_hamiltonian(
            ctx.boson_modes, ctx.fermion_modes, ctx.overlaps, params, ctx.basis
        ).matrix
        assert np.array_equal(via_blocks, one_shot)

    def test_noninteracting_spectrum_is_sum_of_pairs(self, coarse_context):
        """Independent-particle oracle: at zero coupling the 12 eigenvalues
        are exactly the sums of two-boson and two-fermion pair energies."""
        ctx = coarse_context
        eps_b = ctx.boson_modes.mean_energy
        j_b = ctx.boson_modes.tunneling_amplitude
        eps_f = ctx.fermion_modes.mean_energy
        j_f = ctx.fermion_modes.tunneling_amplitude
        boson_pairs = [2 * (eps_b - j_b), 2 * eps_b, 2 * (eps_b + j_b)]
        fermion_pairs = [2 * (eps_f - j_f), 2 * eps_f, 2 * eps_f, 2 * (eps_f + j_f)]
        expected = np.sort([b + f for b in boson_pairs for f in fermion_pairs])
        actual = np.linalg.eigvalsh(ctx.blocks.h0)
        assert np.allclose(actual, expected, atol=1e-10)


class TestGroundState:
    def test_phase_convention(self, coarse_context):
        h = coarse_context.blocks.compose(CouplingParams(lambda_bb=5e-4))
        gs = ground_state(h)
        c = gs.state.coefficients
        k = int(np.argmax(np.abs(c)))
        assert c[k].real > 0.0
        assert abs(c[k].imag) == 0.0
        assert not gs.degenerate
        assert gs.gap > 0.0

    def test_degenerate_flag(self, coarse_context):
        basis = coarse_context.basis
        h = ManyBodyHamiltonian(
            matrix=np.zeros((12, 12)), basis=basis, params=CouplingParams()
        )
        assert ground_state(h).degenerate


class TestMirror:
    def test_mirror_is_an_involution(self, coarse_context):
        m = mirror_operator(coarse_context.basis)
        assert np.allclose(m @ m, np.eye(12), atol=1e-12)

    def test_hamiltonian_commutes_with_mirror(self, coarse_context):
        m = mirror_operator(coarse_context.basis)
        h = coarse_context.blocks.compose(
            CouplingParams(lambda_bb=1e-3, lambda_ff=5e-4, lambda_bf=2e-3)
        ).matrix
        assert np.max(np.abs(m @ h - h @ m)) < 1e-12

    def test_four_state_variant_is_not_mirror_closed(self):
        basis = enumerate_bases(fermion_variant=PAPER_FOUR_STATE)
        with pytest.raises(ConfigError, match="mirror"):
            mirror_operator(basis)


class TestStateVector:
    def test_norm_enforced(self):
        basis = enumerate_bases()
        with pytest.raises(ConfigError, match="norm"):
            StateVector(coefficients=np.ones(12), basis=basis)

    def test_shape_enforced(self):
        basis = enumerate_bases()
        with pytest.raises(ConfigError):
            StateVector(coefficients=np.ones(5) / np.sqrt(5.0), basis=basis)


def test_variant_constants():
    assert ANTISYMMETRIC == "antisymmetric"
    assert PAPER_FOUR_STATE == "paper_four_state"
