import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mpemba_lab import (
    ChargeSectorTable,
    CircuitState,
    apply_brickwork_layer,
    charge_decohere,
    dimension_sweep,
    entanglement_asymmetry,
    reduced_density,
    run_ruc_experiment,
    sample_u1_gate,
    sector_overlaps,
    tilted_ferromagnet,
)
from mpemba_lab.ruc import apply_two_site_gate, sample_layer_gates, tilting_unitary

from oracles import (
    embed_two_site_gate,
    projector_entropy_asymmetry,
    tilted_product_sector_probs,
)

CHARGE_TWO_SITES = np.diag([2.0, 0.0, 0.0, -2.0])  # Z1 + Z2


def random_subsystem_state(rng, n_sites):
    d = 2**n_sites
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


class TestGate:
    def test_block_structure_and_unitarity(self, rng):
        g = sample_u1_gate(rng)
        zero_mask = ~np.array(
            [
                [1, 0, 0, 0],
                [0, 1, 1, 0],
                [0, 1, 1, 0],
                [0, 0, 0, 1],
            ],
            dtype=bool,
        )
        assert np.all(g[zero_mask] == 0.0)
        assert np.abs(g @ g.conj().T - np.eye(4)).max() < 1e-12

    def test_charge_commutator_exactly_zero(self, rng):
        for _ in range(20):
            g = sample_u1_gate(rng)
            comm = g @ CHARGE_TWO_SITES - CHARGE_TWO_SITES @ g
            assert np.all(comm == 0.0)

    def test_polarized_sector_amplitude(self, rng):
        g = sample_u1_gate(rng)
        assert abs(g[0, 0]) == pytest.approx(1.0, abs=1e-12)
        assert abs(g[3, 3]) == pytest.approx(1.0, abs=1e-12)

    def test_central_block_first_moment(self):
        rng = np.random.default_rng(5)
        rho = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
        acc = np.zeros((2, 2), dtype=complex)
        samples = 10_000
        for _ in range(samples):
            block = sample_u1_gate(rng)[1:3, 1:3]
            acc += block @ rho @ block.conj().T
        assert np.abs(acc / samples - np.eye(2) / 2).max() < 0.03


class TestLayer:
    def test_polarized_state_invariant_up_to_phase(self, rng):
        state = tilted_ferromagnet(8, 0.0, 0.0, 0)
        out = apply_brickwork_layer(state, rng)
        overlap = np.vdot(state.amplitudes, out.amplitudes)
        assert abs(abs(overlap) - 1.0) < 1e-10

    def test_norm_and_charge_preserved(self, rng):
        state = tilted_ferromagnet(8, 0.37, 0.0, 1)
        n = state.n_sites
        bits = ((np.arange(2**n)[:, None] >> np.arange(n)[None, :]) & 1).sum(axis=1)
        q_diag = 0.5 * (n - 2 * bits)  # sum of sigma_z/2 eigenvalues
        before = float(q_diag @ (np.abs(state.amplitudes) ** 2))
        out = state
        for _ in range(3):
            out = apply_brickwork_layer(out, rng)
        after = float(q_diag @ (np.abs(out.amplitudes) ** 2))
        assert np.linalg.norm(out.amplitudes) == pytest.approx(1.0, abs=1e-10)
        assert after == pytest.approx(before, abs=1e-10)

    def test_full_sector_populations_invariant(self, rng):
        n = 6
        state = tilted_ferromagnet(n, 0.2 * np.pi, 0.0, 2)
        table = ChargeSectorTable(n)
        before = np.array(
            [(np.abs(state.amplitudes[mask]) ** 2).sum() for mask in table.masks]
        )
        out = apply_brickwork_layer(state, rng)
        after = np.array(
            [(np.abs(out.amplitudes[mask]) ** 2).sum() for mask in table.masks]
        )
        assert np.abs(after - before).max() < 1e-10

    def test_odd_size_rejected(self):
        with pytest.raises(ValueError, match="even"):
            CircuitState(n_sites=5, amplitudes=np.zeros(32))

    def test_matches_dense_embedding(self, rng):
        n, depth = 6, 10
        state = tilted_ferromagnet(n, 0.2 * np.pi, 0.0, 3)
        fast = state.amplitudes
        dense = state.amplitudes.copy()
        gate_rng = np.random.default_rng(17)
        for _ in range(depth):
            for i, j, gate in sample_layer_gates(n, gate_rng):
                fast = apply_two_site_gate(fast, n, gate, i, j)
                dense = embed_two_site_gate(gate, n, i, j) @ dense
        assert np.abs(fast - dense).max() < 1e-10

    def test_generic_pair_contraction(self, rng):
        # non-adjacent, non-wrap pair goes through the fallback path
        n = 4
        psi = np.zeros(2**n, dtype=complex)
        psi[0] = 1.0
        g = sample_u1_gate(rng)
        out = apply_two_site_gate(psi, n, g, 0, 2)
        ref = embed_two_site_gate(g, n, 0, 2) @ psi
        assert np.abs(out - ref).max() < 1e-12


class TestTiltedFerromagnet:
    def test_zero_tilt_is_polarized(self):
        state = tilted_ferromagnet(6, 0.0, 0.0, 0)
        expected = np.zeros(64)
        expected[0] = 1.0
        assert np.abs(state.amplitudes - expected).max() == 0.0
        assert entanglement_asymmetry(
            reduced_density(state, range(2)), ChargeSectorTable(2)
        ) == pytest.approx(0.0, abs=1e-12)

    def test_single_site_rotation_amplitudes(self):
        u = tilting_unitary(np.pi / 3)
        assert np.allclose(u[:, 0], [np.cos(np.pi / 6), np.sin(np.pi / 6)], atol=1e-14)

    def test_product_amplitudes(self):
        theta = 0.4
        state = tilted_ferromagnet(2, theta, 0.0, 0)
        site = np.array([np.cos(theta / 2), np.sin(theta / 2)])
        assert np.abs(state.amplitudes - np.kron(site, site)).max() < 1e-14

    def test_large_noise_mixes_site_marginal(self):
        acc = np.zeros((2, 2), dtype=complex)
        samples = 2000
        rng = np.random.default_rng(0)
        for _ in range(samples):
            state = tilted_ferromagnet(2, 0.1, 50.0, rng)
            acc += reduced_density(state, [0])
        assert np.abs(acc / samples - np.eye(2) / 2).max() < 0.05

    def test_angle_range_enforced(self):
        with pytest.raises(ValueError):
            tilted_ferromagnet(4, 2.0, 0.0, 0)


class TestReducedDensity:
    def test_product_state_factorizes(self):
        theta = 0.3 * np.pi
        state = tilted_ferromagnet(6, theta, 0.0, 0)
        site = np.array([np.cos(theta / 2), np.sin(theta / 2)], dtype=complex)
        expected = np.kron(np.outer(site, site), np.outer(site, site))
        assert np.abs(reduced_density(state, range(2)) - expected).max() < 1e-12

    def test_bell_pair_marginal_is_mixed(self):
        amps = np.zeros(4, dtype=complex)
        amps[0] = amps[3] = 1.0 / np.sqrt(2.0)
        state = CircuitState(n_sites=2, amplitudes=amps)
        assert np.abs(reduced_density(state, [0]) - np.eye(2) / 2).max() < 1e-12

    def test_trace_one(self, rng):
        state = tilted_ferromagnet(8, 0.25 * np.pi, 0.5, rng)
        rho = reduced_density(state, range(4))
        assert np.trace(rho).real == pytest.approx(1.0, abs=1e-10)

    def test_oversized_subsystem_rejected(self):
        state = tilted_ferromagnet(4, 0.0, 0.0, 0)
        with pytest.raises(ValueError, match="exceeds"):
            reduced_density(state, range(9))

    def test_non_contiguous_rejected(self):
        state = tilted_ferromagnet(4, 0.0, 0.0, 0)
        with pytest.raises(ValueError, match="contiguous"):
            reduced_density(state, [0, 2])


class TestChargeDecohere:
    def test_block_diagonal_fixed_point(self, rng):
        table = ChargeSectorTable(3)
        rho = random_subsystem_state(rng, 3)
        rho_q = charge_decohere(rho, table)
        assert np.abs(charge_decohere(rho_q, table) - rho_q).max() < 1e-14

    def test_plus_state_becomes_mixed(self):
        table = ChargeSectorTable(1)
        plus = 0.5 * np.ones((2, 2), dtype=complex)
        assert np.abs(charge_decohere(plus, table) - np.eye(2) / 2).max() < 1e-14

    def test_commutes_with_charge(self, rng):
        table = ChargeSectorTable(4)
        rho_q = charge_decohere(random_subsystem_state(rng, 4), table)
        q_op = np.diag(table._charges.astype(complex))
        comm = q_op @ rho_q - rho_q @ q_op
        assert np.abs(comm).max() < 1e-12

    @given(st.integers(min_value=0, max_value=2**32 - 1))
    @settings(max_examples=25, deadline=None)
    def test_trace_preserving_idempotent_projection(self, seed):
        rng = np.random.default_rng(seed)
        table = ChargeSectorTable(2)
        rho = random_subsystem_state(rng, 2)
        rho_q = charge_decohere(rho, table)
        assert np.trace(rho_q) == pytest.approx(np.trace(rho), abs=1e-12)
        assert np.abs(charge_decohere(rho_q, table) - rho_q).max() < 1e-14


class TestEntanglementAsymmetry:
    def test_symmetric_state_is_null(self, rng):
        table = ChargeSectorTable(3)
        rho_q = charge_decohere(random_subsystem_state(rng, 3), table)
        assert entanglement_asymmetry(rho_q, table) == pytest.approx(0.0, abs=1e-10)

    def test_half_tilt_single_qubit(self):
        state = tilted_ferromagnet(2, np.pi / 2, 0.0, 0)
        table = ChargeSectorTable(1)
        ea = entanglement_asymmetry(reduced_density(state, [0]), table)
        assert ea == pytest.approx(np.log(2.0), abs=1e-12)

    def test_matches_projector_oracle(self):
        state = tilted_ferromagnet(8, 0.2 * np.pi, 0.0, 4)
        rho = reduced_density(state, range(4))
        table = ChargeSectorTable(4)
        assert entanglement_asymmetry(rho, table) == pytest.approx(
            projector_entropy_asymmetry(rho, 4), abs=1e-10
        )

    def test_non_negative_and_entropy_increase(self, rng):
        table = ChargeSectorTable(3)
        for _ in range(20):
            rho = random_subsystem_state(rng, 3)
            assert entanglement_asymmetry(rho, table) >= -1e-10


class TestSectorOverlaps:
    def test_half_tilt_binomial(self):
        state = tilted_ferromagnet(4, np.pi / 2, 0.0, 0)
        table = ChargeSectorTable(4)
        probs, ed = sector_overlaps(reduced_density(state, range(4)), table)
        assert np.abs(probs - np.array([1, 4, 6, 4, 1]) / 16.0).max() < 1e-12
        assert ed == pytest.approx(70.0 / 16.0, abs=1e-12)

    def test_zero_tilt(self):
        state = tilted_ferromagnet(4, 0.0, 0.0, 0)
        table = ChargeSectorTable(4)
        probs, ed = sector_overlaps(reduced_density(state, range(4)), table)
        assert probs[0] == pytest.approx(1.0, abs=1e-14)
        assert ed == pytest.approx(1.0, abs=1e-12)

    def test_maximally_mixed_matches_half_tilt(self):
        table = ChargeSectorTable(4)
        _, ed = sector_overlaps(np.eye(16) / 16.0, table)
        assert ed == pytest.approx(4.375, abs=1e-12)

    @pytest.mark.parametrize("n_sites", [2, 4, 6])
    def test_binomial_law_all_angles(self, n_sites):
        table = ChargeSectorTable(n_sites)
        for theta in np.linspace(0.0, np.pi / 2, 7):
            state = tilted_ferromagnet(n_sites, theta, 0.0, 0)
            probs, _ = sector_overlaps(
                reduced_density(state, range(n_sites)), table
            )
            assert np.abs(probs - tilted_product_sector_probs(theta, n_sites)).max() < 1e-12

    def test_probabilities_sum_to_one(self, rng):
        table = ChargeSectorTable(3)
        probs, _ = sector_overlaps(random_subsystem_state(rng, 3), table)
        assert probs.sum() == pytest.approx(1.0, abs=1e-10)


class TestSectorTable:
    def test_dimensions(self):
        table = ChargeSectorTable(4)
        assert np.array_equal(table.dims, [1, 4, 6, 4, 1])
        assert sum(len(m) for m in table.masks) == 16


class TestExperiments:
    def test_trajectory_shapes_and_determinism(self):
        a = run_ruc_experiment(8, 2, 0.3 * np.pi, 0.1, 4, 6, 42)
        b = run_ruc_experiment(8, 2, 0.3 * np.pi, 0.1, 4, 6, 42)
        assert a.ea.shape == (6, 5)
        assert np.array_equal(a.ea, b.ea)
        assert a.sector_probs.sum() == pytest.approx(1.0, abs=1e-10)

    def test_single_realization_has_zero_stderr(self):
        traj = run_ruc_experiment(6, 2, 0.2 * np.pi, 0.0, 2, 1, 0)
        assert np.all(traj.ea_stderr == 0.0)

    def test_dimension_sweep_rows_and_haar_limit(self):
        rows = dimension_sweep([0.1 * np.pi], [0.0, 50.0], 400, 3)
        assert len(rows) == 2
        exact = rows[0]
        assert exact[2] == pytest.approx(1.2899, abs=1e-3)
        haar = rows[1]
        assert haar[2] == pytest.approx(4.375, abs=0.15)

    def test_invalid_counts(self):
        with pytest.raises(ValueError):
            run_ruc_experiment(6, 2, 0.1, 0.0, 2, 0, 0)
        with pytest.raises(ValueError):
            dimension_sweep([0.1], [0.0], 0, 0)
