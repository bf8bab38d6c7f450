import numpy as np
import pytest
from scipy.stats import chisquare, kstest

from qgainlab import (
    DomainError,
    PreconditionError,
    QuantumState,
    add_global_phase,
    from_complex,
    from_q_embedding,
    full_outcome_distribution,
    hidden_outcome_probs,
    outcome_probs,
    phases_equal,
    sample_state_prior,
    standard_measurement,
    temporal_phase_evolve,
    to_complex,
    to_q_embedding,
)
from qgainlab.states import state_from_json_dict, state_to_json_dict


def random_state(rng, n):
    return sample_state_prior(n, rng)


class TestEmbedding:
    def test_single_outcome(self):
        s = QuantumState([1.0], [0.0])
        np.testing.assert_array_equal(to_q_embedding(s), [1.0, 0.0])

    def test_two_outcomes(self):
        s = QuantumState([0.5, 0.5], [0.0, np.pi / 2])
        np.testing.assert_allclose(
            to_q_embedding(s), [np.sqrt(0.5), 0.0, 0.0, np.sqrt(0.5)], atol=1e-15
        )

    def test_pi_phase_carries_sign(self):
        s = QuantumState([1.0], [np.pi])
        q = to_q_embedding(s)
        np.testing.assert_allclose(q, [-1.0, 0.0], atol=1e-15)

    def test_unit_norm(self, rng):
        for _ in range(50):
            q = to_q_embedding(random_state(rng, 4))
            assert abs(np.linalg.norm(q) - 1.0) < 1e-12

    def test_round_trip(self, rng):
        for _ in range(50):
            s = random_state(rng, 3)
            back = from_q_embedding(to_q_embedding(s))
            np.testing.assert_allclose(back.probs, s.probs, atol=1e-12)
            assert phases_equal(back.phases, s.phases, tol=1e-9)


class TestComplexForm:
    def test_examples(self):
        np.testing.assert_allclose(to_complex(QuantumState([1.0, 0.0], [0.0, 0.0])), [1, 0])
        np.testing.assert_allclose(
            to_complex(QuantumState([0.5, 0.5], [0.0, np.pi])),
            [np.sqrt(0.5), -np.sqrt(0.5)],
            atol=1e-15,
        )

    def test_round_trip(self, rng):
        for _ in range(50):
            s = random_state(rng, 4)
            back = from_complex(to_complex(s))
            np.testing.assert_allclose(back.probs, s.probs, atol=1e-12)
            assert phases_equal(back.phases, s.phases, tol=1e-9)

    def test_zero_amplitude_phase_convention(self):
        s = from_complex([1.0 + 0j, 0.0 + 0j])
        assert s.phases[1] == 0.0

    def test_non_unit_rejected(self):
        with pytest.raises(DomainError):
            from_complex([1.0, 1.0])

    def test_matches_embedding_interleave(self, rng):
        for _ in range(50):
            s = random_state(rng, 3)
            v = to_complex(s)
            q = to_q_embedding(s)
            np.testing.assert_allclose(q[0::2], v.real, atol=1e-14)
            np.testing.assert_allclose(q[1::2], v.imag, atol=1e-14)


class TestGlobalPhase:
    def test_identity(self, rng):
        s = random_state(rng, 3)
        s2 = add_global_phase(s, 0.0)
        np.testing.assert_array_equal(s2.probs, s.probs)
        np.testing.assert_array_equal(s2.phases, s.phases)

    def test_two_pi(self, rng):
        s = random_state(rng, 3)
        assert phases_equal(add_global_phase(s, 2 * np.pi).phases, s.phases)

    def test_multiplies_complex_form(self, rng):
        s = random_state(rng, 4)
        shifted = add_global_phase(s, np.pi / 3)
        np.testing.assert_allclose(
            to_complex(shifted), np.exp(1j * np.pi / 3) * to_complex(s), atol=1e-14
        )


class TestHiddenOutcomes:
    def test_zero_phase(self):
        s = QuantumState([1.0], [0.0])
        pa, pb, sa, sb = hidden_outcome_probs(s, 0)
        assert (pa, pb) == (1.0, 0.0)
        assert sa == 1 and sb == 0

    def test_quarter_pi(self):
        s = QuantumState([1.0], [np.pi / 4])
        pa, pb, sa, sb = hidden_outcome_probs(s, 0)
        np.testing.assert_allclose([pa, pb], [0.5, 0.5])
        assert (sa, sb) == (1, 1)

    def test_second_quadrant(self):
        s = QuantumState([1.0], [3 * np.pi / 4])
        pa, pb, sa, sb = hidden_outcome_probs(s, 0)
        np.testing.assert_allclose([pa, pb], [0.5, 0.5])
        assert (sa, sb) == (-1, 1)

    def test_pair_sums_to_one(self, rng):
        s = random_state(rng, 5)
        for i in range(5):
            pa, pb, _, _ = hidden_outcome_probs(s, i)
            np.testing.assert_allclose(pa + pb, 1.0, rtol=0, atol=1e-15)


class TestFullDistribution:
    def test_trivial(self):
        np.testing.assert_allclose(
            full_outcome_distribution(QuantumState([1.0], [0.0])), [1.0, 0.0], atol=1e-15
        )

    def test_product_form(self):
        s = QuantumState([0.5, 0.5], [0.0, np.pi / 2])
        np.testing.assert_allclose(
            full_outcome_distribution(s), [0.5, 0.0, 0.0, 0.5], atol=1e-15
        )

    def test_equals_squared_embedding(self, rng):
        for _ in range(50):
            s = random_state(rng, 4)
            np.testing.assert_allclose(
                full_outcome_distribution(s), to_q_embedding(s) ** 2, rtol=0, atol=1e-14
            )


class TestTemporalEvolution:
    def test_no_time(self, rng):
        s = random_state(rng, 3)
        s2 = temporal_phase_evolve(s, energy=2.0, dt=0.0, alpha=1.0)
        np.testing.assert_array_equal(s2.phases, s.phases)

    def test_phase_shift_negates_complex(self, rng):
        s = random_state(rng, 3)
        evolved = temporal_phase_evolve(s, energy=1.0, dt=np.pi, alpha=1.0)
        np.testing.assert_allclose(to_complex(evolved), -to_complex(s), atol=1e-14)
        np.testing.assert_array_equal(evolved.probs, s.probs)

    def test_zero_alpha_rejected(self, rng):
        with pytest.raises(PreconditionError):
            temporal_phase_evolve(random_state(rng, 2), 1.0, 1.0, 0.0)

    def test_observable_distribution_unchanged(self, rng):
        m = standard_measurement([0.0, 1.0, 2.0])
        s = random_state(rng, 3)
        evolved = temporal_phase_evolve(s, energy=1.3, dt=0.7, alpha=0.11)
        np.testing.assert_allclose(
            outcome_probs(m, to_complex(evolved)),
            outcome_probs(m, to_complex(s)),
            rtol=0,
            atol=1e-14,
        )


class TestStatePrior:
    def test_samples_valid(self, rng):
        for _ in range(100):
            s = sample_state_prior(2, rng)
            assert abs(s.probs.sum() - 1.0) < 1e-12

    def test_phase_marginal_uniform(self, rng):
        chis = np.array(
            [sample_state_prior(1, rng).phases[0] % (2 * np.pi) for _ in range(100_000)]
        )
        stat = kstest(chis, lambda x: np.clip(x / (2 * np.pi), 0, 1)).statistic
        assert stat < 0.01

    def test_orthants_equally_likely(self, rng):
        counts = np.zeros(16)
        for _ in range(32_000):
            q = to_q_embedding(sample_state_prior(2, rng))
            idx = sum((1 << k) for k in range(4) if q[k] > 0)
            counts[idx] += 1
        assert chisquare(counts).pvalue > 0.01

    def test_folded_prior_matches_reference_density(self, rng):
        # folding the state prior into the positive orthant reproduces the
        # information-gain reference law over the 2N-cell tuple, here checked
        # on the first-cell marginal against the Dirichlet-1/2 oracle
        from scipy.stats import ks_2samp

        cell1 = np.array(
            [to_q_embedding(sample_state_prior(2, rng))[0] ** 2 for _ in range(30_000)]
        )
        oracle = rng.dirichlet(np.full(4, 0.5), size=30_000)[:, 0]
        assert ks_2samp(cell1, oracle).statistic < 0.015


class TestSerialization:
    def test_round_trip(self, rng):
        s = random_state(rng, 3)
        back = state_from_json_dict(state_to_json_dict(s))
        np.testing.assert_allclose(back.probs, s.probs, atol=1e-15)
        np.testing.assert_allclose(back.phases, s.phases, atol=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(DomainError):
            state_from_json_dict({"n": 3, "probs": [1.0], "phases": [0.0]})
