import numpy as np
import pytest

from qgainlab import (
    ComplexMap,
    DomainError,
    MeasurementOp,
    PipelineConfig,
    QuantumState,
    UnreachablePreparationError,
    arc_distance,
    completeness_check,
    consistency_check,
    full_outcome_distribution,
    haar_unitary,
    infer_state,
    outcome_probs,
    run_pipeline,
    standard_measurement,
    to_complex,
    to_q_embedding,
)

HADAMARD = ComplexMap(np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2), 1)
STD2 = standard_measurement([0.0, 1.0])


def passthrough_config(state, runs, seed, reveal=True):
    """Measure n copies of the state itself (selection disabled)."""
    return PipelineConfig(
        source=state,
        preparation=standard_measurement(list(range(state.n))),
        prep_outcome=0,
        measurement=standard_measurement(list(range(state.n))),
        runs=runs,
        seed=seed,
        reveal_hidden=reveal,
        selection_enabled=False,
    )


class TestRunPipeline:
    def test_repetition_consistency(self):
        cfg = PipelineConfig(
            source=QuantumState([0.3, 0.7], [0.2, 1.4]),
            preparation=STD2,
            prep_outcome=1,
            measurement=STD2,
            runs=2_000,
            seed=3,
        )
        log = run_pipeline(cfg)
        assert np.all(log.outcomes == 1)

    def test_hadamard_split(self):
        cfg = PipelineConfig(
            source=QuantumState([1.0, 0.0], [0.0, 0.0]),
            preparation=STD2,
            prep_outcome=0,
            measurement=STD2,
            interaction=HADAMARD,
            runs=10_000,
            seed=11,
        )
        f1 = run_pipeline(cfg).counts().frequencies()[0]
        assert abs(f1 - 0.5) < 0.015  # three binomial standard deviations

    def test_hidden_certain_labels(self):
        cfg = passthrough_config(QuantumState([0.5, 0.5], [0.0, 0.0]), 500, seed=5)
        log = run_pipeline(cfg)
        assert np.all(log.hidden_labels == 0)
        assert np.all(log.hidden_signs == 1)

    def test_unreachable_preparation(self):
        cfg = PipelineConfig(
            source=QuantumState([1.0, 0.0], [0.0, 0.0]),
            preparation=STD2,
            prep_outcome=1,
            measurement=STD2,
            runs=10,
            seed=0,
        )
        with pytest.raises(UnreachablePreparationError):
            run_pipeline(cfg)

    def test_deterministic_given_seed(self):
        cfg = passthrough_config(QuantumState([0.4, 0.6], [0.7, 2.2]), 5_000, seed=42)
        a = run_pipeline(cfg)
        b = run_pipeline(cfg)
        np.testing.assert_array_equal(a.outcomes, b.outcomes)
        np.testing.assert_array_equal(a.hidden_labels, b.hidden_labels)
        assert a.prep_attempts == b.prep_attempts

    def test_frequencies_within_binomial_envelope(self):
        state = QuantumState([0.2, 0.5, 0.3], [0.0, 0.9, 4.1])
        meas = standard_measurement([0.0, 1.0, 2.0])
        cfg = PipelineConfig(
            source=state, preparation=meas, prep_outcome=0, measurement=meas,
            runs=10_000, seed=17, selection_enabled=False,
        )
        f = run_pipeline(cfg).counts().frequencies()
        p = outcome_probs(meas, to_complex(state))
        bound = 4 * np.sqrt(p * (1 - p) / cfg.runs)
        assert np.all(np.abs(f - p) <= np.maximum(bound, 1e-12))

    def test_hidden_alphabet_matches_full_distribution(self):
        state = QuantumState([0.4, 0.6], [0.7, 2.2])
        cfg = passthrough_config(state, 100_000, seed=23)
        log = run_pipeline(cfg)
        f = log.hidden_counts().counts / log.runs
        target = full_outcome_distribution(state)
        bound = 4 * np.sqrt(target * (1 - target) / log.runs)
        assert np.all(np.abs(f - target) <= np.maximum(bound, 1e-12))

    def test_prep_attempts_reported(self):
        cfg = PipelineConfig(
            source=QuantumState([0.25, 0.75], [0.0, 0.0]),
            preparation=STD2,
            prep_outcome=0,
            measurement=STD2,
            runs=4_000,
            seed=9,
        )
        log = run_pipeline(cfg)
        # geometric selection with probability 1/4: about four source draws per run
        assert 3.5 * cfg.runs < log.prep_attempts < 4.5 * cfg.runs


class TestInferState:
    TRUTH = QuantumState([0.4, 0.6], [0.7, 2.2])

    def test_recovers_known_state(self):
        n = 100_000
        log = run_pipeline(passthrough_config(self.TRUTH, n, seed=101))
        result = infer_state(log, 2)
        err = arc_distance(result.map_q, to_q_embedding(self.TRUTH))
        assert err < 3 / (2 * np.sqrt(n))
        assert result.sigma == pytest.approx(1 / (2 * np.sqrt(n)))
        assert not result.ambiguous.any()

    def test_error_halves_when_n_quadruples(self):
        def mean_error(n, seeds):
            errs = []
            for s in seeds:
                log = run_pipeline(passthrough_config(self.TRUTH, n, seed=s))
                err = arc_distance(infer_state(log, 2).map_q, to_q_embedding(self.TRUTH))
                errs.append(err)
            return np.mean(errs)

        seeds = range(200, 210)
        ratio = mean_error(100_000, seeds) / mean_error(25_000, seeds)
        assert 0.3 < ratio < 0.7

    def test_zero_phases_recovered(self):
        truth = QuantumState([0.5, 0.5], [0.0, 0.0])
        log = run_pipeline(passthrough_config(truth, 100_000, seed=77))
        result = infer_state(log, 2)
        wrapped = np.angle(np.exp(1j * result.map_state.phases))
        assert np.max(np.abs(wrapped)) < 0.02

    def test_ambiguous_cells_flagged(self):
        truth = QuantumState([1.0, 0.0], [0.0, 0.0])
        log = run_pipeline(passthrough_config(truth, 1_000, seed=13))
        result = infer_state(log, 2)
        # outcome 2 never fires: its two cells stay ambiguous, as does the
        # sine cell of outcome 1
        assert result.ambiguous[2] and result.ambiguous[3]
        assert result.signs[2] == 0

    def test_requires_hidden(self):
        log = run_pipeline(passthrough_config(self.TRUTH, 500, seed=1, reveal=False))
        with pytest.raises(DomainError):
            infer_state(log, 2)

    def test_gaussian_posterior_isotropic(self):
        log = run_pipeline(passthrough_config(self.TRUTH, 10_000, seed=3))
        gp = infer_state(log, 2).gaussian_posterior()
        np.testing.assert_allclose(gp.sigmas(), 1 / (2 * np.sqrt(10_000)), rtol=1e-12)


class TestCompleteness:
    @staticmethod
    def config(seed):
        return PipelineConfig(
            source=QuantumState([0.55, 0.45], [0.3, 1.1]),
            preparation=STD2,
            prep_outcome=0,
            measurement=MeasurementOp(
                np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2), (0.0, 1.0)
            ),
            runs=10_000,
            seed=seed,
        )

    INTERACTIONS = [
        ComplexMap(np.eye(2, dtype=complex), 1),
        HADAMARD,
        ComplexMap(np.array([[np.cos(0.9), -np.sin(0.9)], [np.sin(0.9), np.cos(0.9)]], dtype=complex), 1),
    ]

    def test_projective_preparation_passes(self):
        res = completeness_check(self.config(seed=31), self.INTERACTIONS, alpha=0.01)
        assert res.passed, f"p={res.p_value}"

    def test_no_selection_control_fails(self):
        from dataclasses import replace

        cfg = replace(self.config(seed=31), selection_enabled=False)
        res = completeness_check(cfg, self.INTERACTIONS, alpha=0.01)
        assert not res.passed

    def test_identical_interactions_trivially_pass(self):
        same = [self.INTERACTIONS[1], self.INTERACTIONS[1]]
        res = completeness_check(self.config(seed=5), same, alpha=0.01)
        assert res.passed

    def test_needs_two_interactions(self):
        with pytest.raises(DomainError):
            completeness_check(self.config(seed=1), [self.INTERACTIONS[0]])


class TestConsistency:
    STATE = QuantumState([0.3, 0.45, 0.25], [0.4, 1.7, 3.3])
    MEAS = standard_measurement([0.0, 1.0, 2.0])

    def test_identity_map_noise_level(self):
        res = consistency_check(self.STATE, ComplexMap(np.eye(3, dtype=complex), 1), self.MEAS, 100_000, seed=8)
        assert res.distance < 0.02

    def test_unitary_small_at_large_n(self, rng):
        m = haar_unitary(3, rng)
        res = consistency_check(self.STATE, m, self.MEAS, 100_000, seed=8)
        assert res.distance < 0.02

    def test_global_phase_invariance_envelope(self, rng):
        m = haar_unitary(3, rng)
        phased = ComplexMap(np.exp(1j * 1.234) * m.matrix, 1)
        d1 = consistency_check(self.STATE, m, self.MEAS, 100_000, seed=8).distance
        d2 = consistency_check(self.STATE, phased, self.MEAS, 100_000, seed=8).distance
        assert d1 < 0.02 and d2 < 0.02
        assert abs(d1 - d2) < 0.01

    def test_decay_with_n(self, rng):
        # all alphabet cells of this state stay comfortably populated at n=1e3,
        # so sign resolution does not distort the small-n error
        state = QuantumState([0.3, 0.45, 0.25], [0.7, 2.3, 4.0])
        m = haar_unitary(3, rng)
        dists = []
        for i, n in enumerate((1_000, 10_000, 100_000)):
            vals = [
                consistency_check(state, m, self.MEAS, n, seed=500 + 31 * i + r).distance
                for r in range(5)
            ]
            dists.append(np.mean(vals))
        assert dists[0] > dists[1] > dists[2]
        # per-decade ratio 1/sqrt(10) within 50 percent maps to this slope band
        slope = np.polyfit(np.log([1e3, 1e4, 1e5]), np.log(dists), 1)[0]
        assert -0.8 < slope < -0.33
