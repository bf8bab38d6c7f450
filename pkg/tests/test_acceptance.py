"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines and measured values.  Every tolerance is stated inline.
"""

from dataclasses import replace
from pathlib import Path

import numpy as np

import qgainlab as q
from qgainlab.cli import main

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def report(num, name, passed, detail):
    line = f"[criterion {num:02d}] {'PASS' if passed else 'FAIL'} {name}: {detail}"
    print(line)
    assert passed, line


def test_criterion_01_information_gain_flatness():
    grid = [[x, 1 - x] for x in np.arange(0.1, 0.91, 0.1)]
    flat = q.verify_flatness(q.PriorSpec.info_gain(), 2, 10_000, grid)
    target = 0.5 * np.log(np.pi * 10_000 / (2 * np.e))
    mean_err = abs(flat.fitted_constant - target)

    uni = q.verify_flatness(q.PriorSpec.uniform_simplex(), 2, 10_000, grid)
    closed = np.array([q.closed_form_gain_uniform(10_000, p[0]) for p in grid])
    uni_err = float(np.max(np.abs(uni.gains - closed)))

    ok = flat.spread < 0.02 and mean_err < 0.05 and uni_err < 0.05
    report(
        1,
        "information-gain flatness",
        ok,
        f"spread={flat.spread:.2e} (tol 0.02), |mean-closed|={mean_err:.2e} (tol 0.05), "
        f"uniform pointwise={uni_err:.2e} (tol 0.05)",
    )


def test_criterion_02_posterior_width_universality():
    n = 10_000
    target = 1.0 / (2.0 * np.sqrt(n))
    worst_laplace = 0.0
    worst_grid = 0.0

    chart2 = q.HypersphericalChart(2)
    for f1 in (0.1, 0.3, 0.5, 0.7, 0.9):
        rec = q.idealized_counts([f1, 1 - f1], n)
        sig = q.arc_length_sigmas(q.laplace_posterior(rec, chart2), chart2)
        worst_laplace = max(worst_laplace, float(np.max(np.abs(sig / target - 1))))
        # independent oracle: second moment of the exact grid posterior
        grid = q.posterior_grid(q.PriorSpec.info_gain(), rec, chart2)
        stretch = np.linalg.norm(chart2.q_jacobian(grid.mode()), axis=0)
        worst_grid = max(worst_grid, float(np.max(np.abs(grid.std() * stretch / target - 1))))

    chart3 = q.HypersphericalChart(3)
    for p in ([1/3, 1/3, 1/3], [0.2, 0.3, 0.5], [0.5, 0.25, 0.25], [0.15, 0.55, 0.3], [0.4, 0.45, 0.15]):
        rec = q.idealized_counts(p, n)
        sig = q.arc_length_sigmas(q.laplace_posterior(rec, chart3), chart3)
        worst_laplace = max(worst_laplace, float(np.max(np.abs(sig / target - 1))))
        grid = q.posterior_grid(q.PriorSpec.info_gain(), rec, chart3, 512)
        stretch = np.linalg.norm(chart3.q_jacobian(grid.mode()), axis=0)
        worst_grid = max(worst_grid, float(np.max(np.abs(grid.std() * stretch / target - 1))))

    ok = worst_laplace < 0.02 and worst_grid < 0.02
    report(
        2,
        "posterior width 1/(2 sqrt(n))",
        ok,
        f"max rel err: expansion={worst_laplace:.2e}, grid oracle={worst_grid:.2e} (tol 0.02)",
    )


def test_criterion_03_malus_emergence():
    worst = 0.0
    for a, b in ((1.0, 0.0), (2.0, np.pi / 4), (0.5, 0.1)):
        lams, vals = q.solve_malus_ivp(a, b)
        worst = max(worst, float(np.max(np.abs(vals - np.cos(a * lams + b) ** 2))))
    report(3, "cosine-squared law from the width condition", worst < 1e-6,
           f"sup gap={worst:.2e} (tol 1e-6)")


def test_criterion_04_equivalence_theorem():
    rng = np.random.default_rng(404)
    dims = [2, 3, 5]
    unit_ok = anti_ok = 0
    round_trip_err = 0.0
    for i in range(100):
        n = dims[i % 3]
        u = q.haar_unitary(n, rng)
        m = q.embed_complex(u)
        if q.check_phase_shift_invariance(m, rng=rng, tol=1e-12).passed:
            unit_ok += 1
        back = q.recast_to_complex(m)
        round_trip_err = max(round_trip_err, float(np.max(np.abs(back.matrix - u.matrix))))
        round_trip_err = max(
            round_trip_err, float(np.max(np.abs(q.embed_complex(back).matrix - m.matrix)))
        )

        au = q.haar_antiunitary(n, rng)
        ma = q.embed_complex(au)
        if q.check_phase_shift_invariance(ma, rng=rng, tol=1e-12).passed:
            anti_ok += 1
        back = q.recast_to_complex(ma)
        round_trip_err = max(round_trip_err, float(np.max(np.abs(back.matrix - au.matrix))))

    generic_fail = 0
    witness_seen = True
    for i in range(100):
        n = dims[i % 3]
        res = q.check_phase_shift_invariance(q.haar_orthogonal(2 * n, rng), rng=rng, tol=1e-12)
        if not res.passed:
            generic_fail += 1
            witness_seen = witness_seen and res.witness_state is not None

    ok = unit_ok == 100 and anti_ok == 100 and round_trip_err < 1e-12 and generic_fail >= 99 and witness_seen
    report(
        4,
        "equivalence theorem at desk scale",
        ok,
        f"unitaries {unit_ok}/100, antiunitaries {anti_ok}/100 pass at 1e-12; "
        f"round trip {round_trip_err:.2e} (tol 1e-12); generic fail {generic_fail}/100 (need >= 99)",
    )


def test_criterion_05_cross_path_probability_identity():
    rng = np.random.default_rng(505)
    worst = 0.0
    for i in range(1000):
        n = 1 + i % 5
        m = q.haar_orthogonal(2 * n, rng) if i % 2 else q.embed_complex(q.haar_unitary(n, rng))
        s = q.sample_state_prior(n, rng)
        worst = max(
            worst, float(np.max(np.abs(q.predicted_probs(m, s) - q.probs_by_embedding(m, s))))
        )
    report(5, "explicit expansion equals rotate-then-square", worst < 1e-12,
           f"max gap={worst:.2e} over 1000 pairs (tol 1e-12)")


def test_criterion_06_measurement_arrangement():
    rng = np.random.default_rng(606)
    dims = [2, 3, 5]
    worst_prob = worst_overlap = worst_expect = 0.0
    for i in range(100):
        n = dims[i % 3]
        target = q.MeasurementOp(q.haar_unitary(n, rng).matrix, tuple(float(v) for v in range(n)))
        reference = q.MeasurementOp(q.haar_unitary(n, rng).matrix, tuple(float(v) for v in range(n)))
        v = q.to_complex(q.sample_state_prior(n, rng))
        arr = q.arrangement_for(target, reference)
        probs, outputs = q.simulate_arrangement(arr, v)
        worst_prob = max(
            worst_prob, float(np.max(np.abs(probs - q.outcome_probs(target, v))))
        )
        for k, out in enumerate(outputs):
            worst_overlap = max(worst_overlap, abs(abs(np.vdot(out, target.basis[k])) - 1.0))
        by_probs = float(np.asarray(target.values) @ q.outcome_probs(target, v))
        by_matrix = float(np.real(v.conj() @ q.hermitian_of(target) @ v))
        worst_expect = max(worst_expect, abs(by_probs - by_matrix))
    ok = worst_prob < 1e-12 and worst_overlap < 1e-12 and worst_expect < 1e-12
    report(
        6,
        "arrangement equivalence and expected values",
        ok,
        f"probs={worst_prob:.2e}, overlap={worst_overlap:.2e}, expectation={worst_expect:.2e} (tol 1e-12)",
    )


def test_criterion_07_composite_rule():
    rng = np.random.default_rng(707)
    worst = 0.0
    for _ in range(1000):
        s1 = q.sample_state_prior(2, rng)
        s2 = q.sample_state_prior(3, rng)
        gap = np.max(
            np.abs(
                q.to_complex(q.compose_states(s1, s2))
                - q.tensor_complex(q.to_complex(s1), q.to_complex(s2))
            )
        )
        worst = max(worst, float(gap))

    a1 = np.array([[0.8, 0.3 - 0.4j], [0.3 + 0.4j, -0.6]])
    m1 = q.eigen_measurement(a1)
    lifted = q.eigen_measurement(q.subsystem_operator(a1, 2))
    worst_exp = 0.0
    for _ in range(100):
        s1 = q.sample_state_prior(2, rng)
        s2 = q.sample_state_prior(2, rng)
        on_comp = q.expected_value(lifted, q.to_complex(q.compose_states(s1, s2)))
        on_factor = q.expected_value(m1, q.to_complex(s1))
        worst_exp = max(worst_exp, abs(on_comp - on_factor))
    ok = worst < 1e-14 and worst_exp < 1e-12
    report(
        7,
        "composite rule",
        ok,
        f"compose vs tensor={worst:.2e} (tol 1e-14); subsystem expectation={worst_exp:.2e} (tol 1e-12)",
    )


def test_criterion_08_hidden_outcome_prior():
    rng = np.random.default_rng(808)
    ks1 = q.arcsine_marginal_check(1, 100_000, rng)
    ks3 = q.arcsine_marginal_check(3, 100_000, rng)
    worst = float(max(ks1.max(), ks3.max()))
    report(8, "arcsine marginals of hidden conditionals", worst < 0.015,
           f"max KS={worst:.4f} over N in {{1,3}} at 1e5 samples (tol 0.015)")


def test_criterion_09_simulator_closure():
    truth = q.QuantumState([0.4, 0.6], [0.7, 2.2])
    meas = q.standard_measurement([0.0, 1.0])

    def passthrough(state, runs, seed):
        return q.PipelineConfig(
            source=state, preparation=meas, prep_outcome=0, measurement=meas,
            runs=runs, seed=seed, reveal_hidden=True, selection_enabled=False,
        )

    n = 100_000
    log = q.run_pipeline(passthrough(truth, n, seed=101))
    err = q.arc_distance(q.infer_state(log, 2).map_q, q.to_q_embedding(truth))
    infer_ok = err < 3 / (2 * np.sqrt(n))

    # commuting-diagram statistic decay
    state3 = q.QuantumState([0.3, 0.45, 0.25], [0.7, 2.3, 4.0])
    meas3 = q.standard_measurement([0.0, 1.0, 2.0])
    m = q.haar_unitary(3, np.random.default_rng(909))
    dists = []
    for i, runs in enumerate((1_000, 10_000, 100_000)):
        vals = [
            q.consistency_check(state3, m, meas3, runs, seed=500 + 31 * i + r).distance
            for r in range(5)
        ]
        dists.append(float(np.mean(vals)))
    slope = float(np.polyfit(np.log([1e3, 1e4, 1e5]), np.log(dists), 1)[0])
    decay_ok = dists[0] > dists[1] > dists[2] and -0.8 < slope < -0.33

    # completeness across 20 seeded scenarios
    interactions = [
        q.ComplexMap(np.eye(2, dtype=complex), 1),
        q.ComplexMap(np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2), 1),
        q.ComplexMap(
            np.array([[np.cos(0.9), -np.sin(0.9)], [np.sin(0.9), np.cos(0.9)]], dtype=complex), 1
        ),
    ]
    fourier = q.MeasurementOp(np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2), (0.0, 1.0))
    complete_ok = True
    for seed in range(1000, 1020):
        cfg = q.PipelineConfig(
            source=q.QuantumState([0.55, 0.45], [0.3, 1.1]),
            preparation=meas, prep_outcome=0, measurement=fourier,
            runs=10_000, seed=seed,
        )
        if not q.completeness_check(cfg, interactions, alpha=0.01).passed:
            complete_ok = False
        if q.completeness_check(replace(cfg, selection_enabled=False), interactions, alpha=0.01).passed:
            complete_ok = False

    ok = infer_ok and decay_ok and complete_ok
    report(
        9,
        "simulator closure",
        ok,
        f"infer err={err:.5f} (tol {3 / (2 * np.sqrt(n)):.5f}); decay slope={slope:.3f} "
        f"(band -0.8..-0.33); completeness 20/20={'yes' if complete_ok else 'no'}",
    )


def test_criterion_10_cli_determinism(tmp_path):
    commands = {
        "infogain": ["infogain", "--config", str(CONFIGS / "jeffreys_M2.json")],
        "malus": ["malus", "--config", str(CONFIGS / "malus.json")],
        "recast": ["recast", "--map", str(CONFIGS / "maps" / "antiunitary_N2.json")],
        "checkshift": ["checkshift", "--map", str(CONFIGS / "maps" / "haar_orthogonal_N2.json"), "--seed", "11"],
        "simulate": ["simulate", "--config", str(CONFIGS / "stern_gerlach_N2.json")],
        "consistency": ["consistency", "--config", str(CONFIGS / "consistency_N2.json")],
    }
    mismatches = []
    for name, argv in commands.items():
        outs = []
        for tag in ("one", "two"):
            out = tmp_path / name / tag
            code = main(argv + ["--out", str(out)])
            assert code in (0, 4)
            outs.append(sorted(p for p in out.iterdir()))
        for pa, pb in zip(*outs):
            if pa.read_bytes() != pb.read_bytes():
                mismatches.append(f"{name}/{pa.name}")
    # infer consumes simulate output; rerun on the deterministic log
    for tag in ("one", "two"):
        out = tmp_path / "infer" / tag
        code = main([
            "infer", "--log", str(tmp_path / "simulate" / "one" / "runlog.csv"),
            "--out", str(out),
        ])
        assert code == 0
    for pa, pb in zip(
        sorted((tmp_path / "infer" / "one").iterdir()),
        sorted((tmp_path / "infer" / "two").iterdir()),
    ):
        if pa.read_bytes() != pb.read_bytes():
            mismatches.append(f"infer/{pa.name}")
    report(10, "CLI byte determinism", not mismatches,
           "all commands reproduce identical bytes" if not mismatches else f"differs: {mismatches}")
