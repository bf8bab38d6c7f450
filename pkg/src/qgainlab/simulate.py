"""Monte Carlo simulator of the source / preparation / interaction / measurement loop.

Each run draws a system from the source, selects it at a preparation
measurement (collapse on a chosen outcome), applies an optional interaction,
and samples the final measurement.  When hidden outcomes are revealed, every
run also records the (a, b) label drawn from cos^2/sin^2 of the state's phase
at the observed outcome, plus the deterministic sign bit.

Randomness is split from one seed into named child streams (source,
preparation, outcomes, hidden) so every report is reproducible bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError, UnreachablePreparationError
from .geometry import arc_distance
from .inference import CountRecord, GaussianPosterior
from .measurement import MeasurementOp, collapse, outcome_probs
from .states import (
    QuantumState,
    from_complex,
    from_q_embedding,
    sample_state_prior,
    to_complex,
    to_q_embedding,
)
from .transforms import ComplexMap

SIGN_MIN_COUNT = 5  # cells with fewer observations do not get a sign guess


@dataclass(frozen=True)
class PipelineConfig:
    """One experiment: source, preparation, optional interaction, measurement."""

    source: QuantumState | str          # fixed state, or "prior" to draw one
    preparation: MeasurementOp
    prep_outcome: int
    measurement: MeasurementOp
    interaction: ComplexMap | None = None
    runs: int = 10_000
    seed: int = 0
    reveal_hidden: bool = False
    selection_enabled: bool = True      # disabling models the no-preparation control

    def __post_init__(self):
        if self.runs < 1:
            raise DomainError("need at least one run")
        n = self.preparation.n
        if self.measurement.n != n:
            raise DomainError("preparation and measurement dimensions disagree")
        if isinstance(self.source, QuantumState) and self.source.n != n:
            raise DomainError("source state dimension disagrees with the measurements")
        if self.interaction is not None and self.interaction.n != n:
            raise DomainError("interaction dimension disagrees with the measurements")
        if not 0 <= self.prep_outcome < self.preparation.n_outcomes:
            raise DomainError("preparation outcome index out of range")

    @property
    def n_dim(self) -> int:
        return self.preparation.n


@dataclass(frozen=True)
class RunLog:
    """Per-run outcomes plus aggregate counts.

    outcomes holds the observed final-measurement outcome of each run.  With
    hidden outcomes revealed, hidden_labels holds 0 for the a outcome and 1
    for b, and hidden_signs the corresponding +-1 bit.
    """

    n_outcomes: int
    outcomes: np.ndarray
    hidden_labels: np.ndarray | None
    hidden_signs: np.ndarray | None
    prep_attempts: int
    seed: int

    @property
    def runs(self) -> int:
        return self.outcomes.size

    def counts(self) -> CountRecord:
        """Counts over the N observable outcomes."""
        return CountRecord(np.bincount(self.outcomes, minlength=self.n_outcomes))

    def hidden_counts(self) -> CountRecord:
        """Counts over the 2N cells (outcome, hidden label)."""
        if self.hidden_labels is None:
            raise DomainError("hidden outcomes were not revealed in this log")
        cells = 2 * self.outcomes + self.hidden_labels
        return CountRecord(np.bincount(cells, minlength=2 * self.n_outcomes))

    def signed_counts(self) -> CountRecord:
        """Counts over the 4N cells (outcome, hidden label, sign)."""
        if self.hidden_labels is None or self.hidden_signs is None:
            raise DomainError("hidden outcomes were not revealed in this log")
        cells = 2 * (2 * self.outcomes + self.hidden_labels) + (self.hidden_signs < 0)
        return CountRecord(np.bincount(cells, minlength=4 * self.n_outcomes))

    def sign_votes(self) -> np.ndarray:
        """Summed sign bits per 2N cell (positive majority means +)."""
        if self.hidden_labels is None or self.hidden_signs is None:
            raise DomainError("hidden outcomes were not revealed in this log")
        cells = 2 * self.outcomes + self.hidden_labels
        votes = np.zeros(2 * self.n_outcomes, dtype=np.int64)
        np.add.at(votes, cells, self.hidden_signs)
        return votes


def _child_rngs(seed: int, count: int) -> list[np.random.Generator]:
    root = np.random.SeedSequence(seed)
    return [np.random.default_rng(s) for s in root.spawn(count)]


def prepared_state(cfg: PipelineConfig, rng_source: np.random.Generator) -> tuple[np.ndarray, QuantumState]:
    """Source state and post-preparation complex vector for one pipeline."""
    if isinstance(cfg.source, QuantumState):
        source = cfg.source
    elif cfg.source == "prior":
        source = sample_state_prior(cfg.n_dim, rng_source)
    else:
        raise DomainError(f"unknown source spec {cfg.source!r}")
    v = to_complex(source)
    return v, source


def run_pipeline(cfg: PipelineConfig) -> RunLog:
    """Execute every run of the configured pipeline.

    Preparation is a select-or-reject step: each run draws source systems
    until one yields the selected outcome.  The number of source draws per run
    is geometric in the selection probability; attempts are tallied from that
    law, which is statistically identical to drawing one outcome at a time.
    """
    rng_source, rng_prep, rng_meas, rng_hidden = _child_rngs(cfg.seed, 4)
    v, _ = prepared_state(cfg, rng_source)

    if cfg.selection_enabled:
        sel_probs = outcome_probs(cfg.preparation, v)
        p_sel = float(sel_probs[cfg.prep_outcome])
        if p_sel <= 0.0:
            raise UnreachablePreparationError(
                f"preparation outcome {cfg.prep_outcome} has zero probability under the source"
            )
        attempts = int(rng_prep.geometric(p_sel, size=cfg.runs).sum())
        v_prep = collapse(cfg.preparation, v, cfg.prep_outcome)
    else:
        attempts = cfg.runs
        v_prep = v

    v_final = cfg.interaction.apply(v_prep) if cfg.interaction is not None else v_prep

    probs = outcome_probs(cfg.measurement, v_final)
    outcomes = rng_meas.choice(probs.size, size=cfg.runs, p=probs).astype(np.int64)

    hidden_labels = hidden_signs = None
    if cfg.reveal_hidden:
        if cfg.measurement.degenerate:
            raise DomainError("hidden outcomes are defined for non-degenerate measurements")
        # state written with respect to the final measurement basis
        coeff = cfg.measurement.basis.conj() @ v_final
        state = from_complex(coeff / np.linalg.norm(coeff))
        cosines = np.cos(state.phases)
        sines = np.sin(state.phases)
        p_a = cosines**2
        hidden_labels = (rng_hidden.random(cfg.runs) >= p_a[outcomes]).astype(np.int64)
        sign_a = np.where(cosines >= 0.0, 1, -1)
        sign_b = np.where(sines >= 0.0, 1, -1)
        hidden_signs = np.where(hidden_labels == 0, sign_a[outcomes], sign_b[outcomes]).astype(np.int64)

    return RunLog(
        n_outcomes=cfg.measurement.n_outcomes,
        outcomes=outcomes,
        hidden_labels=hidden_labels,
        hidden_signs=hidden_signs,
        prep_attempts=attempts,
        seed=cfg.seed,
    )


@dataclass(frozen=True)
class InferredState:
    """State reconstructed from a hidden-outcome run log.

    map_q is the most probable point on the unit sphere in R^(2N); sigma is
    the posterior width 1/(2*sqrt(n)) in arc length.  Cells observed fewer
    than SIGN_MIN_COUNT times keep sign 0 (ambiguous) and enter the map
    estimate on the positive branch.
    """

    map_state: QuantumState
    map_q: np.ndarray
    sigma: float
    signs: np.ndarray          # (2N,) entries in {-1, 0, +1}
    ambiguous: np.ndarray      # (2N,) bool, True where the sign is unresolved
    cell_counts: np.ndarray

    def gaussian_posterior(self) -> GaussianPosterior:
        """Isotropic tangent-space Gaussian at map_q with width sigma per axis."""
        dim = self.map_q.size - 1
        return GaussianPosterior(np.zeros(dim), np.eye(dim) / self.sigma**2)


def infer_state(log: RunLog, n_dim: int) -> InferredState:
    """Reconstruct the state from revealed hidden outcomes.

    Amplitudes are square roots of the 2N cell frequencies; signs come from
    the per-cell majority vote (deterministic signs make votes unanimous).
    """
    if log.hidden_labels is None:
        raise DomainError("state inference needs hidden outcomes in the log")
    if log.runs < 100:
        raise DomainError("state inference needs at least 100 runs")
    if n_dim != log.n_outcomes:
        raise DomainError("dimension does not match the log")
    counts = log.hidden_counts().counts
    votes = log.sign_votes()
    freq = counts / counts.sum()
    signs = np.sign(votes).astype(int)
    ambiguous = counts < SIGN_MIN_COUNT
    signs[ambiguous] = 0
    effective = np.where(signs == 0, 1, signs)
    q = effective * np.sqrt(freq)
    q = q / np.linalg.norm(q)
    return InferredState(
        map_state=from_q_embedding(q),
        map_q=q,
        sigma=1.0 / (2.0 * np.sqrt(log.runs)),
        signs=signs,
        ambiguous=ambiguous,
        cell_counts=counts,
    )


@dataclass(frozen=True)
class CompletenessResult:
    passed: bool
    p_value: float
    table: np.ndarray  # (interactions, outcomes) counts


def completeness_check(
    cfg: PipelineConfig,
    pre_interactions: list[ComplexMap],
    alpha: float = 0.01,
) -> CompletenessResult:
    """Test whether pre-preparation interactions leave the statistics alone.

    Each candidate interaction is applied to the source state before the
    preparation step; the observed final-outcome count vectors must then be
    homogeneous (chi-square test at level alpha).  With selection disabled
    the preparation no longer erases the pre-history and the test rejects.
    """
    from scipy.stats import chi2_contingency

    if len(pre_interactions) < 2:
        raise DomainError("need at least two pre-preparation interactions")
    if not isinstance(cfg.source, QuantumState):
        raise DomainError("completeness checks need a fixed source state")
    rows = []
    for idx, w in enumerate(pre_interactions):
        twisted = from_complex(w.apply(to_complex(cfg.source)))
        sub = replace(cfg, source=twisted, seed=cfg.seed + 7919 * (idx + 1))
        rows.append(run_pipeline(sub).counts().counts)
    table = np.vstack(rows)
    keep = table.sum(axis=0) > 0
    reduced = table[:, keep]
    if reduced.shape[1] < 2:
        p = 1.0  # all mass on one outcome for every interaction: trivially homogeneous
    else:
        p = float(chi2_contingency(reduced, correction=True).pvalue)
    return CompletenessResult(passed=p >= alpha, p_value=p, table=table)


@dataclass(frozen=True)
class ConsistencyResult:
    """Commuting-diagram statistic for transform-then-infer vs infer-then-transform."""

    distance: float
    n: int
    map_direct: QuantumState       # inferred from data on the transformed state
    map_transported: QuantumState  # inferred from data on the original, then mapped


def consistency_check(
    state: QuantumState,
    m: ComplexMap,
    meas: MeasurementOp,
    n: int,
    seed: int = 0,
) -> ConsistencyResult:
    """Arc distance between the two routes to the transformed state.

    Route one: measure n copies of the transformed state and infer.  Route
    two: measure n copies of the original state, infer, then transform the
    estimate.  The statistic decays like 1/sqrt(n).
    """
    transformed = from_complex(m.apply(to_complex(state)))

    def infer_for(src: QuantumState, sub_seed: int) -> QuantumState:
        cfg = PipelineConfig(
            source=src,
            preparation=meas,
            prep_outcome=0,
            measurement=meas,
            runs=n,
            seed=sub_seed,
            reveal_hidden=True,
            selection_enabled=False,
        )
        return infer_state(run_pipeline(cfg), meas.n).map_state

    direct = infer_for(transformed, seed)
    base = infer_for(state, seed + 1)
    transported = from_complex(m.apply(to_complex(base)))
    dist = arc_distance(to_q_embedding(direct), to_q_embedding(transported))
    return ConsistencyResult(distance=dist, n=n, map_direct=direct, map_transported=transported)
