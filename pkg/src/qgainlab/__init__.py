"""qgainlab: numerical laboratory for the information-gain route to quantum theory.

The package verifies, at machine precision or stated statistical levels, the
chain of results leading from a flat-information-gain requirement on
probabilistic sources to the finite-dimensional quantum formalism: the
square-root-of-probability geometry, the reference prior and its constant
posterior width, the cosine-squared probability law, the orthogonal-to-
(anti)unitary transformation algebra, projective measurements, composite
systems, and a Monte Carlo simulator of the abstract experimental set-up.
"""

__version__ = "0.1.0"

from .errors import (
    BoundaryError,
    ConfigError,
    DegenerateDataError,
    DomainError,
    LabError,
    NotRepresentableError,
    PreconditionError,
    SigmaDiscontinuityError,
    SingularityError,
    SupportError,
    UnreachablePreparationError,
)
from .geometry import (
    HypersphericalChart,
    ProbabilityChart,
    arc_distance,
    fisher_line_element,
    orthant_signs,
    prob_to_q,
    prob_vector,
    q_point,
    q_to_prob,
    sample_uniform_orthant,
    sample_uniform_sphere,
    unit_ball_surface_area,
)
from .inference import (
    CountRecord,
    GaussianPosterior,
    InfoGainResult,
    PosteriorGrid,
    PriorSpec,
    arc_length_sigmas,
    info_gain,
    laplace_posterior,
    log_likelihood,
    posterior_grid,
    shannon_jaynes_entropy,
    stirling_log_likelihood,
    total_variation_distance,
)
from .infogain import (
    AmplitudeFamilyReport,
    FlatnessReport,
    GainBreakdown,
    MalusParams,
    arcsine_cdf,
    arcsine_marginal_check,
    closed_form_gain_infogain_prior,
    closed_form_gain_uniform,
    idealized_counts,
    malus_law,
    malus_ode_residual,
    solve_malus_ivp,
    verify_flatness,
    verify_outcome_amplitude_family,
)
from .states import (
    QuantumState,
    add_global_phase,
    from_complex,
    from_q_embedding,
    full_outcome_distribution,
    hidden_outcome_probs,
    phases_equal,
    sample_state_prior,
    temporal_phase_evolve,
    to_complex,
    to_q_embedding,
)
from .transforms import (
    ComplexMap,
    ConstraintReport,
    OrthoMap,
    PhaseShiftCheck,
    apply_ortho,
    check_phase_shift_invariance,
    constraint_coeffs,
    embed_complex,
    gram_via_blocks,
    haar_antiunitary,
    haar_orthogonal,
    haar_unitary,
    measure_preservation_check,
    predicted_probs,
    probs_by_embedding,
    recast_to_complex,
    sigma_path_class,
)
from .measurement import (
    Arrangement,
    MeasurementOp,
    arrangement_for,
    collapse,
    eigen_measurement,
    expected_value,
    hermitian_of,
    outcome_probs,
    simulate_arrangement,
    standard_measurement,
    subsystem_operator,
)
from .composite import (
    CompositeIndex,
    compose_many,
    compose_states,
    composite_measurement,
    tensor_complex,
)
from .simulate import (
    CompletenessResult,
    ConsistencyResult,
    InferredState,
    PipelineConfig,
    RunLog,
    completeness_check,
    consistency_check,
    infer_state,
    run_pipeline,
)
