"""Quantum states as (probabilities; phases) pairs and their interconversions.

A state over N observable outcomes is stored as the pair (P, chi): P is a
probability tuple and chi holds N real phase-like degrees of freedom.  The
same state can be written as a complex unit vector with components
sqrt(P_i) * exp(i chi_i), or embedded in R^(2N) as the interleaved unit vector

    (sqrt(P_1) cos chi_1, sqrt(P_1) sin chi_1, ..., sqrt(P_N) sin chi_N).

Each observable outcome i carries a pair of hidden outcomes (a with
probability cos^2 chi_i, b with probability sin^2 chi_i) plus a sign read
deterministically from the corresponding cosine or sine.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PreconditionError
from .geometry import ZERO_ENTRY, orthant_signs, prob_vector, q_point, sample_uniform_sphere

PHASE_TOL = 1e-12


@dataclass(frozen=True)
class QuantumState:
    """State (P; chi): outcome probabilities plus N unconstrained phases.

    Phases are stored unwrapped; equality of phases is always modulo 2*pi.
    """

    probs: np.ndarray
    phases: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "probs", prob_vector(self.probs))
        chi = np.array(self.phases, dtype=float)
        if chi.shape != self.probs.shape:
            raise DomainError("need one phase per outcome")
        if not np.all(np.isfinite(chi)):
            raise DomainError("phases must be finite")
        object.__setattr__(self, "phases", chi)

    @property
    def n(self) -> int:
        return self.probs.size


def phases_equal(a, b, tol: float = PHASE_TOL) -> bool:
    """Compare phase arrays modulo 2*pi."""
    d = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    wrapped = np.angle(np.exp(1j * d))
    return bool(np.all(np.abs(wrapped) <= tol))


def to_q_embedding(state: QuantumState) -> np.ndarray:
    """Interleaved (sqrt(P_i) cos chi_i, sqrt(P_i) sin chi_i) unit vector in R^(2N)."""
    amp = np.sqrt(state.probs)
    q = np.empty(2 * state.n)
    q[0::2] = amp * np.cos(state.phases)
    q[1::2] = amp * np.sin(state.phases)
    return q


def from_q_embedding(q) -> QuantumState:
    """Recover (P; chi) from a point on the unit sphere in R^(2N).

    Outcomes with vanishing amplitude get phase 0 by convention.
    """
    q = q_point(q)
    if q.size % 2 != 0:
        raise DomainError("embedding vectors have even length")
    re = q[0::2]
    im = q[1::2]
    p = re * re + im * im
    chi = np.where(p < ZERO_ENTRY, 0.0, np.arctan2(im, re))
    return QuantumState(p / p.sum(), chi)


def to_complex(state: QuantumState) -> np.ndarray:
    """Complex unit vector with components sqrt(P_i) exp(i chi_i)."""
    return np.sqrt(state.probs) * np.exp(1j * state.phases)


def from_complex(v) -> QuantumState:
    """Inverse of to_complex; requires a unit vector.

    Zero-amplitude components get phase 0 so that round trips are exact.
    """
    v = np.asarray(v, dtype=complex)
    if v.ndim != 1:
        raise DomainError("state vector must be 1-D")
    if abs(np.linalg.norm(v) - 1.0) > 1e-12:
        raise DomainError(f"state vector has norm {np.linalg.norm(v)!r}, not 1")
    p = np.abs(v) ** 2
    chi = np.where(p < ZERO_ENTRY, 0.0, np.angle(v))
    return QuantumState(p / p.sum(), chi)


def add_global_phase(state: QuantumState, chi0: float) -> QuantumState:
    """Shift every phase by the same constant; probabilities are untouched."""
    return QuantumState(state.probs, state.phases + float(chi0))


def temporal_phase_evolve(state: QuantumState, energy: float, dt: float, alpha: float) -> QuantumState:
    """Evolve a definite-energy state for a time dt.

    Probabilities stay fixed and every phase shifts by -energy*dt/alpha, where
    alpha is a nonzero constant with the dimensions of action.
    """
    if alpha == 0.0:
        raise PreconditionError("the action constant must be nonzero")
    return add_global_phase(state, -float(energy) * float(dt) / float(alpha))


def hidden_outcome_probs(state: QuantumState, i: int) -> tuple[float, float, int, int]:
    """Hidden-pair data for observable outcome i (0-based).

    Returns (P_a, P_b, sign_a, sign_b) with P_a = cos^2 chi_i, P_b = sin^2 chi_i
    and the signs of the corresponding cosine and sine (0 when the amplitude
    vanishes).
    """
    if not 0 <= i < state.n:
        raise DomainError(f"outcome index {i} out of range")
    c = np.cos(state.phases[i])
    s = np.sin(state.phases[i])
    sign = lambda x: 0 if abs(x) < ZERO_ENTRY else (1 if x > 0 else -1)
    return float(c * c), float(s * s), sign(c), sign(s)


def full_outcome_distribution(state: QuantumState) -> np.ndarray:
    """Probability tuple over the 2N-cell alphabet (outcome, hidden label).

    Cell 2i holds P_i cos^2 chi_i and cell 2i+1 holds P_i sin^2 chi_i; this
    equals the squared q embedding.
    """
    c = np.cos(state.phases)
    s = np.sin(state.phases)
    full = np.empty(2 * state.n)
    full[0::2] = state.probs * c * c
    full[1::2] = state.probs * s * s
    return prob_vector(full / full.sum())


def embedding_signs(state: QuantumState) -> np.ndarray:
    """Sign pattern of the q embedding (2N entries, 0 for vanishing cells)."""
    return orthant_signs(to_q_embedding(state))


def sample_state_prior(n: int, rng: np.random.Generator) -> QuantumState:
    """Draw a state whose q embedding is uniform on the unit sphere in R^(2N)."""
    if n < 1:
        raise DomainError("need at least one outcome")
    return from_q_embedding(sample_uniform_sphere(2 * n, rng))


def state_to_json_dict(state: QuantumState) -> dict:
    return {
        "n": state.n,
        "probs": [float(x) for x in state.probs],
        "phases": [float(x) for x in state.phases],
    }


def state_from_json_dict(data: dict) -> QuantumState:
    try:
        probs = data["probs"]
        phases = data["phases"]
    except (KeyError, TypeError) as exc:
        raise DomainError(f"state serialization missing field: {exc}") from exc
    state = QuantumState(np.asarray(probs, dtype=float), np.asarray(phases, dtype=float))
    declared = data.get("n")
    if declared is not None and int(declared) != state.n:
        raise DomainError("declared state dimension does not match the arrays")
    return state
