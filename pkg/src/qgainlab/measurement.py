"""Measurements as orthonormal bases with real outcome values.

A measurement over C^N is an orthonormal basis {v'_1, ..., v'_N} with a real
value attached to each vector, optionally grouped into degenerate outcomes
that share a value.  The equivalent Hermitian matrix is sum_i v'_i a'_i v'_i^dagger.
Any measurement can be realized as a reference measurement sandwiched between
a unitary and its inverse.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PreconditionError
from .geometry import prob_vector
from .transforms import ComplexMap

BASIS_ORTHO_TOL = 1e-10
BASIS_NORM_TOL = 1e-12
EIGEN_GROUP_TOL = 1e-8


@dataclass(frozen=True)
class MeasurementOp:
    """Orthonormal basis, outcome values, and a degeneracy grouping.

    basis holds the vectors as rows.  values may be floats or, for composite
    measurements, tuples of floats; values must be equal inside a group and
    distinct across groups.  groups default to singletons.
    """

    basis: np.ndarray
    values: tuple
    groups: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        b = np.array(self.basis, dtype=complex)
        if b.ndim != 2 or b.shape[0] != b.shape[1]:
            raise DomainError("basis must hold N vectors of length N")
        n = b.shape[0]
        gram = b.conj() @ b.T
        if np.max(np.abs(np.diagonal(gram) - 1.0)) > BASIS_NORM_TOL:
            raise DomainError("basis vectors must have unit norm")
        if np.max(np.abs(gram - np.diag(np.diagonal(gram)))) > BASIS_ORTHO_TOL:
            raise DomainError("basis vectors must be pairwise orthogonal")
        values = tuple(self.values)
        if len(values) != n:
            raise DomainError("need one outcome value per basis vector")
        groups = tuple(tuple(g) for g in self.groups) or tuple((i,) for i in range(n))
        seen: list[int] = []
        for g in groups:
            if not g:
                raise DomainError("degeneracy groups must be nonempty")
            vals = {values[i] for i in g}
            if len(vals) != 1:
                raise DomainError("values inside a degeneracy group must be equal")
            seen.extend(g)
        if sorted(seen) != list(range(n)):
            raise DomainError("degeneracy groups must partition the outcome indices")
        group_values = [values[g[0]] for g in groups]
        if len(set(group_values)) != len(group_values):
            raise DomainError("values must be distinct across degeneracy groups")
        object.__setattr__(self, "basis", b)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "groups", groups)

    @property
    def n(self) -> int:
        return self.basis.shape[0]

    @property
    def n_outcomes(self) -> int:
        return len(self.groups)

    @property
    def degenerate(self) -> bool:
        return any(len(g) > 1 for g in self.groups)

    def group_values(self) -> tuple:
        return tuple(self.values[g[0]] for g in self.groups)

    def numeric_values(self) -> np.ndarray:
        vals = np.asarray(self.values)
        if vals.dtype == object or vals.ndim != 1:
            raise PreconditionError("this operation needs scalar outcome values")
        return vals.astype(float)


def standard_measurement(values) -> MeasurementOp:
    """Measurement in the standard basis with the given outcome values."""
    values = tuple(values)
    return MeasurementOp(np.eye(len(values), dtype=complex), values)


def hermitian_of(m: MeasurementOp) -> np.ndarray:
    """Hermitian matrix sum_i v'_i a'_i v'_i^dagger of a measurement."""
    vals = m.numeric_values()
    return (m.basis.T * vals) @ m.basis.conj()


def _normalize_vector_phase(v: np.ndarray) -> np.ndarray:
    """Rotate a vector's global phase so its first significant entry is real positive."""
    idx = np.argmax(np.abs(v) > 1e-8)
    pivot = v[idx]
    if abs(pivot) < 1e-14:
        return v
    return v * (np.conj(pivot) / abs(pivot))


def eigen_measurement(h: np.ndarray) -> MeasurementOp:
    """Measurement whose basis diagonalizes a Hermitian matrix.

    Outcomes are ordered by ascending eigenvalue; eigenvalues equal within
    EIGEN_GROUP_TOL (scaled by the matrix norm) form one degenerate group.
    Within a group the phase-normalized eigenvectors are ordered
    lexicographically so that the construction is deterministic.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise DomainError("expected a square matrix")
    if np.max(np.abs(h - h.conj().T)) > BASIS_ORTHO_TOL:
        raise DomainError("matrix is not Hermitian within tolerance")
    w, v = np.linalg.eigh(h)
    vectors = [_normalize_vector_phase(v[:, i]) for i in range(h.shape[0])]
    scale = max(1.0, float(np.max(np.abs(w))))
    groups: list[list[int]] = [[0]]
    for i in range(1, len(w)):
        if w[i] - w[groups[-1][0]] <= EIGEN_GROUP_TOL * scale:
            groups[-1].append(i)
        else:
            groups.append([i])
    ordered: list[int] = []
    for g in groups:
        keys = [tuple(np.round(np.concatenate([vectors[i].real, vectors[i].imag]), 12)) for i in g]
        ordered.extend(i for _, i in sorted(zip(keys, g)))
    basis = np.array([vectors[i] for i in ordered])
    # one representative value per group so grouped values compare equal exactly
    values = np.empty(len(w))
    start = 0
    out_groups: list[tuple[int, ...]] = []
    for g in groups:
        rep = float(np.mean(w[g]))
        values[start:start + len(g)] = rep
        out_groups.append(tuple(range(start, start + len(g))))
        start += len(g)
    return MeasurementOp(basis, tuple(values), tuple(out_groups))


def outcome_probs(m: MeasurementOp, v: np.ndarray) -> np.ndarray:
    """Outcome probabilities |<v'_i, v>|^2, summed over degeneracy groups."""
    v = np.asarray(v, dtype=complex)
    if v.shape != (m.n,):
        raise DomainError("state dimension does not match the measurement")
    amp2 = np.abs(m.basis.conj() @ v) ** 2
    p = np.array([amp2[list(g)].sum() for g in m.groups])
    return prob_vector(p / p.sum())


def collapse(m: MeasurementOp, v: np.ndarray, outcome: int) -> np.ndarray:
    """Output state after observing the given outcome (group index).

    Singleton groups return the basis vector; degenerate groups project the
    input onto the group subspace.  The result's first significant component
    is made real positive.
    """
    v = np.asarray(v, dtype=complex)
    if not 0 <= outcome < m.n_outcomes:
        raise DomainError(f"outcome index {outcome} out of range")
    probs = outcome_probs(m, v)
    if probs[outcome] <= 0.0:
        raise PreconditionError(f"outcome {outcome} has zero probability")
    g = m.groups[outcome]
    if len(g) == 1:
        out = m.basis[g[0]]
    else:
        coeff = m.basis[list(g)].conj() @ v
        out = coeff @ m.basis[list(g)]
        out = out / np.linalg.norm(out)
    return _normalize_vector_phase(out)


@dataclass(frozen=True)
class Arrangement:
    """Pre- and post-interactions realizing one measurement through another."""

    pre: ComplexMap
    post: ComplexMap
    reference: MeasurementOp

    def __post_init__(self):
        if self.pre.sigma != 1 or self.post.sigma != 1:
            raise DomainError("arrangement interactions must be unitary")


def arrangement_for(target: MeasurementOp, reference: MeasurementOp) -> Arrangement:
    """Unitaries U = sum_i v_i v'_i^dagger and V = U^dagger realizing the target.

    The free per-outcome phases are fixed to zero, which makes V exactly the
    inverse of U.  Both measurements must be non-degenerate and of equal
    dimension.
    """
    if target.n != reference.n:
        raise DomainError("dimension mismatch between target and reference")
    if target.degenerate or reference.degenerate:
        raise DomainError("arrangements need non-degenerate measurements")
    u = reference.basis.T @ target.basis.conj()
    pre = ComplexMap(u, 1)
    post = ComplexMap(u.conj().T, 1)
    return Arrangement(pre, post, reference)


def simulate_arrangement(
    arr: Arrangement, v: np.ndarray
) -> tuple[np.ndarray, list[np.ndarray]]:
    """Outcome probabilities and per-outcome output states of an arrangement.

    The input passes the pre-interaction, the reference measurement fires and
    collapses, and the post-interaction maps the collapsed state out.
    """
    u_in = arr.pre.apply(v)
    probs = outcome_probs(arr.reference, u_in)
    outputs = []
    for i in range(arr.reference.n_outcomes):
        if probs[i] > 0.0:
            collapsed = collapse(arr.reference, u_in, i)
            outputs.append(_normalize_vector_phase(arr.post.apply(collapsed)))
        else:
            outputs.append(_normalize_vector_phase(arr.post.apply(arr.reference.basis[i])))
    return probs, outputs


def expected_value(m: MeasurementOp, v: np.ndarray) -> float:
    """Expected outcome value, computed two ways and cross-checked.

    The probability-weighted sum over outcomes must equal the quadratic form
    of the Hermitian matrix within 1e-12.
    """
    vals = m.numeric_values()
    probs = outcome_probs(m, v)
    group_vals = np.array([vals[g[0]] for g in m.groups])
    by_probs = float(group_vals @ probs)
    h = hermitian_of(m)
    v = np.asarray(v, dtype=complex)
    by_matrix = float(np.real(v.conj() @ h @ v))
    if abs(by_probs - by_matrix) > 1e-12 * max(1.0, abs(by_probs)):
        raise AssertionError(
            f"expected-value identity violated: {by_probs!r} vs {by_matrix!r}"
        )
    return by_probs


def subsystem_operator(a1: np.ndarray, n2: int) -> np.ndarray:
    """Lift a sub-system Hermitian matrix to the composite: A x identity."""
    a1 = np.asarray(a1, dtype=complex)
    if a1.ndim != 2 or a1.shape[0] != a1.shape[1]:
        raise DomainError("expected a square matrix")
    if np.max(np.abs(a1 - a1.conj().T)) > BASIS_ORTHO_TOL:
        raise DomainError("matrix is not Hermitian within tolerance")
    if n2 < 1:
        raise DomainError("second factor dimension must be positive")
    return np.kron(a1, np.eye(n2, dtype=complex))
