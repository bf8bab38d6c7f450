"""Composite systems: probability products, phase sums, tensor products.

Two sub-system states (P^(1); chi^(1)) and (P^(2); chi^(2)) compose into the
state with P_ij = P^(1)_i * P^(2)_j and chi_ij = chi^(1)_i + chi^(2)_j, which
equals the Kronecker product of the complex forms.  Double indices flatten
row-major: (i, j) -> i * N2 + j.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import DomainError
from .measurement import MeasurementOp
from .states import QuantumState


@dataclass(frozen=True)
class CompositeIndex:
    """Row-major flattening convention for a tuple of factor dimensions."""

    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 1 for d in dims):
            raise DomainError("factor dimensions must be positive")
        object.__setattr__(self, "dims", dims)

    @property
    def size(self) -> int:
        return int(np.prod(self.dims))

    def flatten(self, multi: tuple[int, ...]) -> int:
        if len(multi) != len(self.dims):
            raise DomainError("index arity does not match the factor count")
        return int(np.ravel_multi_index(multi, self.dims))

    def unflatten(self, index: int) -> tuple[int, ...]:
        return tuple(int(x) for x in np.unravel_index(index, self.dims))


def compose_states(s1: QuantumState, s2: QuantumState) -> QuantumState:
    """Composite state with product probabilities and summed phases."""
    probs = np.outer(s1.probs, s2.probs).reshape(-1)
    phases = (s1.phases[:, None] + s2.phases[None, :]).reshape(-1)
    return QuantumState(probs / probs.sum(), phases)


def tensor_complex(v1: np.ndarray, v2: np.ndarray) -> np.ndarray:
    """Kronecker product of complex state vectors (row-major flattening)."""
    v1 = np.asarray(v1, dtype=complex)
    v2 = np.asarray(v2, dtype=complex)
    if v1.ndim != 1 or v2.ndim != 1:
        raise DomainError("state vectors must be 1-D")
    for v in (v1, v2):
        if abs(np.linalg.norm(v) - 1.0) > 1e-12:
            raise DomainError("state vectors must have unit norm")
    return np.kron(v1, v2)


def compose_many(states: list[QuantumState]) -> QuantumState:
    """Left-associated composition of one or more states."""
    if not states:
        raise DomainError("need at least one state to compose")
    return reduce(compose_states, states)


def composite_measurement(m1: MeasurementOp, m2: MeasurementOp, value_combiner=None) -> MeasurementOp:
    """Composite measurement with basis v_i x w_j.

    The default combiner pairs values into tuples, sidestepping any choice of
    how to merge scalars; pass a numeric combiner to get scalar values.  Both
    inputs must be non-degenerate and the combined values must stay distinct.
    """
    if m1.degenerate or m2.degenerate:
        raise DomainError("composite measurements need non-degenerate factors")
    combiner = value_combiner or (lambda a, b: (a, b))
    n1, n2 = m1.n, m2.n
    basis = np.empty((n1 * n2, n1 * n2), dtype=complex)
    values = []
    for i in range(n1):
        for j in range(n2):
            basis[i * n2 + j] = np.kron(m1.basis[i], m2.basis[j])
            values.append(combiner(m1.values[i], m2.values[j]))
    return MeasurementOp(basis, tuple(values))
