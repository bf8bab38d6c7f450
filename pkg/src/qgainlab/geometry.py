"""Coordinates and measures on the probability simplex and its unit-sphere image.

A length-M probability tuple P is mapped to the square-root point
Q = (sqrt(P_1), ..., sqrt(P_M)) on the unit hypersphere.  This module holds the
validating constructors for both representations, the hyperspherical and
P1-identity charts, the Fisher line element, and the uniform-orthant sampler.

All operations are pure functions of their inputs; random sampling takes an
explicit numpy Generator.
"""

from __future__ import annotations

import numpy as np
from scipy.special import gamma

from .errors import DomainError, SingularityError

# Tolerance hierarchy: type invariants are enforced at these levels; derived
# identities are tested tighter (1e-12..1e-14) in the suite.
SUM_TOL = 1e-12
NORM_TOL = 1e-12
ZERO_ENTRY = 1e-15  # entries below this count as exact zeros for orthant signs


def prob_vector(values) -> np.ndarray:
    """Validate a probability tuple: entries in [0, 1], summing to 1.

    Returns a fresh float array.  Entries within ZERO_ENTRY of zero are
    accepted; genuinely negative entries are rejected rather than clipped.
    """
    p = np.array(values, dtype=float)
    if p.ndim != 1 or p.size < 1:
        raise DomainError("probability tuple must be a 1-D vector")
    if np.any(p < -ZERO_ENTRY) or np.any(p > 1.0 + SUM_TOL):
        raise DomainError("probability entries must lie in [0, 1]")
    if abs(p.sum() - 1.0) > SUM_TOL:
        raise DomainError(f"probabilities sum to {p.sum()!r}, not 1")
    return np.clip(p, 0.0, 1.0)


def q_point(values) -> np.ndarray:
    """Validate a point on the unit hypersphere (any orthant)."""
    q = np.array(values, dtype=float)
    if q.ndim != 1 or q.size < 1:
        raise DomainError("q point must be a 1-D vector")
    if abs(np.linalg.norm(q) - 1.0) > NORM_TOL:
        raise DomainError(f"q point has norm {np.linalg.norm(q)!r}, not 1")
    return q


def orthant_signs(q: np.ndarray) -> np.ndarray:
    """Sign pattern of a q point; entries below ZERO_ENTRY map to 0."""
    s = np.sign(q).astype(int)
    s[np.abs(q) < ZERO_ENTRY] = 0
    return s


def prob_to_q(p) -> np.ndarray:
    """Square-root map onto the positive orthant of the unit sphere."""
    return np.sqrt(prob_vector(p))


def q_to_prob(q) -> np.ndarray:
    """Square the entries of a unit vector, discarding signs.

    The output is renormalized (relative drift at most NORM_TOL) so that it
    always satisfies the probability-tuple invariant exactly.
    """
    p = np.square(q_point(q))
    return p / p.sum()


def arc_distance(q1, q2) -> float:
    """Great-circle distance between two unit vectors, in [0, pi]."""
    dot = float(np.dot(q_point(q1), q_point(q2)))
    return float(np.arccos(np.clip(dot, -1.0, 1.0)))


def fisher_line_element(p, dp) -> float:
    """Fisher length sqrt(sum dP_i^2 / P_i) of a tangent displacement.

    Requires a strictly interior p: zero components are refused rather than
    regularized, because the singularity is real.  The displacement must stay
    on the simplex (entries summing to zero).
    """
    p = prob_vector(p)
    dp = np.asarray(dp, dtype=float)
    if dp.shape != p.shape:
        raise DomainError("displacement shape does not match the probability tuple")
    if abs(dp.sum()) > 1e-12 * max(1.0, np.abs(dp).max()):
        raise DomainError("displacement must sum to zero to stay on the simplex")
    if np.any(p < ZERO_ENTRY):
        raise SingularityError("Fisher metric is singular at the simplex boundary")
    return float(np.sqrt(np.sum(dp * dp / p)))


def unit_ball_surface_area(m: int) -> float:
    """Surface area 2*pi^(m/2)/Gamma(m/2) of the unit sphere bounding an m-ball."""
    if m < 1:
        raise DomainError("dimension must be a positive integer")
    return float(2.0 * np.pi ** (m / 2.0) / gamma(m / 2.0))


def sample_uniform_orthant(m: int, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Uniform sample(s) from the positive orthant of the unit sphere in R^m.

    Absolute values of independent standard normals, normalized; exact and
    rejection-free.
    """
    if m < 2:
        raise DomainError("need at least two outcomes")
    shape = (m,) if size is None else (size, m)
    x = np.abs(rng.standard_normal(shape))
    return x / np.linalg.norm(x, axis=-1, keepdims=True)


def sample_uniform_sphere(dim: int, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Uniform sample(s) from the full unit sphere in R^dim (signed)."""
    if dim < 1:
        raise DomainError("dimension must be positive")
    shape = (dim,) if size is None else (size, dim)
    x = rng.standard_normal(shape)
    return x / np.linalg.norm(x, axis=-1, keepdims=True)


class HypersphericalChart:
    """Angle coordinates on the unit sphere in R^M.

    With angles t = (t_1, ..., t_{M-1}):

        Q_i = cos(t_i) * prod_{l<i} sin(t_l)   for i < M
        Q_M = prod_l sin(t_l)

    The orthant chart restricts every angle to [0, pi/2] and covers the
    positive orthant; the full-sphere chart uses [0, pi] for all but the last
    angle and [0, 2*pi) for the last.  Infinitesimal changes of distinct
    angles generate orthogonal displacements, so the induced metric is
    diagonal.
    """

    kind = "hyperspherical"

    def __init__(self, m: int, full_sphere: bool = False):
        if m < 2:
            raise DomainError("chart needs at least two outcomes")
        self.m = m
        self.dim = m - 1
        self.full_sphere = bool(full_sphere)
        if full_sphere:
            hi = [np.pi] * (m - 2) + [2.0 * np.pi]
        else:
            hi = [np.pi / 2.0] * (m - 1)
        self.lo = np.zeros(m - 1)
        self.hi = np.array(hi)

    def _check_domain(self, values: np.ndarray) -> None:
        if values.shape[-1] != self.dim:
            raise DomainError(f"chart expects {self.dim} coordinates")
        eps = 1e-12
        if np.any(values < self.lo - eps) or np.any(values > self.hi + eps):
            raise DomainError("chart coordinates outside the stated domain")

    def to_q(self, values) -> np.ndarray:
        """Map angle tuples (..., M-1) to unit vectors (..., M)."""
        t = np.asarray(values, dtype=float)
        self._check_domain(t)
        cos = np.cos(t)
        sin = np.sin(t)
        q = np.empty(t.shape[:-1] + (self.m,))
        running = np.ones(t.shape[:-1])
        for i in range(self.m - 1):
            q[..., i] = running * cos[..., i]
            running = running * sin[..., i]
        q[..., self.m - 1] = running
        return q

    def q_jacobian(self, values) -> np.ndarray:
        """Analytic dQ/dt with shape (..., M, M-1)."""
        t = np.asarray(values, dtype=float)
        self._check_domain(t)
        cos = np.cos(t)
        sin = np.sin(t)
        base = t.shape[:-1]
        jac = np.zeros(base + (self.m, self.dim))
        # prefix[i] = prod_{l<i} sin(t_l)
        prefix = np.ones(base + (self.m,))
        for i in range(1, self.m):
            prefix[..., i] = prefix[..., i - 1] * sin[..., i - 1]
        for i in range(self.m):
            fac_i = cos[..., i] if i < self.dim else 1.0
            for l in range(min(i + 1, self.dim)):
                if l == i:
                    jac[..., i, l] = -prefix[..., i] * sin[..., i]
                else:
                    # differentiate the sin(t_l) factor inside prefix[i]
                    others = np.ones(base)
                    for k in range(i):
                        if k != l:
                            others = others * sin[..., k]
                    jac[..., i, l] = others * cos[..., l] * fac_i
        return jac

    def from_q(self, q) -> np.ndarray:
        """Invert a single unit vector to angle coordinates."""
        q = q_point(q)
        if q.size != self.m:
            raise DomainError(f"chart expects vectors of length {self.m}")
        if not self.full_sphere and np.any(q < -ZERO_ENTRY):
            raise DomainError("orthant chart requires nonnegative entries")
        t = np.zeros(self.dim)
        running = 1.0
        for i in range(self.dim):
            if running < ZERO_ENTRY:
                t[i:] = 0.0
                break
            c = np.clip(q[i] / running, -1.0, 1.0)
            if self.full_sphere and i == self.dim - 1:
                t[i] = np.arctan2(q[self.m - 1] / running if running > ZERO_ENTRY else 0.0, c) % (2.0 * np.pi)
            else:
                t[i] = np.arccos(c)
            running = running * np.sin(t[i])
        return t

    def to_prob(self, values) -> np.ndarray:
        return np.square(self.to_q(values))

    def prob_jacobian(self, values) -> np.ndarray:
        """dP/dt = 2 Q dQ/dt with shape (..., M, M-1)."""
        q = self.to_q(values)
        return 2.0 * q[..., :, None] * self.q_jacobian(values)


class ProbabilityChart:
    """Identity chart for two outcomes: the coordinate is P_1 itself."""

    kind = "custom-monotone"

    def __init__(self):
        self.m = 2
        self.dim = 1
        self.lo = np.zeros(1)
        self.hi = np.ones(1)

    def _check_domain(self, values: np.ndarray) -> None:
        if values.shape[-1] != 1:
            raise DomainError("chart expects one coordinate")
        eps = 1e-12
        if np.any(values < -eps) or np.any(values > 1.0 + eps):
            raise DomainError("chart coordinates outside the stated domain")

    def to_q(self, values) -> np.ndarray:
        lam = np.asarray(values, dtype=float)
        self._check_domain(lam)
        p1 = np.clip(lam[..., 0], 0.0, 1.0)
        return np.stack([np.sqrt(p1), np.sqrt(1.0 - p1)], axis=-1)

    def q_jacobian(self, values) -> np.ndarray:
        lam = np.asarray(values, dtype=float)
        self._check_domain(lam)
        p1 = np.clip(lam[..., 0], 0.0, 1.0)
        with np.errstate(divide="ignore"):
            d1 = 0.5 / np.sqrt(p1)
            d2 = -0.5 / np.sqrt(1.0 - p1)
        return np.stack([d1, d2], axis=-1)[..., :, None]

    def from_q(self, q) -> np.ndarray:
        q = q_point(q)
        if q.size != 2:
            raise DomainError("chart expects vectors of length 2")
        return np.array([q[0] ** 2])

    def to_prob(self, values) -> np.ndarray:
        lam = np.asarray(values, dtype=float)
        self._check_domain(lam)
        p1 = np.clip(lam[..., 0], 0.0, 1.0)
        return np.stack([p1, 1.0 - p1], axis=-1)

    def prob_jacobian(self, values) -> np.ndarray:
        lam = np.asarray(values, dtype=float)
        self._check_domain(lam)
        ones = np.ones(lam.shape[:-1])
        return np.stack([ones, -ones], axis=-1)[..., :, None]


ParamChart = HypersphericalChart | ProbabilityChart
