"""Bayesian machinery for multinomial sources: likelihoods, priors, posteriors.

Inference about the probability tuple P of an M-outcome source runs over a
parameter chart of the simplex.  Exact posteriors are tabulated on uniform
chart grids with trapezoid quadrature; the large-count limit is available as a
Gaussian from the second-order expansion of the log-likelihood at its mode.
Everything works in log space so that counts of 1e4 and beyond do not
underflow, and entropies are reported in nats.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp

from .errors import (
    BoundaryError,
    DegenerateDataError,
    DomainError,
    SupportError,
)
from .geometry import ParamChart, prob_vector, prob_to_q, unit_ball_surface_area

UNIFORM_SIMPLEX = "uniform-simplex"
INFO_GAIN = "info-gain"
GRID_TABULATED = "grid-tabulated"
DEFAULT_RESOLUTION = 1024


@dataclass(frozen=True)
class CountRecord:
    """Outcome counts m with total n = sum(m)."""

    counts: np.ndarray

    def __post_init__(self):
        m = np.array(self.counts)
        if m.ndim != 1 or m.size < 2:
            raise DomainError("counts must be a 1-D vector with at least two cells")
        if np.any(m < 0) or not np.all(m == np.floor(m)):
            raise DomainError("counts must be nonnegative integers")
        object.__setattr__(self, "counts", m.astype(np.int64))

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    @property
    def m(self) -> int:
        return self.counts.size

    def frequencies(self) -> np.ndarray:
        if self.n == 0:
            raise DomainError("frequencies are undefined for zero total count")
        return prob_vector(self.counts / self.n)


def log_likelihood(record: CountRecord, p) -> float | np.ndarray:
    """Log multinomial probability mass of the counts at probabilities p.

    Accepts a single tuple or an array of tuples (last axis of length M).
    Cells with positive counts and zero probability yield -inf.
    """
    p = np.asarray(p, dtype=float)
    if p.shape[-1] != record.m:
        raise DomainError("probability tuple length does not match the counts")
    m = record.counts.astype(float)
    prefactor = gammaln(record.n + 1.0) - gammaln(m + 1.0).sum()
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(m > 0, m * np.log(p), 0.0)
    out = prefactor + terms.sum(axis=-1)
    if out.ndim == 0:
        return float(out)
    return out


def stirling_log_likelihood(record: CountRecord, p) -> float | np.ndarray:
    """Large-count closed form of the log likelihood.

    Equals 0.5*ln(2*pi*n) - (M/2)*ln(2*pi*n) - 0.5*sum(ln f_i)
    - n*sum(f_i ln(f_i / P_i)); the difference from the exact value is O(1/n).
    All frequencies must be strictly positive.
    """
    if record.n == 0:
        raise DomainError("needs at least one observation")
    f = record.frequencies()
    if np.any(f <= 0.0):
        raise DomainError("the closed form requires strictly positive frequencies")
    p = np.asarray(p, dtype=float)
    if p.shape[-1] != record.m:
        raise DomainError("probability tuple length does not match the counts")
    n = record.n
    log2pin = np.log(2.0 * np.pi * n)
    with np.errstate(divide="ignore", invalid="ignore"):
        exponent = -n * np.sum(f * np.log(f / p), axis=-1)
    out = 0.5 * log2pin - (record.m / 2.0) * log2pin - 0.5 * np.log(f).sum() + exponent
    if out.ndim == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class PriorSpec:
    """Prior over the probability simplex, evaluable in chart coordinates.

    Three kinds are supported.  "uniform-simplex" is the flat density on the
    simplex.  "info-gain" is the reference density proportional to
    1/sqrt(P_1 ... P_M), i.e. the law that is uniform over the positive
    orthant of the unit sphere in square-root coordinates.  "grid-tabulated"
    carries its own chart grid and (normalized) density values.
    """

    kind: str
    axes: tuple | None = None
    log_values: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in (UNIFORM_SIMPLEX, INFO_GAIN, GRID_TABULATED):
            raise DomainError(f"unknown prior kind {self.kind!r}")
        if self.kind == GRID_TABULATED and (self.axes is None or self.log_values is None):
            raise DomainError("grid-tabulated priors need axes and values")

    @classmethod
    def uniform_simplex(cls) -> "PriorSpec":
        return cls(UNIFORM_SIMPLEX)

    @classmethod
    def info_gain(cls) -> "PriorSpec":
        return cls(INFO_GAIN)

    @classmethod
    def from_table(cls, axes, values) -> "PriorSpec":
        """Tabulated prior over a chart grid, normalized by trapezoid quadrature."""
        axes = tuple(np.asarray(a, dtype=float) for a in axes)
        values = np.asarray(values, dtype=float)
        if values.shape != tuple(a.size for a in axes):
            raise DomainError("value grid shape does not match the axes")
        if np.any(values < 0.0):
            raise DomainError("densities must be nonnegative")
        w = _weight_mesh(axes)
        total = float((values * w).sum())
        if total <= 0.0:
            raise DomainError("tabulated prior has zero mass")
        with np.errstate(divide="ignore"):
            logv = np.log(values / total)
        return cls(GRID_TABULATED, axes, logv)

    def log_density_simplex(self, p) -> np.ndarray:
        """Log density over the free simplex coordinates (P_1, ..., P_{M-1})."""
        p = np.asarray(p, dtype=float)
        m = p.shape[-1]
        if self.kind == UNIFORM_SIMPLEX:
            return np.broadcast_to(gammaln(m), p.shape[:-1]).copy()
        if self.kind == INFO_GAIN:
            with np.errstate(divide="ignore"):
                return (
                    np.log(2.0) - np.log(unit_ball_surface_area(m))
                    - 0.5 * np.sum(np.log(p), axis=-1)
                )
        raise DomainError("tabulated priors are defined over their own chart grid")

    def log_density_chart(self, chart: ParamChart | None, lam) -> np.ndarray:
        """Log density in chart coordinates, stable at the simplex boundary.

        For the info-gain kind the density equals (2^M / A_{M-1}) times the
        square-root-space volume element sqrt(det(J_Q^T J_Q)), which stays
        finite on charts that absorb the boundary.
        """
        lam = np.asarray(lam, dtype=float)
        if self.kind == GRID_TABULATED:
            return self._interpolate(lam)
        if chart is None:
            raise DomainError("analytic priors need a chart for evaluation")
        if self.kind == INFO_GAIN:
            jq = chart.q_jacobian(lam)
            with np.errstate(invalid="ignore"):
                gram = np.einsum("...il,...ik->...lk", jq, jq)
            bounded = np.all(np.isfinite(gram), axis=(-2, -1))
            safe = np.where(bounded[..., None, None], gram, np.eye(chart.dim))
            sign, logdet = np.linalg.slogdet(safe)
            with np.errstate(invalid="ignore"):
                logvol = np.where(sign > 0, 0.5 * logdet, -np.inf)
            # an unbounded volume element means the chart does not absorb the
            # boundary singularity; report a diverging density there
            logvol = np.where(bounded, logvol, np.inf)
            return (
                chart.m * np.log(2.0) - np.log(unit_ball_surface_area(chart.m)) + logvol
            )
        # uniform-simplex: flat density times the P-space volume element
        jp = chart.prob_jacobian(lam)[..., : chart.m - 1, :]
        sign, logdet = np.linalg.slogdet(jp)
        with np.errstate(invalid="ignore"):
            logvol = np.where(np.abs(sign) > 0, logdet, -np.inf)
        return gammaln(chart.m) + logvol

    def _interpolate(self, lam: np.ndarray) -> np.ndarray:
        if len(self.axes) == 1:
            return np.interp(lam[..., 0], self.axes[0], self.log_values)
        from scipy.interpolate import RegularGridInterpolator

        interp = RegularGridInterpolator(self.axes, self.log_values, bounds_error=False, fill_value=-np.inf)
        return interp(lam)

    def normalization_residual(self, chart: ParamChart, resolution: int = DEFAULT_RESOLUTION) -> float:
        """|integral - 1| of the density over the chart domain, by quadrature."""
        axes, lam = _chart_grid(chart, resolution)
        w = _weight_mesh(axes)
        logd = self.log_density_chart(chart, lam)
        return float(abs(np.exp(logsumexp(logd, b=w)) - 1.0))


def _chart_grid(chart: ParamChart, resolution: int) -> tuple[tuple, np.ndarray]:
    if resolution < 64:
        raise DomainError("resolution must be at least 64 nodes per dimension")
    axes = tuple(
        np.linspace(chart.lo[k], chart.hi[k], resolution) for k in range(chart.dim)
    )
    mesh = np.meshgrid(*axes, indexing="ij")
    lam = np.stack(mesh, axis=-1)
    return axes, lam


def _weight_mesh(axes: tuple) -> np.ndarray:
    """Outer product of per-axis trapezoid weights."""
    out = None
    for a in axes:
        h = (a[-1] - a[0]) / (a.size - 1) if a.size > 1 else 1.0
        w = np.full(a.size, h)
        w[0] = w[-1] = h / 2.0
        out = w if out is None else np.multiply.outer(out, w)
    return out


@dataclass(frozen=True)
class PosteriorGrid:
    """Normalized density tabulated on a uniform chart grid."""

    chart: ParamChart | None
    axes: tuple
    density: np.ndarray

    def weights(self) -> np.ndarray:
        return _weight_mesh(self.axes)

    def integral(self) -> float:
        return float((self.density * self.weights()).sum())

    def mode(self) -> np.ndarray:
        idx = np.unravel_index(int(np.argmax(self.density)), self.density.shape)
        return np.array([self.axes[k][idx[k]] for k in range(len(self.axes))])

    def mean(self) -> np.ndarray:
        w = self.weights() * self.density
        mesh = np.meshgrid(*self.axes, indexing="ij")
        return np.array([float((w * g).sum()) for g in mesh])

    def std(self) -> np.ndarray:
        w = self.weights() * self.density
        mesh = np.meshgrid(*self.axes, indexing="ij")
        mu = self.mean()
        return np.array(
            [float(np.sqrt((w * (g - mu[k]) ** 2).sum())) for k, g in enumerate(mesh)]
        )

    def cell_sizes(self) -> np.ndarray:
        return np.array([a[1] - a[0] for a in self.axes])


def posterior_grid(
    prior: PriorSpec,
    record: CountRecord,
    chart: ParamChart,
    resolution: int = DEFAULT_RESOLUTION,
) -> PosteriorGrid:
    """Tabulate the posterior density (likelihood times prior, normalized).

    Zero-count data reproduces the prior.  Raises DegenerateDataError when the
    likelihood vanishes on the whole grid.
    """
    axes, lam = _chart_grid(chart, resolution)
    log_prior = prior.log_density_chart(chart, lam)
    if record.n > 0:
        log_lik = log_likelihood(record, chart.to_prob(lam))
    else:
        log_lik = np.zeros(lam.shape[:-1])
    # a vanishing likelihood kills the node outright, even against an
    # unbounded prior density at the simplex boundary
    with np.errstate(invalid="ignore"):
        log_post = np.where(np.isneginf(log_lik), -np.inf, log_lik + log_prior)
    if np.any(np.isposinf(log_post)):
        raise DegenerateDataError(
            "prior density is unbounded at a grid node; use a chart that absorbs the boundary"
        )
    w = _weight_mesh(axes)
    if not np.any(np.isfinite(log_post)):
        raise DegenerateDataError("likelihood vanishes everywhere on the grid")
    log_norm = logsumexp(log_post, b=w)
    if not np.isfinite(log_norm):
        raise DegenerateDataError("posterior mass on the grid is zero")
    density = np.exp(log_post - log_norm)
    return PosteriorGrid(chart, axes, density)


@dataclass(frozen=True)
class GaussianPosterior:
    """Gaussian over chart coordinates: mean and inverse covariance."""

    mean: np.ndarray
    inv_cov: np.ndarray

    def __post_init__(self):
        mean = np.array(self.mean, dtype=float)
        b = np.array(self.inv_cov, dtype=float)
        if b.shape != (mean.size, mean.size):
            raise DomainError("inverse covariance shape does not match the mean")
        if np.max(np.abs(b - b.T)) > 1e-12 * max(1.0, np.max(np.abs(b))):
            raise DomainError("inverse covariance must be symmetric")
        try:
            np.linalg.cholesky(b)
        except np.linalg.LinAlgError as exc:
            raise DomainError("inverse covariance must be positive definite") from exc
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "inv_cov", b)

    @property
    def dim(self) -> int:
        return self.mean.size

    def covariance(self) -> np.ndarray:
        return np.linalg.inv(self.inv_cov)

    def sigmas(self) -> np.ndarray:
        return np.sqrt(np.diagonal(self.covariance()))

    def pdf(self, lam) -> np.ndarray:
        lam = np.asarray(lam, dtype=float)
        delta = lam - self.mean
        quad = np.einsum("...l,lk,...k->...", delta, self.inv_cov, delta)
        sign, logdet = np.linalg.slogdet(self.inv_cov)
        norm = 0.5 * logdet - 0.5 * self.dim * np.log(2.0 * np.pi)
        return np.exp(norm - 0.5 * quad)


def laplace_posterior(record: CountRecord, chart: ParamChart) -> GaussianPosterior:
    """Gaussian posterior from the second-order log-likelihood expansion.

    The mean solves f = P(mean); the inverse covariance is
    n * sum_i (1/f_i) dP_i/dlam_l dP_i/dlam_k at the mean.  Requires strictly
    interior frequencies.
    """
    if record.n == 0:
        raise DomainError("needs at least one observation")
    f = record.frequencies()
    if np.any(f <= 0.0):
        raise BoundaryError("the expansion assumes strictly interior frequencies")
    lam0 = chart.from_q(prob_to_q(f))
    jp = chart.prob_jacobian(lam0)
    b = record.n * np.einsum("il,ik->lk", jp / f[:, None], jp)
    b = 0.5 * (b + b.T)
    return GaussianPosterior(lam0, b)


def arc_length_sigmas(gp: GaussianPosterior, chart: ParamChart) -> np.ndarray:
    """Per-axis posterior widths converted to arc length on the unit sphere.

    Multiplies each coordinate width by the norm of dQ/dlam_l at the mean; on
    orthogonal charts every entry equals 1/(2*sqrt(n)).
    """
    jq = chart.q_jacobian(gp.mean)
    stretch = np.linalg.norm(jq, axis=0)
    return gp.sigmas() * stretch


def shannon_jaynes_entropy(density: PosteriorGrid, prior: PriorSpec) -> float:
    """Relative entropy -integral F ln(F / prior) of a density against the prior.

    Vanishes when the density equals the prior; the prior must be positive
    wherever the density is.
    """
    lam = np.stack(np.meshgrid(*density.axes, indexing="ij"), axis=-1)
    log_prior = prior.log_density_chart(density.chart, lam)
    f = density.density
    support = f > 0.0
    if np.any(support & np.isneginf(log_prior)):
        raise SupportError("density is positive where the prior vanishes")
    with np.errstate(divide="ignore", invalid="ignore"):
        integrand = np.where(support, f * (np.log(np.where(support, f, 1.0)) - log_prior), 0.0)
    return float(-(integrand * density.weights()).sum())


@dataclass(frozen=True)
class InfoGainResult:
    """Information gain in nats, with the chart domain it was computed over."""

    value: float
    domain: tuple
    resolution: int

    def __float__(self) -> float:
        return self.value


def info_gain(
    prior: PriorSpec,
    record: CountRecord,
    chart: ParamChart,
    resolution: int = DEFAULT_RESOLUTION,
) -> InfoGainResult:
    """Information gained about P from the counts: prior minus posterior entropy.

    Equals integral posterior * ln(posterior / prior) on the chart grid.  The
    chart domain is reported alongside the value because a different choice of
    (proper) coordinate interval shifts the gain by a constant.
    """
    post = posterior_grid(prior, record, chart, resolution)
    value = -shannon_jaynes_entropy(post, prior)
    domain = tuple((float(lo), float(hi)) for lo, hi in zip(chart.lo, chart.hi))
    return InfoGainResult(value, domain, resolution)


def total_variation_distance(grid: PosteriorGrid, gp: GaussianPosterior) -> float:
    """Half the integrated absolute difference between grid and Gaussian."""
    lam = np.stack(np.meshgrid(*grid.axes, indexing="ij"), axis=-1)
    return float(0.5 * (np.abs(grid.density - gp.pdf(lam)) * grid.weights()).sum())
