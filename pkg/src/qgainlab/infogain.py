"""Consequences of requiring a P-independent information gain.

With the reference prior proportional to 1/sqrt(P_1 ... P_M), the information
gained from n interrogations of a source is flat across the simplex; the
outcome-probability law compatible with flatness is the generalized Malus form
P_1 = cos^2(a*lambda + b); the posterior width in arc length is 1/(2*sqrt(n));
and the hidden conditional probabilities inherit arcsine marginals.  This
module measures each of those statements numerically.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .geometry import (
    HypersphericalChart,
    prob_vector,
    sample_uniform_orthant,
    unit_ball_surface_area,
)
from .inference import CountRecord, PriorSpec, info_gain


def idealized_counts(p, n: int) -> CountRecord:
    """Deterministic counts closest to n*P, corrected to sum exactly to n.

    Largest-remainder rounding removes Monte Carlo noise from limit
    statements that are really about n going to infinity.
    """
    p = prob_vector(p)
    raw = n * p
    base = np.floor(raw).astype(np.int64)
    short = n - int(base.sum())
    if short > 0:
        order = np.argsort(-(raw - base))
        base[order[:short]] += 1
    return CountRecord(base)


@dataclass(frozen=True)
class FlatnessReport:
    """Information gain across a grid of true probability tuples."""

    grid: np.ndarray          # (points, M) true tuples
    gains: np.ndarray         # (points,) information gain in nats
    n: int
    prior_kind: str
    chart_domain: tuple
    quadrature_check: float   # half-resolution refinement delta at the first point

    @property
    def spread(self) -> float:
        return float(self.gains.max() - self.gains.min())

    @property
    def fitted_constant(self) -> float:
        return float(self.gains.mean())


def verify_flatness(
    prior: PriorSpec,
    m: int,
    n: int,
    grid,
    resolution: int = 1024,
    max_workers: int = 1,
    rng: np.random.Generator | None = None,
) -> FlatnessReport:
    """Measure the information gain at each true P on the grid.

    Counts are the deterministic idealized ones by default; passing a
    generator switches to multinomial draws, which adds ordinary sampling
    noise on top of the flatness signal.  Grid points are independent; with
    max_workers > 1 they are evaluated on a thread pool and collected in
    order.
    """
    pts = np.atleast_2d(np.asarray(grid, dtype=float))
    if pts.shape[1] != m:
        raise DomainError("grid points must be probability tuples of length M")
    chart = HypersphericalChart(m)
    if rng is None:
        records = [idealized_counts(p, n) for p in pts]
    else:
        records = [CountRecord(rng.multinomial(n, prob_vector(p))) for p in pts]

    def gain_at(record: CountRecord) -> float:
        return info_gain(prior, record, chart, resolution).value

    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            gains = np.array(list(pool.map(gain_at, records)))
    else:
        gains = np.array([gain_at(r) for r in records])

    coarse = info_gain(prior, records[0], chart, max(64, resolution // 2)).value
    domain = tuple((float(lo), float(hi)) for lo, hi in zip(chart.lo, chart.hi))
    return FlatnessReport(
        grid=pts,
        gains=gains,
        n=n,
        prior_kind=prior.kind,
        chart_domain=domain,
        quadrature_check=float(abs(gains[0] - coarse)),
    )


def closed_form_gain_uniform(n: int, f1: float) -> float:
    """Gain under the flat simplex prior for two outcomes at frequency f1.

    Equals 0.5*ln(n / (2*pi*e)) - 0.5*ln(f1*(1 - f1)); visibly depends on f1.
    """
    if n < 100:
        raise DomainError("the closed form assumes large counts (n >= 100)")
    if not 0.0 < f1 < 1.0:
        raise DomainError("frequency must be strictly between 0 and 1")
    return float(0.5 * np.log(n / (2.0 * np.pi * np.e)) - 0.5 * np.log(f1 * (1.0 - f1)))


@dataclass(frozen=True)
class GainBreakdown:
    """Flat-prior gain split into the growing term and the prior constant."""

    leading: float   # ((M-1)/2) * ln(2n / (pi e))
    constant: float  # ln(orthant surface measure) = ln(A_{M-1} / 2^M)

    @property
    def total(self) -> float:
        return self.leading + self.constant


def closed_form_gain_infogain_prior(m: int, n: int) -> GainBreakdown:
    """Gain under the information-gain prior: flat in P by construction.

    The leading term ((M-1)/2)*ln(2n/(pi*e)) carries all the n dependence;
    the additive constant is the log of the positive-orthant surface measure,
    i.e. the normalization of the uniform arc-length prior.
    """
    if m < 2:
        raise DomainError("need at least two outcomes")
    if n < 100:
        raise DomainError("the closed form assumes large counts (n >= 100)")
    leading = 0.5 * (m - 1) * np.log(2.0 * n / (np.pi * np.e))
    constant = np.log(unit_ball_surface_area(m) / 2.0**m)
    return GainBreakdown(float(leading), float(constant))


@dataclass(frozen=True)
class MalusParams:
    """Parameters of the cos^2(a*x + b) outcome-probability family.

    The slope a must be nonzero: a constant probability law would make the
    parameter unidentifiable.
    """

    a: float
    b: float = 0.0
    sign_cos: int = 1
    sign_sin: int = 1

    def __post_init__(self):
        if self.a == 0.0:
            raise DomainError("the slope of the probability law must be nonzero")
        if self.sign_cos not in (1, -1) or self.sign_sin not in (1, -1):
            raise DomainError("signs must be +1 or -1")


def malus_law(lam, params: MalusParams) -> np.ndarray | float:
    """Generalized Malus law P_1 = cos^2(a*lambda + b)."""
    out = np.cos(params.a * np.asarray(lam, dtype=float) + params.b) ** 2
    if out.ndim == 0:
        return float(out)
    return out


def malus_ode_residual(params: MalusParams, lam_grid) -> float:
    """Max violation of |dP1/dlam| = 2|a| sqrt(P1 (1-P1)) along the law.

    The derivative is taken numerically (five-point stencil) so the check is
    independent of the algebra that produced the law.
    """
    lam = np.asarray(lam_grid, dtype=float)
    h = 1e-4
    f = lambda x: malus_law(x, params)
    deriv = (-f(lam + 2 * h) + 8 * f(lam + h) - 8 * f(lam - h) + f(lam - 2 * h)) / (12 * h)
    p1 = np.clip(f(lam), 0.0, 1.0)
    target = 2.0 * abs(params.a) * np.sqrt(p1 * (1.0 - p1))
    return float(np.max(np.abs(np.abs(deriv) - target)))


GUARD_BAND = 0.01  # stay this far (in a*lambda units) from the sqrt singularity


def solve_malus_ivp(a: float, b: float = 0.0, step: float = 1e-3) -> tuple[np.ndarray, np.ndarray]:
    """Integrate dP1/dlam = -2 a sqrt(P1 (1 - P1)) from P1(0) = cos^2(b).

    Classic fixed-step fourth-order Runge-Kutta.  The trajectory is tabulated
    up to the point where the phase a*lam + b comes within GUARD_BAND of the
    boundary values {0, pi/2}, where the square root loses smoothness; if the
    integrator overshoots into [0, 1] boundary territory it stops cleanly.

    A start exactly at P1 = 1 is degenerate: the constant function also
    satisfies the equation there.  The invertible branch is selected by the
    local expansion of the equation around the boundary,
    1 - P1 = (a lam)^2 - (a lam)^4 / 3 + ..., which seeds the nodes inside
    the guard band before Runge-Kutta takes over.  Returns (lam, P1) arrays.
    """
    if a == 0.0:
        raise DomainError("slope must be nonzero")
    if not 0.0 <= b < np.pi / 2.0:
        raise DomainError("intercept must lie in [0, pi/2)")
    if a > 0.0:
        lam_end = (np.pi / 2.0 - GUARD_BAND - b) / a
    else:
        lam_end = (GUARD_BAND - b) / a
    if lam_end <= 0.0:
        raise DomainError("the guarded integration interval is empty")

    def rhs(y: float) -> float:
        return -2.0 * a * np.sqrt(max(y * (1.0 - y), 0.0))

    steps = int(np.ceil(lam_end / step))
    h = lam_end / steps
    lams = h * np.arange(steps + 1)
    vals = np.empty(steps + 1)
    vals[0] = np.cos(b) ** 2
    start = 0
    if b == 0.0 and a > 0.0:
        # series-start the degenerate boundary point: keep the expansion
        # until the phase clears the guard band (truncation error ~ u^8)
        start = min(steps, int(np.ceil(GUARD_BAND / (a * h))))
        u2 = (a * lams[1 : start + 1]) ** 2
        vals[1 : start + 1] = 1.0 - u2 * (1.0 - u2 / 3.0 + 2.0 * u2 * u2 / 45.0)
    y = vals[start]
    for i in range(start, steps):
        k1 = rhs(y)
        k2 = rhs(y + 0.5 * h * k1)
        k3 = rhs(y + 0.5 * h * k2)
        k4 = rhs(y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if y <= 0.0 or y >= 1.0:
            # clean stop at the probability boundary
            vals[i + 1] = min(max(y, 0.0), 1.0)
            return lams[: i + 2], vals[: i + 2]
        vals[i + 1] = y
    return lams, vals


def arcsine_cdf(x) -> np.ndarray | float:
    """CDF (2/pi) arcsin(sqrt(x)) of the arcsine law on [0, 1]."""
    out = (2.0 / np.pi) * np.arcsin(np.sqrt(np.clip(x, 0.0, 1.0)))
    if np.ndim(out) == 0:
        return float(out)
    return out


def arcsine_marginal_check(n: int, samples: int, rng: np.random.Generator) -> np.ndarray:
    """KS distances of the hidden conditional probabilities from the arcsine law.

    Samples uniformly from the positive orthant of the sphere in R^(2N), forms
    P_{a|i} = Ptilde_{2i-1} / (Ptilde_{2i-1} + Ptilde_{2i}) for every i, and
    returns one KS distance per index i.
    """
    from scipy.stats import kstest

    if n < 1:
        raise DomainError("need at least one outcome pair")
    if samples < 10_000:
        raise DomainError("need at least 1e4 samples for a meaningful KS distance")
    q = sample_uniform_orthant(2 * n, rng, size=samples)
    pt = q * q
    odd = pt[:, 0::2]
    even = pt[:, 1::2]
    cond = odd / (odd + even)
    return np.array([kstest(cond[:, i], arcsine_cdf).statistic for i in range(n)])


@dataclass(frozen=True)
class AmplitudeFamilyReport:
    """Numerical certificate for the hidden-outcome amplitude family."""

    max_ivp_error: float        # sup gap between the integrated F and cos^2
    pythagoras_residual: float  # max |f^2 + ftilde^2 - 1| over signs and points
    constant_rejected: bool     # the zero-slope candidate violates the invariant


def verify_outcome_amplitude_family(
    c: float = 2.0, rng: np.random.Generator | None = None
) -> AmplitudeFamilyReport:
    """Certify that dF/dchi = -c sqrt(F(1-F)) yields the cos^2 family.

    Integrates the defining equation from F(0) = 1 and compares against
    cos^2((c/2) chi); checks that every sign choice of (f, ftilde) =
    (+-cos, +-sin) satisfies f^2 + ftilde^2 = 1; and confirms the constant
    candidate (zero slope) is rejected by the parameter invariant.
    """
    if c == 0.0:
        raise DomainError("the proportionality constant must be nonzero")
    rng = np.random.default_rng(0) if rng is None else rng
    a = c / 2.0
    chi, f_vals = solve_malus_ivp(a, 0.0)
    analytic = np.cos(a * chi) ** 2
    max_err = float(np.max(np.abs(f_vals - analytic)))

    pts = rng.uniform(0.0, 2.0 * np.pi, size=1000)
    worst = 0.0
    for sc in (1, -1):
        for ss in (1, -1):
            f = sc * np.cos(a * pts)
            ft = ss * np.sin(a * pts)
            worst = max(worst, float(np.max(np.abs(f * f + ft * ft - 1.0))))

    try:
        MalusParams(a=0.0)
        rejected = False
    except DomainError:
        rejected = True
    return AmplitudeFamilyReport(max_err, worst, rejected)
