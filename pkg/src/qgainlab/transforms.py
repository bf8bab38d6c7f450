"""Orthogonal maps on the state sphere and their complex (anti)unitary recasts.

An orthogonal matrix on R^(2N) acts on the q embedding of a state.  Viewing it
as an N-by-N array of 2-by-2 blocks, phase-shift invariance of the observed
outcome probabilities holds exactly when

  * every block is a scaled rotation or scaled reflection-rotation
    (equal column norms within a block, orthogonal block columns), and
  * the block types are homogeneous across the whole matrix, with matching
    cross-block products.

A homogeneous all-rotation matrix is the real embedding of a unitary matrix
(sigma = +1); the all-reflection case embeds a unitary composed with complex
conjugation, i.e. an antiunitary map (sigma = -1).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NotRepresentableError, SigmaDiscontinuityError
from .geometry import sample_uniform_sphere
from .states import QuantumState, sample_state_prior, to_q_embedding

ORTHO_TOL = 1e-10
UNITARY_TOL = 1e-10
ZERO_BLOCK = 1e-14  # blocks below this scale are typed "zero" and do not vote


@dataclass(frozen=True)
class OrthoMap:
    """Real orthogonal matrix acting on q embeddings (dimension 2N)."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DomainError("orthogonal map must be a square matrix")
        if m.shape[0] % 2 != 0 or m.shape[0] < 2:
            raise DomainError("q-embedding maps act on an even dimension")
        if np.max(np.abs(m.T @ m - np.eye(m.shape[0]))) > ORTHO_TOL:
            raise DomainError("matrix is not orthogonal within tolerance")
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        """Number of observable outcomes (half the matrix dimension)."""
        return self.matrix.shape[0] // 2


@dataclass(frozen=True)
class ComplexMap:
    """Unitary (sigma=+1) or antiunitary (sigma=-1) map on C^N.

    The antiunitary case means: conjugate the input, then apply the matrix.
    """

    matrix: np.ndarray
    sigma: int = 1

    def __post_init__(self):
        u = np.array(self.matrix, dtype=complex)
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise DomainError("complex map must be a square matrix")
        if self.sigma not in (1, -1):
            raise DomainError("sigma must be +1 or -1")
        if np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) > UNITARY_TOL:
            raise DomainError("matrix is not unitary within tolerance")
        object.__setattr__(self, "matrix", u)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def apply(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=complex)
        return self.matrix @ (np.conj(v) if self.sigma < 0 else v)


@dataclass(frozen=True)
class ConstraintReport:
    """Diagnostics of the block structure of an orthogonal map."""

    scale_residual: float        # max mismatch of the two column norms within a block
    skew_residual: float         # max inner product of the two columns within a block
    cross_sym_residual: float    # max cross-block cos-cos vs sin-sin mismatch
    cross_skew_residual: float   # max cross-block cos-sin vs sin-cos mismatch
    block_types: np.ndarray      # (N, N) array of {"zero", "rotation", "reflection"}
    homogeneous: bool            # all non-zero blocks share one type
    sigma: int | None            # +1 / -1 when representable, else None
    block_scales: np.ndarray = field(repr=False, default=None)  # (N, N) column-norm scales

    def max_residual(self) -> float:
        return max(self.scale_residual, self.skew_residual,
                   self.cross_sym_residual, self.cross_skew_residual)


def _blocks(matrix: np.ndarray) -> np.ndarray:
    """View a 2N x 2N matrix as an (N, N, 2, 2) array of blocks."""
    n = matrix.shape[0] // 2
    return matrix.reshape(n, 2, n, 2).transpose(0, 2, 1, 3)


def pair_products(matrix: np.ndarray) -> dict[str, np.ndarray]:
    """Column products of the 2x2 blocks of a 2N x 2N matrix.

    Returns within-block quantities col1norm2, col2norm2, skew of shape (N, N)
    and cross-block products cc, cs, sc, ss of shape (N, N, N) indexed
    (k, i, j), where cc[k, i, j] is the inner product of the first columns of
    blocks (k, i) and (k, j), and so on.
    """
    t = _blocks(matrix)
    c1 = t[..., :, 0]  # (N, N, 2) first block columns
    c2 = t[..., :, 1]
    return {
        "col1norm2": np.einsum("kir,kir->ki", c1, c1),
        "col2norm2": np.einsum("kir,kir->ki", c2, c2),
        "skew": np.einsum("kir,kir->ki", c1, c2),
        "cc": np.einsum("kir,kjr->kij", c1, c1),
        "cs": np.einsum("kir,kjr->kij", c1, c2),
        "sc": np.einsum("kir,kjr->kij", c2, c1),
        "ss": np.einsum("kir,kjr->kij", c2, c2),
    }


def constraint_coeffs(m: OrthoMap) -> ConstraintReport:
    """Classify the blocks of an orthogonal map and measure constraint residuals."""
    n = m.n
    prod = pair_products(m.matrix)
    # only i != j cross terms participate in the second constraint set
    mask = np.broadcast_to(~np.eye(n, dtype=bool), (n, n, n))

    scale_residual = float(np.max(np.abs(prod["col1norm2"] - prod["col2norm2"])))
    skew_residual = float(np.max(np.abs(prod["skew"])))
    if n > 1:
        cross_sym = np.abs(prod["cc"] - prod["ss"])[mask]
        cross_skew = np.abs(prod["cs"] + prod["sc"])[mask]
        cross_sym_residual = float(np.max(cross_sym))
        cross_skew_residual = float(np.max(cross_skew))
    else:
        cross_sym_residual = 0.0
        cross_skew_residual = 0.0

    t = _blocks(m.matrix)
    scales = np.sqrt(0.5 * (prod["col1norm2"] + prod["col2norm2"]))
    rot_res = np.maximum(np.abs(t[..., 1, 1] - t[..., 0, 0]), np.abs(t[..., 0, 1] + t[..., 1, 0]))
    ref_res = np.maximum(np.abs(t[..., 1, 1] + t[..., 0, 0]), np.abs(t[..., 0, 1] - t[..., 1, 0]))
    types = np.where(scales < ZERO_BLOCK, "zero", np.where(rot_res <= ref_res, "rotation", "reflection"))

    nonzero = types[types != "zero"]
    homogeneous = bool(nonzero.size == 0 or np.all(nonzero == nonzero[0]))
    residual_ok = max(scale_residual, skew_residual, cross_sym_residual, cross_skew_residual) < ORTHO_TOL
    sigma: int | None = None
    if homogeneous and residual_ok and nonzero.size:
        sigma = 1 if nonzero[0] == "rotation" else -1
    return ConstraintReport(
        scale_residual=scale_residual,
        skew_residual=skew_residual,
        cross_sym_residual=cross_sym_residual,
        cross_skew_residual=cross_skew_residual,
        block_types=types,
        homogeneous=homogeneous,
        sigma=sigma,
        block_scales=scales,
    )


def gram_via_blocks(m: OrthoMap) -> np.ndarray:
    """Hermitian Gram matrix assembled from block column products.

    Entry (i, j) sums cc[k, i, j] - 1j * cs[k, i, j] over k; for the embedding
    of a unitary U this reproduces U^dagger U.
    """
    prod = pair_products(m.matrix)
    return np.sum(prod["cc"] - 1j * prod["cs"], axis=0)


def apply_ortho(m: OrthoMap, q: np.ndarray) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    if q.shape != (m.matrix.shape[0],):
        raise DomainError("dimension mismatch between map and vector")
    return m.matrix @ q


def predicted_probs(m: OrthoMap, state: QuantumState) -> np.ndarray:
    """Observable outcome probabilities after the map, by direct expansion.

    Evaluates the explicit trigonometric expansion of P'_k in terms of the
    matrix entries, the P_i and the chi_i.  This is an independent code path
    from apply-the-matrix-then-square and the two must agree to 1e-12.
    """
    if state.n != m.n:
        raise DomainError("dimension mismatch between map and state")
    mat = m.matrix
    n = m.n
    c = np.cos(state.phases)
    s = np.sin(state.phases)
    p = state.probs
    # diagonal part: per (k, i), the squared response of block (k, i)
    t = _blocks(mat)
    top = t[..., 0, 0] * c + t[..., 0, 1] * s    # (N, N) rows k, cols i
    bot = t[..., 1, 0] * c + t[..., 1, 1] * s
    diag = (top * top + bot * bot) @ p
    if n == 1:
        return diag / diag.sum()
    # cross part over unordered pairs i < j
    prod = pair_products(mat)
    iu, ju = np.triu_indices(n, k=1)
    amp = np.sqrt(p[iu] * p[ju])
    cross_terms = (
        prod["cc"][:, iu, ju] * (c[iu] * c[ju])
        + prod["cs"][:, iu, ju] * (c[iu] * s[ju])
        + prod["sc"][:, iu, ju] * (s[iu] * c[ju])
        + prod["ss"][:, iu, ju] * (s[iu] * s[ju])
    )
    out = diag + 2.0 * cross_terms @ amp
    return out / out.sum()


def probs_by_embedding(m: OrthoMap, state: QuantumState) -> np.ndarray:
    """Reference path: rotate the q embedding and square pairwise."""
    q2 = np.square(apply_ortho(m, to_q_embedding(state)))
    p = q2[0::2] + q2[1::2]
    return p / p.sum()


@dataclass(frozen=True)
class PhaseShiftCheck:
    """Outcome of the phase-shift invariance check, with a concrete witness."""

    passed: bool
    max_deviation: float
    witness_state: QuantumState | None
    witness_shift: float | None
    witness_outcome: int | None


def check_phase_shift_invariance(
    m: OrthoMap,
    trials: int = 10,
    rng: np.random.Generator | None = None,
    tol: float = 1e-12,
) -> PhaseShiftCheck:
    """Test whether adding a constant to all phases leaves P' unchanged.

    Samples random states and shifts, and additionally probes the two
    decisive special families: a single certain outcome with equal phases,
    and two outcomes at probability one half.
    """
    if trials < 10:
        raise DomainError("at least 10 random trials are required")
    rng = np.random.default_rng(0) if rng is None else rng
    n = m.n

    candidates: list[tuple[QuantumState, float]] = []
    for _ in range(trials):
        candidates.append((sample_state_prior(n, rng), float(rng.uniform(0.0, 2.0 * np.pi))))
    for i in range(n):
        p = np.zeros(n)
        p[i] = 1.0
        common = float(rng.uniform(0.0, 2.0 * np.pi))
        candidates.append((QuantumState(p, np.full(n, common)), float(rng.uniform(0.0, 2.0 * np.pi))))
    for i in range(n):
        for j in range(i + 1, n):
            p = np.zeros(n)
            p[i] = p[j] = 0.5
            candidates.append(
                (QuantumState(p, rng.uniform(0.0, 2.0 * np.pi, size=n)),
                 float(rng.uniform(0.0, 2.0 * np.pi)))
            )

    worst = 0.0
    witness: tuple[QuantumState, float, int] | None = None
    for state, shift in candidates:
        base = predicted_probs(m, state)
        shifted = predicted_probs(m, QuantumState(state.probs, state.phases + shift))
        dev = np.abs(shifted - base)
        k = int(np.argmax(dev))
        if dev[k] > worst:
            worst = float(dev[k])
            witness = (state, shift, k)
    passed = worst < tol
    if passed or witness is None:
        return PhaseShiftCheck(passed, worst, None, None, None)
    return PhaseShiftCheck(passed, worst, witness[0], witness[1], witness[2])


def embed_complex(c: ComplexMap) -> OrthoMap:
    """Real 2N x 2N embedding of a unitary or antiunitary map.

    Block (i, j) is [[Re U_ij, -sigma Im U_ij], [Im U_ij, sigma Re U_ij]].
    """
    u = c.matrix
    n = c.n
    out = np.empty((2 * n, 2 * n))
    out[0::2, 0::2] = u.real
    out[0::2, 1::2] = -c.sigma * u.imag
    out[1::2, 0::2] = u.imag
    out[1::2, 1::2] = c.sigma * u.real
    return OrthoMap(out)


def recast_to_complex(m: OrthoMap, tol: float = ORTHO_TOL) -> ComplexMap:
    """Read a unitary or antiunitary map out of a constrained orthogonal map.

    Raises NotRepresentableError when the block constraints are violated or
    the block types are inhomogeneous.
    """
    report = constraint_coeffs(m)
    if not report.homogeneous or report.max_residual() > tol or report.sigma is None:
        raise NotRepresentableError(
            "orthogonal map is not the embedding of a unitary or antiunitary map "
            f"(max residual {report.max_residual():.3e}, homogeneous={report.homogeneous})"
        )
    u = m.matrix[0::2, 0::2] + 1j * m.matrix[1::2, 0::2]
    return ComplexMap(u, report.sigma)


def sigma_path_class(path: list[ComplexMap]) -> int:
    """Common sigma of a path of maps; mixing the two classes is an error."""
    if not path:
        raise DomainError("path must be nonempty")
    sigmas = {c.sigma for c in path}
    if len(sigmas) > 1:
        raise SigmaDiscontinuityError(
            "path mixes unitary and antiunitary maps; no continuous deformation connects them"
        )
    return path[0].sigma


def haar_unitary(n: int, rng: np.random.Generator) -> ComplexMap:
    """Haar-distributed unitary via QR of a complex Gaussian matrix."""
    if n < 1:
        raise DomainError("dimension must be positive")
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    q = q * (d / np.abs(d))
    return ComplexMap(q, 1)


def haar_antiunitary(n: int, rng: np.random.Generator) -> ComplexMap:
    """Haar unitary part composed with complex conjugation."""
    return ComplexMap(haar_unitary(n, rng).matrix, -1)


def haar_orthogonal(dim: int, rng: np.random.Generator) -> OrthoMap:
    """Haar-distributed orthogonal matrix via QR of a real Gaussian matrix."""
    if dim < 2 or dim % 2 != 0:
        raise DomainError("q-embedding maps need an even dimension of at least 2")
    z = rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    q = q * np.sign(np.diagonal(r))
    return OrthoMap(q)


@dataclass(frozen=True)
class MeasurePreservationResult:
    projection_pvalue: float   # worst Bonferroni-adjusted KS p over random projections
    energy_pvalue: float       # permutation p-value of the energy two-sample statistic
    samples: int

    @property
    def passed(self) -> bool:
        return self.projection_pvalue > 0.01 and self.energy_pvalue > 0.01


def _energy_statistic(d: np.ndarray, idx_a: np.ndarray, idx_b: np.ndarray) -> float:
    ab = d[np.ix_(idx_a, idx_b)].mean()
    aa = d[np.ix_(idx_a, idx_a)].mean()
    bb = d[np.ix_(idx_b, idx_b)].mean()
    return 2.0 * ab - aa - bb


def measure_preservation_check(
    m: OrthoMap,
    samples: int,
    rng: np.random.Generator,
    projections: int = 8,
    energy_cap: int = 512,
    permutations: int = 199,
) -> MeasurePreservationResult:
    """Compare mapped uniform sphere samples against fresh uniform samples.

    Orthogonal maps have unit Jacobian and must leave the uniform law on the
    sphere unchanged.  Two two-sample tests are run: KS on random 1-D
    projections (all samples) and an energy-distance permutation test on a
    subsample capped at energy_cap points per group.
    """
    from scipy.stats import ks_2samp

    dim = m.matrix.shape[0]
    x = sample_uniform_sphere(dim, rng, size=samples)
    y = (m.matrix @ x.T).T
    z = sample_uniform_sphere(dim, rng, size=samples)

    worst_p = 1.0
    for _ in range(projections):
        u = sample_uniform_sphere(dim, rng)
        p = ks_2samp(y @ u, z @ u).pvalue
        worst_p = min(worst_p, p * projections)  # Bonferroni
    worst_p = min(worst_p, 1.0)

    k = min(energy_cap, samples)
    pool = np.vstack([y[:k], z[:k]])
    d = np.linalg.norm(pool[:, None, :] - pool[None, :, :], axis=-1)
    observed = _energy_statistic(d, np.arange(k), np.arange(k, 2 * k))
    count = 0
    for _ in range(permutations):
        perm = rng.permutation(2 * k)
        if _energy_statistic(d, perm[:k], perm[k:]) >= observed:
            count += 1
    energy_p = (count + 1) / (permutations + 1)
    return MeasurePreservationResult(float(worst_p), float(energy_p), samples)
