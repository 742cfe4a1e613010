"""Strain-minimising hyperbolic embedding (hydra).

The pipeline builds ``A = cosh(sqrt(kappa) * D)``, extracts the leading
eigenpair and the ``d`` trailing eigenpairs of ``A``, assembles hyperboloid
coordinates from them and projects the result into the Poincare ball.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy.linalg import eigh
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from .geometry import check_curvature, lorentz_gram, origin_direction

logger = logging.getLogger(__name__)

COSH_ARGUMENT_LIMIT = 700.0
DENSE_SOLVER_MAX_N = 512
ITERATIVE_TOL = 1e-10


class EmbeddingError(ValueError):
    """Invalid input to, or failure of, the embedding pipeline."""


class EigensolverError(EmbeddingError):
    """The iterative eigensolver did not converge."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


def as_distance_matrix(D, tol: float = 1e-12) -> np.ndarray:
    """Validate ``D`` as a symmetric, nonnegative matrix with zero diagonal."""
    D = np.array(D, dtype=float)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise EmbeddingError(f"distance matrix must be square, got shape {D.shape}")
    if D.shape[0] < 2:
        raise EmbeddingError("need at least two objects")
    if not np.all(np.isfinite(D)):
        raise EmbeddingError("distance matrix contains non-finite entries")
    if np.any(D < 0):
        raise EmbeddingError("distance matrix contains negative entries")
    if np.any(np.diag(D) != 0):
        raise EmbeddingError("distance matrix must have a zero diagonal")
    scale = max(1.0, float(np.max(D)))
    if np.max(np.abs(D - D.T)) > tol * scale:
        raise EmbeddingError("distance matrix is not symmetric")
    return D


def read_distance_csv(path) -> np.ndarray:
    """Load a headerless ``n x n`` CSV distance matrix."""
    D = np.loadtxt(path, delimiter=",", ndmin=2)
    return as_distance_matrix(D)


def check_dim(d: int, n: int) -> int:
    if int(d) != d or not 1 <= d <= n - 1:
        raise EmbeddingError(f"embedding dimension must satisfy 1 <= d <= n - 1 = {n - 1}, got {d}")
    return int(d)


def build_cosh_matrix(D, kappa: float = 1.0) -> np.ndarray:
    """Entrywise ``cosh(sqrt(kappa) * d_ij)``.

    Raises
    ------
    EmbeddingError
        If ``sqrt(kappa) * d_ij`` exceeds 700 anywhere; ``cosh`` would then
        overflow double precision.
    """
    kappa = check_curvature(kappa)
    D = np.asarray(D, dtype=float)
    scaled = np.sqrt(kappa) * D
    worst = np.unravel_index(np.argmax(scaled), scaled.shape)
    if scaled[worst] > COSH_ARGUMENT_LIMIT:
        i, j = worst
        raise EmbeddingError(
            f"sqrt(kappa) * d[{i},{j}] = {scaled[worst]:.6g} exceeds {COSH_ARGUMENT_LIMIT:g}; "
            "cosh would overflow. Use a smaller curvature parameter or rescale D."
        )
    return np.cosh(scaled)


@dataclass(frozen=True)
class EigenSystem:
    """Leading eigenpair and the ``d`` trailing eigenpairs of a symmetric matrix.

    ``bottom_values`` are in descending order, so the last entry is the
    smallest eigenvalue; ``bottom_vectors`` holds matching columns.
    """

    top_value: float
    top_vector: np.ndarray
    bottom_values: np.ndarray
    bottom_vectors: np.ndarray
    solver: str = "dense"

    @property
    def dim(self) -> int:
        return self.bottom_values.shape[0]


def _normalize_signs(top_vector, bottom_vectors):
    top_vector = top_vector * np.sign(top_vector[np.argmax(np.abs(top_vector))])
    bottom_vectors = bottom_vectors.copy()
    for j in range(bottom_vectors.shape[1]):
        v = bottom_vectors[:, j]
        nonzero = np.flatnonzero(np.abs(v) > 1e-12)
        if nonzero.size and v[nonzero[0]] < 0:
            bottom_vectors[:, j] = -v
    return top_vector, bottom_vectors


def _dense(A, d):
    n = A.shape[0]
    w, V = eigh(A)
    # eigh is ascending: the d smallest come first, the largest last
    bottom_values = w[:d][::-1]
    bottom_vectors = V[:, :d][:, ::-1]
    return w[n - 1], V[:, n - 1], bottom_values, bottom_vectors


def _iterative(A, d):
    n = A.shape[0]
    maxiter = 10 * n
    try:
        top_w, top_V = eigsh(A, k=1, which="LA", tol=ITERATIVE_TOL, maxiter=maxiter,
                             v0=np.ones(n))
        # the d largest eigenpairs of -A are the d smallest of A
        v0 = np.random.default_rng(0).uniform(0.5, 1.5, size=n)
        neg_w, neg_V = eigsh(-A, k=d, which="LA", tol=ITERATIVE_TOL, maxiter=maxiter, v0=v0)
    except ArpackNoConvergence as exc:
        residuals = None
        if exc.eigenvalues is not None and len(exc.eigenvalues):
            residuals = [
                float(np.linalg.norm(A @ v - lam * v))
                for lam, v in zip(exc.eigenvalues, exc.eigenvectors.T)
            ]
        raise EigensolverError(
            f"iterative eigensolver did not converge in {maxiter} iterations "
            f"(residual norms of converged pairs: {residuals})",
            residuals=residuals,
        ) from exc
    order = np.argsort(neg_w)  # ascending in -A -> descending in A
    bottom_values = -neg_w[order]
    bottom_vectors = neg_V[:, order]
    return float(top_w[0]), top_V[:, 0], bottom_values, bottom_vectors


def eigendecompose_reduced(A, d: int, solver: str = "auto") -> EigenSystem:
    """Largest eigenpair and ``d`` smallest eigenpairs of symmetric ``A``.

    Parameters
    ----------
    A : (n, n) array
        Symmetric matrix, typically the output of :func:`build_cosh_matrix`.
    d : int
        Number of trailing eigenpairs, ``1 <= d <= n - 1``.
    solver : {"auto", "dense", "iterative"}
        ``"auto"`` uses a dense decomposition for ``n <= 512`` and the
        Lanczos (ARPACK) solver above that.

    Returns
    -------
    EigenSystem
        With the top eigenvector sign-normalised so that its entry of largest
        magnitude is positive, and each trailing vector so that its first
        nonzero entry is positive.
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    d = check_dim(d, n)
    if solver == "auto":
        solver = "dense" if n <= DENSE_SOLVER_MAX_N else "iterative"
    if solver == "dense":
        parts = _dense(A, d)
    elif solver == "iterative":
        if d + 1 >= n:
            # ARPACK needs k < n; such tiny problems are dense anyway
            parts = _dense(A, d)
        else:
            parts = _iterative(A, d)
    else:
        raise EmbeddingError(f"unknown solver {solver!r}")
    top_value, top_vector, bottom_values, bottom_vectors = parts
    top_vector, bottom_vectors = _normalize_signs(top_vector, bottom_vectors)
    return EigenSystem(float(top_value), top_vector, np.asarray(bottom_values),
                       bottom_vectors, solver=solver)


@dataclass(frozen=True)
class HyperboloidConfig:
    """Coordinate matrix ``X`` (``n x (d + 1)``) in positive Lorentz space."""

    coords: np.ndarray
    kappa: float = 1.0

    @property
    def dim(self) -> int:
        return self.coords.shape[1] - 1

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    def gram(self) -> np.ndarray:
        return lorentz_gram(self.coords)


def assemble_coordinates(E: EigenSystem, d: Optional[int] = None, kappa: float = 1.0) -> HyperboloidConfig:
    """Stack ``sqrt(l1) q1`` with ``sqrt((-l_k)^+) q_k`` for the trailing pairs.

    Columns belonging to nonnegative trailing eigenvalues come out as zero.
    """
    d = E.dim if d is None else d
    if d != E.dim:
        raise EmbeddingError(f"eigensystem carries {E.dim} trailing pairs, asked for d={d}")
    if not E.top_value > 0:
        raise EmbeddingError("leading eigenvalue must be positive")
    # columns ordered from the (n-d+1)-th to the n-th eigenvalue
    scales = np.sqrt(np.maximum(-E.bottom_values, 0.0))
    X = np.column_stack([np.sqrt(E.top_value) * E.top_vector, E.bottom_vectors * scales])
    return HyperboloidConfig(X, check_curvature(kappa))


@dataclass(frozen=True)
class PoincareEmbedding:
    """Radial/directional coordinates of ``n`` points in the Poincare ball."""

    radii: np.ndarray
    directions: np.ndarray
    kappa: float = 1.0
    degenerate: np.ndarray = field(default=None)

    def __post_init__(self):
        radii = np.asarray(self.radii, dtype=float)
        directions = np.asarray(self.directions, dtype=float)
        if directions.ndim != 2 or directions.shape[0] != radii.shape[0]:
            raise EmbeddingError("radii and directions disagree in length")
        if np.any(radii < 0) or np.any(radii >= 1):
            raise EmbeddingError("radii must lie in [0, 1)")
        object.__setattr__(self, "radii", radii)
        object.__setattr__(self, "directions", directions)
        if self.degenerate is None:
            object.__setattr__(self, "degenerate", np.zeros(radii.shape[0], dtype=bool))

    @property
    def n(self) -> int:
        return self.radii.shape[0]

    @property
    def dim(self) -> int:
        return self.directions.shape[1]

    @property
    def theta(self) -> np.ndarray:
        """Angles in ``[0, 2*pi)``; only defined in dimension 2."""
        if self.dim != 2:
            raise EmbeddingError("angles are only defined in dimension 2")
        return np.arctan2(self.directions[:, 1], self.directions[:, 0]) % (2 * np.pi)

    @property
    def cartesian(self) -> np.ndarray:
        return self.radii[:, None] * self.directions

    @classmethod
    def from_angles(cls, radii, theta, kappa: float = 1.0) -> "PoincareEmbedding":
        theta = np.asarray(theta, dtype=float)
        return cls(radii, np.column_stack([np.cos(theta), np.sin(theta)]), kappa)

    @classmethod
    def from_cartesian(cls, Z, kappa: float = 1.0) -> "PoincareEmbedding":
        Z = np.asarray(Z, dtype=float)
        radii = np.linalg.norm(Z, axis=1)
        zero = radii == 0
        directions = np.where(zero[:, None], origin_direction(Z.shape[1]),
                              Z / np.where(zero, 1.0, radii)[:, None])
        return cls(radii, directions, kappa)


def directional_projection(X: HyperboloidConfig):
    """Unit directions of the spatial parts of the rows of ``X``.

    Returns the ``n x d`` direction array and a boolean mask of rows whose
    spatial part vanished; those get the direction ``(1, 0, ..., 0)``.
    """
    spatial = X.coords[:, 1:]
    norms = np.linalg.norm(spatial, axis=1)
    degenerate = norms == 0
    directions = np.where(degenerate[:, None], origin_direction(spatial.shape[1]),
                          spatial / np.where(degenerate, 1.0, norms)[:, None])
    if np.any(degenerate):
        logger.warning("%d point(s) with zero spatial part; using direction (1, 0, ...)",
                       int(degenerate.sum()))
    return directions, degenerate


def radial_projection(X: HyperboloidConfig) -> np.ndarray:
    """Radii ``sqrt((x_i1 - x_min) / (x_i1 + x_min))``, ``x_min = min(1, x_11, ..., x_n1)``."""
    x1 = X.coords[:, 0]
    if not np.all(x1 > 0):
        raise EmbeddingError("first column of X must be strictly positive")
    x_min = min(1.0, float(np.min(x1)))
    return np.sqrt((x1 - x_min) / (x1 + x_min))


@dataclass
class HydraResult:
    config: HyperboloidConfig
    embedding: PoincareEmbedding
    eigensystem: EigenSystem
    warnings: List[str] = field(default_factory=list)


def hydra(D, d: int = 2, kappa: float = 1.0, solver: str = "auto") -> HydraResult:
    """Embed the distance matrix ``D`` into ``d``-dimensional hyperbolic space.

    Parameters
    ----------
    D : (n, n) array
        Symmetric nonnegative dissimilarities with zero diagonal.
    d : int
        Embedding dimension, ``1 <= d <= n - 1``.
    kappa : float
        Curvature parameter; the space has curvature ``-kappa``.
    solver : str
        Passed to :func:`eigendecompose_reduced`.

    Returns
    -------
    HydraResult
        The strain-optimal coordinate matrix, its Poincare-ball projection and
        the eigensystem it was built from.
    """
    D = as_distance_matrix(D)
    n = D.shape[0]
    d = check_dim(d, n)
    kappa = check_curvature(kappa)
    A = build_cosh_matrix(D, kappa)
    E = eigendecompose_reduced(A, d, solver=solver)
    X = assemble_coordinates(E, d, kappa)
    directions, degenerate = directional_projection(X)
    radii = radial_projection(X)
    warnings = []
    if np.any(degenerate):
        idx = np.flatnonzero(degenerate).tolist()
        warnings.append(f"zero spatial part for points {idx}; convention direction used")
    emb = PoincareEmbedding(radii, directions, kappa, degenerate)
    return HydraResult(X, emb, E, warnings)


def strain(X, D, kappa: float = 1.0) -> float:
    """Squared strain ``sum_{i,j} (cosh(sqrt(kappa) d_ij) - x_i o x_j)^2`` over ordered pairs.

    ``X`` is a :class:`HyperboloidConfig` or an ``n x (d + 1)`` array.
    """
    coords = X.coords if isinstance(X, HyperboloidConfig) else np.asarray(X, dtype=float)
    D = np.asarray(D, dtype=float)
    if coords.shape[0] != D.shape[0]:
        raise EmbeddingError(f"dimension mismatch: {coords.shape[0]} points vs {D.shape[0]}x{D.shape[0]} D")
    R = build_cosh_matrix(D, kappa) - lorentz_gram(coords)
    return float(np.sum(R * R))


def optimal_strain_value(eigenvalues, d: int) -> float:
    """Minimum strain attainable for a cosh matrix with the given spectrum.

    ``eigenvalues`` must be sorted in descending order.  The value is the sum
    of squares of the eigenvalues with index ``2 .. n-d`` plus the squared
    positive parts of the last ``d``.
    """
    lam = np.asarray(eigenvalues, dtype=float)
    n = lam.shape[0]
    if not 1 <= d <= n - 1:
        raise EmbeddingError(f"d must satisfy 1 <= d <= n - 1 = {n - 1}, got {d}")
    if np.any(np.diff(lam) > 0):
        raise EmbeddingError("eigenvalues must be sorted in descending order")
    middle = lam[1:n - d]
    tail = np.maximum(lam[n - d:], 0.0)
    return float(np.sum(middle ** 2) + np.sum(tail ** 2))
