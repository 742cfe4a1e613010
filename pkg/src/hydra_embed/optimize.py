"""Direct stress minimisation and the equiangular adjustment.

Stress is minimised over an unconstrained parametrisation of the
hyperboloid: each point is described by its spatial part ``y`` and lifted to
``x = (sqrt(1 + |y|^2), y)``, so the constraint ``x o x = 1`` always holds.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy.optimize import minimize

from .embed import (
    EmbeddingError,
    PoincareEmbedding,
    as_distance_matrix,
    check_dim,
    hydra,
)
from .geometry import check_curvature, pairwise_hyperbolic_distances, pairwise_poincare_distances

logger = logging.getLogger(__name__)

DENOMINATOR_FLOOR = 1e-9


@dataclass(frozen=True)
class OptimizerSettings:
    max_iterations: int = 1000
    gradient_tolerance: float = 1e-8
    history_size: int = 10
    seed: int = 0
    # relative decrease below which L-BFGS-B stops early
    objective_tolerance: float = 1e-12

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.gradient_tolerance > 0:
            raise ValueError("gradient_tolerance must be positive")
        if self.history_size < 1:
            raise ValueError("history_size must be >= 1")


def lift_params(Y) -> np.ndarray:
    """Hyperboloid rows ``(sqrt(1 + |y|^2), y)`` for the rows of ``Y``."""
    Y = np.asarray(Y, dtype=float)
    return np.column_stack([np.sqrt(1.0 + np.sum(Y * Y, axis=1)), Y])


def params_from_embedding(emb: PoincareEmbedding) -> np.ndarray:
    r = emb.radii
    return (2.0 * r / (1.0 - r * r))[:, None] * emb.directions


def embedding_from_params(Y, kappa: float = 1.0) -> PoincareEmbedding:
    Y = np.asarray(Y, dtype=float)
    x1 = np.sqrt(1.0 + np.sum(Y * Y, axis=1))
    return PoincareEmbedding.from_cartesian(Y / (1.0 + x1)[:, None], kappa)


def random_params(n: int, d: int, seed) -> np.ndarray:
    """Spatial parameters drawn uniformly from ``[-1, 1]``."""
    return np.random.default_rng(seed).uniform(-1.0, 1.0, size=(n, d))


def stress(points, D, kappa: float = 1.0) -> float:
    """Stress ``sqrt(sum_{i,j} (d_ij - d_H(x_i, x_j))^2)`` over ordered pairs.

    ``points`` may be an ``n x (d + 1)`` array of hyperboloid rows or a
    :class:`PoincareEmbedding`.
    """
    D = np.asarray(D, dtype=float)
    if isinstance(points, PoincareEmbedding):
        H = pairwise_poincare_distances(points.cartesian, kappa)
    else:
        points = np.asarray(points, dtype=float)
        if points.ndim != 2:
            raise EmbeddingError("points must be an n x (d + 1) array")
        H = pairwise_hyperbolic_distances(points, kappa)
    if H.shape != D.shape:
        raise EmbeddingError(f"dimension mismatch: {H.shape[0]} points vs {D.shape[0]}x{D.shape[0]} D")
    R = D - H
    return float(np.sqrt(np.sum(R * R)))


def _objective(Y, D, kappa):
    # squared stress and its gradient with respect to Y
    n, d = Y.shape
    x1 = np.sqrt(1.0 + np.sum(Y * Y, axis=1))
    G = np.outer(x1, x1) - Y @ Y.T
    G = np.maximum(G, 1.0)
    np.fill_diagonal(G, 1.0)
    sk = np.sqrt(kappa)
    H = np.arccosh(G) / sk
    R = D - H
    f = float(np.sum(R * R))
    denom = np.maximum(np.sqrt((G - 1.0) * (G + 1.0)), DENOMINATOR_FLOOR)
    W = R / denom
    np.fill_diagonal(W, 0.0)
    # d(x_k o x_j)/d y_k = (x_j1 / x_k1) y_k - y_j
    grad = (-4.0 / sk) * (((W @ x1) / x1)[:, None] * Y - W @ Y)
    return f, grad


def stress_gradient(Y, D, kappa: float = 1.0) -> np.ndarray:
    """Gradient of squared stress with respect to the spatial parameters ``Y``."""
    Y = np.asarray(Y, dtype=float)
    D = np.asarray(D, dtype=float)
    if Y.shape[0] != D.shape[0]:
        raise EmbeddingError(f"dimension mismatch: {Y.shape[0]} points vs {D.shape[0]}x{D.shape[0]} D")
    return _objective(Y, D, check_curvature(kappa))[1]


def stress_of_params(Y, D, kappa: float = 1.0) -> float:
    """Stress of the configuration parametrised by ``Y``."""
    return float(np.sqrt(_objective(np.asarray(Y, dtype=float), np.asarray(D, dtype=float),
                                    check_curvature(kappa))[0]))


@dataclass
class StressFit:
    params: np.ndarray
    stress: float
    initial_stress: float
    converged: bool
    iterations: int
    message: str = ""


def minimize_stress(initial, D, kappa: float = 1.0,
                    opts: Optional[OptimizerSettings] = None) -> StressFit:
    """Refine ``initial`` (an ``n x d`` parameter array) by L-BFGS on squared stress.

    The best iterate seen during the run is returned, so the result never has
    a higher stress than the starting point.
    """
    opts = opts or OptimizerSettings()
    kappa = check_curvature(kappa)
    D = np.asarray(D, dtype=float)
    Y0 = np.array(initial, dtype=float)
    if Y0.ndim != 2 or Y0.shape[0] != D.shape[0]:
        raise EmbeddingError(f"initial parameters must be {D.shape[0]} x d, got {Y0.shape}")
    shape = Y0.shape
    f0, _ = _objective(Y0, D, kappa)
    best = {"f": f0, "y": Y0.ravel().copy()}
    if f0 == 0.0:
        return StressFit(Y0, 0.0, 0.0, True, 0, "initial configuration is exact")

    def fun(flat):
        f, g = _objective(flat.reshape(shape), D, kappa)
        if f < best["f"]:
            best["f"] = f
            best["y"] = flat.copy()
        return f, g.ravel()

    res = minimize(
        fun,
        Y0.ravel(),
        jac=True,
        method="L-BFGS-B",
        options={
            "maxiter": opts.max_iterations,
            "maxcor": opts.history_size,
            "gtol": opts.gradient_tolerance,
            "ftol": opts.objective_tolerance,
        },
    )
    if not res.success:
        logger.info("stress minimisation stopped early: %s", res.message)
    return StressFit(
        params=best["y"].reshape(shape),
        stress=float(np.sqrt(best["f"])),
        initial_stress=float(np.sqrt(f0)),
        converged=bool(res.success),
        iterations=int(res.nit),
        message=str(res.message),
    )


def equiangular_adjust(emb: PoincareEmbedding, lam: float = 0.5) -> PoincareEmbedding:
    """Pull angles toward a regular grid ordered by angular rank.

    ``lam = 0`` leaves the angles unchanged and ``lam = 1`` replaces them by
    ``0, 2*pi/n, ..., 2*pi*(n-1)/n`` in angular order (ties by index).
    Radii are untouched.
    """
    if emb.dim != 2:
        raise EmbeddingError("equiangular adjustment requires dimension 2")
    if not 0.0 <= lam <= 1.0:
        raise EmbeddingError(f"adjustment parameter must lie in [0, 1], got {lam}")
    theta = emb.theta
    n = theta.shape[0]
    rank = np.empty(n, dtype=int)
    rank[np.argsort(theta, kind="stable")] = np.arange(n)
    grid = rank * (2 * np.pi / n)
    adjusted = (1.0 - lam) * theta + lam * grid
    out = PoincareEmbedding.from_angles(emb.radii, adjusted, emb.kappa)
    return PoincareEmbedding(emb.radii.copy(), out.directions, emb.kappa, emb.degenerate)


@dataclass
class HydraPlusResult:
    embedding: PoincareEmbedding
    initial_embedding: PoincareEmbedding
    fit: StressFit
    warnings: List[str] = field(default_factory=list)

    @property
    def stress(self) -> float:
        return self.fit.stress


def hydra_plus(D, d: int = 2, kappa: float = 1.0, opts: Optional[OptimizerSettings] = None,
               equi_lambda: float = 0.5, solver: str = "auto") -> HydraPlusResult:
    """hydra, equiangular adjustment (``d == 2`` only), then stress minimisation."""
    D = as_distance_matrix(D)
    base = hydra(D, d, kappa, solver=solver)
    start = base.embedding
    if d == 2 and equi_lambda > 0:
        start = equiangular_adjust(start, equi_lambda)
    fit = minimize_stress(params_from_embedding(start), D, kappa, opts)
    return HydraPlusResult(embedding_from_params(fit.params, kappa), start, fit, list(base.warnings))


def random_restarts(D, d: int = 2, kappa: float = 1.0, opts: Optional[OptimizerSettings] = None,
                    repeats: int = 20) -> List[StressFit]:
    """Stress minimisation from ``repeats`` random starts.

    Start ``k`` uses a seed spawned from ``opts.seed``, so runs are
    reproducible and independent of each other.
    """
    opts = opts or OptimizerSettings()
    D = as_distance_matrix(D)
    n = D.shape[0]
    d = check_dim(d, n)
    seeds = np.random.SeedSequence(opts.seed).spawn(repeats)
    return [minimize_stress(random_params(n, d, s), D, kappa, opts) for s in seeds]
