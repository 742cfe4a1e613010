"""Classical multidimensional scaling, the Euclidean counterpart of hydra."""

import numpy as np
from scipy.linalg import eigh

from .embed import as_distance_matrix, check_dim


def double_center(D):
    """``-1/2 * C D C`` with the centering matrix ``C = I - 1/n``."""
    D = np.asarray(D, dtype=float)
    row = D.mean(axis=1, keepdims=True)
    col = D.mean(axis=0, keepdims=True)
    return -0.5 * (D - row - col + D.mean())


def classic_mds(D, d=2):
    """Embed ``D`` in ``R^d`` by classical MDS.

    ``D`` holds *squared* dissimilarities; for squared Euclidean distances of
    points in ``R^d`` the points are recovered up to isometry.  Columns for
    non-positive leading eigenvalues are set to zero.

    Returns
    -------
    ndarray, shape (n, d)
        Centred coordinates.
    """
    D = as_distance_matrix(D)
    n = D.shape[0]
    d = check_dim(d, n)
    A = double_center(D)
    w, V = eigh(A, subset_by_index=[n - d, n - 1])
    w, V = w[::-1], V[:, ::-1]
    # first nonzero entry of each eigenvector made positive, for reproducibility
    for j in range(d):
        nz = np.flatnonzero(np.abs(V[:, j]) > 1e-12)
        if nz.size and V[nz[0], j] < 0:
            V[:, j] = -V[:, j]
    X = V * np.sqrt(np.maximum(w, 0.0))
    return X - X.mean(axis=0)


def euclidean_strain(X, D):
    """``||A - X X^T||_F^2`` for the double-centred matrix ``A`` of ``D``."""
    X = np.asarray(X, dtype=float)
    R = double_center(D) - X @ X.T
    return float(np.sum(R * R))
