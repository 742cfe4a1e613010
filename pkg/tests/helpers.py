"""Independent samplers and brute-force oracles shared by the tests."""

import numpy as np


def sample_hyperboloid(rng, n, d, max_radius=3.0):
    """Points on H_d with hyperbolic radius uniform in [0, max_radius]."""
    t = rng.uniform(0.0, max_radius, size=n)
    u = rng.normal(size=(n, d))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    return np.column_stack([np.cosh(t), np.sinh(t)[:, None] * u])


def naive_lorentz(x, y):
    return x[0] * y[0] - sum(a * b for a, b in zip(x[1:], y[1:]))


def naive_distance_matrix(P, kappa=1.0):
    n = len(P)
    D = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i != j:
                D[i, j] = np.arccosh(max(naive_lorentz(P[i], P[j]), 1.0)) / np.sqrt(kappa)
    return D


def naive_stress_squared(Y, D, kappa=1.0):
    """Double-loop squared stress of the parametrisation x = (sqrt(1+|y|^2), y)."""
    n = len(Y)
    pts = [np.concatenate([[np.sqrt(1.0 + y @ y)], y]) for y in Y]
    total = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                h = np.arccosh(max(naive_lorentz(pts[i], pts[j]), 1.0)) / np.sqrt(kappa)
                total += (D[i, j] - h) ** 2
    return total


def central_difference_gradient(f, Y, h=1e-3):
    """Fourth-order central differences of scalar ``f`` at ``Y``."""
    G = np.zeros_like(Y)
    for idx in np.ndindex(*Y.shape):
        def at(step):
            Z = Y.copy()
            Z[idx] += step
            return f(Z)
        G[idx] = (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h)
    return G


def floyd_warshall(n, edges):
    """Cubic all-pairs hop distances by repeated relaxation."""
    D = np.full((n, n), np.inf)
    np.fill_diagonal(D, 0.0)
    for i, j in edges:
        D[i, j] = D[j, i] = 1.0
    for k in range(n):
        D = np.minimum(D, D[:, [k]] + D[[k], :])
    return D


def random_connected_edges(rng, n, extra):
    """Random spanning tree plus ``extra`` random chords."""
    order = rng.permutation(n)
    edges = {tuple(sorted((int(order[k]), int(order[rng.integers(k)])))) for k in range(1, n)}
    for _ in range(extra):
        i, j = rng.integers(n, size=2)
        if i != j:
            edges.add((int(min(i, j)), int(max(i, j))))
    return sorted(edges)


def random_distance_matrix(rng, n, low=0.5, high=3.0):
    D = rng.uniform(low, high, size=(n, n))
    D = np.triu(D, 1)
    return D + D.T


def stencil_step(Y, h=1e-3):
    """Largest step <= ``h`` whose +-2h stencil cannot make two points coincide.

    Stress is not differentiable where two points meet, so the stencil must
    stay on one side of that kink.
    """
    Y = np.asarray(Y, dtype=float)
    if len(Y) < 2:
        return h
    sep = np.linalg.norm(Y[:, None, :] - Y[None, :, :], axis=-1)
    sep = sep[~np.eye(len(Y), dtype=bool)].min()
    return min(h, sep / 8)
