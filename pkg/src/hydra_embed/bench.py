"""Runtime scaling benchmark on synthetic connected graphs."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, List, Sequence

import numpy as np

from .graphio import Graph, shortest_path_matrix


def preferential_attachment_graph(n: int, m: int = 2, seed: int = 0) -> Graph:
    """Seeded preferential-attachment graph; connected by construction.

    Starts from a path on ``m + 1`` nodes; every further node attaches to
    ``m`` distinct existing nodes chosen with probability proportional to
    degree.
    """
    if n < m + 1:
        raise ValueError(f"need n >= m + 1 = {m + 1}, got {n}")
    rng = np.random.default_rng(seed)
    edges = [(k, k + 1) for k in range(m)]
    # each node appears once per incident edge end
    ends = [v for e in edges for v in e]
    for v in range(m + 1, n):
        targets = set()
        while len(targets) < m:
            targets.add(ends[rng.integers(len(ends))])
        for t in sorted(targets):
            edges.append((t, v))
            ends.extend((t, v))
    return Graph.from_edges([str(k) for k in range(n)], edges)


@dataclass
class BenchResult:
    sizes: List[int]
    times: List[float]
    alpha: float
    intercept: float

    def table(self) -> str:
        rows = ["n,wall_time_seconds"]
        rows += [f"{n},{t:.6g}" for n, t in zip(self.sizes, self.times)]
        return "\n".join(rows)


def fit_exponent(sizes: Sequence[int], times: Sequence[float]):
    """Least-squares fit of ``log t = alpha log n + c``, skipping the smallest size."""
    sizes = np.asarray(sizes, dtype=float)
    times = np.asarray(times, dtype=float)
    if sizes.size < 3:
        raise ValueError("need at least 3 sizes (the smallest is excluded from the fit)")
    keep = np.argsort(sizes)[1:]
    alpha, intercept = np.polyfit(np.log(sizes[keep]), np.log(times[keep]), 1)
    return float(alpha), float(intercept)


def run_bench(sizes: Sequence[int], embed: Callable[[np.ndarray], object], seed: int = 0,
              repeats: int = 3) -> BenchResult:
    """Time ``embed(D)`` on one synthetic graph per size.

    Distance computation is not timed.  Each size is run ``repeats`` times
    and the fastest run is kept.
    """
    sizes = [int(n) for n in sizes]
    if len(sizes) < 3:
        raise ValueError("need at least 3 sizes (the smallest is excluded from the fit)")
    times = []
    for k, n in enumerate(sizes):
        D = shortest_path_matrix(preferential_attachment_graph(n, seed=seed + k))
        best = np.inf
        for _ in range(max(1, repeats)):
            t0 = time.perf_counter()
            embed(D)
            best = min(best, time.perf_counter() - t0)
        times.append(best)
    alpha, intercept = fit_exponent(sizes, times)
    return BenchResult(sizes, times, alpha, intercept)
