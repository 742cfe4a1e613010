"""Command-line interface: ``embed``, ``eval``, ``plot`` and ``bench``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import tempfile
import time
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import __version__
from .baseline import classic_mds, euclidean_strain
from .bench import run_bench
from .embed import PoincareEmbedding, as_distance_matrix, hydra, read_distance_csv, strain
from .geometry import lift_cartesian
from .graphio import karate_path, largest_connected_component, load_edge_list, shortest_path_matrix
from .optimize import (
    OptimizerSettings,
    embedding_from_params,
    equiangular_adjust,
    hydra_plus,
    minimize_stress,
    random_params,
    random_restarts,
    stress,
)
from .plot import render_svg, sample_edges

logger = logging.getLogger(__name__)

METHODS = ("hydra", "hydra-equi", "hydra-plus", "mds", "stress-random")
BUILTIN_PREFIX = "builtin:"


class CLIError(Exception):
    pass


@dataclass
class RunConfig:
    method: str = "hydra"
    input_path: str = ""
    input_type: str = "edgelist"
    dim: int = 2
    kappa: float = 1.0
    equi_lambda: float = 0.5
    seed: int = 0
    repeats: int = 20
    largest_component: bool = False
    solver: str = "auto"
    optimizer: OptimizerSettings = field(default_factory=OptimizerSettings)
    out_coords: Optional[str] = None
    out_report: Optional[str] = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise CLIError(f"unknown method {self.method!r}; choose from {', '.join(METHODS)}")
        if self.input_type not in ("edgelist", "distmatrix"):
            raise CLIError(f"unknown input type {self.input_type!r}")
        if not 0.0 <= self.equi_lambda <= 1.0:
            raise CLIError("--equi-lambda must lie in [0, 1]")
        if self.repeats < 1:
            raise CLIError("--repeats must be >= 1")


@dataclass
class RunReport:
    method: str
    n: int
    dim: int
    kappa: float
    strain: float
    stress: float
    wall_time_seconds: float = 0.0
    converged: bool = True
    warnings: List[str] = field(default_factory=list)
    extra: Dict[str, object] = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2) + "\n"


@dataclass
class LoadedInput:
    labels: List[str]
    D: np.ndarray
    adjacency: Optional[tuple] = None


def resolve_path(path: str) -> str:
    if path.startswith(BUILTIN_PREFIX):
        name = path[len(BUILTIN_PREFIX):]
        if name != "karate":
            raise CLIError(f"unknown builtin dataset {name!r} (available: karate)")
        return str(karate_path())
    if not os.path.isfile(path):
        raise CLIError(f"input file not found: {path}")
    return path


def load_input(path: str, input_type: str, largest_component: bool = False) -> LoadedInput:
    path = resolve_path(path)
    if input_type == "distmatrix":
        D = read_distance_csv(path)
        return LoadedInput([str(k) for k in range(D.shape[0])], D)
    G = load_edge_list(path)
    if G.dropped_duplicates or G.dropped_self_loops:
        logger.info("dropped %d duplicate edge(s) and %d self-loop(s)",
                    G.dropped_duplicates, G.dropped_self_loops)
    if largest_component:
        G = largest_connected_component(G)
    return LoadedInput(list(G.labels), shortest_path_matrix(G), G.adjacency)


def mds_target(data: LoadedInput, input_type: str) -> np.ndarray:
    # classic MDS expects squared dissimilarities; graph hop counts are plain distances
    return data.D ** 2 if input_type == "edgelist" else data.D


def euclidean_stress(X, D_sq) -> float:
    X = np.asarray(X, dtype=float)
    diff = X[:, None, :] - X[None, :, :]
    R = np.sqrt(np.asarray(D_sq, dtype=float)) - np.sqrt(np.sum(diff * diff, axis=-1))
    return float(np.sqrt(np.sum(R * R)))


def canonical_embedding(emb: PoincareEmbedding) -> PoincareEmbedding:
    """The embedding exactly as it is stored in a coordinate file."""
    if emb.dim == 2:
        return PoincareEmbedding.from_angles(emb.radii, emb.theta, emb.kappa)
    return emb


def hyperbolic_metrics(emb: PoincareEmbedding, D, kappa: float):
    X = lift_cartesian(emb.cartesian)
    return strain(X, D, kappa), stress(emb, D, kappa)


# -- coordinate files ---------------------------------------------------------

def format_coords(labels: Sequence[str], emb=None, euclidean=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if euclidean is not None:
        X = np.asarray(euclidean, dtype=float)
        w.writerow(["node"] + [f"x{k + 1}" for k in range(X.shape[1])])
        for label, row in zip(labels, X):
            w.writerow([label] + [repr(float(v)) for v in row])
    elif emb.dim == 2:
        w.writerow(["node", "r", "theta"])
        for label, r, t in zip(labels, emb.radii, emb.theta):
            w.writerow([label, repr(float(r)), repr(float(t))])
    else:
        w.writerow(["node", "r"] + [f"u{k + 1}" for k in range(emb.dim)])
        for label, r, u in zip(labels, emb.radii, emb.directions):
            w.writerow([label, repr(float(r))] + [repr(float(v)) for v in u])
    return buf.getvalue()


@dataclass
class CoordFile:
    labels: List[str]
    kind: str  # "polar", "ball" or "euclidean"
    values: np.ndarray

    def embedding(self, kappa: float) -> PoincareEmbedding:
        if self.kind == "polar":
            return PoincareEmbedding.from_angles(self.values[:, 0], self.values[:, 1], kappa)
        if self.kind == "ball":
            return PoincareEmbedding(self.values[:, 0], self.values[:, 1:], kappa)
        raise CLIError("coordinate file holds Euclidean coordinates")


def read_coords(path: str) -> CoordFile:
    if not os.path.isfile(path):
        raise CLIError(f"coordinate file not found: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise CLIError(f"empty coordinate file: {path}")
    header, body = rows[0], rows[1:]
    if header == ["node", "r", "theta"]:
        kind = "polar"
    elif header[:2] == ["node", "r"] and all(h == f"u{k + 1}" for k, h in enumerate(header[2:])):
        kind = "ball"
    elif header[0] == "node" and all(h == f"x{k + 1}" for k, h in enumerate(header[1:])):
        kind = "euclidean"
    else:
        raise CLIError(f"unrecognised coordinate header: {','.join(header)}")
    try:
        values = np.array([[float(v) for v in row[1:]] for row in body], dtype=float)
    except ValueError as exc:
        raise CLIError(f"malformed coordinate file {path}: {exc}") from exc
    return CoordFile([row[0] for row in body], kind, values.reshape(len(body), len(header) - 1))


def write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- commands -------------------------------------------------------------------

def run_embedding(config: RunConfig, data: LoadedInput):
    """Run the configured method; returns the report and coordinate-file text."""
    D = as_distance_matrix(data.D)
    n = D.shape[0]
    kappa, d = config.kappa, config.dim
    extra: Dict[str, object] = {}
    warnings: List[str] = []
    converged = True
    t0 = time.perf_counter()
    if config.method == "mds":
        target = mds_target(data, config.input_type)
        X = classic_mds(target, d)
        elapsed = time.perf_counter() - t0
        text = format_coords(data.labels, euclidean=X)
        report = RunReport("mds", n, d, kappa, euclidean_strain(X, target),
                           euclidean_stress(X, target), elapsed)
        return report, text

    if config.method in ("hydra", "hydra-equi"):
        res = hydra(D, d, kappa, solver=config.solver)
        emb = res.embedding
        warnings += res.warnings
        if config.method == "hydra-equi":
            if d != 2:
                raise CLIError("hydra-equi requires --dim 2")
            emb = equiangular_adjust(emb, config.equi_lambda)
            extra["equi_lambda"] = config.equi_lambda
        extra["hyperboloid_strain"] = strain(res.config, D, kappa)
    elif config.method == "hydra-plus":
        res = hydra_plus(D, d, kappa, config.optimizer, equi_lambda=config.equi_lambda,
                         solver=config.solver)
        emb = res.embedding
        warnings += res.warnings
        converged = res.fit.converged
        extra.update(initial_stress=res.fit.initial_stress, iterations=res.fit.iterations,
                     optimizer_message=res.fit.message,
                     equi_lambda=config.equi_lambda if d == 2 else 0.0)
    else:  # stress-random
        fits = random_restarts(D, d, kappa, config.optimizer, config.repeats)
        values = np.array([f.stress for f in fits])
        best = fits[int(np.argmin(values))]
        emb = embedding_from_params(best.params, kappa)
        converged = all(f.converged for f in fits)
        extra.update(repeats=config.repeats, stress_mean=float(values.mean()),
                     stress_q05=float(np.quantile(values, 0.05)),
                     stress_q95=float(np.quantile(values, 0.95)),
                     stress_runs=values.tolist())
    elapsed = time.perf_counter() - t0
    emb = canonical_embedding(emb)
    st, ss = hyperbolic_metrics(emb, D, kappa)
    report = RunReport(config.method, n, d, kappa, st, ss, elapsed, converged, warnings, extra)
    return report, format_coords(data.labels, emb)


def cmd_embed(config: RunConfig) -> RunReport:
    data = load_input(config.input_path, config.input_type, config.largest_component)
    report, text = run_embedding(config, data)
    if config.out_coords:
        write_atomic(config.out_coords, text)
    if config.out_report:
        write_atomic(config.out_report, report.to_json())
    return report


def align_coords(coords: CoordFile, labels: Sequence[str]) -> np.ndarray:
    """Row permutation putting the coordinate file into ``labels`` order."""
    index = {label: k for k, label in enumerate(coords.labels)}
    if len(index) != len(coords.labels) or set(index) != set(labels):
        missing = sorted(set(labels) - set(index))[:5]
        unknown = sorted(set(index) - set(labels))[:5]
        raise CLIError(f"node set mismatch between coordinates and input "
                       f"(missing: {missing}, unknown: {unknown})")
    return np.array([index[label] for label in labels])


def cmd_eval(coords_path: str, input_path: str, input_type: str = "edgelist",
             kappa: float = 1.0, largest_component: bool = False) -> RunReport:
    coords = read_coords(coords_path)
    data = load_input(input_path, input_type, largest_component)
    order = align_coords(coords, data.labels)
    values = coords.values[order]
    n = len(data.labels)
    if coords.kind == "euclidean":
        target = mds_target(data, input_type)
        return RunReport("eval", n, values.shape[1], kappa, euclidean_strain(values, target),
                         euclidean_stress(values, target))
    emb = CoordFile(data.labels, coords.kind, values).embedding(kappa)
    st, ss = hyperbolic_metrics(emb, data.D, kappa)
    return RunReport("eval", n, emb.dim, kappa, st, ss)


def cmd_plot(coords_path: str, edge_path: Optional[str] = None, seed: int = 0,
             per_node: int = 2) -> str:
    coords = read_coords(coords_path)
    if coords.kind != "polar":
        raise CLIError("plotting requires two-dimensional (node,r,theta) coordinates")
    Z = coords.embedding(1.0).cartesian
    edges = []
    if edge_path:
        G = load_edge_list(resolve_path(edge_path))
        index = {label: k for k, label in enumerate(coords.labels)}
        remap = [index.get(label) for label in G.labels]
        # keep only edges whose endpoints both have coordinates
        adjacency = [[] for _ in coords.labels]
        for i, nbrs in enumerate(G.adjacency):
            if remap[i] is None:
                continue
            adjacency[remap[i]] = [remap[j] for j in nbrs if remap[j] is not None]
        edges = sample_edges(adjacency, per_node=per_node, seed=seed)
    return render_svg(Z, edges, labels=coords.labels)


def bench_method(method: str, dim: int, kappa: float, opts: OptimizerSettings,
                 equi_lambda: float, solver: str):
    if method == "hydra":
        return lambda D: hydra(D, dim, kappa, solver=solver)
    if method == "hydra-equi":
        return lambda D: equiangular_adjust(hydra(D, dim, kappa, solver=solver).embedding,
                                            equi_lambda)
    if method == "hydra-plus":
        return lambda D: hydra_plus(D, dim, kappa, opts, equi_lambda, solver=solver)
    if method == "mds":
        return lambda D: classic_mds(D ** 2, dim)
    if method == "stress-random":
        return lambda D: minimize_stress(random_params(D.shape[0], dim, opts.seed), D, kappa, opts)
    raise CLIError(f"unknown method {method!r}")


# -- argument parsing ---------------------------------------------------------------

def _add_common(p, with_method=True):
    if with_method:
        p.add_argument("--method", choices=METHODS, default="hydra")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--curvature", type=float, default=1.0, help="kappa > 0; curvature is -kappa")
    p.add_argument("--equi-lambda", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iter", type=int, default=1000)
    p.add_argument("--grad-tol", type=float, default=1e-8)
    p.add_argument("--history", type=int, default=10)


def _add_input(p, required=True):
    p.add_argument("--input", required=required,
                   help=f"input file, or {BUILTIN_PREFIX}karate for the bundled network")
    p.add_argument("--input-type", choices=("edgelist", "distmatrix"), default="edgelist")
    p.add_argument("--largest-component", action="store_true",
                   help="restrict an edge list to its largest connected component")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hydra-embed",
                                     description="Strain-minimising hyperbolic embedding.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("embed", help="embed a network or distance matrix")
    _add_input(p)
    _add_common(p)
    p.add_argument("--repeats", type=int, default=20, help="random starts for stress-random")
    p.add_argument("--solver", choices=("auto", "dense", "iterative"), default="auto")
    p.add_argument("--out-coords")
    p.add_argument("--out-report")

    p = sub.add_parser("eval", help="recompute stress and strain of stored coordinates")
    p.add_argument("--coords", required=True)
    _add_input(p)
    p.add_argument("--curvature", type=float, default=1.0)
    p.add_argument("--out-report")

    p = sub.add_parser("plot", help="draw a 2-D embedding in the Poincare disc as SVG")
    p.add_argument("--coords", required=True)
    p.add_argument("--input", help="edge list whose edges are drawn as geodesics")
    p.add_argument("--edges-per-node", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-svg", required=True)

    p = sub.add_parser("bench", help="fit the runtime exponent on synthetic graphs")
    p.add_argument("--sizes", default="200,400,800,1600")
    _add_common(p)
    p.add_argument("--repeats", type=int, default=3, help="timing repetitions per size")
    p.add_argument("--solver", choices=("auto", "dense", "iterative"), default="iterative")
    p.add_argument("--out-report")
    return parser


def _settings(args) -> OptimizerSettings:
    return OptimizerSettings(max_iterations=args.max_iter, gradient_tolerance=args.grad_tol,
                             history_size=args.history, seed=args.seed)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        if args.command == "embed":
            config = RunConfig(
                method=args.method, input_path=args.input, input_type=args.input_type,
                dim=args.dim, kappa=args.curvature, equi_lambda=args.equi_lambda,
                seed=args.seed, repeats=args.repeats, largest_component=args.largest_component,
                solver=args.solver, optimizer=_settings(args),
                out_coords=args.out_coords, out_report=args.out_report,
            )
            report = cmd_embed(config)
            if not config.out_report:
                sys.stdout.write(report.to_json())
        elif args.command == "eval":
            report = cmd_eval(args.coords, args.input, args.input_type, args.curvature,
                              args.largest_component)
            if args.out_report:
                write_atomic(args.out_report, report.to_json())
            else:
                sys.stdout.write(report.to_json())
        elif args.command == "plot":
            write_atomic(args.out_svg, cmd_plot(args.coords, args.input, args.seed,
                                                args.edges_per_node))
        elif args.command == "bench":
            sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
            fn = bench_method(args.method, args.dim, args.curvature, _settings(args),
                              args.equi_lambda, args.solver)
            result = run_bench(sizes, fn, seed=args.seed, repeats=args.repeats)
            sys.stdout.write(result.table() + f"\nalpha,{result.alpha:.4f}\n")
            if args.out_report:
                write_atomic(args.out_report, json.dumps(
                    {"method": args.method, "sizes": result.sizes, "times": result.times,
                     "alpha": result.alpha}, indent=2) + "\n")
    except (CLIError, ValueError, OSError) as exc:
        print(f"hydra-embed: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
