"""Graph metrics, embedding predicates, and ratio-variance minimization.

A weighted graph is represented against a fixed edge enumeration (the
list order). The relative ratio variance of a configuration measures
the dispersion of edge-distance-to-weight ratios and is zero exactly
when all ratios agree; it is invariant under global metric dilations,
so minimizers are only defined up to scale in Euclidean targets. The
objective surface is smooth away from collisions and multimodal, hence
the optimizer is a seeded multi-start local search: numeric-gradient
descent with backtracking, feasibility projection after every step, and
a small collision barrier that is active during the search only (the
reported objective is always barrier-free).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from . import geometry
from .configspace import COLLISION_EPS, Configuration
from .geometry import GeometryError, ManifoldSpec

BARRIER_BETA = 1e-8


class GraphError(ValueError):
    """Invalid graph or embedding input."""


@dataclass
class WeightedGraph:
    """Simple connected graph with positive edge weights.

    ``edges`` is a list of (i, j, w) with i < j; its order is the fixed
    edge enumeration used by ratio vectors.
    """

    n: int
    edges: list[tuple[int, int, float]]

    def __post_init__(self):
        if self.n < 1:
            raise GraphError("graph needs at least one vertex")
        seen = set()
        norm_edges = []
        for e in self.edges:
            i, j, w = int(e[0]), int(e[1]), float(e[2])
            if not 0 <= i < j < self.n:
                raise GraphError(f"edge ({i}, {j}) must satisfy 0 <= i < j < n")
            if (i, j) in seen:
                raise GraphError(f"duplicate edge ({i}, {j})")
            if not w > 0.0:
                raise GraphError(f"edge ({i}, {j}) weight {w} must be positive")
            seen.add((i, j))
            norm_edges.append((i, j, w))
        self.edges = norm_edges
        if self.n > 1:
            adj = self._matrix(unit=True)
            order, reached = _bfs(adj, 0)
            if len(reached) != self.n:
                raise GraphError("graph must be connected")

    @property
    def m(self) -> int:
        return len(self.edges)

    def _matrix(self, unit: bool) -> csr_matrix:
        i = np.array([e[0] for e in self.edges], dtype=np.int64)
        j = np.array([e[1] for e in self.edges], dtype=np.int64)
        w = np.ones(self.m) if unit else np.array([e[2] for e in self.edges])
        return csr_matrix(
            (np.concatenate([w, w]), (np.concatenate([i, j]), np.concatenate([j, i]))),
            shape=(self.n, self.n),
        )


def _bfs(adj: csr_matrix, root: int):
    seen = {root}
    frontier = [root]
    order = [root]
    while frontier:
        nxt = []
        for u in frontier:
            for v in adj[u].indices:
                if v not in seen:
                    seen.add(int(v))
                    nxt.append(int(v))
                    order.append(int(v))
        frontier = nxt
    return order, seen


def graph_to_json(g: WeightedGraph) -> dict:
    return {"n": g.n, "edges": [[i, j, w] for i, j, w in g.edges]}


def graph_from_json(data: dict) -> WeightedGraph:
    try:
        return WeightedGraph(int(data["n"]), [tuple(e) for e in data["edges"]])
    except KeyError as exc:
        raise GraphError(f"graph JSON missing field {exc}") from None


def graph_metric(g: WeightedGraph, unit_weights: bool = True) -> np.ndarray:
    """All-pairs shortest-path table; hop counts when unit_weights."""
    dist = shortest_path(g._matrix(unit=unit_weights), directed=False,
                         unweighted=unit_weights)
    return np.asarray(dist)


def _placement_array(g: WeightedGraph, placement) -> np.ndarray:
    if isinstance(placement, dict):
        placement = [placement[i] for i in range(g.n)]
    pts = np.atleast_2d(np.asarray(placement, dtype=float))
    if pts.shape[0] != g.n:
        raise GraphError(f"placement must map all {g.n} vertices")
    return pts


def is_isometric_embedding(g: WeightedGraph, placement, m: ManifoldSpec,
                           tol: float = 1e-9) -> bool:
    """True iff manifold distances match hop distances for ALL pairs."""
    pts = _placement_array(g, placement)
    for k in range(g.n):
        geometry.validate_point(m, pts[k])
    d_graph = graph_metric(g, unit_weights=True)
    for i in range(g.n):
        for j in range(i + 1, g.n):
            if abs(geometry.distance(m, pts[i], pts[j]) - d_graph[i, j]) > tol:
                return False
    return True


def is_quasi_isometric_embedding(g: WeightedGraph, placement, m: ManifoldSpec,
                                 tol: float = 1e-9) -> bool:
    """True iff every EDGE maps to a unit-distance pair (non-edges free)."""
    pts = _placement_array(g, placement)
    for k in range(g.n):
        geometry.validate_point(m, pts[k])
    for i, j, _ in g.edges:
        if abs(geometry.distance(m, pts[i], pts[j]) - 1.0) > tol:
            return False
    return True


def ratio_vector(g: WeightedGraph, config: Configuration) -> np.ndarray:
    """r_k = d_M(x_i, x_j) / w_k in the fixed edge order."""
    if config.n != g.n:
        raise GraphError(
            f"configuration has {config.n} points, graph has {g.n} vertices"
        )
    m = config.manifold
    r = np.empty(g.m)
    for k, (i, j, w) in enumerate(g.edges):
        d = geometry.distance(m, config.points[i], config.points[j])
        if not d > 0.0:
            raise GraphError(f"edge ({i}, {j}) has zero manifold distance")
        r[k] = d / w
    return r


def ratio_variance(r) -> float:
    """Relative dispersion of the ratios: sum (r_k - mean)^2 / mean^2.

    Accumulated with exact (full precision) summation, so the value is
    independent of the edge enumeration order.
    """
    r = np.asarray(r, dtype=float)
    if r.ndim != 1 or r.size == 0:
        raise GraphError("ratio vector must be a nonempty 1-D array")
    if np.any(r <= 0.0):
        raise GraphError("ratio entries must be positive")
    mean = math.fsum(r) / r.size
    num = math.fsum((x - mean) ** 2 for x in r.tolist())
    return num / (mean * mean)


def relative_ratio_variance(g: WeightedGraph, config: Configuration) -> float:
    return ratio_variance(ratio_vector(g, config))


def scale_configuration(config: Configuration, alpha: float) -> Configuration:
    """Dilate a Euclidean configuration by alpha > 0."""
    if config.manifold.kind != "euclidean":
        raise GraphError("dilations are only supported for euclidean manifolds")
    if not alpha > 0.0:
        raise GraphError(f"scale factor must be positive, got {alpha}")
    return Configuration(config.manifold, config.points * alpha)


# ---------------------------------------------------------------------------
# Minimization
# ---------------------------------------------------------------------------

@dataclass
class EmbedResult:
    config: Configuration
    objective: float
    iterations: int
    restarts: int
    seed: int

    def __post_init__(self):
        if self.objective < 0.0:
            raise GraphError("objective must be nonnegative")


def _project(m: ManifoldSpec, pts: np.ndarray) -> np.ndarray:
    if m.kind == "euclidean":
        return pts
    if m.kind == "unit_sphere":
        return pts / np.linalg.norm(pts, axis=1, keepdims=True)
    if m.kind == "shell":
        r_lo, r_hi = math.sqrt(m.a), math.sqrt(m.b)
        pad = 1e-3 * (r_hi - r_lo)
        norms = np.linalg.norm(pts, axis=1, keepdims=True)
        return pts / norms * np.clip(norms, r_lo + pad, r_hi - pad)
    raise GraphError(f"manifold kind {m.kind!r} is not supported for embedding")


def _edge_distances(m: ManifoldSpec, pts: np.ndarray, edges) -> np.ndarray | None:
    """Distances of the edge pairs; None when any pair is unmeasurable."""
    out = np.empty(len(edges))
    for k, (i, j, _) in enumerate(edges):
        try:
            out[k] = geometry.distance(m, pts[i], pts[j])
        except GeometryError:
            return None
    return out


def _objectives(g: WeightedGraph, m: ManifoldSpec, pts: np.ndarray,
                weights: np.ndarray) -> tuple[float, float]:
    """(raw ratio variance, barrier-augmented search objective)."""
    dists = _edge_distances(m, pts, g.edges)
    if dists is None or np.any(dists <= 0.0):
        return math.inf, math.inf
    raw = ratio_variance(dists / weights)
    iu, ju = np.triu_indices(g.n, k=1)
    gaps_sq = np.sum((pts[iu] - pts[ju]) ** 2, axis=1)
    if np.any(gaps_sq <= COLLISION_EPS ** 2):
        return math.inf, math.inf
    return raw, raw + BARRIER_BETA * float(np.sum(1.0 / gaps_sq))


def _descend(g, m, pts, weights, scale, max_iters, tol_obj):
    """Numeric-gradient descent with backtracking; returns local best."""
    h = 1e-6 * scale
    step = 0.1 * scale
    raw, f = _objectives(g, m, pts, weights)
    best_raw, best_pts = raw, pts.copy()
    iterations = 0
    stall = 0
    for _ in range(max_iters):
        iterations += 1
        grad = np.zeros_like(pts)
        flat = pts.ravel()
        gflat = grad.ravel()
        for k in range(flat.size):
            orig = flat[k]
            flat[k] = orig + h
            _, f_plus = _objectives(g, m, pts, weights)
            flat[k] = orig - h
            _, f_minus = _objectives(g, m, pts, weights)
            flat[k] = orig
            if not (math.isfinite(f_plus) and math.isfinite(f_minus)):
                gflat[k] = 0.0
            else:
                gflat[k] = (f_plus - f_minus) / (2.0 * h)
        gnorm = float(np.linalg.norm(grad))
        if gnorm == 0.0:
            break
        t = step
        improved = False
        while t > 1e-14 * scale:
            cand = _project(m, pts - (t / gnorm) * grad)
            raw_c, f_c = _objectives(g, m, cand, weights)
            if f_c < f:
                pts = cand
                gain = f - f_c
                f = f_c
                if raw_c < best_raw:
                    best_raw, best_pts = raw_c, cand.copy()
                step = min(t * 2.0, scale)
                improved = True
                stall = 0 if gain > tol_obj else stall + 1
                break
            t *= 0.5
        if not improved or stall >= 5:
            break
    return best_raw, best_pts, iterations


def _anneal(g, m, pts, weights, scale, rng, iters=400):
    """Coarse simulated-annealing sweep; returns the best point visited."""
    raw, f = _objectives(g, m, pts, weights)
    best_raw, best_pts = raw, pts.copy()
    temperature = max(f, 1.0) if math.isfinite(f) else 1.0
    for it in range(iters):
        temp = temperature * (1.0 - it / iters) + 1e-12
        cand = _project(m, pts + rng.normal(scale=0.3 * scale * temp / temperature,
                                            size=pts.shape))
        raw_c, f_c = _objectives(g, m, cand, weights)
        if not math.isfinite(f_c):
            continue
        if f_c <= f or rng.random() < math.exp(-(f_c - f) / temp):
            pts, f = cand, f_c
            if raw_c < best_raw:
                best_raw, best_pts = raw_c, cand.copy()
    return best_pts


def minimize_ratio_variance(
    g: WeightedGraph,
    m: ManifoldSpec,
    seed: int = 0,
    restarts: int = 8,
    max_iters: int = 250,
    step_init: float | None = None,
    tol_obj: float = 1e-13,
    method: str = "descent",
    workers: int = 1,
) -> EmbedResult:
    """Best-of-restarts minimization of the relative ratio variance.

    Deterministic for a fixed seed: each restart owns the RNG stream
    derived from (seed, restart index), so results do not depend on the
    worker schedule. The returned objective never exceeds the raw
    objective of any evaluated iterate, initial samples included.
    """
    if g.n < 2:
        raise GraphError("embedding needs at least 2 vertices")
    if method not in ("descent", "anneal"):
        raise GraphError(f"unknown method {method!r}")
    dim = geometry.chart_dim(m)
    weights = np.array([w for _, _, w in g.edges])
    mean_w = float(weights.mean())
    if m.kind == "euclidean":
        radius = mean_w * g.n ** (1.0 / dim)
        scale = step_init if step_init is not None else radius
    elif m.kind in ("unit_sphere", "shell"):
        radius = 1.0 if m.kind == "unit_sphere" else math.sqrt(m.b)
        scale = step_init if step_init is not None else 0.5
    else:
        raise GraphError(f"manifold kind {m.kind!r} is not supported for embedding")

    def run_restart(idx: int):
        rng = np.random.default_rng([seed, idx])
        attempts = 0
        while True:
            attempts += 1
            if attempts > 1000:
                raise GraphError("could not draw a feasible start configuration")
            direction = rng.normal(size=(g.n, dim))
            direction /= np.linalg.norm(direction, axis=1, keepdims=True)
            radii = radius * rng.random(size=(g.n, 1)) ** (1.0 / dim)
            pts = _project(m, direction * radii)
            raw0, f0 = _objectives(g, m, pts, weights)
            if math.isfinite(f0):
                break
        if method == "anneal":
            pts = _anneal(g, m, pts, weights, scale, rng)
            raw0 = min(raw0, _objectives(g, m, pts, weights)[0])
        best_raw, best_pts, iters = _descend(
            g, m, pts, weights, scale, max_iters, tol_obj
        )
        if raw0 < best_raw:
            best_raw, best_pts = raw0, pts
        return best_raw, best_pts, iters

    indices = range(restarts)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run_restart, indices))
    else:
        outcomes = [run_restart(i) for i in indices]

    best_raw, best_pts, total_iters = math.inf, None, 0
    for raw, pts, iters in outcomes:
        total_iters += iters
        if raw < best_raw:
            best_raw, best_pts = raw, pts
    if not math.isfinite(best_raw):
        raise GraphError("search produced no finite objective value")
    return EmbedResult(
        config=Configuration(m, best_pts),
        objective=best_raw,
        iterations=total_iters,
        restarts=restarts,
        seed=seed,
    )
