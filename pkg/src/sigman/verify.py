"""Seeded verification corpora for every inequality the library enforces.

Each check runs a reproducible corpus and reports a passed/total count;
`verify_all` aggregates them into the summary used by the CLI. The
checks are deliberately redundant with the unit tests: they are the
user-facing evidence that the inequalities hold on this installation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import configspace, energy, gaussian, geometry, graphembed, mesh

SCALE_INV_TOL = 1e-12
RATIO_ZERO_TOL = 1e-12
EMBED_TARGET = 1e-8
IDENTITY_TOL = 1e-3


@dataclass
class CheckResult:
    name: str
    passed: int
    total: int
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.passed == self.total

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "total": self.total,
            "ok": self.ok,
            "detail": self.detail,
        }


# ---------------------------------------------------------------------------
# Random inputs
# ---------------------------------------------------------------------------

def random_polyline(kind: str, rng: np.random.Generator, n_samples: int = 48,
                    monotone: bool = False) -> mesh.PolylinePath:
    """Seeded random polyline in R^2, R^3, or the reference shell.

    Monotone mode (independent per-coordinate staircases) is available
    for the euclidean kinds only.
    """
    if kind == "r2":
        spec, dim = geometry.euclidean(2), 2
    elif kind == "r3":
        spec, dim = geometry.euclidean(3), 3
    elif kind == "shell":
        spec, dim = geometry.spherical_shell(1.0, 4.0), 3
    else:
        raise ValueError(f"unknown polyline kind {kind!r}")

    if kind == "shell":
        if monotone:
            raise ValueError("monotone polylines are generated in euclidean kinds only")
        r_lo, r_hi = 1.0, 2.0
        margin = 0.05
        direction = rng.normal(size=3)
        direction /= np.linalg.norm(direction)
        current = direction * rng.uniform(r_lo + margin, r_hi - margin)
        pts = [current]
        while len(pts) < n_samples:
            cand = current + rng.normal(scale=0.08, size=3)
            norm = np.linalg.norm(cand)
            clipped = min(max(norm, r_lo + margin), r_hi - margin)
            cand = cand / norm * clipped
            if np.linalg.norm(cand - current) == 0.0:
                continue
            pts.append(cand)
            current = cand
        return mesh.PolylinePath(spec, np.array(pts))

    start = rng.uniform(-1.0, 1.0, size=dim)
    if monotone:
        stop = start + rng.uniform(-1.5, 1.5, size=dim)
        weights = rng.exponential(size=(n_samples - 1, dim))
        cum = np.cumsum(weights, axis=0) / weights.sum(axis=0)
        samples = np.vstack([start, start + cum * (stop - start)])
        samples[-1] = stop
    else:
        steps = rng.normal(scale=0.2, size=(n_samples - 1, dim))
        samples = np.vstack([start, start + np.cumsum(steps, axis=0)])
    return mesh.PolylinePath(spec, samples)


@dataclass
class SmoothMonotone:
    """Random smooth strictly increasing function on [0, 3].

    f(x) = c0 + alpha x + sum gamma_k sin(k x + phi_k) with
    alpha > sum k |gamma_k|, so f' >= 1. The antiderivative and the
    cumulative variation integral are analytic, giving independent
    oracles for the transform identities.
    """

    c0: float
    alpha: float
    gammas: np.ndarray
    phis: np.ndarray

    @classmethod
    def draw(cls, rng: np.random.Generator) -> "SmoothMonotone":
        k = np.arange(1, 5)
        gammas = rng.uniform(-0.3, 0.3, size=4) / k
        alpha = 1.0 + float(np.sum(k * np.abs(gammas)))
        return cls(
            c0=float(rng.uniform(-1.0, 1.0)),
            alpha=alpha,
            gammas=gammas,
            phis=rng.uniform(0.0, 2.0 * math.pi, size=4),
        )

    def __call__(self, x: np.ndarray) -> np.ndarray:
        k = np.arange(1, 5)
        return (self.c0 + self.alpha * x
                + np.sin(np.outer(x, k) + self.phis) @ self.gammas)

    def integral(self, x: float) -> float:
        """Antiderivative with value 0 at x = 0."""
        k = np.arange(1, 5)
        trig = -np.cos(k * x + self.phis) / k + np.cos(self.phis) / k
        return float(self.c0 * x + 0.5 * self.alpha * x ** 2
                     + np.dot(trig, self.gammas))

    def cumulative_variation_integral(self, x1: float) -> float:
        """integral_0^x1 (f(x) - f(0)) dx, exact for this monotone family."""
        return self.integral(x1) - x1 * float(self(np.array([0.0]))[0])


# ---------------------------------------------------------------------------
# Checks
# ---------------------------------------------------------------------------

def check_curve_upper_bounds(seed: int, count: int = 1000) -> CheckResult:
    """Random 1-D signals satisfy e1 <= rho^2 and e2 <= rho^3."""
    rng = np.random.default_rng([seed, 1])
    kinds = ["r2", "r3", "shell"]
    passed = 0
    for i in range(count):
        path = random_polyline(kinds[i % 3], rng)
        report = energy.curve_energy(energy.SignalCurve(path))
        if report.satisfied1 and report.satisfied2:
            passed += 1
    return CheckResult("curve_upper_bounds", passed, count)


def check_surface_upper_bounds(subdivisions: int = 3) -> CheckResult:
    """Sphere 2-D signal satisfies e1 <= diam*area, e2 <= diam^2*area."""
    sphere = mesh.triangulate_sphere(subdivisions)
    report = energy.region_energy(energy.SignalRegion(sphere, sources=[sphere.a]))
    ok = report.satisfied1 and report.satisfied2
    return CheckResult(
        "surface_upper_bounds", int(ok), 1,
        detail=f"e1={report.e1:.6f} bound1={report.bound1:.6f}",
    )


def check_gaussian_lower_bounds(seed: int, count: int = 1000) -> CheckResult:
    """Monotone hull-checked parameter paths satisfy the cubic lower bound."""
    rng = np.random.default_rng([seed, 2])
    passed = 0
    for i in range(count):
        n = 1 if i % 2 == 0 else 2
        path = gaussian.random_monotone_param_path(n, rng)
        report = gaussian.check_gaussian_lower_bound(path)
        if report.monotone_ok and report.hull_ok and report.satisfied:
            passed += 1
    return CheckResult("gaussian_lower_bounds", passed, count)


def check_config_bounds(seed: int, count: int = 1000) -> CheckResult:
    """Configuration paths satisfy the upper, component, and lower bounds.

    Every path is checked for the upper and per-particle bounds; the
    monotone half of the corpus must additionally pass the hypothesis
    checks and the cubic lower bound.
    """
    shell = geometry.spherical_shell(1.0, 4.0)
    sizes = [2, 3, 5]
    passed = 0
    for i in range(count):
        monotone = i % 2 == 0
        path = configspace.random_config_path(
            shell, sizes[i % 3], seed=(seed, 3, i), steps=8, monotone=monotone
        )
        report = configspace.check_config_bounds(path)
        ok = report.upper1_ok and report.upper2_ok and report.components_ok
        if monotone:
            ok = ok and report.monotone_ok and report.hull_ok and bool(report.lower_ok)
        if ok:
            passed += 1
    return CheckResult("config_bounds", passed, count)


def check_ratio_variance_props(seed: int) -> CheckResult:
    """Zero exactly at equal ratios; positive after a one-edge nudge."""
    rng = np.random.default_rng([seed, 4])
    r2 = geometry.euclidean(2)
    cases = 0
    passed = 0

    k3 = graphembed.WeightedGraph(3, [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)])
    tri = configspace.Configuration(
        r2, [[0.0, 0.0], [1.0, 0.0], [0.5, math.sqrt(3.0) / 2.0]]
    )
    cases += 1
    passed += int(graphembed.relative_ratio_variance(k3, tri) <= RATIO_ZERO_TOL)

    c4 = graphembed.WeightedGraph(
        4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 1.0)]
    )
    rhombus = configspace.Configuration(
        r2, [[0.0, 0.0], [1.0, 0.0], [1.3, math.sqrt(1.0 - 0.09)], [0.3, math.sqrt(1.0 - 0.09)]]
    )
    cases += 1
    passed += int(graphembed.relative_ratio_variance(c4, rhombus) <= RATIO_ZERO_TOL)

    for _ in range(50):
        scale = float(rng.uniform(0.2, 5.0))
        cfg = configspace.Configuration(r2, np.asarray(tri.points) * scale)
        cases += 1
        passed += int(graphembed.relative_ratio_variance(k3, cfg) <= RATIO_ZERO_TOL)
        nudged = np.asarray(cfg.points).copy()
        nudged[2] = nudged[2] * (1.0 + rng.uniform(0.05, 0.5))
        cases += 1
        passed += int(
            graphembed.relative_ratio_variance(
                k3, configspace.Configuration(r2, nudged)
            ) > 0.0
        )
    return CheckResult("ratio_variance_zero", passed, cases)


def _random_graph_and_config(rng: np.random.Generator):
    n = int(rng.integers(3, 7))
    edges = [(i, i + 1, float(rng.uniform(0.5, 2.0))) for i in range(n - 1)]
    for i in range(n):
        for j in range(i + 2, n):
            if rng.random() < 0.3:
                edges.append((i, j, float(rng.uniform(0.5, 2.0))))
    g = graphembed.WeightedGraph(n, edges)
    dim = int(rng.integers(2, 4))
    while True:
        pts = rng.uniform(-2.0, 2.0, size=(n, dim))
        if configspace.min_pairwise_gap(pts)[0] > 1e-3:
            break
    return g, configspace.Configuration(geometry.euclidean(dim), pts)


def check_scale_invariance(seed: int, count: int = 1000) -> CheckResult:
    """Dilations leave the objective unchanged to SCALE_INV_TOL."""
    rng = np.random.default_rng([seed, 5])
    passed = 0
    for _ in range(count):
        g, cfg = _random_graph_and_config(rng)
        alpha = float(10.0 ** rng.uniform(-2.0, 2.0))
        v0 = graphembed.relative_ratio_variance(g, cfg)
        v1 = graphembed.relative_ratio_variance(
            g, graphembed.scale_configuration(cfg, alpha)
        )
        if abs(v1 - v0) <= SCALE_INV_TOL * max(1.0, v0):
            passed += 1
    return CheckResult("scale_invariance", passed, count)


def check_embedding_minima(seed: int, restarts: int = 20) -> CheckResult:
    """K3 and the 4-cycle reach their exact-zero minima in the plane."""
    r2 = geometry.euclidean(2)
    k3 = graphembed.WeightedGraph(3, [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)])
    c4 = graphembed.WeightedGraph(
        4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 1.0)]
    )
    passed = 0
    details = []
    for name, g in (("k3", k3), ("c4", c4)):
        result = graphembed.minimize_ratio_variance(
            g, r2, seed=seed, restarts=restarts
        )
        details.append(f"{name}={result.objective:.2e}")
        passed += int(result.objective < EMBED_TARGET)
    return CheckResult("embedding_minima", passed, 2, detail=" ".join(details))


def check_function_identities(seed: int, count: int = 100,
                              n_samples: int = 10_000) -> CheckResult:
    """Transform identities on random smooth monotone functions.

    The antiderivative transform satisfies
    riemannian_energy(F) = 3/2 + sp_energy(f)/2, and the square-root
    cumulative-variation transform satisfies
    sp_energy(L) = integral of (f - f(0)), both within IDENTITY_TOL.
    """
    rng = np.random.default_rng([seed, 6])
    xs = np.linspace(0.0, 3.0, n_samples)
    passed = 0
    for _ in range(count):
        fn = SmoothMonotone.draw(rng)
        fs = fn(xs)
        _, F = energy.antiderivative_transform(xs, fs)
        lhs = energy.riemannian_energy(xs, F)
        rhs = 1.5 + 0.5 * energy.sp_energy(xs, fs)
        ok_a = abs(lhs - rhs) <= IDENTITY_TOL
        _, L = energy.sqrt_arclength_transform(xs, fs)
        ok_b = abs(
            energy.sp_energy(xs, L) - fn.cumulative_variation_integral(3.0)
        ) <= IDENTITY_TOL
        if ok_a and ok_b:
            passed += 1
    return CheckResult("function_energy_identities", passed, count)


def check_mesh_convergence(max_subdivisions: int = 4) -> CheckResult:
    """Icosphere area and diameter errors shrink monotonically."""
    area_errors = []
    diam_errors = []
    for k in range(1, max_subdivisions + 1):
        sphere = mesh.triangulate_sphere(k)
        area_errors.append(abs(mesh.mesh_area(sphere) - 4.0 * math.pi))
        diam_errors.append(abs(mesh.mesh_diameter(sphere) - math.pi))
    ok_area = all(b <= a + 1e-9 for a, b in zip(area_errors, area_errors[1:]))
    ok_diam = all(b <= a + 1e-9 for a, b in zip(diam_errors, diam_errors[1:]))
    detail = (
        "area_err=" + ",".join(f"{e:.2e}" for e in area_errors)
        + " diam_err=" + ",".join(f"{e:.2e}" for e in diam_errors)
    )
    return CheckResult(
        "mesh_convergence", int(ok_area) + int(ok_diam), 2, detail=detail
    )


def verify_all(seed: int = 42, quick: bool = False) -> dict:
    """Run the whole corpus; summary dict with per-check counts."""
    count = 50 if quick else 1000
    fn_count = 10 if quick else 100
    restarts = 6 if quick else 20
    checks = [
        check_curve_upper_bounds(seed, count),
        check_surface_upper_bounds(subdivisions=2 if quick else 3),
        check_gaussian_lower_bounds(seed, count),
        check_config_bounds(seed, 60 if quick else count),
        check_ratio_variance_props(seed),
        check_scale_invariance(seed, count),
        check_embedding_minima(seed, restarts),
        check_function_identities(seed, fn_count),
        check_mesh_convergence(max_subdivisions=3 if quick else 4),
    ]
    return {
        "seed": seed,
        "quick": quick,
        "checks": [c.to_json() for c in checks],
        "all_ok": all(c.ok for c in checks),
    }
