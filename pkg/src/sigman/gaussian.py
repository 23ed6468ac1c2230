"""Gaussian parameter spaces: product metric, Fisher tensor, lower bound.

The parameter space pairs a mean in an open box with a covariance in the
SPD cone and carries the flat product metric of the chart (see the
geometry module), not the Fisher metric. The Fisher tensor of the 1-D
family is still computed numerically as a reference object: each
component is -E[second derivative of log density], evaluated by
trapezoid quadrature on [mu - 12 sigma, mu + 12 sigma], where the rule
converges to machine precision for a few hundred nodes.

Two closed forms for the d sigma^2 component circulate: 2/sigma^2 and
2 sqrt(2) / (sigma^2 sqrt(pi)). The quadrature is the arbiter here; it
reproduces 2/sigma^2, and reports carry all three values side by side
rather than asserting either closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import energy as energymod
from . import geometry
from .geometry import SPD_EPS
from .mesh import PolylinePath

MONO_EPS = 1e-12        # slack for per-coordinate monotonicity verdicts
LOWER_BOUND_TOL = 1e-9  # slack for the cubic lower bound verdict
_HULL_COMBOS = 1000
_HULL_SEED = 20260810   # fixed stream: reports are reproducible


class GaussianError(ValueError):
    """Invalid Gaussian parameter input."""


@dataclass
class GaussParamPoint:
    """A (mean, covariance) pair; covariance must be symmetric PD."""

    mu: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        self.mu = np.atleast_1d(np.asarray(self.mu, dtype=float))
        self.sigma = np.atleast_2d(np.asarray(self.sigma, dtype=float))
        n = self.mu.shape[0]
        if self.sigma.shape != (n, n):
            raise GaussianError(
                f"covariance shape {self.sigma.shape} does not match mean length {n}"
            )
        if not np.allclose(self.sigma, self.sigma.T, rtol=0.0,
                           atol=1e-12 * max(1.0, np.abs(self.sigma).max())):
            raise GaussianError("covariance must be symmetric")
        lam = float(np.linalg.eigvalsh(self.sigma)[0])
        if not lam > SPD_EPS:
            raise GaussianError(f"covariance minimum eigenvalue {lam} not > {SPD_EPS}")

    @property
    def n(self) -> int:
        return self.mu.shape[0]

    def chart(self) -> np.ndarray:
        return geometry.gaussian_chart(self.mu, self.sigma)


@dataclass
class FisherTensor:
    """Fisher metric components at one (mu, sigma) of the 1-D family."""

    g11: float
    g12: float
    g22: float

    def __post_init__(self):
        if not (self.g11 > 0.0 and self.g22 > 0.0
                and self.g11 * self.g22 - self.g12 ** 2 > 0.0):
            raise GaussianError("Fisher tensor must be positive definite")

    @property
    def det(self) -> float:
        return self.g11 * self.g22 - self.g12 ** 2


def fisher_metric_numeric(mu: float, sigma: float, quad_points: int = 401) -> FisherTensor:
    """Fisher tensor by quadrature of the defining integrals.

    The second derivatives of log f are analytic here; only the
    expectation is numerical, so g11 lands on 1/sigma^2 and g12 on 0 to
    near machine precision.
    """
    if sigma <= 0.0:
        raise GaussianError(f"sigma must be positive, got {sigma}")
    if quad_points < 200:
        raise GaussianError("quad_points must be at least 200")
    xs = np.linspace(mu - 12.0 * sigma, mu + 12.0 * sigma, quad_points)
    pdf = np.exp(-0.5 * ((xs - mu) / sigma) ** 2) / (sigma * math.sqrt(2.0 * math.pi))
    s2 = sigma ** 2
    g11 = float(np.trapezoid(pdf / s2, xs))
    g12 = float(np.trapezoid(pdf * 2.0 * (xs - mu) / sigma ** 3, xs))
    g22 = float(np.trapezoid(pdf * (3.0 * (xs - mu) ** 2 / s2 ** 2 - 1.0 / s2), xs))
    return FisherTensor(g11=g11, g12=g12, g22=g22)


def g22_closed_forms(sigma: float) -> dict[str, float]:
    """Both circulating closed forms for the d sigma^2 component."""
    return {
        "classical": 2.0 / sigma ** 2,
        "alternate": 2.0 * math.sqrt(2.0) / (sigma ** 2 * math.sqrt(math.pi)),
    }


def fisher_report(mu: float, sigma: float, quad_points: int = 401) -> dict:
    """Numeric tensor next to both g22 candidates, for the CLI."""
    tensor = fisher_metric_numeric(mu, sigma, quad_points)
    forms = g22_closed_forms(sigma)
    return {
        "mu": mu,
        "sigma": sigma,
        "quad_points": quad_points,
        "g11": tensor.g11,
        "g12": tensor.g12,
        "g22_numeric": tensor.g22,
        "g22_classical": forms["classical"],
        "g22_alternate": forms["alternate"],
    }


def product_metric_distance(x: GaussParamPoint, y: GaussParamPoint, p: float = 2.0) -> float:
    """L^p distance between parameter points in chart coordinates."""
    if x.n != y.n:
        raise GaussianError(f"dimension mismatch: n = {x.n} vs {y.n}")
    if p < 1.0:
        raise GaussianError(f"norm order must be >= 1, got {p}")
    diff = x.chart() - y.chart()
    if p == 2.0:
        return float(np.linalg.norm(diff))
    return float(np.sum(np.abs(diff) ** p) ** (1.0 / p))


def lower_bound_l3(p, q) -> float:
    """(1/3) * ||q - p||_3^3 over chart coordinates."""
    diff = np.abs(np.asarray(q, dtype=float) - np.asarray(p, dtype=float))
    return float(np.sum(diff ** 3) / 3.0)


@dataclass
class GaussianBoundReport:
    """Hypothesis verdicts and the cubic lower-bound check for one path."""

    monotone: list[bool]
    monotone_ok: bool
    hull_ok: bool
    e2: float
    lower_bound: float
    satisfied: bool
    n_samples: int

    def to_json(self) -> dict:
        return {
            "monotone": self.monotone,
            "monotone_ok": self.monotone_ok,
            "hull_ok": self.hull_ok,
            "e2": self.e2,
            "lower_bound": self.lower_bound,
            "satisfied": self.satisfied,
            "n_samples": self.n_samples,
        }


def coordinate_monotone(samples: np.ndarray, eps: float = MONO_EPS) -> list[bool]:
    """Per-coordinate verdicts: nondecreasing or nonincreasing within eps."""
    diffs = np.diff(samples, axis=0)
    up = np.all(diffs >= -eps, axis=0)
    down = np.all(diffs <= eps, axis=0)
    return [bool(u or d) for u, d in zip(up, down)]


def hull_samples(samples: np.ndarray, rng: np.random.Generator | None = None) -> np.ndarray:
    """Probe points of the convex hull of the path samples.

    All pairwise midpoints plus seeded random convex combinations. The
    SPD cone is convex and the mean box is convex, so membership can
    only fail on the box; the sampling doubles as a defensive check of
    exactly that.
    """
    if rng is None:
        rng = np.random.default_rng(_HULL_SEED)
    n = samples.shape[0]
    iu, ju = np.triu_indices(n, k=1)
    mids = 0.5 * (samples[iu] + samples[ju])
    weights = rng.exponential(size=(_HULL_COMBOS, n))
    weights /= weights.sum(axis=1, keepdims=True)
    return np.vstack([mids, weights @ samples])


def check_gaussian_lower_bound(path: PolylinePath) -> GaussianBoundReport:
    """Check E2 >= (1/3)||q - p||_3^3 for a path in the parameter chart.

    Reports per-coordinate monotonicity, sampled hull containment, E2,
    and the bound verdict. The discrete E2 integrates s^2 exactly along
    the polyline, so the verdict holds whenever the hypotheses do.
    """
    m = path.manifold
    if m.kind != "gaussian_param":
        raise GaussianError(
            f"lower bound check needs a gaussian_param path, got {m.kind}"
        )
    samples = path.samples
    mono = coordinate_monotone(samples)
    probes = hull_samples(samples)
    hull_ok = bool(geometry.validate_points(m, probes).all())
    report = energymod.curve_energy(energymod.SignalCurve(path))
    lower = lower_bound_l3(samples[0], samples[-1])
    return GaussianBoundReport(
        monotone=mono,
        monotone_ok=all(mono),
        hull_ok=hull_ok,
        e2=report.e2,
        lower_bound=lower,
        satisfied=report.e2 >= lower - LOWER_BOUND_TOL,
        n_samples=path.n_samples,
    )


# ---------------------------------------------------------------------------
# Corpus generation
# ---------------------------------------------------------------------------

def random_monotone_param_path(
    n: int,
    rng: np.random.Generator,
    n_segments: int = 64,
    box_margin: float = 0.1,
) -> PolylinePath:
    """Seeded monotone staircase between two random parameter points.

    Covariance endpoints are sampled diagonally dominant (diagonal in
    [2, 3], off-diagonal in [-0.3, 0.3]) so every point of the
    per-coordinate bounding box is PD by Gershgorin, which makes the
    hull check pass by construction. Means stay inside the default box
    [-5, 5]^n shrunk by ``box_margin``.
    """
    box = [(-5.0, 5.0)] * n
    spec = geometry.gaussian_param(box)
    lo = np.array([lo for lo, _ in box]) + box_margin
    hi = np.array([hi for _, hi in box]) - box_margin

    def endpoint() -> np.ndarray:
        mu = rng.uniform(lo, hi)
        diag = rng.uniform(2.0, 3.0, size=n)
        sigma = np.diag(diag)
        iu, ju = np.triu_indices(n, k=1)
        off = rng.uniform(-0.3, 0.3, size=iu.shape[0])
        sigma[iu, ju] = off
        sigma[ju, iu] = off
        return geometry.gaussian_chart(mu, sigma)

    start = endpoint()
    stop = endpoint()
    steps = rng.exponential(size=(n_segments, start.shape[0]))
    cum = np.cumsum(steps, axis=0) / steps.sum(axis=0)
    samples = np.vstack([start, start + cum * (stop - start)])
    samples[-1] = stop
    return PolylinePath(spec, samples)
