"""Signal energies: curve and region 1-/2-energies, transforms, bound checks.

For a curve with source point A = gamma(0), the distance to A is the
cumulative arc length s, so the energies reduce to integrals of s and
s^2 in the arc-length parameter. Both are integrated exactly per
segment (the midpoint rule is already exact for s; s^2 gets the
ds^2/12 midpoint correction), which makes every bound check
tolerance-free at the discrete level: E1 = L^2/2 <= L^2 and
E2 = L^3/3 <= L^3 for the upper bounds, and E2 >= ||q - p||_3^3 / 3
for the cubic lower bound since the polyline length dominates the
straight-line distance.

Region energies integrate the distance-to-source field with a face-mean
rule: each triangle contributes area * mean(vertex distances)^k. Every
vertex distance is at most the graph diameter on the same crossing
graph, so the surface bounds diam*vol and diam^2*vol also hold exactly
on the mesh.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid

from . import mesh as meshmod
from .mesh import PolylinePath, TriMesh

BOUND_RTOL = 1e-9   # float headroom for the discrete-exact inequalities


class EnergyError(ValueError):
    """Invalid signal or function table."""


@dataclass
class EnergyReport:
    """Energies of one signal together with their upper bounds."""

    e1: float
    e2: float
    bound1: float
    bound2: float
    satisfied1: bool
    satisfied2: bool
    discretization: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.e1 < 0.0 or self.e2 < 0.0:
            raise EnergyError("energies must be nonnegative")


def report_to_json(report: EnergyReport) -> dict:
    return {
        "e1": report.e1,
        "e2": report.e2,
        "bound1": report.bound1,
        "bound2": report.bound2,
        "satisfied": [report.satisfied1, report.satisfied2],
        **report.discretization,
    }


@dataclass
class SignalCurve:
    """1-D signal: a polyline with A = gamma(0) and B = gamma(1)."""

    path: PolylinePath

    def __post_init__(self):
        if np.array_equal(self.path.samples[0], self.path.samples[-1]):
            raise EnergyError("signal endpoints must be distinct")


@dataclass
class SignalRegion:
    """2-D signal: a mesh with a source vertex set A (and optional B)."""

    mesh: TriMesh
    sources: list[int] | None = None
    targets: list[int] | None = None

    def __post_init__(self):
        if self.sources is None:
            self.sources = list(self.mesh.sources or [])
        self.sources = [int(s) for s in self.sources]
        if not self.sources:
            raise EnergyError("region signal needs a nonempty source set")
        for s in self.sources:
            if not 0 <= s < self.mesh.n_vertices:
                raise EnergyError(f"source vertex {s} out of range")
        if self.targets is not None:
            self.targets = [int(t) for t in self.targets]
            if set(self.targets) & set(self.sources):
                raise EnergyError("source and target sets must be disjoint")


def segment_sums(seg_lengths: np.ndarray) -> tuple[float, float, float]:
    """Exact per-segment energies (e1, e2) and total length of a chord chain.

    Integrates s and s^2 in arc length exactly on each segment:
    the midpoint value mid*ds for s, and (mid^2 + ds^2/12)*ds for s^2.
    Zero-length links are allowed here; this is the shared kernel for
    curve energies and for per-particle component energies.
    """
    seg = np.asarray(seg_lengths, dtype=float)
    s = np.concatenate(([0.0], np.cumsum(seg)))
    mid = 0.5 * (s[:-1] + s[1:])
    e1 = float(np.sum(mid * seg))
    e2 = float(np.sum((mid * mid + seg * seg / 12.0) * seg))
    return e1, e2, float(s[-1])


def _bounded_report(e1, e2, bound1, bound2, discretization) -> EnergyReport:
    return EnergyReport(
        e1=e1,
        e2=e2,
        bound1=bound1,
        bound2=bound2,
        satisfied1=e1 <= bound1 * (1.0 + BOUND_RTOL),
        satisfied2=e2 <= bound2 * (1.0 + BOUND_RTOL),
        discretization=discretization,
    )


def curve_energy(sig: SignalCurve) -> EnergyReport:
    """Energies of a 1-D signal with bounds rho^2 and rho^3, rho = length."""
    seg = meshmod.segment_lengths(sig.path)
    e1, e2, length = segment_sums(seg)
    if length == 0.0:
        raise EnergyError("degenerate path of zero length")
    return _bounded_report(
        e1, e2, length ** 2, length ** 3,
        {"n_samples": sig.path.n_samples},
    )


def region_energy(sig: SignalRegion) -> EnergyReport:
    """Energies of a 2-D signal with bounds diam*vol and diam^2*vol."""
    m = sig.mesh
    dist = meshmod.geodesic_distance_field(m, sig.sources)
    areas = meshmod.face_areas(m)
    face_mean = dist[m.faces].mean(axis=1)
    e1 = float(np.sum(areas * face_mean))
    e2 = float(np.sum(areas * face_mean ** 2))
    diam = meshmod.mesh_diameter(m)
    vol = float(np.sum(areas))
    return _bounded_report(
        e1, e2, diam * vol, diam ** 2 * vol,
        {"n_vertices": m.n_vertices, "n_faces": m.n_faces},
    )


def rectangle_region(step: float) -> SignalRegion:
    """The benchmark rectangle [-1,1] x [0,1] with A the top edge y = 1.

    Closed forms: e1 integrates (1 - y) to 1 and e2 integrates
    (1 - y)^2 to 2/3.
    """
    grid = meshmod.triangulate_rectangle(-1.0, 1.0, 0.0, 1.0, step, source_edge="top")
    targets = [int(i) for i in np.arange(grid.n_vertices)
               if grid.vertices[i, 1] == 0.0]
    return SignalRegion(grid, targets=targets)


# ---------------------------------------------------------------------------
# Function-table energies on a uniform grid
# ---------------------------------------------------------------------------

def _check_table(xs, fs, min_samples: int):
    xs = np.asarray(xs, dtype=float)
    fs = np.asarray(fs, dtype=float)
    if xs.ndim != 1 or xs.shape != fs.shape:
        raise EnergyError("function table needs matching 1-D x and f arrays")
    if xs.shape[0] < min_samples:
        raise EnergyError(f"function table needs at least {min_samples} samples")
    h = np.diff(xs)
    if h[0] <= 0.0 or not np.allclose(h, h[0], rtol=1e-9, atol=0.0):
        raise EnergyError("function table grid must be uniform and increasing")
    return xs, fs, float(h[0])


def riemannian_energy(xs, fs) -> float:
    """(1/2) integral of (1 + f'^2) with central-difference f'."""
    xs, fs, h = _check_table(xs, fs, 3)
    deriv = np.gradient(fs, h, edge_order=2)
    return float(trapezoid(0.5 * (1.0 + deriv ** 2), xs))


def sp_energy(xs, fs) -> float:
    """Integral of f^2 (trapezoid rule)."""
    xs, fs, _ = _check_table(xs, fs, 2)
    return float(trapezoid(fs ** 2, xs))


def antiderivative_transform(xs, fs) -> tuple[np.ndarray, np.ndarray]:
    """F(x) = integral of f from 0 to x on the same grid; F(0) = 0."""
    xs, fs, _ = _check_table(xs, fs, 2)
    if abs(xs[0]) > 1e-12:
        raise EnergyError(f"grid must start at 0, got x0 = {xs[0]}")
    return xs, cumulative_trapezoid(fs, xs, initial=0.0)


def sqrt_arclength_transform(xs, fs) -> tuple[np.ndarray, np.ndarray]:
    """L(x) = sqrt(integral of |f'| from x0 to x) on the same grid.

    The integrand is the total variation rate of f, so for monotone f
    the key identity is sp_energy(L) = integral of (f(x) - f(x0)).
    Note the quantity under the square root is the cumulative variation
    of f, not the arc length of its graph (which would integrate
    sqrt(1 + f'^2)); the variation form is what makes the identity
    above exact.
    """
    xs, fs, h = _check_table(xs, fs, 3)
    deriv = np.gradient(fs, h, edge_order=2)
    variation = cumulative_trapezoid(np.abs(deriv), xs, initial=0.0)
    return xs, np.sqrt(variation)


def word_energy(letters) -> tuple[float, float]:
    """Total (e1, e2) of a finite letter sequence: plain sums."""
    letters = list(letters)
    if not letters:
        raise EnergyError("word needs at least one letter")
    e1 = math.fsum(rep.e1 for rep in letters)
    e2 = math.fsum(rep.e2 for rep in letters)
    return e1, e2
