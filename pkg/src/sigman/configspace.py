"""Configuration spaces C_n(M): collision-checked tuples and path energies.

A configuration is an ordered tuple of pairwise-distinct points of a
factor manifold M; a configuration path is a polyline in the n-fold
product. Path energies flatten the configurations into the product
chart and reuse the 1-D signal machinery, so the product upper bounds
hold exactly at the discrete level, and each particle's component
energies are dominated term by term (the product chord of a segment is
at least any single particle's chord).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import energy as energymod
from . import gaussian as gaussmod
from . import geometry
from .geometry import ManifoldSpec, MembershipError
from .mesh import PolylinePath

COLLISION_EPS = 1e-9        # open-set margin witnessing membership in C_n(M)
TRANSITION_SAMPLES = 32     # interior probes per chord between configurations
_MAX_REJECTIONS = 100_000


class ConfigError(ValueError):
    """Invalid configuration input."""


class CollisionError(ConfigError):
    """Two points of a configuration (or transition) are too close."""


class SamplingExhausted(ConfigError):
    """Rejection sampling failed to produce a valid configuration."""


def min_pairwise_gap(points: np.ndarray) -> tuple[float, tuple[int, int]]:
    """Smallest pairwise chart distance and the pair attaining it."""
    n = points.shape[0]
    iu, ju = np.triu_indices(n, k=1)
    gaps = np.linalg.norm(points[iu] - points[ju], axis=1)
    k = int(np.argmin(gaps))
    return float(gaps[k]), (int(iu[k]), int(ju[k]))


@dataclass
class Configuration:
    """Ordered tuple of n >= 2 pairwise-distinct points of a manifold."""

    manifold: ManifoldSpec
    points: np.ndarray

    def __post_init__(self):
        self.points = np.atleast_2d(np.asarray(self.points, dtype=float))
        if self.points.shape[0] < 2:
            raise ConfigError("a configuration needs at least 2 points")
        ok = geometry.validate_points(self.manifold, self.points)
        if not ok.all():
            k = int(np.argmax(~ok))
            raise MembershipError(f"point {k} does not lie in the manifold")
        gap, pair = min_pairwise_gap(self.points)
        if not gap > COLLISION_EPS:
            raise CollisionError(
                f"points {pair[0]} and {pair[1]} collide (gap {gap})"
            )

    @property
    def n(self) -> int:
        return self.points.shape[0]


def make_configuration(m: ManifoldSpec, pts) -> Configuration:
    return Configuration(m, np.asarray(pts, dtype=float))


@dataclass
class ConfigPath:
    """Polyline in C_n(M): stacked coordinates of shape (K+1, n, d)."""

    manifold: ManifoldSpec
    coords: np.ndarray
    params: np.ndarray | None = None

    def __post_init__(self):
        self.coords = np.asarray(self.coords, dtype=float)
        if self.coords.ndim != 3:
            raise ConfigError("coords must have shape (steps+1, n, chart_dim)")
        if self.coords.shape[0] < 2:
            raise ConfigError("a configuration path needs at least 2 configurations")
        for k in range(self.coords.shape[0]):
            try:
                Configuration(self.manifold, self.coords[k])
            except (ConfigError, MembershipError) as exc:
                raise type(exc)(f"configuration {k}: {exc}") from None
        if self.params is None:
            self.params = np.linspace(0.0, 1.0, self.coords.shape[0])
        else:
            self.params = np.asarray(self.params, dtype=float)
            if self.params.shape != (self.coords.shape[0],):
                raise ConfigError("params length must match the configuration count")
        if not np.linalg.norm(self.coords[-1] - self.coords[0]) > 0.0:
            raise ConfigError("path endpoints A and B must differ")

    @property
    def n(self) -> int:
        return self.coords.shape[1]

    @property
    def n_configs(self) -> int:
        return self.coords.shape[0]

    def flattened(self) -> np.ndarray:
        return self.coords.reshape(self.coords.shape[0], -1)


def product_spec(path: ConfigPath) -> ManifoldSpec:
    return geometry.product_manifold([path.manifold] * path.n)


def _check_transitions(path: ConfigPath):
    """Probe each chord between consecutive configurations.

    Membership of every particle and pairwise collision margin are
    checked at TRANSITION_SAMPLES interior parameters plus the midpoint.
    """
    ts = np.append(np.linspace(0.0, 1.0, TRANSITION_SAMPLES + 2)[1:-1], 0.5)
    m = path.manifold
    d = path.coords.shape[2]
    for k in range(path.n_configs - 1):
        a, b = path.coords[k], path.coords[k + 1]
        pos = a[None, :, :] + ts[:, None, None] * (b - a)[None, :, :]
        if not geometry.validate_points(m, pos.reshape(-1, d)).all():
            raise MembershipError(
                f"transition {k} -> {k + 1} leaves the manifold between samples"
            )
        n = path.n
        iu, ju = np.triu_indices(n, k=1)
        gaps = np.linalg.norm(pos[:, iu, :] - pos[:, ju, :], axis=2)
        if not np.all(gaps > COLLISION_EPS):
            t_bad, pair_bad = np.unravel_index(int(np.argmin(gaps)), gaps.shape)
            raise CollisionError(
                f"transition {k} -> {k + 1}: points {int(iu[pair_bad])} and "
                f"{int(ju[pair_bad])} collide near t = {ts[t_bad]:.3f}"
            )


def to_polyline(path: ConfigPath) -> PolylinePath:
    """Flatten into a polyline over the n-fold product manifold."""
    return PolylinePath(product_spec(path), path.flattened(), path.params)


def config_path_energy(path: ConfigPath) -> energymod.EnergyReport:
    """Product-metric curve energies of the path, with rho^2/rho^3 bounds."""
    _check_transitions(path)
    report = energymod.curve_energy(energymod.SignalCurve(to_polyline(path)))
    report.discretization["n_particles"] = path.n
    return report


def component_energies(path: ConfigPath, j: int) -> tuple[float, float]:
    """Curve energies of particle j's own trajectory (0-based index).

    A stationary particle has zero-length links and zero energies, so
    this bypasses the polyline distinctness requirement.
    """
    if not 0 <= j < path.n:
        raise ConfigError(f"particle index {j} out of range for n = {path.n}")
    track = path.coords[:, j, :]
    seg = np.linalg.norm(np.diff(track, axis=0), axis=1)
    e1, e2, _ = energymod.segment_sums(seg)
    return e1, e2


@dataclass
class ConfigBoundReport:
    """All bound verdicts for one configuration path."""

    e1: float
    e2: float
    length: float
    bound1: float
    bound2: float
    upper1_ok: bool
    upper2_ok: bool
    component_e1: list[float]
    component_e2: list[float]
    components_ok: bool
    monotone_ok: bool
    hull_ok: bool
    lower_bound: float
    lower_ok: bool | None

    def to_json(self) -> dict:
        return {
            "e1": self.e1,
            "e2": self.e2,
            "length": self.length,
            "bound1": self.bound1,
            "bound2": self.bound2,
            "upper_ok": [self.upper1_ok, self.upper2_ok],
            "component_e1": self.component_e1,
            "component_e2": self.component_e2,
            "components_ok": self.components_ok,
            "monotone_ok": self.monotone_ok,
            "hull_ok": self.hull_ok,
            "lower_bound": self.lower_bound,
            "lower_ok": self.lower_ok,
        }


COMPONENT_TOL = 1e-12


def check_config_bounds(path: ConfigPath) -> ConfigBoundReport:
    """Verify the upper, per-component, and (when applicable) lower bounds.

    The lower-bound verdict is evaluated only when every flattened
    coordinate is monotone and the sampled hull stays inside C_n(M);
    otherwise it is reported as None.
    """
    report = config_path_energy(path)
    comp = [component_energies(path, j) for j in range(path.n)]
    comp_e1 = [c[0] for c in comp]
    comp_e2 = [c[1] for c in comp]
    components_ok = all(
        report.e1 >= e1j - COMPONENT_TOL and report.e2 >= e2j - COMPONENT_TOL
        for e1j, e2j in zip(comp_e1, comp_e2)
    )

    flat = path.flattened()
    mono_ok = all(gaussmod.coordinate_monotone(flat))
    probes = gaussmod.hull_samples(flat)
    n, d = path.n, path.coords.shape[2]
    probe_pts = probes.reshape(-1, n, d)
    member_ok = geometry.validate_points(
        path.manifold, probe_pts.reshape(-1, d)
    ).all()
    iu, ju = np.triu_indices(n, k=1)
    gaps = np.linalg.norm(probe_pts[:, iu, :] - probe_pts[:, ju, :], axis=2)
    hull_ok = bool(member_ok and np.all(gaps > COLLISION_EPS))

    lower = gaussmod.lower_bound_l3(flat[0], flat[-1])
    lower_ok = None
    if mono_ok and hull_ok:
        lower_ok = report.e2 >= lower - gaussmod.LOWER_BOUND_TOL

    seg = np.linalg.norm(np.diff(flat, axis=0), axis=1)
    return ConfigBoundReport(
        e1=report.e1,
        e2=report.e2,
        length=float(np.sum(seg)),
        bound1=report.bound1,
        bound2=report.bound2,
        upper1_ok=report.satisfied1,
        upper2_ok=report.satisfied2,
        component_e1=comp_e1,
        component_e2=comp_e2,
        components_ok=components_ok,
        monotone_ok=mono_ok,
        hull_ok=hull_ok,
        lower_bound=lower,
        lower_ok=lower_ok,
    )


# ---------------------------------------------------------------------------
# Random path generation
# ---------------------------------------------------------------------------

def _shell_radii(m: ManifoldSpec) -> tuple[float, float]:
    return float(np.sqrt(m.a)), float(np.sqrt(m.b))


def _sample_shell_point(m: ManifoldSpec, rng: np.random.Generator,
                        margin: float) -> np.ndarray:
    r_lo, r_hi = _shell_radii(m)
    direction = rng.normal(size=3)
    direction /= np.linalg.norm(direction)
    return direction * rng.uniform(r_lo + margin, r_hi - margin)


def _box_inside_shell(lo: np.ndarray, hi: np.ndarray, m: ManifoldSpec,
                      margin: float) -> bool:
    """Axis box containment in the shell, in closed form.

    Nearest box point to the origin must clear the inner sphere and the
    farthest corner must stay under the outer sphere.
    """
    nearest = np.clip(0.0, lo, hi)
    farthest = np.maximum(np.abs(lo), np.abs(hi))
    r_lo, r_hi = _shell_radii(m)
    return (np.linalg.norm(nearest) > r_lo + margin
            and np.linalg.norm(farthest) < r_hi - margin)


def _box_gap(lo1, hi1, lo2, hi2) -> float:
    """Distance between two axis-aligned boxes."""
    gap = np.maximum(0.0, np.maximum(lo1 - hi2, lo2 - hi1))
    return float(np.linalg.norm(gap))


def random_config_path(
    m: ManifoldSpec,
    n: int,
    seed,
    steps: int = 8,
    monotone: bool = False,
) -> ConfigPath:
    """Seeded random path in C_n(M) for M a shell or a euclidean space.

    Monotone mode draws per-particle endpoint pairs whose coordinate
    bounding boxes lie inside M with margin and are pairwise separated,
    then runs independent monotone staircases inside those boxes; that
    construction makes the convex hull of the whole path collision-free
    and inside C_n(M), so the lower-bound hypotheses verifiably hold.
    Non-monotone mode is a collision-repaired random walk. The collision
    margin is kept far above COLLISION_EPS in both modes.
    """
    if m.kind not in ("shell", "euclidean"):
        raise ConfigError(f"sampling is supported for shell and euclidean, not {m.kind}")
    if n < 2:
        raise ConfigError("need n >= 2 particles")
    rng = np.random.default_rng(seed)
    d = geometry.chart_dim(m)

    if m.kind == "shell":
        r_lo, r_hi = _shell_radii(m)
        thickness = r_hi - r_lo
        margin = 0.05 * thickness
        separation = max(0.05 * thickness, 10.0 * COLLISION_EPS)
        span = 0.35 * thickness
    else:
        margin = 0.0
        separation = max(0.1, 10.0 * COLLISION_EPS)
        span = 0.8

    def sample_point() -> np.ndarray:
        if m.kind == "shell":
            return _sample_shell_point(m, rng, margin)
        return rng.uniform(-1.0, 1.0, size=d)

    rejections = 0

    if monotone:
        while True:
            rejections += 1
            if rejections > _MAX_REJECTIONS:
                raise SamplingExhausted("could not place separated particle boxes")
            starts = np.array([sample_point() for _ in range(n)])
            stops = starts + rng.uniform(-span, span, size=(n, d))
            los = np.minimum(starts, stops)
            his = np.maximum(starts, stops)
            if m.kind == "shell" and not all(
                _box_inside_shell(los[j], his[j], m, margin=0.25 * margin)
                for j in range(n)
            ):
                continue
            ok = True
            for i in range(n):
                for j in range(i + 1, n):
                    if _box_gap(los[i], his[i], los[j], his[j]) < separation:
                        ok = False
            if ok:
                break
        weights = rng.exponential(size=(steps, n, d))
        cum = np.cumsum(weights, axis=0) / weights.sum(axis=0)
        coords = np.concatenate([
            starts[None, :, :],
            starts[None, :, :] + cum * (stops - starts)[None, :, :],
        ])
        coords[-1] = stops
        return ConfigPath(m, coords)

    # Random walk mode.
    while True:
        rejections += 1
        if rejections > _MAX_REJECTIONS:
            raise SamplingExhausted("could not place a separated start configuration")
        start = np.array([sample_point() for _ in range(n)])
        if min_pairwise_gap(start)[0] > separation:
            break
    coords = [start]
    current = start
    step_scale = 0.2 * span
    while len(coords) < steps + 1:
        rejections += 1
        if rejections > _MAX_REJECTIONS:
            raise SamplingExhausted("random walk could not keep particles separated")
        candidate = current + rng.normal(scale=step_scale, size=(n, d))
        if m.kind == "shell":
            r_lo, r_hi = _shell_radii(m)
            norms = np.linalg.norm(candidate, axis=1, keepdims=True)
            clipped = np.clip(norms, r_lo + margin, r_hi - margin)
            candidate = candidate / norms * clipped
        if min_pairwise_gap(candidate)[0] <= separation:
            continue
        if np.linalg.norm(candidate - current) == 0.0:
            continue
        coords.append(candidate)
        current = candidate
    return ConfigPath(m, np.array(coords))


def config_path_to_json(path: ConfigPath) -> dict:
    return {
        "manifold": geometry.manifold_to_json(path.manifold),
        "n": path.n,
        "params": path.params.tolist(),
        "configs": path.coords.tolist(),
    }


def config_path_from_json(data: dict) -> ConfigPath:
    try:
        coords = np.asarray(data["configs"], dtype=float)
        path = ConfigPath(
            geometry.manifold_from_json(data["manifold"]),
            coords,
            np.asarray(data["params"], dtype=float) if "params" in data else None,
        )
    except KeyError as exc:
        raise ConfigError(f"configuration path JSON missing field {exc}") from None
    if "n" in data and data["n"] != path.n:
        raise ConfigError("configuration path field 'n' disagrees with 'configs'")
    return path
